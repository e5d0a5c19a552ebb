//! Exact value function of the barrier-inventory control problem and the
//! optimal feedback speed derived from it.
//!
//! Everything is driven by the auxiliary function
//!
//! ```text
//! psi(t, x) = erf(u) + exp(-beta x + beta^2 sigma^2 t / 2) * erfc(y),
//!     u = x / (sigma sqrt(2 t)),   y = u - beta sigma sqrt(t) / sqrt(2),
//! ```
//!
//! via `U(t, z) = log(psi(t, z - c)) / beta`. The exponential prefactor and
//! the `erfc` bracket are never multiplied naively: for `y >= 0` the product
//! collapses to `exp(-u^2) erfcx(y)` (no overflow, no cancellation), for
//! `y < 0` the prefactor exponent `a = beta^2 sigma^2 t/2 - beta x` is formed
//! explicitly and the pair is combined in log space once `a` is large.

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::real::Real;

/// Largest exponent fed to `exp` before switching to the log-space path.
const EXP_CAP: f64 = 700.0;

/// Evaluator for the exact value function `U`, its derivatives and the
/// optimal strategy `v*`. Pure functions of immutable state; callable
/// concurrently without restriction.
#[derive(Debug, Clone, Copy)]
pub struct ClosedForm<T: Real> {
    params: ModelParams<T>,
}

/// Stable decomposition of the second term of `psi`.
struct Tail<T> {
    /// `erf` argument `u = x / (sigma sqrt(2 t))`.
    u: T,
    /// `exp(-beta x + beta^2 sigma^2 t/2) * erfc(y)`; `+inf` if unrepresentable.
    value: T,
    /// Logarithm of the same quantity, always finite.
    log_value: T,
}

impl<T: Real> ClosedForm<T> {
    pub fn new(params: ModelParams<T>) -> Result<Self> {
        Ok(ClosedForm {
            params: params.validate()?,
        })
    }

    pub fn params(&self) -> &ModelParams<T> {
        &self.params
    }

    fn check_time_positive(&self, t: T) -> Result<()> {
        if !(t > T::zero()) {
            return Err(Error::Domain(format!("time must be > 0, got {t}")));
        }
        Ok(())
    }

    fn check_distance(&self, x: T) -> Result<()> {
        if !(x >= T::zero()) {
            return Err(Error::Domain(format!(
                "distance from barrier must be >= 0, got {x}"
            )));
        }
        Ok(())
    }

    fn tail(&self, t: T, x: T) -> Tail<T> {
        let sigma = self.params.sigma();
        let beta = self.params.beta();
        let u = x / (sigma * (T::of(2.0) * t).sqrt());
        let b = beta * sigma * t.sqrt() / T::SQRT_2();
        let y = u - b;
        if y >= T::zero() {
            // exp(a) erfc(y) = exp(-u^2) erfcx(y) exactly, and a <= 0 here
            let scaled = y.erfcx();
            Tail {
                u,
                value: (-u * u).exp() * scaled,
                log_value: -u * u + scaled.ln(),
            }
        } else {
            let a = b * b - (u + u) * b; // beta^2 sigma^2 t/2 - beta x
            let bracket = y.erfc(); // in (1, 2)
            let log_value = a + bracket.ln();
            let value = if a < T::of(EXP_CAP) {
                a.exp() * bracket
            } else {
                T::infinity()
            };
            Tail {
                u,
                value,
                log_value,
            }
        }
    }

    /// `psi(t, x)` for `t > 0`, `x >= 0`; always `>= 1`.
    pub fn psi(&self, t: T, x: T) -> Result<T> {
        self.check_time_positive(t)?;
        self.check_distance(x)?;
        let tail = self.tail(t, x);
        if tail.value.is_finite() {
            Ok(T::one() + (tail.value - tail.u.erfc()))
        } else {
            Ok(self.log_psi_from(&tail).exp())
        }
    }

    /// `log psi` assembled without forming `psi` (used once `psi` overflows).
    fn log_psi_from(&self, tail: &Tail<T>) -> T {
        tail.log_value + (tail.u.erf() * (-tail.log_value).exp()).ln_1p()
    }

    /// Value function `U(t, z) = log(psi(t, z - c)) / beta` on
    /// `[0, horizon] x [c, inf)`; `U(0, z) = 0` exactly.
    pub fn value_u(&self, t: T, z: T) -> Result<T> {
        if !(t >= T::zero()) || !(t <= self.params.horizon()) {
            return Err(Error::Domain(format!(
                "time {t} outside [0, {}]",
                self.params.horizon()
            )));
        }
        self.check_distance(z - self.params.barrier())?;
        if t == T::zero() {
            return Ok(T::zero());
        }
        let tail = self.tail(t, z - self.params.barrier());
        let beta = self.params.beta();
        if tail.value.is_finite() {
            // psi - 1 = tail - erfc(u), exact to machine precision in the far field
            Ok((tail.value - tail.u.erfc()).ln_1p() / beta)
        } else {
            Ok(self.log_psi_from(&tail) / beta)
        }
    }

    /// `dU/dz(t, z) = d_x psi / (beta psi)`, in `[-1, 0)`; equals `-1`
    /// exactly at `z = c` because the numerator and denominator share the
    /// same tail factor and `erf(0) = 0`.
    pub fn du_dz(&self, t: T, z: T) -> Result<T> {
        if !(t > T::zero()) || !(t <= self.params.horizon()) {
            return Err(Error::Domain(format!(
                "time {t} outside (0, {}]",
                self.params.horizon()
            )));
        }
        self.check_distance(z - self.params.barrier())?;
        let tail = self.tail(t, z - self.params.barrier());
        if tail.value.is_finite() {
            Ok(-tail.value / (tail.u.erf() + tail.value))
        } else {
            let r = tail.u.erf() * (-tail.log_value).exp();
            Ok(-(T::one() / (T::one() + r)))
        }
    }

    /// Optimal feedback speed `v*(t, z) = (gamma / 2 kappa) dU/dz(horizon - t, z)`
    /// for `0 <= t < horizon`; the formula does not extend to `t = horizon`.
    pub fn v_star(&self, t: T, z: T) -> Result<T> {
        if !(t >= T::zero()) || !(t < self.params.horizon()) {
            return Err(Error::Domain(format!(
                "strategy time {t} outside [0, {})",
                self.params.horizon()
            )));
        }
        let half_impact = self.params.gamma() / (T::of(2.0) * self.params.kappa());
        Ok(half_impact * self.du_dz(self.params.horizon() - t, z)?)
    }

    /// `d_x psi(t, x) = -beta exp(-beta x + beta^2 sigma^2 t/2) erfc(y)`.
    pub fn dpsi_dx(&self, t: T, x: T) -> Result<T> {
        self.check_time_positive(t)?;
        self.check_distance(x)?;
        Ok(-self.params.beta() * self.tail(t, x).value)
    }

    /// `d_t psi(t, x) = beta sigma exp(-u^2) / sqrt(2 pi t)
    ///  + (beta^2 sigma^2 / 2) exp(-beta x + beta^2 sigma^2 t/2) erfc(y)`,
    /// strictly positive. (Forced by the heat identity
    /// `d_xx psi = (2 / sigma^2) d_t psi` together with `d_x psi`.)
    pub fn dpsi_dt(&self, t: T, x: T) -> Result<T> {
        self.check_time_positive(t)?;
        self.check_distance(x)?;
        let sigma = self.params.sigma();
        let beta = self.params.beta();
        let tail = self.tail(t, x);
        let gauss = beta * sigma * (-tail.u * tail.u).exp() / (T::of(2.0) * T::PI() * t).sqrt();
        Ok(gauss + beta * beta * sigma * sigma / T::of(2.0) * tail.value)
    }
}
