//! Market model parameters and the feedback-strategy contract shared by the
//! simulator, the regularized machinery and the PDE solvers.

use crate::closed_form::ClosedForm;
use crate::error::{Error, Result};
use crate::real::Real;
use crate::regularized::RegularizedValue;
use crate::sim::SimConfig;
use crate::surface::Surface;

/// Constants of the impacted exchange-rate model.
///
/// `sigma` is the unaffected-rate volatility, `gamma` the permanent impact
/// per unit of inventory, `kappa` the quadratic slippage coefficient, `c` the
/// barrier defended from below, `s0` the initial rate and `horizon` the
/// trading horizon. All invariants are enforced at construction; values are
/// immutable afterwards, so sharing across workers needs no synchronization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T: Real> {
    sigma: T,
    gamma: T,
    kappa: T,
    c: T,
    s0: T,
    horizon: T,
}

impl<T: Real> ModelParams<T> {
    /// Builds and validates a parameter set.
    pub fn new(sigma: T, gamma: T, kappa: T, c: T, s0: T, horizon: T) -> Result<Self> {
        ModelParams {
            sigma,
            gamma,
            kappa,
            c,
            s0,
            horizon,
        }
        .validate()
    }

    /// Returns the parameters unchanged if every invariant holds, otherwise
    /// the first violated constraint.
    pub fn validate(self) -> Result<Self> {
        fn positive<T: Real>(name: &str, v: T) -> Result<()> {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be > 0, got {v}"
                )));
            }
            Ok(())
        }
        positive("sigma", self.sigma)?;
        positive("gamma", self.gamma)?;
        positive("kappa", self.kappa)?;
        positive("horizon", self.horizon)?;
        if !self.c.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "c must be finite, got {}",
                self.c
            )));
        }
        if !(self.s0 >= self.c) || !self.s0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "s0 must be >= c, got s0 = {} with c = {}",
                self.s0, self.c
            )));
        }
        let beta = self.beta();
        if !beta.is_finite() || !(beta > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "beta = gamma^2/(2 kappa sigma^2) must be finite and > 0, got {beta}"
            )));
        }
        Ok(self)
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }

    /// Barrier level defended by the central bank.
    pub fn barrier(&self) -> T {
        self.c
    }

    pub fn s0(&self) -> T {
        self.s0
    }

    pub fn horizon(&self) -> T {
        self.horizon
    }

    /// `beta = gamma^2 / (2 kappa sigma^2)`, derived on demand so it can
    /// never drift out of sync with the stored constants.
    pub fn beta(&self) -> T {
        self.gamma * self.gamma / (T::of(2.0) * self.kappa * self.sigma * self.sigma)
    }

    /// Replaces the initial rate (used by sweeps over starting points).
    pub fn with_s0(self, s0: T) -> Result<Self> {
        ModelParams { s0, ..self }.validate()
    }
}

/// Feedback trading-speed rule `v(t, z)` on `[0, horizon] x [c, inf)`.
///
/// Every variant is locally Lipschitz in `z` on compacts and of linear
/// growth `|v(t,z)| <= C (1 + |z|)`; the constant is reported by
/// [`Strategy::growth_bound`]. Evaluation is deterministic, and a strategy is
/// immutable once built, so it can be shared freely across workers.
#[derive(Debug, Clone)]
pub enum Strategy<T: Real> {
    /// No trading; zero slippage. `C = 0`.
    Zero,
    /// Constant trading speed `a`. `C = |a|`.
    Constant(T),
    /// The exact optimizer `(gamma/2kappa) dU/dz(horizon - t, z)`; bounded by
    /// `C = gamma/(2 kappa)` and undefined at `t = horizon`.
    ClosedFormOptimal,
    /// The kernel-smoothed optimizer, evaluated by inner Monte Carlo with the
    /// given configuration. Expensive per call; bounded by `C = gamma/(2 kappa)`
    /// up to estimator noise.
    RegularizedOptimal { eps: T, mc: SimConfig },
    /// Speeds tabulated on a rectangular grid, evaluated by bilinear
    /// interpolation with arguments clamped to the grid hull, hence globally
    /// bounded by `C = max |values|`.
    Tabulated(Surface<T>),
    /// `factor * inner(t, z)`; used to probe suboptimality of mistuned rules.
    Scaled { factor: T, inner: Box<Strategy<T>> },
}

impl<T: Real> Strategy<T> {
    /// Trading speed at `(t, z)`.
    ///
    /// Errors if `(t, z)` lies outside `[0, horizon] x [c, inf)`; the domain
    /// is enforced by hard error rather than clamping so that simulator bugs
    /// cannot hide behind silent extrapolation.
    pub fn eval(&self, params: &ModelParams<T>, t: T, z: T) -> Result<T> {
        if !(t >= T::zero()) || !(t <= params.horizon()) {
            return Err(Error::Domain(format!(
                "strategy time {t} outside [0, {}]",
                params.horizon()
            )));
        }
        if !(z >= params.barrier()) {
            return Err(Error::Domain(format!(
                "strategy state {z} below barrier {}",
                params.barrier()
            )));
        }
        match self {
            Strategy::Zero => Ok(T::zero()),
            Strategy::Constant(a) => Ok(*a),
            Strategy::ClosedFormOptimal => ClosedForm::new(*params)?.v_star(t, z),
            Strategy::RegularizedOptimal { eps, mc } => {
                Ok(RegularizedValue::new(*params, *eps, mc.clone())?
                    .v_star_eps(t, z)?
                    .mean)
            }
            Strategy::Tabulated(surface) => Ok(surface.bilinear_clamped(t, z)),
            Strategy::Scaled { factor, inner } => Ok(*factor * inner.eval(params, t, z)?),
        }
    }

    /// Linear-growth constant `C` with `|v(t,z)| <= C (1 + |z|)`.
    pub fn growth_bound(&self, params: &ModelParams<T>) -> T {
        let half_impact = params.gamma() / (T::of(2.0) * params.kappa());
        match self {
            Strategy::Zero => T::zero(),
            Strategy::Constant(a) => a.abs(),
            Strategy::ClosedFormOptimal => half_impact,
            Strategy::RegularizedOptimal { .. } => half_impact,
            Strategy::Tabulated(surface) => surface.max_abs(),
            Strategy::Scaled { factor, inner } => factor.abs() * inner.growth_bound(params),
        }
    }

    /// Short human-readable label for tables and reports.
    pub fn label(&self) -> String {
        match self {
            Strategy::Zero => "zero".to_string(),
            Strategy::Constant(a) => format!("constant({a})"),
            Strategy::ClosedFormOptimal => "closed-form".to_string(),
            Strategy::RegularizedOptimal { eps, .. } => format!("regularized(eps={eps})"),
            Strategy::Tabulated(_) => "tabulated".to_string(),
            Strategy::Scaled { factor, inner } => format!("{} x {}", factor, inner.label()),
        }
    }
}

/// Evaluates `v(t, z)` for a strategy; see [`Strategy::eval`].
pub fn eval_strategy<T: Real>(
    strategy: &Strategy<T>,
    params: &ModelParams<T>,
    t: T,
    z: T,
) -> Result<T> {
    strategy.eval(params, t, z)
}
