//! Kernel-regularized value function: Gaussian mollifier, Feynman-Kac Monte
//! Carlo representations of `U_eps` and its `z`-derivative, the smoothed
//! optimal speed, the occupation-time identity and the `eps -> 0`
//! convergence diagnostics.
//!
//! The representation runs a free Brownian motion on all of the real line:
//!
//! ```text
//! U_eps(t, z) = log E[ exp(beta Int_0^t G_eps(z + sigma W_r) dr) ] / beta
//! ```
//!
//! with the time integral evaluated by the trapezoidal rule along the
//! discretized path. The step size is tied to the kernel width by a hard
//! guard `dt <= eps / (4 sigma^2)`; an under-resolved kernel would bias the
//! quadrature silently, so the engine refuses to run instead.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::closed_form::ClosedForm;
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::real::Real;
use crate::rng;
use crate::sim::SimConfig;
use crate::stats::{compensated_sum, McEstimate};

/// Overflow cap for `beta * Int G_eps dr`.
const EXP_CAP: f64 = 700.0;

/// Gaussian kernel of variance `eps` centered at `center`.
pub fn gaussian_kernel<T: Real>(eps: T, center: T, x: T) -> T {
    let d = x - center;
    (-(d * d) / (T::of(2.0) * eps)).exp() / (T::of(2.0) * T::PI() * eps).sqrt()
}

/// Derivative of [`gaussian_kernel`] in `x`: `-(x - center)/eps * G_eps(x)`.
pub fn gaussian_kernel_dx<T: Real>(eps: T, center: T, x: T) -> T {
    -(x - center) / eps * gaussian_kernel(eps, center, x)
}

/// Evaluator of the regularized problem at a fixed kernel width `eps`,
/// backed by the Monte Carlo configuration `mc` for the inner Brownian
/// expectation. Same parallel contract as the simulator: path-index-keyed
/// draws, partition-independent reductions.
#[derive(Debug, Clone)]
pub struct RegularizedValue<T: Real> {
    params: ModelParams<T>,
    eps: T,
    mc: SimConfig,
}

impl<T: Real> RegularizedValue<T> {
    pub fn new(params: ModelParams<T>, eps: T, mc: SimConfig) -> Result<Self> {
        if !(eps > T::zero()) || !eps.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "eps must be > 0, got {eps}"
            )));
        }
        Ok(RegularizedValue {
            params: params.validate()?,
            eps,
            mc: mc.validate()?,
        })
    }

    pub fn params(&self) -> &ModelParams<T> {
        &self.params
    }

    pub fn eps(&self) -> T {
        self.eps
    }

    pub fn mc(&self) -> &SimConfig {
        &self.mc
    }

    /// Kernel value `G_eps(x)` around the model barrier.
    pub fn g_eps(&self, x: T) -> T {
        gaussian_kernel(self.eps, self.params.barrier(), x)
    }

    /// Kernel derivative `G_eps'(x)`.
    pub fn g_eps_prime(&self, x: T) -> T {
        gaussian_kernel_dx(self.eps, self.params.barrier(), x)
    }

    /// Enforces `dt <= eps / (4 sigma^2)` and returns the step size.
    fn resolved_dt(&self, t: T) -> Result<T> {
        let dt = t / T::of(self.mc.n_steps as f64);
        let sigma = self.params.sigma();
        let cap = self.eps / (T::of(4.0) * sigma * sigma);
        if dt > cap {
            return Err(Error::InvalidParameter(format!(
                "kernel under-resolved: dt = {dt} exceeds eps/(4 sigma^2) = {cap}; raise n_steps"
            )));
        }
        Ok(dt)
    }

    /// Trapezoidal path integrals of the kernel and its derivative along
    /// `z + sigma W` for one path.
    fn kernel_integrals(&self, t: T, z: T, path_index: u64) -> (T, T) {
        let n = self.mc.n_steps;
        let dt = t / T::of(n as f64);
        let sqrt_dt = dt.sqrt();
        let sigma = self.params.sigma();
        let key = rng::path_key(self.mc.seed, path_index);
        let half = T::of(0.5);
        let mut w = T::zero();
        let mut g_acc = half * self.g_eps(z);
        let mut dg_acc = half * self.g_eps_prime(z);
        for step in 0..n {
            w = w + sqrt_dt * T::of(rng::standard_normal(key, step as u64));
            let x = z + sigma * w;
            let weight = if step + 1 == n { half } else { T::one() };
            g_acc = g_acc + weight * self.g_eps(x);
            dg_acc = dg_acc + weight * self.g_eps_prime(x);
        }
        (g_acc * dt, dg_acc * dt)
    }

    /// Feynman-Kac Monte Carlo estimate of `U_eps(t, z)`, with the standard
    /// error pushed through the logarithm by the delta method.
    pub fn u_eps_mc(&self, t: T, z: T) -> Result<McEstimate<T>> {
        self.check_time(t)?;
        if t == T::zero() {
            return Ok(McEstimate {
                mean: T::zero(),
                std_error: T::zero(),
                n_paths: self.mc.n_paths,
            });
        }
        self.resolved_dt(t)?;
        let beta = self.params.beta();
        let weights: Vec<T> = (0..self.mc.n_paths as u64)
            .into_par_iter()
            .map(|i| {
                let (g, _) = self.kernel_integrals(t, z, i);
                bounded_exp(beta * g)
            })
            .collect::<Result<Vec<T>>>()?;
        let est = McEstimate::from_samples(&weights);
        Ok(McEstimate {
            mean: est.mean.ln() / beta,
            std_error: est.std_error / (beta * est.mean),
            n_paths: est.n_paths,
        })
    }

    /// Ratio estimator of `dU_eps/dz(t, z)`; numerator and denominator share
    /// paths, which collapses the variance of the ratio.
    pub fn du_eps_dz_mc(&self, t: T, z: T) -> Result<McEstimate<T>> {
        if !(t > T::zero()) {
            return Err(Error::Domain(format!("time must be > 0, got {t}")));
        }
        self.check_time(t)?;
        self.resolved_dt(t)?;
        let beta = self.params.beta();
        let pairs: Vec<(T, T)> = (0..self.mc.n_paths as u64)
            .into_par_iter()
            .map(|i| {
                let (g, dg) = self.kernel_integrals(t, z, i);
                let w = bounded_exp(beta * g)?;
                Ok((dg * w, w))
            })
            .collect::<Result<Vec<(T, T)>>>()?;
        let num: Vec<T> = pairs.iter().map(|p| p.0).collect();
        let den: Vec<T> = pairs.iter().map(|p| p.1).collect();
        let n = pairs.len();
        let nf = T::of(n as f64);
        let num_mean = compensated_sum(&num) / nf;
        let den_mean = compensated_sum(&den) / nf;
        let ratio = num_mean / den_mean;
        // delta method for A/B: Var ~ E[(a - R b)^2] / (n B^2)
        let dev: Vec<T> = pairs
            .iter()
            .map(|&(a, b)| {
                let d = a - ratio * b;
                d * d
            })
            .collect();
        let var = if n > 1 {
            compensated_sum(&dev) / T::of((n - 1) as f64)
        } else {
            T::zero()
        };
        Ok(McEstimate {
            mean: ratio,
            std_error: (var / nf).sqrt() / den_mean,
            n_paths: n,
        })
    }

    /// Smoothed optimal speed `v*_eps(t, z) = (gamma/2kappa) dU_eps/dz(T - t, z)`.
    ///
    /// This is the Monte Carlo route; precomputed PDE surfaces can be wrapped
    /// in a tabulated strategy instead when many evaluations are needed.
    pub fn v_star_eps(&self, t: T, z: T) -> Result<McEstimate<T>> {
        if !(t >= T::zero()) || !(t < self.params.horizon()) {
            return Err(Error::Domain(format!(
                "strategy time {t} outside [0, {})",
                self.params.horizon()
            )));
        }
        let d = self.du_eps_dz_mc(self.params.horizon() - t, z)?;
        let scale = self.params.gamma() / (T::of(2.0) * self.params.kappa());
        Ok(McEstimate {
            mean: scale * d.mean,
            std_error: scale.abs() * d.std_error,
            n_paths: d.n_paths,
        })
    }

    /// Per-path comparison of the time-stepped kernel integral against the
    /// space-integrated form over the band occupation histogram; returns the
    /// maximum relative deviation across `path_count` paths.
    pub fn occupation_identity_check(&self, t: T, z: T, path_count: usize) -> Result<T> {
        if !(t > T::zero()) {
            return Err(Error::Domain(format!("time must be > 0, got {t}")));
        }
        self.resolved_dt(t)?;
        let deviations: Vec<T> = (0..path_count as u64)
            .into_par_iter()
            .map(|i| {
                let key = rng::path_key(self.mc.seed, i);
                Ok(self.occupation_pair_deviation(t, z, |step| rng::standard_normal(key, step)))
            })
            .collect::<Result<Vec<T>>>()?;
        Ok(deviations.iter().fold(T::zero(), |m, d| m.max(*d)))
    }

    /// Relative gap between the two sides of the occupation-time identity on
    /// one path driven by `noise(step)` increments.
    fn occupation_pair_deviation(&self, t: T, z: T, noise: impl Fn(u64) -> f64) -> T {
        let (lhs, rhs) = self.occupation_pair(t, z, noise);
        let denom = lhs.abs().max(rhs.abs());
        if denom <= T::of(1e-300) {
            T::zero()
        } else {
            (lhs - rhs).abs() / denom
        }
    }

    fn occupation_pair(&self, t: T, z: T, noise: impl Fn(u64) -> f64) -> (T, T) {
        let n = self.mc.n_steps;
        let dt = t / T::of(n as f64);
        let sqrt_dt = dt.sqrt();
        let sigma = self.params.sigma();
        let band = T::of(self.mc.band_eps);
        let half = T::of(0.5);
        // histogram over sigma W values, bins of width band centered at k*band
        let mut occupancy: HashMap<i64, T> = HashMap::new();
        let mut bump = |value: T, weight: T| {
            let idx = (value / band).to_f64_lossy().round() as i64;
            let slot = occupancy.entry(idx).or_insert_with(T::zero);
            *slot = *slot + weight * dt;
        };
        let mut w = T::zero();
        let mut g_acc = half * self.g_eps(z);
        bump(T::zero(), half);
        for step in 0..n {
            w = w + sqrt_dt * T::of(noise(step as u64));
            let weight = if step + 1 == n { half } else { T::one() };
            g_acc = g_acc + weight * self.g_eps(z + sigma * w);
            bump(sigma * w, weight);
        }
        let lhs = g_acc * dt;
        let mut terms: Vec<T> = occupancy
            .into_iter()
            .map(|(idx, time)| self.g_eps(z + band * T::of(idx as f64)) * time)
            .collect();
        // fixed order for a deterministic sum
        terms.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let rhs = compensated_sum(&terms);
        (lhs, rhs)
    }

    fn check_time(&self, t: T) -> Result<()> {
        if !(t >= T::zero()) || !(t <= self.params.horizon()) {
            return Err(Error::Domain(format!(
                "time {t} outside [0, {}]",
                self.params.horizon()
            )));
        }
        Ok(())
    }
}

fn bounded_exp<T: Real>(exponent: T) -> Result<T> {
    if exponent > T::of(EXP_CAP) {
        return Err(Error::Numerical(format!(
            "Feynman-Kac exponent {exponent} exceeds the overflow cap {EXP_CAP}; \
             the kernel integral spiked (eps too small for this step size)"
        )));
    }
    Ok(exponent.exp())
}

/// One `(eps, z)` comparison of the smoothed and exact value functions.
#[derive(Debug, Clone, Copy)]
pub struct ConvergencePoint<T: Real> {
    pub eps: T,
    pub z: T,
    pub u_eps: T,
    pub std_error: T,
    pub u_exact: T,
    pub abs_error: T,
}

/// Per-eps summary of the convergence study.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceRow<T: Real> {
    pub eps: T,
    /// `sup_z |U_eps - U|` over the requested grid.
    pub sup_error: T,
    /// RMS over paths of `|Int G_eps dr - band local time|` at `z = c`.
    pub inner_rms: T,
}

/// Result of [`convergence_study`].
#[derive(Debug, Clone)]
pub struct ConvergenceTable<T: Real> {
    pub points: Vec<ConvergencePoint<T>>,
    pub rows: Vec<ConvergenceRow<T>>,
}

impl<T: Real> ConvergenceTable<T> {
    /// True when the sup-error column strictly decreases along the eps list.
    pub fn sup_errors_strictly_decreasing(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].sup_error < w[0].sup_error)
    }

    /// Log-log slopes of the inner RMS between consecutive eps values;
    /// positive means decay, the theoretical rate for p = 2 is 1/4.
    pub fn rate_slopes(&self) -> Vec<T> {
        self.rows
            .windows(2)
            .map(|w| (w[0].inner_rms / w[1].inner_rms).ln() / (w[0].eps / w[1].eps).ln())
            .collect()
    }
}

/// Tabulates `sup_z |U_eps - U|` and the inner-quantity RMS along a
/// decreasing eps list. All eps values share paths (same seed and step
/// count), so the comparison between rows is driven by eps alone.
pub fn convergence_study<T: Real>(
    params: &ModelParams<T>,
    eps_list: &[T],
    t: T,
    z_grid: &[T],
    mc: &SimConfig,
) -> Result<ConvergenceTable<T>> {
    if eps_list.is_empty() {
        return Err(Error::InvalidParameter("eps list must not be empty".into()));
    }
    if !eps_list.windows(2).all(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter(
            "eps list must be strictly decreasing".into(),
        ));
    }
    let closed = ClosedForm::new(*params)?;
    let mut points = Vec::new();
    let mut rows = Vec::new();
    for &eps in eps_list {
        let rv = RegularizedValue::new(*params, eps, mc.clone())?;
        let mut sup_error = T::zero();
        for &z in z_grid {
            let est = rv.u_eps_mc(t, z)?;
            let exact = closed.value_u(t, z)?;
            let abs_error = (est.mean - exact).abs();
            sup_error = sup_error.max(abs_error);
            points.push(ConvergencePoint {
                eps,
                z,
                u_eps: est.mean,
                std_error: est.std_error,
                u_exact: exact,
                abs_error,
            });
        }
        rows.push(ConvergenceRow {
            eps,
            sup_error,
            inner_rms: inner_rms_at_barrier(&rv, t)?,
        });
    }
    Ok(ConvergenceTable { points, rows })
}

/// RMS over paths of the gap between the kernel integral and the band
/// local-time estimate of `sigma W` at level zero (`z = c`).
fn inner_rms_at_barrier<T: Real>(rv: &RegularizedValue<T>, t: T) -> Result<T> {
    let dt = rv.resolved_dt(t)?;
    let sqrt_dt = dt.sqrt();
    let n = rv.mc.n_steps;
    let sigma = rv.params.sigma();
    let band = T::of(rv.mc.band_eps);
    let z = rv.params.barrier();
    let half = T::of(0.5);
    let sq: Vec<T> = (0..rv.mc.n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let key = rng::path_key(rv.mc.seed, i);
            let mut w = T::zero();
            let mut g_acc = half * rv.g_eps(z);
            let mut occupation = T::zero();
            for step in 0..n {
                w = w + sqrt_dt * T::of(rng::standard_normal(key, step as u64));
                let weight = if step + 1 == n { half } else { T::one() };
                let x = sigma * w;
                g_acc = g_acc + weight * rv.g_eps(z + x);
                if x >= T::zero() && x < band {
                    occupation = occupation + dt;
                }
            }
            let local_time = sigma * sigma / band * occupation;
            let d = g_acc * dt - local_time;
            d * d
        })
        .collect();
    Ok((compensated_sum(&sq) / T::of(sq.len() as f64)).sqrt())
}
