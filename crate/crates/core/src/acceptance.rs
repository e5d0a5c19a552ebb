//! Cross-validation acceptance suite.
//!
//! Eleven criteria check the analytic identities of the closed forms and the
//! pairwise agreement of the independent routes (closed form, reflected
//! Monte Carlo, Feynman-Kac sampling, finite differences). Every tolerance
//! is pinned in [`Tolerances`]; nothing is calibrated at run time. The
//! criteria are independent of each other: each builds its own inputs, and a
//! failure in one cannot disturb another.
//!
//! The suite runs in two profiles: the full profile (the gate, used by the
//! `acceptance` test target) and a quick profile with reduced path counts
//! and correspondingly widened Monte Carlo slacks for a sub-minute smoke
//! run; the scaling of each widened bound is documented on the field.

use std::time::Instant;

use crate::closed_form::ClosedForm;
use crate::error::Result;
use crate::model::{ModelParams, Strategy};
use crate::pde::{solve_hjb_eps, solve_hopf_cole, solve_singular};
use crate::regularized::{convergence_study, RegularizedValue};
use crate::sim::{
    brownian_local_time_mc, coupled_refinement_gap, mc_objective, simulate_paths,
    value_from_exp_moment, InventoryConvention, LocalTimeEstimator, SimConfig,
};
use crate::stats::McEstimate;
use crate::surface::{Grid1D, Surface};

/// Every threshold used by the suite, in criterion order.
#[derive(Debug, Clone)]
pub struct Tolerances {
    /// C1: `|dU/dz(t, c) + 1|` for all probed times and parameter sets.
    pub boundary_identity: f64,
    /// C2: max finite-difference residual of the singular equation on the
    /// closed form.
    pub singular_fd_residual: f64,
    /// C3: `|d_xx psi - (2/sigma^2) d_t psi|` with `d_xx` differenced once.
    pub psi_heat_identity: f64,
    /// C4: gap between `value_u(1, c)` and the quadrature-based dual formula.
    pub barrier_dual_identity: f64,
    /// C5: absolute slack on top of 3 standard errors, covering the
    /// `O(sqrt(dt))` local-time discretization bias at 2000 steps.
    pub theorem1_abs_slack: f64,
    /// C6: suboptimality margin in units of the combined standard error.
    pub ordering_se_multiple: f64,
    /// C7: sup distance between the direct solve and the transformed
    /// linearized solve.
    pub hopf_cole_equivalence: f64,
    /// C8: absolute slack on top of 3 standard errors at the probe points.
    pub pde_vs_mc_abs: f64,
    /// C9: minimum log-log decay slope of the inner-quantity RMS (theory: 1/4).
    pub rate_slope_min: f64,
    /// C10: sup distance of the singular solve from the closed form.
    pub singular_pde_sup: f64,
    /// C10: error ratio after one `(dz/2, dt/4)` refinement; halving plus a
    /// 10% asymptotic allowance.
    pub singular_refinement_ratio: f64,
    /// C11: accepted band/pushing mean-ratio bracket around the factor two.
    pub band_ratio_low: f64,
    pub band_ratio_high: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            boundary_identity: 1e-10,
            singular_fd_residual: 1e-4,
            psi_heat_identity: 1e-6,
            barrier_dual_identity: 1e-10,
            theorem1_abs_slack: 0.02,
            ordering_se_multiple: 2.0,
            hopf_cole_equivalence: 1e-3,
            pde_vs_mc_abs: 2e-2,
            rate_slope_min: 0.2,
            singular_pde_sup: 5e-3,
            singular_refinement_ratio: 0.55,
            band_ratio_low: 1.8,
            band_ratio_high: 2.2,
        }
    }
}

impl Tolerances {
    /// Widened Monte Carlo slacks for the quick profile. Deterministic
    /// checks keep their full-profile thresholds.
    pub fn quick() -> Self {
        Tolerances {
            // 500 steps instead of 2000 doubles the sqrt(dt) bias, and 20x
            // fewer paths multiply the 3 se term by ~4.5
            theorem1_abs_slack: 0.06,
            // 8x fewer steps roughly triples the boundary-atom inflation
            band_ratio_low: 1.6,
            band_ratio_high: 2.6,
            ..Tolerances::default()
        }
    }
}

/// Profile and seeding of a suite run.
#[derive(Debug, Clone)]
pub struct AcceptanceConfig {
    pub quick: bool,
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl Default for AcceptanceConfig {
    fn default() -> Self {
        AcceptanceConfig {
            quick: false,
            seed: 42,
            tolerances: Tolerances::default(),
        }
    }
}

impl AcceptanceConfig {
    pub fn quick(seed: u64) -> Self {
        AcceptanceConfig {
            quick: true,
            seed,
            tolerances: Tolerances::quick(),
        }
    }
}

/// Outcome of one criterion.
#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub runtime_ms: u128,
}

impl CriterionReport {
    /// The one-line `PASS`/`FAIL` form used by reports.
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} [{}] {} ({} ms): {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.runtime_ms,
            self.detail
        )
    }
}

pub const CRITERION_NAMES: [(u32, &str); 11] = [
    (1, "boundary identity dU/dz(t,c) = -1"),
    (2, "singular PDE residual of the closed form"),
    (3, "heat-equation identity for psi"),
    (4, "barrier value, dual representation"),
    (5, "optimal-strategy payoff matches the value function"),
    (6, "suboptimality ordering"),
    (7, "Hopf-Cole equivalence"),
    (8, "PDE vs Feynman-Kac Monte Carlo"),
    (9, "eps -> 0 convergence and inner rate"),
    (10, "singular PDE solve accuracy"),
    (11, "reflected-simulator sanity"),
];

/// Runs every criterion in order; failures are collected, never raised.
pub fn run_all(config: &AcceptanceConfig) -> Vec<CriterionReport> {
    (1..=11).map(|id| run_criterion(id, config)).collect()
}

/// Runs a single criterion by id (1 to 11).
pub fn run_criterion(id: u32, config: &AcceptanceConfig) -> CriterionReport {
    let name = CRITERION_NAMES
        .iter()
        .find(|(i, _)| *i == id)
        .map(|(_, n)| *n)
        .unwrap_or("unknown criterion");
    let start = Instant::now();
    let outcome = match id {
        1 => c01_boundary_identity(config),
        2 => c02_singular_fd_residual(config),
        3 => c03_psi_heat_identity(config),
        4 => c04_barrier_dual_value(config),
        5 => c05_theorem1_verification(config),
        6 => c06_suboptimality_ordering(config),
        7 => c07_hopf_cole_equivalence(config),
        8 => c08_pde_vs_feynman_kac(config),
        9 => c09_eps_convergence(config),
        10 => c10_singular_pde_accuracy(config),
        11 => c11_reflected_simulator_sanity(config),
        _ => Err(crate::error::Error::InvalidParameter(format!(
            "no criterion with id {id}"
        ))),
    };
    let (passed, detail) = match outcome {
        Ok(pair) => pair,
        Err(e) => (false, format!("aborted: {e}")),
    };
    CriterionReport {
        id,
        name,
        passed,
        detail,
        runtime_ms: start.elapsed().as_millis(),
    }
}

fn unit_params(s0: f64) -> Result<ModelParams<f64>> {
    ModelParams::new(1.0, 1.0, 1.0, 0.0, s0, 1.0)
}

/// Standard normal CDF by composite Simpson quadrature of the density.
/// Deliberately independent of the `erf` kernels the closed forms use; this
/// is the reference side of the dual-representation check.
fn normal_cdf_quadrature(x: f64) -> f64 {
    let n = 2000; // even
    let a = 0.0;
    let b = x.abs();
    if b == 0.0 {
        return 0.5;
    }
    let h = (b - a) / n as f64;
    let density = |u: f64| (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut s = density(a) + density(b);
    for i in 1..n {
        s += density(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    let half_integral = s * h / 3.0;
    if x >= 0.0 {
        0.5 + half_integral
    } else {
        0.5 - half_integral
    }
}

fn c01_boundary_identity(config: &AcceptanceConfig) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for &(sigma, gamma, kappa) in &[(1.0, 1.0, 1.0), (2.0, 1.0, 0.5), (1.0, 3.0, 2.0)] {
        let cf: ClosedForm<f64> =
            ClosedForm::new(ModelParams::new(sigma, gamma, kappa, 0.0, 0.5, 1.0)?)?;
        for &t in &[0.1, 0.5, 1.0] {
            worst = worst.max((cf.du_dz(t, 0.0)? + 1.0).abs());
        }
    }
    let tol = config.tolerances.boundary_identity;
    Ok((
        worst <= tol,
        format!("max |dU/dz(t,c) + 1| = {worst:.3e} (tol {tol:.1e})"),
    ))
}

fn c02_singular_fd_residual(config: &AcceptanceConfig) -> Result<(bool, String)> {
    // horizon 2 so the centered time stencil can reach past t = 1
    let params = ModelParams::new(1.0, 1.0, 1.0, 0.0, 0.5, 2.0)?;
    let cf = ClosedForm::new(params)?;
    let h = 1e-4;
    let mut worst = 0.0f64;
    for i in 0..200 {
        let t = 0.05 + 0.95 * (i + 1) as f64 / 200.0;
        for j in 0..200 {
            let z = 6.0 * (j + 1) as f64 / 200.0;
            let u_t = (cf.value_u(t + h, z)? - cf.value_u(t - h, z)?) / (2.0 * h);
            let up = cf.value_u(t, z + h)?;
            let um = cf.value_u(t, z - h)?;
            let u0 = cf.value_u(t, z)?;
            let u_z = (up - um) / (2.0 * h);
            let u_zz = (up - 2.0 * u0 + um) / (h * h);
            let res = (u_t - 0.5 * u_zz - 0.25 * u_z * u_z).abs();
            worst = worst.max(res);
        }
    }
    let tol = config.tolerances.singular_fd_residual;
    Ok((
        worst <= tol,
        format!("max FD residual on 200x200 grid = {worst:.3e} (tol {tol:.1e})"),
    ))
}

fn c03_psi_heat_identity(config: &AcceptanceConfig) -> Result<(bool, String)> {
    let cf = ClosedForm::new(unit_params(0.5)?)?;
    let h = 1e-5;
    let mut worst = 0.0f64;
    for i in 0..25 {
        let t = 0.04 * (i + 1) as f64;
        for j in 0..40 {
            let x = (3.0 * j as f64 / 39.0).max(h);
            let dxx = (cf.dpsi_dx(t, x + h)? - cf.dpsi_dx(t, x - h)?) / (2.0 * h);
            worst = worst.max((dxx - 2.0 * cf.dpsi_dt(t, x)?).abs());
        }
    }
    let tol = config.tolerances.psi_heat_identity;
    Ok((
        worst <= tol,
        format!("max |d_xx psi - (2/s^2) d_t psi| over 1000 points = {worst:.3e} (tol {tol:.1e})"),
    ))
}

fn c04_barrier_dual_value(config: &AcceptanceConfig) -> Result<(bool, String)> {
    let params = unit_params(0.5)?;
    let beta = params.beta();
    let cf = ClosedForm::new(params)?;
    let direct = cf.value_u(1.0, 0.0)?;
    let dual = (2.0 * (beta * beta / 2.0).exp() * normal_cdf_quadrature(beta)).ln() / beta;
    let gap = (direct - dual).abs();
    let tol = config.tolerances.barrier_dual_identity;
    let identity_ok = gap <= tol;

    let n_paths = if config.quick { 100_000 } else { 1_000_000 };
    let mc = SimConfig::new(1, n_paths, config.seed, 1.0)?;
    let est = brownian_local_time_mc(&params, 1.0, 0.0, &mc, LocalTimeEstimator::ExactLaw)?;
    let value = value_from_exp_moment(&est, beta);
    let mc_gap = (value.mean - direct).abs();
    let mc_ok = mc_gap <= 3.0 * value.std_error;
    Ok((
        identity_ok && mc_ok,
        format!(
            "U(1,c) = {direct:.10}, dual gap = {gap:.2e} (tol {tol:.1e}); \
             exact-law MC gap = {mc_gap:.2e} vs 3 se = {:.2e}",
            3.0 * value.std_error
        ),
    ))
}

fn c05_theorem1_verification(config: &AcceptanceConfig) -> Result<(bool, String)> {
    let params = unit_params(0.5)?;
    let target = ClosedForm::new(params)?.value_u(1.0, 0.5)?;
    let (n_steps, n_paths, gap_paths) = if config.quick {
        (500, 20_000, 10_000)
    } else {
        (2_000, 200_000, 100_000)
    };
    let mc = SimConfig::with_default_band(n_steps, n_paths, config.seed, 1.0, 1.0)?;
    let est = mc_objective(
        &params,
        &Strategy::ClosedFormOptimal,
        &mc,
        InventoryConvention::Pushing,
    )?;
    let err = (est.mean - target).abs();
    let slack = (3.0 * est.std_error).max(config.tolerances.theorem1_abs_slack);
    let agree_ok = err <= slack;

    // the sqrt(dt) bias must shrink when n_steps doubles; measured on common
    // Brownian paths, where the gap is essentially noise-free
    let gap_mc = SimConfig::with_default_band(n_steps, gap_paths, config.seed ^ 0x5bd1, 1.0, 1.0)?;
    let (coarse, fine) = coupled_refinement_gap(
        &params,
        &Strategy::ClosedFormOptimal,
        &gap_mc,
        2,
        InventoryConvention::Pushing,
    )?;
    let bias_ok = (fine.mean - target).abs() < (coarse.mean - target).abs();
    Ok((
        agree_ok && bias_ok,
        format!(
            "payoff {:.5} +- {:.5} vs U(1, 1/2) = {target:.5}, |err| = {err:.4} (slack {slack:.4}); \
             coupled bias |{:.4}| -> |{:.4}| under step doubling",
            est.mean,
            est.std_error,
            coarse.mean - target,
            fine.mean - target
        ),
    ))
}

fn c06_suboptimality_ordering(config: &AcceptanceConfig) -> Result<(bool, String)> {
    let params = unit_params(0.5)?;
    let (n_steps, n_paths) = if config.quick {
        (500, 20_000)
    } else {
        (2_000, 200_000)
    };
    let mc = SimConfig::with_default_band(n_steps, n_paths, config.seed, 1.0, 1.0)?;
    let optimal = mc_objective(
        &params,
        &Strategy::ClosedFormOptimal,
        &mc,
        InventoryConvention::Pushing,
    )?;
    let rivals: Vec<(&str, Strategy<f64>)> = vec![
        ("zero", Strategy::Zero),
        ("constant(-1/2)", Strategy::Constant(-0.5)),
        ("constant(+1/2)", Strategy::Constant(0.5)),
        (
            "1.5 x optimal",
            Strategy::Scaled {
                factor: 1.5,
                inner: Box::new(Strategy::ClosedFormOptimal),
            },
        ),
    ];
    let mut passed = true;
    let mut parts = vec![format!(
        "optimal {:.5} +- {:.5}",
        optimal.mean, optimal.std_error
    )];
    for (name, strategy) in &rivals {
        let est = mc_objective(&params, strategy, &mc, InventoryConvention::Pushing)?;
        let margin = config.tolerances.ordering_se_multiple * optimal.combined_std_error(&est);
        let gap = optimal.mean - est.mean;
        if gap <= margin {
            passed = false;
        }
        parts.push(format!(
            "{name} {:.5} (gap {gap:.4} vs margin {margin:.4})",
            est.mean
        ));
    }
    Ok((passed, parts.join("; ")))
}

fn c07_hopf_cole_equivalence(config: &AcceptanceConfig) -> Result<(bool, String)> {
    let params = unit_params(0.5)?;
    let grid = if config.quick {
        Grid1D::new(0.0, 6.0, 301, 500, 1.0)?
    } else {
        Grid1D::new(0.0, 6.0, 601, 2000, 1.0)?
    };
    let direct = solve_hjb_eps(&params, 1e-2, &grid)?;
    let linearized = solve_hopf_cole(&params, 1e-2, &grid)?;
    let gap = direct.sup_distance(&linearized.u)?;
    let tol = config.tolerances.hopf_cole_equivalence;
    Ok((
        gap <= tol,
        format!(
            "sup |U_direct - log(h)/beta| = {gap:.3e} on {}x{} (tol {tol:.1e})",
            grid.nz(),
            grid.nt()
        ),
    ))
}

fn c08_pde_vs_feynman_kac(config: &AcceptanceConfig) -> Result<(bool, String)> {
    let params = unit_params(0.5)?;
    let grid = Grid1D::new(0.0, 6.0, 601, 2000, 1.0)?;
    let surface = solve_hjb_eps(&params, 1e-2, &grid)?;
    let (n_steps, n_paths) = if config.quick {
        (400, 10_000)
    } else {
        (800, 100_000)
    };
    let mc = SimConfig::with_default_band(n_steps, n_paths, config.seed, 1.0, 1.0)?;
    let rv = RegularizedValue::new(params, 1e-2, mc)?;
    let mut passed = true;
    let mut worst = (0.0f64, 0.0f64, 0.0f64); // gap, t, z
    for &t in &[0.5, 1.0] {
        for &z in &[0.0, 0.5, 1.0] {
            let est = rv.u_eps_mc(t, z)?;
            let row = (t / grid.dt()).round() as usize;
            let col = ((z - grid.z_min()) / grid.dz()).round() as usize;
            let gap = (est.mean - surface.value(row, col)).abs();
            let tol = (3.0 * est.std_error).max(config.tolerances.pde_vs_mc_abs);
            if gap > tol {
                passed = false;
            }
            if gap > worst.0 {
                worst = (gap, t, z);
            }
        }
    }
    Ok((
        passed,
        format!(
            "6 probe points, worst |PDE - MC| = {:.4} at (t, z) = ({}, {}) (abs slack {:.0e})",
            worst.0, worst.1, worst.2, config.tolerances.pde_vs_mc_abs
        ),
    ))
}

fn c09_eps_convergence(config: &AcceptanceConfig) -> Result<(bool, String)> {
    let params = unit_params(0.5)?;
    let n_paths = if config.quick { 4_000 } else { 20_000 };
    // eps = 1e-3 needs dt <= eps/4, hence 4000 steps even in quick mode
    let mc = SimConfig::with_default_band(4_000, n_paths, config.seed, 1.0, 1.0)?;
    let z_grid = [0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0];
    let table = convergence_study(&params, &[1e-1, 1e-2, 1e-3], 1.0, &z_grid, &mc)?;
    let decreasing = table.sup_errors_strictly_decreasing();
    let slopes = table.rate_slopes();
    let slopes_ok = slopes
        .iter()
        .all(|s| *s >= config.tolerances.rate_slope_min);
    let sups: Vec<String> = table
        .rows
        .iter()
        .map(|r| format!("{:.4}", r.sup_error))
        .collect();
    Ok((
        decreasing && slopes_ok,
        format!(
            "sup errors along eps = [1e-1, 1e-2, 1e-3]: [{}] (strictly decreasing: {decreasing}); \
             inner-RMS log-log slopes {:?} (min {})",
            sups.join(", "),
            slopes
                .iter()
                .map(|s| (s * 1e3).round() / 1e3)
                .collect::<Vec<_>>(),
            config.tolerances.rate_slope_min
        ),
    ))
}

fn c10_singular_pde_accuracy(config: &AcceptanceConfig) -> Result<(bool, String)> {
    let params = unit_params(0.5)?;
    let cf = ClosedForm::new(params)?;
    let grid = Grid1D::new(0.0, 6.0, 601, 2000, 1.0)?;
    let exact = |g: &Grid1D<f64>| {
        Surface::tabulate(*g, |t, z| {
            if t == 0.0 {
                0.0
            } else {
                cf.value_u(t, z).unwrap()
            }
        })
    };
    let err = solve_singular(&params, &grid)?.sup_distance(&exact(&grid)?)?;
    let sup_ok = err <= config.tolerances.singular_pde_sup;
    // parabolic refinement dz/2, dt/4 keeps the corner-layer error halving
    let fine = grid.refined(2, 4)?;
    let err_fine = solve_singular(&params, &fine)?.sup_distance(&exact(&fine)?)?;
    let ratio = err_fine / err;
    let ratio_ok = ratio <= config.tolerances.singular_refinement_ratio;
    Ok((
        sup_ok && ratio_ok,
        format!(
            "sup error {err:.3e} on 601x2000 (tol {:.1e}); after (dz/2, dt/4) refinement {err_fine:.3e}, \
             ratio {ratio:.3} (tol {})",
            config.tolerances.singular_pde_sup, config.tolerances.singular_refinement_ratio
        ),
    ))
}

fn c11_reflected_simulator_sanity(config: &AcceptanceConfig) -> Result<(bool, String)> {
    let params = unit_params(0.0)?;
    // the ratio check needs sigma sqrt(dt) well below the band width
    let (n_steps, n_paths) = if config.quick {
        (200_000, 500)
    } else {
        (1_600_000, 2_000)
    };
    let mc = SimConfig::new(n_steps, n_paths, config.seed, 1e-2)?;
    let records = simulate_paths(&params, &Strategy::Zero, &mc)?;
    let pushing = McEstimate::from_samples(&records.iter().map(|r| r.pushing).collect::<Vec<_>>());
    let band = McEstimate::from_samples(
        &records
            .iter()
            .map(|r| r.band_local_time)
            .collect::<Vec<_>>(),
    );
    let target = (2.0 / std::f64::consts::PI).sqrt();
    let push_ok = (pushing.mean - target).abs() <= 3.0 * pushing.std_error;
    let ratio = band.mean / pushing.mean;
    let ratio_ok =
        ratio >= config.tolerances.band_ratio_low && ratio <= config.tolerances.band_ratio_high;
    Ok((
        push_ok && ratio_ok,
        format!(
            "E[pushing] = {:.5} +- {:.5} vs sqrt(2/pi) = {target:.5}; band/pushing = {ratio:.3} \
             (bracket [{}, {}])",
            pushing.mean,
            pushing.std_error,
            config.tolerances.band_ratio_low,
            config.tolerances.band_ratio_high
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_cdf_matches_known_values() {
        assert!((normal_cdf_quadrature(0.0) - 0.5).abs() < 1e-15);
        assert!((normal_cdf_quadrature(0.5) - 0.6914624612740131).abs() < 1e-12);
        assert!((normal_cdf_quadrature(-1.0) - 0.15865525393145707).abs() < 1e-12);
    }

    #[test]
    fn unknown_criterion_id_reports_failure() {
        let r = run_criterion(99, &AcceptanceConfig::quick(1));
        assert!(!r.passed);
        assert!(r.detail.contains("aborted"));
    }

    #[test]
    fn fast_deterministic_criteria_pass() {
        let cfg = AcceptanceConfig::quick(42);
        for id in [1, 2, 3] {
            let r = run_criterion(id, &cfg);
            assert!(r.passed, "{}", r.line());
        }
    }

    #[test]
    fn corrupted_tolerance_fails_only_its_criterion() {
        let mut cfg = AcceptanceConfig::quick(42);
        cfg.tolerances.hopf_cole_equivalence = 1e-15; // unattainable
        let c7 = run_criterion(7, &cfg);
        assert!(!c7.passed, "{}", c7.line());
        for id in [1, 2, 3, 10] {
            let r = run_criterion(id, &cfg);
            assert!(r.passed, "{}", r.line());
        }
    }
}
