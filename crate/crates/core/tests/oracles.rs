//! Cross-route consistency checks: each test pits one implementation path
//! against an independent sampling or refinement oracle.

use targetzone::*;

fn unit_params(s0: f64) -> ModelParams64 {
    ModelParams64::new(1.0, 1.0, 1.0, 0.0, s0, 1.0).unwrap()
}

#[test]
fn value_function_agrees_with_band_local_time_sampling() {
    // scale covariance of the representation: U(t, z) can be read off the
    // exponential moment of the Brownian local time at level (z - c)/sigma,
    // estimated here by band occupation with no reference to the closed form
    let params = unit_params(0.5);
    let cf = ClosedForm64::new(params).unwrap();
    let exact = cf.value_u(1.0, 0.5).unwrap();
    let mc = SimConfig::with_default_band(40_000, 20_000, 31, 1.0, 1.0).unwrap();
    let est = brownian_local_time_mc(&params, 1.0, 0.5, &mc, LocalTimeEstimator::Band).unwrap();
    let value = value_from_exp_moment(&est, params.beta());
    let tol = (3.0 * value.std_error).max(0.025);
    assert!(
        (value.mean - exact).abs() < tol,
        "band-sampled {} +- {} vs closed form {exact}",
        value.mean,
        value.std_error
    );
}

#[test]
fn far_field_value_is_monte_carlo_zero() {
    // at z = c + 5 the local time at level 5 is almost surely zero on [0,1]
    let params = unit_params(5.0);
    let mc = SimConfig::with_default_band(2_000, 100_000, 3, 1.0, 1.0).unwrap();
    let est = brownian_local_time_mc(&params, 1.0, 5.0, &mc, LocalTimeEstimator::Band).unwrap();
    let value = value_from_exp_moment(&est, params.beta());
    assert!(
        value.mean >= 0.0 && value.mean < 1e-4,
        "U_mc(1, 5) = {}",
        value.mean
    );
    let exact = ClosedForm64::new(params)
        .unwrap()
        .value_u(1.0, 5.0)
        .unwrap();
    assert!(exact > 0.0 && exact < 1e-4);
}

#[test]
fn objective_error_shrinks_from_500_to_4000_steps() {
    // dt-convergence of the Monte Carlo objective toward the value function,
    // measured on common Brownian paths across an 8x refinement
    let params = unit_params(0.5);
    let target = ClosedForm64::new(params)
        .unwrap()
        .value_u(1.0, 0.5)
        .unwrap();
    let mc = SimConfig::with_default_band(500, 3_000, 11, 1.0, 1.0).unwrap();
    let (coarse, fine) = coupled_refinement_gap(
        &params,
        &Strategy64::ClosedFormOptimal,
        &mc,
        8,
        InventoryConvention::Pushing,
    )
    .unwrap();
    let (err_coarse, err_fine) = ((coarse.mean - target).abs(), (fine.mean - target).abs());
    assert!(
        err_fine < err_coarse,
        "|err| did not shrink: 500 steps {err_coarse}, 4000 steps {err_fine}"
    );
}

#[test]
fn occupation_identity_holds_at_pinned_settings() {
    // eps = 0.1, t = 1, z = c, 10^4 steps, band 10^-2: both sides of the
    // occupation-time identity agree to 5% per path
    let params = unit_params(0.5);
    let mc = SimConfig::new(10_000, 64, 17, 1e-2).unwrap();
    let rv = RegularizedValue64::new(params, 0.1, mc).unwrap();
    let dev = rv.occupation_identity_check(1.0, 0.0, 64).unwrap();
    assert!(dev < 0.05, "max per-path deviation {dev}");
}

#[test]
fn occupation_identity_deviation_shrinks_under_refinement() {
    // with the band at its default 2 sigma sqrt(dt), refining the path also
    // refines the histogram, so the per-path gap must shrink
    let params = unit_params(0.5);
    let mut devs = Vec::new();
    for n_steps in [2_500usize, 40_000] {
        let mc = SimConfig::with_default_band(n_steps, 48, 19, 1.0, 1.0).unwrap();
        let rv = RegularizedValue64::new(params, 0.1, mc).unwrap();
        devs.push(rv.occupation_identity_check(1.0, 0.0, 48).unwrap());
    }
    assert!(devs[1] < devs[0], "deviations {devs:?}");
}

#[test]
fn u_eps_peaks_at_the_barrier() {
    let params = unit_params(0.5);
    let mc = SimConfig::with_default_band(800, 6_000, 23, 1.0, 1.0).unwrap();
    let rv = RegularizedValue64::new(params, 1e-2, mc).unwrap();
    let at_barrier = rv.u_eps_mc(1.0, 0.0).unwrap();
    for &z in &[-1.5, -0.5, 0.5, 1.5] {
        let off = rv.u_eps_mc(1.0, z).unwrap();
        let slack = 3.0 * at_barrier.combined_std_error(&off);
        assert!(
            off.mean <= at_barrier.mean + slack,
            "U_eps(1, {z}) = {} above barrier value {}",
            off.mean,
            at_barrier.mean
        );
    }
}

#[test]
fn u_eps_standard_error_shrinks_like_inverse_sqrt_paths() {
    let params = unit_params(0.5);
    let mut ses = Vec::new();
    for n_paths in [4_000usize, 16_000] {
        let mc = SimConfig::with_default_band(400, n_paths, 29, 1.0, 1.0).unwrap();
        let rv = RegularizedValue64::new(params, 1e-2, mc).unwrap();
        ses.push(rv.u_eps_mc(1.0, 0.3).unwrap().std_error);
    }
    let ratio = ses[0] / ses[1];
    // quadrupling paths should halve the standard error
    assert!((1.6..2.5).contains(&ratio), "se ratio {ratio}");
}

#[test]
fn u_eps_at_small_kernel_width_tracks_closed_form_off_barrier() {
    // eps = 1e-3, t = 1, z = 1/2: the smoothing gap is inside 0.05
    let params = unit_params(0.5);
    let exact = ClosedForm64::new(params).unwrap().value_u(1.0, 0.5).unwrap();
    let mc = SimConfig::with_default_band(4_000, 20_000, 37, 1.0, 1.0).unwrap();
    let rv = RegularizedValue64::new(params, 1e-3, mc).unwrap();
    let est = rv.u_eps_mc(1.0, 0.5).unwrap();
    let tol = (3.0 * est.std_error).max(0.05);
    assert!(
        (est.mean - exact).abs() < tol,
        "U_eps {} +- {} vs U {exact}",
        est.mean,
        est.std_error
    );
}

#[test]
fn v_star_eps_at_small_kernel_width_tracks_closed_form_off_barrier() {
    let params = unit_params(0.5);
    let exact = ClosedForm64::new(params).unwrap().v_star(0.0, 0.5).unwrap();
    let mc = SimConfig::with_default_band(4_000, 20_000, 41, 1.0, 1.0).unwrap();
    let rv = RegularizedValue64::new(params, 1e-3, mc).unwrap();
    let est = rv.v_star_eps(0.0, 0.5).unwrap();
    assert!(
        (est.mean - exact).abs() < 0.05,
        "v*_eps {} +- {} vs v* {exact}",
        est.mean,
        est.std_error
    );
}
