//! The numeric core is generic over the scalar; exercise the `f32`
//! instantiation end to end and check it tracks the `f64` one.

use targetzone::{
    mc_objective, simulate_path, solve_singular, ClosedForm, Grid1D, InventoryConvention,
    ModelParams, SimConfig, Strategy,
};

fn params<T: targetzone::Real>() -> ModelParams<T> {
    ModelParams::new(
        T::of(1.0),
        T::of(1.0),
        T::of(1.0),
        T::of(0.0),
        T::of(0.5),
        T::of(1.0),
    )
    .unwrap()
}

#[test]
fn closed_form_f32_tracks_f64() {
    let cf32 = ClosedForm::<f32>::new(params()).unwrap();
    let cf64 = ClosedForm::<f64>::new(params()).unwrap();
    for &(t, z) in &[(0.25, 0.0), (0.5, 0.5), (1.0, 1.5)] {
        let lo = cf32.value_u(t as f32, z as f32).unwrap() as f64;
        let hi = cf64.value_u(t, z).unwrap();
        assert!((lo - hi).abs() < 1e-5, "U({t},{z}): f32 {lo} vs f64 {hi}");
        if t > 0.0 {
            let dlo = cf32.du_dz(t as f32, z as f32).unwrap() as f64;
            let dhi = cf64.du_dz(t, z).unwrap();
            assert!((dlo - dhi).abs() < 1e-5);
        }
    }
    assert_eq!(cf32.du_dz(0.5, 0.0).unwrap(), -1.0f32);
}

#[test]
fn simulator_f32_stays_on_domain_and_near_f64() {
    let config = SimConfig::with_default_band(400, 2_000, 7, 1.0, 1.0).unwrap();
    let r32 = simulate_path(
        &params::<f32>(),
        &Strategy::<f32>::ClosedFormOptimal,
        &config,
        3,
    )
    .unwrap();
    assert!(r32.terminal_s >= 0.0 && r32.pushing >= 0.0 && r32.cost >= 0.0);
    // the normal draws are f64-generated, so both instantiations see the
    // same noise and the means must agree to single precision
    let m32 = mc_objective(
        &params::<f32>(),
        &Strategy::<f32>::Zero,
        &config,
        InventoryConvention::Pushing,
    )
    .unwrap();
    let m64 = mc_objective(
        &params::<f64>(),
        &Strategy::<f64>::Zero,
        &config,
        InventoryConvention::Pushing,
    )
    .unwrap();
    assert!(
        (m32.mean as f64 - m64.mean).abs() < 1e-4,
        "f32 {} vs f64 {}",
        m32.mean,
        m64.mean
    );
}

#[test]
fn pde_f32_solves_to_single_precision_accuracy() {
    let grid = Grid1D::<f32>::new(0.0, 6.0, 151, 100, 1.0).unwrap();
    let s32 = solve_singular(&params::<f32>(), &grid).unwrap();
    let grid64 = Grid1D::<f64>::new(0.0, 6.0, 151, 100, 1.0).unwrap();
    let s64 = solve_singular(&params::<f64>(), &grid64).unwrap();
    let mut gap = 0.0f64;
    for (a, b) in s32.values().iter().zip(s64.values()) {
        gap = gap.max((*a as f64 - b).abs());
    }
    assert!(gap < 1e-4, "f32/f64 solver gap {gap}");
}
