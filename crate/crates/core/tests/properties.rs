//! Property tests for the contracts that hold pointwise across the domain.

use proptest::prelude::*;
use targetzone::erf::{erfc, erfcx};
use targetzone::{ClosedForm64, Grid64, ModelParams64, Strategy64, Surface64};

fn unit_params() -> ModelParams64 {
    ModelParams64::new(1.0, 1.0, 1.0, 0.0, 0.5, 1.0).unwrap()
}

proptest! {
    #[test]
    fn erfcx_is_consistent_with_erfc(x in 0.0f64..20.0) {
        let direct = (x * x).exp() * erfc(x);
        let scaled = erfcx(x);
        prop_assert!((scaled - direct).abs() <= 5e-13 * direct.abs().max(1e-300),
            "x = {x}: {scaled} vs {direct}");
    }

    #[test]
    fn psi_stays_at_or_above_one(t in 1e-6f64..4.0, x in 0.0f64..50.0) {
        let cf = ClosedForm64::new(ModelParams64::new(1.0, 1.0, 1.0, 0.0, 0.5, 4.0).unwrap()).unwrap();
        prop_assert!(cf.psi(t, x).unwrap() >= 1.0);
    }

    #[test]
    fn du_dz_lies_in_unit_interval(t in 1e-6f64..1.0, z in 0.0f64..30.0) {
        let cf = ClosedForm64::new(unit_params()).unwrap();
        let d = cf.du_dz(t, z).unwrap();
        prop_assert!((-1.0..=0.0).contains(&d), "du_dz({t},{z}) = {d}");
    }

    #[test]
    fn value_u_is_monotone(t in 1e-6f64..1.0, z in 0.0f64..10.0, dt in 0.0f64..0.5, dz in 0.0f64..5.0) {
        let cf = ClosedForm64::new(ModelParams64::new(1.0, 1.0, 1.0, 0.0, 0.5, 2.0).unwrap()).unwrap();
        let base = cf.value_u(t, z).unwrap();
        prop_assert!(cf.value_u(t + dt, z).unwrap() >= base - 1e-14);
        prop_assert!(cf.value_u(t, z + dz).unwrap() <= base + 1e-14);
    }

    #[test]
    fn strategies_respect_linear_growth(t in 0.0f64..0.999, z in 0.0f64..20.0, a in -3.0f64..3.0) {
        let params = unit_params();
        let strategies = vec![
            Strategy64::Zero,
            Strategy64::Constant(a),
            Strategy64::ClosedFormOptimal,
            Strategy64::Scaled { factor: 1.5, inner: Box::new(Strategy64::ClosedFormOptimal) },
        ];
        for s in &strategies {
            let v = s.eval(&params, t, z).unwrap();
            let cap = s.growth_bound(&params);
            prop_assert!(v.abs() <= cap * (1.0 + z.abs()) + 1e-12,
                "{}: |{v}| > {cap} (1 + {z})", s.label());
        }
    }

    #[test]
    fn bilinear_interpolation_stays_in_range(t in -1.0f64..2.0, z in -1.0f64..4.0) {
        let grid = Grid64::new(0.0, 3.0, 7, 5, 1.0).unwrap();
        let surface = Surface64::tabulate(grid, |t, z| (3.0 * t - z).sin()).unwrap();
        let v = surface.bilinear_clamped(t, z);
        prop_assert!(v >= surface.min() - 1e-12 && v <= surface.max() + 1e-12);
    }
}
