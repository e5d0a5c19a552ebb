//! Error function, complementary error function and the scaled variant
//! `erfcx(x) = exp(x^2) erfc(x)` in double precision.
//!
//! The rational approximations for `erf`/`erfc` are ported from FreeBSD's
//! msun `s_erf.c` (via the Go standard library), which carries the notice:
//!
//! ```text
//! Copyright (C) 1993 by Sun Microsystems, Inc. All rights reserved.
//! Developed at SunPro, a Sun Microsystems, Inc. business.
//! Permission to use, copy, modify, and distribute this
//! software is freely granted, provided that this notice
//! is preserved.
//! ```
//!
//! `erfcx` reuses the asymptotic rational kernels: on `[1.25, inf)` msun
//! evaluates `erfc(x) = exp(-x^2 - 0.5625 + R/S) / x` with the `-x^2` term
//! split for accuracy, so the scaled function collapses to
//! `erfcx(x) = exp(-0.5625 + R/S) / x` with no exponential cancellation at
//! all. This is what makes the far-field tails of the value function
//! computable at full relative precision.

// the ported msun coefficients carry their source precision verbatim
#![allow(clippy::excessive_precision)]

const ERX: f64 = 8.45062911510467529297e-01;

// coefficients for approximation to erf in [0, 0.84375]
const EFX: f64 = 1.28379167095512586316e-01;
const EFX8: f64 = 1.02703333676410069053e+00;
const PP0: f64 = 1.28379167095512558561e-01;
const PP1: f64 = -3.25042107247001499370e-01;
const PP2: f64 = -2.84817495755985104766e-02;
const PP3: f64 = -5.77027029648944159157e-03;
const PP4: f64 = -2.37630166566501626084e-05;
const QQ1: f64 = 3.97917223959155352819e-01;
const QQ2: f64 = 6.50222499887672944485e-02;
const QQ3: f64 = 5.08130628187576562776e-03;
const QQ4: f64 = 1.32494738004321644526e-04;
const QQ5: f64 = -3.96022827877536812320e-06;

// coefficients for approximation to erf in [0.84375, 1.25]
const PA0: f64 = -2.36211856075265944077e-03;
const PA1: f64 = 4.14856118683748331666e-01;
const PA2: f64 = -3.72207876035701323847e-01;
const PA3: f64 = 3.18346619901161753674e-01;
const PA4: f64 = -1.10894694282396677476e-01;
const PA5: f64 = 3.54783043256182359371e-02;
const PA6: f64 = -2.16637559486879084300e-03;
const QA1: f64 = 1.06420880400844228286e-01;
const QA2: f64 = 5.40397917702171048937e-01;
const QA3: f64 = 7.18286544141962662868e-02;
const QA4: f64 = 1.26171219808761642112e-01;
const QA5: f64 = 1.36370839120290507362e-02;
const QA6: f64 = 1.19844998467991074170e-02;

// coefficients for approximation to erfc in [1.25, 1/0.35]
const RA0: f64 = -9.86494403484714822705e-03;
const RA1: f64 = -6.93858572707181764372e-01;
const RA2: f64 = -1.05586262253232909814e+01;
const RA3: f64 = -6.23753324503260060396e+01;
const RA4: f64 = -1.62396669462573470355e+02;
const RA5: f64 = -1.84605092906711035994e+02;
const RA6: f64 = -8.12874355063065934246e+01;
const RA7: f64 = -9.81432934416914548592e+00;
const SA1: f64 = 1.96512716674392571292e+01;
const SA2: f64 = 1.37657754143519042600e+02;
const SA3: f64 = 4.34565877475229228821e+02;
const SA4: f64 = 6.45387271733267880336e+02;
const SA5: f64 = 4.29008140027567833386e+02;
const SA6: f64 = 1.08635005541779435134e+02;
const SA7: f64 = 6.57024977031928170135e+00;
const SA8: f64 = -6.04244152148580987438e-02;

// coefficients for approximation to erfc in [1/0.35, 28]
const RB0: f64 = -9.86494292470009928597e-03;
const RB1: f64 = -7.99283237680523006574e-01;
const RB2: f64 = -1.77579549177547519889e+01;
const RB3: f64 = -1.60636384855821916062e+02;
const RB4: f64 = -6.37566443368389627722e+02;
const RB5: f64 = -1.02509513161107724954e+03;
const RB6: f64 = -4.83519191608651397019e+02;
const SB1: f64 = 3.03380607434824582924e+01;
const SB2: f64 = 3.25792512996573918826e+02;
const SB3: f64 = 1.53672958608443695994e+03;
const SB4: f64 = 3.19985821950859553908e+03;
const SB5: f64 = 2.55305040643316442583e+03;
const SB6: f64 = 4.74528541206955367215e+02;
const SB7: f64 = -2.24409524465858183362e+01;

const VERY_TINY: f64 = 2.848094538889218e-306;
const TINY: f64 = 1.3877787807814457e-17; // 2^-56
const SMALL: f64 = 3.725290298461914e-09; // 2^-28

/// `R/S` rational tail used by msun on `[1.25, inf)`, as a function of `s = 1/x^2`.
fn erfc_tail_rs(x: f64) -> f64 {
    let s = 1.0 / (x * x);
    if x < 1.0 / 0.35 {
        let r =
            RA0 + s * (RA1 + s * (RA2 + s * (RA3 + s * (RA4 + s * (RA5 + s * (RA6 + s * RA7))))));
        let q = 1.0
            + s * (SA1
                + s * (SA2 + s * (SA3 + s * (SA4 + s * (SA5 + s * (SA6 + s * (SA7 + s * SA8)))))));
        r / q
    } else {
        let r = RB0 + s * (RB1 + s * (RB2 + s * (RB3 + s * (RB4 + s * (RB5 + s * RB6)))));
        let q =
            1.0 + s * (SB1 + s * (SB2 + s * (SB3 + s * (SB4 + s * (SB5 + s * (SB6 + s * SB7))))));
        r / q
    }
}

/// Gaussian error function, accurate to about 1 ulp.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    } else if x == f64::INFINITY {
        return 1.0;
    } else if x == f64::NEG_INFINITY {
        return -1.0;
    }
    let sign = x < 0.0;
    let x = x.abs();
    if x < 0.84375 {
        let temp = if x < SMALL {
            if x < VERY_TINY {
                0.125 * (8.0 * x + EFX8 * x) // avoid underflow
            } else {
                x + EFX * x
            }
        } else {
            let z = x * x;
            let r = PP0 + z * (PP1 + z * (PP2 + z * (PP3 + z * PP4)));
            let s = 1.0 + z * (QQ1 + z * (QQ2 + z * (QQ3 + z * (QQ4 + z * QQ5))));
            x + x * (r / s)
        };
        return if sign { -temp } else { temp };
    }
    if x < 1.25 {
        let s = x - 1.0;
        let p = PA0 + s * (PA1 + s * (PA2 + s * (PA3 + s * (PA4 + s * (PA5 + s * PA6)))));
        let q = 1.0 + s * (QA1 + s * (QA2 + s * (QA3 + s * (QA4 + s * (QA5 + s * QA6)))));
        return if sign { -ERX - p / q } else { ERX + p / q };
    }
    if x >= 6.0 {
        return if sign { -1.0 } else { 1.0 };
    }
    let rs = erfc_tail_rs(x);
    // pseudo-single precision split of x for the -x*x exponent
    let z = f64::from_bits(x.to_bits() & 0xffff_ffff_0000_0000);
    let r = (-z * z - 0.5625).exp() * ((z - x) * (z + x) + rs).exp();
    if sign {
        r / x - 1.0
    } else {
        1.0 - r / x
    }
}

/// Complementary error function `erfc(x) = 1 - erf(x)`.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    } else if x == f64::INFINITY {
        return 0.0;
    } else if x == f64::NEG_INFINITY {
        return 2.0;
    }
    let sign = x < 0.0;
    let x = x.abs();
    if x < 0.84375 {
        let temp = if x < TINY {
            x
        } else {
            let z = x * x;
            let r = PP0 + z * (PP1 + z * (PP2 + z * (PP3 + z * PP4)));
            let s = 1.0 + z * (QQ1 + z * (QQ2 + z * (QQ3 + z * (QQ4 + z * QQ5))));
            let y = r / s;
            if x < 0.25 {
                x + x * y
            } else {
                0.5 + (x * y + (x - 0.5))
            }
        };
        return if sign { 1.0 + temp } else { 1.0 - temp };
    }
    if x < 1.25 {
        let s = x - 1.0;
        let p = PA0 + s * (PA1 + s * (PA2 + s * (PA3 + s * (PA4 + s * (PA5 + s * PA6)))));
        let q = 1.0 + s * (QA1 + s * (QA2 + s * (QA3 + s * (QA4 + s * (QA5 + s * QA6)))));
        return if sign {
            1.0 + ERX + p / q
        } else {
            1.0 - ERX - p / q
        };
    }
    if x < 28.0 {
        if sign && x > 6.0 {
            return 2.0;
        }
        let rs = erfc_tail_rs(x);
        let z = f64::from_bits(x.to_bits() & 0xffff_ffff_0000_0000);
        let r = (-z * z - 0.5625).exp() * ((z - x) * (z + x) + rs).exp();
        return if sign { 2.0 - r / x } else { r / x };
    }
    if sign {
        2.0
    } else {
        0.0
    }
}

/// Scaled complementary error function `erfcx(x) = exp(x^2) erfc(x)`.
///
/// For `x >= 1.25` the exponential factors cancel algebraically against the
/// msun kernel, so no large exponent is ever formed and the result keeps full
/// relative accuracy out to arbitrarily large `x` (`erfcx(x) ~ 1/(x sqrt(pi))`).
/// For negative arguments `erfcx(x) = 2 exp(x^2) - erfcx(-x)`, which overflows
/// once `x < -26.6` just like the exact value.
pub fn erfcx(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        if x < -26.7 {
            return f64::INFINITY; // 2 exp(x^2) overflows f64
        }
        return 2.0 * (x * x).exp() - erfcx(-x);
    }
    if x < 1.25 {
        return (x * x).exp() * erfc(x);
    }
    if x == f64::INFINITY {
        return 0.0;
    }
    (-0.5625 + erfc_tail_rs(x)).exp() / x
}

/// Standard normal cumulative distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn erf_reference_values() {
        // reference values from Mathematica
        assert_eq!(erf(0.0), 0.0);
        approx(erf(0.5), 0.5204998778130465, 1e-15);
        approx(erf(1.0), 0.8427007929497149, 1e-15);
        approx(erf(2.0), 0.9953222650189527, 1e-15);
        approx(erf(-1.5), -0.9661051464753108, 1e-15);
        approx(erf(3.5), 0.9999992569016276, 1e-15);
        assert_eq!(erf(f64::INFINITY), 1.0);
        assert_eq!(erf(f64::NEG_INFINITY), -1.0);
        assert!(erf(f64::NAN).is_nan());
    }

    #[test]
    fn erfc_reference_values() {
        assert_eq!(erfc(0.0), 1.0);
        approx(erfc(0.5), 0.4795001221869535, 1e-15);
        approx(erfc(1.0), 0.15729920705028513, 1e-16);
        approx(erfc(2.5), 0.0004069520174449589, 1e-18);
        approx(erfc(5.0), 1.5374597944280351e-12, 1e-26);
        approx(erfc(-2.0), 1.9953222650189528, 1e-15);
        approx(erfc(10.0), 2.0884875837625447e-45, 1e-59);
        assert_eq!(erfc(f64::INFINITY), 0.0);
        assert_eq!(erfc(f64::NEG_INFINITY), 2.0);
    }

    #[test]
    fn erfcx_reference_values() {
        // reference values from mpmath (exp(x^2) * erfc(x) at 25 digits)
        approx(erfcx(0.5), 0.6156903441929258, 1e-15);
        approx(erfcx(1.0), 0.42758357615580700, 1e-15);
        approx(erfcx(2.0), 0.25539567631050574, 1e-15);
        approx(erfcx(5.0), 0.11070463773306863, 1e-15);
        approx(erfcx(10.0), 0.05614099274382259, 1e-15);
        approx(erfcx(50.0), 0.011281536265323772, 1e-15);
        assert_eq!(erfcx(0.0), 1.0);
    }

    #[test]
    fn erfcx_matches_product_mid_range() {
        for i in 0..200 {
            let x = 0.01 + 0.12 * i as f64; // up to ~24, where exp(x^2)*erfc(x) is still representable
            let direct = (x * x).exp() * erfc(x);
            let rel = (erfcx(x) - direct).abs() / direct;
            assert!(
                rel < 3e-13,
                "x={x}: erfcx={} product={} rel={rel}",
                erfcx(x),
                direct
            );
        }
    }

    #[test]
    fn erfcx_asymptotic_far_field() {
        // reference values from mpmath, far beyond where erfc underflows
        for &(x, want) in &[
            (30.0, 0.018795888861416751),
            (100.0, 0.0056416137829894329),
            (1e3, 0.00056418930145338765),
            (1e6, 5.6418958354747419e-7),
        ] {
            let rel = (erfcx(x) - want).abs() / want;
            assert!(rel < 1e-14, "x={x} rel={rel}");
        }
    }

    #[test]
    fn erfcx_negative_reflection() {
        for &x in &[-0.3f64, -1.0, -2.5, -5.0] {
            let expected = 2.0 * (x * x).exp() - erfcx(-x);
            approx(erfcx(x), expected, expected.abs() * 1e-14);
        }
        assert_eq!(erfcx(-30.0), f64::INFINITY);
    }

    #[test]
    fn normal_cdf_values() {
        approx(normal_cdf(0.0), 0.5, 1e-16);
        approx(normal_cdf(0.5), 0.6914624612740131, 1e-15);
        approx(normal_cdf(-1.96), 0.024997895148220435, 1e-15);
        approx(normal_cdf(1.0) + normal_cdf(-1.0), 1.0, 1e-15);
    }
}
