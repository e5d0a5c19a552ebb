//! Scalar abstraction: every numerical routine in this crate is generic over
//! [`Real`], which is implemented for `f32` and `f64`.
//!
//! The special functions are routed through `f64` in both cases; the trait
//! only decides the working precision of grids, paths and accumulators.

use crate::erf;

/// Floating-point scalar usable by the model, simulators and solvers.
pub trait Real:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + std::fmt::Debug
    + std::fmt::Display
    + std::fmt::LowerExp
    + std::iter::Sum
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64` (exact for `f64`, rounded for `f32`).
    fn of(value: f64) -> Self;

    /// Widening conversion to `f64`.
    fn to_f64_lossy(self) -> f64;

    fn erf(self) -> Self {
        Self::of(erf::erf(self.to_f64_lossy()))
    }

    fn erfc(self) -> Self {
        Self::of(erf::erfc(self.to_f64_lossy()))
    }

    /// Scaled complementary error function `exp(x^2) erfc(x)`.
    fn erfcx(self) -> Self {
        Self::of(erf::erfcx(self.to_f64_lossy()))
    }
}

impl Real for f64 {
    #[inline]
    fn of(value: f64) -> Self {
        value
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self
    }
}

impl Real for f32 {
    #[inline]
    fn of(value: f64) -> Self {
        value as f32
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions_round_trip() {
        assert_eq!(f64::of(0.1), 0.1);
        assert_eq!(f32::of(0.5), 0.5f32);
        assert_eq!(0.25f32.to_f64_lossy(), 0.25);
    }

    #[test]
    fn special_functions_dispatch() {
        let a: f64 = Real::erf(1.0f64);
        let b: f32 = Real::erf(1.0f32);
        assert!((a - 0.8427007929497149).abs() < 1e-15);
        assert!((b - 0.842_700_8).abs() < 1e-6);
        let c: f64 = Real::erfcx(2.0f64);
        assert!((c - 0.25539567631050574).abs() < 1e-15);
    }
}
