//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All algorithms are written against [`Real`], a thin extension of
//! `num_traits::Float`. The crate root exports `f64`-specialized aliases for
//! the common case; `f32` works too, with correspondingly looser accuracy.

use num_traits::Float;

/// Floating-point scalar type usable throughout the toolkit.
pub trait Real:
    Float + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static
{
    /// Embeds an `f64` constant (tolerances, literals) into this type.
    fn lit(value: f64) -> Self;

    /// Converts to `f64` for reporting and formatting.
    fn as_f64(self) -> f64;

    /// Natural logarithm of two, used for nat/bit conversions.
    fn ln_2() -> Self {
        Self::lit(std::f64::consts::LN_2)
    }

    /// One half, the ubiquitous factor in Gaussian rate expressions.
    fn half() -> Self {
        Self::lit(0.5)
    }
}

impl Real for f64 {
    #[inline]
    fn lit(value: f64) -> f64 {
        value
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
}

impl Real for f32 {
    #[inline]
    fn lit(value: f64) -> f32 {
        value as f32
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self as f64
    }
}
