//! Floating point abstraction shared by every computation in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Scalar type the bound formulas are evaluated in: `f32` or `f64`.
///
/// Every formula is a closed-form combination of sums, products and a
/// handful of divisions, so any IEEE float works. The two tolerances are
/// per-type because `f32` cannot resolve the `f64` defaults.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Validation tolerance for probabilities and normalization.
    fn tol_prob() -> Self;

    /// Tolerance for internal arithmetic identities and tie detection.
    fn tol_exact() -> Self;

    /// Lossless-enough conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    #[inline]
    fn tol_prob() -> Self {
        1e-9
    }

    #[inline]
    fn tol_exact() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    #[inline]
    fn tol_prob() -> Self {
        1e-5
    }

    #[inline]
    fn tol_exact() -> Self {
        1e-6
    }
}

/// Maximum of a non-empty slice of values.
pub(crate) fn max_of<T: Scalar>(values: &[T]) -> T {
    values.iter().copied().fold(T::neg_infinity(), T::max)
}

/// Minimum of a non-empty slice of values.
pub(crate) fn min_of<T: Scalar>(values: &[T]) -> T {
    values.iter().copied().fold(T::infinity(), T::min)
}
