use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A scalar constrained to `[0, 1]`.
///
/// Values within `tol_prob` outside the unit interval are clamped on
/// construction; anything further out is rejected.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64", bound = "T: Scalar")]
pub struct Probability<T: Scalar>(T);

impl<T: Scalar> Probability<T> {
    pub fn new(value: T) -> Result<Self> {
        Self::named("value", value)
    }

    /// Like [`Probability::new`], naming `field` in the error message.
    pub fn named(field: &str, value: T) -> Result<Self> {
        let tol = T::tol_prob();
        if value.is_nan() || value < -tol || value > T::one() + tol {
            return Err(Error::InvalidProbability {
                field: field.to_string(),
                value: value.as_f64(),
            });
        }
        Ok(Self(value.max(T::zero()).min(T::one())))
    }

    pub fn zero() -> Self {
        Self(T::zero())
    }

    pub fn one() -> Self {
        Self(T::one())
    }

    #[inline]
    pub fn get(self) -> T {
        self.0
    }

    /// `1 - p`.
    #[inline]
    pub fn complement(self) -> Self {
        Self(T::one() - self.0)
    }
}

impl<T: Scalar> TryFrom<f64> for Probability<T> {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(T::lit(value))
    }
}

impl<T: Scalar> From<Probability<T>> for f64 {
    fn from(p: Probability<T>) -> f64 {
        p.0.as_f64()
    }
}

/// Scale an interval lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalKind {
    /// A probability, confined to `[0, 1]`.
    Probability,
    /// A difference of probabilities such as the ATE, confined to `[-1, 1]`.
    Signed,
}

impl IntervalKind {
    pub fn range<T: Scalar>(self) -> (T, T) {
        match self {
            IntervalKind::Probability => (T::zero(), T::one()),
            IntervalKind::Signed => (-T::one(), T::one()),
        }
    }
}

/// Closed interval `[lo, hi]` on a probability or signed scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval<T: Scalar> {
    lo: T,
    hi: T,
    kind: IntervalKind,
}

impl<T: Scalar> Interval<T> {
    /// Validated constructor. `lo` may exceed `hi` by at most `tol_prob`;
    /// endpoints must lie in the kind's range up to the same tolerance and
    /// are clamped into it.
    pub fn new(lo: T, hi: T, kind: IntervalKind) -> Result<Self> {
        let tol = T::tol_prob();
        if lo.is_nan() || hi.is_nan() || lo > hi + tol {
            return Err(Error::EmptyInterval {
                lo: lo.as_f64(),
                hi: hi.as_f64(),
            });
        }
        let (min, max) = kind.range::<T>();
        for (field, v) in [("lo", lo), ("hi", hi)] {
            if v < min - tol || v > max + tol {
                return Err(Error::InvalidProbability {
                    field: field.to_string(),
                    value: v.as_f64(),
                });
            }
        }
        Ok(Self {
            lo: lo.max(min).min(max),
            hi: hi.max(min).min(max),
            kind,
        })
    }

    pub fn probability(lo: T, hi: T) -> Result<Self> {
        Self::new(lo, hi, IntervalKind::Probability)
    }

    pub fn signed(lo: T, hi: T) -> Result<Self> {
        Self::new(lo, hi, IntervalKind::Signed)
    }

    /// Degenerate probability interval `[p, p]`.
    pub fn point(p: Probability<T>) -> Self {
        Self {
            lo: p.get(),
            hi: p.get(),
            kind: IntervalKind::Probability,
        }
    }

    /// `[0, 1]`: no information about a probability.
    pub fn unit() -> Self {
        Self {
            lo: T::zero(),
            hi: T::one(),
            kind: IntervalKind::Probability,
        }
    }

    /// Endpoints already known to be ordered and inside the kind's range.
    pub(crate) fn from_parts(lo: T, hi: T, kind: IntervalKind) -> Self {
        Self { lo, hi, kind }
    }

    #[inline]
    pub fn lo(&self) -> T {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> T {
        self.hi
    }

    #[inline]
    pub fn kind(&self) -> IntervalKind {
        self.kind
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }

    pub fn contains(&self, x: T, tol: T) -> bool {
        x >= self.lo - tol && x <= self.hi + tol
    }

    /// `other ⊆ self` up to `tol` at each endpoint.
    pub fn contains_interval(&self, other: &Self, tol: T) -> bool {
        other.lo >= self.lo - tol && other.hi <= self.hi + tol
    }

    /// Intersection, or `None` when the overlap is empty beyond `tol_prob`.
    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo > hi + T::tol_prob() {
            None
        } else {
            Some(Self {
                lo,
                hi,
                kind: self.kind,
            })
        }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.lo.as_f64(), self.hi.as_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probability_clamps_within_tolerance() {
        let p = Probability::<f64>::new(-5e-10).unwrap();
        assert_eq!(p.get(), 0.0);
        let p = Probability::<f64>::new(1.0 + 5e-10).unwrap();
        assert_eq!(p.get(), 1.0);
    }

    #[test]
    fn probability_rejects_beyond_tolerance() {
        assert!(Probability::<f64>::new(-1e-6).is_err());
        assert!(Probability::<f64>::new(1.01).is_err());
        assert!(Probability::<f64>::new(f64::NAN).is_err());
    }

    #[test]
    fn f32_tolerance_is_wider() {
        assert!(Probability::<f32>::new(-5e-6).is_ok());
        assert!(Probability::<f64>::new(-5e-6).is_err());
    }

    #[test]
    fn interval_ordering_enforced() {
        let err = Interval::<f64>::probability(0.5, 0.4).unwrap_err();
        assert_eq!(err.code(), "EmptyInterval");
        assert!(Interval::<f64>::probability(0.5, 0.5 - 1e-10).is_ok());
    }

    #[test]
    fn signed_interval_range() {
        assert!(Interval::<f64>::signed(-0.9, 0.2).is_ok());
        assert!(Interval::<f64>::probability(-0.9, 0.2).is_err());
        assert!(Interval::<f64>::signed(-1.5, 0.2).is_err());
    }

    #[test]
    fn intersection() {
        let a = Interval::<f64>::probability(0.1, 0.5).unwrap();
        let b = Interval::<f64>::probability(0.3, 0.9).unwrap();
        let c = a.intersect(&b).unwrap();
        assert_eq!(c.to_f64(), (0.3, 0.5));
        let d = Interval::<f64>::probability(0.6, 0.9).unwrap();
        assert!(a.intersect(&d).is_none());
    }
}
