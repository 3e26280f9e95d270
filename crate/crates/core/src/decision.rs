//! Decision layer: a weighted social-good score over the benefit and harm
//! intervals, optionally restricted to the pairs that agree with an ATE
//! interval through `ATE = p(benefit) - p(harm)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Interval, IntervalKind};
use crate::scalar::Scalar;

/// Nonnegative weights of benefit and harm in the social-good score
/// `w_benefit * p(benefit) - w_harm * p(harm)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeightsWire<T>", into = "WeightsWire<T>", bound = "T: Scalar")]
pub struct SocialWeights<T: Scalar> {
    w_benefit: T,
    w_harm: T,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightsWire<T> {
    w_benefit: T,
    w_harm: T,
}

impl<T: Scalar> SocialWeights<T> {
    pub fn new(w_benefit: T, w_harm: T) -> Result<Self> {
        for (name, w) in [("w_benefit", w_benefit), ("w_harm", w_harm)] {
            if !w.is_finite() || w < T::zero() {
                return Err(Error::InvalidWeights {
                    reason: format!("{name} = {w} must be finite and nonnegative"),
                });
            }
        }
        Ok(Self { w_benefit, w_harm })
    }

    #[inline]
    pub fn w_benefit(&self) -> T {
        self.w_benefit
    }

    #[inline]
    pub fn w_harm(&self) -> T {
        self.w_harm
    }

    /// Score of a single `(benefit, harm)` pair.
    pub fn score(&self, p: Point<T>) -> T {
        self.w_benefit * p.benefit - self.w_harm * p.harm
    }
}

impl<T: Scalar> TryFrom<WeightsWire<T>> for SocialWeights<T> {
    type Error = Error;

    fn try_from(w: WeightsWire<T>) -> Result<Self> {
        Self::new(w.w_benefit, w.w_harm)
    }
}

impl<T: Scalar> From<SocialWeights<T>> for WeightsWire<T> {
    fn from(w: SocialWeights<T>) -> Self {
        WeightsWire {
            w_benefit: w.w_benefit,
            w_harm: w.w_harm,
        }
    }
}

/// A `(p(benefit), p(harm))` pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Point<T: Scalar> {
    pub benefit: T,
    pub harm: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(benefit: T, harm: T) -> Self {
        Self { benefit, harm }
    }
}

/// Extremes of the social-good score over the compliant region.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RefinedSocialGood<T: Scalar> {
    pub interval: Interval<T>,
    pub argmin: Point<T>,
    pub argmax: Point<T>,
}

fn signed<T: Scalar>(lo: T, hi: T) -> Interval<T> {
    Interval::from_parts(lo, hi, IntervalKind::Signed)
}

/// Score range over the whole benefit × harm box.
pub fn social_good_naive<T: Scalar>(
    benefit: &Interval<T>,
    harm: &Interval<T>,
    w: &SocialWeights<T>,
) -> Interval<T> {
    signed(
        w.w_benefit * benefit.lo() - w.w_harm * harm.hi(),
        w.w_benefit * benefit.hi() - w.w_harm * harm.lo(),
    )
}

/// Candidate vertices of `{b ∈ benefit, h ∈ harm, ate.lo ≤ b - h ≤ ate.hi}`:
/// box corners inside the band and crossings of the band's edge lines
/// with the box edges, with duplicates removed.
fn vertices<T: Scalar>(benefit: &Interval<T>, harm: &Interval<T>, ate: &Interval<T>) -> Vec<Point<T>> {
    let tol = T::tol_prob();
    let inside = |p: &Point<T>| {
        benefit.contains(p.benefit, tol)
            && harm.contains(p.harm, tol)
            && ate.contains(p.benefit - p.harm, tol)
    };
    let mut cands = Vec::with_capacity(12);
    for b in [benefit.lo(), benefit.hi()] {
        for h in [harm.lo(), harm.hi()] {
            cands.push(Point::new(b, h));
        }
    }
    for c in [ate.lo(), ate.hi()] {
        for b in [benefit.lo(), benefit.hi()] {
            cands.push(Point::new(b, b - c));
        }
        for h in [harm.lo(), harm.hi()] {
            cands.push(Point::new(h + c, h));
        }
    }
    let mut out: Vec<Point<T>> = Vec::new();
    for p in cands.into_iter().filter(inside) {
        // snap onto the box so boundary round-off does not leak out
        let p = Point::new(
            p.benefit.max(benefit.lo()).min(benefit.hi()),
            p.harm.max(harm.lo()).min(harm.hi()),
        );
        let dup = out
            .iter()
            .any(|q| (q.benefit - p.benefit).abs() <= tol && (q.harm - p.harm).abs() <= tol);
        if !dup {
            out.push(p);
        }
    }
    out
}

fn infeasible<T: Scalar>(benefit: &Interval<T>, harm: &Interval<T>, ate: &Interval<T>) -> Error {
    Error::InfeasibleRegion {
        reason: format!(
            "no (benefit, harm) in [{}, {}] x [{}, {}] has benefit - harm in [{}, {}]",
            benefit.lo(),
            benefit.hi(),
            harm.lo(),
            harm.hi(),
            ate.lo(),
            ate.hi()
        ),
    }
}

/// Score range over the pairs compliant with `ate`, with the points where
/// the extremes are attained. Ties keep the first vertex found.
pub fn social_good_refined<T: Scalar>(
    benefit: &Interval<T>,
    harm: &Interval<T>,
    ate: &Interval<T>,
    w: &SocialWeights<T>,
) -> Result<RefinedSocialGood<T>> {
    let verts = vertices(benefit, harm, ate);
    let first = *verts.first().ok_or_else(|| infeasible(benefit, harm, ate))?;
    let (mut argmin, mut argmax) = (first, first);
    let (mut lo, mut hi) = (w.score(first), w.score(first));
    for &p in &verts[1..] {
        let s = w.score(p);
        if s < lo {
            lo = s;
            argmin = p;
        }
        if s > hi {
            hi = s;
            argmax = p;
        }
    }
    Ok(RefinedSocialGood {
        interval: signed(lo, hi),
        argmin,
        argmax,
    })
}

/// Vertices of the compliant region, counterclockwise in the `(harm,
/// benefit)` plane starting from the one with the smallest angle about
/// the centroid. A point ATE interval gives a degenerate segment.
pub fn compliance_region<T: Scalar>(
    benefit: &Interval<T>,
    harm: &Interval<T>,
    ate: &Interval<T>,
) -> Result<Vec<Point<T>>> {
    let mut verts = vertices(benefit, harm, ate);
    if verts.is_empty() {
        return Err(infeasible(benefit, harm, ate));
    }
    let n = T::from_usize(verts.len()).unwrap_or_else(T::one);
    let ch = verts.iter().map(|p| p.harm).sum::<T>() / n;
    let cb = verts.iter().map(|p| p.benefit).sum::<T>() / n;
    let angle = |p: &Point<T>| (p.benefit - cb).atan2(p.harm - ch).as_f64();
    verts.sort_by(|a, b| angle(a).total_cmp(&angle(b)));
    Ok(verts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval<f64> {
        Interval::probability(lo, hi).unwrap()
    }

    fn w() -> SocialWeights<f64> {
        SocialWeights::new(1.0, 1.5).unwrap()
    }

    #[test]
    fn naive_examples() {
        let s = social_good_naive(&iv(0.15, 0.65), &iv(0.0, 0.18), &w());
        assert!((s.lo() + 0.12).abs() < 1e-12 && (s.hi() - 0.65).abs() < 1e-12);
        let s = social_good_naive(&iv(0.0, 0.784), &iv(0.0, 0.216), &w());
        assert!((s.lo() + 0.324).abs() < 1e-12 && (s.hi() - 0.784).abs() < 1e-12);
        let zero = SocialWeights::new(0.0, 0.0).unwrap();
        assert_eq!(social_good_naive(&iv(0.1, 0.9), &iv(0.2, 0.3), &zero).to_f64(), (0.0, 0.0));
    }

    #[test]
    fn refined_corners() {
        let ate = Interval::signed(0.15, 0.55).unwrap();
        let r = social_good_refined(&iv(0.15, 0.65), &iv(0.0, 0.18), &ate, &w()).unwrap();
        assert!((r.argmin.benefit - 0.33).abs() < 1e-12);
        assert!((r.argmin.harm - 0.18).abs() < 1e-12);
        assert!((r.argmax.benefit - 0.55).abs() < 1e-12);
        assert_eq!(r.argmax.harm, 0.0);
        assert!((r.interval.lo() - 0.06).abs() < 1e-12);
        assert!((r.interval.hi() - 0.55).abs() < 1e-12);
    }

    #[test]
    fn vacuous_ate_matches_naive() {
        let ate = Interval::signed(-1.0, 1.0).unwrap();
        let r = social_good_refined(&iv(0.15, 0.65), &iv(0.0, 0.18), &ate, &w()).unwrap();
        let n = social_good_naive(&iv(0.15, 0.65), &iv(0.0, 0.18), &w());
        assert!((r.interval.lo() - n.lo()).abs() < 1e-12);
        assert!((r.interval.hi() - n.hi()).abs() < 1e-12);
    }

    #[test]
    fn region_shapes() {
        let ate = Interval::signed(0.15, 0.55).unwrap();
        let poly = compliance_region(&iv(0.15, 0.65), &iv(0.0, 0.18), &ate).unwrap();
        assert!(poly
            .iter()
            .any(|p| (p.harm - 0.18).abs() < 1e-12 && (p.benefit - 0.33).abs() < 1e-12));
        assert!(poly.len() >= 4);

        let point = Interval::signed(0.3, 0.3).unwrap();
        let seg = compliance_region(&iv(0.15, 0.65), &iv(0.0, 0.18), &point).unwrap();
        assert_eq!(seg.len(), 2);

        let far = Interval::signed(0.7, 0.9).unwrap();
        let err = compliance_region(&iv(0.15, 0.65), &iv(0.0, 0.18), &far).unwrap_err();
        assert_eq!(err.code(), "InfeasibleRegion");
    }

    #[test]
    fn weights_validated() {
        assert!(SocialWeights::new(-1.0, 1.0).is_err());
        assert!(SocialWeights::new(1.0, f64::INFINITY).is_err());
        let w: SocialWeights<f64> = serde_json::from_str(r#"{"w_benefit":1,"w_harm":1.5}"#).unwrap();
        assert_eq!(w.w_harm(), 1.5);
        assert!(serde_json::from_str::<SocialWeights<f64>>(r#"{"w_benefit":1,"w_harm":1,"x":0}"#).is_err());
    }
}
