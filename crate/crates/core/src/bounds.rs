//! Closed-form bounds on the probabilities of benefit and harm, the ATE,
//! and the probabilities of necessity and sufficiency.
//!
//! Harm is always computed by relabelling the exposure (`x ↔ x'`) and
//! reusing the benefit formulas; the sensitivity parameters are swapped
//! along with the joint.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    BoundResult, Interval, IntervalKind, ObservedJoint, Param, Row, SensitivityParams,
};
use crate::scalar::Scalar;

/// Which counterfactual probability is being bounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// `p(y_x, y'_x')`: the outcome occurs if and only if exposed.
    Benefit,
    /// `p(y_x', y'_x)`: the outcome occurs if and only if not exposed.
    Harm,
}

impl Target {
    pub const BOTH: [Target; 2] = [Target::Benefit, Target::Harm];

    pub fn name(self) -> &'static str {
        match self {
            Target::Benefit => "benefit",
            Target::Harm => "harm",
        }
    }
}

fn labels(target: Target, benefit: [&'static str; 4], harm: [&'static str; 4]) -> [&'static str; 4] {
    match target {
        Target::Benefit => benefit,
        Target::Harm => harm,
    }
}

fn oriented<T: Scalar>(obs: &ObservedJoint<T>, target: Target) -> ObservedJoint<T> {
    match target {
        Target::Benefit => *obs,
        Target::Harm => obs.swapped(),
    }
}

/// Bounds from the observed joint alone: `[0, p(x,y) + p(x',y')]` for
/// benefit, `[0, p(x',y) + p(x,y')]` for harm.
pub fn obs_bounds<T: Scalar>(obs: &ObservedJoint<T>, target: Target) -> BoundResult<T> {
    let o = oriented(obs, target);
    let label = match target {
        Target::Benefit => "p(x,y)+p(x',y')",
        Target::Harm => "p(x',y)+p(x,y')",
    };
    BoundResult::from_rows(
        vec![Row::new("0", T::zero())],
        vec![Row::new(label, o.p_x_y() + o.p_xp_yp())],
        IntervalKind::Probability,
    )
    .expect("observational envelope is never empty")
}

fn require_probability<T: Scalar>(name: &str, i: &Interval<T>) -> Result<()> {
    if i.kind() != IntervalKind::Probability {
        return Err(Error::InvalidProbability {
            field: name.to_string(),
            value: i.lo().as_f64(),
        });
    }
    Ok(())
}

/// Sharp bounds given (bounds on) the interventional probabilities
/// `p(y_x)` and `p(y_x')`.
///
/// Each row is monotone in `p(y_x)` and `p(y_x')` separately, so lower rows
/// take `p_yx.lo` and `p_yxp.hi`, upper rows `p_yx.hi` and `p_yxp.lo`, and
/// the result is exact for interval inputs.
pub fn tian_pearl<T: Scalar>(
    obs: &ObservedJoint<T>,
    p_yx: &Interval<T>,
    p_yxp: &Interval<T>,
    target: Target,
) -> Result<BoundResult<T>> {
    require_probability("p_yx", p_yx)?;
    require_probability("p_yxp", p_yxp)?;
    let (o, a, b) = match target {
        Target::Benefit => (*obs, *p_yx, *p_yxp),
        Target::Harm => (obs.swapped(), *p_yxp, *p_yx),
    };
    let p_y = o.p_y();
    let lo_l = labels(
        target,
        ["0", "p(y_x)-p(y_x')", "p(y)-p(y_x')", "p(y_x)-p(y)"],
        ["0", "p(y_x')-p(y_x)", "p(y)-p(y_x)", "p(y_x')-p(y)"],
    );
    let hi_l = labels(
        target,
        [
            "p(y_x)",
            "p(y'_x')",
            "p(x,y)+p(x',y')",
            "p(y_x)-p(y_x')+p(x,y')+p(x',y)",
        ],
        [
            "p(y_x')",
            "p(y'_x)",
            "p(x',y)+p(x,y')",
            "p(y_x')-p(y_x)+p(x',y')+p(x,y)",
        ],
    );
    let lower = vec![
        Row::new(lo_l[0], T::zero()),
        Row::new(lo_l[1], a.lo() - b.hi()),
        Row::new(lo_l[2], p_y - b.hi()),
        Row::new(lo_l[3], a.lo() - p_y),
    ];
    let upper = vec![
        Row::new(hi_l[0], a.hi()),
        Row::new(hi_l[1], T::one() - b.lo()),
        Row::new(hi_l[2], o.p_x_y() + o.p_xp_yp()),
        Row::new(hi_l[3], a.hi() - b.lo() + o.p_x_yp() + o.p_xp_y()),
    ];
    BoundResult::from_rows(lower, upper, IntervalKind::Probability)
}

/// Bounds on `p(y_x)` and `p(y_x')` implied by the sensitivity parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CounterfactualIntervals<T: Scalar> {
    pub p_yx: Interval<T>,
    pub p_yxp: Interval<T>,
}

/// `p(y_x) ∈ [p(x,y) + p(x') m_x, p(x,y) + p(x') M_x]` and the mirror
/// statement for `p(y_x')`.
pub fn cf_intervals<T: Scalar>(
    obs: &ObservedJoint<T>,
    sp: &SensitivityParams<T>,
) -> Result<CounterfactualIntervals<T>> {
    sp.check_possible(obs)?;
    let (px, pxp) = (obs.p_x(), obs.p_xp());
    Ok(CounterfactualIntervals {
        p_yx: Interval::probability(
            obs.p_x_y() + pxp * sp.min_x(),
            obs.p_x_y() + pxp * sp.max_x(),
        )?,
        p_yxp: Interval::probability(
            obs.p_xp_y() + px * sp.min_xp(),
            obs.p_xp_y() + px * sp.max_xp(),
        )?,
    })
}

/// Benefit or harm bounds as a function of the observed joint and the four
/// sensitivity parameters, row by row.
///
/// Agrees with `tian_pearl` applied to `cf_intervals`.
pub fn sensitivity_bounds<T: Scalar>(
    obs: &ObservedJoint<T>,
    sp: &SensitivityParams<T>,
    target: Target,
) -> Result<BoundResult<T>> {
    sp.check_possible(obs)?;
    let (o, s) = match target {
        Target::Benefit => (*obs, *sp),
        Target::Harm => (obs.swapped(), sp.swapped()),
    };
    let (px, pxp) = (o.p_x(), o.p_xp());
    let (pxy, px_y, px_y_) = (o.p_x_y(), o.p_xp_y(), o.p_xp_yp());
    let lo_l = labels(
        target,
        [
            "0",
            "p(x,y)+p(x')m_x-p(x',y)-p(x)M_xp",
            "p(x,y)-p(x)M_xp",
            "p(x')m_x-p(x',y)",
        ],
        [
            "0",
            "p(x',y)+p(x)m_xp-p(x,y)-p(x')M_x",
            "p(x',y)-p(x')M_x",
            "p(x)m_xp-p(x,y)",
        ],
    );
    let hi_l = labels(
        target,
        [
            "p(x,y)+p(x')M_x",
            "1-p(x',y)-p(x)m_xp",
            "p(x,y)+p(x',y')",
            "p(x)+p(x')M_x-p(x)m_xp",
        ],
        [
            "p(x',y)+p(x)M_xp",
            "1-p(x,y)-p(x')m_x",
            "p(x',y)+p(x,y')",
            "p(x')+p(x)M_xp-p(x')m_x",
        ],
    );
    let lower = vec![
        Row::new(lo_l[0], T::zero()),
        Row::new(lo_l[1], pxy + pxp * s.min_x() - px_y - px * s.max_xp()),
        Row::new(lo_l[2], pxy - px * s.max_xp()),
        Row::new(lo_l[3], pxp * s.min_x() - px_y),
    ];
    let upper = vec![
        Row::new(hi_l[0], pxy + pxp * s.max_x()),
        Row::new(hi_l[1], T::one() - px_y - px * s.min_xp()),
        Row::new(hi_l[2], pxy + px_y_),
        Row::new(hi_l[3], px + pxp * s.max_x() - px * s.min_xp()),
    ];
    BoundResult::from_rows(lower, upper, IntervalKind::Probability)
}

/// A parameter range, possibly open at either end, possibly empty.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ParamRange<T: Scalar> {
    pub param: Param,
    pub lo: T,
    pub hi: T,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl<T: Scalar> ParamRange<T> {
    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && (self.lo_open || self.hi_open))
    }

    pub fn contains(&self, v: T) -> bool {
        let above = if self.lo_open { v > self.lo } else { v >= self.lo };
        let below = if self.hi_open { v < self.hi } else { v <= self.hi };
        above && below
    }
}

/// Where the lower sensitivity bound improves on zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LowerInformative<T: Scalar> {
    /// One range per parameter the lower bound depends on.
    pub ranges: [ParamRange<T>; 2],
    pub empty: bool,
}

/// Where the upper sensitivity bound improves on the observational one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UpperInformative<T: Scalar> {
    /// Equal to the possible regions of the two parameters involved.
    pub ranges: [ParamRange<T>; 2],
    /// Whether some parameter values give a strictly smaller upper bound
    /// than the observational envelope: `p(y|x) ≠ p(y'|x')` (benefit).
    pub strictly_more_informative: bool,
    pub p_y_given_x: T,
    pub p_yp_given_xp: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InformativeRegions<T: Scalar> {
    pub target: Target,
    pub lower: LowerInformative<T>,
    pub upper: UpperInformative<T>,
}

/// Informative regions of the sensitivity parameters.
///
/// Benefit lower bound: `p(y|x') < m_x ≤ p(y|x)` or
/// `p(y|x') ≤ M_x' < p(y|x)`. Upper bound: the informative region is the
/// whole possible region.
pub fn informative_regions<T: Scalar>(
    obs: &ObservedJoint<T>,
    target: Target,
) -> Result<InformativeRegions<T>> {
    let o = oriented(obs, target);
    let yx = o.p_y_given_x()?;
    let yxp = o.p_y_given_xp()?;
    let yp_xp = o.p_yp_given_xp()?;
    let name = |p: Param| match target {
        Target::Benefit => p,
        Target::Harm => p.swapped(),
    };
    let lower_ranges = [
        ParamRange {
            param: name(Param::MinX),
            lo: yxp,
            hi: yx,
            lo_open: true,
            hi_open: false,
        },
        ParamRange {
            param: name(Param::MaxXp),
            lo: yxp,
            hi: yx,
            lo_open: false,
            hi_open: true,
        },
    ];
    let upper_ranges = [
        ParamRange {
            param: name(Param::MinXp),
            lo: T::zero(),
            hi: yxp,
            lo_open: false,
            hi_open: false,
        },
        ParamRange {
            param: name(Param::MaxX),
            lo: yx,
            hi: T::one(),
            lo_open: false,
            hi_open: false,
        },
    ];
    Ok(InformativeRegions {
        target,
        lower: LowerInformative {
            empty: lower_ranges[0].is_empty(),
            ranges: lower_ranges,
        },
        upper: UpperInformative {
            ranges: upper_ranges,
            strictly_more_informative: (yx - yp_xp).abs() > T::tol_prob(),
            p_y_given_x: yx,
            p_yp_given_xp: yp_xp,
        },
    })
}

/// ATE bounds from the sensitivity parameters:
/// `[p(x,y) + p(x')m_x - p(x',y) - p(x)M_x', p(x,y) + p(x')M_x - p(x',y) - p(x)m_x']`.
pub fn ate_sensitivity_bounds<T: Scalar>(
    obs: &ObservedJoint<T>,
    sp: &SensitivityParams<T>,
) -> Result<Interval<T>> {
    sp.check_possible(obs)?;
    let (px, pxp) = (obs.p_x(), obs.p_xp());
    let lo = obs.p_x_y() + pxp * sp.min_x() - obs.p_xp_y() - px * sp.max_xp();
    let hi = obs.p_x_y() + pxp * sp.max_x() - obs.p_xp_y() - px * sp.min_xp();
    let one = T::one();
    Interval::signed(lo.max(-one).min(one), hi.max(-one).min(one))
}

/// Bounds on the probability of necessity `p(y'_x' | x, y)` and of
/// sufficiency `p(y_x | x', y')`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NecessitySufficiency<T: Scalar> {
    pub pn: BoundResult<T>,
    pub ps: BoundResult<T>,
}

pub fn pn_ps_bounds<T: Scalar>(
    obs: &ObservedJoint<T>,
    p_yx: &Interval<T>,
    p_yxp: &Interval<T>,
) -> Result<NecessitySufficiency<T>> {
    require_probability("p_yx", p_yx)?;
    require_probability("p_yxp", p_yxp)?;
    let (pxy, px_y_) = (obs.p_x_y(), obs.p_xp_yp());
    for (event, v) in [("p(x,y)", pxy), ("p(x',y')", px_y_)] {
        if v < T::tol_prob() {
            return Err(Error::ZeroConditioningEvent {
                event: event.to_string(),
                value: v.as_f64(),
            });
        }
    }
    let p_y = obs.p_y();
    let pn = BoundResult::from_rows(
        vec![
            Row::new("0", T::zero()),
            Row::new("(p(y)-p(y_x'))/p(x,y)", (p_y - p_yxp.hi()) / pxy),
        ],
        vec![
            Row::new("1", T::one()),
            Row::new(
                "(p(y'_x')-p(x',y'))/p(x,y)",
                (T::one() - p_yxp.lo() - px_y_) / pxy,
            ),
        ],
        IntervalKind::Probability,
    )?;
    let ps = BoundResult::from_rows(
        vec![
            Row::new("0", T::zero()),
            Row::new("(p(y_x)-p(y))/p(x',y')", (p_yx.lo() - p_y) / px_y_),
        ],
        vec![
            Row::new("1", T::one()),
            Row::new("(p(y_x)-p(x,y))/p(x',y')", (p_yx.hi() - pxy) / px_y_),
        ],
        IntervalKind::Probability,
    )?;
    Ok(NecessitySufficiency { pn, ps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Probability;

    fn obs() -> ObservedJoint<f64> {
        ObservedJoint::new(0.108, 0.132, 0.084, 0.676).unwrap()
    }

    fn truth_params() -> SensitivityParams<f64> {
        SensitivityParams::new(0.4, 0.6, 0.1, 0.3).unwrap()
    }

    fn pt(x: f64) -> Interval<f64> {
        Interval::point(Probability::new(x).unwrap())
    }

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn observational_envelope() {
        let b = obs_bounds(&obs(), Target::Benefit);
        close(b.hi(), 0.784, 1e-12);
        assert_eq!(b.lo(), 0.0);
        let h = obs_bounds(&obs(), Target::Harm);
        close(h.hi(), 0.216, 1e-12);
        let point = ObservedJoint::new(1.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(obs_bounds(&point, Target::Benefit).interval.to_f64(), (0.0, 1.0));
    }

    #[test]
    fn tian_pearl_at_worked_example_truths() {
        let b = tian_pearl(&obs(), &pt(0.42), &pt(0.12), Target::Benefit).unwrap();
        close(b.lo(), 0.3, 1e-12);
        close(b.hi(), 0.42, 1e-12);
        assert_eq!(b.active_lower, vec![1]);
        assert_eq!(b.active_upper, vec![0]);
        let h = tian_pearl(&obs(), &pt(0.42), &pt(0.12), Target::Harm).unwrap();
        close(h.lo(), 0.0, 1e-12);
        close(h.hi(), 0.12, 1e-12);
    }

    #[test]
    fn vacuous_counterfactuals_give_envelope() {
        let u = Interval::unit();
        for t in Target::BOTH {
            let tp = tian_pearl(&obs(), &u, &u, t).unwrap();
            let ob = obs_bounds(&obs(), t);
            close(tp.lo(), ob.lo(), 1e-15);
            close(tp.hi(), ob.hi(), 1e-15);
        }
    }

    #[test]
    fn inconsistent_interventional_inputs() {
        // p(y_x) = 0 < p(x,y) is impossible; rows cross
        let err = tian_pearl(&obs(), &pt(0.0), &pt(1.0), Target::Harm).unwrap_err();
        assert_eq!(err.code(), "EmptyInterval");
    }

    #[test]
    fn counterfactual_intervals() {
        let cf = cf_intervals(&obs(), &truth_params()).unwrap();
        close(cf.p_yx.lo(), 0.412, 1e-12);
        close(cf.p_yx.hi(), 0.564, 1e-12);
        close(cf.p_yxp.lo(), 0.108, 1e-12);
        close(cf.p_yxp.hi(), 0.156, 1e-12);
        assert!(cf.p_yx.contains(0.42, 0.0) && cf.p_yxp.contains(0.12, 0.0));
    }

    #[test]
    fn degenerate_params_collapse_to_conditional() {
        let sp = SensitivityParams::unconfounded(&obs()).unwrap();
        let cf = cf_intervals(&obs(), &sp).unwrap();
        close(cf.p_yx.lo(), 0.45, 1e-12);
        close(cf.p_yx.hi(), 0.45, 1e-12);
        let ate = ate_sensitivity_bounds(&obs(), &sp).unwrap();
        close(ate.lo(), ate.hi(), 1e-12);
        close(ate.lo(), 0.45 - 0.084 / 0.76, 1e-12);
    }

    #[test]
    fn vacuous_params_give_manski_envelope() {
        let sp = SensitivityParams::vacuous();
        let cf = cf_intervals(&obs(), &sp).unwrap();
        close(cf.p_yx.lo(), 0.108, 1e-15);
        close(cf.p_yx.hi(), 0.108 + 0.76, 1e-15);
        let ate = ate_sensitivity_bounds(&obs(), &sp).unwrap();
        close(ate.lo(), 0.108 - 0.084 - 0.24, 1e-12);
        close(ate.hi(), 0.108 + 0.76 - 0.084, 1e-12);
        let b = sensitivity_bounds(&obs(), &sp, Target::Benefit).unwrap();
        assert_eq!(b.interval, obs_bounds(&obs(), Target::Benefit).interval);
    }

    #[test]
    fn sensitivity_bounds_at_true_params() {
        let b = sensitivity_bounds(&obs(), &truth_params(), Target::Benefit).unwrap();
        close(b.lo(), 0.256, 1e-12);
        close(b.hi(), 0.564, 1e-12);
        assert_eq!(b.active_lower, vec![1]);
        assert_eq!(b.active_upper, vec![0]);
        let h = sensitivity_bounds(&obs(), &truth_params(), Target::Harm).unwrap();
        close(h.lo(), 0.0, 1e-12);
        close(h.hi(), 0.156, 1e-12);
        let ate = ate_sensitivity_bounds(&obs(), &truth_params()).unwrap();
        close(ate.lo(), 0.256, 1e-12);
        close(ate.hi(), 0.456, 1e-12);
    }

    #[test]
    fn outside_possible_region() {
        let sp = SensitivityParams::new(0.5, 0.6, 0.1, 0.3).unwrap();
        for t in Target::BOTH {
            let err = sensitivity_bounds(&obs(), &sp, t).unwrap_err();
            assert_eq!(err.code(), "ParamsOutsidePossibleRegion");
        }
        assert!(ate_sensitivity_bounds(&obs(), &sp).is_err());
        assert!(cf_intervals(&obs(), &sp).is_err());
    }

    #[test]
    fn informative_regions_worked_example() {
        let r = informative_regions(&obs(), Target::Benefit).unwrap();
        let [mx, big_mxp] = r.lower.ranges;
        assert_eq!(mx.param, Param::MinX);
        close(mx.lo, 0.084 / 0.76, 1e-12);
        close(mx.hi, 0.45, 1e-12);
        assert!(mx.lo_open && !mx.hi_open);
        assert_eq!(big_mxp.param, Param::MaxXp);
        assert!(!big_mxp.lo_open && big_mxp.hi_open);
        assert!(!r.lower.empty);
        assert!(r.upper.strictly_more_informative);
        close(r.upper.p_yp_given_xp, 0.676 / 0.76, 1e-12);

        let h = informative_regions(&obs(), Target::Harm).unwrap();
        assert_eq!(h.lower.ranges[0].param, Param::MinXp);
        assert!(h.lower.empty);
    }

    #[test]
    fn informative_region_empty_when_conditionals_equal() {
        let o = ObservedJoint::new(0.1, 0.3, 0.15, 0.45).unwrap();
        let r = informative_regions(&o, Target::Benefit).unwrap();
        assert!(r.lower.empty);
        assert!(r.lower.ranges.iter().all(|x| x.is_empty()));
    }

    #[test]
    fn degenerate_margin_in_informative_regions() {
        let o = ObservedJoint::new(0.0, 0.0, 0.4, 0.6).unwrap();
        let err = informative_regions(&o, Target::Benefit).unwrap_err();
        assert_eq!(err.code(), "DegenerateMargin");
    }

    #[test]
    fn pn_ps_worked_example() {
        let r = pn_ps_bounds(&obs(), &pt(0.42), &pt(0.12)).unwrap();
        close(r.pn.lo(), 0.072 / 0.108, 1e-12);
        close(r.pn.hi(), 1.0, 0.0);
        close(r.ps.lo(), 0.228 / 0.676, 1e-12);
        close(r.ps.hi(), 0.312 / 0.676, 1e-12);
    }

    #[test]
    fn pn_ps_vacuous() {
        let u = Interval::unit();
        let r = pn_ps_bounds(&obs(), &u, &u).unwrap();
        assert_eq!(r.pn.interval.to_f64(), (0.0, 1.0));
        assert_eq!(r.ps.interval.to_f64(), (0.0, 1.0));
    }

    #[test]
    fn pn_ps_zero_event() {
        let o = ObservedJoint::new(0.0, 0.3, 0.2, 0.5).unwrap();
        let u = Interval::unit();
        let err = pn_ps_bounds(&o, &u, &u).unwrap_err();
        assert_eq!(err.code(), "ZeroConditioningEvent");
    }

    #[test]
    fn signed_interval_rejected_as_counterfactual() {
        let s = Interval::signed(-0.2, 0.3).unwrap();
        assert!(tian_pearl(&obs(), &s, &pt(0.1), Target::Benefit).is_err());
    }

    #[test]
    fn f32_instantiation() {
        let o = ObservedJoint::<f32>::new(0.108, 0.132, 0.084, 0.676).unwrap();
        let sp = SensitivityParams::<f32>::new(0.4, 0.6, 0.1, 0.3).unwrap();
        let b = sensitivity_bounds(&o, &sp, Target::Benefit).unwrap();
        assert!((b.lo() - 0.256).abs() < 1e-6);
        assert!((b.hi() - 0.564).abs() < 1e-6);
    }
}
