//! Tighter observational bounds from a binary nondifferential proxy `V` of
//! the unmeasured confounder.
//!
//! Which bound applies depends on whether `E[Y|x,V]`, `E[Y|x',V]` and
//! `E[X|V]` are nonincreasing or nondecreasing in `V`. Those directions are
//! computed from the observed joint, every rule whose (weak) antecedent
//! holds is evaluated, and the answer is the intersection of all of them
//! with the observational envelope.
//!
//! Direction convention: a quantity is nonincreasing in `V` when its value
//! at `v` is at most its value at `v'`.

use serde::Serialize;

use crate::bounds::{obs_bounds, Target};
use crate::error::{Error, Result};
use crate::model::{
    BoundResult, FiredRule, Interval, IntervalKind, Level, ProxyJoint, Row, Rule,
};
use crate::scalar::{max_of, min_of, Scalar};

/// Default tolerance below which a difference across `V` counts as a tie.
pub const DEFAULT_TIE_TOLERANCE: f64 = 1e-12;

/// Direction of a conditional expectation as `V` goes from `v'` to `v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    NonIncreasing,
    NonDecreasing,
    /// Tie: both nonincreasing and nondecreasing.
    Both,
}

impl Direction {
    /// Direction of `f(v) - f(v')`.
    pub fn of_difference<T: Scalar>(diff: T, tie_tolerance: T) -> Self {
        if diff.abs() <= tie_tolerance {
            Direction::Both
        } else if diff < T::zero() {
            Direction::NonIncreasing
        } else {
            Direction::NonDecreasing
        }
    }

    fn has_inc(self) -> bool {
        matches!(self, Direction::NonIncreasing | Direction::Both)
    }

    fn has_dec(self) -> bool {
        matches!(self, Direction::NonDecreasing | Direction::Both)
    }

    /// Both directions shared, as a direction; `None` if there is none.
    pub fn common(self, other: Self) -> Option<Self> {
        match (self.has_inc() && other.has_inc(), self.has_dec() && other.has_dec()) {
            (true, true) => Some(Direction::Both),
            (true, false) => Some(Direction::NonIncreasing),
            (false, true) => Some(Direction::NonDecreasing),
            (false, false) => None,
        }
    }

    /// Some reading of `self` and `other` is one nonincreasing, the other
    /// nondecreasing.
    pub fn can_oppose(self, other: Self) -> bool {
        (self.has_inc() && other.has_dec()) || (self.has_dec() && other.has_inc())
    }

    /// Some reading of `self` and `other` points the same way.
    pub fn can_agree(self, other: Self) -> bool {
        self.common(other).is_some()
    }
}

/// Monotonicity of the observed conditionals in `V`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonotonicityReport<T: Scalar> {
    pub dir_y_given_x_v: Direction,
    pub dir_y_given_xprime_v: Direction,
    pub dir_x_given_v: Direction,
    /// Both outcome arms share at least one direction.
    pub jointly_monotone: bool,
    pub tie_tolerance: T,
}

impl<T: Scalar> MonotonicityReport<T> {
    /// Common direction of the two outcome arms, if any.
    pub fn outcome_direction(&self) -> Option<Direction> {
        self.dir_y_given_x_v.common(self.dir_y_given_xprime_v)
    }

    /// `V` is independent of `(X, Y)`: every conditional ties across `V`.
    pub fn proxy_uninformative(&self) -> bool {
        self.dir_y_given_x_v == Direction::Both
            && self.dir_y_given_xprime_v == Direction::Both
            && self.dir_x_given_v == Direction::Both
    }
}

/// Crude and partially adjusted effects.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AdjustedEffects<T: Scalar> {
    /// `Σ_v p(y|x,v) p(v)`.
    pub s_x: T,
    /// `Σ_v p(y|x',v) p(v)`.
    pub s_xprime: T,
    /// `p(y|x) - p(y|x')`.
    pub ate_crude: T,
    /// `s_x - s_xprime`.
    pub ate_obs: T,
}

pub fn adjusted_effects<T: Scalar>(pj: &ProxyJoint<T>) -> Result<AdjustedEffects<T>> {
    let s = |x: Level| -> Result<T> {
        let mut acc = T::zero();
        for v in Level::BOTH {
            acc = acc + pj.p_y_given_x_v(x, v)? * pj.p_v(v);
        }
        Ok(acc)
    };
    let s_x = s(Level::Base)?;
    let s_xprime = s(Level::Prime)?;
    let obs = pj.observed();
    Ok(AdjustedEffects {
        s_x,
        s_xprime,
        ate_crude: obs.p_y_given_x()? - obs.p_y_given_xp()?,
        ate_obs: s_x - s_xprime,
    })
}

pub fn monotonicity_report<T: Scalar>(
    pj: &ProxyJoint<T>,
    tie_tolerance: T,
) -> Result<MonotonicityReport<T>> {
    let (v, vp) = (Level::Base, Level::Prime);
    let arm = |x: Level| -> Result<Direction> {
        let d = pj.p_y_given_x_v(x, v)? - pj.p_y_given_x_v(x, vp)?;
        Ok(Direction::of_difference(d, tie_tolerance))
    };
    let dir_y_given_x_v = arm(Level::Base)?;
    let dir_y_given_xprime_v = arm(Level::Prime)?;
    let dir_x_given_v =
        Direction::of_difference(pj.p_x_given_v(v)? - pj.p_x_given_v(vp)?, tie_tolerance);
    Ok(MonotonicityReport {
        dir_y_given_x_v,
        dir_y_given_xprime_v,
        dir_x_given_v,
        jointly_monotone: dir_y_given_x_v.can_agree(dir_y_given_xprime_v),
        tie_tolerance,
    })
}

/// Everything the proxy analysis produces for one exposure orientation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProxyAnalysis<T: Scalar> {
    pub target: Target,
    pub effects: AdjustedEffects<T>,
    pub monotonicity: MonotonicityReport<T>,
    /// Intersection of every fired rule and the observational envelope.
    pub bounds: BoundResult<T>,
    /// Same, restricted to the condition-free rules (`tighter5`-`tighter8`).
    pub condition_free: BoundResult<T>,
}

/// Benefit and harm proxy analyses.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProxyReport<T: Scalar> {
    pub benefit: ProxyAnalysis<T>,
    pub harm: ProxyAnalysis<T>,
}

fn rule_interval<T: Scalar>(lo_rows: &[T], hi_rows: &[T]) -> Interval<T> {
    // Rule intervals are reported as computed; emptiness is only an error
    // for the final intersection.
    let lo = max_of(lo_rows).max(T::zero());
    let hi = min_of(hi_rows).min(T::one());
    Interval::from_parts(lo, hi, IntervalKind::Probability)
}

type Fired<T> = (AdjustedEffects<T>, MonotonicityReport<T>, Vec<FiredRule<T>>);

/// Evaluate every applicable rule for benefit on the joint as given.
fn fire_rules<T: Scalar>(pj: &ProxyJoint<T>, tie_tolerance: T) -> Result<Fired<T>> {
    let eff = adjusted_effects(pj)?;
    let mono = monotonicity_report(pj, tie_tolerance)?;
    let obs = pj.observed();
    let envelope = obs.p_x_y() + obs.p_xp_yp();
    let flip_mass = obs.p_x_yp() + obs.p_xp_y();
    let p_y = obs.p_y();
    let zero = T::zero();

    let mut fired = vec![FiredRule {
        rule: Rule::PnsObs,
        interval: rule_interval(&[zero], &[envelope]),
    }];
    if mono.proxy_uninformative() {
        return Ok((eff, mono, fired));
    }
    let mut push = |rule: Rule, lo: &[T], hi: &[T]| {
        fired.push(FiredRule {
            rule,
            interval: rule_interval(lo, hi),
        });
    };

    if let Some(common) = mono.outcome_direction() {
        let crude_vs_obs = Direction::of_difference(eff.ate_obs - eff.ate_crude, tie_tolerance);
        if crude_vs_obs.has_dec() {
            // ATE_crude ≤ ATE_obs ≤ ATE
            push(Rule::Tighter1, &[zero, eff.ate_obs], &[envelope]);
        }
        if crude_vs_obs.has_inc() {
            // ATE ≤ ATE_obs ≤ ATE_crude
            push(Rule::Tighter2, &[zero], &[envelope, eff.ate_obs + flip_mass]);
        }
        if common.can_oppose(mono.dir_x_given_v) {
            push(
                Rule::Tighter3,
                &[zero, eff.ate_obs, p_y - eff.s_xprime, eff.s_x - p_y],
                &[envelope],
            );
        }
        if common.can_agree(mono.dir_x_given_v) {
            push(
                Rule::Tighter4,
                &[zero],
                &[
                    eff.s_x,
                    T::one() - eff.s_xprime,
                    envelope,
                    eff.ate_obs + flip_mass,
                ],
            );
        }
    }

    if mono.dir_y_given_x_v.can_oppose(mono.dir_x_given_v) {
        push(Rule::Tighter5, &[zero, eff.s_x - p_y], &[envelope]);
    }
    if mono.dir_y_given_x_v.can_agree(mono.dir_x_given_v) {
        push(Rule::Tighter6, &[zero], &[eff.s_x, envelope]);
    }
    if mono.dir_y_given_xprime_v.can_oppose(mono.dir_x_given_v) {
        push(Rule::Tighter7, &[zero, p_y - eff.s_xprime], &[envelope]);
    }
    if mono.dir_y_given_xprime_v.can_agree(mono.dir_x_given_v) {
        push(Rule::Tighter8, &[zero], &[T::one() - eff.s_xprime, envelope]);
    }
    Ok((eff, mono, fired))
}

fn intersect_rules<T: Scalar>(
    fired: Vec<FiredRule<T>>,
    include: impl Fn(Rule) -> bool,
) -> Result<BoundResult<T>> {
    let kept: Vec<FiredRule<T>> = fired.into_iter().filter(|f| include(f.rule)).collect();
    let lower = kept
        .iter()
        .map(|f| Row::new(f.rule.name(), f.interval.lo()))
        .collect();
    let upper = kept
        .iter()
        .map(|f| Row::new(f.rule.name(), f.interval.hi()))
        .collect();
    let mut result = BoundResult::from_rows(lower, upper, IntervalKind::Probability)?;
    result.rules_fired = kept;
    Ok(result)
}

fn oriented<T: Scalar>(pj: &ProxyJoint<T>, target: Target) -> ProxyJoint<T> {
    match target {
        Target::Benefit => *pj,
        Target::Harm => pj.swapped(),
    }
}

/// Full proxy analysis for one target. Harm reruns the dispatch on the
/// joint with `x ↔ x'` relabelled.
pub fn proxy_analysis<T: Scalar>(
    pj: &ProxyJoint<T>,
    tie_tolerance: T,
    target: Target,
) -> Result<ProxyAnalysis<T>> {
    let oriented = oriented(pj, target);
    let (effects, monotonicity, fired) = fire_rules(&oriented, tie_tolerance)?;
    let condition_free = intersect_rules(fired.clone(), |r| {
        r == Rule::PnsObs || r.is_condition_free()
    })?;
    let bounds = intersect_rules(fired, |_| true)?;
    Ok(ProxyAnalysis {
        target,
        effects,
        monotonicity,
        bounds,
        condition_free,
    })
}

/// Tightest proxy-based bounds on benefit and harm.
pub fn proxy_bounds<T: Scalar>(pj: &ProxyJoint<T>, tie_tolerance: T) -> Result<ProxyReport<T>> {
    Ok(ProxyReport {
        benefit: proxy_analysis(pj, tie_tolerance, Target::Benefit)?,
        harm: proxy_analysis(pj, tie_tolerance, Target::Harm)?,
    })
}

/// Intersection of the fired condition-free rules (`tighter5`-`tighter8`)
/// and the observational envelope, as used by the simulation study.
pub fn condition_free_bounds<T: Scalar>(
    pj: &ProxyJoint<T>,
    tie_tolerance: T,
    target: Target,
) -> Result<BoundResult<T>> {
    let (_, _, fired) = fire_rules(&oriented(pj, target), tie_tolerance)?;
    intersect_rules(fired, |r| r == Rule::PnsObs || r.is_condition_free())
}

/// The observational envelope of the collapsed joint, for comparison.
pub fn envelope<T: Scalar>(pj: &ProxyJoint<T>, target: Target) -> Interval<T> {
    obs_bounds(&pj.observed(), target).interval
}

impl<T: Scalar> ProxyAnalysis<T> {
    pub fn fired(&self, rule: Rule) -> Option<&FiredRule<T>> {
        self.bounds.fired(rule)
    }

    pub fn rule_names(&self) -> Vec<&'static str> {
        self.bounds.rule_names()
    }
}

/// Error raised when the proxy rules contradict each other, which signals
/// that `V` is not a valid nondifferential proxy of a binary confounder.
pub fn is_model_violation(err: &Error) -> bool {
    matches!(err, Error::EmptyInterval { .. })
}
