use serde::Serialize;

use super::interval::{Interval, IntervalKind};
use crate::error::{Error, Result};
use crate::scalar::{max_of, min_of, Scalar};

/// One argument of a bound's max (lower side) or min (upper side).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row<T: Scalar> {
    pub label: &'static str,
    pub value: T,
}

impl<T: Scalar> Row<T> {
    pub fn new(label: &'static str, value: T) -> Self {
        Self { label, value }
    }
}

/// Identifiers of the proxy-based bound rules and the baseline envelope.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// `0 ≤ p(benefit) ≤ p(x,y) + p(x',y')`, always applicable.
    PnsObs,
    /// Monotone in V and `ATE_crude ≤ ATE_obs`: lower bound `ATE_obs`.
    Tighter1,
    /// Monotone in V and `ATE_obs ≤ ATE_crude`: upper bound via `ATE_obs`.
    Tighter2,
    /// Outcome and exposure move in opposite directions in V.
    Tighter3,
    /// Outcome and exposure move in the same direction in V.
    Tighter4,
    /// `E[Y|x,V]` opposes `E[X|V]`: `S_x ≤ p(y_x)`.
    Tighter5,
    /// `E[Y|x,V]` agrees with `E[X|V]`: `p(y_x) ≤ S_x`.
    Tighter6,
    /// `E[Y|x',V]` opposes `E[X|V]`: `p(y_x') ≤ S_x'`.
    Tighter7,
    /// `E[Y|x',V]` agrees with `E[X|V]`: `S_x' ≤ p(y_x')`.
    Tighter8,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::PnsObs => "pns_obs",
            Rule::Tighter1 => "tighter1",
            Rule::Tighter2 => "tighter2",
            Rule::Tighter3 => "tighter3",
            Rule::Tighter4 => "tighter4",
            Rule::Tighter5 => "tighter5",
            Rule::Tighter6 => "tighter6",
            Rule::Tighter7 => "tighter7",
            Rule::Tighter8 => "tighter8",
        }
    }

    pub fn is_condition_free(self) -> bool {
        matches!(
            self,
            Rule::Tighter5 | Rule::Tighter6 | Rule::Tighter7 | Rule::Tighter8
        )
    }
}

/// A rule that fired during proxy dispatch, with the interval it implies.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiredRule<T: Scalar> {
    pub rule: Rule,
    pub interval: Interval<T>,
}

/// A bound interval together with the trace of how it was obtained.
///
/// `interval.lo` is the largest lower row and `interval.hi` the smallest
/// upper row, before clipping into the interval kind's range.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundResult<T: Scalar> {
    pub interval: Interval<T>,
    pub lower_rows: Vec<Row<T>>,
    pub upper_rows: Vec<Row<T>>,
    /// Indices into `lower_rows` attaining the maximum (all ties).
    pub active_lower: Vec<usize>,
    /// Indices into `upper_rows` attaining the minimum (all ties).
    pub active_upper: Vec<usize>,
    pub clipped_lower: bool,
    pub clipped_upper: bool,
    pub rules_fired: Vec<FiredRule<T>>,
}

fn active<T: Scalar>(rows: &[Row<T>], target: T) -> Vec<usize> {
    let tol = T::tol_exact();
    rows.iter()
        .enumerate()
        .filter(|(_, r)| (r.value - target).abs() <= tol)
        .map(|(i, _)| i)
        .collect()
}

impl<T: Scalar> BoundResult<T> {
    /// Evaluate `[max(lower), min(upper)]`, clip into the kind's range and
    /// record the active rows.
    pub fn from_rows(lower: Vec<Row<T>>, upper: Vec<Row<T>>, kind: IntervalKind) -> Result<Self> {
        assert!(!lower.is_empty() && !upper.is_empty());
        let lo_values: Vec<T> = lower.iter().map(|r| r.value).collect();
        let hi_values: Vec<T> = upper.iter().map(|r| r.value).collect();
        let lo = max_of(&lo_values);
        let hi = min_of(&hi_values);
        if lo > hi + T::tol_prob() {
            return Err(Error::EmptyInterval {
                lo: lo.as_f64(),
                hi: hi.as_f64(),
            });
        }
        let (min, max) = kind.range::<T>();
        let lo_c = lo.max(min).min(max);
        let hi_c = hi.max(min).min(max);
        Ok(Self {
            interval: Interval::from_parts(lo_c, hi_c, kind),
            active_lower: active(&lower, lo),
            active_upper: active(&upper, hi),
            clipped_lower: lo_c != lo,
            clipped_upper: hi_c != hi,
            lower_rows: lower,
            upper_rows: upper,
            rules_fired: Vec::new(),
        })
    }

    pub fn lo(&self) -> T {
        self.interval.lo()
    }

    pub fn hi(&self) -> T {
        self.interval.hi()
    }

    pub fn fired(&self, rule: Rule) -> Option<&FiredRule<T>> {
        self.rules_fired.iter().find(|f| f.rule == rule)
    }

    pub fn rule_names(&self) -> Vec<&'static str> {
        self.rules_fired.iter().map(|f| f.rule.name()).collect()
    }
}
