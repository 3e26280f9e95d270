use serde::{Deserialize, Serialize};

use super::interval::Probability;
use super::joint::ObservedJoint;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Analyst-supplied sensitivity parameters: the smallest and largest
/// outcome probability across confounder levels, per exposure arm.
///
/// `min_x = min_u p(y|x,u)`, `max_x = max_u p(y|x,u)`, and likewise for
/// `x'`. One parameter set serves both benefit and harm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamsWire<T>", into = "ParamsWire<T>", bound = "T: Scalar")]
pub struct SensitivityParams<T: Scalar> {
    min_x: T,
    max_x: T,
    min_xp: T,
    max_xp: T,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsWire<T> {
    m_x: T,
    #[serde(rename = "M_x")]
    big_m_x: T,
    m_xp: T,
    #[serde(rename = "M_xp")]
    big_m_xp: T,
}

/// Names of the four parameters, in `(m_x, M_x, m_x', M_x')` order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Param {
    #[serde(rename = "m_x")]
    MinX,
    #[serde(rename = "M_x")]
    MaxX,
    #[serde(rename = "m_xp")]
    MinXp,
    #[serde(rename = "M_xp")]
    MaxXp,
}

impl Param {
    pub const ALL: [Param; 4] = [Param::MinX, Param::MaxX, Param::MinXp, Param::MaxXp];

    pub fn name(self) -> &'static str {
        match self {
            Param::MinX => "m_x",
            Param::MaxX => "M_x",
            Param::MinXp => "m_xp",
            Param::MaxXp => "M_xp",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == s)
    }

    /// The parameter playing this role once `x` and `x'` are swapped.
    pub fn swapped(self) -> Self {
        match self {
            Param::MinX => Param::MinXp,
            Param::MaxX => Param::MaxXp,
            Param::MinXp => Param::MinX,
            Param::MaxXp => Param::MaxX,
        }
    }
}

impl<T: Scalar> SensitivityParams<T> {
    /// Arguments in `(m_x, M_x, m_x', M_x')` order.
    pub fn new(min_x: T, max_x: T, min_xp: T, max_xp: T) -> Result<Self> {
        for (p, v) in [
            (Param::MinX, min_x),
            (Param::MaxX, max_x),
            (Param::MinXp, min_xp),
            (Param::MaxXp, max_xp),
        ] {
            Probability::named(p.name(), v)?;
        }
        let clamp = |v: T| v.max(T::zero()).min(T::one());
        let (min_x, max_x, min_xp, max_xp) =
            (clamp(min_x), clamp(max_x), clamp(min_xp), clamp(max_xp));
        let tol = T::tol_prob();
        if min_x > max_x + tol {
            return Err(Error::InvalidParams {
                reason: format!("m_x = {min_x} exceeds M_x = {max_x}"),
            });
        }
        if min_xp > max_xp + tol {
            return Err(Error::InvalidParams {
                reason: format!("m_xp = {min_xp} exceeds M_xp = {max_xp}"),
            });
        }
        Ok(Self {
            min_x,
            max_x,
            min_xp,
            max_xp,
        })
    }

    /// `(0, 1, 0, 1)`: no knowledge about the outcome mechanism.
    pub fn vacuous() -> Self {
        Self {
            min_x: T::zero(),
            max_x: T::one(),
            min_xp: T::zero(),
            max_xp: T::one(),
        }
    }

    /// No-confounding reading: every parameter pinned to the observed
    /// conditional of its arm.
    pub fn unconfounded(obs: &ObservedJoint<T>) -> Result<Self> {
        let yx = obs.p_y_given_x()?;
        let yxp = obs.p_y_given_xp()?;
        Self::new(yx, yx, yxp, yxp)
    }

    #[inline]
    pub fn min_x(&self) -> T {
        self.min_x
    }

    #[inline]
    pub fn max_x(&self) -> T {
        self.max_x
    }

    #[inline]
    pub fn min_xp(&self) -> T {
        self.min_xp
    }

    #[inline]
    pub fn max_xp(&self) -> T {
        self.max_xp
    }

    pub fn get(&self, p: Param) -> T {
        match p {
            Param::MinX => self.min_x,
            Param::MaxX => self.max_x,
            Param::MinXp => self.min_xp,
            Param::MaxXp => self.max_xp,
        }
    }

    /// Copy with one parameter replaced, re-validated.
    pub fn with(&self, p: Param, value: T) -> Result<Self> {
        let mut v = [self.min_x, self.max_x, self.min_xp, self.max_xp];
        v[p as usize] = value;
        Self::new(v[0], v[1], v[2], v[3])
    }

    /// Parameters for the relabelled problem `x ↔ x'`.
    pub fn swapped(&self) -> Self {
        Self {
            min_x: self.min_xp,
            max_x: self.max_xp,
            min_xp: self.min_x,
            max_xp: self.max_x,
        }
    }

    /// Check `m_x ≤ p(y|x) ≤ M_x` and `m_x' ≤ p(y|x') ≤ M_x'`.
    ///
    /// The comparison is done multiplied through by the arm's margin, so an
    /// arm with no mass places no constraint on its parameters.
    pub fn check_possible(&self, obs: &ObservedJoint<T>) -> Result<()> {
        let tol = T::tol_prob();
        let arms = [
            (obs.p_x_y(), obs.p_x(), Param::MinX, Param::MaxX, "p(y|x)"),
            (obs.p_xp_y(), obs.p_xp(), Param::MinXp, Param::MaxXp, "p(y|x')"),
        ];
        for (joint, margin, lo, hi, cond) in arms {
            let m = self.get(lo);
            let big_m = self.get(hi);
            if m * margin > joint + tol {
                return Err(Error::ParamsOutsidePossibleRegion {
                    param: lo.name().to_string(),
                    value: m.as_f64(),
                    constraint: format!("{} <= {}", lo.name(), cond),
                });
            }
            if big_m * margin < joint - tol {
                return Err(Error::ParamsOutsidePossibleRegion {
                    param: hi.name().to_string(),
                    value: big_m.as_f64(),
                    constraint: format!("{} <= {}", cond, hi.name()),
                });
            }
        }
        Ok(())
    }
}

impl<T: Scalar> TryFrom<ParamsWire<T>> for SensitivityParams<T> {
    type Error = Error;

    fn try_from(w: ParamsWire<T>) -> Result<Self> {
        Self::new(w.m_x, w.big_m_x, w.m_xp, w.big_m_xp)
    }
}

impl<T: Scalar> From<SensitivityParams<T>> for ParamsWire<T> {
    fn from(p: SensitivityParams<T>) -> Self {
        ParamsWire {
            m_x: p.min_x,
            big_m_x: p.max_x,
            m_xp: p.min_xp,
            big_m_xp: p.max_xp,
        }
    }
}
