use serde::{Deserialize, Serialize};

use super::interval::{Interval, Probability};
use super::joint::{Level, ObservedJoint, ProxyJoint};
use super::params::SensitivityParams;
use crate::bounds::{tian_pearl, Target};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Structural model over binary `U`, `X`, `Y` and an optional binary proxy
/// `V` of `U`, with graph `U → X → Y`, `U → Y`, `U → V`.
///
/// Used as the ground-truth oracle: its interventional quantities are what
/// every bound must contain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScmSpec", into = "ScmSpec", bound = "T: Scalar")]
pub struct Scm<T: Scalar> {
    p_u: Probability<T>,
    // indexed by u level
    p_x_given_u: [Probability<T>; 2],
    // [x][u]
    p_y_given: [[Probability<T>; 2]; 2],
    p_v_given_u: Option<[Probability<T>; 2]>,
}

/// Wire format of [`Scm`]. Suffix `2` marks the primed confounder level
/// `u'`, `xp` the primed exposure level `x'`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScmSpec {
    pub p_u: f64,
    pub p_x_given_u: f64,
    pub p_x_given_u2: f64,
    pub p_y_given_x_u: f64,
    pub p_y_given_x_u2: f64,
    pub p_y_given_xp_u: f64,
    pub p_y_given_xp_u2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_v_given_u: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_v_given_u2: Option<f64>,
}

/// Interventional ground truth of an [`Scm`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScmTruth<T: Scalar> {
    pub p_yx: Probability<T>,
    pub p_yxp: Probability<T>,
    pub ate: T,
    pub tp_benefit: Interval<T>,
    pub tp_harm: Interval<T>,
    pub true_params: SensitivityParams<T>,
}

impl<T: Scalar> Scm<T> {
    /// `p_x_given_u` is indexed by `u` level, `p_y_given` by `[x][u]`.
    pub fn new(p_u: T, p_x_given_u: [T; 2], p_y_given: [[T; 2]; 2]) -> Result<Self> {
        let p = Probability::named;
        Ok(Self {
            p_u: p("p_u", p_u)?,
            p_x_given_u: [
                p("p_x_given_u", p_x_given_u[0])?,
                p("p_x_given_u2", p_x_given_u[1])?,
            ],
            p_y_given: [
                [
                    p("p_y_given_x_u", p_y_given[0][0])?,
                    p("p_y_given_x_u2", p_y_given[0][1])?,
                ],
                [
                    p("p_y_given_xp_u", p_y_given[1][0])?,
                    p("p_y_given_xp_u2", p_y_given[1][1])?,
                ],
            ],
            p_v_given_u: None,
        })
    }

    /// Attach a nondifferential proxy with `p(v|u)` and `p(v|u')`.
    pub fn with_proxy(mut self, p_v_given_u: T, p_v_given_u2: T) -> Result<Self> {
        self.p_v_given_u = Some([
            Probability::named("p_v_given_u", p_v_given_u)?,
            Probability::named("p_v_given_u2", p_v_given_u2)?,
        ]);
        Ok(self)
    }

    pub fn p_u(&self, u: Level) -> T {
        match u {
            Level::Base => self.p_u.get(),
            Level::Prime => T::one() - self.p_u.get(),
        }
    }

    /// `p(x|u)` for the exposure level `x`.
    pub fn p_x_given_u(&self, x: Level, u: Level) -> T {
        let p = self.p_x_given_u[u.index()].get();
        match x {
            Level::Base => p,
            Level::Prime => T::one() - p,
        }
    }

    /// `p(y|x,u)` for the unprimed outcome `y`.
    pub fn p_y_given_x_u(&self, x: Level, u: Level) -> T {
        self.p_y_given[x.index()][u.index()].get()
    }

    /// `p(v|u)` for the proxy level `v`, when a proxy is attached.
    pub fn p_v_given_u(&self, v: Level, u: Level) -> Option<T> {
        self.p_v_given_u.map(|pv| {
            let p = pv[u.index()].get();
            match v {
                Level::Base => p,
                Level::Prime => T::one() - p,
            }
        })
    }

    pub fn has_proxy(&self) -> bool {
        self.p_v_given_u.is_some()
    }

    /// Proxy relevance flag: `|p(v|u) - p(v|u')| > tol_prob`.
    pub fn proxy_relevant(&self) -> Option<bool> {
        self.p_v_given_u
            .map(|pv| (pv[0].get() - pv[1].get()).abs() > T::tol_prob())
    }

    fn p_y_level(&self, x: Level, y: Level, u: Level) -> T {
        let p = self.p_y_given_x_u(x, u);
        match y {
            Level::Base => p,
            Level::Prime => T::one() - p,
        }
    }

    /// Observed `p(X, Y)` by summing `p(y|x,u) p(x|u) p(u)` over `u`.
    pub fn forward(&self) -> ObservedJoint<T> {
        let cell = |x: Level, y: Level| -> T {
            Level::BOTH
                .iter()
                .map(|&u| self.p_y_level(x, y, u) * self.p_x_given_u(x, u) * self.p_u(u))
                .sum()
        };
        ObservedJoint::new(
            cell(Level::Base, Level::Base),
            cell(Level::Base, Level::Prime),
            cell(Level::Prime, Level::Base),
            cell(Level::Prime, Level::Prime),
        )
        .expect("forward marginalization of a valid model is normalized")
    }

    /// Observed `p(X, Y, V)`, with `V ⫫ X, Y | U`. `None` without a proxy.
    pub fn forward_proxy(&self) -> Option<ProxyJoint<T>> {
        self.p_v_given_u?;
        let mut cells = [[[T::zero(); 2]; 2]; 2];
        for x in Level::BOTH {
            for y in Level::BOTH {
                for v in Level::BOTH {
                    cells[x.index()][y.index()][v.index()] = Level::BOTH
                        .iter()
                        .map(|&u| {
                            self.p_y_level(x, y, u)
                                * self.p_x_given_u(x, u)
                                * self.p_v_given_u(v, u).unwrap_or_else(T::zero)
                                * self.p_u(u)
                        })
                        .sum();
                }
            }
        }
        Some(
            ProxyJoint::new(cells)
                .expect("forward marginalization of a valid model is normalized"),
        )
    }

    /// `p(y_x) = Σ_u p(y|x,u) p(u)` for the exposure level `x`.
    pub fn p_y_do(&self, x: Level) -> T {
        Level::BOTH
            .iter()
            .map(|&u| self.p_y_given_x_u(x, u) * self.p_u(u))
            .sum()
    }

    /// The sensitivity parameters this model actually has.
    pub fn true_params(&self) -> SensitivityParams<T> {
        let arm = |x: Level| {
            let a = self.p_y_given_x_u(x, Level::Base);
            let b = self.p_y_given_x_u(x, Level::Prime);
            (a.min(b), a.max(b))
        };
        let (min_x, max_x) = arm(Level::Base);
        let (min_xp, max_xp) = arm(Level::Prime);
        SensitivityParams::new(min_x, max_x, min_xp, max_xp)
            .expect("min and max of valid probabilities are ordered")
    }

    /// Interventional quantities and the sharp bounds they imply.
    pub fn truth(&self) -> ScmTruth<T> {
        let p_yx = Probability::new(self.p_y_do(Level::Base)).expect("mixture of probabilities");
        let p_yxp =
            Probability::new(self.p_y_do(Level::Prime)).expect("mixture of probabilities");
        let obs = self.forward();
        let (px, pxp) = (Interval::point(p_yx), Interval::point(p_yxp));
        let tp_benefit = tian_pearl(&obs, &px, &pxp, Target::Benefit)
            .expect("interventional truths are consistent with their own observed joint")
            .interval;
        let tp_harm = tian_pearl(&obs, &px, &pxp, Target::Harm)
            .expect("interventional truths are consistent with their own observed joint")
            .interval;
        ScmTruth {
            p_yx,
            p_yxp,
            ate: p_yx.get() - p_yxp.get(),
            tp_benefit,
            tp_harm,
            true_params: self.true_params(),
        }
    }

    pub fn to_spec(&self) -> ScmSpec {
        let f = |p: Probability<T>| p.get().as_f64();
        ScmSpec {
            p_u: f(self.p_u),
            p_x_given_u: f(self.p_x_given_u[0]),
            p_x_given_u2: f(self.p_x_given_u[1]),
            p_y_given_x_u: f(self.p_y_given[0][0]),
            p_y_given_x_u2: f(self.p_y_given[0][1]),
            p_y_given_xp_u: f(self.p_y_given[1][0]),
            p_y_given_xp_u2: f(self.p_y_given[1][1]),
            p_v_given_u: self.p_v_given_u.map(|p| f(p[0])),
            p_v_given_u2: self.p_v_given_u.map(|p| f(p[1])),
        }
    }
}

impl<T: Scalar> TryFrom<ScmSpec> for Scm<T> {
    type Error = Error;

    fn try_from(s: ScmSpec) -> Result<Self> {
        let l = T::lit;
        let scm = Scm::new(
            l(s.p_u),
            [l(s.p_x_given_u), l(s.p_x_given_u2)],
            [
                [l(s.p_y_given_x_u), l(s.p_y_given_x_u2)],
                [l(s.p_y_given_xp_u), l(s.p_y_given_xp_u2)],
            ],
        )?;
        match (s.p_v_given_u, s.p_v_given_u2) {
            (Some(a), Some(b)) => scm.with_proxy(l(a), l(b)),
            (None, None) => Ok(scm),
            _ => Err(Error::InvalidParams {
                reason: "p_v_given_u and p_v_given_u2 must be given together".to_string(),
            }),
        }
    }
}

impl<T: Scalar> From<Scm<T>> for ScmSpec {
    fn from(s: Scm<T>) -> Self {
        s.to_spec()
    }
}
