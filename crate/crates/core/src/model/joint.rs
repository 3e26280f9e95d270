use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One of the two levels of a binary variable: `x` / `x'`, `y` / `y'`, ...
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Level {
    /// The unprimed level (`x`, `y`, `v`, `u`).
    Base,
    /// The primed level (`x'`, `y'`, `v'`, `u'`).
    Prime,
}

impl Level {
    pub const BOTH: [Level; 2] = [Level::Base, Level::Prime];

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Level::Base => 0,
            Level::Prime => 1,
        }
    }

    #[inline]
    pub fn flip(self) -> Self {
        match self {
            Level::Base => Level::Prime,
            Level::Prime => Level::Base,
        }
    }
}

fn validate_cells<T: Scalar, const N: usize>(named: [(&str, T); N]) -> Result<[T; N]> {
    let tol = T::tol_prob();
    for (field, v) in named {
        if v.is_nan() || v < -tol {
            return Err(Error::NegativeCell {
                field: field.to_string(),
                value: v.as_f64(),
            });
        }
    }
    for (field, v) in named {
        if v > T::one() + tol {
            return Err(Error::InvalidProbability {
                field: field.to_string(),
                value: v.as_f64(),
            });
        }
    }
    let sum: T = named.iter().map(|(_, v)| *v).sum();
    if (sum - T::one()).abs() > tol {
        return Err(Error::NotNormalized { sum: sum.as_f64() });
    }
    Ok(named.map(|(_, v)| v.max(T::zero()).min(T::one())))
}

fn conditional<T: Scalar>(num: T, den: T, margin: &str) -> Result<T> {
    if den < T::tol_prob() {
        return Err(Error::DegenerateMargin {
            margin: margin.to_string(),
            value: den.as_f64(),
        });
    }
    Ok((num / den).min(T::one()))
}

/// Population joint distribution of binary exposure `X` and outcome `Y`.
///
/// Cells are never renormalized; conditionals are computed on demand and
/// fail with `DegenerateMargin` when the conditioning event has no mass.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ObservedCells", into = "ObservedCells", bound = "T: Scalar")]
pub struct ObservedJoint<T: Scalar> {
    // [x][y], index 0 = unprimed level
    cells: [[T; 2]; 2],
}

/// Wire format of [`ObservedJoint`]; a trailing `_` marks the primed level.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservedCells {
    pub pxy: f64,
    pub pxy_: f64,
    pub px_y: f64,
    pub px_y_: f64,
}

impl<T: Scalar> ObservedJoint<T> {
    /// Cells in the order `p(x,y), p(x,y'), p(x',y), p(x',y')`.
    pub fn new(p_x_y: T, p_x_yp: T, p_xp_y: T, p_xp_yp: T) -> Result<Self> {
        let [a, b, c, d] = validate_cells([
            ("pxy", p_x_y),
            ("pxy_", p_x_yp),
            ("px_y", p_xp_y),
            ("px_y_", p_xp_yp),
        ])?;
        Ok(Self {
            cells: [[a, b], [c, d]],
        })
    }

    pub fn from_array(cells: [T; 4]) -> Result<Self> {
        Self::new(cells[0], cells[1], cells[2], cells[3])
    }

    /// `p(X = x, Y = y)` for the given levels.
    #[inline]
    pub fn cell(&self, x: Level, y: Level) -> T {
        self.cells[x.index()][y.index()]
    }

    #[inline]
    pub fn p_x_y(&self) -> T {
        self.cells[0][0]
    }

    #[inline]
    pub fn p_x_yp(&self) -> T {
        self.cells[0][1]
    }

    #[inline]
    pub fn p_xp_y(&self) -> T {
        self.cells[1][0]
    }

    #[inline]
    pub fn p_xp_yp(&self) -> T {
        self.cells[1][1]
    }

    pub fn p_x(&self) -> T {
        self.cells[0][0] + self.cells[0][1]
    }

    pub fn p_xp(&self) -> T {
        self.cells[1][0] + self.cells[1][1]
    }

    pub fn p_y(&self) -> T {
        self.cells[0][0] + self.cells[1][0]
    }

    pub fn p_y_given_x(&self) -> Result<T> {
        conditional(self.p_x_y(), self.p_x(), "p(x)")
    }

    pub fn p_y_given_xp(&self) -> Result<T> {
        conditional(self.p_xp_y(), self.p_xp(), "p(x')")
    }

    pub fn p_yp_given_x(&self) -> Result<T> {
        conditional(self.p_x_yp(), self.p_x(), "p(x)")
    }

    pub fn p_yp_given_xp(&self) -> Result<T> {
        conditional(self.p_xp_yp(), self.p_xp(), "p(x')")
    }

    /// The same distribution with the exposure levels relabelled `x ↔ x'`.
    pub fn swapped(&self) -> Self {
        Self {
            cells: [self.cells[1], self.cells[0]],
        }
    }

    pub fn to_cells(&self) -> ObservedCells {
        ObservedCells {
            pxy: self.p_x_y().as_f64(),
            pxy_: self.p_x_yp().as_f64(),
            px_y: self.p_xp_y().as_f64(),
            px_y_: self.p_xp_yp().as_f64(),
        }
    }
}

impl<T: Scalar> TryFrom<ObservedCells> for ObservedJoint<T> {
    type Error = Error;

    fn try_from(c: ObservedCells) -> Result<Self> {
        Self::new(T::lit(c.pxy), T::lit(c.pxy_), T::lit(c.px_y), T::lit(c.px_y_))
    }
}

impl<T: Scalar> From<ObservedJoint<T>> for ObservedCells {
    fn from(j: ObservedJoint<T>) -> Self {
        j.to_cells()
    }
}

/// Population joint distribution of binary `X`, `Y` and a binary proxy `V`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProxyCells", into = "ProxyCells", bound = "T: Scalar")]
pub struct ProxyJoint<T: Scalar> {
    // [x][y][v]
    cells: [[[T; 2]; 2]; 2],
}

/// Wire format of [`ProxyJoint`]: `p` followed by the `x`, `y`, `v` levels,
/// each marked with `_` when primed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProxyCells {
    pub pxyv: f64,
    pub pxyv_: f64,
    pub pxy_v: f64,
    pub pxy_v_: f64,
    pub px_yv: f64,
    pub px_yv_: f64,
    pub px_y_v: f64,
    pub px_y_v_: f64,
}

impl<T: Scalar> ProxyJoint<T> {
    /// Cells indexed `[x][y][v]`, index 0 the unprimed level.
    pub fn new(cells: [[[T; 2]; 2]; 2]) -> Result<Self> {
        let c = &cells;
        let flat = validate_cells([
            ("pxyv", c[0][0][0]),
            ("pxyv_", c[0][0][1]),
            ("pxy_v", c[0][1][0]),
            ("pxy_v_", c[0][1][1]),
            ("px_yv", c[1][0][0]),
            ("px_yv_", c[1][0][1]),
            ("px_y_v", c[1][1][0]),
            ("px_y_v_", c[1][1][1]),
        ])?;
        let mut out = [[[T::zero(); 2]; 2]; 2];
        for (i, v) in flat.into_iter().enumerate() {
            out[i >> 2][(i >> 1) & 1][i & 1] = v;
        }
        Ok(Self { cells: out })
    }

    /// Assemble the joint from `p(v)`, `p(x|v)` (indexed by v level) and
    /// `p(y|x,v)` (indexed `[x][v]`).
    pub fn from_conditionals(
        p_v: T,
        p_x_given_v: [T; 2],
        p_y_given_x_v: [[T; 2]; 2],
    ) -> Result<Self> {
        let pv = [p_v, T::one() - p_v];
        let mut cells = [[[T::zero(); 2]; 2]; 2];
        for x in Level::BOTH {
            for y in Level::BOTH {
                for v in Level::BOTH {
                    let (xi, yi, vi) = (x.index(), y.index(), v.index());
                    let px = match x {
                        Level::Base => p_x_given_v[vi],
                        Level::Prime => T::one() - p_x_given_v[vi],
                    };
                    let py = match y {
                        Level::Base => p_y_given_x_v[xi][vi],
                        Level::Prime => T::one() - p_y_given_x_v[xi][vi],
                    };
                    cells[xi][yi][vi] = pv[vi] * px * py;
                }
            }
        }
        Self::new(cells)
    }

    #[inline]
    pub fn cell(&self, x: Level, y: Level, v: Level) -> T {
        self.cells[x.index()][y.index()][v.index()]
    }

    /// Marginalize `V` out.
    pub fn observed(&self) -> ObservedJoint<T> {
        let m = |x: usize, y: usize| self.cells[x][y][0] + self.cells[x][y][1];
        ObservedJoint {
            cells: [[m(0, 0), m(0, 1)], [m(1, 0), m(1, 1)]],
        }
    }

    pub fn p_v(&self, v: Level) -> T {
        let vi = v.index();
        let mut s = T::zero();
        for x in 0..2 {
            for y in 0..2 {
                s = s + self.cells[x][y][vi];
            }
        }
        s
    }

    pub fn p_x_v(&self, x: Level, v: Level) -> T {
        self.cells[x.index()][0][v.index()] + self.cells[x.index()][1][v.index()]
    }

    /// `p(x | v)` for the unprimed exposure level `x`.
    pub fn p_x_given_v(&self, v: Level) -> Result<T> {
        let label = match v {
            Level::Base => "p(v)",
            Level::Prime => "p(v')",
        };
        conditional(self.p_x_v(Level::Base, v), self.p_v(v), label)
    }

    /// `p(y | x, v)` for the unprimed outcome level `y`.
    pub fn p_y_given_x_v(&self, x: Level, v: Level) -> Result<T> {
        let label = match (x, v) {
            (Level::Base, Level::Base) => "p(x,v)",
            (Level::Base, Level::Prime) => "p(x,v')",
            (Level::Prime, Level::Base) => "p(x',v)",
            (Level::Prime, Level::Prime) => "p(x',v')",
        };
        conditional(
            self.cells[x.index()][0][v.index()],
            self.p_x_v(x, v),
            label,
        )
    }

    /// The same distribution with exposure levels relabelled `x ↔ x'`.
    pub fn swapped(&self) -> Self {
        Self {
            cells: [self.cells[1], self.cells[0]],
        }
    }

    pub fn to_cells(&self) -> ProxyCells {
        let c = |x: usize, y: usize, v: usize| self.cells[x][y][v].as_f64();
        ProxyCells {
            pxyv: c(0, 0, 0),
            pxyv_: c(0, 0, 1),
            pxy_v: c(0, 1, 0),
            pxy_v_: c(0, 1, 1),
            px_yv: c(1, 0, 0),
            px_yv_: c(1, 0, 1),
            px_y_v: c(1, 1, 0),
            px_y_v_: c(1, 1, 1),
        }
    }
}

impl<T: Scalar> TryFrom<ProxyCells> for ProxyJoint<T> {
    type Error = Error;

    fn try_from(c: ProxyCells) -> Result<Self> {
        let l = T::lit;
        Self::new([
            [[l(c.pxyv), l(c.pxyv_)], [l(c.pxy_v), l(c.pxy_v_)]],
            [[l(c.px_yv), l(c.px_yv_)], [l(c.px_y_v), l(c.px_y_v_)]],
        ])
    }
}

impl<T: Scalar> From<ProxyJoint<T>> for ProxyCells {
    fn from(j: ProxyJoint<T>) -> Self {
        j.to_cells()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn worked_example_conditionals() {
        let obs = ObservedJoint::<f64>::new(0.108, 0.132, 0.084, 0.676).unwrap();
        assert!(close(obs.p_y_given_x().unwrap(), 0.45, 1e-12));
        assert!(close(obs.p_y_given_xp().unwrap(), 0.084 / 0.76, 1e-12));
        assert!(close(obs.p_y_given_xp().unwrap(), 0.1105, 1e-4));
    }

    #[test]
    fn uniform_joint() {
        let obs = ObservedJoint::<f64>::new(0.25, 0.25, 0.25, 0.25).unwrap();
        assert_eq!(obs.p_y_given_x().unwrap(), 0.5);
        assert_eq!(obs.p_y_given_xp().unwrap(), 0.5);
    }

    #[test]
    fn negative_cell_rejected_before_normalization() {
        let err = ObservedJoint::<f64>::new(0.5, 0.6, 0.0, -0.1).unwrap_err();
        assert_eq!(err.code(), "NegativeCell");
        assert!(err.to_string().contains("px_y_"));
    }

    #[test]
    fn no_silent_renormalization() {
        let err = ObservedJoint::<f64>::new(0.3, 0.3, 0.3, 0.3).unwrap_err();
        assert_eq!(err.code(), "NotNormalized");
        assert!(ObservedJoint::<f64>::new(0.25, 0.25, 0.25, 0.25 + 5e-10).is_ok());
    }

    #[test]
    fn degenerate_margin_is_lazy() {
        let obs = ObservedJoint::<f64>::new(0.0, 0.0, 0.4, 0.6).unwrap();
        assert_eq!(obs.p_y_given_xp().unwrap(), 0.4);
        let err = obs.p_y_given_x().unwrap_err();
        assert_eq!(err.code(), "DegenerateMargin");
    }

    #[test]
    fn swap_relabels_exposure() {
        let obs = ObservedJoint::<f64>::new(0.1, 0.2, 0.3, 0.4).unwrap();
        let s = obs.swapped();
        assert_eq!(s.p_x_y(), 0.3);
        assert_eq!(s.p_x_yp(), 0.4);
        assert_eq!(s.p_xp_y(), 0.1);
        assert_eq!(s.swapped(), obs);
    }

    #[test]
    fn json_rejects_unknown_fields() {
        let ok: ObservedJoint<f64> =
            serde_json::from_str(r#"{"pxy":0.108,"pxy_":0.132,"px_y":0.084,"px_y_":0.676}"#)
                .unwrap();
        assert_eq!(ok.p_x_y(), 0.108);
        let bad = serde_json::from_str::<ObservedJoint<f64>>(
            r#"{"pxy":0.108,"pxy_":0.132,"px_y":0.084,"px_y_":0.676,"extra":1}"#,
        );
        assert!(bad.is_err());
        let unnormalized = serde_json::from_str::<ObservedJoint<f64>>(
            r#"{"pxy":0.5,"pxy_":0.132,"px_y":0.084,"px_y_":0.676}"#,
        )
        .unwrap_err();
        assert!(unnormalized.to_string().contains("NotNormalized"));
    }

    #[test]
    fn proxy_collapse_and_conditionals() {
        let pj = ProxyJoint::<f64>::from_conditionals(
            0.75,
            [0.22, 0.31],
            [[0.42, 0.51], [0.1, 0.13]],
        )
        .unwrap();
        assert!(close(pj.p_v(Level::Base), 0.75, 1e-15));
        assert!(close(pj.p_x_given_v(Level::Prime).unwrap(), 0.31, 1e-12));
        assert!(close(
            pj.p_y_given_x_v(Level::Prime, Level::Prime).unwrap(),
            0.13,
            1e-12
        ));
        let obs = pj.observed();
        let direct = 0.42 * 0.22 * 0.75 + 0.51 * 0.31 * 0.25;
        assert!(close(obs.p_x_y(), direct, 1e-15));
        let swapped = pj.swapped();
        assert_eq!(swapped.observed(), obs.swapped());
    }

    #[test]
    fn proxy_json_round_trip() {
        let pj = ProxyJoint::<f64>::from_conditionals(0.6, [0.3, 0.5], [[0.2, 0.7], [0.4, 0.1]])
            .unwrap();
        let s = serde_json::to_string(&pj).unwrap();
        assert!(s.contains("\"px_y_v_\""));
        let back: ProxyJoint<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, pj);
    }
}
