//! Distributions, structural models, intervals and sensitivity parameters.

mod interval;
mod joint;
mod params;
mod result;
mod scm;

pub use interval::{Interval, IntervalKind, Probability};
pub use joint::{Level, ObservedCells, ObservedJoint, ProxyCells, ProxyJoint};
pub use params::{Param, SensitivityParams};
pub use result::{BoundResult, FiredRule, Row, Rule};
pub use scm::{Scm, ScmSpec, ScmTruth};
