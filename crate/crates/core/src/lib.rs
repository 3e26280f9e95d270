//! Bounds on the probabilities of benefit and harm (and the ATE) under
//! unmeasured confounding.
//!
//! The crate covers four layers:
//!
//! * [`bounds`]: closed-form observational, counterfactual and
//!   sensitivity-parameter bounds, plus necessity/sufficiency bounds;
//! * [`proxy`]: tighter observational bounds from a binary proxy of the
//!   confounder, with testable monotonicity dispatch;
//! * [`decision`]: the social-good interval and the ATE compliance region;
//! * [`study`]: parameter sweeps and the seeded simulation study.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the `*F64`
//! aliases below fix the common case.

pub mod bounds;
pub mod decision;
pub mod error;
pub mod model;
pub mod proxy;
pub mod scalar;
pub mod study;

pub use bounds::Target;
pub use error::{Error, Result};
pub use model::{
    BoundResult, Interval, IntervalKind, Level, ObservedJoint, Param, Probability, ProxyJoint,
    Rule, Scm, ScmTruth, SensitivityParams,
};
pub use scalar::Scalar;

pub type ProbabilityF64 = Probability<f64>;
pub type IntervalF64 = Interval<f64>;
pub type ObservedJointF64 = ObservedJoint<f64>;
pub type ProxyJointF64 = ProxyJoint<f64>;
pub type ScmF64 = Scm<f64>;
pub type SensitivityParamsF64 = SensitivityParams<f64>;
pub type BoundResultF64 = BoundResult<f64>;

pub type ProbabilityF32 = Probability<f32>;
pub type IntervalF32 = Interval<f32>;
pub type ObservedJointF32 = ObservedJoint<f32>;
pub type ProxyJointF32 = ProxyJoint<f32>;
pub type ScmF32 = Scm<f32>;
pub type SensitivityParamsF32 = SensitivityParams<f32>;
pub type BoundResultF32 = BoundResult<f32>;
