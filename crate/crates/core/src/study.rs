//! Parameter sweeps over the sensitivity parameters and the seeded
//! simulation study of the condition-free proxy bounds.
//!
//! Both are embarrassingly parallel. Results are collected in index order
//! and every replicate draws from its own ChaCha stream keyed by
//! `(seed, index)`, so serial and parallel runs agree bit for bit.

use std::collections::BTreeMap;

use rand::distr::{Distribution, Open01};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Beta;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    ate_sensitivity_bounds, informative_regions, obs_bounds, sensitivity_bounds, Target,
};
use crate::error::{Error, Result};
use crate::model::{ObservedJoint, Param, Scm, SensitivityParams};
use crate::proxy::condition_free_bounds;
use crate::scalar::Scalar;

/// Quantity a sweep evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepTarget {
    Benefit,
    Harm,
    Ate,
}

impl SweepTarget {
    pub fn name(self) -> &'static str {
        match self {
            SweepTarget::Benefit => "benefit",
            SweepTarget::Harm => "harm",
            SweepTarget::Ate => "ate",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Lower,
    Upper,
}

/// A 2-D grid over two sensitivity parameters, the other two held fixed.
///
/// Parameters not named in `fixed` default to their vacuous values
/// (`0` for a minimum, `1` for a maximum).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Scalar")]
pub struct SweepSpec<T: Scalar> {
    pub target: SweepTarget,
    pub side: Side,
    pub axes: [Param; 2],
    #[serde(default)]
    pub fixed: BTreeMap<Param, T>,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
}

pub const DEFAULT_RESOLUTION: usize = 101;

fn default_resolution() -> usize {
    DEFAULT_RESOLUTION
}

impl<T: Scalar> SweepSpec<T> {
    pub fn new(target: SweepTarget, side: Side, axes: [Param; 2], resolution: usize) -> Self {
        Self {
            target,
            side,
            axes,
            fixed: BTreeMap::new(),
            resolution,
        }
    }

    pub fn with_fixed(mut self, param: Param, value: T) -> Self {
        self.fixed.insert(param, value);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes[0] == self.axes[1] {
            return Err(Error::InvalidParams {
                reason: format!("sweep axes must differ, both are {}", self.axes[0].name()),
            });
        }
        if self.resolution < 2 {
            return Err(Error::InvalidParams {
                reason: format!("resolution must be at least 2, got {}", self.resolution),
            });
        }
        Ok(())
    }

    /// Grid coordinate `i / (resolution - 1)`.
    pub fn coord(&self, i: usize) -> T {
        T::lit(i as f64 / (self.resolution - 1) as f64)
    }

    fn base_value(&self, p: Param) -> T {
        self.fixed.get(&p).copied().unwrap_or(match p {
            Param::MinX | Param::MinXp => T::zero(),
            Param::MaxX | Param::MaxXp => T::one(),
        })
    }
}

/// One grid cell. `value` is `None` outside the possible region or where
/// a minimum exceeds its maximum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepCell<T: Scalar> {
    pub axis1: T,
    pub axis2: T,
    pub value: Option<T>,
}

impl<T: Scalar> SweepCell<T> {
    pub fn valid(&self) -> bool {
        self.value.is_some()
    }
}

/// Where a threshold line sits on one axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdKind {
    /// Edge of the possible region.
    Possible,
    /// Edge of the informative region of the swept bound.
    Informative,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThresholdLine<T: Scalar> {
    pub param: Param,
    pub value: T,
    pub kind: ThresholdKind,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepGrid<T: Scalar> {
    pub spec: SweepSpec<T>,
    /// Row-major: `axis1` outer, `axis2` inner.
    pub cells: Vec<SweepCell<T>>,
    pub thresholds: Vec<ThresholdLine<T>>,
}

impl<T: Scalar> SweepGrid<T> {
    pub fn cell(&self, i: usize, j: usize) -> &SweepCell<T> {
        &self.cells[i * self.spec.resolution + j]
    }
}

fn cell_value<T: Scalar>(obs: &ObservedJoint<T>, spec: &SweepSpec<T>, a: T, b: T) -> Option<T> {
    let mut v = Param::ALL.map(|p| spec.base_value(p));
    v[spec.axes[0] as usize] = a;
    v[spec.axes[1] as usize] = b;
    let sp = SensitivityParams::new(v[0], v[1], v[2], v[3]).ok()?;
    let interval = match spec.target {
        SweepTarget::Benefit => sensitivity_bounds(obs, &sp, Target::Benefit).ok()?.interval,
        SweepTarget::Harm => sensitivity_bounds(obs, &sp, Target::Harm).ok()?.interval,
        SweepTarget::Ate => ate_sensitivity_bounds(obs, &sp).ok()?,
    };
    Some(match spec.side {
        Side::Lower => interval.lo(),
        Side::Upper => interval.hi(),
    })
}

fn thresholds<T: Scalar>(obs: &ObservedJoint<T>, spec: &SweepSpec<T>) -> Vec<ThresholdLine<T>> {
    let mut out: Vec<ThresholdLine<T>> = Vec::new();
    let mut push = |param: Param, value: T, kind: ThresholdKind| {
        if !out.iter().any(|l| l.param == param && l.value == value) {
            out.push(ThresholdLine { param, value, kind });
        }
    };
    for &axis in &spec.axes {
        let arm = match axis {
            Param::MinX | Param::MaxX => obs.p_y_given_x(),
            Param::MinXp | Param::MaxXp => obs.p_y_given_xp(),
        };
        if let Ok(v) = arm {
            push(axis, v, ThresholdKind::Possible);
        }
    }
    let target = match spec.target {
        SweepTarget::Benefit => Target::Benefit,
        SweepTarget::Harm => Target::Harm,
        SweepTarget::Ate => return out,
    };
    if spec.side == Side::Lower {
        if let Ok(regions) = informative_regions(obs, target) {
            for r in regions.lower.ranges {
                if spec.axes.contains(&r.param) {
                    push(r.param, r.lo, ThresholdKind::Informative);
                    push(r.param, r.hi, ThresholdKind::Informative);
                }
            }
        }
    }
    out
}

/// Evaluate the swept bound on every grid cell.
pub fn sweep<T: Scalar>(obs: &ObservedJoint<T>, spec: &SweepSpec<T>) -> Result<SweepGrid<T>> {
    spec.validate()?;
    let r = spec.resolution;
    let cells = (0..r * r)
        .into_par_iter()
        .map(|k| {
            let (a, b) = (spec.coord(k / r), spec.coord(k % r));
            SweepCell {
                axis1: a,
                axis2: b,
                value: cell_value(obs, spec, a, b),
            }
        })
        .collect();
    Ok(SweepGrid {
        spec: spec.clone(),
        cells,
        thresholds: thresholds(obs, spec),
    })
}

/// Law the simulation draws every SCM probability from, independently.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SamplerSpec {
    /// Uniform on the open interval `(0, 1)`.
    #[default]
    Uniform,
    Beta { alpha: f64, beta: f64 },
}

/// Strict margin for the usefulness test `a < c or d < b`.
pub const USEFUL_MARGIN: f64 = 1e-12;

impl SamplerSpec {
    pub fn validate(&self) -> Result<()> {
        if let SamplerSpec::Beta { alpha, beta } = *self {
            Beta::new(alpha, beta).map_err(|e| Error::InvalidParams {
                reason: format!("beta sampler: {e}"),
            })?;
        }
        Ok(())
    }

    /// The SCM (with proxy) of replicate `index` under `seed`.
    pub fn draw<T: Scalar>(&self, seed: u64, index: u64) -> Scm<T> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let mut p = [0.0f64; 9];
        match *self {
            SamplerSpec::Uniform => p.iter_mut().for_each(|v| *v = Open01.sample(&mut rng)),
            SamplerSpec::Beta { alpha, beta } => {
                let d = Beta::new(alpha, beta).expect("validated beta parameters");
                // keep away from the endpoints so every margin is positive
                let eps = 1e-12;
                p.iter_mut()
                    .for_each(|v| *v = d.sample(&mut rng).clamp(eps, 1.0 - eps));
            }
        }
        let t = p.map(T::lit);
        Scm::new(t[0], [t[1], t[2]], [[t[3], t[4]], [t[5], t[6]]])
            .and_then(|s| s.with_proxy(t[7], t[8]))
            .expect("sampled probabilities lie in (0, 1)")
    }
}

/// Outcome of one replicate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SimRecord<T: Scalar> {
    /// Observational envelope `[a, b]`.
    pub a: T,
    pub b: T,
    /// Condition-free proxy interval `[c, d]`.
    pub c: T,
    pub d: T,
    pub useful: bool,
    /// `[c, d]` fails to contain the oracle interval.
    pub violation: bool,
}

impl<T: Scalar> SimRecord<T> {
    pub fn gap_decrease(&self) -> T {
        self.b - self.a - (self.d - self.c)
    }

    pub fn lower_increase(&self) -> T {
        self.c - self.a
    }

    pub fn upper_decrease(&self) -> T {
        self.b - self.d
    }
}

/// Summary of a simulation run. Averages are taken over the replicates
/// where the proxy bounds are useful; maxima over all replicates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimResult<T: Scalar> {
    pub n: usize,
    pub seed: u64,
    pub sampler: SamplerSpec,
    pub useful_count: usize,
    pub usefulness_rate: T,
    pub avg_gap_decrease: T,
    pub max_gap_decrease: T,
    pub avg_lower_bound_increase: T,
    pub max_lower_bound_increase: T,
    pub avg_upper_bound_decrease: T,
    pub max_upper_bound_decrease: T,
    /// Replicates whose proxy interval misses the oracle interval.
    pub soundness_violations: usize,
    /// Replicates the proxy analysis rejected (degenerate strata).
    pub skipped: usize,
    #[serde(skip)]
    pub records: Vec<SimRecord<T>>,
}

fn replicate<T: Scalar>(scm: &Scm<T>) -> Option<SimRecord<T>> {
    let obs = scm.forward();
    let pj = scm.forward_proxy()?;
    let env = obs_bounds(&obs, Target::Benefit).interval;
    let cf = condition_free_bounds(&pj, T::tol_exact(), Target::Benefit).ok()?;
    let (a, b, c, d) = (env.lo(), env.hi(), cf.lo(), cf.hi());
    let margin = T::lit(USEFUL_MARGIN);
    let truth = scm.truth().tp_benefit;
    let (lo, hi) = (truth.lo().max(a), truth.hi().min(b));
    let tol = T::tol_prob();
    Some(SimRecord {
        a,
        b,
        c,
        d,
        useful: a + margin < c || d + margin < b,
        violation: c > lo + tol || hi > d + tol,
    })
}

/// Run `n` seeded replicates. Deterministic in `(n, seed, sampler)`
/// regardless of thread count.
pub fn simulate<T: Scalar>(n: usize, seed: u64, sampler: SamplerSpec) -> Result<SimResult<T>> {
    if n == 0 {
        return Err(Error::InvalidParams {
            reason: "simulation needs at least one replicate".to_string(),
        });
    }
    sampler.validate()?;
    let outcomes: Vec<Option<SimRecord<T>>> = (0..n as u64)
        .into_par_iter()
        .map(|i| replicate(&sampler.draw::<T>(seed, i)))
        .collect();
    Ok(summarize(n, seed, sampler, outcomes))
}

/// Aggregate per-replicate outcomes in index order.
pub fn summarize<T: Scalar>(
    n: usize,
    seed: u64,
    sampler: SamplerSpec,
    outcomes: Vec<Option<SimRecord<T>>>,
) -> SimResult<T> {
    let skipped = outcomes.iter().filter(|o| o.is_none()).count();
    let records: Vec<SimRecord<T>> = outcomes.into_iter().flatten().collect();
    let useful: Vec<&SimRecord<T>> = records.iter().filter(|r| r.useful).collect();
    let avg = |f: fn(&SimRecord<T>) -> T| {
        if useful.is_empty() {
            T::zero()
        } else {
            useful.iter().map(|r| f(r)).sum::<T>() / T::lit(useful.len() as f64)
        }
    };
    let max = |f: fn(&SimRecord<T>) -> T| records.iter().map(f).fold(T::zero(), T::max);
    SimResult {
        n,
        seed,
        sampler,
        useful_count: useful.len(),
        usefulness_rate: T::lit(useful.len() as f64 / n as f64),
        avg_gap_decrease: avg(SimRecord::gap_decrease),
        max_gap_decrease: max(SimRecord::gap_decrease),
        avg_lower_bound_increase: avg(SimRecord::lower_increase),
        max_lower_bound_increase: max(SimRecord::lower_increase),
        avg_upper_bound_decrease: avg(SimRecord::upper_decrease),
        max_upper_bound_decrease: max(SimRecord::upper_decrease),
        soundness_violations: records.iter().filter(|r| r.violation).count(),
        skipped,
        records,
    }
}

/// Run a single SCM through the replicate pipeline.
pub fn simulate_one<T: Scalar>(scm: &Scm<T>) -> Result<SimResult<T>> {
    if !scm.has_proxy() {
        return Err(Error::InvalidParams {
            reason: "model has no proxy".to_string(),
        });
    }
    Ok(summarize(1, 0, SamplerSpec::Uniform, vec![replicate(scm)]))
}
