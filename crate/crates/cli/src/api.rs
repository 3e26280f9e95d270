//! Request and report types shared by the command line and the HTTP
//! service, and the handlers that turn one into the other.
//!
//! Requests are parsed into plain wire structs first and validated
//! afterwards, so validation failures keep their error code instead of
//! disappearing into a JSON parse error.

use std::io::Write;

use counterbound::bounds::{
    ate_sensitivity_bounds, cf_intervals, informative_regions, obs_bounds, pn_ps_bounds,
    sensitivity_bounds, InformativeRegions, NecessitySufficiency,
};
use counterbound::decision::{
    compliance_region, social_good_naive, social_good_refined, Point, RefinedSocialGood,
    SocialWeights,
};
use counterbound::model::{ObservedCells, ProxyCells};
use counterbound::proxy::{envelope, proxy_bounds, ProxyAnalysis, DEFAULT_TIE_TOLERANCE};
use counterbound::study::{
    simulate, sweep, SamplerSpec, SimRecord, SimResult, SweepGrid, SweepSpec, ThresholdLine,
};
use counterbound::{
    BoundResult, Error, Interval, ObservedJoint, Param, ProxyJoint, SensitivityParams, Target,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Largest replicate count a single request may ask for.
pub const MAX_REPLICATES: usize = 10_000_000;

pub fn parse<R: DeserializeOwned>(body: &[u8]) -> Result<R> {
    Ok(serde_json::from_slice(body)?)
}

/// `{"m_x": .., "M_x": .., "m_xp": .., "M_xp": ..}`
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsInput {
    pub m_x: f64,
    #[serde(rename = "M_x")]
    pub max_x: f64,
    pub m_xp: f64,
    #[serde(rename = "M_xp")]
    pub max_xp: f64,
}

impl ParamsInput {
    pub fn build(&self) -> Result<SensitivityParams<f64>> {
        Ok(SensitivityParams::new(
            self.m_x,
            self.max_x,
            self.m_xp,
            self.max_xp,
        )?)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetSel {
    Benefit,
    Harm,
    #[default]
    Both,
}

impl TargetSel {
    pub fn includes(self, t: Target) -> bool {
        match self {
            TargetSel::Both => true,
            TargetSel::Benefit => t == Target::Benefit,
            TargetSel::Harm => t == Target::Harm,
        }
    }
}

/// Per-target values; a target not requested is left out.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerTarget<X> {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub benefit: Option<X>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub harm: Option<X>,
}

impl<X> PerTarget<X> {
    fn build(sel: TargetSel, mut f: impl FnMut(Target) -> Result<X>) -> Result<Self> {
        Ok(Self {
            benefit: sel
                .includes(Target::Benefit)
                .then(|| f(Target::Benefit))
                .transpose()?,
            harm: sel.includes(Target::Harm).then(|| f(Target::Harm)).transpose()?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsRequest {
    pub obs: ObservedCells,
    #[serde(default)]
    pub params: Option<ParamsInput>,
    #[serde(default)]
    pub target: TargetSel,
    /// Also bound the probabilities of necessity and sufficiency.
    #[serde(default)]
    pub pn_ps: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Conditionals {
    pub p_y_given_x: f64,
    pub p_y_given_xp: f64,
}

/// Closed ranges each parameter may take given the observed joint.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PossibleRegion {
    pub m_x: [f64; 2],
    #[serde(rename = "M_x")]
    pub max_x: [f64; 2],
    pub m_xp: [f64; 2],
    #[serde(rename = "M_xp")]
    pub max_xp: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SensitivityReport {
    pub params: SensitivityParams<f64>,
    pub p_yx: Interval<f64>,
    pub p_yxp: Interval<f64>,
    #[serde(flatten)]
    pub bounds: PerTarget<BoundResult<f64>>,
    pub ate: Interval<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundsReport {
    pub obs: ObservedCells,
    /// Absent when an exposure arm has no mass.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conditionals: Option<Conditionals>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub possible_region: Option<PossibleRegion>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub informative_regions: Option<PerTarget<InformativeRegions<f64>>>,
    pub envelope: PerTarget<BoundResult<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sensitivity: Option<SensitivityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pn_ps: Option<NecessitySufficiency<f64>>,
}

pub fn bounds(req: &BoundsRequest) -> Result<BoundsReport> {
    let obs = ObservedJoint::<f64>::try_from(req.obs)?;
    let conditionals = match (obs.p_y_given_x(), obs.p_y_given_xp()) {
        (Ok(p_y_given_x), Ok(p_y_given_xp)) => Some(Conditionals {
            p_y_given_x,
            p_y_given_xp,
        }),
        _ => None,
    };
    let possible_region = conditionals.map(|c| PossibleRegion {
        m_x: [0.0, c.p_y_given_x],
        max_x: [c.p_y_given_x, 1.0],
        m_xp: [0.0, c.p_y_given_xp],
        max_xp: [c.p_y_given_xp, 1.0],
    });
    let informative_regions = match conditionals {
        Some(_) => Some(PerTarget::build(req.target, |t| {
            Ok(informative_regions(&obs, t)?)
        })?),
        None => None,
    };
    let envelope = PerTarget::build(req.target, |t| Ok(obs_bounds(&obs, t)))?;

    let params = req.params.as_ref().map(ParamsInput::build).transpose()?;
    let sensitivity = match &params {
        Some(sp) => {
            let cf = cf_intervals(&obs, sp)?;
            Some(SensitivityReport {
                params: *sp,
                p_yx: cf.p_yx,
                p_yxp: cf.p_yxp,
                bounds: PerTarget::build(req.target, |t| Ok(sensitivity_bounds(&obs, sp, t)?))?,
                ate: ate_sensitivity_bounds(&obs, sp)?,
            })
        }
        None => None,
    };
    let pn_ps = if req.pn_ps {
        let (a, b) = match &sensitivity {
            Some(s) => (s.p_yx, s.p_yxp),
            None => (Interval::unit(), Interval::unit()),
        };
        Some(pn_ps_bounds(&obs, &a, &b)?)
    } else {
        None
    };
    Ok(BoundsReport {
        obs: req.obs,
        conditionals,
        possible_region,
        informative_regions,
        envelope,
        sensitivity,
        pn_ps,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProxyRequest {
    pub joint: ProxyCells,
    #[serde(default)]
    pub tie_tolerance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProxyResponse {
    pub joint: ProxyCells,
    pub observed: ObservedCells,
    pub tie_tolerance: f64,
    /// The proxy carries no information and the bounds fell back to the
    /// observational envelope.
    pub collapsed: bool,
    pub envelope: PerTarget<Interval<f64>>,
    pub benefit: ProxyAnalysis<f64>,
    pub harm: ProxyAnalysis<f64>,
}

pub fn proxy(req: &ProxyRequest) -> Result<ProxyResponse> {
    let pj = ProxyJoint::<f64>::try_from(req.joint)?;
    let tie = req.tie_tolerance.unwrap_or(DEFAULT_TIE_TOLERANCE);
    if !tie.is_finite() || tie < 0.0 {
        return Err(Error::InvalidParams {
            reason: format!("tie_tolerance = {tie} must be finite and nonnegative"),
        }
        .into());
    }
    let r = proxy_bounds(&pj, tie)?;
    Ok(ProxyResponse {
        joint: req.joint,
        observed: pj.observed().to_cells(),
        tie_tolerance: tie,
        collapsed: r.benefit.monotonicity.proxy_uninformative(),
        envelope: PerTarget {
            benefit: Some(envelope(&pj, Target::Benefit)),
            harm: Some(envelope(&pj, Target::Harm)),
        },
        benefit: r.benefit,
        harm: r.harm,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRequest {
    pub obs: ObservedCells,
    pub spec: SweepSpec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CellOut {
    pub axis1: f64,
    pub axis2: f64,
    pub value: Option<f64>,
    pub valid: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResponse {
    pub spec: SweepSpec<f64>,
    pub axes: [Param; 2],
    pub cells: Vec<CellOut>,
    pub thresholds: Vec<ThresholdLine<f64>>,
}

impl From<SweepGrid<f64>> for SweepResponse {
    fn from(g: SweepGrid<f64>) -> Self {
        Self {
            axes: g.spec.axes,
            cells: g
                .cells
                .iter()
                .map(|c| CellOut {
                    axis1: c.axis1,
                    axis2: c.axis2,
                    value: c.value,
                    valid: c.valid(),
                })
                .collect(),
            thresholds: g.thresholds,
            spec: g.spec,
        }
    }
}

pub fn sweep_grid(req: &SweepRequest) -> Result<SweepResponse> {
    let obs = ObservedJoint::<f64>::try_from(req.obs)?;
    Ok(sweep(&obs, &req.spec)?.into())
}

/// CSV with header `axis1,axis2,value,valid`; invalid cells have an
/// empty value.
pub fn write_sweep_csv(resp: &SweepResponse, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["axis1", "axis2", "value", "valid"])?;
    for c in &resp.cells {
        w.write_record([
            c.axis1.to_string(),
            c.axis2.to_string(),
            c.value.map(|v| v.to_string()).unwrap_or_default(),
            c.valid.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsInput {
    pub w_benefit: f64,
    pub w_harm: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SocialRequest {
    pub benefit: [f64; 2],
    pub harm: [f64; 2],
    #[serde(default)]
    pub ate: Option<[f64; 2]>,
    pub weights: WeightsInput,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SocialResponse {
    pub naive: Interval<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refined: Option<RefinedSocialGood<f64>>,
    /// Vertices in the `(harm, benefit)` plane, counterclockwise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compliance_region: Option<Vec<Point<f64>>>,
}

pub fn social(req: &SocialRequest) -> Result<SocialResponse> {
    let prob = |name: &str, [lo, hi]: [f64; 2]| -> Result<Interval<f64>> {
        Interval::probability(lo, hi).map_err(|e| match e {
            Error::InvalidProbability { field, value } => Error::InvalidProbability {
                field: format!("{name}.{field}"),
                value,
            },
            other => other,
        }
        .into())
    };
    let benefit = prob("benefit", req.benefit)?;
    let harm = prob("harm", req.harm)?;
    let w = SocialWeights::new(req.weights.w_benefit, req.weights.w_harm)?;
    let naive = social_good_naive(&benefit, &harm, &w);
    let (refined, region) = match req.ate {
        Some([lo, hi]) => {
            let ate = Interval::signed(lo, hi)?;
            (
                Some(social_good_refined(&benefit, &harm, &ate, &w)?),
                Some(compliance_region(&benefit, &harm, &ate)?),
            )
        }
        None => (None, None),
    };
    Ok(SocialResponse {
        naive,
        refined,
        compliance_region: region,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateRequest {
    pub n: usize,
    pub seed: u64,
    #[serde(default)]
    pub sampler: SamplerSpec,
}

pub fn run_simulation(req: &SimulateRequest) -> Result<SimResult<f64>> {
    if req.n > MAX_REPLICATES {
        return Err(Error::InvalidParams {
            reason: format!("n = {} exceeds the limit of {MAX_REPLICATES}", req.n),
        }
        .into());
    }
    Ok(simulate(req.n, req.seed, req.sampler)?)
}

/// Per-replicate CSV with header `a,b,c,d,useful`.
pub fn write_records_csv(records: &[SimRecord<f64>], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["a", "b", "c", "d", "useful"])?;
    for r in records {
        w.write_record([
            r.a.to_string(),
            r.b.to_string(),
            r.c.to_string(),
            r.d.to_string(),
            r.useful.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Compact JSON of any report; the service and `--format json` both use
/// this, which is what makes their payloads comparable byte for byte.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string(value)?)
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::io("<stream>", e)
    }
}
