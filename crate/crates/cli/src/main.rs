use std::fs;
use std::io::{self, Read, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use counterbound::model::{ObservedCells, ProxyCells};
use counterbound::study::{SamplerSpec, Side, SweepSpec, SweepTarget, DEFAULT_RESOLUTION};
use counterbound::Param;
use counterbound_cli::api::{self, TargetSel};
use counterbound_cli::{server, CliError, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Bounds on the probabilities of benefit and harm under unmeasured
/// confounding.
#[derive(Debug, Parser)]
#[command(name = "counterbound", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Observational, sensitivity and PN/PS bounds for one joint.
    Bounds(BoundsArgs),
    /// Bounds tightened by a binary proxy of the confounder.
    Proxy(ProxyArgs),
    /// Sweep a bound over two sensitivity parameters.
    Sweep(SweepArgs),
    /// Social-good interval and ATE compliance region.
    Social(SocialArgs),
    /// Seeded simulation of proxy usefulness.
    Simulate(SimulateArgs),
    /// Serve the JSON API over HTTP.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
    },
}

#[derive(Debug, Args)]
struct Output {
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    /// Whole request as JSON; other inputs are ignored.
    #[arg(long, conflicts_with_all = ["obs", "params"])]
    request: Option<PathBuf>,
    /// JSON file with `pxy, pxy_, px_y, px_y_`, or the four cells inline.
    #[arg(long, required_unless_present = "request")]
    obs: Option<String>,
    /// `m_x,M_x,m_xp,M_xp`
    #[arg(long)]
    params: Option<String>,
    #[arg(long, value_enum, default_value_t = TargetArg::Both)]
    target: TargetArg,
    #[arg(long)]
    pn_ps: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct ProxyArgs {
    /// JSON file with the eight `p(x, y, v)` cells, or a full request.
    #[arg(long)]
    joint: PathBuf,
    #[arg(long)]
    tie_tolerance: Option<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, conflicts_with = "obs")]
    request: Option<PathBuf>,
    #[arg(long, required_unless_present = "request")]
    obs: Option<String>,
    #[arg(long, value_enum, default_value_t = SweepTargetArg::Benefit)]
    target: SweepTargetArg,
    #[arg(long, value_enum, default_value_t = SideArg::Lower)]
    side: SideArg,
    /// Two parameter names, e.g. `m_x,M_xp`.
    #[arg(long, default_value = "m_x,M_xp")]
    axes: String,
    /// Values for parameters off the axes, e.g. `M_x=1,m_xp=0`.
    #[arg(long)]
    fixed: Option<String>,
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    res: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Threshold lines as JSON, written next to the CSV grid.
    #[arg(long)]
    thresholds: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct SocialArgs {
    /// `lo,hi`
    #[arg(long, allow_hyphen_values = true)]
    benefit: String,
    #[arg(long, allow_hyphen_values = true)]
    harm: String,
    /// ATE interval; enables the refined interval.
    #[arg(long, allow_hyphen_values = true)]
    ate: Option<String>,
    /// `w_benefit,w_harm`
    #[arg(long, default_value = "1,1")]
    w: String,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `uniform` or `beta:ALPHA,BETA`
    #[arg(long, default_value = "uniform")]
    sampler: String,
    /// Per-replicate CSV of `a,b,c,d,useful`.
    #[arg(long)]
    records: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TargetArg {
    Benefit,
    Harm,
    Both,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SweepTargetArg {
    Benefit,
    Harm,
    Ate,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SideArg {
    Lower,
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        return fail(e);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var("COUNTERBOUND_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("COUNTERBOUND_THREADS = {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Bounds(a) => {
            let req = match &a.request {
                Some(p) => read_json(p)?,
                None => api::BoundsRequest {
                    obs: load_obs(a.obs.as_deref().unwrap_or_default())?,
                    params: a.params.as_deref().map(parse_params).transpose()?,
                    target: match a.target {
                        TargetArg::Benefit => TargetSel::Benefit,
                        TargetArg::Harm => TargetSel::Harm,
                        TargetArg::Both => TargetSel::Both,
                    },
                    pn_ps: a.pn_ps,
                },
            };
            emit_json(&api::bounds(&req)?, a.output.out.as_deref())
        }
        Cmd::Proxy(a) => {
            let req = load_proxy(&a.joint, a.tie_tolerance)?;
            emit_json(&api::proxy(&req)?, a.output.out.as_deref())
        }
        Cmd::Sweep(a) => {
            let req = match &a.request {
                Some(p) => read_json(p)?,
                None => api::SweepRequest {
                    obs: load_obs(a.obs.as_deref().unwrap_or_default())?,
                    spec: sweep_spec(&a)?,
                },
            };
            let resp = api::sweep_grid(&req)?;
            if let Some(path) = &a.thresholds {
                write_file(path, api::to_json(&resp.thresholds)?.as_bytes())?;
            }
            match a.format {
                Format::Json => emit_json(&resp, a.output.out.as_deref()),
                Format::Csv => {
                    let mut buf = Vec::new();
                    api::write_sweep_csv(&resp, &mut buf)?;
                    emit(&buf, a.output.out.as_deref())
                }
            }
        }
        Cmd::Social(a) => {
            let [w_benefit, w_harm] = pair("w", &a.w)?;
            let req = api::SocialRequest {
                benefit: pair("benefit", &a.benefit)?,
                harm: pair("harm", &a.harm)?,
                ate: a.ate.as_deref().map(|s| pair("ate", s)).transpose()?,
                weights: api::WeightsInput { w_benefit, w_harm },
            };
            emit_json(&api::social(&req)?, a.output.out.as_deref())
        }
        Cmd::Simulate(a) => {
            let req = api::SimulateRequest {
                n: a.n,
                seed: a.seed,
                sampler: parse_sampler(&a.sampler)?,
            };
            let res = api::run_simulation(&req)?;
            if let Some(path) = &a.records {
                let mut buf = Vec::new();
                api::write_records_csv(&res.records, &mut buf)?;
                write_file(path, &buf)?;
            }
            emit_json(&res, a.output.out.as_deref())
        }
        Cmd::Serve { addr } => tokio::runtime::Builder::new_multi_thread()
            .enable_all()
            .build()
            .map_err(|e| CliError::io(addr.to_string(), e))?
            .block_on(server::serve(addr)),
    }
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        io::stdin()
            .read_to_end(&mut buf)
            .map_err(|e| CliError::io("<stdin>", e))?;
        return Ok(buf);
    }
    fs::read(path).map_err(|e| CliError::io(path, e))
}

fn read_json<R: DeserializeOwned>(path: &Path) -> Result<R> {
    api::parse(&read_bytes(path)?)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn emit(bytes: &[u8], out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => write_file(p, bytes),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let mut s = api::to_json(value)?;
    s.push('\n');
    emit(s.as_bytes(), out)
}

fn numbers(what: &str, s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("{what}: {t:?} is not a number")))
        })
        .collect()
}

fn fixed<const N: usize>(what: &str, s: &str) -> Result<[f64; N]> {
    let v = numbers(what, s)?;
    v.try_into()
        .map_err(|v: Vec<f64>| CliError::Usage(format!("{what}: expected {N} values, got {}", v.len())))
}

fn pair(what: &str, s: &str) -> Result<[f64; 2]> {
    fixed::<2>(what, s)
}

/// A path to a JSON file, or four comma-separated cells.
fn load_obs(s: &str) -> Result<ObservedCells> {
    let path = Path::new(s);
    if s == "-" || path.exists() {
        return read_json(path);
    }
    if s.contains(',') {
        let [pxy, pxy_, px_y, px_y_] = fixed::<4>("obs", s)?;
        return Ok(ObservedCells { pxy, pxy_, px_y, px_y_ });
    }
    Err(CliError::io(path, io::ErrorKind::NotFound.into()))
}

/// Accepts either the bare joint or a `{"joint": .., "tie_tolerance": ..}`
/// request; a flag overrides a tolerance in the file.
fn load_proxy(path: &Path, tie: Option<f64>) -> Result<api::ProxyRequest> {
    let bytes = read_bytes(path)?;
    let value: serde_json::Value = serde_json::from_slice(&bytes)?;
    let mut req = if value.get("joint").is_some() {
        api::parse::<api::ProxyRequest>(&bytes)?
    } else {
        api::ProxyRequest {
            joint: api::parse::<ProxyCells>(&bytes)?,
            tie_tolerance: None,
        }
    };
    if tie.is_some() {
        req.tie_tolerance = tie;
    }
    Ok(req)
}

fn parse_params(s: &str) -> Result<api::ParamsInput> {
    let [m_x, max_x, m_xp, max_xp] = fixed::<4>("params", s)?;
    Ok(api::ParamsInput { m_x, max_x, m_xp, max_xp })
}

fn param(s: &str) -> Result<Param> {
    Param::parse(s.trim()).ok_or_else(|| {
        CliError::Usage(format!("unknown parameter {s:?}; expected m_x, M_x, m_xp or M_xp"))
    })
}

fn sweep_spec(a: &SweepArgs) -> Result<SweepSpec<f64>> {
    let axes: Vec<Param> = a.axes.split(',').map(param).collect::<Result<_>>()?;
    let axes: [Param; 2] = axes
        .try_into()
        .map_err(|_| CliError::Usage("axes: expected two parameter names".into()))?;
    let target = match a.target {
        SweepTargetArg::Benefit => SweepTarget::Benefit,
        SweepTargetArg::Harm => SweepTarget::Harm,
        SweepTargetArg::Ate => SweepTarget::Ate,
    };
    let side = match a.side {
        SideArg::Lower => Side::Lower,
        SideArg::Upper => Side::Upper,
    };
    let mut spec = SweepSpec::new(target, side, axes, a.res);
    for kv in a.fixed.iter().flat_map(|f| f.split(',')) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("fixed: {kv:?} is not NAME=VALUE")))?;
        let [v] = fixed::<1>("fixed", v)?;
        spec = spec.with_fixed(param(k)?, v);
    }
    Ok(spec)
}

fn parse_sampler(s: &str) -> Result<SamplerSpec> {
    if s == "uniform" {
        return Ok(SamplerSpec::Uniform);
    }
    if let Some(rest) = s.strip_prefix("beta:") {
        let [alpha, beta] = pair("sampler", rest)?;
        return Ok(SamplerSpec::Beta { alpha, beta });
    }
    Err(CliError::Usage(format!(
        "sampler: {s:?}; expected `uniform` or `beta:ALPHA,BETA`"
    )))
}
