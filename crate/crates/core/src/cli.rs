//! Command-line front end: JSON config in, JSON reports or CSV out.
//!
//! Exit codes: 0 ok, 1 config or other error, 2 non-convergence (report still
//! written), 3 infeasible dispersion program, 4 tensor budget refusal.

use std::io::{Read, Write};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::blocklength::bounds::rate_curve;
use crate::blocklength::tensor::iid_dh_exact;
use crate::channels::{
    amplitude_damping, channel_metrics_with, pauli_channel, set_metrics, ChannelMetrics,
    MetricsOptions,
};
use crate::divergences::bracket::{
    berry_esseen_in_range, product_dh_bracket, xi, BracketVariant, CopyMoments, DhBracket,
};
use crate::divergences::quantum::ns_moments;
use crate::error::{Error, Result};
use crate::geometry::net::gamma_net;
use crate::geometry::state_set::StateSet;
use crate::operator::{c, CMatrix, DensityMatrix};
use crate::sampling::{random_mixed_state, seeded_rng, RNG_NAME};

pub const SCHEMA_VERSION: &str = "1";
/// Random states drawn by the `net` command.
pub const NET_SAMPLES: usize = 1000;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    #[default]
    Bits,
    Nats,
}

impl Units {
    fn name(self) -> &'static str {
        match self {
            Units::Bits => "bits",
            Units::Nats => "nats",
        }
    }

    /// Converts an information quantity from nats.
    pub fn info(self, x: f64) -> f64 {
        match self {
            Units::Bits => x / std::f64::consts::LN_2,
            Units::Nats => x,
        }
    }

    /// Converts a variance from nats².
    pub fn variance(self, x: f64) -> f64 {
        match self {
            Units::Bits => x / (std::f64::consts::LN_2 * std::f64::consts::LN_2),
            Units::Nats => x,
        }
    }
}

/// Row-major complex matrix given as `[re, im]` pairs, either nested by rows
/// or flat.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum MatrixSpec {
    Rows(Vec<Vec<[f64; 2]>>),
    Flat(Vec<[f64; 2]>),
}

impl MatrixSpec {
    pub fn to_matrix(&self) -> Result<CMatrix> {
        let entries: Vec<[f64; 2]> = match self {
            MatrixSpec::Rows(rows) => {
                let d = rows.len();
                if rows.iter().any(|r| r.len() != d) {
                    return Err(Error::Config("matrix rows must all have length d".into()));
                }
                rows.iter().flatten().copied().collect()
            }
            MatrixSpec::Flat(v) => v.clone(),
        };
        let d = (entries.len() as f64).sqrt().round() as usize;
        if d == 0 || d * d != entries.len() {
            return Err(Error::Config(format!(
                "matrix with {} entries is not square",
                entries.len()
            )));
        }
        let data: Vec<_> = entries.iter().map(|e| c(e[0], e[1])).collect();
        Ok(CMatrix::from_row_slice(d, d, &data))
    }

    pub fn to_state(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.to_matrix()?).map_err(|e| Error::Config(e.to_string()))
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelSpec {
    /// Explicit list of output states.
    CqStates(Vec<MatrixSpec>),
    AmplitudeDamping(f64),
    /// `[px, py, pz]`.
    Pauli([f64; 3]),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DhSpec {
    pub rho: MatrixSpec,
    pub sigma: MatrixSpec,
    pub n: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetSpec {
    pub d: usize,
    pub gamma: f64,
}

fn default_resolution() -> usize {
    2000
}
fn default_tol() -> f64 {
    1e-8
}
fn default_max_iter() -> usize {
    10_000
}
fn default_eps() -> f64 {
    0.01
}
fn default_n_grid() -> Vec<u64> {
    vec![100, 1_000, 10_000, 100_000, 1_000_000]
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub channel: Option<ChannelSpec>,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Iteration budget of the radius solver.
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_n_grid")]
    pub n_grid: Vec<u64>,
    #[serde(default)]
    pub units: Units,
    #[serde(default)]
    pub seed: u64,
    pub dh: Option<DhSpec>,
    pub net: Option<NetSpec>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::Config(format!(
                "eps must lie in (0,1), got {}",
                self.eps
            )));
        }
        if self.resolution < 8 {
            return Err(Error::Config(format!(
                "resolution must be at least 8, got {}",
                self.resolution
            )));
        }
        if !(self.tol > 0.0 && self.tol <= 1e-2) {
            return Err(Error::Config(format!(
                "tol must lie in (0, 1e-2], got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be at least 1".into()));
        }
        Ok(())
    }

    fn metrics(&self) -> Result<ChannelMetrics> {
        let opts = MetricsOptions {
            tol: self.tol,
            max_iter: self.max_iter,
            ..Default::default()
        };
        match &self.channel {
            None => Err(Error::Config("config has no channel".into())),
            Some(ChannelSpec::CqStates(list)) => {
                if list.is_empty() {
                    return Err(Error::Config("cq_states must be nonempty".into()));
                }
                let states = list
                    .iter()
                    .map(|m| m.to_state())
                    .collect::<Result<Vec<_>>>()?;
                let set = StateSet::new(states).map_err(|e| Error::Config(e.to_string()))?;
                set_metrics(set, opts)
            }
            Some(ChannelSpec::AmplitudeDamping(g)) => {
                let ch = amplitude_damping(*g).map_err(|e| Error::Config(e.to_string()))?;
                channel_metrics_with(&ch, self.resolution, self.seed, opts)
            }
            Some(ChannelSpec::Pauli([x, y, z])) => {
                let ch = pauli_channel(*x, *y, *z).map_err(|e| Error::Config(e.to_string()))?;
                channel_metrics_with(&ch, self.resolution, self.seed, opts)
            }
        }
    }

    fn channel_label(&self) -> String {
        match &self.channel {
            None => "none".into(),
            Some(ChannelSpec::CqStates(list)) => format!("cq_states({})", list.len()),
            Some(ChannelSpec::AmplitudeDamping(g)) => format!("amplitude_damping(gamma={g})"),
            Some(ChannelSpec::Pauli([x, y, z])) => format!("pauli(px={x}, py={y}, pz={z})"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "cqrate",
    version,
    about = "Capacity, dispersion and finite-blocklength rates of classical-quantum channels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Common {
    /// JSON config file, or `-` for standard input.
    pub config: Option<String>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, value_enum)]
    pub units: Option<Units>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Holevo capacity and divergence center.
    Capacity(Common),
    /// Minimal and maximal peripheral information variance.
    Dispersion(Common),
    /// CSV rate curve `n,approx,lower,upper`, normalized per channel use.
    Curve(Common),
    /// Exact hypothesis-testing divergence of a tensor power with its brackets.
    Dh(Common),
    /// Net of full-rank states and its empirical coverage.
    Net {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        gamma: Option<f64>,
    },
}

/// Formats a value for JSON, writing infinities as strings.
fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn csv_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        // Display prints infinities as `inf` / `-inf`
        format!("{x}")
    }
}

fn matrix_json(m: &CMatrix) -> Value {
    let rows: Vec<Value> = (0..m.nrows())
        .map(|i| {
            Value::Array(
                (0..m.ncols())
                    .map(|j| json!([m[(i, j)].re, m[(i, j)].im]))
                    .collect(),
            )
        })
        .collect();
    Value::Array(rows)
}

fn header(command: &str, cfg: &RunConfig) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("command".into(), json!(command));
    m.insert("rng".into(), json!(RNG_NAME));
    m.insert("seed".into(), json!(cfg.seed));
    m.insert("units".into(), json!(cfg.units.name()));
    m
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Infeasible(_) => EXIT_INFEASIBLE,
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        _ => EXIT_CONFIG,
    }
}

fn load_config(common: &Common, stdin: &mut dyn Read, required: bool) -> Result<RunConfig> {
    let text = match common.config.as_deref() {
        Some("-") => {
            let mut s = String::new();
            stdin
                .read_to_string(&mut s)
                .map_err(|e| Error::Config(format!("cannot read standard input: {e}")))?;
            s
        }
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {path}: {e}")))?,
        None if required => return Err(Error::Config("a config path (or `-`) is required".into())),
        None => "{}".into(),
    };
    let mut cfg = RunConfig::from_json(&text)?;
    if let Some(e) = common.eps {
        cfg.eps = e;
    }
    if let Some(u) = common.units {
        cfg.units = u;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_json(out: &mut dyn Write, v: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v).map_err(|e| Error::Internal(e.to_string()))?;
    writeln!(out, "{text}").map_err(|e| Error::Internal(e.to_string()))
}

fn cmd_capacity(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let m = cfg.metrics()?;
    let u = cfg.units;
    let mut r = header("capacity", cfg);
    r.insert("channel".into(), json!(cfg.channel_label()));
    r.insert("image_size".into(), json!(m.set.len()));
    r.insert("chi".into(), num(u.info(m.chi)));
    r.insert("chi_lower".into(), num(u.info(m.chi_lower)));
    r.insert("chi_upper".into(), num(u.info(m.chi_upper)));
    r.insert("gap".into(), num(u.info(m.report.gap)));
    r.insert("iterations".into(), json!(m.report.iterations));
    r.insert("converged".into(), json!(m.report.converged));
    r.insert("peripheral_count".into(), json!(m.report.peripheral.len()));
    r.insert("sigma_star".into(), matrix_json(m.sigma_star.matrix()));
    write_json(out, &Value::Object(r))?;
    Ok(if m.report.converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    })
}

fn cmd_dispersion(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let m = cfg.metrics()?;
    let u = cfg.units;
    let mut r = header("dispersion", cfg);
    r.insert("channel".into(), json!(cfg.channel_label()));
    r.insert("eps".into(), json!(cfg.eps));
    r.insert("chi".into(), num(u.info(m.chi)));
    r.insert("v_min".into(), num(u.variance(m.v_min)));
    r.insert("v_max".into(), num(u.variance(m.v_max)));
    r.insert("v_eps".into(), num(u.variance(m.v_eps(cfg.eps))));
    r.insert("v_plus_max".into(), num(u.variance(m.v_plus_max)));
    r.insert(
        "support_sizes".into(),
        json!({"v_min": m.pruned_min.support.len(), "v_max": m.pruned_max.support.len()}),
    );
    r.insert("peripheral_count".into(), json!(m.range.peripheral.len()));
    r.insert("peripheral_clusters".into(), json!(m.clusters.len()));
    r.insert("slack".into(), num(m.slack));
    r.insert("lp_residual".into(), num(m.range.residual));
    r.insert("converged".into(), json!(m.report.converged));
    write_json(out, &Value::Object(r))?;
    Ok(if m.report.converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    })
}

fn cmd_curve(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let m = cfg.metrics()?;
    let points = rate_curve(&m, cfg.eps, &cfg.n_grid)?;
    let u = cfg.units;
    let mut text = String::from("n,approx,lower,upper\n");
    for p in &points {
        let n = p.n as f64;
        text.push_str(&format!(
            "{},{},{},{}\n",
            p.n,
            csv_num(u.info(p.approx / n)),
            csv_num(u.info(p.lower / n)),
            csv_num(u.info(p.upper / n))
        ));
    }
    out.write_all(text.as_bytes())
        .map_err(|e| Error::Internal(e.to_string()))?;
    Ok(if m.report.converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    })
}

fn bracket_json(b: Option<&DhBracket>, u: Units, note: Option<String>) -> Value {
    match b {
        Some(b) => json!({
            "lower": num(u.info(b.lower)),
            "upper": num(u.info(b.upper)),
            "variant": b.variant,
        }),
        None => json!({"lower": Value::Null, "upper": Value::Null, "note": note}),
    }
}

fn cmd_dh(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let spec = cfg
        .dh
        .as_ref()
        .ok_or_else(|| Error::Config("config has no `dh` section".into()))?;
    let rho = spec.rho.to_state()?;
    let sigma = spec.sigma.to_state()?;
    if rho.dim() != sigma.dim() {
        return Err(Error::Config("rho and sigma differ in dimension".into()));
    }
    if spec.n == 0 {
        return Err(Error::Config("n must be at least 1".into()));
    }
    let exact = iid_dh_exact(&rho, &sigma, spec.n, cfg.eps)?;
    let n = spec.n as f64;
    let delta = 1.0 / n.sqrt();
    let moments = ns_moments(&rho, &sigma)
        .ok()
        .map(|(d, v, t)| CopyMoments { d, v, t });
    let x = xi(&sigma);
    let u = cfg.units;
    let (cheb, cheb_note) = match moments {
        Some(m) => {
            match product_dh_bracket(&[m], x, n, cfg.eps, delta, BracketVariant::Chebyshev) {
                Ok(b) => (Some(b), None),
                Err(e) => (None, Some(e.to_string())),
            }
        }
        None => (None, Some("sigma does not dominate rho".to_string())),
    };
    let (be, be_note) = match moments {
        Some(m) if berry_esseen_in_range(m, n, cfg.eps, delta) => {
            match product_dh_bracket(&[m], x, n, cfg.eps, delta, BracketVariant::BerryEsseen) {
                Ok(b) => (Some(b), None),
                Err(e) => (None, Some(e.to_string())),
            }
        }
        _ => (
            None,
            Some("Berry-Esseen quantile arguments outside (0,1)".to_string()),
        ),
    };
    let mut r = header("dh", cfg);
    r.insert("n".into(), json!(spec.n));
    r.insert("eps".into(), json!(cfg.eps));
    r.insert("dh_exact".into(), num(u.info(exact)));
    r.insert(
        "bracket_chebyshev".into(),
        bracket_json(cheb.as_ref(), u, cheb_note),
    );
    r.insert(
        "bracket_berry_esseen".into(),
        bracket_json(be.as_ref(), u, be_note),
    );
    let constants = match moments {
        Some(m) => json!({
            "delta": delta,
            "xi": x,
            "d": num(u.info(m.d)),
            "v": num(u.variance(m.v)),
            "t": num(m.t),
        }),
        None => json!({"delta": delta, "xi": x}),
    };
    r.insert("constants".into(), constants);
    write_json(out, &Value::Object(r))?;
    Ok(EXIT_OK)
}

fn cmd_net(
    cfg: &RunConfig,
    dim: Option<usize>,
    gamma: Option<f64>,
    out: &mut dyn Write,
) -> Result<i32> {
    let d = dim.or(cfg.net.as_ref().map(|n| n.d)).unwrap_or(2);
    let gamma = gamma.or(cfg.net.as_ref().map(|n| n.gamma)).unwrap_or(0.5);
    let net = gamma_net(d, gamma, cfg.seed).map_err(|e| Error::Config(e.to_string()))?;
    let mut rng = seeded_rng(cfg.seed.wrapping_add(1));
    let mut covered = 0usize;
    let mut worst: f64 = 0.0;
    for _ in 0..NET_SAMPLES {
        let rho = random_mixed_state(d, &mut rng);
        let (_, td) = net.closest(&rho)?;
        worst = worst.max(td);
        if td <= gamma {
            covered += 1;
        }
    }
    let s = net.summary();
    let mut r = header("net", cfg);
    r.insert("d".into(), json!(d));
    r.insert("gamma".into(), json!(gamma));
    r.insert("m".into(), json!(s.m));
    r.insert("cardinality".into(), json!(s.cardinality));
    r.insert("cardinality_bound".into(), num(s.cardinality_bound));
    r.insert("min_eigenvalue_floor".into(), json!(s.min_eigenvalue_floor));
    r.insert("min_eigenvalue".into(), json!(s.min_eigenvalue));
    r.insert("samples".into(), json!(NET_SAMPLES));
    r.insert(
        "empirical_coverage_rate".into(),
        json!(covered as f64 / NET_SAMPLES as f64),
    );
    r.insert("max_trace_distance".into(), json!(worst));
    write_json(out, &Value::Object(r))?;
    Ok(EXIT_OK)
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = if code == EXIT_OK {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Capacity(c) => load_config(c, stdin, true).and_then(|cfg| cmd_capacity(&cfg, out)),
        Command::Dispersion(c) => {
            load_config(c, stdin, true).and_then(|cfg| cmd_dispersion(&cfg, out))
        }
        Command::Curve(c) => load_config(c, stdin, true).and_then(|cfg| cmd_curve(&cfg, out)),
        Command::Dh(c) => load_config(c, stdin, true).and_then(|cfg| cmd_dh(&cfg, out)),
        Command::Net { common, dim, gamma } => {
            load_config(common, stdin, false).and_then(|cfg| cmd_net(&cfg, *dim, *gamma, out))
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
