//! Command-line surface: flag parsing, experiment dispatch, and rendering
//! of CSV/JSON artifacts.
//!
//! Every artifact embeds a canonical `config` string rebuilt from the parsed
//! parameters (sorted keys, normalized numbers), so the same invocation
//! always stamps the same provenance and reruns are byte-identical. Worker
//! count and output destination are deliberately excluded from that string:
//! they affect scheduling and placement, never the numbers.
//!
//! Exit-code contract (enforced by the binary): 0 success, 1 runtime error,
//! 2 usage error.

use crate::analytic;
use crate::chaos_kernel::{
    contraction_bound, contraction_norm_sq, h_tilde_eval, k_t_eval, l2_norm_sq_extrapolated,
    nystrom_spectrum, Domain, KernelGrid,
};
use crate::error::{Error, Result};
use crate::io::{self, Provenance};
use crate::mc_harness::{
    ecdf, histogram, kolmogorov_distance, run_mc, summarize, McConfig, MeshSpec, Statistic,
};
use crate::normal::norm_sf;
use crate::ou_sim::{simulate_euler, simulate_exact, OuParams, PathPair, SampleGrid, Scheme};
use crate::rng::substream_seed;
use crate::yule_stats::{rho_discrete, rho_discrete_standardized, rho_quadrature, YuleResult};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

/// Experiment commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Rho,
    Psi,
    McTable,
    Ks,
    Analytic,
    MeshPlan,
    KernelCheck,
    Assess,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Rho => "rho",
            Command::Psi => "psi",
            Command::McTable => "mc-table",
            Command::Ks => "ks",
            Command::Analytic => "analytic",
            Command::MeshPlan => "mesh-plan",
            Command::KernelCheck => "kernel-check",
            Command::Assess => "assess",
        }
    }

    fn from_name(s: &str) -> Option<Command> {
        Some(match s {
            "simulate" => Command::Simulate,
            "rho" => Command::Rho,
            "psi" => Command::Psi,
            "mc-table" => Command::McTable,
            "ks" => Command::Ks,
            "analytic" => Command::Analytic,
            "mesh-plan" => Command::MeshPlan,
            "kernel-check" => Command::KernelCheck,
            "assess" => Command::Assess,
            _ => return None,
        })
    }

    fn allowed(self) -> &'static [&'static str] {
        match self {
            Command::Simulate => &["theta", "n", "lambda", "delta", "seed", "scheme"],
            Command::Rho => &[
                "theta", "n", "lambda", "delta", "seed", "scheme", "input", "mode",
            ],
            Command::Psi => &["theta", "n", "lambda", "delta", "seed", "scheme", "input"],
            Command::McTable => &["theta", "n", "lambda", "reps", "seed", "scheme", "stat"],
            Command::Ks => &[
                "theta", "n", "lambda", "delta", "reps", "seed", "scheme", "emit", "bins",
            ],
            Command::Analytic => &[
                "name", "theta", "t", "n", "delta", "sigma1", "sigma2", "beta", "y", "var", "k3",
            ],
            Command::MeshPlan => &["n", "lambda"],
            Command::KernelCheck => &["theta", "t", "m", "eigen_m", "contraction_m", "rank"],
            Command::Assess => &["input", "theta"],
        }
    }

    /// Defaults mirror the reference experiment protocol: lambda = 0.6,
    /// 500 replications, Euler scheme, theta grid {1,5,10}, n grid
    /// {1e4, 5e4, 1e5}, seed 42 — so the standard tables reproduce with no
    /// flags.
    fn defaults(self) -> &'static [(&'static str, &'static str)] {
        match self {
            Command::Simulate => &[("seed", "42"), ("scheme", "euler")],
            Command::Rho => &[("seed", "42"), ("scheme", "euler"), ("mode", "discrete")],
            Command::Psi => &[("seed", "42"), ("scheme", "euler")],
            Command::McTable => &[
                ("theta", "1,5,10"),
                ("n", "10000,50000,100000"),
                ("lambda", "0.6"),
                ("reps", "500"),
                ("seed", "42"),
                ("scheme", "euler"),
                ("stat", "rho"),
            ],
            Command::Ks => &[
                ("theta", "1"),
                ("n", "100000"),
                ("reps", "500"),
                ("seed", "42"),
                ("scheme", "euler"),
                ("emit", "summary"),
                ("bins", "30"),
            ],
            Command::Analytic => &[],
            Command::MeshPlan => &[],
            Command::KernelCheck => &[
                ("theta", "1"),
                ("t", "10"),
                ("m", "2048"),
                ("eigen_m", "512"),
                ("contraction_m", "256"),
                ("rank", "10"),
            ],
            Command::Assess => &[],
        }
    }

    fn required(self) -> &'static [&'static str] {
        match self {
            Command::Simulate => &["theta", "n"],
            Command::Rho => &[],
            Command::Psi => &["theta"],
            Command::McTable => &[],
            Command::Ks => &[],
            Command::Analytic => &["name"],
            Command::MeshPlan => &["n"],
            Command::KernelCheck => &[],
            Command::Assess => &["input", "theta"],
        }
    }

    fn default_format(self) -> Format {
        match self {
            Command::Analytic | Command::KernelCheck | Command::Assess => Format::Json,
            _ => Format::Csv,
        }
    }
}

/// Output encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// A parsed, validated invocation.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub command: Command,
    /// Normalized parameter map; iteration order (sorted) defines the
    /// canonical config string.
    pub params: BTreeMap<String, String>,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    /// Worker-pool override; not part of provenance.
    pub workers: Option<usize>,
}

pub fn usage() -> &'static str {
    "ou-yule <command> [--flag value]...\n\
     \n\
     commands:\n\
       simulate     --theta F --n N [--lambda F | --delta F] [--seed N] [--scheme euler|exact]\n\
       rho          (simulate flags | --input FILE) [--mode discrete|quadrature]\n\
       psi          --theta F (simulate flags | --input FILE)\n\
       mc-table     [--theta F,..] [--n N,..] [--lambda F] [--reps N] [--seed N] [--scheme S] [--stat rho|psi]\n\
       ks           [--theta F] [--n N] [--lambda F | --delta F] [--reps N] [--seed N] [--scheme S]\n\
                    [--emit summary|samples|ecdf|histogram] [--bins N]\n\
       analytic     --name NAME [numeric flags per formula]\n\
       mesh-plan    --n N [--lambda F]\n\
       kernel-check [--theta F] [--t F] [--m N] [--eigen-m N] [--contraction-m N] [--rank N]\n\
       assess       --input FILE --theta F\n\
     \n\
     common flags: --output PATH (default stdout), --format csv|json, --workers N\n\
     environment:  OU_YULE_WORKERS overrides the default worker count\n\
     exit codes:   0 success, 1 runtime error, 2 usage error"
}

fn usage_err(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

/// Normalizes a numeric or numeric-list parameter so that the canonical
/// config string does not depend on how the user spelled the number.
fn normalize_value(key: &str, value: &str) -> Result<String> {
    const FLOAT_KEYS: &[&str] = &[
        "theta", "t", "lambda", "delta", "sigma1", "sigma2", "beta", "y", "var", "k3",
    ];
    const INT_KEYS: &[&str] = &[
        "n", "reps", "seed", "m", "eigen_m", "contraction_m", "rank", "bins",
    ];
    let is_float = FLOAT_KEYS.contains(&key);
    let is_int = INT_KEYS.contains(&key);
    if !is_float && !is_int {
        return Ok(value.to_string());
    }
    let mut parts = Vec::new();
    for tok in value.split(',') {
        let tok = tok.trim();
        if is_int {
            // accept float spellings of integers (1e5)
            let as_f = tok
                .parse::<f64>()
                .map_err(|_| usage_err(format!("--{key}: expected an integer, got {tok:?}")))?;
            if !(as_f.fract() == 0.0 && (0.0..=9.007199254740992e15).contains(&as_f)) {
                return Err(usage_err(format!(
                    "--{key}: expected a nonnegative integer, got {tok:?}"
                )));
            }
            parts.push(format!("{}", as_f as u64));
        } else {
            let v = tok
                .parse::<f64>()
                .map_err(|_| usage_err(format!("--{key}: expected a number, got {tok:?}")))?;
            if !v.is_finite() {
                return Err(usage_err(format!("--{key}: expected a finite number")));
            }
            parts.push(format!("{v}"));
        }
    }
    if parts.is_empty() {
        return Err(usage_err(format!("--{key}: empty value")));
    }
    Ok(parts.join(","))
}

/// Parses an argument vector (without the program name) into a validated
/// [`ExperimentSpec`].
pub fn parse_cli(argv: &[String]) -> Result<ExperimentSpec> {
    let first = argv
        .first()
        .ok_or_else(|| usage_err("expected a command"))?;
    let command = Command::from_name(first)
        .ok_or_else(|| usage_err(format!("unknown command {first:?}")))?;

    let mut params: BTreeMap<String, String> = BTreeMap::new();
    let mut output_path = None;
    let mut format = None;
    let mut workers = None;

    let mut i = 1;
    while i < argv.len() {
        let flag = &argv[i];
        let key = flag
            .strip_prefix("--")
            .ok_or_else(|| usage_err(format!("expected --flag, got {flag:?}")))?
            .replace('-', "_");
        let value = argv
            .get(i + 1)
            .ok_or_else(|| usage_err(format!("--{key} needs a value")))?;
        i += 2;
        match key.as_str() {
            "output" => output_path = Some(PathBuf::from(value)),
            "format" => {
                format = Some(match value.as_str() {
                    "csv" => Format::Csv,
                    "json" => Format::Json,
                    other => return Err(usage_err(format!("--format: csv or json, got {other:?}"))),
                })
            }
            "workers" => {
                let w: usize = value
                    .parse()
                    .map_err(|_| usage_err("--workers: expected a positive integer"))?;
                if w == 0 {
                    return Err(usage_err("--workers: must be at least 1"));
                }
                workers = Some(w);
            }
            k => {
                if !command.allowed().contains(&k) {
                    return Err(usage_err(format!(
                        "unknown flag --{k} for {}; allowed: {}",
                        command.name(),
                        command.allowed().join(", ")
                    )));
                }
                if params
                    .insert(k.to_string(), normalize_value(k, value)?)
                    .is_some()
                {
                    return Err(usage_err(format!("--{k} given twice")));
                }
            }
        }
    }

    if params.contains_key("lambda") && params.contains_key("delta") {
        return Err(usage_err("--lambda and --delta are mutually exclusive"));
    }

    for (k, v) in command.defaults() {
        // lambda default only applies when no explicit mesh was given
        if *k == "lambda" && params.contains_key("delta") {
            continue;
        }
        params.entry(k.to_string()).or_insert_with(|| v.to_string());
    }

    for k in command.required() {
        if !params.contains_key(*k) {
            return Err(usage_err(format!(
                "{} requires --{k}",
                command.name()
            )));
        }
    }
    if matches!(command, Command::Rho | Command::Psi | Command::Simulate)
        && !params.contains_key("input")
        && !params.contains_key("n")
    {
        return Err(usage_err(format!("{} requires --n (or --input)", command.name())));
    }
    if command == Command::Rho && !params.contains_key("input") && !params.contains_key("theta") {
        return Err(usage_err("rho requires --theta (or --input)"));
    }
    // simulated rho/psi runs fall back to the protocol mesh
    if matches!(command, Command::Simulate | Command::Rho | Command::Psi | Command::Ks)
        && !params.contains_key("input")
        && !params.contains_key("delta")
    {
        params
            .entry("lambda".to_string())
            .or_insert_with(|| "0.6".to_string());
    }

    let format = format.unwrap_or(command.default_format());
    if command == Command::Analytic && format == Format::Csv {
        return Err(usage_err("analytic emits JSON only"));
    }

    Ok(ExperimentSpec {
        command,
        params,
        output_path,
        format,
        workers,
    })
}

impl ExperimentSpec {
    /// Canonical provenance string: command plus sorted `key=value` pairs.
    pub fn config_string(&self) -> String {
        let mut s = self.command.name().to_string();
        for (k, v) in &self.params {
            let _ = write!(s, " {k}={v}");
        }
        s
    }

    pub fn provenance(&self) -> Provenance {
        Provenance {
            seed: self.opt_u64("seed").unwrap_or(None).unwrap_or(0),
            config: self.config_string(),
        }
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    fn req(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| usage_err(format!("{} requires --{key}", self.command.name())))
    }

    fn f64(&self, key: &str) -> Result<f64> {
        self.req(key)?
            .parse()
            .map_err(|_| usage_err(format!("--{key}: expected a number")))
    }

    fn opt_f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| usage_err(format!("--{key}: expected a number")))
            })
            .transpose()
    }

    fn usize(&self, key: &str) -> Result<usize> {
        self.req(key)?
            .parse()
            .map_err(|_| usage_err(format!("--{key}: expected an integer")))
    }

    fn opt_u64(&self, key: &str) -> Result<Option<u64>> {
        self.get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| usage_err(format!("--{key}: expected an integer")))
            })
            .transpose()
    }

    fn f64_list(&self, key: &str) -> Result<Vec<f64>> {
        self.req(key)?
            .split(',')
            .map(|t| {
                t.parse()
                    .map_err(|_| usage_err(format!("--{key}: expected numbers")))
            })
            .collect()
    }

    fn usize_list(&self, key: &str) -> Result<Vec<usize>> {
        self.req(key)?
            .split(',')
            .map(|t| {
                t.parse()
                    .map_err(|_| usage_err(format!("--{key}: expected integers")))
            })
            .collect()
    }

    fn scheme(&self) -> Result<Scheme> {
        match self.get("scheme").unwrap_or("euler") {
            "euler" => Ok(Scheme::Euler),
            "exact" => Ok(Scheme::Exact),
            other => Err(usage_err(format!("--scheme: euler or exact, got {other:?}"))),
        }
    }

    fn mesh(&self) -> Result<MeshSpec> {
        if let Some(delta) = self.opt_f64("delta")? {
            Ok(MeshSpec::Delta(delta))
        } else {
            Ok(MeshSpec::Lambda(self.opt_f64("lambda")?.unwrap_or(0.6)))
        }
    }

    fn grid(&self) -> Result<SampleGrid> {
        let n = self.usize("n")?;
        match self.mesh()? {
            MeshSpec::Lambda(lambda) => SampleGrid::from_lambda(n, lambda),
            MeshSpec::Delta(delta) => SampleGrid::new(n, delta),
        }
    }
}

fn simulate_pair(spec: &ExperimentSpec) -> Result<PathPair> {
    let params = OuParams::new(spec.f64("theta")?)?;
    let grid = spec.grid()?;
    let seed = spec.opt_u64("seed")?.unwrap_or(42);
    match spec.scheme()? {
        Scheme::Euler => simulate_euler(&params, &grid, seed),
        Scheme::Exact => simulate_exact(&params, &grid, seed),
        Scheme::External => Err(usage_err("--scheme: euler or exact")),
    }
}

/// Loads `--input` if present, simulates otherwise.
fn load_pair(spec: &ExperimentSpec) -> Result<PathPair> {
    match spec.get("input") {
        Some(path) => {
            let table = io::read_csv(std::path::Path::new(path))?;
            let (t, x1, x2) = io::pair_columns(&table)?;
            let grid = SampleGrid::from_times(&t)?;
            PathPair::from_samples(grid, x1, x2)
        }
        None => simulate_pair(spec),
    }
}

fn yule_rows(result: &YuleResult) -> (Vec<&'static str>, Vec<f64>) {
    let mut cols = vec!["n", "delta", "T_n", "y11", "y12", "y22", "rho"];
    let mut row = vec![
        result.n as f64,
        result.horizon / result.n as f64,
        result.horizon,
        result.y11,
        result.y12,
        result.y22,
        result.rho,
    ];
    if let Some(psi) = result.psi {
        cols.push("psi");
        row.push(psi);
    }
    (cols, row)
}

fn yule_json(result: &YuleResult) -> serde_json::Value {
    serde_json::json!({
        "n": result.n,
        "delta": result.horizon / result.n as f64,
        "horizon": result.horizon,
        "y11": result.y11,
        "y12": result.y12,
        "y22": result.y22,
        "rho": result.rho,
        "psi": result.psi,
        "mode": format!("{:?}", result.mode).to_lowercase(),
    })
}

/// Runs the full replication table: one row per `(theta, n)` cell with the
/// summary of the chosen statistic. Columns: `theta,n,T_n,mean,median,stddev`.
pub fn run_table1(spec: &ExperimentSpec) -> Result<Vec<Vec<f64>>> {
    let thetas = spec.f64_list("theta")?;
    let ns = spec.usize_list("n")?;
    let lambda = spec.opt_f64("lambda")?.unwrap_or(0.6);
    let reps = spec.usize("reps")?;
    let seed = spec.opt_u64("seed")?.unwrap_or(42);
    let scheme = spec.scheme()?;
    let statistic = match spec.get("stat").unwrap_or("rho") {
        "rho" => Statistic::Rho,
        "psi" => Statistic::Psi,
        other => return Err(usage_err(format!("--stat: rho or psi, got {other:?}"))),
    };

    let mut rows = Vec::with_capacity(thetas.len() * ns.len());
    let mut cell = 0u64;
    for &theta in &thetas {
        for &n in &ns {
            // one master substream per cell so cells are independent
            let cell_seed = substream_seed(seed, cell, 2);
            cell += 1;
            let config = McConfig {
                theta,
                n,
                mesh: MeshSpec::Lambda(lambda),
                replications: reps,
                master_seed: cell_seed,
                scheme,
                statistic,
                workers: spec.workers,
            };
            let run = run_mc(&config)?;
            let summary = summarize(&run.values)?;
            let horizon = config.grid()?.horizon();
            rows.push(vec![
                theta,
                n as f64,
                horizon,
                summary.mean,
                summary.median,
                summary.stddev,
            ]);
        }
    }
    Ok(rows)
}

/// External-series assessment: the correlation, its standardization, a
/// two-sided normal p-value, and the applicable rate-bound context.
#[derive(Debug, Clone, Serialize)]
pub struct AssessReport {
    pub n: usize,
    pub delta: f64,
    pub horizon: f64,
    pub theta: f64,
    pub rho: f64,
    pub psi: f64,
    /// `2 (1 - Phi(|psi|))`.
    pub p_value: f64,
    /// Human-readable p-value; tiny values print as `<1e-15`.
    pub p_value_label: String,
    /// Discrete-sampling Kolmogorov rate bound (up to a constant), when
    /// `n delta > e`.
    pub rate_discrete: Option<f64>,
    pub rate_branch: Option<String>,
    /// Explicit-constant continuous-time bound, when `T > T*(theta)`.
    pub rate_continuous: Option<f64>,
    pub t_star: f64,
}

/// Computes the assessment report for an ingested or simulated pair.
pub fn assess(spec: &ExperimentSpec) -> Result<AssessReport> {
    let theta = spec.f64("theta")?;
    let pair = load_pair(spec)?;
    let result = rho_discrete_standardized(&pair, theta)?;
    let psi = result.psi.expect("standardized result casts psi");
    let p_value = 2.0 * norm_sf(psi.abs());
    let p_value_label = if p_value < 1e-15 {
        "<1e-15".to_string()
    } else {
        format!("{p_value:.6e}")
    };
    let n = result.n;
    let delta = result.horizon / n as f64;
    let rate_discrete = analytic::rate_bound_discrete(theta, n, delta).ok();
    let t_star = analytic::t_star(theta)?;
    let rate_continuous = analytic::rate_bound_continuous(theta, result.horizon)
        .ok()
        .map(|b| b.value);
    Ok(AssessReport {
        n,
        delta,
        horizon: result.horizon,
        theta,
        rho: result.rho,
        psi,
        p_value,
        p_value_label,
        rate_discrete: rate_discrete.as_ref().map(|b| b.value),
        rate_branch: rate_discrete.map(|b| match b.active_branch {
            Some(analytic::DiscreteBranch::HorizonTerm) => "horizon".to_string(),
            Some(analytic::DiscreteBranch::MeshTerm) => "mesh".to_string(),
            None => "unknown".to_string(),
        }),
        rate_continuous,
        t_star,
    })
}

fn analytic_value(spec: &ExperimentSpec) -> Result<(serde_json::Value, f64)> {
    let name = spec.req("name")?;
    let mut used: Vec<(&str, f64)> = Vec::new();
    macro_rules! arg {
        ($key:literal) => {{
            let v = spec.f64($key)?;
            used.push(($key, v));
            v
        }};
    }
    let value = match name {
        "var_ft" => analytic::var_ft(arg!("theta"), arg!("t"))?,
        "var_ft_limit" => analytic::var_ft_limit(arg!("theta"))?,
        "deviation_constant" => analytic::var_limit_deviation_constant(arg!("theta"))?,
        "mu_theta" => analytic::mu_theta(arg!("theta"), arg!("t"))?,
        "mean_sq_xbar" => analytic::mean_sq_xbar(arg!("theta"), arg!("t"))?,
        "clt_rate_constant" => analytic::clt_rate_constant(arg!("theta"))?,
        "cst" => analytic::cst_theta(arg!("theta"))?,
        "k_constant" => analytic::k_constant(),
        "t_star" => analytic::t_star(arg!("theta"))?,
        "rate_continuous" => analytic::rate_bound_continuous(arg!("theta"), arg!("t"))?.value,
        "rate_discrete" => {
            let theta = arg!("theta");
            let n = spec.usize("n")?;
            used.push(("n", n as f64));
            analytic::rate_bound_discrete(theta, n, arg!("delta"))?.value
        }
        "mgf" => analytic::product_normal_mgf(arg!("sigma1"), arg!("sigma2"), arg!("beta"))?,
        "optimal_epsilon" => analytic::mp_optimal_epsilon(arg!("beta"))?.0,
        "optimal_epsilon_bound" => analytic::mp_optimal_epsilon(arg!("beta"))?.1,
        "tail_bound" => {
            analytic::chaos_tail_bound(arg!("y"), arg!("beta"), arg!("var"), arg!("k3"))?
        }
        "discretization_bound" => {
            let theta = arg!("theta");
            let n = spec.usize("n")?;
            used.push(("n", n as f64));
            analytic::discretization_error_bound(theta, n, arg!("delta"))?
        }
        "discretization_constant" => analytic::discretization_constant(arg!("theta"))?,
        other => {
            return Err(usage_err(format!(
                "unknown formula {other:?}; see README for the list"
            )))
        }
    };
    let params: serde_json::Map<String, serde_json::Value> = used
        .into_iter()
        .map(|(k, v)| (k.to_string(), serde_json::json!(v)))
        .collect();
    Ok((
        serde_json::json!({ "name": name, "params": params, "value": value }),
        value,
    ))
}

fn kernel_check(spec: &ExperimentSpec) -> Result<serde_json::Value> {
    let theta = spec.f64("theta")?;
    let t = spec.f64("t")?;
    let m = spec.usize("m")?;
    let eigen_m = spec.usize("eigen_m")?;
    let contraction_m = spec.usize("contraction_m")?;
    let rank = spec.usize("rank")?;

    let var_closed_form = analytic::var_ft(theta, t)?;
    let var_quadrature = 2.0
        * l2_norm_sq_extrapolated(
            |x, y| h_tilde_eval(theta, t, x, y),
            Domain::SymmetricTT,
            t,
            m,
        )?;
    // the symmetrized kernel only has support where its arguments straddle
    // zero, so the contraction must integrate over the full [-T, T] square
    let cgrid = KernelGrid::midpoint(Domain::SymmetricTT, t, contraction_m)?;
    let contraction_value = contraction_norm_sq(theta, t, &cgrid);
    let bound = contraction_bound(theta, t)?;
    // full spectrum so the trace keeps its tail mass; only the report of
    // individual eigenvalues is truncated
    let egrid = KernelGrid::midpoint(Domain::PositiveT, t, eigen_m)?;
    let spectrum = nystrom_spectrum(|x, y| k_t_eval(theta, t, x, y), &egrid, eigen_m)?;
    let top: Vec<f64> = spectrum.lambdas.iter().take(rank).copied().collect();
    let trace_closed_form = analytic::mu_theta(theta, t)? / (2.0 * theta);
    Ok(serde_json::json!({
        "theta": theta,
        "t": t,
        "var_closed_form": var_closed_form,
        "var_quadrature": var_quadrature,
        "contraction_value": contraction_value,
        "contraction_bound": bound,
        "top_eigenvalues": top,
        "trace_quadrature": spectrum.trace,
        "trace_closed_form": trace_closed_form,
        "hs_norm_sq": spectrum.hs_norm_sq,
    }))
}

fn render_csv(spec: &ExperimentSpec, columns: &[&str], rows: &[Vec<f64>]) -> String {
    io::csv_string(&spec.provenance(), columns, rows)
}

fn render_json(spec: &ExperimentSpec, payload: serde_json::Value) -> Result<String> {
    let doc = io::json_envelope(&spec.provenance(), payload);
    let mut text = serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::Parse(format!("json encode: {e}")))?;
    text.push('\n');
    Ok(text)
}

fn to_json<T: Serialize>(value: &T) -> Result<serde_json::Value> {
    serde_json::to_value(value).map_err(|e| Error::Parse(format!("json encode: {e}")))
}

/// Executes a parsed spec and renders its artifact.
pub fn run(spec: &ExperimentSpec) -> Result<String> {
    match spec.command {
        Command::Simulate => {
            let pair = simulate_pair(spec)?;
            let times = pair.grid.times();
            match spec.format {
                Format::Csv => {
                    let rows: Vec<Vec<f64>> = times
                        .iter()
                        .zip(pair.x1.iter().zip(pair.x2.iter()))
                        .map(|(&t, (&a, &b))| vec![t, a, b])
                        .collect();
                    Ok(render_csv(spec, &["t", "x1", "x2"], &rows))
                }
                Format::Json => render_json(
                    spec,
                    serde_json::json!({
                        "n": pair.grid.n(),
                        "delta": pair.grid.delta(),
                        "horizon": pair.grid.horizon(),
                        "scheme": pair.scheme.to_string(),
                        "warning": pair.warning,
                        "t": times,
                        "x1": pair.x1,
                        "x2": pair.x2,
                    }),
                ),
            }
        }
        Command::Rho => {
            let pair = load_pair(spec)?;
            let result = match spec.get("mode").unwrap_or("discrete") {
                "discrete" => rho_discrete(&pair)?,
                "quadrature" => rho_quadrature(&pair)?,
                other => {
                    return Err(usage_err(format!(
                        "--mode: discrete or quadrature, got {other:?}"
                    )))
                }
            };
            match spec.format {
                Format::Csv => {
                    let (cols, row) = yule_rows(&result);
                    Ok(render_csv(spec, &cols, &[row]))
                }
                Format::Json => render_json(spec, yule_json(&result)),
            }
        }
        Command::Psi => {
            let pair = load_pair(spec)?;
            let result = rho_discrete_standardized(&pair, spec.f64("theta")?)?;
            match spec.format {
                Format::Csv => {
                    let (cols, row) = yule_rows(&result);
                    Ok(render_csv(spec, &cols, &[row]))
                }
                Format::Json => render_json(spec, yule_json(&result)),
            }
        }
        Command::McTable => {
            let rows = run_table1(spec)?;
            match spec.format {
                Format::Csv => Ok(render_csv(
                    spec,
                    &["theta", "n", "T_n", "mean", "median", "stddev"],
                    &rows,
                )),
                Format::Json => {
                    let cells: Vec<serde_json::Value> = rows
                        .iter()
                        .map(|r| {
                            serde_json::json!({
                                "theta": r[0], "n": r[1], "T_n": r[2],
                                "mean": r[3], "median": r[4], "stddev": r[5],
                            })
                        })
                        .collect();
                    render_json(spec, serde_json::json!({ "cells": cells }))
                }
            }
        }
        Command::Ks => {
            let config = McConfig {
                theta: spec.f64("theta")?,
                n: spec.usize("n")?,
                mesh: spec.mesh()?,
                replications: spec.usize("reps")?,
                master_seed: spec.opt_u64("seed")?.unwrap_or(42),
                scheme: spec.scheme()?,
                statistic: Statistic::Psi,
                workers: spec.workers,
            };
            let run = run_mc(&config)?;
            match spec.get("emit").unwrap_or("summary") {
                "summary" => {
                    let ks = kolmogorov_distance(&run.values)?;
                    let summary = summarize(&run.values)?;
                    match spec.format {
                        Format::Csv => Ok(render_csv(
                            spec,
                            &[
                                "D",
                                "location",
                                "sample_size",
                                "mean",
                                "median",
                                "stddev",
                                "skipped",
                            ],
                            &[vec![
                                ks.distance,
                                ks.location,
                                ks.sample_size as f64,
                                summary.mean,
                                summary.median,
                                summary.stddev,
                                run.skipped.len() as f64,
                            ]],
                        )),
                        Format::Json => render_json(
                            spec,
                            serde_json::json!({
                                "ks": to_json(&ks)?,
                                "summary": to_json(&summary)?,
                                "skipped": run.skipped,
                            }),
                        ),
                    }
                }
                "samples" => {
                    let rows: Vec<Vec<f64>> = run
                        .replications
                        .iter()
                        .zip(run.values.iter())
                        .map(|(&r, &v)| vec![r as f64, v])
                        .collect();
                    Ok(render_csv(spec, &["replication", "value"], &rows))
                }
                "ecdf" => {
                    let e = ecdf(&run.values)?;
                    let rows: Vec<Vec<f64>> = e
                        .xs
                        .iter()
                        .zip(e.fractions.iter())
                        .map(|(&x, &f)| vec![x, f])
                        .collect();
                    Ok(render_csv(spec, &["x", "F"], &rows))
                }
                "histogram" => {
                    let bins = spec.usize("bins")?;
                    let h = histogram(&run.values, bins)?;
                    let rows: Vec<Vec<f64>> = (0..h.counts.len())
                        .map(|i| vec![h.edges[i], h.edges[i + 1], h.counts[i] as f64])
                        .collect();
                    Ok(render_csv(spec, &["bin_left", "bin_right", "count"], &rows))
                }
                other => Err(usage_err(format!(
                    "--emit: summary, samples, ecdf or histogram, got {other:?}"
                ))),
            }
        }
        Command::Analytic => {
            let (payload, _) = analytic_value(spec)?;
            render_json(spec, payload)
        }
        Command::MeshPlan => {
            let n = spec.usize("n")?;
            let plan = match spec.opt_f64("lambda")? {
                Some(lambda) => analytic::mesh_plan(n, lambda)?,
                None => analytic::optimal_mesh(n)?,
            };
            match spec.format {
                Format::Csv => Ok(render_csv(
                    spec,
                    &["n", "lambda", "delta", "T_n", "predicted_rate"],
                    &[vec![
                        plan.n as f64,
                        plan.lambda,
                        plan.delta,
                        plan.horizon,
                        plan.predicted_rate,
                    ]],
                )),
                Format::Json => render_json(
                    spec,
                    serde_json::json!({
                        "n": plan.n,
                        "lambda": plan.lambda,
                        "delta": plan.delta,
                        "horizon": plan.horizon,
                        "predicted_rate": plan.predicted_rate,
                        "infill": plan.infill_regime(),
                    }),
                ),
            }
        }
        Command::KernelCheck => {
            let payload = kernel_check(spec)?;
            match spec.format {
                Format::Json => render_json(spec, payload),
                Format::Csv => {
                    let cols = [
                        "var_closed_form",
                        "var_quadrature",
                        "contraction_value",
                        "contraction_bound",
                    ];
                    let row: Vec<f64> = cols
                        .iter()
                        .map(|c| payload[c].as_f64().unwrap_or(f64::NAN))
                        .collect();
                    Ok(render_csv(spec, &cols, &[row]))
                }
            }
        }
        Command::Assess => {
            let report = assess(spec)?;
            match spec.format {
                Format::Json => render_json(spec, to_json(&report)?),
                Format::Csv => Ok(render_csv(
                    spec,
                    &["n", "delta", "T_n", "rho", "psi", "p_value"],
                    &[vec![
                        report.n as f64,
                        report.delta,
                        report.horizon,
                        report.rho,
                        report.psi,
                        report.p_value,
                    ]],
                )),
            }
        }
    }
}

/// Writes the artifact to `--output`, or returns it for stdout.
pub fn emit(spec: &ExperimentSpec, text: &str) -> Result<Option<String>> {
    match &spec.output_path {
        Some(path) => {
            io::write_atomic(path, text.as_bytes())?;
            Ok(None)
        }
        None => Ok(Some(text.to_string())),
    }
}
