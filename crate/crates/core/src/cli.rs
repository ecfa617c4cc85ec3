//! The `langevin` command-line interface.
//!
//! Every subcommand reads a JSON config and writes JSON (or CSV) to stdout.
//! With `--out DIR`, results are also written to files in `DIR` together with
//! a `manifest.json` recording the config, seed, version, wall time and the
//! SHA-256 digest of every output file.
//!
//! Exit codes: 0 success, 2 configuration error, 3 infeasible plan or missing
//! capability, 4 numeric failure.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::metrics::{gaussian_chain_law, gaussian_w2, scaled_error_check, wasserstein_empirical, GaussianLaw, Provenance, SampleCloud};
use crate::moments::{
    khintchine_constant, moment_bound_inside_ball, moment_bound_outside_ball, moment_bound_outside_ball_general,
    moment_bound_strong, MomentBoundReport,
};
use crate::planner::{
    complexity_reference, evaluate_bound, plan, BoundQuery, BoundTerms, ComplexityAlgorithm, ComplexityInputs, Metric,
    PlannerInputs, Recipe,
};
use crate::potentials::TargetSpec;
use crate::samplers::{final_states, SamplerConfig};

#[derive(Debug, Parser)]
#[command(name = "langevin", version, about = "Langevin samplers, tuning recipes and error oracles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads for chain fan-out (default: logical cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Directory receiving output files and the run manifest.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Seed overriding the config's.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tune (α, h, γ, K) for a target accuracy.
    Plan {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run independent chains and write their final states as CSV.
    Sample {
        #[arg(long)]
        config: PathBuf,
    },
    /// Empirical W₁ and W₂ between two sample CSV files.
    Measure { a: PathBuf, b: PathBuf },
    /// Evaluate a recipe's three-term error bound at given parameters.
    Bounds {
        #[arg(long)]
        config: PathBuf,
    },
    /// Upper bound on a moment of a log-concave target.
    Moments {
        #[arg(long)]
        config: PathBuf,
    },
    /// Minimize the constant of the log-concave moment inequality.
    Khintchine {
        #[arg(long)]
        k: f64,
    },
    /// Iteration counts of every algorithm/metric pair as CSV.
    ComplexityTable {
        #[arg(long)]
        config: PathBuf,
    },
    /// Plan, sample and measure the result against the target.
    Bench {
        #[arg(long)]
        config: PathBuf,
    },
}

/// A failure carrying the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    fn context(self, ctx: &str) -> Self {
        Self { code: self.code, message: format!("{ctx}: {}", self.message) }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidArgument(_) | Error::Domain(_) => 2,
            Error::Capability(_) | Error::Infeasible { .. } | Error::Unsupported(_) | Error::Capacity(_) => 3,
            Error::Divergence { .. } | Error::NumericDegeneracy { .. } | Error::Numeric(_) => 4,
        };
        Self { code, message: e.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn read_config<T: DeserializeOwned>(path: &Path) -> CliResult<(T, serde_json::Value)> {
    let text = fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let mut de = serde_json::Deserializer::from_str(&text);
    let parsed: T = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = e.path().to_string();
        if field == "." {
            CliError::config(format!("{}: {}", path.display(), e.inner()))
        } else {
            CliError::config(format!("{}: field `{field}`: {}", path.display(), e.inner()))
        }
    })?;
    let echo = serde_json::from_str(&text).map_err(|e| CliError::config(e.to_string()))?;
    Ok((parsed, echo))
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string_pretty(value).map_err(|e| CliError { code: 4, message: e.to_string() })
}

fn io_error(e: std::io::Error) -> CliError {
    CliError { code: 4, message: format!("I/O error: {e}") }
}

/// Reproducibility record written next to every output set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    pub wall_seconds: f64,
    /// Normals consumed across all chains, when sampling.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub draws: Option<u64>,
    /// SHA-256 (hex) of each output file.
    pub outputs: BTreeMap<String, String>,
}

struct Outputs {
    dir: Option<PathBuf>,
    files: BTreeMap<String, String>,
}

impl Outputs {
    fn new(dir: Option<PathBuf>) -> CliResult<Self> {
        if let Some(d) = &dir {
            fs::create_dir_all(d).map_err(io_error)?;
        }
        Ok(Self { dir, files: BTreeMap::new() })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> CliResult<()> {
        if let Some(d) = &self.dir {
            fs::write(d.join(name), bytes).map_err(io_error)?;
            self.files.insert(name.to_string(), hex::encode(Sha256::digest(bytes)));
        }
        Ok(())
    }

    fn finish(self, command: &str, config: serde_json::Value, seed: Option<u64>, draws: Option<u64>, start: Instant) -> CliResult<()> {
        let Some(dir) = self.dir else { return Ok(()) };
        let manifest = RunManifest {
            command: command.into(),
            config,
            seed,
            version: env!("CARGO_PKG_VERSION").into(),
            wall_seconds: start.elapsed().as_secs_f64(),
            draws,
            outputs: self.files,
        };
        fs::write(dir.join("manifest.json"), to_json(&manifest)?).map_err(io_error)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanRequest {
    alg: Recipe,
    p: usize,
    #[serde(rename = "M")]
    m: f64,
    #[serde(rename = "M2", default)]
    m2: Option<f64>,
    #[serde(default)]
    mu2: Option<f64>,
    #[serde(rename = "D", default)]
    d: Option<f64>,
    #[serde(default)]
    beta: Option<f64>,
    eps: f64,
    q: u8,
}

impl PlanRequest {
    fn inputs(&self) -> PlannerInputs {
        PlannerInputs { p: self.p, m: self.m, m2: self.m2, mu2: self.mu2, d: self.d, beta: self.beta, epsilon: self.eps, q: self.q }
    }
}

fn default_chains() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SampleRequest {
    target: TargetSpec,
    sampler: SamplerConfig,
    #[serde(default = "default_chains")]
    n_chains: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "snake_case", deny_unknown_fields)]
enum MomentRequest {
    Strong {
        p: usize,
        m: f64,
        a: f64,
    },
    InsideBall {
        p: usize,
        m: f64,
        #[serde(rename = "R")]
        radius: f64,
        #[serde(rename = "M")]
        big_m: f64,
        a: f64,
    },
    OutsideBall {
        p: usize,
        m: f64,
        #[serde(rename = "R")]
        radius: f64,
        #[serde(rename = "M")]
        big_m: f64,
        a: f64,
    },
    OutsideBallGeneral {
        p: usize,
        m: f64,
        #[serde(rename = "R")]
        radius: f64,
        a: f64,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Reference {
    /// Exact law of the chain from mean/covariance propagation.
    #[default]
    Oracle,
    /// An iid cloud from the target, compared by exact assignment.
    Iid,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BenchRequest {
    target: TargetSpec,
    alg: Recipe,
    eps: f64,
    q: u8,
    n_chains: usize,
    /// Cap on the planned number of steps.
    #[serde(default)]
    max_steps: Option<u64>,
    #[serde(default)]
    reference: Reference,
    #[serde(default)]
    seed: u64,
}

/// Outcome of `bench`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub recipe: Recipe,
    pub q: u8,
    pub alpha: f64,
    pub h: f64,
    pub gamma: Option<f64>,
    pub planned_k: u64,
    pub used_k: u64,
    pub n_chains: usize,
    /// Empirical `W_q` between the chains' final states and an iid target cloud of equal size.
    pub empirical_wq: f64,
    /// Exact `W₂` between the chain law at `used_k` and the target.
    pub exact_w2: f64,
    /// Theorem bound at the planned parameters and `used_k`.
    pub theorem_bound: f64,
    pub bound_terms: BoundTerms,
    /// `ε√μ₂`.
    pub target: f64,
    pub reference: String,
    /// Whether the reference distance meets the scaled criterion.
    pub pass: bool,
}

fn samples_csv(states: &[Vec<f64>]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(vec![]);
    let fail = |e: csv::Error| CliError { code: 4, message: e.to_string() };
    w.write_record(["chain", "coord", "value"]).map_err(fail)?;
    for (c, x) in states.iter().enumerate() {
        for (j, v) in x.iter().enumerate() {
            w.write_record([c.to_string(), j.to_string(), v.to_string()]).map_err(fail)?;
        }
    }
    w.into_inner().map_err(|e| CliError { code: 4, message: e.to_string() })
}

/// Reads a `chain,coord,value` CSV into a cloud with one point per chain.
pub fn read_samples_csv(path: &Path) -> std::result::Result<SampleCloud, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    let mut rows: BTreeMap<usize, BTreeMap<usize, f64>> = BTreeMap::new();
    for (line, record) in reader.deserialize::<(usize, usize, f64)>().enumerate() {
        let (c, j, v) = record.map_err(|e| CliError::config(format!("{} row {}: {e}", path.display(), line + 1)))?;
        rows.entry(c).or_default().insert(j, v);
    }
    let points: Vec<Vec<f64>> = rows.into_values().map(|r| r.into_values().collect()).collect();
    SampleCloud::new(&points, Provenance::ChainFinalStates).map_err(|e| CliError::from(e).context(&path.display().to_string()))
}

fn cmd_plan(config: &Path, out: &mut dyn Write, outputs: &mut Outputs) -> CliResult<serde_json::Value> {
    let (req, echo): (PlanRequest, _) = read_config(config)?;
    let plan = plan(req.alg, &req.inputs())?;
    let json = to_json(&plan)?;
    writeln!(out, "{json}").map_err(io_error)?;
    outputs.write("plan.json", json.as_bytes())?;
    Ok(echo)
}

fn cmd_sample(config: &Path, seed: Option<u64>, out: &mut dyn Write, outputs: &mut Outputs) -> CliResult<(serde_json::Value, u64, u64)> {
    let (mut req, mut echo): (SampleRequest, serde_json::Value) = read_config(config)?;
    if req.n_chains == 0 {
        return Err(CliError::config("n_chains must be positive"));
    }
    if let Some(s) = seed {
        req.sampler.seed = s;
        echo["sampler"]["seed"] = s.into();
    }
    let potential = req.target.build()?;
    let states = final_states(&req.sampler, potential.as_ref(), req.n_chains)?;
    let csv = samples_csv(&states)?;
    if outputs.dir.is_some() {
        outputs.write("samples.csv", &csv)?;
    } else {
        out.write_all(&csv).map_err(io_error)?;
    }
    let p = potential.dim() as u64;
    let per_chain = if req.sampler.algorithm.is_kinetic() { p + 4 * p * req.sampler.steps as u64 } else { p * req.sampler.steps as u64 };
    Ok((echo, req.sampler.seed, per_chain * req.n_chains as u64))
}

fn cmd_measure(a: &Path, b: &Path, out: &mut dyn Write, outputs: &mut Outputs) -> CliResult<serde_json::Value> {
    let ca = read_samples_csv(a)?;
    let cb = read_samples_csv(b)?;
    let w1 = wasserstein_empirical(&ca, &cb, 1)?;
    let w2 = wasserstein_empirical(&ca, &cb, 2)?;
    let json = to_json(&serde_json::json!({ "w1": w1, "w2": w2, "n": ca.n(), "p": ca.p() }))?;
    writeln!(out, "{json}").map_err(io_error)?;
    outputs.write("measure.json", json.as_bytes())?;
    Ok(serde_json::json!({ "a": a.display().to_string(), "b": b.display().to_string() }))
}

fn cmd_bounds(config: &Path, out: &mut dyn Write, outputs: &mut Outputs) -> CliResult<serde_json::Value> {
    let (query, echo): (BoundQuery, _) = read_config(config)?;
    let terms = evaluate_bound(&query)?;
    let json = to_json(&serde_json::json!({ "bound_terms": terms, "total": terms.total() }))?;
    writeln!(out, "{json}").map_err(io_error)?;
    outputs.write("bounds.json", json.as_bytes())?;
    Ok(echo)
}

fn single_term(regime: &str, a: f64, name: &str, bound: f64) -> MomentBoundReport {
    MomentBoundReport {
        a,
        regime: regime.into(),
        bound,
        components: BTreeMap::from([(name.to_string(), bound)]),
        dominating_term: name.into(),
    }
}

fn cmd_moments(config: &Path, out: &mut dyn Write, outputs: &mut Outputs) -> CliResult<serde_json::Value> {
    let (req, echo): (MomentRequest, _) = read_config(config)?;
    let report = match req {
        MomentRequest::Strong { p, m, a } => single_term("strong", a, "strong", moment_bound_strong(p, m, a)?),
        MomentRequest::InsideBall { p, m, radius, big_m, a } => moment_bound_inside_ball(p, m, radius, big_m, a)?,
        MomentRequest::OutsideBall { p, m, radius, big_m, a } => moment_bound_outside_ball(p, m, radius, big_m, a)?,
        MomentRequest::OutsideBallGeneral { p, m, radius, a } => {
            single_term("outside_ball_general", a, "general", moment_bound_outside_ball_general(p, m, radius, a)?)
        }
    };
    let json = to_json(&report)?;
    writeln!(out, "{json}").map_err(io_error)?;
    outputs.write("moments.json", json.as_bytes())?;
    Ok(echo)
}

fn cmd_khintchine(k: f64, out: &mut dyn Write, outputs: &mut Outputs) -> CliResult<serde_json::Value> {
    let r = khintchine_constant(k)?;
    let json = to_json(&r)?;
    writeln!(out, "{json}").map_err(io_error)?;
    outputs.write("khintchine.json", json.as_bytes())?;
    Ok(serde_json::json!({ "k": k }))
}

fn cmd_complexity_table(config: &Path, out: &mut dyn Write, outputs: &mut Outputs) -> CliResult<serde_json::Value> {
    let (inputs, echo): (ComplexityInputs, _) = read_config(config)?;
    let algorithms = [
        ComplexityAlgorithm::Lmca,
        ComplexityAlgorithm::Lmc,
        ComplexityAlgorithm::LmcHessian,
        ComplexityAlgorithm::Klmc,
        ComplexityAlgorithm::Klmc2,
        ComplexityAlgorithm::Mala,
    ];
    let mut w = csv::Writer::from_writer(vec![]);
    let fail = |e: csv::Error| CliError { code: 4, message: e.to_string() };
    w.write_record(["algorithm", "metric", "iterations"]).map_err(fail)?;
    for alg in algorithms {
        for metric in [Metric::Tv, Metric::W1, Metric::W2] {
            let value = match complexity_reference(&inputs, alg, metric) {
                Ok(v) => v,
                Err(Error::Unsupported(_) | Error::Capability(_)) => continue,
                Err(e) => return Err(e.into()),
            };
            let name = serde_json::to_value(alg).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
            let metric = serde_json::to_value(metric).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
            w.write_record([name, metric, value.to_string()]).map_err(fail)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError { code: 4, message: e.to_string() })?;
    out.write_all(&bytes).map_err(io_error)?;
    outputs.write("complexity.csv", &bytes)?;
    Ok(echo)
}

fn cmd_bench(config: &Path, seed: Option<u64>, out: &mut dyn Write, outputs: &mut Outputs) -> CliResult<(serde_json::Value, u64)> {
    let (mut req, mut echo): (BenchRequest, serde_json::Value) = read_config(config)?;
    if req.n_chains == 0 {
        return Err(CliError::config("n_chains must be positive"));
    }
    if let Some(s) = seed {
        req.seed = s;
        echo["seed"] = s.into();
    }
    let potential = req.target.build()?;
    let target_law = GaussianLaw::target_of(potential.as_ref())
        .map_err(|e| CliError::from(e).context("bench needs a Gaussian target for its oracle and reference sampler"))?;
    let smooth = potential.smoothness();
    let mu2 = target_law.second_moment();
    let inputs = PlannerInputs {
        p: potential.dim(),
        m: smooth.grad_lipschitz,
        m2: smooth.hess_lipschitz,
        mu2: Some(mu2),
        d: None,
        beta: None,
        epsilon: req.eps,
        q: req.q,
    };
    let planned = plan(req.alg, &inputs).map_err(|e| CliError::from(e).context("plan"))?;
    let used_k = req.max_steps.map_or(planned.k, |cap| planned.k.min(cap));
    let mut cfg = planned.sampler_config(req.seed);
    cfg.steps = usize::try_from(used_k).map_err(|_| CliError::config("step count does not fit in memory"))?;

    let states = final_states(&cfg, potential.as_ref(), req.n_chains).map_err(|e| CliError::from(e).context("sample"))?;
    let chain_cloud = SampleCloud::new(&states, Provenance::ChainFinalStates)?;
    // the reference cloud uses a stream no chain can reach
    let reference_cloud = target_law.sample(req.n_chains, req.seed, u64::MAX)?;
    let empirical_wq = wasserstein_empirical(&chain_cloud, &reference_cloud, req.q).map_err(|e| CliError::from(e).context("measure"))?;
    let exact_w2 = gaussian_w2(&gaussian_chain_law(&cfg, potential.as_ref())?.theta, &target_law)?;

    let terms = evaluate_bound(&BoundQuery {
        recipe: req.alg,
        p: inputs.p,
        m: inputs.m,
        m2: inputs.m2,
        mu2,
        alpha: planned.alpha,
        h: planned.h,
        gamma: planned.gamma,
        k: used_k as f64,
        q: req.q,
    })?;
    let distance = match req.reference {
        Reference::Oracle => exact_w2,
        Reference::Iid => empirical_wq,
    };
    let report = BenchReport {
        recipe: req.alg,
        q: req.q,
        alpha: planned.alpha,
        h: planned.h,
        gamma: planned.gamma,
        planned_k: planned.k,
        used_k,
        n_chains: req.n_chains,
        empirical_wq,
        exact_w2,
        theorem_bound: terms.total(),
        bound_terms: terms,
        target: planned.target,
        reference: if req.reference == Reference::Oracle { "oracle".into() } else { "iid".into() },
        pass: scaled_error_check(distance, mu2, req.eps),
    };
    let json = to_json(&report)?;
    writeln!(out, "{json}").map_err(io_error)?;
    outputs.write("report.json", json.as_bytes())?;
    outputs.write("samples.csv", &samples_csv(&states)?)?;
    Ok((echo, req.seed))
}

/// Runs a parsed command, writing primary output to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> CliResult<()> {
    let start = Instant::now();
    let mut outputs = Outputs::new(cli.out.clone())?;
    let (name, echo, seed, draws) = match &cli.command {
        Command::Plan { config } => ("plan", cmd_plan(config, out, &mut outputs)?, None, None),
        Command::Sample { config } => {
            let (echo, seed, draws) = cmd_sample(config, cli.seed, out, &mut outputs).map_err(|e| e.context("sample"))?;
            ("sample", echo, Some(seed), Some(draws))
        }
        Command::Measure { a, b } => ("measure", cmd_measure(a, b, out, &mut outputs)?, None, None),
        Command::Bounds { config } => ("bounds", cmd_bounds(config, out, &mut outputs)?, None, None),
        Command::Moments { config } => ("moments", cmd_moments(config, out, &mut outputs)?, None, None),
        Command::Khintchine { k } => ("khintchine", cmd_khintchine(*k, out, &mut outputs)?, None, None),
        Command::ComplexityTable { config } => {
            ("complexity-table", cmd_complexity_table(config, out, &mut outputs)?, None, None)
        }
        Command::Bench { config } => {
            let (echo, seed) = cmd_bench(config, cli.seed, out, &mut outputs).map_err(|e| e.context("bench"))?;
            ("bench", echo, Some(seed), None)
        }
    };
    outputs.finish(name, echo, seed, draws, start)
}

/// Entry point of the binary: parses arguments, sizes the thread pool and maps errors to exit codes.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::from(4);
        }
    };
    let stdout = std::io::stdout();
    match pool.install(|| run(&cli, &mut stdout.lock())) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
