//! The `cam` command-line tool.
//!
//! Exit codes: 0 on success, 2 for malformed input or configuration, 3 for
//! numerical failure. Diagnostics go to standard error.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::bench::{
    self, ExperimentConfig, StabilityConfig, SweepConfig, write_results_csv, write_sweep_csv,
    write_sweep_summary_csv,
};
use crate::cam::{self, AddedEdge, CamConfig, CamError, EdgePValue};
use crate::data::Dataset;
use crate::graph::{shd, sid, Dag};
use crate::io::{self, IoError};
use crate::simulate::{FunctionKind, SimulationDesign, SimulationError};

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "cam", version, about = "Causal additive model structure learning")]
pub struct Cli {
    /// Worker threads for parallel loops (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate data from a random additive SEM.
    Simulate(SimulateArgs),
    /// Preliminary neighborhood selection only.
    Pns(LearnArgs),
    /// Neighborhood selection and greedy edge search, without pruning.
    Incedge(LearnArgs),
    /// Prune a given graph.
    Prune(PruneArgs),
    /// The full estimator, with a run manifest.
    Fit(LearnArgs),
    /// Compare an estimated graph with the truth.
    Eval(EvalArgs),
    /// Replicated simulation study or misspecification sweep.
    Bench(BenchArgs),
    /// Stability selection over subsamples.
    Stability(StabilityArgs),
}

#[derive(Debug, Args)]
pub struct CamFlags {
    /// Estimator settings as JSON.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Skip neighborhood selection.
    #[arg(long)]
    pub no_pns: bool,
    /// Pruning significance level.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Spline basis functions per predictor.
    #[arg(long)]
    pub basis: Option<usize>,
}

impl CamFlags {
    fn resolve(&self, seed: Option<u64>) -> Result<CamConfig, CliError> {
        let mut cfg: CamConfig = match &self.config {
            Some(path) => io::read_json(path)?,
            None => CamConfig::default(),
        };
        if self.no_pns {
            cfg.use_pns = false;
        }
        if let Some(a) = self.alpha {
            cfg.prune_alpha = a;
        }
        if let Some(b) = self.basis {
            cfg.num_basis = b;
        }
        if let Some(s) = seed {
            cfg.seed = s;
        }
        cfg.validate().map_err(|e| CliError::Input(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Simulation design as JSON; overridden by the flags below.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: u64,
    /// Output prefix: writes `<prefix>.csv`, `<prefix>.truth.edges`,
    /// `<prefix>.truth.json` and `<prefix>.sem.json`.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p_conn: Option<f64>,
    /// gp, sigmoid or linear.
    #[arg(long, value_parser = parse_kind)]
    pub kind: Option<FunctionKind>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
}

fn parse_kind(s: &str) -> Result<FunctionKind, String> {
    serde_json::from_value(serde_json::Value::String(s.into())).map_err(|_| format!("unknown function kind {s:?}"))
}

#[derive(Debug, Args)]
pub struct LearnArgs {
    /// Data as CSV.
    #[arg(long)]
    pub input: PathBuf,
    /// Output prefix (`pns` writes a single JSON file).
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub cam: CamFlags,
}

#[derive(Debug, Args)]
pub struct PruneArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Graph to prune, as an edge list or JSON.
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub cam: CamFlags,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// True graph, as an edge list or JSON.
    pub truth: PathBuf,
    /// Estimated graph.
    pub estimate: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Experiment or sweep configuration as JSON. A sweep has a `base` key.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: u64,
    /// Results CSV. Sweeps also write `<stem>.summary.csv`.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub output: PathBuf,
    /// Subsampling settings as JSON.
    #[arg(long)]
    pub stability: Option<PathBuf>,
    #[command(flatten)]
    pub cam: CamFlags,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<CamError> for CliError {
    fn from(e: CamError) -> Self {
        match e.root() {
            CamError::Fit { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<SimulationError> for CliError {
    fn from(e: SimulationError) -> Self {
        match e {
            SimulationError::Cholesky { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<bench::BenchError> for CliError {
    fn from(e: bench::BenchError) -> Self {
        match e {
            bench::BenchError::Cam(c) => c.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Input("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Input(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(cli.command))
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Pns(a) => cmd_pns(&a),
        Command::Incedge(a) => cmd_incedge(&a),
        Command::Prune(a) => cmd_prune(&a),
        Command::Fit(a) => cmd_fit(&a),
        Command::Eval(a) => cmd_eval(&a),
        Command::Bench(a) => cmd_bench(&a),
        Command::Stability(a) => cmd_stability(&a),
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn load_data(path: &Path) -> Result<Dataset, CliError> {
    let data = io::read_csv(path)?;
    if !data.is_finite() {
        return Err(CliError::Input(format!("{}: non-finite values", path.display())));
    }
    Ok(data)
}

fn write_graph(prefix: &Path, dag: &Dag) -> Result<(), CliError> {
    io::write_edge_list(with_suffix(prefix, ".edges"), dag)?;
    io::write_dag_json(with_suffix(prefix, ".json"), dag)?;
    Ok(())
}

fn cmd_simulate(a: &SimulateArgs) -> Result<(), CliError> {
    let mut design: SimulationDesign = match &a.config {
        Some(path) => io::read_json(path)?,
        None => SimulationDesign::sparse_gp(10, 200),
    };
    if let Some(v) = a.p {
        design.p = v;
    }
    if let Some(v) = a.n {
        design.n = v;
    }
    if a.p_conn.is_some() {
        design.p_conn = a.p_conn;
    }
    if let Some(v) = a.kind {
        design.function_kind = v;
    }
    if let Some(v) = a.gamma {
        design.gamma = v;
    }
    if let Some(v) = a.omega {
        design.omega = v;
    }
    let inst = design.sample(a.seed)?;
    io::write_csv(with_suffix(&a.output, ".csv"), &inst.data)?;
    write_graph(&with_suffix(&a.output, ".truth"), inst.truth())?;
    io::write_json(with_suffix(&a.output, ".sem.json"), &inst.spec)?;
    Ok(())
}

fn cmd_pns(a: &LearnArgs) -> Result<(), CliError> {
    let cfg = a.cam.resolve(a.seed)?;
    let data = load_data(&a.input)?;
    let nbhd = cam::pns(&data, &cfg)?;
    for w in &nbhd.warnings {
        eprintln!("warning: {w}");
    }
    io::write_json(&a.output, &nbhd)?;
    Ok(())
}

fn cmd_incedge(a: &LearnArgs) -> Result<(), CliError> {
    let cfg = a.cam.resolve(a.seed)?;
    let data = load_data(&a.input)?;
    let nbhd = if cfg.use_pns {
        Some(cam::pns(&data, &cfg)?)
    } else {
        None
    };
    let dag = cam::inc_edge(&data, nbhd.as_ref(), &cfg)?;
    write_graph(&a.output, &dag)
}

fn cmd_prune(a: &PruneArgs) -> Result<(), CliError> {
    let cfg = a.cam.resolve(None)?;
    let data = load_data(&a.input)?;
    let dag = io::read_dag(&a.graph)?;
    let report = cam::prune_report(&data, &dag, &cfg)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    write_graph(&a.output, &report.dag)
}

/// Everything needed to reproduce and audit a `fit` run. Contains no
/// timings or thread counts, so reruns are byte-identical.
#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub artifact: &'static str,
    pub version: &'static str,
    pub input: String,
    pub n: usize,
    pub p: usize,
    pub seed: u64,
    pub config: &'a CamConfig,
    pub score_trajectory: &'a [f64],
    pub added_edges: &'a [AddedEdge],
    pub prune_p_values: &'a [EdgePValue],
    pub edges_before_prune: usize,
    pub edges: usize,
    pub warnings: Vec<String>,
}

pub fn cmd_fit(a: &LearnArgs) -> Result<(), CliError> {
    let cfg = a.cam.resolve(a.seed)?;
    let data = load_data(&a.input)?;
    let run = cam::cam_pipeline_traced(&data, &cfg)?;
    let mut warnings: Vec<String> = run
        .neighborhoods
        .iter()
        .flat_map(|nb| nb.warnings.iter().cloned())
        .collect();
    warnings.extend(run.pruned.warnings.iter().cloned());
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let dag = run.dag().clone().with_labels(data.names().to_vec())?;
    write_graph(&a.output, &dag)?;
    let manifest = Manifest {
        artifact: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        input: a.input.display().to_string(),
        n: data.n(),
        p: data.p(),
        seed: cfg.seed,
        config: &cfg,
        score_trajectory: &run.search.trajectory,
        added_edges: &run.search.added,
        prune_p_values: &run.pruned.p_values,
        edges_before_prune: run.search.dag.edge_count(),
        edges: dag.edge_count(),
        warnings,
    };
    io::write_json(with_suffix(&a.output, ".manifest.json"), &manifest)?;
    Ok(())
}

impl From<crate::graph::GraphError> for CliError {
    fn from(e: crate::graph::GraphError) -> Self {
        CliError::Input(e.to_string())
    }
}

pub fn cmd_eval(a: &EvalArgs) -> Result<(), CliError> {
    let truth = io::read_dag(&a.truth)?;
    let est = io::read_dag(&a.estimate)?;
    let s = shd(&truth, &est)?;
    let d = sid(&truth, &est)?;
    println!("shd={s} sid={d}");
    Ok(())
}

fn cmd_bench(a: &BenchArgs) -> Result<(), CliError> {
    let raw: serde_json::Value = io::read_json(&a.config)?;
    let bad = |e: serde_json::Error| CliError::Input(format!("{}: {e}", a.config.display()));
    let csv_err = |e: csv::Error| CliError::Input(format!("writing results: {e}"));
    if raw.get("base").is_some() {
        let mut sweep: SweepConfig = serde_json::from_value(raw).map_err(bad)?;
        sweep.base.seed = a.seed;
        let points = bench::run_sweep(&sweep)?;
        report_failures(points.iter().flat_map(|p| &p.rows));
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &points).map_err(csv_err)?;
        write_bytes(&a.output, &buf)?;
        let mut buf = Vec::new();
        write_sweep_summary_csv(&mut buf, &points).map_err(csv_err)?;
        write_bytes(&a.output.with_extension("summary.csv"), &buf)?;
    } else {
        let mut cfg: ExperimentConfig = serde_json::from_value(raw).map_err(bad)?;
        cfg.seed = a.seed;
        let rows = bench::run_experiment(&cfg)?;
        report_failures(&rows);
        let mut buf = Vec::new();
        write_results_csv(&mut buf, &rows).map_err(csv_err)?;
        write_bytes(&a.output, &buf)?;
    }
    Ok(())
}

fn report_failures<'a>(rows: impl IntoIterator<Item = &'a bench::ResultRow>) {
    for row in rows {
        if let Some(e) = &row.error {
            eprintln!("warning: replicate {} ({}): {e}", row.replicate, row.method);
        }
    }
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn cmd_stability(a: &StabilityArgs) -> Result<(), CliError> {
    let cfg = a.cam.resolve(Some(a.seed))?;
    let scfg: StabilityConfig = match &a.stability {
        Some(path) => io::read_json(path)?,
        None => StabilityConfig::default(),
    };
    let data = load_data(&a.input)?;
    let result = bench::stability_selection(&data, &cfg, &scfg, a.seed)?;
    if result.failed_subsamples > 0 {
        eprintln!("warning: {} subsample fits failed", result.failed_subsamples);
    }
    #[derive(Serialize)]
    struct Out<'a> {
        config: &'a CamConfig,
        stability: &'a StabilityConfig,
        seed: u64,
        result: &'a bench::StabilityResult,
    }
    io::write_json(
        &a.output,
        &Out {
            config: &cfg,
            stability: &scfg,
            seed: a.seed,
            result: &result,
        },
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn exit_code_mapping() {
        let fit = CamError::Fit {
            node: 0,
            source: crate::numerics::FitError::SingularFit,
        }
        .in_stage("prune");
        assert_eq!(CliError::from(fit).exit_code(), EXIT_NUMERICAL);
        assert_eq!(
            CliError::from(CamError::Config("x".into())).exit_code(),
            EXIT_INPUT
        );
        assert_eq!(main_with_args(["cam", "nonsense"]), EXIT_INPUT);
    }

    #[test]
    fn suffixes_append() {
        assert_eq!(with_suffix(Path::new("out/run.v1"), ".edges"), PathBuf::from("out/run.v1.edges"));
    }
}
