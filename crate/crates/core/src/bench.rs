//! Experiment harness: replicated simulation runs scored by SHD and SID,
//! misspecification sweeps, stability selection and edge ranking.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::time::Instant;

use rand::seq::index::sample as sample_indices;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cam::{self, cam_pipeline_traced, CamConfig, CamError};
use crate::data::Dataset;
use crate::graph::{full_dag_of_order, shd, sid, Dag};
use crate::seed::{rng_from_seed, split_seed};
use crate::simulate::{FunctionKind, SimulationDesign};

pub const RESULTS_HEADER: [&str; 6] = ["replicate", "method", "shd", "sid", "wall_seconds", "seed"];

/// Reproduced with every edge ranking: the scores come from tests on the
/// same data that chose the graph.
pub const RANKING_CAVEAT: &str =
    "edge scores come from the data used to select the graph and should not be interpreted as p-values";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BenchError {
    #[error("invalid experiment configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Cam(#[from] CamError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Cam,
    /// The graph with no edges.
    EmptyBaseline,
    /// The fully connected DAG of the order found by the edge search.
    FullOrderBaseline,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Cam, Method::EmptyBaseline, Method::FullOrderBaseline];

    pub fn name(self) -> &'static str {
        match self {
            Method::Cam => "cam",
            Method::EmptyBaseline => "empty_baseline",
            Method::FullOrderBaseline => "full_order_baseline",
        }
    }

    /// Runs the method on `data`.
    pub fn estimate(self, data: &Dataset, cfg: &CamConfig) -> Result<Dag, CamError> {
        match self {
            Method::Cam => cam::cam_pipeline(data, cfg),
            Method::EmptyBaseline => Ok(Dag::empty(data.p())),
            Method::FullOrderBaseline => {
                let nbhd = if cfg.use_pns {
                    Some(cam::pns(data, cfg)?)
                } else {
                    None
                };
                let dag = cam::inc_edge(data, nbhd.as_ref(), cfg)?;
                let order = dag.topological_order().expect("edge search returns a DAG");
                Ok(full_dag_of_order(&order))
            }
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A replicated simulation study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub p: usize,
    pub n: usize,
    pub replicates: usize,
    /// Edge probability; `null` means `2 / (p - 1)`.
    #[serde(default)]
    pub p_conn: Option<f64>,
    #[serde(default = "default_kind")]
    pub function_kind: FunctionKind,
    #[serde(default = "one")]
    pub gamma: f64,
    #[serde(default = "one")]
    pub omega: f64,
    #[serde(default)]
    pub cam: CamConfig,
    #[serde(default = "all_methods")]
    pub methods: Vec<Method>,
    #[serde(default)]
    pub seed: u64,
}

fn default_kind() -> FunctionKind {
    FunctionKind::GaussianProcess
}

fn one() -> f64 {
    1.0
}

fn all_methods() -> Vec<Method> {
    Method::ALL.to_vec()
}

impl ExperimentConfig {
    /// Sparse Gaussian-process setting with every method.
    pub fn sparse_gp(p: usize, n: usize, replicates: usize) -> Self {
        ExperimentConfig {
            p,
            n,
            replicates,
            p_conn: None,
            function_kind: FunctionKind::GaussianProcess,
            gamma: 1.0,
            omega: 1.0,
            cam: CamConfig::default(),
            methods: all_methods(),
            seed: 0,
        }
    }

    pub fn design(&self) -> SimulationDesign {
        SimulationDesign {
            p: self.p,
            n: self.n,
            p_conn: self.p_conn,
            function_kind: self.function_kind,
            gamma: self.gamma,
            omega: self.omega,
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.replicates == 0 {
            return Err(BenchError::Config("replicates must be at least 1".into()));
        }
        if self.p < 2 {
            return Err(BenchError::Config(format!("p must be at least 2, got {}", self.p)));
        }
        if self.methods.is_empty() {
            return Err(BenchError::Config("no methods selected".into()));
        }
        if let Some(pc) = self.p_conn {
            if !(0.0..=1.0).contains(&pc) {
                return Err(BenchError::Config(format!("p_conn must lie in [0, 1], got {pc}")));
            }
        }
        if !(self.gamma > 0.0) || !(0.0..=1.0).contains(&self.omega) {
            return Err(BenchError::Config(format!(
                "need gamma > 0 and omega in [0, 1], got {} and {}",
                self.gamma, self.omega
            )));
        }
        self.cam.validate()?;
        Ok(())
    }

    /// Seed of replicate `r`.
    pub fn replicate_seed(&self, r: usize) -> u64 {
        split_seed(self.seed, r as u64)
    }
}

/// One method on one replicate. Failed runs have no metrics and carry the
/// error message instead.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub replicate: usize,
    pub method: Method,
    pub shd: Option<usize>,
    pub sid: Option<usize>,
    pub wall_seconds: f64,
    pub seed: u64,
    #[serde(skip)]
    pub error: Option<String>,
}

impl ResultRow {
    /// The row with timing zeroed, for comparisons across runs.
    pub fn untimed(&self) -> ResultRow {
        ResultRow {
            wall_seconds: 0.0,
            ..self.clone()
        }
    }

    fn record(&self) -> [String; 6] {
        let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        [
            self.replicate.to_string(),
            self.method.to_string(),
            opt(self.shd),
            opt(self.sid),
            format!("{:.6}", self.wall_seconds),
            self.seed.to_string(),
        ]
    }
}

/// Simulates each replicate from its own seed, runs every method, and
/// scores it against the truth. Rows are ordered by replicate, then by the
/// order of `cfg.methods`. A failure affects only its own row.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, BenchError> {
    cfg.validate()?;
    let design = cfg.design();
    let rows: Vec<Vec<ResultRow>> = (0..cfg.replicates)
        .into_par_iter()
        .map(|r| {
            let seed = cfg.replicate_seed(r);
            let row = |method, start: Instant, result: Result<(usize, usize), String>| {
                let wall_seconds = start.elapsed().as_secs_f64();
                let (shd, sid, error) = match result {
                    Ok((a, b)) => (Some(a), Some(b), None),
                    Err(e) => (None, None, Some(e)),
                };
                ResultRow {
                    replicate: r,
                    method,
                    shd,
                    sid,
                    wall_seconds,
                    seed,
                    error,
                }
            };
            let instance = match design.sample(seed) {
                Ok(inst) => inst,
                Err(e) => {
                    let msg = format!("simulation: {e}");
                    return cfg
                        .methods
                        .iter()
                        .map(|&m| row(m, Instant::now(), Err(msg.clone())))
                        .collect();
                }
            };
            cfg.methods
                .iter()
                .map(|&m| {
                    let start = Instant::now();
                    let result = m
                        .estimate(&instance.data, &cfg.cam)
                        .map_err(|e| e.to_string())
                        .and_then(|est| {
                            let truth = instance.truth();
                            Ok((
                                shd(truth, &est).map_err(|e| e.to_string())?,
                                sid(truth, &est).map_err(|e| e.to_string())?,
                            ))
                        });
                    row(m, start, result)
                })
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

pub fn write_results_csv<W: Write>(out: W, rows: &[ResultRow]) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(RESULTS_HEADER)?;
    for row in rows {
        wtr.write_record(row.record())?;
    }
    wtr.flush()?;
    Ok(())
}

/// Mean and sample standard deviation of one method's metrics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub method: Method,
    pub runs: usize,
    pub failures: usize,
    pub mean_shd: f64,
    pub sd_shd: f64,
    pub mean_sid: f64,
    pub sd_sid: f64,
}

/// One summary per method present in `rows`, in `Method` order. Failed
/// rows are counted but excluded from the moments.
pub fn summarize(rows: &[ResultRow]) -> Vec<Summary> {
    let mut by_method: BTreeMap<Method, Vec<&ResultRow>> = BTreeMap::new();
    for row in rows {
        by_method.entry(row.method).or_default().push(row);
    }
    by_method
        .into_iter()
        .map(|(method, rows)| {
            let ok: Vec<(f64, f64)> = rows
                .iter()
                .filter_map(|r| Some((r.shd? as f64, r.sid? as f64)))
                .collect();
            let (mean_shd, sd_shd) = moments(ok.iter().map(|v| v.0));
            let (mean_sid, sd_sid) = moments(ok.iter().map(|v| v.1));
            Summary {
                method,
                runs: rows.len(),
                failures: rows.len() - ok.len(),
                mean_shd,
                sd_shd,
                mean_sid,
                sd_sid,
            }
        })
        .collect()
}

fn moments(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.map(|v| (v - mean).powi(2)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

/// A grid over the noise exponent and the additive mixture weight, each
/// point run as a full experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// `gamma` and `omega` of the base are overridden at each grid point.
    pub base: ExperimentConfig,
    pub gammas: Vec<f64>,
    pub omegas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub gamma: f64,
    pub omega: f64,
    pub rows: Vec<ResultRow>,
    pub summaries: Vec<Summary>,
}

/// Runs every `(gamma, omega)` pair, gamma-major. Grid point `i` uses base
/// seed `split_seed(base.seed, i)`.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepPoint>, BenchError> {
    if cfg.gammas.is_empty() || cfg.omegas.is_empty() {
        return Err(BenchError::Config("empty sweep grid".into()));
    }
    let grid: Vec<(f64, f64)> = cfg
        .gammas
        .iter()
        .flat_map(|&g| cfg.omegas.iter().map(move |&o| (g, o)))
        .collect();
    grid.iter()
        .enumerate()
        .map(|(i, &(gamma, omega))| {
            let point = ExperimentConfig {
                gamma,
                omega,
                seed: split_seed(cfg.base.seed, i as u64),
                ..cfg.base.clone()
            };
            let rows = run_experiment(&point)?;
            let summaries = summarize(&rows);
            Ok(SweepPoint {
                gamma,
                omega,
                rows,
                summaries,
            })
        })
        .collect()
}

/// Per-replicate rows with the grid coordinates prepended.
pub fn write_sweep_csv<W: Write>(out: W, points: &[SweepPoint]) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    let mut header = vec!["gamma", "omega"];
    header.extend(RESULTS_HEADER);
    wtr.write_record(&header)?;
    for pt in points {
        for row in &pt.rows {
            let mut rec = vec![pt.gamma.to_string(), pt.omega.to_string()];
            rec.extend(row.record());
            wtr.write_record(&rec)?;
        }
    }
    wtr.flush()?;
    Ok(())
}

/// One row per grid point and method.
pub fn write_sweep_summary_csv<W: Write>(out: W, points: &[SweepPoint]) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record([
        "gamma", "omega", "method", "runs", "failures", "mean_shd", "sd_shd", "mean_sid", "sd_sid",
    ])?;
    for pt in points {
        for s in &pt.summaries {
            wtr.write_record([
                pt.gamma.to_string(),
                pt.omega.to_string(),
                s.method.to_string(),
                s.runs.to_string(),
                s.failures.to_string(),
                format!("{:.4}", s.mean_shd),
                format!("{:.4}", s.sd_shd),
                format!("{:.4}", s.mean_sid),
                format!("{:.4}", s.sd_sid),
            ])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeRanking {
    /// Pruning-stage p-value ascending, ties by likelihood gain descending.
    PValue,
    /// Likelihood gain at the time the edge was added, descending.
    LikelihoodGain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilityConfig {
    pub subsamples: usize,
    pub subsample_size: usize,
    pub top_k: usize,
    pub threshold: usize,
    pub ranking: EdgeRanking,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        StabilityConfig {
            subsamples: 100,
            subsample_size: 59,
            top_k: 20,
            threshold: 57,
            ranking: EdgeRanking::PValue,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityResult {
    /// Edges in at least `threshold` top lists, lexicographic.
    pub edges: Vec<(usize, usize)>,
    /// How many top lists each edge appeared in, for every edge seen.
    pub counts: BTreeMap<String, usize>,
    pub failed_subsamples: usize,
}

/// Runs the pipeline on `scfg.subsamples` subsamples drawn without
/// replacement and keeps the edges that rank among the `top_k` best in at
/// least `threshold` of them. Subsample `s` is drawn from
/// `split_seed(seed, s)`. A failed subsample contributes an empty list.
pub fn stability_selection(
    data: &Dataset,
    cfg: &CamConfig,
    scfg: &StabilityConfig,
    seed: u64,
) -> Result<StabilityResult, BenchError> {
    cfg.validate()?;
    if scfg.subsample_size > data.n() {
        return Err(BenchError::Config(format!(
            "subsample size {} exceeds n = {}",
            scfg.subsample_size,
            data.n()
        )));
    }
    if scfg.subsamples == 0 {
        return Err(BenchError::Config("subsamples must be at least 1".into()));
    }
    let lists: Vec<Option<Vec<(usize, usize)>>> = (0..scfg.subsamples)
        .into_par_iter()
        .map(|s| {
            let mut rng = rng_from_seed(split_seed(seed, s as u64));
            let mut rows = sample_indices(&mut rng, data.n(), scfg.subsample_size).into_vec();
            rows.sort_unstable();
            let sub = data.select_rows(&rows);
            subsample_top_edges(&sub, cfg, scfg).ok()
        })
        .collect();

    let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut failed_subsamples = 0;
    for list in &lists {
        match list {
            Some(edges) => {
                for &e in edges {
                    *counts.entry(e).or_default() += 1;
                }
            }
            None => failed_subsamples += 1,
        }
    }
    let edges = counts
        .iter()
        .filter(|&(_, &c)| c >= scfg.threshold)
        .map(|(&e, _)| e)
        .collect();
    Ok(StabilityResult {
        edges,
        counts: counts
            .into_iter()
            .map(|((k, j), c)| (format!("{k}->{j}"), c))
            .collect(),
        failed_subsamples,
    })
}

fn subsample_top_edges(
    data: &Dataset,
    cfg: &CamConfig,
    scfg: &StabilityConfig,
) -> Result<Vec<(usize, usize)>, CamError> {
    let run = cam_pipeline_traced(data, cfg)?;
    let p_value: BTreeMap<(usize, usize), f64> = run
        .pruned
        .p_values
        .iter()
        .map(|e| ((e.from, e.to), e.p_value))
        .collect();
    let gain: BTreeMap<(usize, usize), f64> = run
        .search
        .added
        .iter()
        .map(|e| ((e.from, e.to), e.gain))
        .collect();
    let mut scored: Vec<((usize, usize), f64, f64)> = run
        .dag()
        .edges()
        .map(|e| {
            (
                e,
                p_value.get(&e).copied().unwrap_or(1.0),
                gain.get(&e).copied().unwrap_or(f64::NEG_INFINITY),
            )
        })
        .collect();
    match scfg.ranking {
        EdgeRanking::PValue => scored.sort_by(|a, b| a.1.total_cmp(&b.1).then(b.2.total_cmp(&a.2))),
        EdgeRanking::LikelihoodGain => scored.sort_by(|a, b| b.2.total_cmp(&a.2)),
    }
    Ok(scored.into_iter().take(scfg.top_k).map(|s| s.0).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScoredEdge {
    pub from: usize,
    pub to: usize,
    /// Term p-value from the fit of `to` on its parents in the graph.
    pub score: f64,
    /// Loss in `log(sigma_hat_to)` when the edge is dropped.
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedEdges {
    pub edges: Vec<ScoredEdge>,
    pub caveat: &'static str,
}

/// The `k` edges of `dag` with the smallest term p-values, ties broken by
/// larger drop-one likelihood gain, then by index. `k` beyond the edge
/// count returns every edge.
pub fn top_scoring_edges(
    data: &Dataset,
    dag: &Dag,
    k: usize,
    num_basis: usize,
) -> Result<RankedEdges, CamError> {
    if dag.p() != data.p() {
        return Err(CamError::Graph(crate::graph::GraphError::DimensionMismatch {
            left: dag.p(),
            right: data.p(),
        }));
    }
    let per_node: Vec<Result<Vec<ScoredEdge>, CamError>> = (0..dag.p())
        .into_par_iter()
        .map(|j| {
            let parents = dag.parents(j);
            if parents.is_empty() {
                return Ok(Vec::new());
            }
            let fit_err = |source| CamError::Fit { node: j, source };
            let full = cam::node_log_sigma(data, j, parents, num_basis).map_err(fit_err)?;
            let p_values = cam::node_p_values(data, dag, j, num_basis)
                .map_err(|e| CamError::Config(format!("node {j}: {e}")))?;
            p_values
                .into_iter()
                .map(|e| {
                    let rest: Vec<usize> = parents.iter().copied().filter(|&q| q != e.from).collect();
                    let reduced = cam::node_log_sigma(data, j, &rest, num_basis).map_err(fit_err)?;
                    Ok(ScoredEdge {
                        from: e.from,
                        to: j,
                        score: e.p_value,
                        gain: reduced - full,
                    })
                })
                .collect()
        })
        .collect();
    let mut edges = Vec::new();
    for node in per_node {
        edges.extend(node?);
    }
    edges.sort_by(|a, b| {
        a.score
            .total_cmp(&b.score)
            .then(b.gain.total_cmp(&a.gain))
            .then((a.from, a.to).cmp(&(b.from, b.to)))
    });
    edges.truncate(k);
    Ok(RankedEdges {
        edges,
        caveat: RANKING_CAVEAT,
    })
}
