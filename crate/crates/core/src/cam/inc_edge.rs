use rayon::prelude::*;
use serde::Serialize;

use super::score::node_log_sigma;
use super::{CamConfig, CamError, Neighborhoods};
use crate::data::Dataset;
use crate::graph::{Dag, EdgeCandidateMask};

/// Largest graph searched without a candidate restriction.
pub const MAX_NODES_WITHOUT_PNS: usize = 30;

/// Slack allowed on the per-iteration score decrease (floating point only;
/// nested unpenalized fits never lose likelihood).
const MONOTONE_SLACK: f64 = 1e-10;

/// Likelihood gains of single-edge additions. Entry `(k, j)` is the decrease
/// of `sum_j log(sigma_hat_j)` from adding `k -> j`; `-inf` marks entries
/// that are not admissible.
#[derive(Debug, Clone)]
pub struct ScoreMatrix {
    p: usize,
    /// `log(sigma_hat_j)` after adding `k -> j`, stored at `k * p + j`.
    candidate: Vec<f64>,
    /// Current `log(sigma_hat_j)` per node.
    current: Vec<f64>,
}

impl ScoreMatrix {
    fn new(current: Vec<f64>) -> Self {
        let p = current.len();
        ScoreMatrix {
            p,
            candidate: vec![f64::NAN; p * p],
            current,
        }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Gain of `k -> j`, or `-inf` if never computed or disabled.
    pub fn gain(&self, k: usize, j: usize) -> f64 {
        let c = self.candidate[k * self.p + j];
        if c.is_nan() {
            f64::NEG_INFINITY
        } else {
            self.current[j] - c
        }
    }

    pub fn node_scores(&self) -> &[f64] {
        &self.current
    }

    pub fn total(&self) -> f64 {
        self.current.iter().sum()
    }

    fn set(&mut self, k: usize, j: usize, value: Option<f64>) {
        self.candidate[k * self.p + j] = value.unwrap_or(f64::NAN);
    }

    fn accept(&mut self, k: usize, j: usize) {
        self.current[j] = self.candidate[k * self.p + j];
        self.candidate[k * self.p + j] = f64::NAN;
    }

    fn masked(&self, mask: &EdgeCandidateMask) -> Vec<f64> {
        (0..self.p * self.p)
            .map(|i| {
                let (k, j) = (i / self.p, i % self.p);
                if mask.is_allowed(k, j) {
                    self.gain(k, j)
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect()
    }
}

/// One accepted edge of the greedy search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AddedEdge {
    pub from: usize,
    pub to: usize,
    pub gain: f64,
}

#[derive(Debug, Clone)]
pub struct IncEdgeRun {
    pub dag: Dag,
    /// Total score before the first and after every accepted edge.
    pub trajectory: Vec<f64>,
    pub added: Vec<AddedEdge>,
    /// Entries dropped because their regression failed.
    pub failed: Vec<(usize, usize)>,
    pub scores: ScoreMatrix,
}

pub fn inc_edge(
    data: &Dataset,
    nbhd: Option<&Neighborhoods>,
    cfg: &CamConfig,
) -> Result<Dag, CamError> {
    inc_edge_traced(data, nbhd, cfg).map(|run| run.dag)
}

/// Greedy edge addition from the empty graph. Each step adds the admissible
/// edge with the largest gain (lowest `(k, j)` on ties), recomputes only the
/// target node's column of gains, and masks every edge that would now close
/// a cycle. Stops when nothing admissible remains, so an unrestricted run
/// ends with a fully connected DAG.
pub fn inc_edge_traced(
    data: &Dataset,
    nbhd: Option<&Neighborhoods>,
    cfg: &CamConfig,
) -> Result<IncEdgeRun, CamError> {
    cfg.validate()?;
    let p = data.p();
    let mut mask = match nbhd {
        Some(nb) => {
            if nb.p() != p {
                return Err(CamError::Config(format!(
                    "neighborhoods for {} nodes, data has {p}",
                    nb.p()
                )));
            }
            EdgeCandidateMask::restricted(&nb.sets)
        }
        None if p > MAX_NODES_WITHOUT_PNS => {
            return Err(CamError::TooManyNodes {
                p,
                max: MAX_NODES_WITHOUT_PNS,
                what: "edge search without neighborhood selection",
            })
        }
        None => EdgeCandidateMask::full(p),
    };
    let num_basis = cfg.num_basis;

    let base: Vec<f64> = (0..p)
        .into_par_iter()
        .map(|j| {
            node_log_sigma(data, j, &[], num_basis).map_err(|source| CamError::Fit { node: j, source })
        })
        .collect::<Result<_, _>>()?;
    let mut scores = ScoreMatrix::new(base);
    let mut dag = Dag::empty(p);
    let mut failed = Vec::new();

    let initial: Vec<(usize, usize)> = (0..p)
        .flat_map(|k| (0..p).map(move |j| (k, j)))
        .filter(|&(k, j)| mask.is_allowed(k, j))
        .collect();
    refresh(data, &dag, &initial, num_basis, &mut scores, &mut mask, &mut failed);

    let mut trajectory = vec![scores.total()];
    let mut added = Vec::new();
    loop {
        let gains = scores.masked(&mask);
        let mut best: Option<(usize, f64)> = None;
        for (i, &g) in gains.iter().enumerate() {
            if g > f64::NEG_INFINITY && best.is_none_or(|(_, b)| g > b) {
                best = Some((i, g));
            }
        }
        let Some((i, gain)) = best else { break };
        let (k, j) = (i / p, i % p);
        dag.add_edge(k, j)?;
        mask.record_edge(&dag, k, j);
        scores.accept(k, j);
        let total = scores.total();
        debug_assert!(
            total <= trajectory.last().unwrap() + MONOTONE_SLACK,
            "score increased after adding {k} -> {j}"
        );
        trajectory.push(total);
        added.push(AddedEdge { from: k, to: j, gain });

        let column: Vec<(usize, usize)> = (0..p)
            .filter(|&a| mask.is_allowed(a, j))
            .map(|a| (a, j))
            .collect();
        refresh(data, &dag, &column, num_basis, &mut scores, &mut mask, &mut failed);
    }
    Ok(IncEdgeRun {
        dag,
        trajectory,
        added,
        failed,
        scores,
    })
}

/// Recomputes the candidate score of each `(k, j)` against `j`'s current
/// parents. Failed regressions disable their entry for good.
fn refresh(
    data: &Dataset,
    dag: &Dag,
    entries: &[(usize, usize)],
    num_basis: usize,
    scores: &mut ScoreMatrix,
    mask: &mut EdgeCandidateMask,
    failed: &mut Vec<(usize, usize)>,
) {
    let values: Vec<Option<f64>> = entries
        .par_iter()
        .map(|&(k, j)| {
            let mut parents = dag.parents(j).to_vec();
            parents.push(k);
            node_log_sigma(data, j, &parents, num_basis).ok()
        })
        .collect();
    for (&(k, j), v) in entries.iter().zip(values) {
        if v.is_none() {
            mask.disable(k, j);
            failed.push((k, j));
        }
        scores.set(k, j, v);
    }
}
