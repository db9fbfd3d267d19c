use rayon::prelude::*;
use serde::Serialize;

use super::{CamConfig, CamError};
use crate::data::Dataset;
use crate::graph::Dag;
use crate::numerics::{fit_additive, term_significance};

/// Significance of one parent term in its child's additive regression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgePValue {
    pub from: usize,
    pub to: usize,
    pub p_value: f64,
}

#[derive(Debug, Clone)]
pub struct PruneReport {
    pub dag: Dag,
    /// Every input edge with its p-value; edges whose test failed are absent.
    pub p_values: Vec<EdgePValue>,
    pub warnings: Vec<String>,
}

pub fn prune(data: &Dataset, dag: &Dag, cfg: &CamConfig) -> Result<Dag, CamError> {
    prune_report(data, dag, cfg).map(|r| r.dag)
}

/// Refits every node on its parents and keeps the parents whose term
/// p-value is at most `cfg.prune_alpha`. A node whose regression fails keeps
/// all its parents.
pub fn prune_report(data: &Dataset, dag: &Dag, cfg: &CamConfig) -> Result<PruneReport, CamError> {
    cfg.validate()?;
    if dag.p() != data.p() {
        return Err(CamError::Graph(crate::graph::GraphError::DimensionMismatch {
            left: dag.p(),
            right: data.p(),
        }));
    }
    let per_node: Vec<Result<Vec<EdgePValue>, String>> = (0..dag.p())
        .into_par_iter()
        .map(|j| node_p_values(data, dag, j, cfg.num_basis))
        .collect();

    let mut kept = Vec::new();
    let mut p_values = Vec::new();
    let mut warnings = Vec::new();
    for (j, result) in per_node.into_iter().enumerate() {
        match result {
            Ok(edges) => {
                kept.extend(
                    edges
                        .iter()
                        .filter(|e| e.p_value <= cfg.prune_alpha)
                        .map(|e| (e.from, e.to)),
                );
                p_values.extend(edges);
            }
            Err(msg) => {
                warnings.push(format!("node {j}: {msg}; keeping all parents"));
                kept.extend(dag.parents(j).iter().map(|&k| (k, j)));
            }
        }
    }
    kept.sort_unstable();
    Ok(PruneReport {
        dag: Dag::from_edges(dag.p(), kept)?,
        p_values,
        warnings,
    })
}

pub(crate) fn node_p_values(
    data: &Dataset,
    dag: &Dag,
    j: usize,
    num_basis: usize,
) -> Result<Vec<EdgePValue>, String> {
    let parents = dag.parents(j);
    if parents.is_empty() {
        return Ok(Vec::new());
    }
    let y = data.column(j);
    let fit = fit_additive(y, data, parents, num_basis).map_err(|e| e.to_string())?;
    parents
        .iter()
        .map(|&k| {
            term_significance(&fit, data, y, k)
                .map(|p_value| EdgePValue {
                    from: k,
                    to: j,
                    p_value,
                })
                .map_err(|e| e.to_string())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn empty_stays_empty() {
        let data = Dataset::from_columns(vec![vec![0.0, 1.0, 2.0]; 3]).unwrap();
        let out = prune(&data, &Dag::empty(3), &CamConfig::default()).unwrap();
        assert_eq!(out.edge_count(), 0);
    }

    #[test]
    fn drops_noise_parent_keeps_signal() {
        let mut rng = rng_from_seed(12);
        let n = 200;
        let a: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let c: Vec<f64> = a
            .iter()
            .map(|v| (2.0 * v).sin() + 0.2 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let data = Dataset::from_columns(vec![a, b, c]).unwrap();
        let full = Dag::from_edges(3, [(0, 2), (1, 2)]).unwrap();
        let report = prune_report(&data, &full, &CamConfig::default()).unwrap();
        assert!(report.dag.has_edge(0, 2));
        assert!(!report.dag.has_edge(1, 2));
        assert_eq!(report.p_values.len(), 2);
    }

    #[test]
    fn singular_node_keeps_parents() {
        // two identical parents: under GCV the linear parts stay unpenalized
        // and collinear, so the joint fit is singular
        let mut rng = rng_from_seed(13);
        let a: Vec<f64> = (0..60).map(|_| rng.sample(StandardNormal)).collect();
        let c: Vec<f64> = a.iter().map(|v| v * v).collect();
        let data = Dataset::from_columns(vec![a.clone(), a, c]).unwrap();
        let dag = Dag::from_edges(3, [(0, 2), (1, 2)]).unwrap();
        let report = prune_report(&data, &dag, &CamConfig::default()).unwrap();
        assert_eq!(report.dag, dag);
        assert_eq!(report.warnings.len(), 1);
    }
}
