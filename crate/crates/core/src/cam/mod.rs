//! The three-stage estimator: preliminary neighborhood selection, greedy
//! edge addition under the Gaussian likelihood score, and significance
//! pruning. Also the exhaustive order search used as an oracle on small
//! problems.

mod brute;
mod inc_edge;
mod pipeline;
mod pns;
mod prune;
mod score;

pub use brute::{brute_force_order, brute_force_search, MAX_BRUTE_FORCE_NODES};
pub use inc_edge::{inc_edge, inc_edge_traced, AddedEdge, IncEdgeRun, ScoreMatrix, MAX_NODES_WITHOUT_PNS};
pub use pipeline::{cam_pipeline, cam_pipeline_traced, PipelineRun};
pub use pns::{pns, Neighborhoods};
pub use prune::{prune, prune_report, EdgePValue, PruneReport};
pub(crate) use prune::node_p_values;
pub use score::{neg_log_lik_score, node_log_sigma};

use serde::{Deserialize, Serialize};

use crate::graph::GraphError;
use crate::numerics::{FitError, DEFAULT_NUM_BASIS};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CamError {
    #[error("regression for node {node} failed: {source}")]
    Fit {
        node: usize,
        #[source]
        source: FitError,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{p} nodes exceed the limit of {max} for {what}")]
    TooManyNodes {
        p: usize,
        max: usize,
        what: &'static str,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{stage} stage: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<CamError>,
    },
}

impl CamError {
    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        CamError::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// The innermost error, with stage labels stripped.
    pub fn root(&self) -> &CamError {
        match self {
            CamError::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}

/// Estimator settings. The JSON form uses exactly these field names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CamConfig {
    /// Spline basis functions per predictor.
    pub num_basis: usize,
    /// Parents with term p-value above this are pruned.
    pub prune_alpha: f64,
    /// Boosting iterations per node during neighborhood selection.
    pub pns_iterations: usize,
    /// Maximum neighborhood size.
    pub pns_top: usize,
    /// Minimum boosting picks for a candidate to enter a neighborhood.
    pub pns_min_picks: usize,
    pub use_pns: bool,
    pub seed: u64,
}

impl Default for CamConfig {
    fn default() -> Self {
        CamConfig {
            num_basis: DEFAULT_NUM_BASIS,
            prune_alpha: 0.001,
            pns_iterations: 100,
            pns_top: 10,
            pns_min_picks: 3,
            use_pns: true,
            seed: 0,
        }
    }
}

impl CamConfig {
    pub fn validate(&self) -> Result<(), CamError> {
        if !(self.prune_alpha > 0.0 && self.prune_alpha < 1.0) {
            return Err(CamError::Config(format!(
                "prune_alpha must lie in (0, 1), got {}",
                self.prune_alpha
            )));
        }
        if self.pns_top == 0 {
            return Err(CamError::Config("pns_top must be at least 1".into()));
        }
        if self.pns_min_picks == 0 {
            return Err(CamError::Config("pns_min_picks must be at least 1".into()));
        }
        if self.pns_iterations == 0 {
            return Err(CamError::Config("pns_iterations must be at least 1".into()));
        }
        if self.num_basis < 4 {
            return Err(CamError::Config(format!(
                "num_basis must be at least 4 for cubic splines, got {}",
                self.num_basis
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_json_field_names() {
        let json = serde_json::to_value(CamConfig::default()).unwrap();
        let mut keys: Vec<&str> = json.as_object().unwrap().keys().map(String::as_str).collect();
        keys.sort_unstable();
        assert_eq!(
            keys,
            [
                "num_basis",
                "pns_iterations",
                "pns_min_picks",
                "pns_top",
                "prune_alpha",
                "seed",
                "use_pns"
            ]
        );
        let partial: CamConfig = serde_json::from_str(r#"{"use_pns": false}"#).unwrap();
        assert!(!partial.use_pns);
        assert_eq!(partial.num_basis, 10);
        assert!(serde_json::from_str::<CamConfig>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(CamConfig::default().validate().is_ok());
        for bad in [
            CamConfig { prune_alpha: 0.0, ..Default::default() },
            CamConfig { prune_alpha: 1.0, ..Default::default() },
            CamConfig { pns_top: 0, ..Default::default() },
            CamConfig { pns_min_picks: 0, ..Default::default() },
            CamConfig { num_basis: 3, ..Default::default() },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }
}
