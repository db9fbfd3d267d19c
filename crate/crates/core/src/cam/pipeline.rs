use super::inc_edge::{inc_edge_traced, IncEdgeRun};
use super::pns::{pns, Neighborhoods};
use super::prune::{prune_report, PruneReport};
use super::{CamConfig, CamError};
use crate::data::Dataset;
use crate::graph::Dag;

/// Intermediate results of a full run.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub neighborhoods: Option<Neighborhoods>,
    pub search: IncEdgeRun,
    pub pruned: PruneReport,
}

impl PipelineRun {
    pub fn dag(&self) -> &Dag {
        &self.pruned.dag
    }
}

pub fn cam_pipeline(data: &Dataset, cfg: &CamConfig) -> Result<Dag, CamError> {
    cam_pipeline_traced(data, cfg).map(|run| run.pruned.dag)
}

/// Neighborhood selection (if enabled), greedy edge search, then pruning.
/// Errors carry the name of the stage that raised them.
pub fn cam_pipeline_traced(data: &Dataset, cfg: &CamConfig) -> Result<PipelineRun, CamError> {
    cfg.validate()?;
    if !data.is_finite() {
        return Err(CamError::Config("data contains non-finite values".into()));
    }
    let neighborhoods = if cfg.use_pns {
        Some(pns(data, cfg).map_err(|e| e.in_stage("pns"))?)
    } else {
        None
    };
    let search =
        inc_edge_traced(data, neighborhoods.as_ref(), cfg).map_err(|e| e.in_stage("incedge"))?;
    let pruned = prune_report(data, &search.dag, cfg).map_err(|e| e.in_stage("prune"))?;
    Ok(PipelineRun {
        neighborhoods,
        search,
        pruned,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::SimulationDesign;

    #[test]
    fn deterministic_and_labelled_errors() {
        let inst = SimulationDesign::sparse_gp(5, 150).sample(17).unwrap();
        let cfg = CamConfig::default();
        let a = cam_pipeline(&inst.data, &cfg).unwrap();
        let b = cam_pipeline(&inst.data, &cfg).unwrap();
        assert_eq!(a, b);

        let one = Dataset::from_columns(vec![vec![1.0, 2.0, 3.0]]).unwrap();
        let err = cam_pipeline(&one, &cfg).unwrap_err();
        assert!(matches!(err, CamError::Stage { stage: "pns", .. }));
        assert!(matches!(err.root(), CamError::Config(_)));
    }
}
