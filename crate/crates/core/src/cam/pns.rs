use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CamConfig, CamError};
use crate::data::Dataset;
use crate::numerics::{boost_select_with, BoostOptions};

/// Boosting step length used during neighborhood selection.
pub const PNS_STEP: f64 = 0.1;

/// Candidate parent sets, one per node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Neighborhoods {
    pub sets: Vec<BTreeSet<usize>>,
    pub max_size: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl Neighborhoods {
    pub fn p(&self) -> usize {
        self.sets.len()
    }

    pub fn contains(&self, j: usize, k: usize) -> bool {
        self.sets[j].contains(&k)
    }
}

/// Preliminary neighborhood selection: for each node, boost an additive
/// model on all other variables and keep the `pns_top` most frequently
/// picked ones among those picked at least `pns_min_picks` times.
pub fn pns(data: &Dataset, cfg: &CamConfig) -> Result<Neighborhoods, CamError> {
    cfg.validate()?;
    let p = data.p();
    if p < 2 {
        return Err(CamError::Config("neighborhood selection needs p >= 2".into()));
    }
    let opts = BoostOptions {
        num_basis: cfg.num_basis,
        ..BoostOptions::default()
    };
    let per_node: Vec<(BTreeSet<usize>, Option<String>)> = (0..p)
        .into_par_iter()
        .map(|j| {
            let candidates: Vec<usize> = (0..p).filter(|&k| k != j).collect();
            let y = data.column(j);
            if !distinct_at_least(y, 2) {
                return (BTreeSet::new(), Some(format!("node {j}: constant column")));
            }
            match boost_select_with(y, data, &candidates, cfg.pns_iterations, PNS_STEP, &opts) {
                Ok(trace) => {
                    let mut ranked: Vec<(usize, usize)> = trace
                        .candidates
                        .iter()
                        .copied()
                        .zip(trace.selection_counts.iter().copied())
                        .filter(|&(_, c)| c >= cfg.pns_min_picks)
                        .collect();
                    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
                    let set = ranked.into_iter().take(cfg.pns_top).map(|(k, _)| k).collect();
                    let warning = (!trace.skipped.is_empty()).then(|| {
                        format!("node {j}: skipped degenerate candidates {:?}", trace.skipped)
                    });
                    (set, warning)
                }
                Err(e) => (BTreeSet::new(), Some(format!("node {j}: {e}"))),
            }
        })
        .collect();
    let (sets, warnings): (Vec<_>, Vec<_>) = per_node.into_iter().unzip();
    Ok(Neighborhoods {
        sets,
        max_size: cfg.pns_top,
        warnings: warnings.into_iter().flatten().collect(),
    })
}

fn distinct_at_least(x: &[f64], k: usize) -> bool {
    let mut seen: Vec<f64> = Vec::with_capacity(k);
    for &v in x {
        if !seen.contains(&v) {
            seen.push(v);
            if seen.len() >= k {
                return true;
            }
        }
    }
    false
}
