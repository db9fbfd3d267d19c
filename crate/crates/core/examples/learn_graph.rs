//! Run the full estimator on simulated data and inspect each stage.
//!
//! ```bash
//! cargo run --release --example learn_graph
//! ```

use causal_additive::cam::{cam_pipeline_traced, CamConfig};
use causal_additive::graph::{shd, sid};
use causal_additive::simulate::SimulationDesign;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inst = SimulationDesign::sparse_gp(10, 200).sample(3)?;
    let cfg = CamConfig::default();
    let run = cam_pipeline_traced(&inst.data, &cfg)?;

    if let Some(nb) = &run.neighborhoods {
        for (j, set) in nb.sets.iter().enumerate() {
            println!("candidates for {j}: {set:?}");
        }
    }

    println!("\nedge search added {} edges", run.search.added.len());
    for e in run.search.added.iter().take(5) {
        println!("  {} -> {}  gain {:.4}", e.from, e.to, e.gain);
    }
    let traj = &run.search.trajectory;
    println!("score {:.4} -> {:.4}", traj[0], traj[traj.len() - 1]);

    println!("\npruning at alpha = {}", cfg.prune_alpha);
    for e in &run.pruned.p_values {
        let kept = if run.dag().has_edge(e.from, e.to) { "keep" } else { "drop" };
        println!("  {} -> {}  p = {:.2e}  {kept}", e.from, e.to, e.p_value);
    }

    let truth = inst.truth();
    println!(
        "\nSHD {}  SID {}  (empty graph: SHD {}  SID {})",
        shd(truth, run.dag())?,
        sid(truth, run.dag())?,
        truth.edge_count(),
        sid(truth, &causal_additive::Dag::empty(truth.p()))?,
    );
    Ok(())
}
