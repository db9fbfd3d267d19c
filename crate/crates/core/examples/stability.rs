//! Stability selection over half-size subsamples, and the single-fit edge
//! ranking it is built from.

use causal_additive::bench::{stability_selection, top_scoring_edges, StabilityConfig};
use causal_additive::cam::{cam_pipeline, CamConfig};
use causal_additive::simulate::SimulationDesign;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inst = SimulationDesign::sparse_gp(8, 118).sample(5)?;
    let cfg = CamConfig::default();

    let dag = cam_pipeline(&inst.data, &cfg)?;
    let ranked = top_scoring_edges(&inst.data, &dag, 5, cfg.num_basis)?;
    println!("top edges of the full-data fit ({})", ranked.caveat);
    for e in &ranked.edges {
        println!("  {} -> {}  score {:.2e}", e.from, e.to, e.score);
    }

    let scfg = StabilityConfig {
        subsamples: 20,
        threshold: 12,
        top_k: 5,
        ..StabilityConfig::default()
    };
    let result = stability_selection(&inst.data, &cfg, &scfg, 99)?;
    println!("\nselection counts over {} subsamples of {}", scfg.subsamples, scfg.subsample_size);
    for (edge, count) in &result.counts {
        println!("  {edge}: {count}");
    }
    println!("stable: {:?}", result.edges);
    println!("true:   {:?}", inst.truth().edges().collect::<Vec<_>>());
    Ok(())
}
