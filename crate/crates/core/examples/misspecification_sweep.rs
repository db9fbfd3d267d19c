//! Sweep over non-Gaussian noise and non-additive structure.

use causal_additive::bench::{run_sweep, write_sweep_summary_csv, ExperimentConfig, Method, SweepConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sweep = SweepConfig {
        base: ExperimentConfig {
            methods: vec![Method::Cam, Method::EmptyBaseline],
            seed: 11,
            ..ExperimentConfig::sparse_gp(6, 200, 2)
        },
        gammas: vec![0.5, 1.0, 2.0],
        omegas: vec![0.0, 1.0],
    };
    let points = run_sweep(&sweep)?;
    write_sweep_summary_csv(std::io::stdout().lock(), &points)?;
    Ok(())
}
