//! A small replicated simulation study, printed as CSV with a summary.

use causal_additive::bench::{run_experiment, summarize, write_results_csv, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ExperimentConfig {
        seed: 2024,
        ..ExperimentConfig::sparse_gp(10, 200, 4)
    };
    let rows = run_experiment(&cfg)?;
    write_results_csv(std::io::stdout().lock(), &rows)?;

    println!();
    for s in summarize(&rows) {
        println!(
            "{:>20}: SHD {:.1} ± {:.1}  SID {:.1} ± {:.1}",
            s.method.name(),
            s.mean_shd,
            s.sd_shd,
            s.mean_sid,
            s.sd_sid
        );
    }
    Ok(())
}
