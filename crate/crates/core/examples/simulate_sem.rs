//! Draw a random sparse additive SEM with Gaussian-process edge functions
//! and write its data as CSV.
//!
//! ```bash
//! cargo run --example simulate_sem -- /tmp/sim.csv
//! ```

use causal_additive::io;
use causal_additive::simulate::{FunctionKind, SimulationDesign};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "sim.csv".into());

    let design = SimulationDesign {
        function_kind: FunctionKind::GaussianProcess,
        ..SimulationDesign::sparse_gp(8, 300)
    };
    let inst = design.sample(7)?;

    println!("edge probability {:.3}", design.edge_probability());
    println!("true edges:");
    print!("{}", io::format_edge_list(inst.truth()));
    for (j, sd) in inst.spec.noise_sd.iter().enumerate() {
        let kind = if inst.truth().parents(j).is_empty() { "source" } else { "" };
        println!("node {j}: noise sd {sd:.3} {kind}");
    }

    io::write_csv(&out, &inst.data)?;
    println!("wrote {} rows x {} columns to {out}", inst.data.n(), inst.data.p());
    Ok(())
}
