//! Structural Hamming and structural intervention distances, and the
//! d-separation queries behind the latter.

use causal_additive::graph::{d_separated, full_dag_of_order, shd, sid};
use causal_additive::{Dag, Ordering};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // 0 -> 1 -> 2, plus 0 -> 2
    let truth = Dag::from_edges(3, [(0, 1), (1, 2), (0, 2)])?;
    let candidates = [
        ("truth", truth.clone()),
        ("empty", Dag::empty(3)),
        ("chain only", Dag::from_edges(3, [(0, 1), (1, 2)])?),
        ("reversed", Dag::from_edges(3, [(1, 0), (2, 1), (2, 0)])?),
        ("full order 1,0,2", full_dag_of_order(&Ordering::new(vec![1, 0, 2])?)),
    ];
    for (name, g) in &candidates {
        println!("{name:>18}: shd {}  sid {}", shd(&truth, g)?, sid(&truth, g)?);
    }

    let chain = Dag::from_edges(3, [(0, 1), (1, 2)])?;
    println!("\nchain 0 -> 1 -> 2");
    println!("  0 _||_ 2          {}", d_separated(&chain, 0, 2, &[]));
    println!("  0 _||_ 2 | 1      {}", d_separated(&chain, 0, 2, &[1]));
    let collider = Dag::from_edges(3, [(0, 2), (1, 2)])?;
    println!("collider 0 -> 2 <- 1");
    println!("  0 _||_ 1          {}", d_separated(&collider, 0, 1, &[]));
    println!("  0 _||_ 1 | 2      {}", d_separated(&collider, 0, 1, &[2]));
    Ok(())
}
