//! Structure learning for causal additive models.

pub mod bench;
pub mod cam;
pub mod cli;
pub mod data;
pub mod graph;
pub mod io;
pub mod numerics;
pub mod seed;
pub mod simulate;

pub use data::Dataset;
pub use graph::{Dag, Ordering};
