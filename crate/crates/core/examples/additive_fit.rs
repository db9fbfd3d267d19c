//! Penalized additive regression with GCV smoothing, and the F-test for
//! dropping one term.

use causal_additive::numerics::{fit_additive, term_significance};
use causal_additive::seed::rng_from_seed;
use causal_additive::Dataset;
use rand::Rng;
use rand_distr::StandardNormal;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = rng_from_seed(1);
    let n = 400;
    let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let x1: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let noise: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let y: Vec<f64> = (0..n).map(|i| (2.0 * x0[i]).sin() + 0.3 * noise[i]).collect();
    let data = Dataset::from_columns(vec![x0.clone(), x1, y.clone()])?;

    let fit = fit_additive(&y, &data, &[0, 1], 10)?;
    println!("sigma_hat^2 = {:.4} (noise variance 0.09)", fit.sigma2_hat);
    for (b, &k) in fit.predictors.iter().enumerate() {
        let p = term_significance(&fit, &data, &y, k)?;
        println!("X{k}: edf {:.2}  p-value {p:.3e}", fit.edf[b]);
    }

    let grid = [-1.5, -0.5, 0.0, 0.5, 1.5];
    let f0 = fit.component(0, &grid);
    for (x, f) in grid.iter().zip(f0) {
        println!("f0({x:+.1}) = {f:+.3}   sin(2x) = {:+.3}", (2.0 * x).sin());
    }
    Ok(())
}
