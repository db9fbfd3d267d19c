use super::CamError;
use crate::data::Dataset;
use crate::graph::Dag;
use crate::numerics::{fit_additive_with, FitError, Smoothing};

/// `log(sigma_hat_j)` of the unpenalized additive regression of node `j` on
/// `parents`. With no parents this is the log of the divisor-`n` standard
/// deviation.
///
/// The order search scores with the unpenalized fit so that nested parent
/// sets can never score worse; smoothing is left to the pruning stage.
pub fn node_log_sigma(
    data: &Dataset,
    j: usize,
    parents: &[usize],
    num_basis: usize,
) -> Result<f64, FitError> {
    let fit = fit_additive_with(
        data.column(j),
        data,
        parents,
        num_basis,
        &Smoothing::Fixed(0.0),
    )?;
    Ok(0.5 * fit.sigma2_hat.max(f64::MIN_POSITIVE).ln())
}

/// `sum_j log(sigma_hat_j)` with each node regressed on its parents in `dag`:
/// the negative Gaussian log-likelihood up to constants.
pub fn neg_log_lik_score(data: &Dataset, dag: &Dag, num_basis: usize) -> Result<f64, CamError> {
    if dag.p() != data.p() {
        return Err(CamError::Graph(crate::graph::GraphError::DimensionMismatch {
            left: dag.p(),
            right: data.p(),
        }));
    }
    (0..dag.p())
        .map(|j| {
            node_log_sigma(data, j, dag.parents(j), num_basis)
                .map_err(|source| CamError::Fit { node: j, source })
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn empty_dag_is_sum_of_log_sd() {
        let mut rng = rng_from_seed(3);
        let cols: Vec<Vec<f64>> = (0..3)
            .map(|s| (0..50).map(|_| (s + 1) as f64 * rng.sample::<f64, _>(StandardNormal)).collect())
            .collect();
        let expect: f64 = cols
            .iter()
            .map(|c| {
                let m = c.iter().sum::<f64>() / 50.0;
                (c.iter().map(|v| (v - m).powi(2)).sum::<f64>() / 50.0).sqrt().ln()
            })
            .sum();
        let data = Dataset::from_columns(cols).unwrap();
        let got = neg_log_lik_score(&data, &Dag::empty(3), 10).unwrap();
        assert!((got - expect).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let data = Dataset::from_columns(vec![vec![0.0, 1.0, 2.0]]).unwrap();
        assert!(neg_log_lik_score(&data, &Dag::empty(2), 10).is_err());
    }
}
