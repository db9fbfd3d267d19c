use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;

use super::spline::{difference_penalty, make_basis, sum_to_zero_constraint};
use super::{FitError, DEFAULT_NUM_BASIS};
use crate::data::Dataset;

#[derive(Debug, Clone, PartialEq)]
pub struct BoostOptions {
    pub num_basis: usize,
    /// Effective degrees of freedom of each univariate base learner.
    pub learner_edf: f64,
}

impl Default for BoostOptions {
    fn default() -> Self {
        BoostOptions {
            num_basis: DEFAULT_NUM_BASIS,
            learner_edf: 4.0,
        }
    }
}

/// Outcome of componentwise L2 boosting.
#[derive(Debug, Clone, PartialEq)]
pub struct BoostTrace {
    pub iterations: usize,
    /// Candidate columns, in the order given.
    pub candidates: Vec<usize>,
    /// How often each candidate was picked, aligned with `candidates`.
    pub selection_counts: Vec<usize>,
    pub step_length: f64,
    /// Candidates whose column could not carry a spline learner.
    pub skipped: Vec<usize>,
}

impl BoostTrace {
    pub fn count_of(&self, column: usize) -> Option<usize> {
        self.candidates
            .iter()
            .position(|&c| c == column)
            .map(|i| self.selection_counts[i])
    }
}

/// A univariate penalized spline smoother with fixed weight.
struct Learner {
    design: DMatrix<f64>,
    /// `(X^T X + lambda P)^{-1} X^T`
    projector: DMatrix<f64>,
}

impl Learner {
    fn new(x: &[f64], opts: &BoostOptions) -> Result<Self, FitError> {
        let basis = make_basis(x, opts.num_basis)?;
        let z = sum_to_zero_constraint(opts.num_basis);
        let design = basis.evaluate(x) * &z;
        let penalty = z.transpose() * difference_penalty(opts.num_basis) * &z;
        let xtx = design.transpose() * &design;
        let lambda = lambda_for_edf(&xtx, &penalty, opts.learner_edf)?;
        let a = &xtx + &penalty * lambda;
        let chol = a.cholesky().ok_or(FitError::SingularFit)?;
        let projector = chol.solve(&design.transpose());
        Ok(Learner { design, projector })
    }

    fn fit(&self, r: &DVector<f64>) -> DVector<f64> {
        &self.design * (&self.projector * r)
    }
}

/// Weight giving the smoother `edf = sum_i 1 / (1 + lambda d_i)`, where
/// `d_i` are the eigenvalues of the penalty in the metric of `X^T X`.
fn lambda_for_edf(xtx: &DMatrix<f64>, penalty: &DMatrix<f64>, target: f64) -> Result<f64, FitError> {
    let chol = xtx.clone().cholesky().ok_or(FitError::SingularFit)?;
    let l = chol.l();
    let linv = l
        .clone()
        .solve_lower_triangular(&DMatrix::identity(l.nrows(), l.nrows()))
        .ok_or(FitError::SingularFit)?;
    let m = &linv * penalty * linv.transpose();
    let eig = SymmetricEigen::new((&m + m.transpose()) * 0.5);
    let d: Vec<f64> = eig.eigenvalues.iter().map(|v| v.max(0.0)).collect();
    let edf = |lam: f64| d.iter().map(|di| 1.0 / (1.0 + lam * di)).sum::<f64>();
    if edf(0.0) <= target {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (-10.0f64, 12.0f64);
    if edf(10f64.powf(hi)) > target {
        return Ok(10f64.powf(hi));
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if edf(10f64.powf(mid)) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(10f64.powf(0.5 * (lo + hi)))
}

/// Componentwise L2 boosting with default base learners.
pub fn boost_select(
    y: &[f64],
    data: &Dataset,
    candidates: &[usize],
    iterations: usize,
    step: f64,
) -> Result<BoostTrace, FitError> {
    boost_select_with(y, data, candidates, iterations, step, &BoostOptions::default())
}

/// Componentwise L2 boosting: each iteration fits every candidate's
/// univariate smoother to the current residual and moves the residual a
/// `step` fraction toward the best one (smallest RSS, lowest position on
/// ties).
pub fn boost_select_with(
    y: &[f64],
    data: &Dataset,
    candidates: &[usize],
    iterations: usize,
    step: f64,
    opts: &BoostOptions,
) -> Result<BoostTrace, FitError> {
    if iterations == 0 {
        return Err(FitError::InvalidArgument("iterations must be at least 1".into()));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(FitError::InvalidArgument(format!("step length {step}")));
    }
    if candidates.is_empty() {
        return Err(FitError::InvalidArgument("no candidate predictors".into()));
    }
    if y.len() != data.n() {
        return Err(FitError::InvalidArgument("response length mismatch".into()));
    }
    if let Some(&c) = candidates.iter().find(|&&c| c >= data.p()) {
        return Err(FitError::InvalidArgument(format!("column {c} out of range")));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(FitError::InvalidData);
    }

    let learners: Vec<Option<Learner>> = candidates
        .par_iter()
        .map(|&c| Learner::new(data.column(c), opts).ok())
        .collect();
    let skipped: Vec<usize> = candidates
        .iter()
        .zip(&learners)
        .filter(|(_, l)| l.is_none())
        .map(|(&c, _)| c)
        .collect();

    let mut counts = vec![0; candidates.len()];
    if skipped.len() == candidates.len() {
        return Ok(BoostTrace {
            iterations: 0,
            candidates: candidates.to_vec(),
            selection_counts: counts,
            step_length: step,
            skipped,
        });
    }

    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let mut r = DVector::from_iterator(y.len(), y.iter().map(|v| v - mean));
    for _ in 0..iterations {
        let mut best: Option<(usize, f64, DVector<f64>)> = None;
        for (i, learner) in learners.iter().enumerate() {
            let Some(learner) = learner else { continue };
            let fit = learner.fit(&r);
            let rss = (&r - &fit).norm_squared();
            if best.as_ref().is_none_or(|(_, b, _)| rss < *b) {
                best = Some((i, rss, fit));
            }
        }
        let (i, _, fit) = best.expect("at least one usable learner");
        counts[i] += 1;
        r.axpy(-step, &fit, 1.0);
    }
    Ok(BoostTrace {
        iterations,
        candidates: candidates.to_vec(),
        selection_counts: counts,
        step_length: step,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn gaussian_columns(rng: &mut ChaCha8Rng, p: usize, n: usize) -> Vec<Vec<f64>> {
        (0..p)
            .map(|_| (0..n).map(|_| rng.sample(StandardNormal)).collect())
            .collect()
    }

    #[test]
    fn single_candidate_takes_all() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cols = gaussian_columns(&mut rng, 2, 100);
        let data = Dataset::from_columns(cols.clone()).unwrap();
        let trace = boost_select(&cols[0], &data, &[1], 37, 0.1).unwrap();
        assert_eq!(trace.selection_counts, vec![37]);
    }

    #[test]
    fn counts_sum_to_iterations() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cols = gaussian_columns(&mut rng, 6, 150);
        let data = Dataset::from_columns(cols.clone()).unwrap();
        let trace = boost_select(&cols[0], &data, &[1, 2, 3, 4, 5], 100, 0.1).unwrap();
        assert_eq!(trace.selection_counts.iter().sum::<usize>(), 100);
    }

    #[test]
    fn rejects_bad_arguments() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cols = gaussian_columns(&mut rng, 2, 50);
        let data = Dataset::from_columns(cols.clone()).unwrap();
        assert!(boost_select(&cols[0], &data, &[1], 10, 0.0).is_err());
        assert!(boost_select(&cols[0], &data, &[1], 0, 0.1).is_err());
        assert!(boost_select(&cols[0], &data, &[], 10, 0.1).is_err());
    }

    #[test]
    fn constant_candidate_is_skipped() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut cols = gaussian_columns(&mut rng, 2, 80);
        cols.push(vec![1.0; 80]);
        let data = Dataset::from_columns(cols.clone()).unwrap();
        let trace = boost_select(&cols[0], &data, &[1, 2], 20, 0.1).unwrap();
        assert_eq!(trace.skipped, vec![2]);
        assert_eq!(trace.count_of(1), Some(20));
        assert_eq!(trace.count_of(2), Some(0));
    }

    #[test]
    fn learner_hits_target_edf() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x: Vec<f64> = (0..200).map(|_| rng.sample(StandardNormal)).collect();
        let learner = Learner::new(&x, &BoostOptions::default()).unwrap();
        let hat = &learner.design * &learner.projector;
        assert!((hat.trace() - 4.0).abs() < 1e-6, "trace = {}", hat.trace());
    }
}
