use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use super::spline::{difference_penalty, make_basis, sum_to_zero_constraint, SplineBasis};
use super::FitError;
use crate::data::Dataset;

const GRID_SIZE: usize = 20;
const GRID_LOG10_MIN: f64 = -6.0;
const GRID_LOG10_MAX: f64 = 4.0;
const MAX_SWEEPS: usize = 2;
/// A pivot this small relative to its diagonal entry means the column is
/// numerically a combination of earlier ones.
const PIVOT_TOL: f64 = 1e-10;

/// The fixed smoothing grid: 20 log-spaced values spanning `[1e-6, 1e4]`.
pub fn lambda_grid() -> [f64; GRID_SIZE] {
    std::array::from_fn(|i| {
        let t = i as f64 / (GRID_SIZE - 1) as f64;
        10f64.powf(GRID_LOG10_MIN + t * (GRID_LOG10_MAX - GRID_LOG10_MIN))
    })
}

/// How the per-predictor penalty weights are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum Smoothing {
    /// Generalized cross-validation over [`lambda_grid`]: a shared weight
    /// first, then per-predictor coordinate sweeps.
    Gcv,
    /// The same weight on every block. `Fixed(0.0)` is the unpenalized
    /// regression-spline fit.
    Fixed(f64),
    /// One weight per predictor, in predictor order.
    PerBlock(Vec<f64>),
}

/// A fitted additive regression `y ~ intercept + sum_k f_k(x_k)`.
#[derive(Debug, Clone)]
pub struct AdditiveFit {
    /// Column indices of the predictors, ascending.
    pub predictors: Vec<usize>,
    /// Spline coefficients per predictor, `num_basis` each.
    pub coef_blocks: Vec<Vec<f64>>,
    pub intercept: f64,
    /// Mean squared residual (divisor `n`).
    pub sigma2_hat: f64,
    /// Penalty weight per predictor.
    pub smoothing: Vec<f64>,
    /// Effective degrees of freedom per predictor, `tr(F)` over the block
    /// where `F` is the coefficient influence matrix.
    pub edf: Vec<f64>,
    /// Reference degrees of freedom per predictor, `tr(2F - F^2)` over the
    /// block; at least `edf`, used by the term tests.
    pub ref_df: Vec<f64>,
    pub num_basis: usize,
    pub bases: Vec<SplineBasis>,
    pub fitted: Vec<f64>,
    pub rss: f64,
}

impl AdditiveFit {
    pub fn n(&self) -> usize {
        self.fitted.len()
    }

    /// `log(sigma_hat)`, i.e. half the log residual variance.
    pub fn log_sigma(&self) -> f64 {
        0.5 * self.sigma2_hat.ln()
    }

    pub fn total_edf(&self) -> f64 {
        self.edf.iter().sum()
    }

    /// Fitted values of the component for `predictors[block]` on `x`.
    pub fn component(&self, block: usize, x: &[f64]) -> Vec<f64> {
        let b = self.bases[block].evaluate(x);
        let coef = DVector::from_column_slice(&self.coef_blocks[block]);
        (b * coef).iter().copied().collect()
    }

    pub fn residuals(&self, y: &[f64]) -> Vec<f64> {
        y.iter().zip(&self.fitted).map(|(a, b)| a - b).collect()
    }
}

/// Penalized additive fit of `y` on the given columns with GCV-selected
/// smoothing.
pub fn fit_additive(
    y: &[f64],
    data: &Dataset,
    predictors: &[usize],
    num_basis: usize,
) -> Result<AdditiveFit, FitError> {
    fit_additive_with(y, data, predictors, num_basis, &Smoothing::Gcv)
}

pub fn fit_additive_with(
    y: &[f64],
    data: &Dataset,
    predictors: &[usize],
    num_basis: usize,
    smoothing: &Smoothing,
) -> Result<AdditiveFit, FitError> {
    let problem = Problem::new(y, data, predictors, num_basis)?;
    let m = problem.blocks.len();
    let lambdas = match smoothing {
        Smoothing::Fixed(l) => vec![check_lambda(*l)?; m],
        Smoothing::PerBlock(ls) => {
            if ls.len() != m {
                return Err(FitError::InvalidArgument(format!(
                    "{} smoothing weights for {m} predictors",
                    ls.len()
                )));
            }
            ls.iter().map(|&l| check_lambda(l)).collect::<Result<_, _>>()?
        }
        Smoothing::Gcv => problem.select_gcv()?,
    };
    let sol = problem.solve(&lambdas, true)?;
    Ok(problem.into_fit(sol, lambdas))
}

fn check_lambda(l: f64) -> Result<f64, FitError> {
    if l.is_finite() && l >= 0.0 {
        Ok(l)
    } else {
        Err(FitError::InvalidArgument(format!("smoothing weight {l}")))
    }
}

/// Approximate F test for dropping predictor column `k` from `fit`.
///
/// The reduced model is refit with the remaining blocks' penalty weights
/// held fixed. Degrees of freedom come from the reference df `tr(2F - F^2)`
/// rather than the plain edf: with data-driven smoothing the plain edf
/// understates what the fit spent and the test rejects too often.
pub fn term_significance(
    fit: &AdditiveFit,
    data: &Dataset,
    y: &[f64],
    k: usize,
) -> Result<f64, FitError> {
    let block = fit.predictors.iter().position(|&c| c == k).ok_or_else(|| {
        FitError::InvalidArgument(format!("column {k} is not a predictor of this fit"))
    })?;
    let rest: Vec<usize> = fit.predictors.iter().copied().filter(|&c| c != k).collect();
    let rest_lambda: Vec<f64> = fit
        .smoothing
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != block)
        .map(|(_, &l)| l)
        .collect();
    let reduced = fit_additive_with(
        y,
        data,
        &rest,
        fit.num_basis,
        &Smoothing::PerBlock(rest_lambda),
    )?;

    let n = fit.n() as f64;
    let df_num = fit.ref_df[block].max(1e-6);
    let df_res = n - fit.ref_df.iter().sum::<f64>() - 1.0;
    if df_res <= 0.0 {
        return Err(FitError::SingularFit);
    }
    let (rss1, rss0) = (fit.rss, reduced.rss);
    if rss1 <= 0.0 {
        return Ok(if rss0 > rss1 { 0.0 } else { 1.0 });
    }
    let f = ((rss0 - rss1) / df_num) / (rss1 / df_res);
    if !(f > 0.0) {
        return Ok(1.0);
    }
    let dist = FisherSnedecor::new(df_num, df_res).map_err(|_| FitError::SingularFit)?;
    Ok(dist.sf(f).clamp(0.0, 1.0))
}

struct Block {
    column: usize,
    basis: SplineBasis,
    range: Range<usize>,
    /// Penalty in the constrained coordinates, `Z^T D^T D Z`.
    penalty: DMatrix<f64>,
}

struct Problem {
    n: usize,
    y_mean: f64,
    y_centered: DVector<f64>,
    x: DMatrix<f64>,
    xtx: DMatrix<f64>,
    xty: DVector<f64>,
    constraint: DMatrix<f64>,
    blocks: Vec<Block>,
    num_basis: usize,
}

struct Solution {
    gamma: DVector<f64>,
    fitted: DVector<f64>,
    rss: f64,
    edf: Vec<f64>,
    ref_df: Vec<f64>,
}

impl Problem {
    fn new(
        y: &[f64],
        data: &Dataset,
        predictors: &[usize],
        num_basis: usize,
    ) -> Result<Self, FitError> {
        let n = data.n();
        if y.len() != n {
            return Err(FitError::InvalidArgument(format!(
                "response has {} rows, data has {n}",
                y.len()
            )));
        }
        if n < 2 {
            return Err(FitError::InvalidArgument("need at least two observations".into()));
        }
        let mut cols = predictors.to_vec();
        cols.sort_unstable();
        if cols.windows(2).any(|w| w[0] == w[1]) {
            return Err(FitError::InvalidArgument("duplicate predictor".into()));
        }
        if let Some(&bad) = cols.iter().find(|&&c| c >= data.p()) {
            return Err(FitError::InvalidArgument(format!("column {bad} out of range")));
        }
        if y.iter().any(|v| !v.is_finite())
            || cols.iter().any(|&c| data.column(c).iter().any(|v| !v.is_finite()))
        {
            return Err(FitError::InvalidData);
        }

        let y_mean = y.iter().sum::<f64>() / n as f64;
        let y_centered = DVector::from_iterator(n, y.iter().map(|v| v - y_mean));
        let width = num_basis.saturating_sub(1);
        let constraint = if cols.is_empty() {
            DMatrix::zeros(0, 0)
        } else {
            sum_to_zero_constraint(num_basis)
        };
        let raw_penalty = difference_penalty(num_basis);
        let penalty = if cols.is_empty() {
            DMatrix::zeros(0, 0)
        } else {
            constraint.transpose() * &raw_penalty * &constraint
        };

        let mut x = DMatrix::zeros(n, width * cols.len());
        let mut blocks = Vec::with_capacity(cols.len());
        for (b, &c) in cols.iter().enumerate() {
            let basis = make_basis(data.column(c), num_basis)?;
            let design = basis.evaluate(data.column(c)) * &constraint;
            let range = b * width..(b + 1) * width;
            x.columns_mut(range.start, width).copy_from(&design);
            blocks.push(Block {
                column: c,
                basis,
                range,
                penalty: penalty.clone(),
            });
        }
        let xt = x.transpose();
        let xtx = &xt * &x;
        let xty = &xt * &y_centered;
        Ok(Problem {
            n,
            y_mean,
            y_centered,
            x,
            xtx,
            xty,
            constraint,
            blocks,
            num_basis,
        })
    }

    fn solve(&self, lambdas: &[f64], want_edf: bool) -> Result<Solution, FitError> {
        let dim = self.xtx.nrows();
        if dim == 0 {
            let rss = self.y_centered.norm_squared();
            return Ok(Solution {
                gamma: DVector::zeros(0),
                fitted: DVector::zeros(self.n),
                rss,
                edf: Vec::new(),
                ref_df: Vec::new(),
            });
        }
        let mut a = self.xtx.clone();
        for (block, &lam) in self.blocks.iter().zip(lambdas) {
            if lam > 0.0 {
                let r = block.range.start;
                let w = block.range.len();
                let mut view = a.view_mut((r, r), (w, w));
                view += &block.penalty * lam;
            }
        }
        let diag: Vec<f64> = a.diagonal().iter().copied().collect();
        let chol = a.cholesky().ok_or(FitError::SingularFit)?;
        let l = chol.l_dirty();
        for (i, &d) in diag.iter().enumerate() {
            let pivot = l[(i, i)] * l[(i, i)];
            if !(pivot > PIVOT_TOL * d.max(f64::MIN_POSITIVE)) {
                return Err(FitError::SingularFit);
            }
        }
        let gamma = chol.solve(&self.xty);
        let fitted = &self.x * &gamma;
        let rss = (&self.y_centered - &fitted).norm_squared();

        let (edf, ref_df) = if !want_edf {
            (Vec::new(), Vec::new())
        } else if lambdas.iter().all(|&l| l == 0.0) {
            let full: Vec<f64> = self.blocks.iter().map(|b| b.range.len() as f64).collect();
            (full.clone(), full)
        } else {
            let influence = chol.solve(&self.xtx);
            let edf = self
                .blocks
                .iter()
                .map(|b| b.range.clone().map(|i| influence[(i, i)]).sum::<f64>())
                .collect();
            let ref_df = self
                .blocks
                .iter()
                .map(|b| {
                    b.range
                        .clone()
                        .map(|i| 2.0 * influence[(i, i)] - influence.row(i).dot(&influence.column(i).transpose()))
                        .sum::<f64>()
                })
                .collect();
            (edf, ref_df)
        };
        Ok(Solution {
            gamma,
            fitted,
            rss,
            edf,
            ref_df,
        })
    }

    fn gcv(&self, lambdas: &[f64]) -> f64 {
        match self.solve(lambdas, true) {
            Ok(sol) => {
                let n = self.n as f64;
                let denom = n - 1.0 - sol.edf.iter().sum::<f64>();
                if denom <= 0.0 {
                    f64::INFINITY
                } else {
                    n * sol.rss / (denom * denom)
                }
            }
            Err(_) => f64::INFINITY,
        }
    }

    fn select_gcv(&self) -> Result<Vec<f64>, FitError> {
        let m = self.blocks.len();
        if m == 0 {
            return Ok(Vec::new());
        }
        let grid = lambda_grid();
        let scores: Vec<f64> = grid.iter().map(|&l| self.gcv(&vec![l; m])).collect();
        let (shared, mut best) = argmin(&scores);
        if !best.is_finite() {
            return Err(FitError::SingularFit);
        }
        let mut idx = vec![shared; m];
        if m > 1 {
            for _ in 0..MAX_SWEEPS {
                let mut changed = false;
                for b in 0..m {
                    let mut trial: Vec<f64> = idx.iter().map(|&i| grid[i]).collect();
                    let scores: Vec<f64> = (0..GRID_SIZE)
                        .map(|g| {
                            if g == idx[b] {
                                best
                            } else {
                                trial[b] = grid[g];
                                self.gcv(&trial)
                            }
                        })
                        .collect();
                    let (g, score) = argmin(&scores);
                    if g != idx[b] {
                        idx[b] = g;
                        best = score;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
        }
        Ok(idx.into_iter().map(|i| grid[i]).collect())
    }

    fn into_fit(self, sol: Solution, lambdas: Vec<f64>) -> AdditiveFit {
        let n = self.n as f64;
        let coef_blocks = self
            .blocks
            .iter()
            .map(|b| {
                let g = sol.gamma.rows(b.range.start, b.range.len());
                (&self.constraint * g).iter().copied().collect()
            })
            .collect();
        let fitted = sol.fitted.iter().map(|f| f + self.y_mean).collect();
        AdditiveFit {
            predictors: self.blocks.iter().map(|b| b.column).collect(),
            coef_blocks,
            intercept: self.y_mean,
            sigma2_hat: sol.rss / n,
            smoothing: lambdas,
            edf: sol.edf,
            ref_df: sol.ref_df,
            num_basis: self.num_basis,
            bases: self.blocks.into_iter().map(|b| b.basis).collect(),
            fitted,
            rss: sol.rss,
        }
    }
}

/// Index and value of the minimum; the lowest index wins ties.
fn argmin(values: &[f64]) -> (usize, f64) {
    let mut best = (0, values[0]);
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < best.1 {
            best = (i, v);
        }
    }
    best
}
