use nalgebra::DMatrix;

use super::FitError;

const DEGREE: usize = 3;

/// Cubic B-spline basis with interior knots at empirical quantiles of the
/// fitting sample. Evaluated columns are centered on that sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineBasis {
    degree: usize,
    num_basis: usize,
    /// Boundary and interior knots, strictly increasing.
    knots: Vec<f64>,
    /// Full clamped knot vector (boundary knots repeated `degree + 1` times).
    augmented: Vec<f64>,
    centering_offsets: Vec<f64>,
}

/// Builds a centered cubic B-spline basis with `num_basis` functions for
/// `x`. Interior knots sit at equally spaced empirical quantiles and the
/// boundary knots at the sample extremes.
pub fn make_basis(x: &[f64], num_basis: usize) -> Result<SplineBasis, FitError> {
    if num_basis < DEGREE + 1 {
        return Err(FitError::InvalidArgument(format!(
            "cubic splines need at least 4 basis functions, got {num_basis}"
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(FitError::InvalidData);
    }
    if x.len() < num_basis + 2 {
        return Err(FitError::DegenerateColumn {
            reason: format!("{} observations for {num_basis} basis functions", x.len()),
        });
    }
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut distinct = sorted.clone();
    distinct.dedup();
    if distinct.len() < num_basis {
        return Err(FitError::DegenerateColumn {
            reason: format!("{} distinct values for {num_basis} basis functions", distinct.len()),
        });
    }

    let n_interior = num_basis - DEGREE - 1;
    let interior = quantile_knots(&sorted, n_interior)
        .filter(|k| strictly_increasing(k, sorted[0], sorted[sorted.len() - 1]))
        .or_else(|| {
            quantile_knots(&distinct, n_interior)
                .filter(|k| strictly_increasing(k, distinct[0], distinct[distinct.len() - 1]))
        })
        .ok_or_else(|| FitError::DegenerateColumn {
            reason: "quantile knots collapse".into(),
        })?;

    let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
    let mut knots = Vec::with_capacity(n_interior + 2);
    knots.push(lo);
    knots.extend_from_slice(&interior);
    knots.push(hi);

    let mut augmented = vec![lo; DEGREE];
    augmented.extend_from_slice(&knots);
    augmented.extend(std::iter::repeat_n(hi, DEGREE));

    let mut basis = SplineBasis {
        degree: DEGREE,
        num_basis,
        knots,
        augmented,
        centering_offsets: vec![0.0; num_basis],
    };
    let raw = basis.evaluate_raw(x);
    let n = x.len() as f64;
    basis.centering_offsets = raw.column_iter().map(|c| c.sum() / n).collect();
    Ok(basis)
}

fn quantile_knots(sorted: &[f64], count: usize) -> Option<Vec<f64>> {
    let last = (sorted.len() - 1) as f64;
    let knots = (1..=count)
        .map(|i| {
            let pos = last * i as f64 / (count + 1) as f64;
            let lo = pos.floor() as usize;
            let frac = pos - lo as f64;
            if lo + 1 < sorted.len() {
                sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
            } else {
                sorted[lo]
            }
        })
        .collect();
    Some(knots)
}

fn strictly_increasing(interior: &[f64], lo: f64, hi: f64) -> bool {
    std::iter::once(lo)
        .chain(interior.iter().copied())
        .chain(std::iter::once(hi))
        .collect::<Vec<_>>()
        .windows(2)
        .all(|w| w[0] < w[1])
}

impl SplineBasis {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn num_basis(&self) -> usize {
        self.num_basis
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn centering_offsets(&self) -> &[f64] {
        &self.centering_offsets
    }

    /// Uncentered basis values; rows sum to one on the knot range.
    /// Inputs outside the boundary knots are clamped.
    pub fn evaluate_raw(&self, x: &[f64]) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(x.len(), self.num_basis);
        let mut local = [0.0; DEGREE + 1];
        for (row, &xi) in x.iter().enumerate() {
            let span = self.nonzero_basis(xi, &mut local);
            for (r, &v) in local.iter().enumerate() {
                out[(row, span - DEGREE + r)] = v;
            }
        }
        out
    }

    /// Basis values minus the fitting-sample column means.
    pub fn evaluate(&self, x: &[f64]) -> DMatrix<f64> {
        let mut out = self.evaluate_raw(x);
        for (mut col, &off) in out.column_iter_mut().zip(&self.centering_offsets) {
            col.add_scalar_mut(-off);
        }
        out
    }

    /// Cox-de Boor triangle for the `degree + 1` functions nonzero at `x`.
    /// Returns the knot span index into the augmented knot vector.
    fn nonzero_basis(&self, x: f64, out: &mut [f64; DEGREE + 1]) -> usize {
        let t = &self.augmented;
        let lo = t[DEGREE];
        let hi = t[t.len() - DEGREE - 1];
        let x = x.clamp(lo, hi);
        // last span whose left end is <= x, capped so x == hi lands in the final span
        let max_span = t.len() - DEGREE - 2;
        let span = match t[DEGREE..=max_span].partition_point(|&k| k <= x) {
            0 => DEGREE,
            i => DEGREE + i - 1,
        };

        let mut left = [0.0; DEGREE + 1];
        let mut right = [0.0; DEGREE + 1];
        out[0] = 1.0;
        for d in 1..=DEGREE {
            left[d] = x - t[span + 1 - d];
            right[d] = t[span + d] - x;
            let mut saved = 0.0;
            for r in 0..d {
                let denom = right[r + 1] + left[d - r];
                let tmp = if denom > 0.0 { out[r] / denom } else { 0.0 };
                out[r] = saved + right[r + 1] * tmp;
                saved = left[d - r] * tmp;
            }
            out[d] = saved;
        }
        span
    }
}

/// Second-order difference penalty `D^T D` for `m` coefficients.
pub fn difference_penalty(m: usize) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(m.saturating_sub(2), m);
    for r in 0..m.saturating_sub(2) {
        d[(r, r)] = 1.0;
        d[(r, r + 1)] = -2.0;
        d[(r, r + 2)] = 1.0;
    }
    d.transpose() * d
}

/// Orthonormal `m x (m - 1)` basis of the complement of the all-ones vector.
///
/// Centered B-spline columns sum to zero, so coefficients are only identified
/// up to a multiple of ones; fitting in this complement removes the slack.
pub(crate) fn sum_to_zero_constraint(m: usize) -> DMatrix<f64> {
    // Householder reflection sending e_1 to -ones/sqrt(m); its other columns
    // span the orthogonal complement of ones.
    let s = (m as f64).sqrt();
    let mut v = vec![1.0 / s; m];
    v[0] += 1.0;
    let vtv: f64 = v.iter().map(|a| a * a).sum();
    DMatrix::from_fn(m, m - 1, |r, c| {
        let col = c + 1;
        let id = if r == col { 1.0 } else { 0.0 };
        id - 2.0 * v[r] * v[col] / vtv
    })
}
