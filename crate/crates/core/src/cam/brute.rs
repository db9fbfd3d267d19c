use itertools::Itertools;
use rayon::prelude::*;

use super::score::node_log_sigma;
use super::CamError;
use crate::data::Dataset;
use crate::graph::Ordering;

/// Exhaustive order search refuses anything larger.
pub const MAX_BRUTE_FORCE_NODES: usize = 6;

pub fn brute_force_order(data: &Dataset, num_basis: usize) -> Result<Ordering, CamError> {
    brute_force_search(data, num_basis).map(|(ord, _)| ord)
}

/// Scores the fully connected DAG of every permutation and returns the
/// minimizer with its score. The lexicographically smallest permutation wins
/// ties.
pub fn brute_force_search(data: &Dataset, num_basis: usize) -> Result<(Ordering, f64), CamError> {
    let p = data.p();
    if p > MAX_BRUTE_FORCE_NODES {
        return Err(CamError::TooManyNodes {
            p,
            max: MAX_BRUTE_FORCE_NODES,
            what: "exhaustive order search",
        });
    }
    if p <= 1 {
        let score = if p == 1 {
            node_log_sigma(data, 0, &[], num_basis).map_err(|source| CamError::Fit { node: 0, source })?
        } else {
            0.0
        };
        return Ok((Ordering::identity(p), score));
    }

    // node scores for every (node, predecessor set) pair, keyed by bitmask
    let keys: Vec<(usize, u32)> = (0..p)
        .flat_map(|j| (0u32..1 << p).filter(move |m| m & (1 << j) == 0).map(move |m| (j, m)))
        .collect();
    let values: Vec<f64> = keys
        .par_iter()
        .map(|&(j, m)| {
            let parents: Vec<usize> = (0..p).filter(|&k| m & (1 << k) != 0).collect();
            node_log_sigma(data, j, &parents, num_basis).map_err(|source| CamError::Fit { node: j, source })
        })
        .collect::<Result<_, _>>()?;
    let mut table = vec![f64::NAN; p << p];
    for (&(j, m), v) in keys.iter().zip(values) {
        table[(j << p) | m as usize] = v;
    }

    let mut best: Option<(Vec<usize>, f64)> = None;
    for perm in (0..p).permutations(p) {
        let mut seen = 0usize;
        let mut score = 0.0;
        for &j in &perm {
            score += table[(j << p) | seen];
            seen |= 1 << j;
        }
        if best.as_ref().is_none_or(|(_, b)| score < *b) {
            best = Some((perm, score));
        }
    }
    let (perm, score) = best.expect("p >= 2 has permutations");
    Ok((Ordering::new(perm)?, score))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cam::neg_log_lik_score;
    use crate::graph::full_dag_of_order;
    use crate::seed::rng_from_seed;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn trivial_sizes() {
        let one = Dataset::from_columns(vec![vec![1.0, 2.0, 4.0]]).unwrap();
        assert_eq!(brute_force_order(&one, 10).unwrap(), Ordering::identity(1));
        let seven = Dataset::from_columns(vec![vec![0.0; 20]; 7]).unwrap();
        assert!(matches!(
            brute_force_order(&seven, 10),
            Err(CamError::TooManyNodes { .. })
        ));
    }

    #[test]
    fn two_nodes_pick_smaller_score() {
        let mut rng = rng_from_seed(6);
        let x: Vec<f64> = (0..200).map(|_| rng.sample(StandardNormal)).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|v| v * v + 0.3 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let data = Dataset::from_columns(vec![x, y]).unwrap();
        let (ord, score) = brute_force_search(&data, 10).unwrap();
        let fwd = neg_log_lik_score(&data, &full_dag_of_order(&Ordering::identity(2)), 10).unwrap();
        let back_ord = Ordering::new(vec![1, 0]).unwrap();
        let back = neg_log_lik_score(&data, &full_dag_of_order(&back_ord), 10).unwrap();
        let expect = if fwd <= back { Ordering::identity(2) } else { back_ord };
        assert_eq!(ord, expect);
        assert!((score - fwd.min(back)).abs() < 1e-12);
    }
}
