//! Oracles and generators shared by the integration tests. Nothing here
//! calls the graph metrics it is used to check.

#![allow(dead_code)]

use causal_additive::seed::Rng;
use causal_additive::{Dag, Ordering};
use nalgebra::DMatrix;
use rand::Rng as _;

/// A uniformly chosen source among the unplaced nodes at every step, so
/// every topological order has positive probability.
pub fn random_linear_extension(dag: &Dag, rng: &mut Rng) -> Ordering {
    let p = dag.p();
    let mut placed = vec![false; p];
    let mut perm = Vec::with_capacity(p);
    while perm.len() < p {
        let ready: Vec<usize> = (0..p)
            .filter(|&j| !placed[j] && dag.parents(j).iter().all(|&k| placed[k]))
            .collect();
        let j = ready[rng.gen_range(0..ready.len())];
        placed[j] = true;
        perm.push(j);
    }
    Ordering::new(perm).unwrap()
}

/// Reachability by boolean matrix powers of the adjacency matrix.
pub fn reach_matrix(dag: &Dag) -> Vec<Vec<bool>> {
    let p = dag.p();
    let adj: Vec<Vec<bool>> = (0..p).map(|k| (0..p).map(|j| dag.has_edge(k, j)).collect()).collect();
    let mut power = adj.clone();
    let mut reach = adj.clone();
    for _ in 1..p {
        let next: Vec<Vec<bool>> = (0..p)
            .map(|a| (0..p).map(|b| (0..p).any(|c| power[a][c] && adj[c][b])).collect())
            .collect();
        for a in 0..p {
            for b in 0..p {
                reach[a][b] |= next[a][b];
            }
        }
        power = next;
    }
    reach
}

/// Structural intervention distance from a linear Gaussian SEM on `truth`
/// with random positive weights. A pair `(i, j)` counts as correct when the
/// regression coefficient of `X_i` in `X_j ~ X_i + X_pa(i)`, with the
/// parents taken from `estimate`, equals the total effect of `i` on `j`. If
/// `j` is an estimated parent of `i` the estimate claims no effect.
pub fn linear_sem_sid(truth: &Dag, estimate: &Dag, rng: &mut Rng) -> usize {
    let p = truth.p();
    let mut b = DMatrix::<f64>::zeros(p, p);
    for (k, j) in truth.edges() {
        b[(j, k)] = rng.gen_range(0.5..1.5);
    }
    let a = (DMatrix::identity(p, p) - &b).try_inverse().unwrap();
    let omega = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(p, |_, _| rng.gen_range(0.5..1.5)));
    let sigma = &a * omega * a.transpose();

    let mut wrong = 0;
    for i in 0..p {
        let z = estimate.parents(i);
        for j in (0..p).filter(|&j| j != i) {
            let effect = a[(j, i)];
            let claimed = if z.contains(&j) {
                0.0
            } else {
                let s: Vec<usize> = std::iter::once(i).chain(z.iter().copied()).collect();
                let sss = DMatrix::from_fn(s.len(), s.len(), |r, c| sigma[(s[r], s[c])]);
                let ssj = DMatrix::from_fn(s.len(), 1, |r, _| sigma[(s[r], j)]);
                let coef = sss.lu().solve(&ssj).unwrap();
                coef[(0, 0)]
            };
            if (claimed - effect).abs() > 1e-8 * effect.abs().max(1.0) {
                wrong += 1;
            }
        }
    }
    wrong
}

/// Edge additions, deletions and reversals, each unordered pair counted
/// at most once.
pub fn brute_shd(g: &Dag, h: &Dag) -> usize {
    let p = g.p();
    let mut d = 0;
    for a in 0..p {
        for b in a + 1..p {
            if (g.has_edge(a, b), g.has_edge(b, a)) != (h.has_edge(a, b), h.has_edge(b, a)) {
                d += 1;
            }
        }
    }
    d
}
