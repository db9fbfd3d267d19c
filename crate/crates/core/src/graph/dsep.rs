use std::collections::VecDeque;

use super::Dag;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Dir {
    /// Arrived from a child, moving against edge direction.
    Up,
    /// Arrived from a parent.
    Down,
}

/// Nodes d-connected to `source` given `cond`, ignoring edges for which
/// `skip(k, j)` holds. Bayes-ball traversal over (node, direction) states.
pub(crate) fn reachable<F>(dag: &Dag, source: usize, cond: &[bool], skip: F) -> Vec<bool>
where
    F: Fn(usize, usize) -> bool,
{
    let p = dag.p();
    // ancestors of the conditioning set, inclusive; colliders there are open
    let mut cond_anc = cond.to_vec();
    let mut stack: Vec<usize> = (0..p).filter(|&v| cond[v]).collect();
    while let Some(v) = stack.pop() {
        for &u in dag.parents(v) {
            if !skip(u, v) && !cond_anc[u] {
                cond_anc[u] = true;
                stack.push(u);
            }
        }
    }

    let mut reached = vec![false; p];
    let mut seen = vec![[false; 2]; p];
    let mut queue = VecDeque::from([(source, Dir::Up)]);
    while let Some((v, dir)) = queue.pop_front() {
        let slot = &mut seen[v][dir as usize];
        if *slot {
            continue;
        }
        *slot = true;
        if !cond[v] {
            reached[v] = true;
        }
        let go_up = match dir {
            Dir::Up => !cond[v],
            Dir::Down => cond_anc[v],
        };
        let go_down = !cond[v];
        if go_up {
            for &u in dag.parents(v) {
                if !skip(u, v) {
                    queue.push_back((u, Dir::Up));
                }
            }
        }
        if go_down {
            for &c in dag.children(v) {
                if !skip(v, c) {
                    queue.push_back((c, Dir::Down));
                }
            }
        }
    }
    reached
}

/// `true` iff `x` and `y` are d-separated by `z` in `dag`.
///
/// Panics if any index is out of range or `x == y`.
pub fn d_separated(dag: &Dag, x: usize, y: usize, z: &[usize]) -> bool {
    assert!(x != y, "d-separation of a node from itself");
    let mut cond = vec![false; dag.p()];
    for &v in z {
        cond[v] = true;
    }
    if cond[x] || cond[y] {
        return true;
    }
    !reachable(dag, x, &cond, |_, _| false)[y]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_fork_collider() {
        let chain = Dag::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert!(!d_separated(&chain, 0, 2, &[]));
        assert!(d_separated(&chain, 0, 2, &[1]));

        let fork = Dag::from_edges(3, [(1, 0), (1, 2)]).unwrap();
        assert!(!d_separated(&fork, 0, 2, &[]));
        assert!(d_separated(&fork, 0, 2, &[1]));

        let collider = Dag::from_edges(4, [(0, 1), (2, 1), (1, 3)]).unwrap();
        assert!(d_separated(&collider, 0, 2, &[]));
        assert!(!d_separated(&collider, 0, 2, &[1]));
        // conditioning on a descendant of the collider opens it too
        assert!(!d_separated(&collider, 0, 2, &[3]));
    }
}
