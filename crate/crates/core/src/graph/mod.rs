//! Directed acyclic graphs over positional node indices, orderings, and the
//! structural distances (SHD, SID) used to score estimates against a truth.

mod dsep;
mod metrics;

pub use dsep::d_separated;
pub use metrics::{shd, sid};

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("node index {node} out of range for a graph with {p} nodes")]
    NodeOutOfRange { node: usize, p: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(usize, usize),
    #[error("edge {0} -> {1} would close a directed cycle")]
    Cycle(usize, usize),
    #[error("dimension mismatch: {left} vs {right} nodes")]
    DimensionMismatch { left: usize, right: usize },
    #[error("ordering is not a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error("{0} labels given for {1} nodes")]
    LabelCount(usize, usize),
}

/// A DAG on nodes `0..p`. Edge `(k, j)` means `k -> j`.
///
/// Parent and child lists are kept sorted, so iteration order is a pure
/// function of the edge set.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DagRepr", into = "DagRepr")]
pub struct Dag {
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    labels: Option<Vec<String>>,
}

impl fmt::Debug for Dag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Dag")
            .field("p", &self.p())
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

impl Dag {
    pub fn empty(p: usize) -> Self {
        Dag {
            parents: vec![Vec::new(); p],
            children: vec![Vec::new(); p],
            labels: None,
        }
    }

    /// Builds a DAG from an edge list, rejecting self-loops, duplicates,
    /// out-of-range endpoints and cycles.
    pub fn from_edges<I>(p: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut dag = Dag::empty(p);
        for (k, j) in edges {
            dag.check_endpoints(k, j)?;
            if dag.has_edge(k, j) {
                return Err(GraphError::DuplicateEdge(k, j));
            }
            dag.insert_unchecked(k, j);
        }
        if dag.topological_order().is_none() {
            // report the first edge that participates in a cycle
            let culprit = dag
                .edges()
                .find(|&(k, j)| dag.reaches(j, k))
                .expect("cyclic graph has an edge on a cycle");
            return Err(GraphError::Cycle(culprit.0, culprit.1));
        }
        Ok(dag)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, GraphError> {
        if labels.len() != self.p() {
            return Err(GraphError::LabelCount(labels.len(), self.p()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn p(&self) -> usize {
        self.parents.len()
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    pub fn parents(&self, j: usize) -> &[usize] {
        &self.parents[j]
    }

    pub fn children(&self, k: usize) -> &[usize] {
        &self.children[k]
    }

    pub fn has_edge(&self, k: usize, j: usize) -> bool {
        self.parents
            .get(j)
            .is_some_and(|pa| pa.binary_search(&k).is_ok())
    }

    /// Edges in lexicographic `(k, j)` order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.children
            .iter()
            .enumerate()
            .flat_map(|(k, ch)| ch.iter().map(move |&j| (k, j)))
    }

    /// Adds `k -> j`, refusing anything that breaks the DAG invariants.
    pub fn add_edge(&mut self, k: usize, j: usize) -> Result<(), GraphError> {
        self.check_endpoints(k, j)?;
        if self.has_edge(k, j) {
            return Err(GraphError::DuplicateEdge(k, j));
        }
        if self.reaches(j, k) {
            return Err(GraphError::Cycle(k, j));
        }
        self.insert_unchecked(k, j);
        Ok(())
    }

    pub fn remove_edge(&mut self, k: usize, j: usize) -> bool {
        let Some(pa) = self.parents.get_mut(j) else {
            return false;
        };
        match pa.binary_search(&k) {
            Ok(pos) => {
                pa.remove(pos);
                let ch = &mut self.children[k];
                let pos = ch.binary_search(&j).expect("child list mirrors parent list");
                ch.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    /// All nodes reachable from `node` by a directed path of length at least one.
    pub fn descendants(&self, node: usize) -> Result<BTreeSet<usize>, GraphError> {
        self.check_node(node)?;
        Ok(self.walk(node, |v| &self.children[v]))
    }

    /// All nodes with a directed path of length at least one into `node`.
    pub fn ancestors(&self, node: usize) -> Result<BTreeSet<usize>, GraphError> {
        self.check_node(node)?;
        Ok(self.walk(node, |v| &self.parents[v]))
    }

    /// `true` if there is a directed path `from ~> to` (length zero counts).
    pub fn reaches(&self, from: usize, to: usize) -> bool {
        if from == to {
            return true;
        }
        let mut seen = vec![false; self.p()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(v) = stack.pop() {
            for &c in &self.children[v] {
                if c == to {
                    return true;
                }
                if !seen[c] {
                    seen[c] = true;
                    stack.push(c);
                }
            }
        }
        false
    }

    /// Kahn's algorithm, always releasing the lowest-index ready node first.
    /// Returns `None` if the edge set contains a cycle.
    pub fn topological_order(&self) -> Option<Ordering> {
        let p = self.p();
        let mut indeg: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<usize> = (0..p).filter(|&v| indeg[v] == 0).collect();
        let mut perm = Vec::with_capacity(p);
        while let Some(v) = ready.pop_first() {
            perm.push(v);
            for &c in &self.children[v] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        (perm.len() == p).then_some(Ordering { perm })
    }

    fn walk<'a, F>(&'a self, start: usize, next: F) -> BTreeSet<usize>
    where
        F: Fn(usize) -> &'a [usize],
    {
        let mut out = BTreeSet::new();
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in next(v) {
                if out.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        out
    }

    fn insert_unchecked(&mut self, k: usize, j: usize) {
        let pa = &mut self.parents[j];
        let pos = pa.binary_search(&k).unwrap_err();
        pa.insert(pos, k);
        let ch = &mut self.children[k];
        let pos = ch.binary_search(&j).unwrap_err();
        ch.insert(pos, j);
    }

    fn check_node(&self, node: usize) -> Result<(), GraphError> {
        if node >= self.p() {
            return Err(GraphError::NodeOutOfRange { node, p: self.p() });
        }
        Ok(())
    }

    fn check_endpoints(&self, k: usize, j: usize) -> Result<(), GraphError> {
        self.check_node(k)?;
        self.check_node(j)?;
        if k == j {
            return Err(GraphError::SelfLoop(k));
        }
        Ok(())
    }
}

/// Wire form: `{"p": 3, "edges": [[0, 1], [1, 2]]}` plus optional labels.
#[derive(Serialize, Deserialize)]
struct DagRepr {
    p: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl TryFrom<DagRepr> for Dag {
    type Error = GraphError;

    fn try_from(r: DagRepr) -> Result<Self, Self::Error> {
        let dag = Dag::from_edges(r.p, r.edges.into_iter().map(|[k, j]| (k, j)))?;
        match r.labels {
            Some(labels) => dag.with_labels(labels),
            None => Ok(dag),
        }
    }
}

impl From<Dag> for DagRepr {
    fn from(d: Dag) -> Self {
        DagRepr {
            p: d.p(),
            edges: d.edges().map(|(k, j)| [k, j]).collect(),
            labels: d.labels,
        }
    }
}

/// A causal ordering: position `i` holds node `perm[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ordering {
    perm: Vec<usize>,
}

impl Ordering {
    pub fn new(perm: Vec<usize>) -> Result<Self, GraphError> {
        let p = perm.len();
        let mut seen = vec![false; p];
        for &v in &perm {
            if v >= p || std::mem::replace(&mut seen[v], true) {
                return Err(GraphError::NotAPermutation(p));
            }
        }
        Ok(Ordering { perm })
    }

    pub fn identity(p: usize) -> Self {
        Ordering {
            perm: (0..p).collect(),
        }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    /// `position[v]` is the index of node `v` in the ordering.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.perm.len()];
        for (i, &v) in self.perm.iter().enumerate() {
            pos[v] = i;
        }
        pos
    }
}

/// `true` iff every edge of `dag` points forward in `ord`, i.e. the fully
/// connected DAG of `ord` is a super-DAG of `dag`.
pub fn topological_orders_contains(dag: &Dag, ord: &Ordering) -> Result<bool, GraphError> {
    if dag.p() != ord.len() {
        return Err(GraphError::DimensionMismatch {
            left: dag.p(),
            right: ord.len(),
        });
    }
    let pos = ord.positions();
    Ok(dag.edges().all(|(k, j)| pos[k] < pos[j]))
}

/// The fully connected DAG with an edge from every earlier to every later node.
pub fn full_dag_of_order(ord: &Ordering) -> Dag {
    let p = ord.len();
    let mut dag = Dag::empty(p);
    for (i, &k) in ord.perm.iter().enumerate() {
        for &j in &ord.perm[i + 1..] {
            dag.insert_unchecked(k, j);
        }
    }
    dag
}

/// Tracks which edges may still be added to a growing DAG without creating a
/// cycle, optionally restricted to a fixed set of candidate parents per node.
#[derive(Debug, Clone)]
pub struct EdgeCandidateMask {
    p: usize,
    allowed: Vec<bool>,
}

impl EdgeCandidateMask {
    /// Every off-diagonal pair allowed.
    pub fn full(p: usize) -> Self {
        let mut allowed = vec![true; p * p];
        for v in 0..p {
            allowed[v * p + v] = false;
        }
        EdgeCandidateMask { p, allowed }
    }

    /// Only `k -> j` with `k` in `candidates[j]`.
    pub fn restricted(candidates: &[BTreeSet<usize>]) -> Self {
        let p = candidates.len();
        let mut allowed = vec![false; p * p];
        for (j, set) in candidates.iter().enumerate() {
            for &k in set {
                if k != j && k < p {
                    allowed[k * p + j] = true;
                }
            }
        }
        EdgeCandidateMask { p, allowed }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn is_allowed(&self, k: usize, j: usize) -> bool {
        self.allowed[k * self.p + j]
    }

    pub fn disable(&mut self, k: usize, j: usize) {
        self.allowed[k * self.p + j] = false;
    }

    /// Records that `k -> j` was just added to `dag` (which must already
    /// contain it): disables the edge itself and every `a -> b` where `b`
    /// now reaches `a`.
    pub fn record_edge(&mut self, dag: &Dag, k: usize, j: usize) {
        debug_assert!(dag.has_edge(k, j));
        let mut upstream = dag.walk(k, |v| &dag.parents[v]);
        upstream.insert(k);
        let mut downstream = dag.walk(j, |v| &dag.children[v]);
        downstream.insert(j);
        for &a in &downstream {
            for &b in &upstream {
                self.allowed[a * self.p + b] = false;
            }
        }
        self.disable(k, j);
    }

    pub fn any_allowed(&self) -> bool {
        self.allowed.iter().any(|&a| a)
    }
}
