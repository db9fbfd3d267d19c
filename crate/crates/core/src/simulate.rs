//! Synthetic data from additive structural equation models: random sparse
//! DAGs, Gaussian-process or sigmoid edge functions, optionally
//! power-transformed noise, and a mixture with a joint non-additive term.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::{Distribution, Exp, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::graph::{Dag, GraphError};
use crate::seed::{rng_from_seed, Rng};

const GP_JITTER: f64 = 1e-8;
const JITTER_RETRIES: usize = 3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimulationError {
    #[error("Gaussian-process covariance not positive definite after jitter {jitter:e}")]
    Cholesky { jitter: f64 },
    #[error("invalid SEM specification: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionKind {
    #[serde(alias = "gp")]
    GaussianProcess,
    Sigmoid,
    Linear,
}

/// One edge (or joint) function of the SEM.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSpec {
    /// A path of a zero-mean GP with kernel `exp(-|x - x'|^2 / (2 bandwidth^2))`,
    /// realized at the sampled inputs.
    GaussianProcess { bandwidth: f64 },
    /// `a * b (x + c) / (1 + |b (x + c)|)`
    Sigmoid { a: f64, b: f64, c: f64 },
    Linear { slope: f64 },
}

impl FunctionSpec {
    pub fn gp() -> Self {
        FunctionSpec::GaussianProcess { bandwidth: 1.0 }
    }

    /// Closed-form value; `None` for Gaussian-process functions, which only
    /// exist as realized paths.
    pub fn eval(&self, x: f64) -> Option<f64> {
        match *self {
            FunctionSpec::GaussianProcess { .. } => None,
            FunctionSpec::Sigmoid { a, b, c } => {
                let u = b * (x + c);
                Some(a * u / (1.0 + u.abs()))
            }
            FunctionSpec::Linear { slope } => Some(slope * x),
        }
    }

    fn validate(&self) -> Result<(), SimulationError> {
        match *self {
            FunctionSpec::GaussianProcess { bandwidth } if !(bandwidth > 0.0) => Err(
                SimulationError::InvalidSpec(format!("GP bandwidth {bandwidth} must be positive")),
            ),
            FunctionSpec::Sigmoid { b, .. } if b == 0.0 || !b.is_finite() => {
                Err(SimulationError::InvalidSpec("sigmoid slope b must be nonzero".into()))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeFunction {
    pub from: usize,
    pub to: usize,
    pub function: FunctionSpec,
}

/// A fully specified generative model.
///
/// `noise_sd[j]` is the standard deviation of the Gaussian `N_j` before the
/// power transform; for source nodes it is the node's own scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemSpec {
    pub dag: Dag,
    pub edge_functions: Vec<EdgeFunction>,
    pub noise_sd: Vec<f64>,
    #[serde(default = "one")]
    pub noise_gamma: f64,
    #[serde(default = "one")]
    pub mixture_omega: f64,
    /// Joint function of all parents per node, used when `mixture_omega < 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub joint_functions: Option<BTreeMap<usize, FunctionSpec>>,
}

fn one() -> f64 {
    1.0
}

impl SemSpec {
    /// Draws edge functions and noise scales for `dag`. Sources get noise sd
    /// from `U[1, sqrt 2]`, other nodes from `U[1/5, sqrt 2 / 5]`.
    pub fn sample(
        dag: Dag,
        kind: FunctionKind,
        gamma: f64,
        omega: f64,
        rng: &mut Rng,
    ) -> Result<Self, SimulationError> {
        let sqrt2 = std::f64::consts::SQRT_2;
        let noise_sd = (0..dag.p())
            .map(|j| {
                if dag.parents(j).is_empty() {
                    rng.gen_range(1.0..sqrt2)
                } else {
                    rng.gen_range(0.2..sqrt2 / 5.0)
                }
            })
            .collect();
        let edge_functions = dag
            .edges()
            .map(|(from, to)| EdgeFunction {
                from,
                to,
                function: match kind {
                    FunctionKind::GaussianProcess => FunctionSpec::gp(),
                    FunctionKind::Sigmoid => sample_sigmoid(rng),
                    FunctionKind::Linear => {
                        let s: f64 = rng.gen_range(0.5..1.5);
                        FunctionSpec::Linear {
                            slope: if rng.gen::<bool>() { s } else { -s },
                        }
                    }
                },
            })
            .collect();
        let joint_functions = (omega < 1.0).then(|| {
            (0..dag.p())
                .filter(|&j| !dag.parents(j).is_empty())
                .map(|j| (j, FunctionSpec::gp()))
                .collect()
        });
        let spec = SemSpec {
            dag,
            edge_functions,
            noise_sd,
            noise_gamma: gamma,
            mixture_omega: omega,
            joint_functions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), SimulationError> {
        let p = self.dag.p();
        if self.noise_sd.len() != p {
            return Err(SimulationError::InvalidSpec(format!(
                "{} noise scales for {p} nodes",
                self.noise_sd.len()
            )));
        }
        if let Some(j) = self.noise_sd.iter().position(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(SimulationError::InvalidSpec(format!("noise sd of node {j} not positive")));
        }
        if !(self.noise_gamma > 0.0 && self.noise_gamma.is_finite()) {
            return Err(SimulationError::InvalidSpec("noise exponent must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.mixture_omega) {
            return Err(SimulationError::InvalidSpec("mixture weight outside [0, 1]".into()));
        }
        let mut covered = vec![false; p * p];
        for e in &self.edge_functions {
            if !self.dag.has_edge(e.from, e.to) {
                return Err(SimulationError::InvalidSpec(format!(
                    "function given for non-edge {} -> {}",
                    e.from, e.to
                )));
            }
            e.function.validate()?;
            covered[e.from * p + e.to] = true;
        }
        if let Some((k, j)) = self.dag.edges().find(|&(k, j)| !covered[k * p + j]) {
            return Err(SimulationError::InvalidSpec(format!("edge {k} -> {j} has no function")));
        }
        if self.mixture_omega < 1.0 {
            let joint = self.joint_functions.as_ref();
            for j in (0..p).filter(|&j| !self.dag.parents(j).is_empty()) {
                match joint.and_then(|m| m.get(&j)) {
                    Some(f) => f.validate()?,
                    None => {
                        return Err(SimulationError::InvalidSpec(format!(
                            "node {j} needs a joint function when mixture weight < 1"
                        )))
                    }
                }
            }
        }
        Ok(())
    }

    fn function(&self, from: usize, to: usize) -> &FunctionSpec {
        &self
            .edge_functions
            .iter()
            .find(|e| e.from == from && e.to == to)
            .expect("validated spec covers every edge")
            .function
    }
}

/// Random DAG: a uniformly drawn causal ordering, with each of the
/// `p(p-1)/2` forward pairs included independently with probability `p_conn`.
///
/// Panics unless `0 <= p_conn <= 1`.
pub fn random_dag(p: usize, p_conn: f64, rng: &mut Rng) -> Dag {
    assert!((0.0..=1.0).contains(&p_conn), "p_conn = {p_conn}");
    let mut order: Vec<usize> = (0..p).collect();
    order.shuffle(rng);
    let mut dag = Dag::empty(p);
    for i in 0..p {
        for &j in &order[i + 1..] {
            if rng.gen::<f64>() < p_conn {
                dag.add_edge(order[i], j).expect("forward edges never close a cycle");
            }
        }
    }
    dag
}

/// Sigmoid-type edge function with `a ~ 1 + Exp(rate 4)`,
/// `b ~ U([-2, -0.5] u [0.5, 2])`, `c ~ U([-2, 2])`.
pub fn sample_sigmoid(rng: &mut Rng) -> FunctionSpec {
    let a = 1.0 + Exp::new(4.0).expect("positive rate").sample(rng);
    let magnitude: f64 = rng.gen_range(0.5..=2.0);
    let b = if rng.gen::<bool>() { magnitude } else { -magnitude };
    let c = rng.gen_range(-2.0..=2.0);
    FunctionSpec::Sigmoid { a, b, c }
}

/// Draws `n` observations by ancestral sampling.
pub fn simulate_data(spec: &SemSpec, n: usize, rng: &mut Rng) -> Result<Dataset, SimulationError> {
    if n == 0 {
        return Err(SimulationError::InvalidSpec("sample size must be positive".into()));
    }
    spec.validate()?;
    let dag = &spec.dag;
    let p = dag.p();
    let order = dag
        .topological_order()
        .expect("Dag values are acyclic by construction");
    let omega = spec.mixture_omega;
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); p];
    for &j in order.as_slice() {
        let parents = dag.parents(j);
        let mut value = vec![0.0; n];
        for &k in parents {
            let f = realize(spec.function(k, j), &[&columns[k]], rng)?;
            for (v, fi) in value.iter_mut().zip(f) {
                *v += fi;
            }
        }
        if omega < 1.0 && !parents.is_empty() {
            let joint = spec
                .joint_functions
                .as_ref()
                .and_then(|m| m.get(&j))
                .expect("validated spec has joint functions");
            let inputs: Vec<&[f64]> = parents.iter().map(|&k| columns[k].as_slice()).collect();
            let g = realize(joint, &inputs, rng)?;
            for (v, gi) in value.iter_mut().zip(g) {
                *v = omega * *v + (1.0 - omega) * gi;
            }
        }
        let sd = spec.noise_sd[j];
        let gamma = spec.noise_gamma;
        for v in value.iter_mut() {
            let raw: f64 = sd * rng.sample::<f64, _>(StandardNormal);
            *v += if gamma == 1.0 {
                raw
            } else {
                raw.signum() * raw.abs().powf(gamma)
            };
        }
        columns[j] = value;
    }
    Ok(Dataset::from_columns(columns).expect("p >= 1 equal-length columns"))
}

/// Function values at the rows of `inputs` (one slice per input dimension).
fn realize(f: &FunctionSpec, inputs: &[&[f64]], rng: &mut Rng) -> Result<Vec<f64>, SimulationError> {
    match f {
        FunctionSpec::GaussianProcess { bandwidth } => gp_sample(inputs, *bandwidth, rng),
        other => {
            assert_eq!(inputs.len(), 1, "closed-form functions are univariate");
            Ok(inputs[0]
                .iter()
                .map(|&x| other.eval(x).expect("closed form"))
                .collect())
        }
    }
}

/// One path of a zero-mean Gaussian process with RBF kernel, evaluated at the
/// points whose coordinates are given column-wise in `inputs`, then centered
/// to sample mean zero. Repeated points receive identical values.
pub fn gp_sample(
    inputs: &[&[f64]],
    bandwidth: f64,
    rng: &mut Rng,
) -> Result<Vec<f64>, SimulationError> {
    let n = inputs.first().map_or(0, |c| c.len());
    let point = |i: usize| inputs.iter().map(move |c| c[i]);

    // collapse duplicate points so the covariance stays nonsingular
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| {
        point(a)
            .zip(point(b))
            .map(|(x, y)| x.total_cmp(&y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut unique: Vec<usize> = Vec::new();
    let mut slot = vec![0; n];
    for &i in &idx {
        let same = unique.last().is_some_and(|&u| point(u).eq(point(i)));
        if !same {
            unique.push(i);
        }
        slot[i] = unique.len() - 1;
    }

    let m = unique.len();
    let scale = 2.0 * bandwidth * bandwidth;
    let kernel = DMatrix::from_fn(m, m, |a, b| {
        let d2: f64 = point(unique[a])
            .zip(point(unique[b]))
            .map(|(x, y)| (x - y) * (x - y))
            .sum();
        (-d2 / scale).exp()
    });
    let mut jitter = GP_JITTER;
    let mut chol = None;
    for attempt in 0..=JITTER_RETRIES {
        if attempt > 0 {
            jitter *= 10.0;
        }
        let k = &kernel + DMatrix::identity(m, m) * jitter;
        if let Some(c) = k.cholesky() {
            chol = Some(c);
            break;
        }
    }
    let chol = chol.ok_or(SimulationError::Cholesky { jitter })?;
    let z = nalgebra::DVector::from_fn(m, |_, _| rng.sample::<f64, _>(StandardNormal));
    let draw = chol.l() * z;
    let mut values: Vec<f64> = (0..n).map(|i| draw[slot[i]]).collect();
    let mean = values.iter().sum::<f64>() / n.max(1) as f64;
    for v in values.iter_mut() {
        *v -= mean;
    }
    Ok(values)
}

/// Parameters of a random simulation instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationDesign {
    pub p: usize,
    pub n: usize,
    /// Edge probability; `None` means `2 / (p - 1)`, about `p` expected edges.
    #[serde(default)]
    pub p_conn: Option<f64>,
    pub function_kind: FunctionKind,
    #[serde(default = "one")]
    pub gamma: f64,
    #[serde(default = "one")]
    pub omega: f64,
}

/// One simulated problem: the true graph, its generating model, and data.
#[derive(Debug, Clone)]
pub struct Instance {
    pub spec: SemSpec,
    pub data: Dataset,
}

impl Instance {
    pub fn truth(&self) -> &Dag {
        &self.spec.dag
    }
}

impl SimulationDesign {
    pub fn sparse_gp(p: usize, n: usize) -> Self {
        SimulationDesign {
            p,
            n,
            p_conn: None,
            function_kind: FunctionKind::GaussianProcess,
            gamma: 1.0,
            omega: 1.0,
        }
    }

    pub fn edge_probability(&self) -> f64 {
        self.p_conn.unwrap_or_else(|| {
            if self.p > 1 {
                (2.0 / (self.p - 1) as f64).min(1.0)
            } else {
                0.0
            }
        })
    }

    /// Draws the DAG, the model, and the data from a single seed.
    pub fn sample(&self, seed: u64) -> Result<Instance, SimulationError> {
        let mut rng = rng_from_seed(seed);
        let p_conn = self.edge_probability();
        if !(0.0..=1.0).contains(&p_conn) {
            return Err(SimulationError::InvalidSpec(format!("p_conn = {p_conn}")));
        }
        let dag = random_dag(self.p, p_conn, &mut rng);
        let spec = SemSpec::sample(dag, self.function_kind, self.gamma, self.omega, &mut rng)?;
        let data = simulate_data(&spec, self.n, &mut rng)?;
        Ok(Instance { spec, data })
    }
}
