use causal_additive::cam::{
    brute_force_order, cam_pipeline, inc_edge, inc_edge_traced, neg_log_lik_score, pns, prune, CamConfig,
};
use causal_additive::graph::{full_dag_of_order, shd, sid};
use causal_additive::seed::{rng_from_seed, split_seed};
use causal_additive::simulate::SimulationDesign;
use causal_additive::{Dag, Dataset, Ordering};
use rand::Rng;
use rand_distr::StandardNormal;

fn no_pns() -> CamConfig {
    CamConfig {
        use_pns: false,
        ..CamConfig::default()
    }
}

fn nonlinear_pair(seed: u64, n: usize) -> Dataset {
    let mut rng = rng_from_seed(seed);
    let x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let y: Vec<f64> = x
        .iter()
        .map(|v| 2.0 * (1.5 * v).sin() + 0.3 * rng.sample::<f64, _>(StandardNormal))
        .collect();
    Dataset::from_columns(vec![x, y]).unwrap()
}

#[test]
fn empty_dag_score_is_sum_of_log_sd() {
    let data = SimulationDesign::sparse_gp(4, 100).sample(41).unwrap().data;
    let expect: f64 = (0..4)
        .map(|j| {
            let c = data.column(j);
            let m = c.iter().sum::<f64>() / 100.0;
            (c.iter().map(|v| (v - m).powi(2)).sum::<f64>() / 100.0).sqrt().ln()
        })
        .sum();
    let got = neg_log_lik_score(&data, &Dag::empty(4), 10).unwrap();
    assert!((got - expect).abs() < 1e-12);
}

#[test]
fn single_edge_additions_never_raise_the_score() {
    let mut rng = rng_from_seed(42);
    for s in 0..20 {
        let inst = SimulationDesign::sparse_gp(5, 120).sample(split_seed(42, s)).unwrap();
        let base = inst.truth().clone();
        let before = neg_log_lik_score(&inst.data, &base, 10).unwrap();
        let mut dag = base.clone();
        loop {
            let (k, j) = (rng.gen_range(0..5), rng.gen_range(0..5));
            if k != j && !dag.has_edge(k, j) && dag.add_edge(k, j).is_ok() {
                break;
            }
        }
        let after = neg_log_lik_score(&inst.data, &dag, 10).unwrap();
        assert!(after <= before + 1e-12, "{after} > {before}");
    }
}

#[test]
fn chain_beats_empty_by_a_margin() {
    let mut rng = rng_from_seed(43);
    let n = 300;
    let mut cols: Vec<Vec<f64>> = vec![(0..n).map(|_| rng.sample(StandardNormal)).collect()];
    for j in 1..4 {
        let next = cols[j - 1]
            .iter()
            .map(|&x| (1.5 * x).sin() + 0.4 * x + 0.3 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        cols.push(next);
    }
    let data = Dataset::from_columns(cols).unwrap();
    let chain = Dag::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
    let gap = neg_log_lik_score(&data, &Dag::empty(4), 10).unwrap() - neg_log_lik_score(&data, &chain, 10).unwrap();
    assert!(gap >= 0.1 * 3.0, "gap {gap}");
}

#[test]
fn pns_on_two_nodes() {
    let data = nonlinear_pair(44, 200);
    let nb = pns(&data, &CamConfig::default()).unwrap();
    assert!(nb.sets[0].iter().all(|&k| k == 1));
    assert!(nb.sets[1].iter().all(|&k| k == 0));
}

#[test]
fn first_edge_orients_nonlinear_pair() {
    let good = (0..20)
        .filter(|&s| {
            let run = inc_edge_traced(&nonlinear_pair(split_seed(45, s), 300), None, &no_pns()).unwrap();
            (run.added[0].from, run.added[0].to) == (0, 1)
        })
        .count();
    assert!(good >= 19, "{good}/20");
}

#[test]
fn unrestricted_search_completes_the_graph() {
    let data = SimulationDesign::sparse_gp(6, 100).sample(46).unwrap().data;
    assert_eq!(inc_edge(&data, None, &no_pns()).unwrap().edge_count(), 15);
}

#[test]
fn greedy_and_exhaustive_orders_are_valid() {
    let design = SimulationDesign::sparse_gp(4, 500);
    let (mut greedy, mut exhaustive) = (0, 0);
    for s in 0..20 {
        let inst = design.sample(split_seed(47, s)).unwrap();
        let ord = inc_edge(&inst.data, None, &no_pns()).unwrap().topological_order().unwrap();
        greedy += causal_additive::graph::topological_orders_contains(inst.truth(), &ord).unwrap() as usize;
        let ord = brute_force_order(&inst.data, 10).unwrap();
        exhaustive += causal_additive::graph::topological_orders_contains(inst.truth(), &ord).unwrap() as usize;
    }
    assert!(greedy >= 18, "{greedy}/20");
    assert!(exhaustive >= 18, "{exhaustive}/20");
}

#[test]
fn pruning_a_full_order_dag() {
    let design = SimulationDesign::sparse_gp(10, 200);
    let mut good = 0;
    for s in 0..10 {
        let inst = design.sample(split_seed(48, s)).unwrap();
        let ord = inst.truth().topological_order().unwrap();
        let pruned = prune(&inst.data, &full_dag_of_order(&ord), &CamConfig::default()).unwrap();
        let truth = inst.truth().edge_count();
        good += (truth..=truth + 3).contains(&pruned.edge_count()) as usize;
    }
    assert!(good >= 8, "{good}/10");
    let empty = prune(&SimulationDesign::sparse_gp(3, 50).sample(1).unwrap().data, &Dag::empty(3), &CamConfig::default());
    assert_eq!(empty.unwrap().edge_count(), 0);
}

#[test]
fn pipeline_beats_empty_graph() {
    let design = SimulationDesign::sparse_gp(10, 200);
    let mut good = 0;
    for s in 0..10 {
        let inst = design.sample(split_seed(49, s)).unwrap();
        let est = cam_pipeline(&inst.data, &CamConfig::default()).unwrap();
        let empty = Dag::empty(10);
        let t = inst.truth();
        if shd(t, &est).unwrap() < shd(t, &empty).unwrap() && sid(t, &est).unwrap() <= sid(t, &empty).unwrap() {
            good += 1;
        }
        assert_eq!(est, cam_pipeline(&inst.data, &CamConfig::default()).unwrap());
    }
    assert!(good >= 8, "{good}/10");
}

#[test]
fn large_graph_with_neighborhoods_is_fast() {
    let inst = SimulationDesign::sparse_gp(100, 200).sample(50).unwrap();
    let start = std::time::Instant::now();
    let est = cam_pipeline(&inst.data, &CamConfig::default()).unwrap();
    assert!(start.elapsed() < std::time::Duration::from_secs(600));
    assert!(shd(inst.truth(), &est).unwrap() < inst.truth().edge_count());
}

#[test]
fn exhaustive_order_edge_cases() {
    let one = Dataset::from_columns(vec![vec![0.5, 1.0, -1.0]]).unwrap();
    assert_eq!(brute_force_order(&one, 10).unwrap(), Ordering::identity(1));
}
