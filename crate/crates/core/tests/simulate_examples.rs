use causal_additive::seed::{rng_from_seed, split_seed};
use causal_additive::simulate::{sample_sigmoid, simulate_data, FunctionKind, FunctionSpec, SemSpec, SimulationDesign};
use causal_additive::Dag;
use statrs::distribution::{ContinuousCDF, Normal};

/// Asymptotic Kolmogorov distribution tail with the small-sample correction
/// of Stephens.
fn ks_p_value(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    let lambda = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    let q: f64 = (1..=100)
        .map(|k| {
            let k = k as f64;
            2.0 * (-1f64).powf(k - 1.0) * (-2.0 * k * k * lambda * lambda).exp()
        })
        .sum();
    q.clamp(0.0, 1.0)
}

#[test]
fn source_nodes_are_gaussian_with_stated_scale() {
    let mut rng = rng_from_seed(51);
    let spec = SemSpec::sample(Dag::empty(4), FunctionKind::GaussianProcess, 1.0, 1.0, &mut rng).unwrap();
    let data = simulate_data(&spec, 2000, &mut rng).unwrap();
    let std_normal = Normal::new(0.0, 1.0).unwrap();
    for j in 0..4 {
        let sd = spec.noise_sd[j];
        assert!((1.0..=std::f64::consts::SQRT_2).contains(&sd));
        let z: Vec<f64> = data.column(j).iter().map(|v| v / sd).collect();
        let p = ks_p_value(&z, |x| std_normal.cdf(x));
        assert!(p > 0.001, "node {j}: KS p-value {p}");
    }
}

#[test]
fn gaussian_noise_has_normal_kurtosis() {
    let mut rng = rng_from_seed(52);
    let spec = SemSpec::sample(Dag::empty(1), FunctionKind::GaussianProcess, 1.0, 1.0, &mut rng).unwrap();
    let x = simulate_data(&spec, 5000, &mut rng).unwrap().column(0).to_vec();
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let m2 = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
    let m4 = x.iter().map(|v| (v - m).powi(4)).sum::<f64>() / n;
    let kurt = m4 / (m2 * m2);
    assert!((2.5..=3.5).contains(&kurt), "kurtosis {kurt}");
}

#[test]
fn additive_model_when_fully_additive() {
    let mut rng = rng_from_seed(53);
    let dag = Dag::from_edges(3, [(0, 2), (1, 2)]).unwrap();
    let spec = SemSpec::sample(dag, FunctionKind::Sigmoid, 1.0, 1.0, &mut rng).unwrap();
    assert!(spec.joint_functions.is_none());
    let data = simulate_data(&spec, 5000, &mut rng).unwrap();
    let f = |k: usize| {
        spec.edge_functions
            .iter()
            .find(|e| e.from == k && e.to == 2)
            .unwrap()
            .function
            .clone()
    };
    let (f0, f1) = (f(0), f(1));
    let resid: Vec<f64> = (0..5000)
        .map(|i| data.value(i, 2) - f0.eval(data.value(i, 0)).unwrap() - f1.eval(data.value(i, 1)).unwrap())
        .collect();
    let m = resid.iter().sum::<f64>() / 5000.0;
    let sd = (resid.iter().map(|v| (v - m).powi(2)).sum::<f64>() / 5000.0).sqrt();
    assert!((sd / spec.noise_sd[2] - 1.0).abs() < 0.05, "residual sd {sd} vs {}", spec.noise_sd[2]);
    assert!(m.abs() < 0.02);
}

#[test]
fn sigmoid_draws_are_monotone_with_stated_ranges() {
    let mut rng = rng_from_seed(54);
    for _ in 0..100 {
        let FunctionSpec::Sigmoid { a, b, c } = sample_sigmoid(&mut rng) else {
            panic!("not a sigmoid")
        };
        assert!(a >= 1.0);
        assert!((0.5..=2.0).contains(&b.abs()));
        assert!((-2.0..=2.0).contains(&c));
        let f = FunctionSpec::Sigmoid { a, b, c };
        let values: Vec<f64> = (0..400).map(|i| f.eval(-5.0 + 0.025 * i as f64).unwrap()).collect();
        let increasing = values.windows(2).all(|w| w[1] > w[0]);
        let decreasing = values.windows(2).all(|w| w[1] < w[0]);
        assert!(increasing || decreasing);
    }
}

#[test]
fn designs_are_reproducible_and_serializable() {
    let design = SimulationDesign {
        omega: 0.5,
        gamma: 2.0,
        ..SimulationDesign::sparse_gp(6, 80)
    };
    let a = design.sample(split_seed(55, 0)).unwrap();
    let b = design.sample(split_seed(55, 0)).unwrap();
    assert_eq!(a.data, b.data);
    assert_eq!(a.spec, b.spec);
    let json = serde_json::to_string(&a.spec).unwrap();
    let back: SemSpec = serde_json::from_str(&json).unwrap();
    assert_eq!(back, a.spec);
    assert!(json.contains("\"kind\":\"gaussian_process\""));
    assert!(json.contains("\"bandwidth\":1.0"));
}
