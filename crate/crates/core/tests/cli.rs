use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn cam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cam")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_chain_csv(path: &Path) {
    let mut text = String::from("x,y\n");
    for i in 0..200 {
        let x = -3.0 + 6.0 * (i as f64 * 0.618_033_988_7).fract();
        let noise = 0.2 * ((i * 7919 % 200) as f64 / 100.0 - 1.0);
        text.push_str(&format!("{x},{}\n", x * x + x + noise));
    }
    fs::write(path, text).unwrap();
}

#[test]
fn fit_recovers_a_two_node_chain() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("chain.csv");
    write_chain_csv(&input);
    let out = dir.path().join("est");
    let res = cam(&["fit", "--input", s(&input), "--output", s(&out)]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    assert_eq!(fs::read_to_string(dir.path().join("est.edges")).unwrap(), "0 1\n");
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("est.json")).unwrap()).unwrap();
    assert_eq!(json["labels"], serde_json::json!(["x", "y"]));
    let manifest = fs::read_to_string(dir.path().join("est.manifest.json")).unwrap();
    assert!(manifest.contains("score_trajectory"));
}

#[test]
fn empty_input_is_an_input_error_naming_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("nothing.csv");
    fs::write(&input, "").unwrap();
    let res = cam(&["fit", "--input", s(&input), "--output", s(&dir.path().join("o"))]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("nothing.csv"));

    let res = cam(&["fit", "--output", "x"]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn outputs_are_byte_identical_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    assert!(cam(&["simulate", "--seed", "5", "--p", "6", "--n", "150", "--output", s(&sim)]).status.success());
    let input = dir.path().join("sim.csv");
    let mut outputs = Vec::new();
    for threads in ["1", "8", "8"] {
        let out = dir.path().join(format!("fit{}", outputs.len()));
        let res = cam(&["--threads", threads, "fit", "--input", s(&input), "--output", s(&out), "--seed", "3"]);
        assert!(res.status.success());
        outputs.push(
            ["edges", "json"]
                .map(|ext| fs::read(dir.path().join(format!("fit{}.{ext}", outputs.len()))).unwrap()),
        );
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);
}

#[test]
fn eval_prints_distances() {
    let dir = tempfile::tempdir().unwrap();
    let chain = dir.path().join("chain.edges");
    let empty = dir.path().join("empty.json");
    fs::write(&chain, "0 1\n1 2\n").unwrap();
    fs::write(&empty, r#"{"p": 3, "edges": []}"#).unwrap();

    let res = cam(&["eval", s(&chain), s(&chain)]);
    assert_eq!(String::from_utf8_lossy(&res.stdout).trim(), "shd=0 sid=0");
    let res = cam(&["eval", s(&chain), s(&empty)]);
    assert_eq!(String::from_utf8_lossy(&res.stdout).trim(), "shd=2 sid=3");

    let wide = dir.path().join("wide.edges");
    fs::write(&wide, "# p=5\n0 1\n").unwrap();
    let res = cam(&["eval", s(&chain), s(&wide)]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn bench_and_sweep_write_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bench.json");
    fs::write(&cfg, r#"{"p": 4, "n": 60, "replicates": 2}"#).unwrap();
    let out = dir.path().join("results.csv");
    let res = cam(&["bench", "--config", s(&cfg), "--seed", "1", "--output", s(&out)]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("replicate,method,shd,sid,wall_seconds,seed\n"));

    let sweep = dir.path().join("sweep.json");
    fs::write(
        &sweep,
        r#"{"base": {"p": 3, "n": 50, "replicates": 1}, "gammas": [1.0, 2.0], "omegas": [0.0]}"#,
    )
    .unwrap();
    let out = dir.path().join("sweep.csv");
    let res = cam(&["bench", "--config", s(&sweep), "--seed", "1", "--output", s(&out)]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("gamma,omega,replicate,method"));
    assert!(dir.path().join("sweep.summary.csv").exists());
}
