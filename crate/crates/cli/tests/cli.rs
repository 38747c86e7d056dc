use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn graphlet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graphlet")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const TWO_CLIQUES: &str = "# {0,1,2} at 1, {2,3} at 3\n0\t1\t1\n0\t2\t1\n1\t2\t1\n2\t3\t3\n";

#[test]
fn triangle_decomposes_to_one_clique() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "tri.tsv", "0\t1\t2\n1\t2\t2\n0\t2\t2\n");
    let output = dir.path().join("tri.json");
    let out = graphlet(&["decompose", "--input", s(&input), "--output", s(&output)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let model = json(&output);
    assert_eq!(model["cliques"], serde_json::json!([[0, 1, 2]]));
    assert_eq!(model["mu"], serde_json::json!([2.0]));
    assert_eq!(model["meta"]["converged"], Value::Bool(true));
    let summary = stdout(&out);
    for key in ["nodes=3", "edges=3", "candidates=1", "k_hat=1", "candidate_seconds=", "em_seconds="] {
        assert!(summary.contains(key), "{summary}");
    }
}

#[test]
fn two_clique_rates_are_recovered() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "two.tsv", TWO_CLIQUES);
    for extra in [&[][..], &["--exact", "--peel"][..]] {
        let output = dir.path().join("two.json");
        let mut args = vec!["decompose", "--input", s(&input), "--output", s(&output)];
        args.extend_from_slice(extra);
        let out = graphlet(&args);
        assert!(out.status.success(), "{}", stderr(&out));
        let model = json(&output);
        assert_eq!(model["cliques"], serde_json::json!([[0, 1, 2], [2, 3]]));
        let mu: Vec<f64> = serde_json::from_value(model["mu"].clone()).unwrap();
        assert!((mu[0] - 1.0).abs() < 1e-6 && (mu[1] - 3.0).abs() < 1e-6, "{mu:?}");
    }
}

#[test]
fn malformed_edge_lists_exit_with_data_error() {
    let dir = TempDir::new().unwrap();
    let output = dir.path().join("out.json");
    let cases = [
        ("0\t1\t1\n\n2\t2\t1\n", "line 3"),
        ("0\t1\t1.5\n", "line 1"),
        ("# c\n0\t1\n", "line 2"),
        ("0\t1\t-4\n", "line 1"),
    ];
    for (text, needle) in cases {
        let input = write(&dir, "bad.tsv", text);
        let out = graphlet(&["decompose", "--input", s(&input), "--output", s(&output)]);
        assert_eq!(out.status.code(), Some(2), "{text:?}");
        assert!(stderr(&out).contains(needle), "{}", stderr(&out));
    }
    assert!(!output.exists());
}

#[test]
fn decimal_rates_need_the_exact_flag() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "r.tsv", "a\tb\t0.5\nb\tc\t0.5\na\tc\t0.5\n");
    let output = dir.path().join("r.json");
    let out = graphlet(&["decompose", "--input", s(&input), "--output", s(&output)]);
    assert_eq!(out.status.code(), Some(2));
    let out = graphlet(&["decompose", "--exact", "--input", s(&input), "--output", s(&output)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let model = json(&output);
    assert_eq!(model["nodes"], serde_json::json!(["a", "b", "c"]));
    assert_eq!(model["mu"], serde_json::json!([0.5]));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(graphlet(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(graphlet(&["decompose", "--input", "x"]).status.code(), Some(1));
    assert_eq!(graphlet(&["bounds", "--k", "4", "--p", "0.5", "--q", "1", "--n", "10"]).status.code(), Some(1));
    assert_eq!(graphlet(&["--help"]).status.code(), Some(0));
}

#[test]
fn target_accuracy_truncates_and_reports() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "two.tsv", TWO_CLIQUES);
    let output = dir.path().join("t.json");
    let out = graphlet(&["decompose", "--input", s(&input), "--output", s(&output), "--target-accuracy", "0.6"]);
    assert!(out.status.success());
    // tau masses: 1*3 = 3 and 3*2 = 6, so the pair alone reaches 2/3.
    assert!(stdout(&out).contains("k_tilde=1\tachieved_accuracy=0.666667\tk_tilde_over_k_hat=0.500000"), "{}", stdout(&out));
    assert_eq!(json(&output)["cliques"], serde_json::json!([[2, 3]]));
}

#[test]
fn non_convergence_writes_flagged_output() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "two.tsv", "0\t1\t5\n0\t2\t1\n1\t2\t2\n2\t3\t3\n1\t3\t1\n");
    let output = dir.path().join("nc.json");
    let out = graphlet(&["decompose", "--input", s(&input), "--output", s(&output), "--max-iters", "1"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert_eq!(json(&output)["meta"]["converged"], Value::Bool(false));
}

#[test]
fn power_pathway_decomposes_the_squared_network() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "path.tsv", "0\t1\t1\n1\t2\t1\n");
    let output = dir.path().join("sq.json");
    let out = graphlet(&["decompose", "--input", s(&input), "--output", s(&output), "--power", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    // The square of the path 0-1-2 keeps only the two-step pair (0,2).
    let model = json(&output);
    assert_eq!(model["cliques"], serde_json::json!([[0, 2]]));
    assert_eq!(model["mu"], serde_json::json!([1.0]));
    assert_eq!(model["meta"]["config"]["power"], serde_json::json!(2));
    let out = graphlet(&["decompose", "--input", s(&input), "--output", s(&output), "--power", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn synth_is_deterministic_per_seed() {
    let dir = TempDir::new().unwrap();
    let run = |tag: &str, seed: &str| {
        let model = dir.path().join(format!("m{tag}.json"));
        let network = dir.path().join(format!("n{tag}.tsv"));
        let out = graphlet(&[
            "synth", "--nodes", "50", "--lambda-k", "30", "--alpha", "1", "--beta", "10", "--p", "0.04", "--seed", seed,
            "--out-model", s(&model), "--out-network", s(&network),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        (std::fs::read(model).unwrap(), std::fs::read(network).unwrap())
    };
    let a = run("a", "7");
    let b = run("b", "7");
    let c = run("c", "8");
    assert_eq!(a, b);
    assert_ne!(a, c);
    let model: Value = serde_json::from_slice(&a.0).unwrap();
    assert_eq!(model["nodes"].as_array().unwrap().len(), 50);
    assert_eq!(model["meta"]["seed"], serde_json::json!(7));
}

#[test]
fn synth_rejects_impossible_and_invalid_parameters() {
    let dir = TempDir::new().unwrap();
    let model = dir.path().join("m.json");
    let out = graphlet(&[
        "synth", "--nodes", "10", "--lambda-k", "200", "--p", "0.99", "--nonexpandable", "--max-rejects", "20",
        "--out-model", s(&model),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("rejection cap"));
    let out = graphlet(&["synth", "--p", "1.5", "--out-model", s(&model)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn eval_rows_for_identical_dropped_and_mismatched_models() {
    let dir = TempDir::new().unwrap();
    let network = write(&dir, "two.tsv", TWO_CLIQUES);
    let truth = write(&dir, "truth.json", r#"{"nodes":["0","1","2","3"],"cliques":[[0,1,2],[2,3]],"mu":[1.0,3.0],"meta":{}}"#);
    let out = graphlet(&["eval", "--truth", s(&truth), "--estimate", s(&truth), "--network", s(&network), "--header"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "l1_error\ttau_error\tsupport_error\tbasis_error_raw\tbasis_error_normalized\tmu_error\tk_error");
    assert_eq!(lines[1], "0.000000\t0.000000\t0.000000\t0\t0.000000\t0.000000\t0");

    let dropped = write(&dir, "dropped.json", r#"{"nodes":["0","1","2","3"],"cliques":[[2,3]],"mu":[3.0]}"#);
    let out = graphlet(&["eval", "--truth", s(&truth), "--estimate", s(&dropped), "--network", s(&network)]);
    let row: Vec<String> = stdout(&out).trim().split('\t').map(String::from).collect();
    // The dropped triangle holds tau mass 3 of 9.
    assert_eq!(row[1], "0.333333");
    assert_eq!(row[6], "1");

    let other = write(&dir, "other.json", r#"{"nodes":["a","b","c","d"],"cliques":[[0,1,2],[2,3]],"mu":[1.0,3.0]}"#);
    let out = graphlet(&["eval", "--truth", s(&truth), "--estimate", s(&other), "--network", s(&network)]);
    assert_eq!(out.status.code(), Some(2));
    let stray = write(&dir, "stray.tsv", "0\t9\t1\n");
    let out = graphlet(&["eval", "--truth", s(&truth), "--estimate", s(&truth), "--network", s(&stray)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn estimate_with_relabelled_node_order_matches_truth() {
    let dir = TempDir::new().unwrap();
    let network = write(&dir, "two.tsv", TWO_CLIQUES);
    let truth = write(&dir, "truth.json", r#"{"nodes":["0","1","2","3"],"cliques":[[0,1,2],[2,3]],"mu":[1.0,3.0]}"#);
    let estimate = write(&dir, "est.json", r#"{"nodes":["3","2","1","0"],"cliques":[[0,1],[1,2,3]],"mu":[3.0,1.0]}"#);
    let out = graphlet(&["eval", "--truth", s(&truth), "--estimate", s(&estimate), "--network", s(&network)]);
    assert_eq!(stdout(&out).trim(), "0.000000\t0.000000\t0.000000\t0\t0.000000\t0.000000\t0");
}

#[test]
fn accuracy_curve_closed_form_and_monte_carlo() {
    let out = graphlet(&["accuracy-curve", "--k", "30", "--alpha", "1", "--method", "closed_form"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#') && !l.starts_with("k_tilde")).collect();
    assert_eq!(rows.len(), 31);
    assert_eq!(rows[30], "30\t1.000000");
    assert_eq!(rows[0], "0\t0.000000");

    let out = graphlet(&["accuracy-curve", "--k", "5", "--alpha", "2", "--method", "monte_carlo", "--samples", "20000", "--seed", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.lines().any(|l| l == "k_tilde\ttau0\tstd_error"));
    assert!(text.lines().all(|l| l.starts_with('#') || l.split('\t').count() == 3));
    let again = graphlet(&["accuracy-curve", "--k", "5", "--alpha", "2", "--method", "monte_carlo", "--samples", "20000", "--seed", "3", "--threads", "1"]);
    assert_eq!(stdout(&again), text);

    let out = graphlet(&["accuracy-curve", "--k", "30", "--alpha", "0.1", "--method", "closed_form"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("monte_carlo"));
}

#[test]
fn bounds_surface_the_theory_values() {
    assert_eq!(stdout(&graphlet(&["bounds", "--k", "4", "--p", "0.5", "--q", "1"])), "candidate_count_bound\t20\n");
    assert_eq!(stdout(&graphlet(&["bounds", "--k", "4", "--p", "0", "--q", "3"])), "candidate_count_bound\t15\n");
    let out = stdout(&graphlet(&["bounds", "--k", "4", "--p", "0.5", "--q", "2", "--n", "16", "--c", "1"]));
    // 2 * (1 + 16 / 4)
    assert_eq!(out, "candidate_count_bound\t40\nredundancy_bound\t10\n");
    assert_eq!(graphlet(&["bounds", "--k", "4", "--p", "1.5", "--q", "1"]).status.code(), Some(2));
}

#[test]
fn synth_exact_round_trip_recovers_the_truth() {
    let dir = TempDir::new().unwrap();
    for seed in 0..20 {
        let seed = seed.to_string();
        let truth = dir.path().join("truth.json");
        let lambda = dir.path().join("lambda.tsv");
        let estimate = dir.path().join("est.json");
        let out = graphlet(&[
            "synth", "--nodes", "20", "--lambda-k", "4", "--p", "0.2", "--seed", &seed, "--nonexpandable", "--round-mu",
            "--exact", "--out-model", s(&truth), "--out-network", s(&lambda),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        for peel in [false, true] {
            let mut args = vec!["decompose", "--exact", "--prune", "1e-4", "--max-iters", "100000", "--input", s(&lambda), "--output", s(&estimate)];
            if peel {
                args.push("--peel");
            }
            let out = graphlet(&args);
            assert!(out.status.success(), "seed {seed}: {}", stderr(&out));
            let out = graphlet(&["eval", "--exact", "--truth", s(&truth), "--estimate", s(&estimate), "--network", s(&lambda)]);
            assert_eq!(
                stdout(&out).trim(),
                "0.000000\t0.000000\t0.000000\t0\t0.000000\t0.000000\t0",
                "seed {seed} peel {peel}"
            );
        }
    }
}
