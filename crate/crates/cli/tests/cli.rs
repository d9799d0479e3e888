use std::path::{Path, PathBuf};

use randmatch_cli::{run_cli, ExperimentRecord, EXIT_CAPACITY, EXIT_OK, EXIT_USAGE};
use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn run(args: &[&str]) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("randmatch").chain(args.iter().copied());
    let code = run_cli(argv, &mut out, &mut err);
    Run { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

fn record(args: &[&str]) -> ExperimentRecord {
    let r = run(args);
    assert_eq!(r.code, EXIT_OK, "{args:?}: {}", r.err);
    serde_json::from_str(&r.out).unwrap()
}

fn gen(dir: &Path, name: &str, family: &str, n: &str) -> PathBuf {
    let path = dir.join(name);
    let r = run(&["gen", "--family", family, "--n", n, "-o", path.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    path
}

fn close(v: &Value, want: f64) -> bool {
    (v.as_f64().unwrap() - want).abs() < 1e-12
}

#[test]
fn gen_then_analyze_p4() {
    let dir = TempDir::new().unwrap();
    let p4 = gen(dir.path(), "p4.g", "path", "4");
    assert_eq!(std::fs::read_to_string(&p4).unwrap(), "4 3\n0 1\n1 2\n2 3\n");
    let rec = record(&["analyze", "--graph", p4.to_str().unwrap(), "--log2-lambda", "3"]);
    assert_eq!(rec.result["S"], serde_json::json!([1, 3, 1]));
    assert_eq!(rec.result["k"], 2);
    assert!(close(&rec.result["pr_k_gibbs"], 64.0 / 89.0));
    assert_eq!(rec.graph.as_ref().unwrap().m, 3);
    assert_eq!(rec.subcommand, "analyze");
}

#[test]
fn randmatching_finds_maximum_on_p4() {
    let dir = TempDir::new().unwrap();
    let p4 = gen(dir.path(), "p4.g", "path", "4");
    let rec = record(&["randmatching", "--graph", p4.to_str().unwrap(), "--seed", "1"]);
    assert_eq!(rec.result["found_size"], 2);
    let restarts = rec.result["restarts"].as_array().unwrap();
    assert_eq!(restarts.len(), 14);
    for r in restarts {
        let sum = ["adds", "removes", "rejects"].iter().map(|k| r[*k].as_u64().unwrap()).sum::<u64>();
        assert_eq!(sum, 42);
    }
    assert_eq!(rec.params["log2_lambda"], 3.0);
}

#[test]
fn mix_on_k2() {
    let rec = record(&["mix", "--family", "path", "--n", "2", "--log2-lambda", "0"]);
    assert_eq!(rec.result["t_mix"], 1);
    let upper = (8.0 * std::f64::consts::E).ln();
    assert!(close(&rec.result["claimed_upper"], upper));
    assert!((upper - 3.08).abs() < 0.005);
    assert_eq!(rec.result["tv_curve"], serde_json::json!([0.5, 0.0]));
}

#[test]
fn coupling_variants_on_p3() {
    let a = record(&["coupling", "--family", "path", "--n", "3", "--log2-lambda", "0", "--variant", "a"]);
    assert!(close(&a.result["max_marginal_tv"], 0.25));
    assert_eq!(a.result["contraction_violations"], 0);
    assert_eq!(a.result["pairs"], 9);
    let b = record(&["coupling", "--family", "path", "--n", "3", "--log2-lambda", "0", "--variant", "b"]);
    assert!(b.result["max_marginal_tv"].as_f64().unwrap() <= 1e-12);
    assert_eq!(b.result["variant"], "synchronous");
}

#[test]
fn conductance_on_p3() {
    let rec = record(&["conductance", "--family", "path", "--n", "3", "--log2-lambda", "0"]);
    assert!(close(&rec.result["phi_cut"], 3.0 / 8.0));
    assert!(close(&rec.result["phi_cut_closed_form"], 3.0 / 8.0));
    assert!(rec.result["phi_min"].as_f64().unwrap() <= 3.0 / 8.0 + 1e-12);
}

#[test]
fn solve_reports_maximum() {
    let rec = record(&["solve", "--family", "complete", "--n", "5"]);
    assert_eq!(rec.result["k"], 2);
    assert_eq!(rec.result["method"], "branch_and_bound");
    let rec = record(&["solve", "--family", "bipartite-regular", "--n", "6", "--d", "3", "--seed", "4"]);
    assert_eq!(rec.result["k"], 6);
    assert_eq!(rec.result["method"], "augmenting_paths");
}

#[test]
fn results_do_not_depend_on_threads() {
    let args = ["randmatching", "--family", "gnp", "--n", "40", "--p", "0.1", "--seed", "9"];
    let one = record(&[&args[..], &["--threads", "1"]].concat());
    let four = record(&[&args[..], &["--threads", "4"]].concat());
    assert_eq!(one.result, four.result);
    assert_eq!(one.graph, four.graph);
    let again = record(&[&args[..], &["--threads", "1"]].concat());
    assert_eq!(one.outcome(), again.outcome());
}

#[test]
fn bench_csv_has_a_row_per_rep() {
    let r =
        run(&["bench", "--family", "cycle", "--n", "50", "--seed", "2", "--steps", "10000", "--reps", "3", "--csv"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let lines: Vec<&str> = r.out.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("command,graph_sha256,"));
    assert!(lines[1].starts_with("bench,"));
}

#[test]
fn report_goes_to_output_path() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("report.json");
    let r = run(&["sample", "--family", "path", "--n", "4", "--seed", "3", "-o", out.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.out.is_empty());
    let rec: ExperimentRecord = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(rec.result["steps"], 42);
}

#[test]
fn gen_without_output_prints_edge_list() {
    let r = run(&["gen", "--family", "star", "--n", "3"]);
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(r.out, "3 2\n0 1\n0 2\n");
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &[][..],
        &["analyze"],
        &["frobnicate"],
        &["sample", "--family", "path", "--n", "4"],
        &["gen", "--family", "gnp", "--n", "10", "--p", "0.5"],
        &["analyze", "--family", "path", "--n", "4", "--eps", "2"],
        &["mix", "--graph", "/nonexistent/graph.g"],
        &["coupling", "--family", "path", "--n", "3", "--variant", "c"],
        &["randmatching", "--family", "path", "--n", "4", "--seed", "1", "--threads", "0"],
    ] {
        let r = run(args);
        assert_eq!(r.code, EXIT_USAGE, "{args:?}");
        assert!(!r.err.is_empty(), "{args:?}");
    }
}

#[test]
fn malformed_graph_file_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.g");
    std::fs::write(&path, "3 2\n0 1\n1 1\n").unwrap();
    let r = run(&["solve", "--graph", path.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.err.contains("line 3"), "{}", r.err);
}

#[test]
fn caps_exit_two() {
    for args in [
        &["analyze", "--family", "path", "--n", "4", "--state-cap", "3"][..],
        &["conductance", "--family", "complete", "--n", "5"],
        &["mix", "--family", "path", "--n", "4", "--log2-lambda", "3", "--t-max", "5"],
        &["coupling", "--family", "complete", "--n", "5", "--pair-cap", "100"],
    ] {
        let r = run(args);
        assert_eq!(r.code, EXIT_CAPACITY, "{args:?}: {}", r.err);
    }
}

#[test]
fn help_and_version_exit_zero() {
    let r = run(&["--help"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.out.contains("randmatching"));
    assert_eq!(run(&["--version"]).code, EXIT_OK);
}
