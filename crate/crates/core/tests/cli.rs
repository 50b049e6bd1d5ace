use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use sbm_recovery::cli::{OutputRecord, SWEEP_CSV_HEADER};

fn sbm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sbm"))
        .args(args)
        .env_remove("SBM_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn bounds_saturated_without_refined() {
    let out = sbm(&["bounds", "--a", "60", "--b", "30"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    let b = &v["results"]["bounds"];
    assert_eq!(b["alpha_hp"]["saturated"], true);
    assert_eq!(b["alpha_hp"]["value"], 0.5);
    assert!(b["refined"]["value"].is_null());
    assert_eq!(b["iterated"]["provenance"], "conjecture");
    assert_eq!(b["necessary"]["provenance"], "theorem");
}

#[test]
fn bounds_at_correlated_boundary() {
    let v = json(&sbm(&["bounds", "--a", "12", "--b", "6"]));
    assert_eq!(
        v["results"]["bounds"]["correlated_possible"]["value"],
        false
    );
    let v = json(&sbm(&["bounds", "--a", "12.01", "--b", "6.005"]));
    assert_eq!(v["results"]["bounds"]["correlated_possible"]["value"], true);
}

#[test]
fn bounds_rejects_equal_parameters() {
    let out = sbm(&["bounds", "--a", "4", "--b", "4"]);
    assert!(!out.status.success());
    let v = json(&out);
    assert!(v["error"].as_str().unwrap().contains("a > b"));
    assert!(v["results"].is_null());

    let text = sbm(&["bounds", "--a", "4", "--b", "4", "--format", "text"]);
    assert!(!text.status.success());
    assert!(String::from_utf8_lossy(&text.stderr).contains("a > b"));
}

#[test]
fn bounds_text_format() {
    let out = sbm(&["bounds", "--a", "100", "--b", "50", "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[theorem]") && text.contains("[conjecture]"));
    assert!(text.contains("0.00172883"));
}

#[test]
fn simulate_exact_over_budget_suggests_local_search() {
    let out = sbm(&[
        "simulate",
        "--a",
        "6",
        "--b",
        "3",
        "--n",
        "30",
        "--decoder",
        "exact-bisection",
        "--trials",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = json(&out)["error"].as_str().unwrap().to_string();
    assert!(err.contains("local-bisection"), "{err}");
}

#[test]
fn simulate_truth_stub_is_zero() {
    let out = sbm(&[
        "simulate",
        "--a",
        "6",
        "--b",
        "3",
        "--n",
        "50",
        "--decoder",
        "truth-stub",
        "--trials",
        "5",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["results"]["empirical"]["mean_r"], 0.0);
    assert_eq!(v["seed"], 0);
    assert_eq!(
        v["results"]["comparison"]["note"],
        "asymptotic claim, finite-n check"
    );
}

#[test]
fn simulate_json_round_trips_byte_identical() {
    let out = sbm(&[
        "simulate",
        "--a",
        "20",
        "--b",
        "5",
        "--n",
        "60",
        "--decoder",
        "two-step",
        "--trials",
        "4",
        "--seed",
        "3",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let record = OutputRecord::from_json(text.trim_end()).unwrap();
    assert_eq!(record.to_json().unwrap(), text.trim_end());
}

#[test]
fn simulate_is_reproducible_and_dumps_trials() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("trials.csv");
    let args = [
        "simulate",
        "--a",
        "20",
        "--b",
        "5",
        "--n",
        "60",
        "--decoder",
        "local-bisection",
        "--trials",
        "6",
        "--seed",
        "11",
    ];
    let strip = |mut v: Value| {
        v["results"]["empirical"]["runtime_ms"] = Value::Null;
        v
    };
    let first = strip(json(&sbm(&[
        &args[..],
        &["--dump-trials", dump.to_str().unwrap()],
    ]
    .concat())));
    let second = strip(json(&sbm(&args)));
    assert_eq!(first, second);
    let dumped = std::fs::read_to_string(&dump).unwrap();
    assert_eq!(dumped.lines().next(), Some("trial,seed,r"));
    assert_eq!(dumped.lines().count(), 7);
}

#[test]
fn sweep_csv_shape_and_ordering() {
    let out = sbm(&["sweep", "--a-min", "10", "--a-max", "400", "--points", "40"]);
    assert!(out.status.success());
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows[0], SWEEP_CSV_HEADER);
    assert_eq!(rows.len(), 41);
    for row in &rows[1..] {
        let num = |i: usize| row[i].parse::<f64>().ok();
        let a = num(0).unwrap();
        assert!(num(1).unwrap() * 2.0 - a < 1e-9);
        assert!(num(2).unwrap() < 0.5, "necessary at a = {a}");
        // no decoder: empirical columns empty
        assert!(row[7..].iter().all(String::is_empty));
        match num(4) {
            Some(refined) => {
                let (i1, i2) = (num(5).unwrap(), num(6));
                assert!(i1 <= refined + 1e-9);
                if let Some(i2) = i2 {
                    assert!(i2 <= i1 + 1e-9);
                }
            }
            None => assert!(row[5].is_empty() && row[6].is_empty()),
        }
    }
}

#[test]
fn sweep_with_decoder_fills_empirical_columns() {
    let out = sbm(&[
        "sweep",
        "--a-min",
        "10",
        "--a-max",
        "20",
        "--points",
        "2",
        "--n",
        "40",
        "--decoder",
        "random-guess",
        "--trials",
        "5",
    ]);
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows.len(), 3);
    for row in &rows[1..] {
        let lo: f64 = row[8].parse().unwrap();
        let mean: f64 = row[7].parse().unwrap();
        let hi: f64 = row[9].parse().unwrap();
        assert!(lo <= mean && mean <= hi);
    }
}

#[test]
fn sweep_rejects_degenerate_ranges() {
    let out = sbm(&["sweep", "--a-min", "10", "--a-max", "10", "--points", "2"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("a_max > a_min"));
    assert!(
        !sbm(&["sweep", "--a-min", "10", "--a-max", "20", "--points", "1"])
            .status
            .success()
    );
    assert!(!sbm(&["sweep", "--a-min", "0", "--a-max", "20"])
        .status
        .success());
}

#[test]
fn sweep_json_output_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_sbm"))
        .args([
            "sweep",
            "--a-min",
            "72",
            "--a-max",
            "100",
            "--points",
            "3",
            "--format",
            "json",
            "--out",
            "rows.json",
        ])
        .env("SBM_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("rows.json")).unwrap();
    let record = OutputRecord::from_json(text.trim_end()).unwrap();
    assert_eq!(record.command, "sweep");
    assert_eq!(record.results["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn unwritable_output_is_reported() {
    let out = sbm(&[
        "sweep",
        "--a-min",
        "10",
        "--a-max",
        "20",
        "--points",
        "2",
        "--out",
        "/nonexistent/dir/rows.csv",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/dir/rows.csv"));
}

#[test]
fn generate_writes_edge_list_and_labels() {
    let dir = tempfile::tempdir().unwrap();
    let (edges, labels) = (dir.path().join("g.txt"), dir.path().join("y.txt"));
    let out = sbm(&[
        "generate",
        "--a",
        "6",
        "--b",
        "3",
        "--n",
        "100",
        "--seed",
        "4",
        "--edges",
        edges.to_str().unwrap(),
        "--labels",
        labels.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v = json(&out);
    let graph = sbm_recovery::SparseGraph::read_edge_list(std::io::BufReader::new(
        std::fs::File::open(&edges).unwrap(),
    ))
    .unwrap();
    assert_eq!(graph.n(), 100);
    assert_eq!(v["results"]["edge_count"], graph.edge_count());
    let line = std::fs::read_to_string(Path::new(&labels)).unwrap();
    let truth = sbm_recovery::CommunityLabels::parse_line(line.trim()).unwrap();
    assert_eq!(truth.len(), 100);
    let (n1, n2) = truth.counts();
    assert_eq!(v["results"]["imbalance"]["n1"], n1);
    assert_eq!(v["results"]["imbalance"]["n2"], n2);
}

#[test]
fn generate_rejects_invalid_model() {
    let dir = tempfile::tempdir().unwrap();
    let out = sbm(&[
        "generate",
        "--a",
        "300",
        "--b",
        "150",
        "--n",
        "200",
        "--edges",
        dir.path().join("g").to_str().unwrap(),
        "--labels",
        dir.path().join("y").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(json(&out)["error"].as_str().unwrap().contains("a <= n"));
}
