use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ci-lattice"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(path: &Path, content: &str) -> String {
    std::fs::write(path, content).unwrap();
    path.to_str().unwrap().to_string()
}

fn path_graph_file(dir: &Path, d: usize) -> String {
    let mut text = format!("d={d}\n");
    for i in 1..d {
        text.push_str(&format!("{} {}\n", i, i + 1));
    }
    write(&dir.join(format!("path{d}.txt")), &text)
}

fn ex11_precision_file(dir: &Path) -> String {
    write(
        &dir.join("ex11.csv"),
        "3,1,1,0,0,0,0\n1,3,0,1,0,0,0\n1,0,3,1,0,0,0\n0,1,1,3,0,0,0\n0,0,0,0,4,3,-3\n0,0,0,0,3,5,-3\n0,0,0,0,-3,-3,3\n",
    )
}

fn studeny_table_file(dir: &Path) -> String {
    write(
        &dir.join("studeny.json"),
        r#"{
  "ground": ["a", "b", "c", "d"],
  "relations": [
    {"A": ["a"], "B": ["b"], "C": ["c", "d"]},
    {"A": ["c"], "B": ["d"], "C": ["a"]},
    {"A": ["c"], "B": ["d"], "C": ["b"]},
    {"A": ["a"], "B": ["b"], "C": []}
  ]
}"#,
    )
}

#[test]
fn mb_on_path_graph() {
    let dir = tempfile::tempdir().unwrap();
    let path5 = path_graph_file(dir.path(), 5);
    let v = stdout_json(&run(&["mb", "--oracle", "graph", "--input", &path5, "--j", "3"]));
    assert_eq!(v["m"], serde_json::json!(["2", "4"]));
    assert_eq!(v["S"], serde_json::json!(["1", "2", "4", "5"]));
    assert_eq!(v["manifest"]["command"], "mb");
}

#[test]
fn mb_on_precision_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let ex11 = ex11_precision_file(dir.path());
    let v = stdout_json(&run(&["mb", "--oracle", "precision", "--input", &ex11, "--j", "5", "--s", "6"]));
    assert_eq!(v["m"], serde_json::json!([]));
}

#[test]
fn unknown_label_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path5 = path_graph_file(dir.path(), 5);
    let out = run(&["mb", "--oracle", "graph", "--input", &path5, "--j", "99"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown label"));
}

#[test]
fn parse_error_exits_2_and_missing_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(&dir.path().join("bad.txt"), "no header\n1 2\n");
    let out = run(&["mb", "--oracle", "graph", "--input", &bad, "--j", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["mb", "--oracle", "graph", "--input", "/nonexistent", "--j", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numeric_error_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    // indefinite matrix: not a covariance
    let bad = write(&dir.path().join("indef.csv"), "1,2\n2,1\n");
    let out = run(&["mb", "--oracle", "gaussian", "--input", &bad, "--j", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn lattice_and_sparse_commands() {
    let dir = tempfile::tempdir().unwrap();
    let path3 = path_graph_file(dir.path(), 3);
    let v = stdout_json(&run(&["lattice", "--oracle", "graph", "--input", &path3, "--j", "1", "--s", "2,3"]));
    assert_eq!(v["m"], serde_json::json!(["2"]));
    assert_eq!(v["M"], serde_json::json!(["2", "3"]));
    assert_eq!(v["covered"], 2);

    let v = stdout_json(&run(&["decompose", "--oracle", "graph", "--input", &path3, "--j", "1"]));
    assert_eq!(v["k"], 3);
    assert_eq!(v["complete"], true);

    // complete graph on 4 nodes: sparse t=0 discovers one point lattice
    let mut k4 = String::from("d=4\n");
    for u in 1..=4 {
        for w in u + 1..=4 {
            k4.push_str(&format!("{u} {w}\n"));
        }
    }
    let k4 = write(&dir.path().join("k4.txt"), &k4);
    let v = stdout_json(&run(&["sparse", "--oracle", "graph", "--input", &k4, "--j", "1", "--t", "0"]));
    assert_eq!(v["k"], 1);
    assert_eq!(v["complete"], false);
    assert_eq!(v["coveredTotal"], 1);
    assert_eq!(v["t"], 0);
}

#[test]
fn ci_command_examples() {
    let dir = tempfile::tempdir().unwrap();
    let path5 = path_graph_file(dir.path(), 5);
    let ex11 = ex11_precision_file(dir.path());

    let v = stdout_json(&run(&["ci", "--oracle", "graph", "--input", &path5, "--a", "1", "--b", "4,5", "--c", "3"]));
    assert_eq!(v["independent"], true);

    let v = stdout_json(&run(&["ci", "--oracle", "precision", "--input", &ex11, "--a", "5", "--b", "6", "--c", ""]));
    assert_eq!(v["independent"], true);

    let v = stdout_json(&run(&["ci", "--oracle", "precision", "--input", &ex11, "--a", "5", "--b", "6", "--c", "7"]));
    assert_eq!(v["independent"], false);

    // overlapping sets exit 2
    let out = run(&["ci", "--oracle", "graph", "--input", &path5, "--a", "1", "--b", "1", "--c", ""]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn enumerate_streams_and_truncates() {
    let dir = tempfile::tempdir().unwrap();
    let path3 = path_graph_file(dir.path(), 3);

    let out = run(&["enumerate", "--oracle", "graph", "--input", &path3, "--j", "1"]);
    assert!(out.status.success());
    let lines: Vec<Value> = String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 2); // one statement + trailer
    assert_eq!(lines[0], serde_json::json!({"i": "3", "C": ["2"]}));
    assert_eq!(lines[1]["count"], 1);
    assert_eq!(lines[1]["possible"], 4);

    // the middle node has no statements
    let out = run(&["enumerate", "--oracle", "graph", "--input", &path3, "--j", "2"]);
    let lines: Vec<Value> = String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 1);
    assert_eq!(lines[0]["count"], 0);

    // --max truncates the stream, not the count
    let dir5 = tempfile::tempdir().unwrap();
    let path5 = path_graph_file(dir5.path(), 5);
    let out = run(&["enumerate", "--oracle", "graph", "--input", &path5, "--j", "1", "--max", "2"]);
    let lines: Vec<Value> = String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 3);
    let full = stdout_json(&run(&["decompose", "--oracle", "graph", "--input", &path5, "--j", "1"]));
    assert!(lines[2]["count"].as_u64().unwrap() > 2);
    assert!(full["complete"].as_bool().unwrap());
}

#[test]
fn check_axioms_on_studeny_table() {
    let dir = tempfile::tempdir().unwrap();
    let table = studeny_table_file(dir.path());
    let v = stdout_json(&run(&["check-axioms", "--oracle", "table", "--input", &table]));
    assert_eq!(v["allHold"], true);
    assert_eq!(v["mode"], "exhaustive");
    let results = v["results"].as_array().unwrap();
    assert_eq!(results.len(), 8);
    for r in results.iter().take(7) {
        assert_eq!(r["status"], "holds", "{r}");
    }
    assert_eq!(results[7]["status"], "skipped");
}

#[test]
fn verify_equivalence_on_random_graph() {
    let v = stdout_json(&run(&["verify-equivalence", "--random-d", "5", "--seed", "8"]));
    assert_eq!(v["pass"], true);
    assert_eq!(v["d"], 5);
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 5 * 16);
    assert!(entries.iter().all(|e| e["mbOk"] == true && e["latticeOk"] == true));
}

#[test]
fn experiment_runs_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    // small AR(1)-style covariance over 4 variables
    let mut csv = String::new();
    for i in 0..4i32 {
        let row: Vec<String> = (0..4i32).map(|j| format!("{}", 0.7f64.powi((i - j).abs()))).collect();
        csv.push_str(&(row.join(",") + "\n"));
    }
    let cov = write(&dir.path().join("cov.csv"), &csv);
    let args = ["experiment", "--oracle", "gaussian", "--input", &cov, "--j", "2", "--t", "1", "--n", "400", "--trials", "3", "--seed", "5"];
    let a = stdout_json(&run(&args));
    let b = stdout_json(&run(&args));
    assert_eq!(a["report"], b["report"]);
    assert_eq!(a["report"]["perTrial"].as_array().unwrap().len(), 3);
    assert!(a["report"]["tau"].as_f64().unwrap() > 0.0);
}

#[test]
fn gen_gaussian_emits_parseable_covariance() {
    let dir = tempfile::tempdir().unwrap();
    let path3 = path_graph_file(dir.path(), 3);
    let out = run(&["gen-gaussian", "--input", &path3, "--seed", "4"]);
    assert!(out.status.success());
    let csv = String::from_utf8_lossy(&out.stdout).to_string();
    let cov = write(&dir.path().join("gen.csv"), &csv);
    // the emitted covariance loads back as a gaussian oracle that
    // reproduces the path separations
    let v = stdout_json(&run(&["ci", "--oracle", "gaussian", "--input", &cov, "--a", "1", "--b", "3", "--c", "2"]));
    assert_eq!(v["independent"], true);
    let v = stdout_json(&run(&["ci", "--oracle", "gaussian", "--input", &cov, "--a", "1", "--b", "3", "--c", ""]));
    assert_eq!(v["independent"], false);
}

#[test]
fn env_var_overrides_default_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let ex11 = ex11_precision_file(dir.path());
    // with the default tolerance the boundary of 5 in {6,7} is {6,7}
    let v = stdout_json(&run(&["mb", "--oracle", "precision", "--input", &ex11, "--j", "5", "--s", "6,7"]));
    assert_eq!(v["m"], serde_json::json!(["6", "7"]));
    // an absurdly large tolerance declares everything independent
    let out = bin()
        .args(["mb", "--oracle", "precision", "--input", &ex11, "--j", "5", "--s", "6,7"])
        .env("CI_LATTICE_TOL", "0.99")
        .output()
        .unwrap();
    let v = stdout_json(&out);
    assert_eq!(v["m"], serde_json::json!([]));
    // the --tol flag wins over the environment
    let out = bin()
        .args(["mb", "--oracle", "precision", "--input", &ex11, "--j", "5", "--s", "6,7", "--tol", "1e-9"])
        .env("CI_LATTICE_TOL", "0.99")
        .output()
        .unwrap();
    let v = stdout_json(&out);
    assert_eq!(v["m"], serde_json::json!(["6", "7"]));
}

#[test]
fn verify_equivalence_on_random_graph_d8() {
    let v = stdout_json(&run(&["verify-equivalence", "--random-d", "8", "--seed", "3"]));
    assert_eq!(v["pass"], true);
    assert_eq!(v["entries"].as_array().unwrap().len(), 8 * 128);
    assert!(v["decompositions"].as_array().unwrap().iter().all(|e| e["ok"] == true));
}

#[test]
fn experiment_from_graph_uses_a_faithful_gaussian() {
    let dir = tempfile::tempdir().unwrap();
    let path4 = path_graph_file(dir.path(), 4);
    let v = stdout_json(&run(&["experiment", "--oracle", "graph", "--input", &path4, "--j", "2", "--t", "1", "--n", "200", "--trials", "2", "--seed", "3"]));
    assert_eq!(v["report"]["perTrial"].as_array().unwrap().len(), 2);
    assert!(v["report"]["alpha"].as_f64().unwrap() > 0.0);
}

#[test]
fn outputs_are_deterministic_apart_from_wall_time() {
    let dir = tempfile::tempdir().unwrap();
    let path5 = path_graph_file(dir.path(), 5);
    let args = ["decompose", "--oracle", "graph", "--input", &path5, "--j", "2"];
    let mut a = stdout_json(&run(&args));
    let mut b = stdout_json(&run(&args));
    a["manifest"]["wallTimeMs"] = 0.into();
    b["manifest"]["wallTimeMs"] = 0.into();
    assert_eq!(a, b);
}

#[test]
fn decompose_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path5 = path_graph_file(dir.path(), 5);
    let v = stdout_json(&run(&["decompose", "--oracle", "graph", "--input", &path5, "--j", "1"]));

    // parse the emitted lattices back into a Decomposition and compare
    // against a direct computation
    use ci_lattice::lattice::{full_decomposition, Decomposition};
    use ci_lattice::oracles::UndirectedGraph;
    use ci_lattice::{IntervalLattice, VarSet};

    let graph = UndirectedGraph::path(5).unwrap();
    let ground = graph.ground().clone();
    let to_set = |arr: &Value| -> VarSet {
        arr.as_array()
            .unwrap()
            .iter()
            .map(|l| ground.node_by_label(l.as_str().unwrap()).unwrap())
            .collect()
    };
    let lattices: Vec<IntervalLattice> = v["lattices"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| IntervalLattice::new(to_set(&l["m"]), to_set(&l["M"])).unwrap())
        .collect();
    let j = ground.node_by_label(v["j"].as_str().unwrap()).unwrap();
    let parsed = Decomposition::from_lattices(j, 5, lattices, None).unwrap();

    let direct = full_decomposition(&graph.separation_oracle(), 0).unwrap();
    assert_eq!(parsed, direct);
    assert_eq!(parsed.complete(), v["complete"].as_bool().unwrap());
    assert_eq!(parsed.covered_total() as u64, v["coveredTotal"].as_u64().unwrap());
}
