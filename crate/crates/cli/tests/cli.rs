use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tacq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tacq")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn exact_on_two_disjoint_edges() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    fs::write(&g, "4 2\n0 1\n2 3\n").unwrap();
    let o = tacq(&["solve", "exact", "--graph", path_str(&g)]);
    assert!(o.status.success());
    let out = stdout(&o);
    let mut lines = out.lines();
    let head: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = head.iter().position(|&h| h == "value").unwrap();
    assert_eq!(row[col], "2");

    let o = tacq(&["--format", "json", "solve", "exact", "--graph", path_str(&g)]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["value"], 2);
}

#[test]
fn exact_protocol_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    let proto = dir.path().join("p.txt");
    fs::write(&g, "6 5\n0 1\n1 2\n2 3\n3 4\n4 5\n").unwrap();
    let o = tacq(&["solve", "exact", "--graph", path_str(&g), "--protocol-out", path_str(&proto)]);
    assert!(o.status.success());
    let o = tacq(&[
        "--format", "json", "solve", "verify", "--graph", path_str(&g), "--protocol", path_str(&proto),
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["residual_size"], 2);
    assert_eq!(v["maximal"], true);
}

#[test]
fn pipeline_is_deterministic() {
    let args = ["pipeline", "single", "--n", "16384", "--p-mult", "1.3", "--seed", "7"];
    let a = tacq(&args);
    let b = tacq(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    for key in ["outcome", "stage", "n", "p", "seed", "sigma", "levels", "bad_max", "B_size", "R_size", "matched", "residual_size"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn dense_pipeline_writes_a_replayable_witness() {
    let dir = tempfile::tempdir().unwrap();
    let proto = dir.path().join("w.txt");
    let graph = dir.path().join("g.txt");
    let common = ["--seed", "3"];
    let o = tacq(&[&common[..], &["gnp", "--n", "256", "--p", "0.95", "--out", path_str(&graph)]].concat());
    assert!(o.status.success());
    let o = tacq(&[
        &common[..],
        &["pipeline", "single", "--n", "256", "--p", "0.95", "--eps", "5", "--sigma", "1", "--protocol-out", path_str(&proto)],
    ]
    .concat());
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["outcome"], "witness");
    // the pipeline samples the same graph from the same seed
    let o = tacq(&["--format", "json", "solve", "verify", "--graph", path_str(&graph), "--protocol", path_str(&proto)]);
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["residual_size"], v["residual_size"]);
}

#[test]
fn sweep_header_and_determinism() {
    let args = [
        "sweep", "--n-list", "256", "--multipliers", "0.6,1.4", "--trials", "2", "--eps", "5", "--sigma", "1",
    ];
    let a = tacq(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let out = stdout(&a);
    assert_eq!(
        out.lines().next().unwrap(),
        "n,p,multiplier,trials,witness_rate,certified_ge2_rate,mean_residual_bound,mean_runtime_ms"
    );
    assert_eq!(out.lines().count(), 3);
    assert_eq!(a.stdout, tacq(&args).stdout);
}

#[test]
fn ctree_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.txt");
    let o = tacq(&["ctree", "build", "--n", "1000", "--eps", "0.5", "--sigma", "3", "--tree-out", path_str(&t)]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("j,c_star,c,rho,b,istar\n"));
    let o = tacq(&["--format", "json", "ctree", "check", "--tree", path_str(&t)]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    // remainder children may exceed 2^i' by up to sigma, so only
    // absorbability is guaranteed
    assert!(v["cutoff"].is_boolean());
    assert_eq!(v["absorbable"], true);
    let o = tacq(&["ctree", "protocol", "--tree", path_str(&t)]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count() as u64 + 1, v["nodes"].as_u64().unwrap());
}

#[test]
fn treestats_and_bound() {
    let o = tacq(&["treestats", "--n", "200", "--trials", "5"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("n,trials,mean_fraction"));

    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.txt");
    assert!(tacq(&["--seed", "5", "tree", "random", "--n", "30", "--out", path_str(&t)]).status.success());
    let o = tacq(&["--format", "json", "bound", "--graph", path_str(&t)]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["phi"].as_array().unwrap().len(), 30);
    assert_eq!(v["long_leaf_certified"], true);
}

#[test]
fn exit_codes() {
    assert_eq!(tacq(&["--no-such-flag"]).status.code(), Some(2));
    assert_eq!(tacq(&["gnp", "--n", "10", "--p", "1.5"]).status.code(), Some(2));
    assert_eq!(tacq(&["ctree", "build", "--n", "100", "--beta", "5"]).status.code(), Some(2));
    assert_eq!(tacq(&["solve", "exact", "--graph", "/nonexistent/g.txt"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("bad.txt");
    fs::write(&g, "3 1\n0 7\n").unwrap();
    assert_eq!(tacq(&["solve", "greedy", "--graph", path_str(&g)]).status.code(), Some(1));
    assert_eq!(tacq(&["--help"]).status.code(), Some(0));
}
