//! End-to-end runs of the `edgelayout` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edgelayout"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn p(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn synth(dir: &TempDir, config: &str, name: &str, trace: bool) -> (PathBuf, PathBuf) {
    let cfg = p(dir, &format!("{name}.config.json"));
    fs::write(&cfg, config).unwrap();
    let inst = p(dir, &format!("{name}.json"));
    let tr = p(dir, &format!("{name}.trace.json"));
    let mut args = vec!["synth", "--config", s(&cfg), "--out", s(&inst)];
    if trace {
        args.extend(["--trace-out", s(&tr)]);
    }
    ok(&args);
    (inst, tr)
}

fn manifest(out: &Path) -> serde_json::Value {
    let mut name = out.file_name().unwrap().to_os_string();
    name.push(".manifest.json");
    serde_json::from_str(&fs::read_to_string(out.with_file_name(name)).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(Result::unwrap).collect()
}

fn csv_header(path: &Path) -> Vec<String> {
    csv::Reader::from_path(path).unwrap().headers().unwrap().iter().map(String::from).collect()
}

const SMALL: &str = r#"{"seed": 1, "instance": {"n_vertices": 4, "n_servers": 2}}"#;
const MEDIUM: &str = r#"{"seed": 5, "instance": {"n_vertices": 120, "n_servers": 5},
    "churn": {"link_change_pct": 0.05, "vertex_change_pct": 0.02, "n_slots": 12}}"#;

#[test]
fn minimal_synth_validates_and_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let (a, _) = synth(&dir, SMALL, "a", false);
    let (b, _) = synth(&dir, SMALL, "b", false);
    ok(&["validate", "--instance", s(&a)]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let m = manifest(&a);
    assert_eq!(m["seed"], 1);
    assert_eq!(m["config_hash"].as_str().unwrap().len(), 64);
    let text = fs::read_to_string(&a).unwrap();
    assert!(text.contains("\"provenance\""));
}

#[test]
fn seed_flag_overrides_config() {
    let dir = TempDir::new().unwrap();
    let cfg = p(&dir, "c.json");
    fs::write(&cfg, SMALL).unwrap();
    let (x, y) = (p(&dir, "x.json"), p(&dir, "y.json"));
    ok(&["synth", "--config", s(&cfg), "--out", s(&x), "--seed", "99"]);
    ok(&["synth", "--config", s(&cfg), "--out", s(&y)]);
    assert_ne!(fs::read(&x).unwrap(), fs::read(&y).unwrap());
    assert_eq!(manifest(&x)["seed"], 99);
}

#[test]
fn invalid_config_reports_field_path() {
    let dir = TempDir::new().unwrap();
    let cfg = p(&dir, "bad.json");
    fs::write(
        &cfg,
        r#"{"instance": {"n_vertices": 4, "n_servers": 2}, "churn": {"link_change_pct": 1.5, "n_slots": 3}}"#,
    )
    .unwrap();
    let out = run(&["synth", "--config", s(&cfg), "--out", s(&p(&dir, "o.json"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("churn.link_change_pct"));

    fs::write(&cfg, r#"{"instance": {"n_vertices": 4, "n_servers": 2, "bogus": 1}}"#).unwrap();
    let out = run(&["synth", "--config", s(&cfg), "--out", s(&p(&dir, "o.json"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("instance"));
}

fn total_of(report: &Path) -> f64 {
    let rows = csv_rows(report);
    let header = csv_header(report);
    let col = header.iter().position(|h| h == "total").unwrap();
    rows[0][col].parse().unwrap()
}

#[test]
fn glad_s_matches_oracle_on_two_servers() {
    let dir = TempDir::new().unwrap();
    let (inst, _) = synth(
        &dir,
        r#"{"seed": 4, "instance": {"n_vertices": 10, "n_servers": 2, "link_model": {"kind": "erdos_renyi", "p": 0.4}}}"#,
        "two",
        false,
    );
    let (gl, gr) = (p(&dir, "g.json"), p(&dir, "g.csv"));
    let (ol, or) = (p(&dir, "o.json"), p(&dir, "o.csv"));
    ok(&["optimize", "--instance", s(&inst), "--algo", "glad-s", "--R", "1", "--out", s(&gl), "--report", s(&gr)]);
    ok(&["optimize", "--instance", s(&inst), "--algo", "oracle", "--out", s(&ol), "--report", s(&or)]);
    let (a, b) = (total_of(&gr), total_of(&or));
    assert!((a - b).abs() <= 1e-9 * b.abs(), "{a} vs {b}");
    ok(&["validate", "--instance", s(&inst), "--layout", s(&gl)]);
}

#[test]
fn rounds_default_and_exhaustive() {
    let dir = TempDir::new().unwrap();
    let (inst, _) = synth(&dir, MEDIUM, "m", false);
    let out = p(&dir, "l.json");
    let log = p(&dir, "it.csv");
    ok(&["optimize", "--instance", s(&inst), "--out", s(&out), "--log", s(&log)]);
    assert_eq!(manifest(&out)["args"]["resolved_R"], 3);
    assert_eq!(csv_header(&log), ["iteration", "pair_i", "pair_j", "candidate_cost", "accepted", "best_cost", "r"]);
    let last = csv_rows(&log).pop().unwrap();
    assert_eq!(&last[6], "3");
    ok(&["optimize", "--instance", s(&inst), "--R", "exhaustive", "--out", s(&out)]);
    assert_eq!(manifest(&out)["args"]["resolved_R"], 10);
    let bad = run(&["optimize", "--instance", s(&inst), "--R", "0", "--out", s(&out)]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn greedy_random_and_dimacs_dump() {
    let dir = TempDir::new().unwrap();
    let (inst, _) = synth(&dir, MEDIUM, "m", false);
    let out = p(&dir, "l.json");
    ok(&["optimize", "--instance", s(&inst), "--algo", "greedy", "--out", s(&out)]);
    ok(&["optimize", "--instance", s(&inst), "--algo", "random", "--seed", "3", "--out", s(&out)]);
    let dimacs = p(&dir, "aux.dimacs");
    ok(&["optimize", "--instance", s(&inst), "--out", s(&out), "--dimacs", s(&dimacs)]);
    let text = fs::read_to_string(&dimacs).unwrap();
    assert!(text.lines().any(|l| l.starts_with("p max ")));
    assert!(text.contains("\nn 1 s\n") && text.contains("\nn 2 t\n"));
}

#[test]
fn oracle_guard_exits_4() {
    let dir = TempDir::new().unwrap();
    let (inst, _) = synth(&dir, MEDIUM, "m", false);
    let out = run(&["optimize", "--instance", s(&inst), "--algo", "oracle", "--out", s(&p(&dir, "o.json"))]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn unreachable_cross_link_exits_3() {
    let dir = TempDir::new().unwrap();
    let server = |id: usize| {
        format!(
            r#"{{"id": {id}, "coords": [0, 0], "machine_class": "A", "alpha": 0, "beta": 0, "gamma": 0, "rho": 1, "epsilon": 0}}"#
        )
    };
    let inst = format!(
        r#"{{"servers": [{}, {}], "connectivity": [[false, false], [false, false]],
            "traffic": [[0, null], [null, 0]], "vertices": [{{"name": "a"}}, {{"name": "b"}}],
            "links": [[0, 1]], "layer_dims": [2, 2], "upload_cost": [[1, 2], [2, 1]]}}"#,
        server(0),
        server(1)
    );
    let ip = p(&dir, "i.json");
    fs::write(&ip, inst).unwrap();
    let lp = p(&dir, "l.json");
    fs::write(&lp, r#"{"0": 0, "1": 1}"#).unwrap();
    let out = run(&["validate", "--instance", s(&ip), "--layout", s(&lp)]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    fs::write(&lp, r#"{"0": 0}"#).unwrap();
    let out = run(&["validate", "--instance", s(&ip), "--layout", s(&lp)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn evolve_policies_share_schema() {
    let dir = TempDir::new().unwrap();
    let (inst, trace) = synth(&dir, MEDIUM, "m", true);
    ok(&["validate", "--instance", s(&inst), "--trace", s(&trace)]);
    let mut slots = Vec::new();
    for policy in ["no-adjustment", "greedy", "incremental", "adaptive", "global"] {
        let out = p(&dir, &format!("{policy}.csv"));
        ok(&["evolve", "--instance", s(&inst), "--trace", s(&trace), "--policy", policy, "--theta", "20", "--out", s(&out)]);
        assert_eq!(
            csv_header(&out),
            ["slot", "policy", "decision", "c_u", "c_p", "c_t", "c_m", "total", "est_drift", "migrations", "wall_ms"]
        );
        let rows = csv_rows(&out);
        assert_eq!(rows.len(), 13);
        slots.push(rows.iter().map(|r| r[0].to_string()).collect::<Vec<_>>());
    }
    assert!(slots.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn evolve_empty_trace_gives_one_row() {
    let dir = TempDir::new().unwrap();
    let (inst, _) = synth(&dir, SMALL, "s", false);
    let trace = p(&dir, "t.json");
    fs::write(&trace, "[]").unwrap();
    let out = p(&dir, "tl.csv");
    ok(&["evolve", "--instance", s(&inst), "--trace", s(&trace), "--policy", "no-adjustment", "--out", s(&out)]);
    assert_eq!(csv_rows(&out).len(), 1);
    let missing = run(&["evolve", "--instance", s(&inst), "--trace", s(&trace), "--policy", "adaptive", "--out", s(&out)]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn adaptive_zero_theta_goes_global_on_first_positive_drift() {
    let dir = TempDir::new().unwrap();
    let (inst, trace) = synth(&dir, MEDIUM, "m", true);
    let out = p(&dir, "a.csv");
    ok(&["evolve", "--instance", s(&inst), "--trace", s(&trace), "--policy", "adaptive", "--theta", "0", "--out", s(&out)]);
    let rows = csv_rows(&out);
    let first = rows[1..].iter().find(|r| r[8].parse::<f64>().unwrap() > 0.0).expect("some drift");
    assert_eq!(&first[2], "global");
}

#[test]
fn trace_inconsistency_exits_2() {
    let dir = TempDir::new().unwrap();
    let (inst, _) = synth(&dir, SMALL, "s", false);
    let trace = p(&dir, "t.json");
    fs::write(&trace, r#"[{"slot": 1, "events": [{"kind": "link_delete", "u": 0, "v": 0}]}]"#).unwrap();
    let out = run(&["evolve", "--instance", s(&inst), "--trace", s(&trace), "--policy", "incremental", "--out", s(&p(&dir, "x.csv"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweeps() {
    let dir = TempDir::new().unwrap();
    let (inst, trace) = synth(&dir, MEDIUM, "m", true);
    let out = p(&dir, "r.csv");
    ok(&["sweep", "--instance", s(&inst), "--param", "R", "--values", "exhaustive,1,3", "--out", s(&out)]);
    let rows = csv_rows(&out);
    let costs: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert_eq!(rows.iter().map(|r| r[1].to_string()).collect::<Vec<_>>(), ["1", "3", "10"]);
    assert!(costs.windows(2).all(|w| w[1] <= w[0]), "{costs:?}");

    let out = p(&dir, "t.csv");
    ok(&["sweep", "--instance", s(&inst), "--param", "theta", "--values", "inf,0,50", "--trace", s(&trace), "--out", s(&out)]);
    let rows = csv_rows(&out);
    assert_eq!(&rows[2][0], "inf");
    assert!(rows[2][1].parse::<usize>().unwrap() <= 1);

    let empty = run(&["sweep", "--instance", s(&inst), "--param", "R", "--values", "", "--out", s(&out)]);
    assert_eq!(empty.status.code(), Some(2));
    let no_trace = run(&["sweep", "--instance", s(&inst), "--param", "theta", "--values", "1", "--out", s(&out)]);
    assert_eq!(no_trace.status.code(), Some(2));
}
