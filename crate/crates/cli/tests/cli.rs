use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pebblab::format::{parse_instance, write_graph};
use pebblab::{build, Pebbles};
use tempfile::TempDir;

const CYCLE_4000: &str = "v r 4\nv l\nv s\nv b\ne r l\ne r s\ne l b\ne s b\n";

fn pebblab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pebblab"))
        .args(args)
        .env_remove("PEBBLAB_BUDGET")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn file(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn build_reports_the_four_cycle() {
    let dir = TempDir::new().unwrap();
    let input = file(&dir, "c4.txt", CYCLE_4000);
    let o = pebblab(&["build", s(&input)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("7 states, 8 edges, fully traversable: true\n"));
    assert!(stdout(&o).contains("r -> l: 3"));
    assert!(stderr(&o).contains("elapsed"));

    let dot = dir.path().join("c4.dot");
    let o = pebblab(&["build", s(&input), "--format", "dot", "--output", s(&dot)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("7 states"));
    let text = fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("digraph"));
    assert_eq!(text.lines().filter(|l| l.contains(" -> ")).count(), 8);
}

#[test]
fn build_json_goes_to_stdout() {
    let dir = TempDir::new().unwrap();
    let input = file(&dir, "c4.txt", CYCLE_4000);
    let o = pebblab(&["build", s(&input), "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v.is_object());
    assert!(stderr(&o).contains("7 states"));
}

#[test]
fn build_trivial_and_malformed_inputs() {
    let dir = TempDir::new().unwrap();
    let one = file(&dir, "one.txt", "v a\n");
    let o = pebblab(&["build", s(&one)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("1 states, 0 edges"));

    let bad = file(&dir, "bad.txt", "v a\nv b\ne a\n");
    let o = pebblab(&["build", s(&bad)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    let o = pebblab(&["build", s(&dir.path().join("missing.txt"))]);
    assert_eq!(code(&o), 2);
}

#[test]
fn build_respects_the_budget_variable() {
    let dir = TempDir::new().unwrap();
    let input = file(&dir, "c4.txt", CYCLE_4000);
    let o = Command::new(env!("CARGO_BIN_EXE_pebblab"))
        .args(["build", s(&input)])
        .env("PEBBLAB_BUDGET", "3")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("budget"));
    assert_eq!(code(&pebblab(&["build", s(&input), "--budget", "7"])), 0);
}

#[test]
fn iso_tree_against_its_assignment_graph() {
    let dir = TempDir::new().unwrap();
    let tree = "v r 3\nv a 1\nv b 4\nv c\ne r a\ne r b\ne a c\n";
    let inst = parse_instance::<Pebbles>(tree).unwrap();
    let ag = build(&inst.graph, &inst.assignment).unwrap();
    let g = file(&dir, "t.txt", tree);
    let h = file(&dir, "h.txt", &write_graph(&ag.as_oriented_graph()));
    let o = pebblab(&["iso", s(&g), s(&h), "--format", "json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["mode"], "directed");
    assert_eq!(v["map"].as_object().unwrap().len(), 4);
}

#[test]
fn iso_modes_on_paths() {
    let dir = TempDir::new().unwrap();
    let p3 = file(&dir, "p3.txt", "v a\nv b\nv c\ne a b\ne b c\n");
    let p4 = file(&dir, "p4.txt", "v a\nv b\nv c\nv d\ne a b\ne b c\ne c d\n");
    let mixed = file(&dir, "m.txt", "v a\nv b\nv c\ne a b\ne c b\n");
    assert_eq!(code(&pebblab(&["iso", s(&p3), s(&p4)])), 1);
    assert_eq!(code(&pebblab(&["iso", s(&p3), s(&mixed)])), 1);
    assert_eq!(code(&pebblab(&["iso", s(&p3), s(&mixed), "--mode", "undirected"])), 0);
    assert_eq!(code(&pebblab(&["iso", s(&p3), s(&p4), "--mode", "subgraph"])), 0);
}

#[test]
fn verify_scans_from_the_command_line() {
    let o = pebblab(&["verify", "cor-2.1", "--cap", "6", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "holds");
    assert_eq!(v["witness"]["families"].as_array().unwrap().len(), 6);
    assert_eq!(v["classification"]["pairs"].as_array().unwrap().len(), 6);

    assert_eq!(code(&pebblab(&["verify", "thm-3.1", "--k", "6", "--cap", "5"])), 0);
    let o = pebblab(&["verify", "thm-5.1", "--random-trees", "100", "--max-vertices", "12", "--seed", "7"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("holds"));
}

#[test]
fn verify_instances_and_errors() {
    let dir = TempDir::new().unwrap();
    let p3 = file(&dir, "p3.txt", "v a 4\nv b 1\nv c\ne a b\ne b c\n");
    let o = pebblab(&["verify", "thm-2.1", "--input", s(&p3)]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("counterexample"));

    let tree = file(&dir, "t.txt", "v r 2\nv a\nv b\ne r a\ne r b\n");
    assert_eq!(code(&pebblab(&["verify", "thm-5.1", "--input", s(&tree)])), 0);

    let o = pebblab(&["verify", "thm-9.9"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("thm-2.1") && stderr(&o).contains("sec-6"));

    assert_eq!(code(&pebblab(&["verify", "cor-2.1", "--cap", "3"])), 2);
    assert_eq!(code(&pebblab(&["verify", "thm-3.1", "--format", "dot"])), 2);
}

#[test]
fn verify_bipartite_construction() {
    let o = pebblab(&["verify", "thm-7.2", "--n", "2", "--m", "1", "--pebbles", "2,2", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["witness"]["constructed_states"], 4);
    assert_eq!(code(&pebblab(&["verify", "thm-7.1", "--paths", "2,3", "--pebbles", "3,2"])), 0);
}

#[test]
fn search_matches_the_tree_family() {
    let o = pebblab(&[
        "search", "--max-vertices", "4", "--pebble-cap", "4", "--fully-traversable", "yes", "--format", "json",
    ]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    // seven rooted trees on two to four vertices, root count 2 or 3
    assert_eq!(v["pairs"].as_array().unwrap().len(), 14);

    let o = pebblab(&["search", "--max-vertices", "2", "--pebble-cap", "4", "--fully-traversable", "any"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("n=1 edges=[]"));
    assert!(out.contains("n=2 edges=[ab]"));

    assert_eq!(code(&pebblab(&["search", "--max-vertices", "6", "--pebble-cap", "9"])), 3);
    assert_eq!(code(&pebblab(&["search", "--fully-traversable", "maybe"])), 2);
}

#[test]
fn reports_are_reproducible_across_runs_and_shards() {
    let args = ["verify", "thm-5.1", "--random-trees", "30", "--seed", "11", "--format", "json"];
    let a = pebblab(&args);
    let b = pebblab(&args);
    let mut sharded = args.to_vec();
    sharded.extend(["--shards", "3"]);
    let c = pebblab(&sharded);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);

    let dir = TempDir::new().unwrap();
    let input = file(&dir, "c4.txt", CYCLE_4000);
    let x = pebblab(&["build", s(&input), "--format", "dot"]);
    let y = pebblab(&["build", s(&input), "--format", "dot", "--shards", "2"]);
    assert_eq!(x.stdout, y.stdout);
}
