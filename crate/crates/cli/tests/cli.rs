use std::path::PathBuf;
use std::process::{Command, Output};

use egs_core::equivalence::game_isomorphic;
use egs_core::fixtures;
use egs_core::io::parse_egs;
use tempfile::TempDir;

fn egs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_egs")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

struct Dir(TempDir);

impl Dir {
    fn new() -> Self {
        Dir(TempDir::new().unwrap())
    }

    fn put(&self, name: &str, text: &str) -> String {
        let p = self.0.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_owned()
    }

    fn fixture(&self, name: &str) -> String {
        self.put(&format!("{name}.egs"), fixtures::game_text(name).unwrap())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }
}

#[test]
fn validate_accepts_fixtures() {
    let d = Dir::new();
    for name in fixtures::GAME_NAMES {
        let o = egs(&["validate", &d.fixture(name)]);
        assert_eq!(code(&o), 0, "{name}");
        assert_eq!(stdout(&o), "valid\n");
    }
}

#[test]
fn parse_errors_exit_3() {
    let d = Dir::new();
    let empty = d.put("empty.egs", "");
    let o = egs(&["info", &empty]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("players line missing"));
    assert_eq!(code(&egs(&["info", "/no/such/file.egs"])), 3);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&egs(&[])), 2);
    assert_eq!(code(&egs(&["frobnicate"])), 2);
    assert_eq!(code(&egs(&["random", "--players", "9"])), 2);
    let d = Dir::new();
    assert_eq!(code(&egs(&["simultanize", "--site", "3", &d.fixture("fig7_left")])), 2);
}

#[test]
fn opportunities_on_interfering_sites() {
    let d = Dir::new();
    let o = egs(&["opportunities", &d.fixture("fig7_left")]);
    let out = stdout(&o);
    assert!(out.contains("coalescing: 1\n"));
    assert!(out.contains("simultanizing: 1\n"));

    let after = d.put("after.egs", &stdout(&egs(&["coalesce", &d.fixture("fig7_left")])));
    assert!(stdout(&egs(&["opportunities", &after])).contains("simultanizing: 0\n"));
}

#[test]
fn coalesce_gives_right_fixture() {
    let d = Dir::new();
    let o = egs(&["coalesce", &d.fixture("fig7_left")]);
    assert_eq!(code(&o), 0);
    assert!(game_isomorphic(&parse_egs(&stdout(&o)).unwrap(), &fixtures::load("fig7_right")));
}

#[test]
fn simultanize_gives_right_fixture() {
    let d = Dir::new();
    let g = fixtures::load("fig5_left");
    let r = g.node_by_label("r").unwrap();
    let k = egs_core::transform::find_simultanizing_sites(&g)
        .iter()
        .position(|s| s.node == r)
        .unwrap()
        .to_string();
    let o = egs(&["simultanize", "--site", &k, &d.fixture("fig5_left")]);
    assert!(game_isomorphic(&parse_egs(&stdout(&o)).unwrap(), &fixtures::load("fig5_right")));
}

#[test]
fn minimize_writes_trace() {
    let d = Dir::new();
    let trace = d.path("trace.jsonl");
    let o = egs(&["minimize", "--trace", trace.to_str().unwrap(), &d.fixture("fig1_left")]);
    assert_eq!(code(&o), 0);
    assert!(game_isomorphic(&parse_egs(&stdout(&o)).unwrap(), &fixtures::load("fig1_right")));
    let text = std::fs::read_to_string(trace).unwrap();
    let t = egs_core::transform::TransformTrace::from_json_lines(&text).unwrap();
    assert!(!t.is_empty());
    assert!(game_isomorphic(&t.replay(&fixtures::load("fig1_left")).unwrap(), &fixtures::load("fig1_right")));
}

#[test]
fn equiv_exit_codes_and_witness() {
    let d = Dir::new();
    let (l, r) = (d.fixture("fig2_left"), d.fixture("fig2_right"));
    let w = d.path("w.json");
    let o = egs(&["equiv", &l, &r, "--method", "direct", "--witness", w.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "equivalent\n");
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(w).unwrap()).unwrap();
    assert_eq!(v["equivalent"], true);
    assert!(v["isomorphism"].is_object());

    let o = egs(&["equiv", &l, &d.fixture("fig7_right")]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o), "not equivalent\n");
}

#[test]
fn reconstruct_table() {
    let d = Dir::new();
    let z = d.put("fig8.znf", fixtures::FIG8_ZNF);
    let o = egs(&["reconstruct", &z]);
    assert_eq!(code(&o), 0);
    assert!(game_isomorphic(&parse_egs(&stdout(&o)).unwrap(), &fixtures::load("fig7_right")));

    let bad = d.put("bad.znf", "players 1 2\nstrategies 1: a b\nstrategies 2: x y\nterminals z1\noutcome a x -> z1\n");
    assert_eq!(code(&egs(&["reconstruct", &bad])), 3);
}

#[test]
fn normal_form_matches_table_fixture() {
    let d = Dir::new();
    let o = egs(&["normal-form", "--reduced", "--format", "znf", &d.fixture("fig7_right")]);
    assert_eq!(stdout(&o), fixtures::FIG8_ZNF);
    let full = stdout(&egs(&["normal-form", &d.fixture("fig7_right")]));
    assert!(full.lines().count() > 1);
}

#[test]
fn strategies_listing() {
    let d = Dir::new();
    let f = d.fixture("fig7_right");
    let full = stdout(&egs(&["strategies", &f]));
    let reduced = stdout(&egs(&["strategies", "--reduced", &f]));
    let count = |s: &str, p: &str| s.lines().find(|l| l.starts_with(p)).unwrap().split_whitespace().count() - 1;
    assert_eq!(count(&reduced, "1:"), 3);
    assert!(count(&full, "1:") >= 3);
}

#[test]
fn export_dot_to_file() {
    let d = Dir::new();
    let out = d.path("g.dot");
    let o = egs(&["export-dot", "-o", out.to_str().unwrap(), &d.fixture("fig2_left")]);
    assert_eq!(code(&o), 0);
    let dot = std::fs::read_to_string(out).unwrap();
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("style=dashed").count(), 1);
}

#[test]
fn random_is_deterministic_and_valid() {
    let args = ["random", "--seed", "11", "--players", "3", "--depth", "3", "--actions", "3"];
    let (a, b) = (stdout(&egs(&args)), stdout(&egs(&args)));
    assert_eq!(a, b);
    assert!(parse_egs(&a).is_ok());
}
