//! End-to-end runs of the `fermiloc` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use fermiloc::{Letter, PauliString};
use fermiloc_cli::{EncodingDoc, GeneratorType};
use serde_json::Value;

fn fermiloc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fermiloc")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    let v: Value = serde_json::from_slice(&o.stdout).expect("stdout is JSON");
    assert_eq!(v["schema_version"], 1);
    v
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("fermiloc-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn analyze_table_rows() {
    let o = fermiloc(&["analyze", "path:8", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["graph_class"], "tree");
    assert_eq!(v["local_encoding_possible"], true);
    assert_eq!(v["block_encoding_possible"], true);
    assert_eq!(v["vacuum_state_class"], "product");
    assert_eq!(v["depth_lower_bound"], Value::Null);

    let v = json(&fermiloc(&["analyze", "--graph", "gen:ring:8", "--format", "json"]));
    assert_eq!(v["graph_class"], "single-or-disjoint-cycles");
    assert_eq!(v["local_encoding_possible"], false);
    assert_eq!(v["vacuum_state_class"], "product");
    assert_eq!(v["max_eight_size"], Value::Null);

    let v = json(&fermiloc(&["analyze", "grid:10x10", "--format", "json"]));
    assert_eq!(v["graph_class"], "overlapping-cycles");
    assert_eq!(v["vacuum_state_class"], "entangled");
    assert_eq!(v["max_eight_size"], 2);
    assert_eq!(v["depth_lower_bound"], 2);

    let text = stdout(&fermiloc(&["analyze", "theta:2,2,2"]));
    assert!(text.contains("overlapping"), "{text}");
}

#[test]
fn encode_ring_table() {
    let o = fermiloc(&["encode", "ring:4", "--method", "ring"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("+1·ZYIIX"), "{text}");
    assert!(text.contains("+1·ZZZZZ"), "{text}");
}

#[test]
fn encode_json_round_trip() {
    let o = fermiloc(&["encode", "path:5", "--method", "jw", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let doc: EncodingDoc = serde_json::from_value(v.clone()).unwrap();
    assert_eq!((doc.n_vertices, doc.n_qubits), (5, 5));
    assert_eq!(doc.generators.len(), 4 + 5);
    assert!(doc.stabilizers.is_empty() && doc.local_encoding);
    let mut reserialized = serde_json::to_value(&doc).unwrap();
    reserialized["schema_version"] = 1.into();
    assert_eq!(reserialized, v);
    for row in &doc.generators {
        let p: PauliString = row.pauli.parse().unwrap();
        assert!(p.is_hermitian());
        match row.kind {
            GeneratorType::Vertex => {
                let k = row.vertex.unwrap() - 1;
                assert_eq!(p, PauliString::single(5, k, Letter::Z));
            }
            GeneratorType::Edge => {
                let [j, k] = row.edge.unwrap();
                assert_eq!(row.support, vec![j, k]);
            }
        }
    }
}

#[test]
fn encode_precondition_errors() {
    let o = fermiloc(&["encode", "grid:4x4", "--method", "tree"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("local exact encoding exists only on trees"), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    assert_eq!(code(&fermiloc(&["encode", "path:4", "--method", "ring"])), 2);
}

#[test]
fn verify_exit_codes() {
    let o = fermiloc(&["verify", "ring:6", "--method", "ring"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["overall"], true);

    let o = fermiloc(&["verify", "ring:6", "--method", "ring", "--mutate", "seed=1"]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    assert_eq!(v["overall"], false);
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["passed"] == false && c["witness"].is_string()));
    assert!(!stderr(&o).is_empty());

    let o = fermiloc(&["verify", "theta:2,2,2", "--method", "superfast", "--dense", "--format", "text"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("overall: pass"));
    assert_eq!(code(&fermiloc(&["verify", "grid:5x5", "--method", "superfast", "--dense"])), 2);
}

#[test]
fn equivalence_and_search() {
    let o = fermiloc(&["equivalence", "ring:4", "--method", "ring", "--samples", "200"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["passed"], true);
    assert_eq!(v["samples"], 200);

    let o = fermiloc(&["search-product", "theta:2,2,2", "--method", "superfast", "--restarts", "40", "--seed", "7"]);
    assert_eq!(code(&o), 0);
    let overlap = json(&o)["best_overlap"].as_f64().unwrap();
    assert!(overlap < 1.0 - 1e-3, "{overlap}");

    let o = fermiloc(&["search-product", "ring:4", "--method", "ring", "--restarts", "4", "--format", "text"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("best overlap: "));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let cases: [&[&str]; 4] = [
        &["analyze", "grid:6x6", "--format", "json"],
        &["encode", "theta:2,2,2", "--method", "superfast", "--format", "json"],
        &["verify", "ring:5", "--method", "ring", "--mutate", "seed=3"],
        &["search-product", "theta:2,2,2", "--method", "superfast", "--restarts", "16", "--seed", "2"],
    ];
    for args in cases {
        let a = fermiloc(args);
        let b = fermiloc(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.stderr, b.stderr, "{args:?}");
        assert_eq!(a.status, b.status);
    }
}

#[test]
fn graph_files() {
    let triangle = temp_file("triangle.txt", "# triangle\n3\n1 2\n2 3\n3 1\n");
    let path = triangle.to_str().unwrap();
    let o = fermiloc(&["verify", "--graph", path, "--method", "superfast"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = fermiloc(&["analyze", path, "--format", "json"]);
    assert_eq!(json(&o)["graph_class"], "single-or-disjoint-cycles");

    let broken = temp_file("broken.txt", "3\n1 2\n2 2\n");
    let o = fermiloc(&["analyze", broken.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(!stderr(&o).is_empty());
    let _ = std::fs::remove_file(triangle);
    let _ = std::fs::remove_file(broken);
}

#[test]
fn usage_errors() {
    for args in [
        &["frobnicate"][..],
        &["encode", "ring:4"],
        &["encode", "ring:4", "--method", "bogus"],
        &["verify", "ring:4", "--method", "ring", "--mutate", "seven"],
        &["analyze"],
        &["analyze", "no-such-file"],
        &["analyze", "grid:0x3"],
        &["analyze", "ring:4", "--graph", "ring:5"],
    ] {
        let o = fermiloc(args);
        assert_eq!(code(&o), 2, "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
    assert_eq!(code(&fermiloc(&["--help"])), 0);
}
