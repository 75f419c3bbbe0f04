//! End-to-end runs of the `stringtop` binary: outputs, exit codes and the
//! JSON schema.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stringtop")).args(args).env_remove("STRINGTOP_MAX_DEGREE").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = run(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
    stdout(&o).trim_end().to_string()
}

fn validator() -> jsonschema::Validator {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schema/output.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn json_of(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("not JSON ({e}): {}", stdout(o)))
}

#[test]
fn goldman_bracket_example() {
    assert_eq!(ok(&["bracket", "--surface", "torus", "a^2 b", "b"]), "2·a^2 b^2");
    assert_eq!(ok(&["bracket", "a", "b"]), "a b");
    assert_eq!(ok(&["bracket", "--ring", "Q", "1/2·a^{-3}", "b"]), "-3/2·a^-3 b");
    assert_eq!(ok(&["bracket", "a^2 b", "a^2 b"]), "0");
}

#[test]
fn sphere_homology_example() {
    assert_eq!(ok(&["homology", "--space", "S3", "--degree", "5"]), "Z/2 ⟨(α⊗y^2)x⟩");
    assert_eq!(ok(&["homology", "--space", "S^3", "--degree", "7"]), "Z/2 ⟨(α⊗y^2)x_2⟩ ⊕ Z/3 ⟨(α⊗y^3)x⟩");
}

#[test]
fn gysin_verification_example() {
    let o = run(&["verify", "--gysin", "S3", "--max-degree", "20"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().filter(|l| l.contains(" exact")).count() > 20);
    assert!(text.trim_end().ends_with("all exact"), "{text}");
    assert!(!text.contains("NOT EXACT"));
}

#[test]
fn sequence_files_distinguish_success_from_failure() {
    assert_eq!(run(&["verify", "--sequence", &data("exact_sequence.json")]).status.code(), Some(0));
    let o = run(&["verify", "--sequence", &data("broken_sequence.json")]);
    assert_eq!(o.status.code(), Some(2));
    let doc = json_of(&o);
    assert_eq!(doc["status"], "failed");
    let failing: Vec<&Value> =
        doc["result"]["nodes"].as_array().unwrap().iter().filter(|n| n["status"] == "not_exact").collect();
    assert_eq!(failing.len(), 1);
    assert_eq!(failing[0]["group"], "Z'");
    assert!(validator().is_valid(&doc));
}

#[test]
fn bad_input_exits_one_with_position() {
    let o = run(&["bracket", "a^2 b^", "b"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.contains("column 7"), "{err}");
    assert_eq!(run(&["homology", "--space", "S3", "--degree", "x"]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["witness", "1"]).status.code(), Some(1));
    assert_eq!(run(&["derived", "a +"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn max_degree_cap_from_environment() {
    let bin = env!("CARGO_BIN_EXE_stringtop");
    let o = Command::new(bin).args(["verify", "--gysin", "S3", "--max-degree", "20"]).env("STRINGTOP_MAX_DEGREE", "10").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("STRINGTOP_MAX_DEGREE"));
    let o = Command::new(bin).args(["verify", "--gysin", "S3", "--max-degree", "8"]).env("STRINGTOP_MAX_DEGREE", "10").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn goldman_subcommands() {
    assert_eq!(ok(&["witness", "a b"]), "a b = [a, b]");
    assert_eq!(ok(&["witness", "a^3 b"]), "a^3 b = [a, [a, [a, b]]]");
    assert_eq!(ok(&["witness", "--ring", "Z", "--coefficient", "4", "a^5"]), "4·a^5 is not a single bracket over Z");
    assert_eq!(ok(&["witness", "--ring", "Z", "--coefficient", "5", "a^5"]), "5·a^5 is a single bracket over Z");
    assert_eq!(ok(&["derived", "2·a^2 b^4"]), "2·a^2 b^4 lies in the derived subalgebra");
    assert!(ok(&["derived", "a^2 b^4"]).contains("not in the derived subalgebra"));
    assert!(ok(&["lcs", "5·a^5", "--depth", "3"]).starts_with("5·a^5 = "));
    assert_eq!(run(&["lcs", "a^2 b^4"]).status.code(), Some(1));
}

#[test]
fn surface_subcommands() {
    assert_eq!(ok(&["string-bracket", "--surface", "torus", "e(x[1,1])", "e(x[1,-1])"]), "e(z[2,0])");
    assert_eq!(ok(&["string-bracket", "--space", "S3", "α⊗y^2", "α⊗y^3"]), "2·(α⊗y^4)x");
    assert_eq!(ok(&["center", "e(x[4,0])"]), "τ[4,0] is central");
    assert!(ok(&["center", "e(y[4,0])"]).starts_with("φ[4,0] is not central"));
    assert!(ok(&["center", "e(1[1,0])"]).contains("not central"));
    let h = ok(&["homology", "--surface", "torus", "--degree", "1", "--window", "2:2,4:4"]);
    assert!(h.contains("Z ⊕ Z/2"), "{h}");
    let blocks = ok(&["verify", "--surface", "torus", "--window", "-2:2,-2:2", "--max-degree", "6"]);
    assert!(blocks.ends_with("25 blocks, all exact"), "{blocks}");
    for oracle in ["sigma2_oracle.json", "sigma2_oracle.csv"] {
        let path = data(oracle);
        let args = ["string-bracket", "--surface", "sigma2", "--oracle", &path, "--classes", "e:id,p:1,q:2,r:1", "e([p])", "e([q])"];
        assert_eq!(ok(&args), "2·e([r])");
        let args = ["string-bracket", "--surface", "sigma2", "--oracle", &path, "--classes", "e:id,p:1,q:2,r:1", "e([r])", "e([q])"];
        assert_eq!(ok(&args), "e([p])");
    }
    let h = ok(&["homology", "--surface", "sigma2", "--classes", "p:1,q:2", "--degree", "1"]);
    assert_eq!(h, "Z ⟨e(a_1)⟩ ⊕ Z ⟨e(a_2)⟩ ⊕ Z ⟨e(b_1)⟩ ⊕ Z ⟨e(b_2)⟩ ⊕ Z/2 ⟨e(β_q)⟩");
    assert_eq!(run(&["homology", "--surface", "sigma1", "--classes", "p:1", "--degree", "1"]).status.code(), Some(0));
    assert_eq!(run(&["homology", "--surface", "sigma0", "--degree", "1"]).status.code(), Some(1));
}

#[test]
fn audit_subcommand() {
    let text = ok(&["audit", "--space", "S5", "--max-degree", "30"]);
    assert!(text.ends_with("audit passed"));
    assert!(text.contains("closed form 24"));
    assert_eq!(run(&["audit", "--space", "S1"]).status.code(), Some(1));
}

#[test]
fn json_output_validates_for_every_subcommand() {
    let oracle = data("sigma2_oracle.json");
    let exact = data("exact_sequence.json");
    let runs: Vec<Vec<&str>> = vec![
        vec!["bracket", "a^2 b", "b"],
        vec!["bracket", "--ring", "Q", "1/3·a", "b^2"],
        vec!["bracket", "--space", "S3", "α⊗y^2", "α⊗y^3"],
        vec!["witness", "a^2 b^-3"],
        vec!["witness", "--ring", "Z", "--coefficient", "6", "b^3"],
        vec!["derived", "2·a^2 b^4 - 3·a^3"],
        vec!["lcs", "2·a^4 b^6", "--depth", "2"],
        vec!["homology", "--space", "S3", "--degree", "7"],
        vec!["homology", "--space", "S5", "--degree", "17"],
        vec!["homology", "--space", "S1", "--degree", "1", "--window", "-2:2"],
        vec!["homology", "--surface", "torus", "--degree", "2"],
        vec!["homology", "--surface", "sigma2", "--oracle", &oracle, "--degree", "1"],
        vec!["string-bracket", "--space", "S4", "e(b v)", "e(b v^2)"],
        vec!["string-bracket", "--surface", "torus", "e(1[1,0])", "e(1[0,1])"],
        vec!["string-bracket", "--surface", "sigma2", "--oracle", &oracle, "e([p])", "e([q])"],
        vec!["verify", "--gysin", "S3", "--max-degree", "8"],
        vec!["verify", "--gysin", "S1", "--max-degree", "6", "--window", "-2:2"],
        vec!["verify", "--sequence", &exact],
        vec!["verify", "--surface", "torus", "--window", "0:1,0:1", "--max-degree", "4"],
        vec!["audit", "--space", "S4", "--max-degree", "20"],
        vec!["center", "e(z[2,4])"],
        vec!["center", "τ[2,4]"],
    ];
    let v = validator();
    let mut seen = std::collections::BTreeSet::new();
    for args in runs {
        let mut full = vec!["--format", "json"];
        full.extend(args.iter().copied());
        let o = run(&full);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
        let doc = json_of(&o);
        let errors: Vec<String> = v.iter_errors(&doc).map(|e| format!("{} at {}", e, e.instance_path)).collect();
        assert!(errors.is_empty(), "{args:?}: {errors:?}");
        assert_eq!(doc["status"], "ok");
        seen.insert(doc["command"].as_str().unwrap().to_string());
    }
    assert_eq!(seen.len(), 9, "{seen:?}");
}

#[test]
fn schema_rejects_malformed_documents() {
    let v = validator();
    assert!(!v.is_valid(&serde_json::json!({ "command": "bracket", "status": "ok" })));
    assert!(!v.is_valid(&serde_json::json!({ "command": "plot", "status": "ok", "result": {} })));
    assert!(!v.is_valid(&serde_json::json!({ "command": "center", "status": "ok", "result": { "central": "yes", "element": "x" } })));
}

#[test]
fn printed_chains_reparse() {
    for (args, space) in [
        (vec!["bracket", "3·a^2 b^-1 - a", "a^-1 b^5 + 2·b"], None),
        (vec!["bracket", "--ring", "Q", "1/2·a^{-3} b", "2/3·a b^2"], None),
        (vec!["string-bracket", "--space", "S3", "α⊗y^4", "α⊗y^7"], Some("S3")),
        (vec!["string-bracket", "--space", "S4", "e(b v^2)", "e(b v^3)"], Some("S4")),
        (vec!["string-bracket", "--surface", "torus", "e(x[1,2]) + 3·e(y[1,2])", "e(x[2,-1])"], Some("torus")),
    ] {
        let first = ok(&args);
        let mut again: Vec<&str> = args.clone();
        let n = again.len();
        again[n - 2] = &first;
        again[n - 1] = &first;
        let o = run(&again);
        assert!(o.status.success() || first == "0", "{first} did not reparse ({space:?}): {}", stderr(&o));
    }
}
