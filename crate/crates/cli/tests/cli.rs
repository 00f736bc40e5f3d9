use std::io::Write;

use nijenhuis_cli::{run, EXIT_CHECK_FAILED, EXIT_INPUT, EXIT_OK};
use serde_json::Value;

fn json(args: &[&str]) -> (i32, Value) {
    let mut argv = vec!["nijenhuis", "--format", "json"];
    argv.extend_from_slice(args);
    let (code, out) = run(argv);
    (code, serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out}")))
}

fn spec_file(body: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".json").tempfile().unwrap();
    f.write_all(body.as_bytes()).unwrap();
    f
}

const BROKEN: &str = r#"{
    "name": "broken", "kind": "lie_algebra", "dim": 4,
    "J": [["0","-1","0","0"],["1","0","0","0"],["0","0","0","-1"],["0","0","1","0"]],
    "structure_constants": [{"i":1,"j":2,"k":3,"c":1},{"i":1,"j":3,"k":1,"c":1}]
}"#;

#[test]
fn iwasawa_de_rham_degree_one() {
    let (code, v) = json(&["cohomology", "iwasawa", "--theory", "deRham", "--degree", "1"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["windows"][0]["dim"], 4);
    assert_eq!(v["windows"][0]["N"], "invariant");
    assert_eq!(v["stabilized"], true);
    assert!(v["version"].is_string());
}

#[test]
fn example27_n_cohomology_stabilizes() {
    let (code, v) =
        json(&["cohomology", "example27", "--p", "sin(x1)", "--theory", "N", "--degree", "1", "--windows", "1..3"]);
    assert_eq!(code, EXIT_OK);
    let dims: Vec<u64> = v["windows"].as_array().unwrap().iter().map(|w| w["dim"].as_u64().unwrap()).collect();
    assert_eq!(dims, vec![2, 2, 2]);
    assert_eq!(v["stabilized"], true);
    assert_eq!(v["windows"][2]["codomain_window"], 5);
}

#[test]
fn broken_spec_is_an_input_error() {
    let f = spec_file(BROKEN);
    let (code, out) = run(["nijenhuis", "validate", f.path().to_str().unwrap()]);
    assert_eq!(code, EXIT_INPUT);
    assert!(out.contains("Jacobi identity fails for (e1, e2, e3)"), "{out}");
}

#[test]
fn valid_spec_round_trip() {
    let f = spec_file(&BROKEN.replace(r#",{"i":1,"j":3,"k":1,"c":1}"#, ""));
    let path = f.path().to_str().unwrap();
    let (code, v) = json(&["validate", path]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["valid"], true);
    let (code, v) = json(&["cohomology", path, "--theory", "deRham", "--degree", "1"]);
    assert_eq!(code, EXIT_OK);
    // Heisenberg ⊕ R: b1 = 3
    assert_eq!(v["windows"][0]["dim"], 3);
}

#[test]
fn report_json_round_trips() {
    let (_, out) = run(["nijenhuis", "--format", "json", "cohomology", "kt", "--theory", "J", "--degree", "2"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    let printed = serde_json::to_string_pretty(&v).unwrap() + "\n";
    assert_eq!(printed, out);
    assert_eq!(serde_json::from_str::<Value>(&printed).unwrap(), v);
    assert!(v["verdicts"]["phi"]["rank"].is_u64());
}

#[test]
fn crosscheck_tables_agree() {
    for model in ["abelian", "kodaira_thurston", "iwasawa"] {
        let (code, v) = json(&["crosscheck", model]);
        assert_eq!(code, EXIT_OK, "{model}");
        for row in v["rows"].as_array().unwrap() {
            assert_eq!(row["lemma_holds"], row["criteria_hold"], "{model}: {row}");
        }
        assert_eq!(v["dolbeault"]["passed"], true);
    }
}

#[test]
fn identities_pass_with_seed() {
    let (code, v) = json(&["identities", "t4", "--samples", "3", "--seed", "9"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["seed"], 9);
    assert_eq!(v["passed"], true);
    assert_eq!(v["results"].as_array().unwrap().len(), 7);
}

#[test]
fn nijenhuis_and_integrability() {
    let (_, v) = json(&["nijenhuis", "example27", "--p", "1/2"]);
    assert_eq!(v["integrable"], true);
    let (_, v) = json(&["nijenhuis", "example27", "--p", "cos(x1)"]);
    assert_eq!(v["integrable"], false);
    let (code, _) = json(&["nijenhuis", "example27", "--p", "sin(x2)"]);
    assert_eq!(code, EXIT_INPUT);
}

#[test]
fn lemma_and_dolbeault_commands() {
    let (code, v) = json(&["lemma", "flat", "--degree", "2", "--windows", "1"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["verdicts"]["lemma_holds"], true);
    let (_, v) = json(&["lemma", "iwasawa", "--degree", "2"]);
    assert_eq!(v["windows"][0]["dim"], 2);
    let (_, v) = json(&["cohomology", "iwasawa", "--theory", "dolbeault", "--degree", "1"]);
    assert_eq!(v["windows"][0]["dim"], 5);
    let (code, _) = json(&["cohomology", "t4", "--theory", "dolbeault", "--degree", "1"]);
    assert_eq!(code, EXIT_INPUT);
}

#[test]
fn input_errors() {
    assert_eq!(run(["nijenhuis", "cohomology", "nosuch", "--theory", "J", "--degree", "1"]).0, EXIT_INPUT);
    assert_eq!(run(["nijenhuis", "cohomology", "kt", "--theory", "X", "--degree", "1"]).0, EXIT_INPUT);
    assert_eq!(run(["nijenhuis", "cohomology", "kt", "--theory", "J", "--degree", "9"]).0, EXIT_INPUT);
    assert_eq!(run(["nijenhuis", "cohomology", "kt", "--theory", "J", "--degree", "1", "--windows", "1"]).0, EXIT_INPUT);
    assert_eq!(run(["nijenhuis", "validate", "/nonexistent.json"]).0, EXIT_INPUT);
    assert_eq!(run(["nijenhuis", "parse", "sin(x1/2)"]).0, EXIT_INPUT);
    let _ = EXIT_CHECK_FAILED;
}

#[test]
fn list_models_lists_catalog() {
    let (code, v) = json(&["list-models"]);
    assert_eq!(code, EXIT_OK);
    let names: Vec<&str> = v["models"].as_array().unwrap().iter().map(|m| m["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"iwasawa") && names.contains(&"t4"));
}
