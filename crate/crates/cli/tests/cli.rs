use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toposbench"))
        .args(args)
        .env_remove("TOPOSBENCH_BUDGET")
        .output()
        .unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn scratch(name: &str, text: &str) -> String {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn validate_accepts_every_model_fixture() {
    for f in [
        "figure1.json",
        "arrow.json",
        "sets.json",
        "chain_p2.json",
        "chain_p3.json",
        "trunc_1.json",
        "trunc_2.json",
        "trunc_3.json",
    ] {
        let out = run(&["validate", &fixture(f)]);
        assert_eq!(code(&out), 0, "{f}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(report(&out)["result"]["valid"], true);
    }
}

#[test]
fn validate_reports_broken_square_and_malformed_input() {
    let text = std::fs::read_to_string(fixture("arrow.json")).unwrap();
    let mut model: Value = serde_json::from_str(&text).unwrap();
    model["morphisms"]["F"]["target"] = "X".into();
    model["morphisms"]["F"]["components"] = serde_json::json!({"0": {"z": "z"}, "1": {"a1": "a2", "a2": "a1"}});
    model["presheaves"]["X"]["carriers"]["0"] = serde_json::json!(["z"]);
    model["presheaves"]["X"]["action"] = serde_json::json!({"u": {"z": "a1"}});
    let broken = scratch("broken_square.json", &model.to_string());
    let out = run(&["validate", &broken]);
    assert_eq!(code(&out), 1);
    let err = report(&out)["error"].as_str().unwrap().to_string();
    assert!(err.contains("naturality") && err.contains("`u`"), "{err}");

    let empty = scratch("empty.json", "");
    assert_eq!(code(&run(&["validate", &empty])), 2);
    assert_eq!(code(&run(&["validate", "/nonexistent/model.json"])), 2);
}

#[test]
fn monos_from_probes() {
    let counts: Vec<u64> = ["B1", "B2", "B3"]
        .iter()
        .map(|b| {
            report(&run(&["monos", &fixture("figure1.json"), "--from", b, "--to", "A"]))["result"]["count"]
                .as_u64()
                .unwrap()
        })
        .collect();
    assert_eq!(counts[..2], [1, 0]);
    let one = report(&run(&["monos", &fixture("figure1.json"), "--from", "B1", "--to", "A"]));
    assert_eq!(one["result"]["monos"][0]["*"]["X"], "q4");
    let out = run(&["monos", &fixture("figure1.json"), "--from", "Nope", "--to", "A"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn finiteness_verdicts() {
    let verdict = |model: &str, object: &str, notion: &str| {
        let out = run(&["finiteness", &fixture(model), "--object", object, "--notion", notion]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        report(&out)["result"]["verdict"].as_bool().unwrap()
    };
    assert!(verdict("arrow.json", "Omega", "dedekind"));
    assert!(!verdict("chain_p2.json", "chainM", "lp:1"));
    assert!(verdict("chain_p2.json", "chainM", "lp:2"));
    assert!(verdict("sets.json", "anySet", "kuratowski"));
    assert_eq!(
        code(&run(&[
            "finiteness",
            &fixture("sets.json"),
            "--object",
            "anySet",
            "--notion",
            "lp:0"
        ])),
        2
    );
}

#[test]
fn holds_reports_truth_values_and_external_notes() {
    let out = run(&["holds", &fixture("arrow.json"), "--formula", "true"]);
    assert_eq!(report(&out)["result"]["holds"], true);

    let out = run(&[
        "holds",
        &fixture("arrow.json"),
        "--formula",
        "(forall x:X. F(x) = G(x)) => F = G",
    ]);
    let r = report(&out);
    assert_eq!(r["result"]["holds"], true);
    assert_eq!(r["result"]["notes"][0], "F and G are different morphisms externally");

    let out = run(&[
        "holds",
        &fixture("arrow.json"),
        "--formula",
        "~ exists x:Z. x in Z",
        "--bind",
        "Z=X",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["result"]["bindings"]["Z"], "X");

    let out = run(&["holds", &fixture("arrow.json"), "--formula", "forall x:X. x ="]);
    assert_eq!(code(&out), 2);
    assert!(report(&out)["error"].as_str().unwrap().contains("syntax error at"));
}

#[test]
fn tm_commands() {
    let r = report(&run(&["tm", "run", &fixture("tm_successor.json"), "--input", "11"]));
    assert_eq!(r["result"]["relation"], serde_json::json!([["11", "111"]]));
    assert_eq!(r["result"]["fin"], "kuratowski");

    let r = report(&run(&[
        "tm",
        "run",
        &fixture("tm_halt.json"),
        "--input",
        "0",
        "--input",
        "10",
    ]));
    assert_eq!(r["result"]["relation"], serde_json::json!([["0", "0"], ["10", "10"]]));

    let r = report(&run(&["tm", "run", &fixture("tm_branch.json"), "--input", "0"]));
    assert_eq!(r["result"]["relation"], serde_json::json!([["0", "0"], ["0", "1"]]));

    let runaway = scratch(
        "runaway.json",
        r#"{"states": ["q", "f"], "alphabet": [" "], "blank": " ", "q0": "q", "qf": "f", "delta": {"q, ": [["q", " ", "R"]]}}"#,
    );
    let out = run(&["tm", "closure", &runaway, "--input", "", "--budget", "20"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["budget_exhausted"], true);
    assert_eq!(r["result"]["size"], 20);

    let bad = scratch("bad_tm.json", r#"{"states": []}"#);
    assert_eq!(code(&run(&["tm", "run", &bad])), 2);
}

#[test]
fn suite_is_deterministic_and_catches_a_broken_table() {
    let args = ["suite", "--seed", "0", "--objects", "10", &fixture("arrow.json")];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);

    let out = run(&["suite", "--seed", "0", "--objects", "0", "--inject-broken-heyting"]);
    assert_eq!(code(&out), 1);
    let failures = report(&out)["result"]["failures"].as_array().unwrap().clone();
    assert!(failures
        .iter()
        .any(|f| f.as_str().unwrap().contains("a=false b=false c=false")));
}

#[test]
fn budget_variable_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_toposbench"))
        .args(["validate", &fixture("arrow.json")])
        .env("TOPOSBENCH_BUDGET", "lots")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    let out = Command::new(env!("CARGO_BIN_EXE_toposbench"))
        .args([
            "finiteness",
            &fixture("arrow.json"),
            "--object",
            "Omega",
            "--notion",
            "dedekind",
        ])
        .env("TOPOSBENCH_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
    assert!(report(&out)["error"].as_str().unwrap().contains("budget"));
}
