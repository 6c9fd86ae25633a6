use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_approxhom"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report on stdout")
}

#[test]
fn tor_of_z2_over_z4() {
    let out = run(&[
        "derive",
        "--backend",
        "mod",
        "--domain",
        "zm:4",
        "--functor",
        "tensor:z2",
        "--object",
        "z2",
        "--max-degree",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["schema_version"], 1);
    let values = r["result"]["derived"]["values"].as_array().unwrap();
    assert_eq!(values.len(), 5);
    for v in values {
        assert_eq!(
            v["fingerprint"]["invariant_factors"],
            serde_json::json!(["2"])
        );
    }
    assert!(!out.stderr.is_empty());
}

#[test]
fn lie_condition_p_counterexample() {
    let out = run(&[
        "condp",
        "--backend",
        "lie2",
        "--domain",
        "fp:3",
        "--samples",
        "50",
        "--seed",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(
        report(&out)["result"]["verdict"]["verdict"],
        "counterexample"
    );
}

#[test]
fn module_condition_p_holds() {
    let out = run(&["condp", "--field", "zm:8", "--samples", "30"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn lie_subtraction_laws() {
    let out = run(&[
        "check",
        "subtraction-laws",
        "--backend",
        "lie2",
        "--domain",
        "fp:3",
        "--samples",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn usage_errors_exit_3() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(
        run(&["derive", "--functor", "nope", "--object", "z2"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        run(&["resolve", "--domain", "fp:4", "--object", "z2"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        run(&[
            "resolve",
            "--backend",
            "lie2",
            "--domain",
            "zm:4",
            "--object",
            "a1"
        ])
        .status
        .code(),
        Some(3)
    );
    assert_eq!(run(&["resolve", "--object", "y7"]).status.code(), Some(3));
    assert_eq!(run(&["check", "no-such-suite"]).status.code(), Some(3));
}

#[test]
fn long_exact_sequence_of_tor() {
    let out = run(&[
        "les",
        "--functor",
        "tensor:2",
        "--ses",
        "syzygy:z2",
        "--max-degree",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let nodes = report(&out)["result"]["sequence"]["nodes"]
        .as_array()
        .unwrap()
        .clone();
    assert_eq!(nodes.len(), 15);
    assert!(nodes.iter().all(|n| n["exact"] == true));
}

#[test]
fn commands_pass_on_modules() {
    for args in [
        &["resolve", "--object", "z2+z4"][..],
        &["homology", "--object", "z2"],
        &["horseshoe", "--ses", "random"],
        &["horseshoe", "--ses", "split:z2,z4"],
        &["homotopy", "--object", "z2+free:1"],
        &["moore", "--object", "z2"],
        &["moore", "--object", "z2", "--source", "gamma"],
        &[
            "simplicial-compare",
            "--object",
            "z2",
            "--functor",
            "tensor:2",
        ],
        &[
            "check",
            "resolution-independence",
            "--functor",
            "tensor:2",
            "--object",
            "z2",
            "--samples",
            "20",
        ],
        &[
            "check",
            "functor-properties",
            "--functor",
            "tensor:2",
            "--samples",
            "20",
        ],
        &[
            "derive",
            "--domain",
            "z",
            "--functor",
            "tensor:2",
            "--object",
            "z2+z3",
            "--max-degree",
            "4",
        ],
    ] {
        let out = run(args);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn commands_pass_on_lie_algebras() {
    for args in [
        &["resolve", "--backend", "lie2", "--object", "heisenberg+a1"][..],
        &[
            "homotopy",
            "--backend",
            "lie2",
            "--object",
            "a1",
            "--max-degree",
            "2",
        ],
        &[
            "check",
            "resolution-independence",
            "--backend",
            "lie2",
            "--object",
            "a2",
            "--samples",
            "10",
            "--max-degree",
            "2",
        ],
    ] {
        let out = run(args);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn homology_of_input_complex() {
    let dir = std::env::temp_dir().join(format!("approxhom-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("complex.json");
    // Z/4 --0--> Z/4 --2--> Z/4: H1 = ker 2 = Z/2, H0 = Z/2.
    let z4 = serde_json::json!({ "rank": 1, "relations": [[]] });
    let complex = serde_json::json!({
        "objects": [z4, z4, z4],
        "differentials": [[[2]], [[0]]],
    });
    std::fs::write(&path, complex.to_string()).unwrap();
    let out = run(&["homology", "--input", path.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let h = report(&out)["result"]["homology"].clone();
    assert_eq!(
        h[1]["fingerprint"]["invariant_factors"],
        serde_json::json!(["2"])
    );
    assert_eq!(
        h[0]["fingerprint"]["invariant_factors"],
        serde_json::json!(["2"])
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn replay_is_byte_identical() {
    let dir = std::env::temp_dir().join(format!("approxhom-replay-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let first = dir.join("first.json");
    let out = run(&[
        "check",
        "homotopies",
        "--samples",
        "15",
        "--seed",
        "3",
        "-o",
        first.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let again = run(&["check", "homotopies", "--samples", "15", "--seed", "3"]);
    assert_eq!(std::fs::read(&first).unwrap(), again.stdout);
    let replay = run(&["replay", first.to_str().unwrap()]);
    assert_eq!(replay.status.code(), Some(0));
    assert_eq!(report(&replay)["identical"], true);
    std::fs::remove_dir_all(&dir).ok();
}
