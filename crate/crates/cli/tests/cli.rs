use std::process::{Command, Output};

fn usteen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_usteen"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON on stdout")
}

#[test]
fn relation_anchor() {
    let o = usteen(&[
        "-p", "3", "relation", "R", "--eps", "0", "--k", "0", "--n", "0",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "z(0,-1)*z(0,0)\n");
}

#[test]
fn relation_with_negative_index() {
    let o = usteen(&[
        "-p", "3", "relation", "S", "--eps", "1", "--k", "-2", "--n", "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "z(1,-9)*z(1,-2) + 2*z(1,-6)*z(1,-5)\n");
}

#[test]
fn square_of_bockstein_letter_vanishes() {
    let o = usteen(&["-p", "3", "nf", "z(1,0)*z(1,0)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0\n");
    assert!(String::from_utf8_lossy(&o.stderr).contains("steps=1"));
}

#[test]
fn normal_form_json() {
    let o = usteen(&["-p", "3", "--output", "json", "nf", "z(0,-3)*z(0,0)"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["normal_form"]["p"], 3);
    assert_eq!(v["normal_form"]["terms"].as_array().unwrap().len(), 2);
    assert_eq!(v["stats"]["steps"], 1);
}

#[test]
fn theta_suite_passes() {
    let o = usteen(&["-p", "3", "verify", "--suite", "theta"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("not_member"), "{text}");
    assert!(text.contains("R(0,0,2)"), "{text}");

    let o = usteen(&["-p", "3", "--output", "json", "verify", "--suite", "theta"]);
    let v = json(&o);
    assert_eq!(v["suite"], "theta");
    assert_eq!(v["passed"], true);
}

#[test]
fn map_and_basis_and_contains() {
    let o = usteen(&[
        "-p",
        "3",
        "map",
        "--name",
        "phi",
        "--power",
        "2",
        "z(0,1)*z(0,0)",
    ]);
    assert_eq!(stdout(&o), "z(0,5)*z(0,-4)\n");

    let o = usteen(&[
        "-p",
        "3",
        "basis",
        "--length",
        "1",
        "--min",
        "0",
        "--max",
        "1",
        "--pattern",
        "1",
    ]);
    assert_eq!(stdout(&o), "z(1,0)\nz(1,1)\n");

    let o = usteen(&["-p", "3", "--output", "json", "contains", "z(1,0)*z(1,0)"]);
    assert_eq!(
        json(&o),
        serde_json::json!([{"family": "S", "eps": 1, "k": 0, "n": 0}])
    );

    let o = usteen(&["-p", "3", "map", "--name", "psi", "z(0,1)"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    assert_eq!(usteen(&["-p", "4", "nf", "z(0,0)"]).status.code(), Some(2));
    assert_eq!(usteen(&["-p", "3", "nf", "z(0,"]).status.code(), Some(2));
    assert_eq!(
        usteen(&["-p", "3", "verify", "--suite", "nope"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(usteen(&["-p", "3", "frobnicate"]).status.code(), Some(2));
    assert_eq!(usteen(&["nf", "z(0,0)"]).status.code(), Some(2));
    let o = usteen(&["-p", "3", "--fuel", "1", "nf", "z(0,-6)*z(0,0)*z(0,6)"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("fuel exhausted"));
}

#[test]
fn seeded_runs_are_reproducible() {
    let args = [
        "-p",
        "3",
        "--seed",
        "7",
        "--output",
        "json",
        "verify",
        "--suite",
        "kmodule",
        "--samples",
        "12",
    ];
    let (a, b) = (usteen(&args), usteen(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["seed"], 7);

    let args = [
        "-p",
        "3",
        "--strategy",
        "random",
        "--seed",
        "3",
        "nf",
        "z(0,-2)*z(0,0)*z(0,2)",
    ];
    assert_eq!(usteen(&args).stdout, usteen(&args).stdout);
}
