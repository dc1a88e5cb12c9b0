use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sha-nondiv"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_to(args: &[&str], out: &Path) -> Output {
    let mut a: Vec<&str> = args.to_vec();
    let o = out.to_str().unwrap();
    a.extend(["--out", o]);
    run(&a)
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const QUICK: [&str; 4] = ["--point-height", "300", "--point-denominator", "10"];

#[test]
fn verify_example_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.json");
    let mut args = vec!["verify-4div", "--curve", "80 205"];
    args.extend(QUICK);
    let o = run_to(&args, &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&out);
    assert_eq!(v["verdict"], "VERIFIED");
    assert_eq!(v["schema_version"], "1");
    assert_eq!(v["details"]["xi"], serde_json::json!(["1", "5"]));

    let o = run(&["replay", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));

    // change a number inside the step evidence: replay must fail
    let text = std::fs::read_to_string(&out).unwrap();
    let at = text.find("\"steps\"").unwrap();
    let tampered = format!("{}{}", &text[..at], text[at..].replacen("\"5\"", "\"7\"", 1));
    assert_ne!(text, tampered);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, tampered).unwrap();
    let o = run(&["replay", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn control_curve_is_undecided() {
    let mut args = vec!["verify-4div", "--curve", "1 2"];
    args.extend(QUICK);
    assert_eq!(run(&args).status.code(), Some(2));
}

#[test]
fn cyclic_search_lists_three_and_seven() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.json");
    let o = run_to(&["cyclic", "search-c", "--p", "2", "--q", "17", "--bound", "50"], &out);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&out);
    let primes: Vec<&str> = v["details"]["primes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap())
        .collect();
    assert!(primes.contains(&"3") && primes.contains(&"7"), "{primes:?}");
    assert!(!primes.contains(&"5"));
    assert_eq!(run(&["replay", out.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn cyclic_verify_scan() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let o = run_to(&["cyclic", "verify", "--p", "3", "--q", "19", "--bound", "200"], &out);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&out)["details"]["genus"], "10");
    assert_eq!(run(&["replay", out.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_three() {
    // 7 is not 1 mod 8
    assert_eq!(run(&["cyclic", "search-c", "--p", "2", "--q", "7"]).status.code(), Some(3));
    assert_eq!(run(&["cyclic", "verify", "--p", "4", "--q", "17"]).status.code(), Some(3));
    assert_eq!(run(&["verify-4div", "--curve", "1 1"]).status.code(), Some(3));
    assert_eq!(run(&["verify-4div", "--curve", "a b"]).status.code(), Some(3));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{\"schema_version\": \"99\"}").unwrap();
    assert_eq!(run(&["replay", junk.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn quartic_els_of_the_torsors() {
    let o = run(&[
        "quartic-els",
        "--quartic",
        "(11x^2 - 67x + 31)*(-x^2 - 3x - 1)",
        "--quartic",
        "[1,0,0,0,1]",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["command"], "quartic-els");
    let o = run(&["quartic-els", "--quartic", "[3,0,0,0,3]"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn output_does_not_depend_on_threads() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 3] = [
        &["search-4div", "--amax", "40", "--bmax", "90"],
        &["classify-sha", "--curve", "80 205", "--point-height", "300", "--point-denominator", "10"],
        &["cyclic", "verify", "--p", "5", "--q", "101", "--bound", "300"],
    ];
    for (i, case) in cases.iter().enumerate() {
        let mut texts = Vec::new();
        for threads in ["1", "3"] {
            let out = dir.path().join(format!("{i}-{threads}.json"));
            let mut args = case.to_vec();
            args.extend(["--threads", threads]);
            let o = run_to(&args, &out);
            assert!(o.status.code().unwrap() < 3, "{case:?}");
            texts.push(std::fs::read(&out).unwrap());
        }
        assert_eq!(texts[0], texts[1], "{case:?}");
    }
}
