use std::path::Path;
use std::process::{Command, Output};

fn run_in(data: Option<&Path>, args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_chainfill"));
    cmd.args(args);
    match data {
        Some(dir) => cmd.env("CHAINFILL_DATA", dir),
        None => cmd.env_remove("CHAINFILL_DATA"),
    };
    cmd.output().expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    run_in(None, args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/v1"))
}

#[test]
fn documented_examples() {
    let o = run(&["homology", "SFS(S2;(2,1),(3,1),(7,-6))"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "0\n"));
    let o = run(&["fill", "M2", "5/2,7/2", "--homology"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "Z35\n"));
    let o = run(&["factor-check", "M7", "-2,-2,0,0,0,0,0"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "factors: true (pair (-2,-2) consecutive)\n"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
    let o = run(&["homology", "SFS(S2;(2,1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(!o.stderr.is_empty());
    assert_eq!(run(&["enumerate", "Thm9-F9"]).status.code(), Some(2));
    assert_eq!(run(&["fill", "M9", "1"]).status.code(), Some(2));
}

#[test]
fn negative_answers_exit_1() {
    let o = run(&["equiv", "L(7,1)", "L(7,2)"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("no"));
    let o = run(&["equiv", "SFS(D;(2,1),(2,1))", "SFS(Mb;)"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "yes\n"));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["verify-catalog", "--table", "18"][..],
        &["enumerate", "Thm2.7-F2", "--bound", "2"],
        &["orbit", "M6", "-2,-1/2,.,1/2,3/2"],
        &["identities", "--json"],
    ] {
        let (a, b) = (run(args), run(args));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.status.code(), Some(0), "{args:?}");
    }
}

#[test]
fn builtin_catalog_passes_with_the_known_misprint() {
    let o = run(&["verify-catalog"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.ends_with("128 passed, 0 failed, 1 known misprints\n"), "{text}");
    assert_eq!(run(&["verify-catalog", "--strict"]).status.code(), Some(1));
}

#[test]
fn corrupted_fixture_names_the_row() {
    let dir = tempfile::tempdir().unwrap();
    for f in ["families.toml", "identities.txt", "catalog.txt"] {
        std::fs::copy(data_dir().join(f), dir.path().join(f)).unwrap();
    }
    let path = dir.path().join("catalog.txt");
    let text = std::fs::read_to_string(&path).unwrap();
    let bad = text.replace("M2 | 13 | 5/2,7/2 | SFS(D;(2,1),(3,1)) =[1,1;0,-1]= SFS(D;(2,1),(3,1)) | Z35", "M2 | 13 | 5/2,7/2 | SFS(D;(2,1),(3,1)) =[1,1;0,-1]= SFS(D;(2,1),(3,1)) | Z36");
    assert_ne!(bad, text);
    std::fs::write(&path, bad).unwrap();
    let o = run_in(Some(dir.path()), &["verify-catalog", "--table", "13"]);
    assert_eq!(o.status.code(), Some(1));
    let failing: Vec<String> = stdout(&o).lines().filter(|l| l.starts_with("FAIL")).map(String::from).collect();
    assert_eq!(failing.len(), 1, "{failing:?}");
    assert!(failing[0].contains("5/2,7/2") && failing[0].contains("listed Z36"), "{}", failing[0]);
}

#[test]
fn json_mirrors_text() {
    let o = run(&["--json", "homology", "L(5,2)"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["h1"], "Z5");
    let o = run(&["equiv", "--json", "L(7,1)", "L(8,1)"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!((v["verdict"].as_str(), v["invariant"].as_str()), (Some("no"), Some("H1")));
    let o = run(&["--json", "verify-catalog", "--table", "12"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], 10);
}

#[test]
fn enumerate_reports_cases() {
    let o = run(&["enumerate", "Thm2.4-F1", "--bound", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let last = stdout(&o).lines().last().unwrap().to_string();
    assert!(last.contains("0 H1 mismatches") && last.contains("4:"), "{last}");
    let o = run(&["enumerate", "Thm2.11-F5"]);
    assert_eq!(stdout(&o).lines().count(), 5);
    let o = run(&["parse", "SFS(D;(2,1),(3,1)) =[0,1;1,0]= SFS(D;(2,1),(2,1))"]);
    assert_eq!(stdout(&o), "SFS(D;(2,1),(3,1)) =[0,1;1,0]= SFS(D;(2,1),(2,1))\n");
    let o = run(&["normalize", "L(5,3)"]);
    assert_eq!(stdout(&o), "L(5,2)\n");
}
