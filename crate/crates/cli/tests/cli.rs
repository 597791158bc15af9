use std::process::Command;

use modkit::report::Report;

fn modkit() -> Command {
    Command::new(env!("CARGO_BIN_EXE_modkit"))
}

#[test]
fn group_passes_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let st = modkit().args(["group", "--seed", "4", "--out"]).arg(&out).output().unwrap().status;
    assert_eq!(st.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let r = Report::from_json(&text).unwrap();
    assert_eq!(r.command, "group");
    assert_eq!(r.seed, 4);
    assert!(r.passed());
    assert_eq!(r.input["preset"], serde_json::Value::Null);
    assert_eq!(r.to_json().unwrap(), text);
}

#[test]
fn failing_check_exits_one_and_still_writes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let st = modkit().args(["standard", "--trials", "8", "--tol", "1e-300", "--out"]).arg(&out).output().unwrap().status;
    assert_eq!(st.code(), Some(1));
    let r = Report::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(r.failures().count() > 0);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["nonsense"],
        vec!["standard", "--dim", "x"],
        vec!["wedge", "--dim", "9"],
        vec!["group", "--preset", "nope"],
        vec!["affine", "--grid-n", "1"],
        vec!["fock", "--fermi-dim", "0"],
        vec!["standard", "--tol", "-1"],
    ] {
        let st = modkit().args(&args).output().unwrap();
        assert_eq!(st.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn plot_is_recorded_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |tag: &str| {
        let out = dir.path().join(format!("{tag}.json"));
        let svg = dir.path().join(format!("{tag}.svg"));
        let st = modkit().args(["vn", "--trials", "6", "--seed", "9", "--out"]).arg(&out).arg("--plot").arg(&svg).output().unwrap().status;
        assert_eq!(st.code(), Some(0));
        let r = Report::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(r.artifacts, vec![svg.display().to_string()]);
        (r, std::fs::read(&svg).unwrap())
    };
    let (a, sa) = run("a");
    let (b, sb) = run("b");
    assert_eq!(sa, sb);
    assert!(String::from_utf8(sa).unwrap().starts_with("<svg"));
    let strip = |mut r: Report| {
        r.artifacts.clear();
        r.deterministic_json().unwrap()
    };
    assert_eq!(strip(a), strip(b));
}
