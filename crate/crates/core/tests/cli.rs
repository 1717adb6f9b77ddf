use std::path::Path;
use std::process::{Command, Output};

use hamchaos::scenario::run_text;
use hamchaos::ChaosError;

fn hamchaos(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hamchaos")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const MONODROMY: &str = "[scenario m]\noperation = monodromy\ngamma = 1.0\n";

#[test]
fn list_is_stable_and_complete() {
    let a = hamchaos(&["list"]);
    let b = hamchaos(&["list"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    for name in ["fig2-sos", "fig4-census", "fig9-partitions", "sec3-areas", "fig10-cycle", "fig11-sr", "fig13-bifurcation", "airy", "fig15-phase"] {
        assert!(text.contains(&format!("{name} (criterion")), "{name}");
    }
    assert_eq!(text.matches("anchor: \"").count(), 14);
}

#[test]
fn unknown_key_reports_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.ini", "# probe\n[scenario m]\noperation = monodromy\ncolour = red\n");
    let out = hamchaos(&["run", &f]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 4") && err.contains("colour"), "{err}");
}

#[test]
fn unknown_target_is_an_error() {
    let out = hamchaos(&["run", "no-such-scenario"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn empty_file_runs_nothing_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "empty.ini", "# nothing here\n");
    let out_dir = dir.path().join("out");
    let out = hamchaos(&["run", &f, "--out-dir", out_dir.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("0 scenario(s)"));
    assert!(!out_dir.exists());
}

#[test]
fn failed_assertion_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "a.ini", &format!("{MONODROMY}assert.trace = 33 +- 1e-9\n"));
    assert_eq!(hamchaos(&["run", &f]).status.code(), Some(0));
    assert_eq!(hamchaos(&["run", &f, "--assert"]).status.code(), Some(1));
    let g = write(dir.path(), "b.ini", &format!("{MONODROMY}assert.trace = 34 +- 1e-9\n"));
    assert_eq!(hamchaos(&["run", &g, "--assert"]).status.code(), Some(0));
}

#[test]
fn same_seed_gives_identical_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let runs: Vec<_> = ["one", "two"]
        .iter()
        .map(|n| {
            let d = dir.path().join(n);
            let out = hamchaos(&["sos", "--kparam", "1.1", "--orbits", "8", "--iterations", "300", "--seed", "7", "--out-dir", d.to_str().unwrap()]);
            assert!(out.status.success());
            d.join("sos")
        })
        .collect();
    for file in ["portrait_standard_1.1.csv", "portrait_standard_1.1.svg"] {
        let a = std::fs::read(runs[0].join(file)).unwrap();
        let b = std::fs::read(runs[1].join(file)).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{file}");
    }
    let csv = std::fs::read_to_string(runs[0].join("portrait_standard_1.1.csv")).unwrap();
    assert!(!csv.contains('\r'));
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().chars().any(char::is_alphabetic));
    // 17 significant digits: d.dddddddddddddddde±x
    let field = lines.next().unwrap().split(',').find(|f| f.contains('e')).unwrap();
    let mantissa = field.trim_start_matches('-').split('e').next().unwrap();
    assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17, "{field}");
}

#[test]
fn different_seeds_differ() {
    let a = run_text("[scenario s]\noperation = sos\nkparam = 1.1\norbits = 4\niterations = 50\n", None, Some(1), false).unwrap();
    let b = run_text("[scenario s]\noperation = sos\nkparam = 1.1\norbits = 4\niterations = 50\n", None, Some(2), false).unwrap();
    assert_ne!(a[0].artifacts, b[0].artifacts);
}

#[test]
fn write_failure_removes_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    std::fs::create_dir(&out).unwrap();
    // A plain file where the second scenario's directory must go.
    std::fs::write(out.join("b"), "occupied").unwrap();
    let text = format!("{MONODROMY}[scenario b]\noperation = monodromy\ngamma = 1.0\n");
    let r = run_text(&text, Some(&out), None, false);
    assert!(matches!(r, Err(ChaosError::Io(_))), "{r:?}");
    assert!(!out.join("m").exists());
    assert_eq!(std::fs::read_to_string(out.join("b")).unwrap(), "occupied");
}

#[test]
fn subcommands_generate_valid_scenarios() {
    let out = hamchaos(&["orbits", "--period", "2", "--grid", "20"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = hamchaos(&["complex", "--nx", "5", "--ny", "5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = hamchaos(&["perturb", "--ensemble", "200", "--iterations", "40"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
