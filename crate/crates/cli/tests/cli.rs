use std::process::{Command, Output};

fn vcc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vcc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const SMALL: &[&str] = &["--recipe", "fig5", "--locations", "3", "--fadings", "2"];

#[test]
fn worker_count_leaves_csv_unchanged() {
    let one = vcc(&[SMALL, &["--workers", "1"]].concat());
    let eight = vcc(&[SMALL, &["--workers", "8"]].concat());
    assert!(
        one.status.success(),
        "{}",
        String::from_utf8_lossy(&one.stderr)
    );
    assert_eq!(one.stdout, eight.stdout);
}

#[test]
fn same_seed_same_output_and_different_seed_differs() {
    let a = vcc(&[SMALL, &["--seed", "9"]].concat());
    let b = vcc(&[SMALL, &["--seed", "9"]].concat());
    let c = vcc(&[SMALL, &["--seed", "10"]].concat());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    assert!(stdout(&a).contains("\nscheme,ptot_dbm,snr_db,q,"));
}

#[test]
fn echoed_header_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = vcc(&[SMALL, &["--set", "ptot_dbm=20,30"]].concat());
    let text = stdout(&first);
    let echoed: String = text
        .lines()
        .filter_map(|l| l.strip_prefix("# "))
        .map(|l| format!("{l}\n"))
        .collect();
    assert!(echoed.contains("L=32") && echoed.contains("seed="));
    let path = dir.path().join("echo.cfg");
    std::fs::write(&path, echoed).unwrap();
    let second = vcc(&["--config", path.to_str().unwrap()]);
    assert!(
        second.status.success(),
        "{}",
        String::from_utf8_lossy(&second.stderr)
    );
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn out_file_gets_csv_and_stdout_gets_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let o = vcc(&[SMALL, &["--out", path.to_str().unwrap()]].concat());
    assert!(o.status.success());
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.contains("vcc_bd_mrc_opt"));
    assert!(!stdout(&o).contains("scheme,ptot_dbm"));
}

#[test]
fn type_mismatch_names_the_key() {
    let o = vcc(&["--recipe", "fig2", "--set", "L=banana"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("`L`") || err.contains(" L "), "{err}");
    assert!(err.contains("banana"), "{err}");
}

#[test]
fn unknown_key_is_rejected() {
    let o = vcc(&["--recipe", "fig2", "--set", "antennaz=3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("antennaz"));
}

#[test]
fn infeasible_users_per_group_is_rejected_before_running() {
    let o = vcc(&["--recipe", "fig3", "--set", "Q=7"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn recipe_listing() {
    let o = vcc(&["--list-recipes"]);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 8);
    assert!(text.contains("L=32, M=4, Q=2, Q'=8, G=4"));
}
