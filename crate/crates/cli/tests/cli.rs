use std::path::PathBuf;
use std::process::{Command, Output};

use k3cert::report::{canonicalize_json, Status, VerificationReport};

fn k3cert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_k3cert")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(format!("{name}-{}.json", std::process::id()))
}

fn read_report(path: &PathBuf) -> VerificationReport {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn verify_quartic_passes_with_at_least_ten_items() {
    let path = scratch("quartic");
    let out = k3cert(&["verify", "quartic", "--json", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let report = read_report(&path);
    assert!(report.items.len() >= 10);
    assert!(report.items.iter().all(|i| matches!(i.status, Status::Pass | Status::Discrepancy)));
    assert!(stdout(&out).contains("[PASS] lemma-3.9 Q = {H, 2H−L−M, 3H−3L+M, 3H−3M+L}"));
}

#[test]
fn verify_pell_reports_generator() {
    let out = k3cert(&["verify", "pell", "--ell", "6"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("g₀ = [-143, -1704; 1704, 20305]"));
}

#[test]
fn too_small_search_bound_fails_with_exit_one() {
    let out = k3cert(&["verify", "pell", "--ell", "6", "--entry-bound", "300"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("[FAIL] lemma-4.6/ell=6"));
}

#[test]
fn reduce_m_gives_empty_word() {
    let out = k3cert(&["reduce", "--class", "0,0,1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("M ↦ M via []"));
}

#[test]
fn reduce_accepts_fev_coordinates() {
    let out = k3cert(&["reduce", "--class", "4,3,1", "--basis", "fev"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("H ↦ H via []"));
    let out = k3cert(&["reduce", "--class=81,-85,15"]);
    assert!(stdout(&out).contains("↦ H via [ι1, ι3, ι1]"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["reduce", "--class", "1,2"][..],
        &["reduce", "--class", "a,b,c"],
        &["reduce", "--class", "1,2,3", "--basis", "xyz"],
        &["verify", "pell", "--ell", "5"],
        &["verify", "pell", "--ell-range", "4..8"],
        &["verify", "pell", "--ell-range", "8..7"],
        &["enumerate", "sections", "--n-bound", "-1"],
        &["frobnicate"],
    ] {
        assert_eq!(k3cert(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn orbit_and_enumerations() {
    let out = k3cert(&["orbit", "--len", "3"]);
    assert!(stdout(&out).contains("22 distinct classes"));
    let out = k3cert(&["enumerate", "q"]);
    assert!(stdout(&out).contains("Q = {H, 2H-L-M, 3H-3L+M, 3H+L-3M}"));
    let out = k3cert(&["enumerate", "sections", "--n-bound", "2"]);
    assert!(stdout(&out).contains("(10, 0, -1)"));
}

#[test]
fn verify_all_json_is_deterministic() {
    let (a, b) = (scratch("all-a"), scratch("all-b"));
    for p in [&a, &b] {
        let out = k3cert(&["verify", "all", "--json", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    }
    let canon = |p: &PathBuf| canonicalize_json(&std::fs::read_to_string(p).unwrap()).unwrap();
    assert_eq!(canon(&a), canon(&b));
}
