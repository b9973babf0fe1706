use k3cert::quartic::{Polarization, QuarticContext};
use k3cert::report::Status;

#[test]
fn rank3_certificate_has_no_failures() {
    let q = QuarticContext::new();
    let report = q.full_certificate();
    println!("{}", report.human());
    for item in &report.items {
        assert_ne!(item.status, Status::Fail, "{}", item.details);
    }
    assert!(report.items.len() >= 10);
    assert_eq!(report.get("prop-3.3-2").unwrap().status, Status::Discrepancy);
    assert_eq!(report.get("lemma-3.1/determinant").unwrap().status, Status::Discrepancy);
    assert_eq!(report.items.last().unwrap().id, "theorem-3.7");
}

#[test]
fn classification_outcomes_within_q() {
    let q = QuarticContext::new();
    let kinds: Vec<Polarization> = q
        .enumerate_q_bruteforce(12)
        .unwrap()
        .iter()
        .map(|a| q.classify_polarization(a).unwrap().kind)
        .collect();
    let count = |k| kinds.iter().filter(|&&x| x == k).count();
    assert_eq!(count(Polarization::VeryAmple), 1);
    assert_eq!(count(Polarization::Hyperelliptic), 1);
    assert_eq!(count(Polarization::Monogonal), 2);
}
