pub mod chamber;
pub mod error;
pub mod json;
pub mod isometry;
pub mod lattice;
pub mod matrix;
pub mod pell;
pub mod quad;
pub mod quartic;
pub mod report;
pub mod weierstrass;

pub use error::{Error, Result};

use report::{ReportItem, Status, VerificationReport};

/// `ℓ` values covered by the default rank-2 run.
pub const DEFAULT_ELLS: std::ops::RangeInclusive<i64> = 6..=12;

/// Rank-2 certificates, or a single failed item if the run cannot start.
pub fn pell_report(ells: &[i64], entry_bound: Option<u64>, k_bound: i64) -> VerificationReport {
    pell::family_certificate(ells, entry_bound, k_bound).unwrap_or_else(|err| {
        VerificationReport::new(vec![ReportItem::new("theorem-4.1", "Theorem 4.1", Status::Fail, err.to_string())])
    })
}

/// Every suite with default parameters: quartic, then rank-2, then plane cubics.
pub fn full_report() -> VerificationReport {
    let ells: Vec<i64> = DEFAULT_ELLS.collect();
    let mut report = quartic::QuarticContext::new().full_certificate();
    report.append(pell_report(&ells, None, pell::DEFAULT_K_BOUND));
    report.append(weierstrass::plane_cubic_certificate());
    report
}
