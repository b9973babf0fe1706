use k3cert::pell::{family_certificate, PellContext, DEFAULT_K_BOUND};
use k3cert::report::Status;
use num_bigint::BigInt;

#[test]
fn family_six_to_twelve_passes() {
    let ells: Vec<i64> = (6..=12).collect();
    let report = family_certificate(&ells, None, DEFAULT_K_BOUND).unwrap();
    println!("{}", report.human());
    for item in &report.items {
        assert_eq!(item.status, Status::Pass, "{}", item.details);
    }
    assert_eq!(report.items.len(), 7 * 6 + 1);
}

#[test]
fn every_norm_is_divisible_by_four() {
    for ell in 6..=9 {
        let ctx = PellContext::new(ell).unwrap();
        for x in -15..=15 {
            for y in -15..=15 {
                let v = ctx.lattice.vector(&[x, y]).unwrap();
                let n = ctx.lattice.norm(&v).unwrap();
                assert_eq!(&n % 4, BigInt::from(0));
                assert!(v.is_zero() || n != BigInt::from(0));
            }
        }
    }
}

/// Reports per ℓ are pinned as JSON with `elapsed_ms` zeroed; set `K3CERT_BLESS=1` to regenerate.
#[test]
fn reports_match_golden_files() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let bless = std::env::var_os("K3CERT_BLESS").is_some();
    for ell in 6..=12 {
        let json = family_certificate(&[ell], None, DEFAULT_K_BOUND).unwrap().to_canonical_json();
        let path = dir.join(format!("pell_ell_{ell}.json"));
        if bless {
            std::fs::create_dir_all(&dir).unwrap();
            std::fs::write(&path, &json).unwrap();
            continue;
        }
        let golden = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(json, golden, "ℓ = {ell} report drifted from {}", path.display());
    }
}
