use k3cert::report::Status;
use k3cert::weierstrass::{
    finite_automorphism, plane_cubic_certificate, invert_translation_map, multiples, translation_map,
    restriction_agreement, sample_curves, Convention, CurvePoint, WeierstrassCurve,
};
use num_rational::BigRational;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

#[test]
fn certificate_has_no_failures() {
    let report = plane_cubic_certificate();
    println!("{}", report.human());
    assert!(report.is_success(), "{}", report.human());
    assert_eq!(report.get("theorem-2.2/convention").unwrap().status, Status::Discrepancy);
    assert_eq!(report.items.last().unwrap().id, "theorem-2.2");
}

#[test]
fn map_is_an_involution_on_every_sample_curve() {
    for sc in sample_curves() {
        let (a, b) = sc.ab.coords().unwrap();
        let f = translation_map(a, b);
        assert_eq!(invert_translation_map(a, b).unwrap(), f);
        f.compose(&f).unwrap().check_identity().unwrap();
        let pts = multiples(&sc, 11).unwrap();
        assert!(pts.len() >= 20);
        let ag = restriction_agreement(&sc.curve, &sc.ab, &pts).unwrap();
        assert_eq!(ag.convention, Convention::NegatedAddition);
    }
}

#[test]
fn off_curve_translation_point_is_rejected() {
    let e = WeierstrassCurve::from_ints(0, 1).unwrap();
    let bad = CurvePoint::from_ints(1, 1);
    assert!(restriction_agreement(&e, &bad, &[CurvePoint::from_ints(2, 3)]).is_err());
    assert!(translation_map(&q(0), &q(1)).eval(&q(0), &q(-1)).is_none());
}

#[test]
fn automorphisms_need_the_right_shape() {
    assert!(finite_automorphism(2, &WeierstrassCurve::from_ints(3, 5).unwrap()).is_ok());
    assert!(finite_automorphism(4, &WeierstrassCurve::from_ints(-4, 0).unwrap()).is_ok());
    assert!(finite_automorphism(6, &WeierstrassCurve::from_ints(0, -2).unwrap()).is_ok());
    assert!(finite_automorphism(4, &WeierstrassCurve::from_ints(-4, 1).unwrap()).is_err());
}
