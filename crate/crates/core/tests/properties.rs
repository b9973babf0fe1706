use k3cert::chamber::DEFAULT_REDUCTION_CAP;
use k3cert::lattice::LatticeVector;
use k3cert::pell::{default_entry_bound, PellContext};
use k3cert::quartic::QuarticContext;
use k3cert::weierstrass::{translation_map, sample_curves, CurvePoint, RatFunc};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use std::sync::OnceLock;

fn quartic() -> &'static QuarticContext {
    static CTX: OnceLock<QuarticContext> = OnceLock::new();
    CTX.get_or_init(QuarticContext::new)
}

fn reduced_word(max_len: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..3, 0..=max_len).prop_map(|mut w| {
        w.dedup();
        w
    })
}

/// Positive combinations of the doubled chamber rays are interior.
fn interior_point() -> impl Strategy<Value = LatticeVector> {
    const RAYS: [[i64; 3]; 5] = [[2, 1, 1], [2, -2, 1], [2, -2, 0], [2, 0, -2], [2, 1, -2]];
    prop::array::uniform5(1i64..30).prop_map(|w| {
        let mut y = [0i64; 3];
        for (k, r) in w.iter().zip(RAYS.iter()) {
            for i in 0..3 {
                y[i] += k * r[i];
            }
        }
        LatticeVector::from_i64(&y)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reflections_preserve_the_pairing(x in prop::array::uniform3(-50i64..50), y in prop::array::uniform3(-50i64..50)) {
        let ctx = quartic();
        let (x, y) = (LatticeVector::from_i64(&x), LatticeVector::from_i64(&y));
        for g in &ctx.iotas {
            prop_assert_eq!(ctx.lattice.inner_product(&g.apply(&x), &g.apply(&y)).unwrap(), ctx.lattice.inner_product(&x, &y).unwrap());
            prop_assert_eq!(g.apply(&g.apply(&x)), x.clone());
        }
    }

    #[test]
    fn swapping_l_and_m_exchanges_the_first_two_walls(word in reduced_word(6), y in interior_point()) {
        let ctx = quartic();
        let swap = ctx.swap_lm();
        let x = ctx.chamber.apply_word(&word, &y);
        let swapped_word: Vec<usize> = word.iter().map(|&i| [1, 0, 2][i]).collect();
        prop_assert_eq!(swap.apply(&x), ctx.chamber.apply_word(&swapped_word, &swap.apply(&y)));
        let t = ctx.chamber.reduce_to_chamber(&x, DEFAULT_REDUCTION_CAP).unwrap();
        let ts = ctx.chamber.reduce_to_chamber(&swap.apply(&x), DEFAULT_REDUCTION_CAP).unwrap();
        prop_assert_eq!(swap.apply(&t.result), ts.result);
        prop_assert_eq!(t.word.iter().map(|&i| [1, 0, 2][i]).collect::<Vec<_>>(), ts.word);
    }

    #[test]
    fn reduction_inverts_any_reduced_word(word in reduced_word(8), y in interior_point()) {
        let ctx = quartic();
        let x = ctx.chamber.apply_word(&word, &y);
        let t = ctx.chamber.reduce_to_chamber(&x, DEFAULT_REDUCTION_CAP).unwrap();
        prop_assert_eq!(&t.result, &y);
        prop_assert_eq!(t.word.len(), word.len());
        prop_assert_eq!(ctx.chamber.replay(&t), x);
    }

    #[test]
    fn group_law_is_associative_and_commutative(c in 0usize..3, i in -6i64..=6, j in -6i64..=6, k in -6i64..=6) {
        let sc = &sample_curves()[c];
        let e = &sc.curve;
        let [p, q, r] = [i, j, k].map(|n| e.multiple(&sc.generator, n).unwrap());
        prop_assert_eq!(e.add(&p, &q).unwrap(), e.add(&q, &p).unwrap());
        let lhs = e.add(&e.add(&p, &q).unwrap(), &r).unwrap();
        prop_assert_eq!(&lhs, &e.add(&p, &e.add(&q, &r).unwrap()).unwrap());
        prop_assert_eq!(lhs, e.multiple(&sc.generator, i + j + k).unwrap());
    }

    #[test]
    fn translation_map_is_an_involution_on_curve_points(c in 0usize..3, n in 1i64..=8) {
        let sc = &sample_curves()[c];
        let pt = sc.curve.multiple(&sc.generator, n).unwrap();
        let (a, b) = sc.ab.coords().unwrap();
        let (s, t) = pt.coords().unwrap();
        prop_assume!(s != a);
        let f = translation_map(a, b);
        let (s1, t1) = f.eval(s, t).unwrap();
        let image = CurvePoint::affine(s1.clone(), t1.clone());
        prop_assert!(sc.curve.contains(&image));
        prop_assert_eq!(image, sc.curve.add(&pt, &sc.ab).unwrap().neg());
        if &s1 != a {
            prop_assert_eq!(f.eval(&s1, &t1), Some((s.clone(), t.clone())));
        }
    }

    #[test]
    fn rational_function_arithmetic_round_trips(a in -5i64..5, b in 1i64..5, c in -5i64..5) {
        let q = |n: i64| BigRational::from_integer(n.into());
        let f = RatFunc::s().add(&RatFunc::constant(&q(a))).div(&RatFunc::t().add(&RatFunc::constant(&q(b)))).unwrap();
        let g = RatFunc::s().mul(&RatFunc::t()).add(&RatFunc::constant(&q(c)));
        prop_assert_eq!(f.add(&g).sub(&g), f.clone());
        prop_assert_eq!(f.mul(&g).div(&g).unwrap(), f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn pell_orbit_classes_have_norm_four(ell in 6i64..=9, k in -4i64..=4) {
        let ctx = PellContext::new(ell).unwrap();
        let res = ctx.isometry_search(default_entry_bound(ell)).unwrap();
        let h = res.g0.pow(k).apply(&ctx.h1);
        prop_assert_eq!(ctx.lattice.norm(&h).unwrap(), BigInt::from(4));
        prop_assert!(ctx.in_open_cone(&h));
        prop_assert_eq!(res.g0.pow(k).apply(&res.g0.pow(-k).apply(&ctx.h1)), ctx.h1.clone());
    }
}
