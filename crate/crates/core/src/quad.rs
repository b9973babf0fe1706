//! Exact arithmetic in `ℚ(√d)` for a positive non-square integer `d`.
//!
//! `d` is not forced square-free; values with different `d` never mix, and
//! [`QuadExt::normalize`] moves square factors into the `√` coefficient.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::{format_rational, parse_rational};
use crate::matrix::IntMatrix;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadExt {
    a: BigRational,
    b: BigRational,
    d: BigInt,
}

pub fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

impl QuadExt {
    pub fn new(a: BigRational, b: BigRational, d: BigInt) -> Result<Self> {
        if !d.is_positive() {
            return Err(Error::Precondition(format!("radicand must be positive, got {d}")));
        }
        if is_perfect_square(&d) {
            return Err(Error::SquareRadicand(d));
        }
        Ok(QuadExt { a, b, d })
    }

    pub fn from_ints(a: i64, b: i64, d: i64) -> Result<Self> {
        Self::new(
            BigRational::from_integer(a.into()),
            BigRational::from_integer(b.into()),
            d.into(),
        )
    }

    /// The rational `a` inside the field with radicand `d` (assumed valid).
    pub fn rational(a: BigRational, d: &BigInt) -> Self {
        QuadExt {
            a,
            b: BigRational::zero(),
            d: d.clone(),
        }
    }

    pub fn integer(a: &BigInt, d: &BigInt) -> Self {
        Self::rational(BigRational::from_integer(a.clone()), d)
    }

    pub fn zero_in(d: &BigInt) -> Self {
        Self::integer(&BigInt::zero(), d)
    }

    pub fn one_in(d: &BigInt) -> Self {
        Self::integer(&BigInt::one(), d)
    }

    /// `√d` itself.
    pub fn sqrt_of(d: &BigInt) -> Result<Self> {
        Self::new(BigRational::zero(), BigRational::one(), d.clone())
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn irrational_part(&self) -> &BigRational {
        &self.b
    }

    pub fn radicand(&self) -> &BigInt {
        &self.d
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conj(&self) -> Self {
        QuadExt {
            a: self.a.clone(),
            b: -&self.b,
            d: self.d.clone(),
        }
    }

    /// Field norm `a² − b²d`.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * BigRational::from_integer(self.d.clone())
    }

    /// Field trace `2a`.
    pub fn trace(&self) -> BigRational {
        &self.a + &self.a
    }

    /// Exact sign: compares `a²` with `b²d` after case analysis on the signs of `a`, `b`.
    pub fn sign_of(&self) -> i8 {
        let sa = sign(&self.a);
        let sb = sign(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * BigRational::from_integer(self.d.clone());
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => unreachable!("d is not a square"),
        }
    }

    fn check_field(&self, other: &QuadExt) -> Result<()> {
        if self.d != other.d {
            return Err(Error::FieldMismatch {
                left: self.d.clone(),
                right: other.d.clone(),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &QuadExt) -> Result<QuadExt> {
        self.check_field(other)?;
        Ok(QuadExt {
            a: &self.a + &other.a,
            b: &self.b + &other.b,
            d: self.d.clone(),
        })
    }

    pub fn checked_sub(&self, other: &QuadExt) -> Result<QuadExt> {
        self.check_field(other)?;
        Ok(QuadExt {
            a: &self.a - &other.a,
            b: &self.b - &other.b,
            d: self.d.clone(),
        })
    }

    pub fn checked_mul(&self, other: &QuadExt) -> Result<QuadExt> {
        self.check_field(other)?;
        let d = BigRational::from_integer(self.d.clone());
        Ok(QuadExt {
            a: &self.a * &other.a + &self.b * &other.b * d,
            b: &self.a * &other.b + &self.b * &other.a,
            d: self.d.clone(),
        })
    }

    pub fn checked_div(&self, other: &QuadExt) -> Result<QuadExt> {
        self.check_field(other)?;
        self.checked_mul(&other.recip()?)
    }

    pub fn recip(&self) -> Result<QuadExt> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm();
        Ok(QuadExt {
            a: &self.a / &n,
            b: -&self.b / &n,
            d: self.d.clone(),
        })
    }

    pub fn scale(&self, k: &BigRational) -> QuadExt {
        QuadExt {
            a: &self.a * k,
            b: &self.b * k,
            d: self.d.clone(),
        }
    }

    pub fn pow(&self, n: i64) -> Result<QuadExt> {
        let base = if n < 0 { self.recip()? } else { self.clone() };
        let mut acc = QuadExt::one_in(&self.d);
        for _ in 0..n.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    pub fn compare(&self, other: &QuadExt) -> Result<Ordering> {
        Ok(match self.checked_sub(other)?.sign_of() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        })
    }

    /// Same value with `d` replaced by its square-free part.
    pub fn normalize(&self) -> QuadExt {
        let (k, s) = square_split(&self.d);
        QuadExt {
            a: self.a.clone(),
            b: &self.b * BigRational::from_integer(k),
            d: s,
        }
    }

    /// Rational enclosure `[lo, hi]` from `⌊√(d·10^{2p})⌋`, for cross-checks only.
    pub fn enclosure(&self, digits: u32) -> (BigRational, BigRational) {
        let scale = BigInt::from(10).pow(digits);
        let root = (&self.d * &scale * &scale).sqrt();
        let lo = BigRational::new(root.clone(), scale.clone());
        let hi = BigRational::new(root + 1, scale);
        let x = &self.a + &self.b * &lo;
        let y = &self.a + &self.b * &hi;
        if x <= y {
            (x, y)
        } else {
            (y, x)
        }
    }
}

fn sign(q: &BigRational) -> i8 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

/// `d = k²·s` with `s` square-free.
fn square_split(d: &BigInt) -> (BigInt, BigInt) {
    let mut k = BigInt::one();
    let mut s = d.clone();
    let mut p = BigInt::from(2);
    while &p * &p <= s {
        let p2 = &p * &p;
        while (&s % &p2).is_zero() {
            s /= &p2;
            k *= &p;
        }
        p += 1;
    }
    (k, s)
}

macro_rules! forward_op {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl<'a> $trait<&'a QuadExt> for &'a QuadExt {
            type Output = QuadExt;
            /// Panics when the radicands differ.
            fn $method(self, rhs: &'a QuadExt) -> QuadExt {
                self.$checked(rhs).expect("quadratic field mismatch")
            }
        }
    };
}

forward_op!(Add, add, checked_add);
forward_op!(Sub, sub, checked_sub);
forward_op!(Mul, mul, checked_mul);

impl Neg for &QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt {
            a: -&self.a,
            b: -&self.b,
            d: self.d.clone(),
        }
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = format_rational(&self.b);
        let sep = if self.b.is_negative() { "" } else { "+" };
        write!(f, "{}{sep}{b}√{}", format_rational(&self.a), self.d)
    }
}

impl fmt::Debug for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for QuadExt {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected a+b√d, got {s:?}"));
        let (lhs, d) = s.split_once('√').ok_or_else(bad)?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        // Split at the last sign that is not the leading one and not inside a/b.
        let split = lhs
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(i, _)| i)
            .last()
            .ok_or_else(bad)?;
        let a = parse_rational(&lhs[..split])?;
        let b_str = &lhs[split..];
        let b = parse_rational(b_str.strip_prefix('+').unwrap_or(b_str))?;
        QuadExt::new(a, b, d)
    }
}

impl Serialize for QuadExt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for QuadExt {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Roots of `t² − a·t + 1`, larger first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuadraticRoots {
    Irrational { alpha: QuadExt, beta: QuadExt },
    /// `a² − 4` is a square; only `a = ±2` (double root `±1`).
    Rational { alpha: BigRational, beta: BigRational },
}

impl QuadraticRoots {
    pub fn is_degenerate(&self) -> bool {
        matches!(self, QuadraticRoots::Rational { .. })
    }
}

pub fn quadratic_roots(a: &BigInt) -> Result<QuadraticRoots> {
    let disc: BigInt = a * a - 4;
    if disc.is_negative() {
        return Err(Error::Precondition(format!(
            "t² − {a}t + 1 has no real roots"
        )));
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mid = BigRational::from_integer(a.clone()) * &half;
    if is_perfect_square(&disc) {
        let r = BigRational::from_integer(disc.sqrt()) * &half;
        return Ok(QuadraticRoots::Rational {
            alpha: &mid + &r,
            beta: &mid - &r,
        });
    }
    let alpha = QuadExt::new(mid.clone(), half.clone(), disc.clone())?;
    let beta = alpha.conj();
    Ok(QuadraticRoots::Irrational { alpha, beta })
}

/// `xᵀ·G·y` for vectors over `ℚ(√d)`.
pub fn quad_pairing(gram: &IntMatrix, x: &[QuadExt], y: &[QuadExt]) -> QuadExt {
    assert_eq!(x.len(), gram.rows());
    assert_eq!(y.len(), gram.cols());
    let d = x[0].radicand().clone();
    let mut acc = QuadExt::zero_in(&d);
    for (i, xi) in x.iter().enumerate() {
        for (j, yj) in y.iter().enumerate() {
            let g = BigRational::from_integer(gram[(i, j)].clone());
            acc = &acc + &(xi * yj).scale(&g);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(a: i64, b: i64, d: i64) -> QuadExt {
        QuadExt::from_ints(a, b, d).unwrap()
    }

    #[test]
    fn conjugate_product() {
        let x = q(-6, 1, 35);
        let y = q(-6, -1, 35);
        assert_eq!(&x * &y, q(1, 0, 35));
        assert_eq!(&x + &QuadExt::zero_in(&35.into()), x);
        assert_eq!(&q(1, 1, 35) * &q(1, 1, 35), q(36, 2, 35));
    }

    #[test]
    fn signs() {
        assert_eq!(q(-6, 1, 35).sign_of(), -1);
        assert_eq!(q(0, 0, 35).sign_of(), 0);
        assert_eq!(q(-5, 1, 35).sign_of(), 1);
        assert_eq!(q(6, -1, 35).sign_of(), 1);
        assert_eq!(q(5, -1, 35).sign_of(), -1);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(QuadExt::from_ints(1, 1, 36), Err(Error::SquareRadicand(36.into())));
        assert!(QuadExt::from_ints(1, 1, -3).is_err());
        let x = q(1, 1, 2);
        let y = q(1, 1, 3);
        assert!(matches!(x.checked_add(&y), Err(Error::FieldMismatch { .. })));
        assert_eq!(x.checked_div(&q(0, 0, 2)), Err(Error::DivisionByZero));
    }

    #[test]
    fn normalize_extracts_squares() {
        let x = q(1, 1, 12).normalize();
        assert_eq!(x, q(1, 2, 3));
        let y = q(0, 3, 35).normalize();
        assert_eq!(y, q(0, 3, 35));
    }

    #[test]
    fn string_round_trip() {
        for x in [q(-6, 1, 35), q(3, -2, 5), q(0, 0, 2)] {
            let s = x.to_string();
            assert_eq!(s.parse::<QuadExt>().unwrap(), x);
        }
        let h = QuadExt::new(
            BigRational::new(3.into(), 2.into()),
            BigRational::new((-1).into(), 2.into()),
            5.into(),
        )
        .unwrap();
        assert_eq!(h.to_string(), "3/2-1/2√5");
        assert_eq!("3/2-1/2√5".parse::<QuadExt>().unwrap(), h);
        assert_eq!(serde_json::to_string(&h).unwrap(), "\"3/2-1/2√5\"");
    }

    #[test]
    fn roots_of_small_traces() {
        let r = quadratic_roots(&3.into()).unwrap();
        let half = BigRational::new(1.into(), 2.into());
        match r {
            QuadraticRoots::Irrational { alpha, beta } => {
                assert_eq!(alpha, QuadExt::new(&half * BigRational::from_integer(3.into()), half.clone(), 5.into()).unwrap());
                assert_eq!(beta, alpha.conj());
            }
            _ => panic!("a = 3 has irrational roots"),
        }
        let r = quadratic_roots(&2.into()).unwrap();
        assert!(r.is_degenerate());
        assert_eq!(
            r,
            QuadraticRoots::Rational { alpha: BigRational::one(), beta: BigRational::one() }
        );
        assert!(quadratic_roots(&1.into()).is_err());
    }

    #[test]
    fn roots_are_monotone_in_trace() {
        let alpha = |a: i64| match quadratic_roots(&a.into()).unwrap() {
            QuadraticRoots::Irrational { alpha, .. } => alpha,
            _ => unreachable!(),
        };
        for a in 3..60 {
            // α(a) > α(a−1) ⟺ p_{a}(α(a−1)) < 0 with p_a(t) = t² − a t + 1.
            let prev = alpha(a);
            let next_poly = &(&prev * &prev) - &prev.scale(&BigRational::from_integer((a + 1).into()));
            let val = &next_poly + &QuadExt::one_in(prev.radicand());
            assert_eq!(val.sign_of(), -1);
        }
    }

    #[test]
    fn sign_agrees_with_interval_enclosure() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        while checked < 1000 {
            let d: i64 = rng.gen_range(2..500);
            if is_perfect_square(&d.into()) {
                continue;
            }
            let a = BigRational::new(rng.gen_range(-400..400).into(), rng.gen_range(1..30).into());
            let b = BigRational::new(rng.gen_range(-40..40).into(), rng.gen_range(1..30).into());
            let x = QuadExt::new(a, b, d.into()).unwrap();
            let (lo, hi) = x.enclosure(40);
            let interval_sign = if lo.is_positive() {
                1
            } else if hi.is_negative() {
                -1
            } else if x.is_zero() {
                0
            } else {
                continue;
            };
            assert_eq!(x.sign_of(), interval_sign, "{x}");
            checked += 1;
        }
    }

    fn quad() -> impl Strategy<Value = QuadExt> {
        (-50i64..50, 1i64..10, -50i64..50, 1i64..10).prop_map(|(an, ad, bn, bd)| {
            QuadExt::new(BigRational::new(an.into(), ad.into()), BigRational::new(bn.into(), bd.into()), 35.into())
                .unwrap()
        })
    }

    proptest! {
        #[test]
        fn conjugation_is_a_ring_automorphism(x in quad(), y in quad()) {
            prop_assert_eq!((&x + &y).conj(), &x.conj() + &y.conj());
            prop_assert_eq!((&x * &y).conj(), &x.conj() * &y.conj());
            prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
        }

        #[test]
        fn division_inverts_multiplication(x in quad(), y in quad()) {
            prop_assume!(!y.is_zero());
            prop_assert_eq!((&x * &y).checked_div(&y).unwrap(), x);
        }

        #[test]
        fn roots_sum_and_product(a in 3i64..10_000) {
            match quadratic_roots(&a.into()).unwrap() {
                QuadraticRoots::Irrational { alpha, beta } => {
                    prop_assert_eq!(&alpha + &beta, QuadExt::integer(&a.into(), alpha.radicand()));
                    prop_assert_eq!(&alpha * &beta, QuadExt::one_in(alpha.radicand()));
                    prop_assert_eq!(alpha.compare(&QuadExt::one_in(alpha.radicand())).unwrap(), Ordering::Greater);
                    prop_assert_eq!(beta.sign_of(), 1);
                }
                QuadraticRoots::Rational { .. } => prop_assert!(false, "a ≥ 3 is never degenerate"),
            }
        }
    }
}
