//! `ℚ(ω)` with `ω² = c₁ω + c₀` irreducible over `ℚ`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::field::Field;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ext2 {
    /// `a + bω`.
    pub a: BigRational,
    pub b: BigRational,
    pub c1: BigInt,
    pub c0: BigInt,
    /// Printed name of `ω`.
    pub name: &'static str,
}

impl Ext2 {
    /// `ℚ(i)`, `i² = −1`.
    pub fn gaussian(a: i64, b: i64) -> Ext2 {
        Ext2::raw(a, b, 0, -1, "i")
    }

    /// `ℚ(ζ₃)`, `ζ₃² = −ζ₃ − 1`.
    pub fn eisenstein(a: i64, b: i64) -> Ext2 {
        Ext2::raw(a, b, -1, -1, "ζ₃")
    }

    fn raw(a: i64, b: i64, c1: i64, c0: i64, name: &'static str) -> Ext2 {
        Ext2 {
            a: BigRational::from_integer(a.into()),
            b: BigRational::from_integer(b.into()),
            c1: c1.into(),
            c0: c0.into(),
            name,
        }
    }

    pub fn from_rational(&self, a: BigRational) -> Ext2 {
        Ext2 { a, b: BigRational::zero(), ..self.clone() }
    }

    fn with(&self, a: BigRational, b: BigRational) -> Ext2 {
        Ext2 { a, b, ..self.clone() }
    }

    fn check(&self, other: &Ext2) {
        assert!(self.c1 == other.c1 && self.c0 == other.c0, "mixed extensions");
    }

    pub fn generator(&self) -> Ext2 {
        self.with(BigRational::zero(), BigRational::one())
    }

    /// Galois conjugate, `ω ↦ c₁ − ω`.
    pub fn conj(&self) -> Ext2 {
        let c1 = BigRational::from_integer(self.c1.clone());
        self.with(&self.a + &self.b * c1, -&self.b)
    }

    pub fn norm(&self) -> BigRational {
        let c1 = BigRational::from_integer(self.c1.clone());
        let c0 = BigRational::from_integer(self.c0.clone());
        &self.a * &self.a + &self.a * &self.b * c1 - &self.b * &self.b * c0
    }
}

impl fmt::Display for Ext2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}{}", self.b, self.name),
            (false, false) => {
                let sign = if self.b < BigRational::zero() { "-" } else { "+" };
                write!(f, "{}{}{}{}", self.a, sign, self.b.abs_ref(), self.name)
            }
        }
    }
}

trait AbsRef {
    fn abs_ref(&self) -> BigRational;
}

impl AbsRef for BigRational {
    fn abs_ref(&self) -> BigRational {
        if *self < BigRational::zero() {
            -self
        } else {
            self.clone()
        }
    }
}

impl Field for Ext2 {
    fn zero_like(&self) -> Self {
        self.with(BigRational::zero(), BigRational::zero())
    }
    fn one_like(&self) -> Self {
        self.with(BigRational::one(), BigRational::zero())
    }
    fn eq_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        self.check(o);
        self.with(&self.a + &o.a, &self.b + &o.b)
    }
    fn sub(&self, o: &Self) -> Self {
        self.check(o);
        self.with(&self.a - &o.a, &self.b - &o.b)
    }
    fn mul(&self, o: &Self) -> Self {
        self.check(o);
        let c1 = BigRational::from_integer(self.c1.clone());
        let c0 = BigRational::from_integer(self.c0.clone());
        let bb = &self.b * &o.b;
        self.with(
            &self.a * &o.a + &bb * c0,
            &self.a * &o.b + &self.b * &o.a + bb * c1,
        )
    }
    fn neg(&self) -> Self {
        self.with(-&self.a, -&self.b)
    }
    fn inv(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        let c = self.conj();
        Some(self.with(&c.a / &n, &c.b / &n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defining_relations() {
        let i = Ext2::gaussian(0, 1);
        assert_eq!(i.mul(&i), i.from_rational(BigRational::from_integer((-1).into())));
        let z = Ext2::eisenstein(0, 1);
        assert!(z.pow(3).eq_one() && !z.eq_one());
        assert_eq!(z.mul(&z), z.neg().sub(&z.one_like()));
        let x = Ext2::eisenstein(3, -2);
        assert!(x.mul(&x.inv().unwrap()).eq_one());
    }
}
