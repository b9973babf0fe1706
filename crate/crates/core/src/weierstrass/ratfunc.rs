//! Rational functions and plane rational maps over `ℚ` in `(s, t)`.

use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;

use super::poly::QPoly;
use crate::error::{Error, Result};

/// `num / den` in lowest terms with `den` monic.
#[derive(Clone, Debug, PartialEq)]
pub struct RatFunc {
    num: QPoly,
    den: QPoly,
}

impl RatFunc {
    pub fn new(num: QPoly, den: QPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RatFunc { num, den: QPoly::int(1) });
        }
        let g = num.gcd(&den);
        let num = num.div_exact(&g).expect("gcd divides");
        let den = den.div_exact(&g).expect("gcd divides");
        let lc = den.leading().map(|(_, c)| c.recip()).expect("nonzero");
        Ok(RatFunc { num: num.scale(&lc), den: den.scale(&lc) })
    }

    pub fn poly(p: QPoly) -> Self {
        RatFunc { num: p, den: QPoly::int(1) }
    }

    pub fn s() -> Self {
        Self::poly(QPoly::var_x())
    }

    pub fn t() -> Self {
        Self::poly(QPoly::var_y())
    }

    pub fn constant(c: &BigRational) -> Self {
        Self::poly(QPoly::rat(c))
    }

    pub fn num(&self) -> &QPoly {
        &self.num
    }

    pub fn den(&self) -> &QPoly {
        &self.den
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den)).expect("nonzero")
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.den).sub(&o.num.mul(&self.den)), self.den.mul(&o.den)).expect("nonzero")
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den)).expect("nonzero")
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Self::new(self.num.mul(&o.den), self.den.mul(&o.num))
    }

    /// `(deg num, deg den)` in total degree.
    pub fn degrees(&self) -> (u32, u32) {
        (self.num.total_degree().unwrap_or(0), self.den.total_degree().unwrap_or(0))
    }

    /// `None` where the denominator vanishes.
    pub fn eval(&self, s: &BigRational, t: &BigRational) -> Option<BigRational> {
        let d = self.den.eval(s, t);
        (!d.is_zero()).then(|| self.num.eval(s, t) / d)
    }

    /// Numerator and denominator reduced separately by `t² = r(s)`.
    pub fn reduce_on_curve(&self, r: &QPoly) -> Self {
        let num = self.num.reduce_y_squared(r);
        let den = self.den.reduce_y_squared(r);
        Self::new(num, den).expect("curve reduction keeps the denominator nonzero")
    }

    /// `self(F, G)` for `F = fs`, `G = ft`.
    pub fn substitute(&self, fs: &RatFunc, ft: &RatFunc) -> Result<Self> {
        let lift = |p: &QPoly| -> (QPoly, QPoly) {
            let dx = p.degree_x().unwrap_or(0);
            let dy = p.degree_y().unwrap_or(0);
            let one = BigRational::from_integer(1.into());
            let mut acc = QPoly::zero();
            for ((i, j), c) in p.terms() {
                let term = fs.num.pow(*i, &one)
                    .mul(&fs.den.pow(dx - i, &one))
                    .mul(&ft.num.pow(*j, &one))
                    .mul(&ft.den.pow(dy - j, &one))
                    .scale(c);
                acc = acc.add(&term);
            }
            (acc, fs.den.pow(dx, &one).mul(&ft.den.pow(dy, &one)))
        };
        let (nn, nd) = lift(&self.num);
        let (dn, dd) = lift(&self.den);
        Self::new(nn.mul(&dd), nd.mul(&dn))
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == QPoly::int(1) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

/// `(s, t) ↦ (s′, t′)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalMap {
    pub s: RatFunc,
    pub t: RatFunc,
}

impl RationalMap {
    pub fn identity() -> Self {
        RationalMap { s: RatFunc::s(), t: RatFunc::t() }
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &RationalMap) -> Result<RationalMap> {
        Ok(RationalMap {
            s: self.s.substitute(&inner.s, &inner.t)?,
            t: self.t.substitute(&inner.s, &inner.t)?,
        })
    }

    pub fn eval(&self, s: &BigRational, t: &BigRational) -> Option<(BigRational, BigRational)> {
        Some((self.s.eval(s, t)?, self.t.eval(s, t)?))
    }

    /// `Ok` iff the map is `(s, t)` exactly; otherwise the cleared-denominator residuals.
    pub fn check_identity(&self) -> Result<()> {
        let rs = self.s.num.sub(&self.s.den.mul(&QPoly::var_x()));
        let rt = self.t.num.sub(&self.t.den.mul(&QPoly::var_y()));
        if rs.is_zero() && rt.is_zero() {
            Ok(())
        } else {
            Err(Error::SimplificationFailed { residual: format!("s: {rs}; t: {rt}") })
        }
    }
}

impl fmt::Display for RationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s′ = {}, t′ = {}", self.s, self.t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn lowest_terms() {
        let s = QPoly::var_x();
        let f = RatFunc::new(s.mul(&s).sub(&QPoly::int(1)), s.sub(&QPoly::int(1)).scale(&q(2))).unwrap();
        assert_eq!(f.num(), &s.add(&QPoly::int(1)).scale(&BigRational::new(1.into(), 2.into())));
        assert_eq!(f.den(), &QPoly::int(1));
        assert!(RatFunc::new(s.clone(), QPoly::zero()).is_err());
    }

    #[test]
    fn composition_and_inverse() {
        // (s, t) ↦ (s + t, t) and its inverse.
        let f = RationalMap { s: RatFunc::s().add(&RatFunc::t()), t: RatFunc::t() };
        let g = RationalMap { s: RatFunc::s().sub(&RatFunc::t()), t: RatFunc::t() };
        assert!(g.compose(&f).unwrap().check_identity().is_ok());
        assert!(f.compose(&f).unwrap().check_identity().is_err());
        let inv = RationalMap { s: RatFunc::s().div(&RatFunc::t()).unwrap(), t: RatFunc::t() };
        let back = RationalMap { s: RatFunc::s().mul(&RatFunc::t()), t: RatFunc::t() };
        assert!(back.compose(&inv).unwrap().check_identity().is_ok());
        assert_eq!(inv.eval(&q(6), &q(3)), Some((q(2), q(3))));
        assert_eq!(inv.eval(&q(6), &q(0)), None);
    }
}
