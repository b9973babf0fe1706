use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::poly::QPoly;
use crate::error::{Error, Result};
use crate::json::JsonRat;

/// `y² = x³ + px + q` over `ℚ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeierstrassCurve {
    pub p: JsonRat,
    pub q: JsonRat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurvePoint {
    Infinity,
    Affine(JsonRat, JsonRat),
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

impl CurvePoint {
    pub fn affine(x: BigRational, y: BigRational) -> Self {
        CurvePoint::Affine(JsonRat(x), JsonRat(y))
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Self::affine(q(x), q(y))
    }

    pub fn coords(&self) -> Option<(&BigRational, &BigRational)> {
        match self {
            CurvePoint::Infinity => None,
            CurvePoint::Affine(x, y) => Some((&x.0, &y.0)),
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine(x, y) => CurvePoint::affine(x.0.clone(), -&y.0),
        }
    }
}

impl fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvePoint::Infinity => write!(f, "O"),
            CurvePoint::Affine(x, y) => write!(f, "({}, {})", x.0, y.0),
        }
    }
}

impl WeierstrassCurve {
    pub fn new(p: BigRational, q: BigRational) -> Result<Self> {
        let disc = BigRational::from_integer(4.into()) * &p * &p * &p + BigRational::from_integer(27.into()) * &q * &q;
        if disc.is_zero() {
            return Err(Error::SingularCurve);
        }
        Ok(WeierstrassCurve { p: JsonRat(p), q: JsonRat(q) })
    }

    pub fn from_ints(p: i64, qq: i64) -> Result<Self> {
        Self::new(q(p), q(qq))
    }

    pub fn p(&self) -> &BigRational {
        &self.p.0
    }

    pub fn q(&self) -> &BigRational {
        &self.q.0
    }

    /// `x³ + px + q` in the variable `s`.
    pub fn cubic(&self) -> QPoly {
        let s = QPoly::var_x();
        s.mul(&s).mul(&s).add(&s.scale(self.p())).add(&QPoly::rat(self.q()))
    }

    pub fn contains(&self, pt: &CurvePoint) -> bool {
        match pt.coords() {
            None => true,
            Some((x, y)) => y * y == x * x * x + self.p() * x + self.q(),
        }
    }

    pub fn point(&self, x: BigRational, y: BigRational) -> Result<CurvePoint> {
        let pt = CurvePoint::affine(x, y);
        if self.contains(&pt) {
            Ok(pt)
        } else {
            Err(Error::OffCurve)
        }
    }

    /// Chord-tangent addition with `O` at infinity.
    pub fn add(&self, a: &CurvePoint, b: &CurvePoint) -> Result<CurvePoint> {
        if !self.contains(a) || !self.contains(b) {
            return Err(Error::OffCurve);
        }
        let ((x1, y1), (x2, y2)) = match (a.coords(), b.coords()) {
            (None, _) => return Ok(b.clone()),
            (_, None) => return Ok(a.clone()),
            (Some(p1), Some(p2)) => (p1, p2),
        };
        let lambda = if x1 != x2 {
            (y2 - y1) / (x2 - x1)
        } else if y1 == y2 && !y1.is_zero() {
            (q(3) * x1 * x1 + self.p()) / (q(2) * y1)
        } else {
            return Ok(CurvePoint::Infinity);
        };
        let x3 = &lambda * &lambda - x1 - x2;
        let y3 = lambda * (x1 - &x3) - y1;
        Ok(CurvePoint::affine(x3, y3))
    }

    pub fn multiple(&self, pt: &CurvePoint, k: i64) -> Result<CurvePoint> {
        let base = if k < 0 { pt.neg() } else { pt.clone() };
        let mut acc = CurvePoint::Infinity;
        let mut pow = base;
        let mut n = k.unsigned_abs();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.add(&acc, &pow)?;
            }
            pow = self.add(&pow, &pow)?;
            n >>= 1;
        }
        Ok(acc)
    }

    /// Order of `pt` if at most `cap` (Mazur bounds rational torsion by 12).
    pub fn torsion_order(&self, pt: &CurvePoint, cap: u32) -> Result<Option<u32>> {
        let mut acc = pt.clone();
        for k in 1..=cap {
            if acc == CurvePoint::Infinity {
                return Ok(Some(k));
            }
            acc = self.add(&acc, pt)?;
        }
        Ok(None)
    }
}

impl fmt::Display for WeierstrassCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y² = x³")?;
        for (c, tail) in [(self.p(), "x"), (self.q(), "")] {
            if c.is_zero() {
                continue;
            }
            let neg = *c < BigRational::zero();
            let mag = if neg { -c } else { c.clone() };
            write!(f, " {} ", if neg { "−" } else { "+" })?;
            if mag.is_one() && !tail.is_empty() {
                write!(f, "{tail}")?;
            } else {
                write!(f, "{mag}{tail}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_law_examples() {
        let e = WeierstrassCurve::from_ints(0, 1).unwrap();
        let p = CurvePoint::from_ints(2, 3);
        let r = e.add(&p, &CurvePoint::from_ints(0, 1)).unwrap();
        assert_eq!(r, CurvePoint::from_ints(-1, 0));
        assert_eq!(e.add(&p, &CurvePoint::Infinity).unwrap(), p);
        assert_eq!(e.add(&p, &p.neg()).unwrap(), CurvePoint::Infinity);
        assert_eq!(e.torsion_order(&p, 12).unwrap(), Some(6));
        assert!(e.add(&p, &CurvePoint::from_ints(1, 1)).is_err());
        assert!(WeierstrassCurve::from_ints(-3, 2).is_err());
        assert_eq!(e.to_string(), "y² = x³ + 1");
        assert_eq!(WeierstrassCurve::from_ints(-1, 1).unwrap().to_string(), "y² = x³ − x + 1");
    }
}
