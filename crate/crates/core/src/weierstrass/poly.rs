//! Polynomials in two variables over a [`Field`], and gcd over `ℚ`.
//!
//! The gcd treats `ℚ[s, t]` as `ℚ[s][t]` and runs a primitive
//! pseudo-remainder sequence, with univariate Euclid for contents.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::field::Field;

/// `Σ c·x^i·y^j`, keyed by `(i, j)`; no zero coefficients are stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly2<K> {
    terms: BTreeMap<(u32, u32), K>,
}

pub type QPoly = Poly2<BigRational>;

impl<K: Field> Poly2<K> {
    pub fn zero() -> Self {
        Poly2 { terms: BTreeMap::new() }
    }

    pub fn constant(c: K) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: K, i: u32, j: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.eq_zero() {
            terms.insert((i, j), c);
        }
        Poly2 { terms }
    }

    pub fn terms(&self) -> &BTreeMap<(u32, u32), K> {
        &self.terms
    }

    pub fn coeff(&self, i: u32, j: u32) -> Option<&K> {
        self.terms.get(&(i, j))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(i, j)| i + j).max()
    }

    pub fn degree_x(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.0).max()
    }

    pub fn degree_y(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.1).max()
    }

    fn insert_add(&mut self, key: (u32, u32), c: K) {
        if c.eq_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(existing) => {
                let sum = existing.add(&c);
                if sum.eq_zero() {
                    self.terms.remove(&key);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.insert_add(*k, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Poly2 {
            terms: self.terms.iter().map(|(k, c)| (*k, c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for ((i1, j1), c1) in &self.terms {
            for ((i2, j2), c2) in &other.terms {
                out.insert_add((i1 + i2, j1 + j2), c1.mul(c2));
            }
        }
        out
    }

    pub fn scale(&self, k: &K) -> Self {
        let mut out = Self::zero();
        for (key, c) in &self.terms {
            out.insert_add(*key, c.mul(k));
        }
        out
    }

    pub fn pow(&self, n: u32, one: &K) -> Self {
        let mut acc = Self::constant(one.clone());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: &K, y: &K) -> K {
        let mut acc = x.zero_like();
        for ((i, j), c) in &self.terms {
            acc = acc.add(&c.mul(&x.pow(*i)).mul(&y.pow(*j)));
        }
        acc
    }

    /// `x ↦ cx·x`, `y ↦ cy·y`.
    pub fn scale_vars(&self, cx: &K, cy: &K) -> Self {
        let mut out = Self::zero();
        for ((i, j), c) in &self.terms {
            out.insert_add((*i, *j), c.mul(&cx.pow(*i)).mul(&cy.pow(*j)));
        }
        out
    }

    /// Leading coefficient under graded-lex order (total degree, then `x`-degree).
    pub fn leading(&self) -> Option<((u32, u32), &K)> {
        self.terms
            .iter()
            .max_by_key(|((i, j), _)| (i + j, *i))
            .map(|(k, c)| (*k, c))
    }

    /// Replaces `y²` by `r(x)` until the `y`-degree is at most 1.
    pub fn reduce_y_squared(&self, r: &Self) -> Self {
        let mut out = Self::zero();
        for ((i, j), c) in &self.terms {
            let mut term = Self::monomial(c.clone(), *i, j % 2);
            for _ in 0..j / 2 {
                term = term.mul(r);
            }
            out = out.add(&term);
        }
        out
    }
}

impl QPoly {
    pub fn var_x() -> Self {
        Self::monomial(BigRational::one(), 1, 0)
    }

    pub fn var_y() -> Self {
        Self::monomial(BigRational::one(), 0, 1)
    }

    pub fn int(c: i64) -> Self {
        Self::constant(BigRational::from_integer(c.into()))
    }

    pub fn rat(c: &BigRational) -> Self {
        Self::constant(c.clone())
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some((_, c)) => self.scale(&c.recip()),
            None => self.clone(),
        }
    }

    /// As a polynomial in `y` with coefficients in `ℚ[x]`.
    fn to_nested(&self) -> Vec<UPoly> {
        let deg = self.degree_y().unwrap_or(0) as usize;
        let mut out = vec![UPoly::zero(); deg + 1];
        for ((i, j), c) in &self.terms {
            let p = &mut out[*j as usize];
            p.set(*i as usize, c.clone());
        }
        out
    }

    fn from_nested(n: &[UPoly]) -> Self {
        let mut out = Self::zero();
        for (j, p) in n.iter().enumerate() {
            for (i, c) in p.0.iter().enumerate() {
                out.insert_add((i as u32, j as u32), c.clone());
            }
        }
        out
    }

    /// Greatest common divisor, monic under [`Poly2::leading`]; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        let (a, b) = (self.to_nested(), other.to_nested());
        let c = content(&a).gcd(&content(&b));
        let mut a = primitive(&a);
        let mut b = primitive(&b);
        if deg(&a) < deg(&b) {
            std::mem::swap(&mut a, &mut b);
        }
        let g = loop {
            if deg(&b) == 0 {
                break vec![UPoly::one()];
            }
            let r = prem(&a, &b);
            if r.iter().all(UPoly::is_zero) {
                break b;
            }
            a = b;
            b = primitive(&r);
        };
        let g: Vec<UPoly> = g.iter().map(|p| p.mul(&c)).collect();
        Self::from_nested(&trim(g)).monic()
    }

    /// Exact quotient, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        let dn = trim(d.to_nested());
        let mut r = trim(self.to_nested());
        let dd = dn.len() - 1;
        let lc = dn[dd].clone();
        let mut q = vec![UPoly::zero(); r.len().max(dd + 1) - dd];
        while !(r.len() == 1 && r[0].is_zero()) && r.len() > dd {
            let k = r.len() - 1 - dd;
            let (qc, rem) = r[r.len() - 1].divrem(&lc);
            if !rem.is_zero() {
                return None;
            }
            for (i, dp) in dn.iter().enumerate() {
                r[i + k] = r[i + k].sub(&dp.mul(&qc));
            }
            q[k] = q[k].add(&qc);
            r = trim(r);
        }
        if r.iter().all(UPoly::is_zero) {
            Some(Self::from_nested(&q))
        } else {
            None
        }
    }
}

fn deg(p: &[UPoly]) -> usize {
    p.len() - 1
}

fn trim(mut p: Vec<UPoly>) -> Vec<UPoly> {
    while p.len() > 1 && p.last().is_some_and(UPoly::is_zero) {
        p.pop();
    }
    if p.is_empty() {
        p.push(UPoly::zero());
    }
    p
}

fn content(p: &[UPoly]) -> UPoly {
    p.iter().fold(UPoly::zero(), |g, c| g.gcd(c))
}

fn primitive(p: &[UPoly]) -> Vec<UPoly> {
    let c = content(p);
    trim(p.iter().map(|x| x.divrem(&c).0).collect())
}

/// `lc(b)^(deg a − deg b + 1)·a mod b` in `ℚ[s][t]`.
fn prem(a: &[UPoly], b: &[UPoly]) -> Vec<UPoly> {
    let mut r = trim(a.to_vec());
    let db = deg(b);
    let lc = b[db].clone();
    while r.len() > db && !(r.len() == 1 && r[0].is_zero()) {
        let k = r.len() - 1 - db;
        let lr = r[r.len() - 1].clone();
        r = r.iter().map(|x| x.mul(&lc)).collect();
        for (i, bp) in b.iter().enumerate() {
            r[i + k] = r[i + k].sub(&bp.mul(&lr));
        }
        r = trim(r);
        if r.len() - 1 < db {
            break;
        }
    }
    r
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut keys: Vec<_> = self.terms.keys().copied().collect();
        keys.sort_by_key(|(i, j)| std::cmp::Reverse((i + j, *i)));
        for (n, (i, j)) in keys.iter().enumerate() {
            let c = &self.terms[&(*i, *j)];
            let neg = c.is_negative();
            let mag = c.abs();
            if n == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let var = match (i, j) {
                (0, 0) => String::new(),
                _ => {
                    let part = |v: &str, e: u32| match e {
                        0 => String::new(),
                        1 => v.to_string(),
                        e => format!("{v}^{e}"),
                    };
                    let mut s = part("s", *i);
                    let t = part("t", *j);
                    if !s.is_empty() && !t.is_empty() {
                        s.push('*');
                    }
                    s + &t
                }
            };
            if var.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{var}")?;
            } else {
                write!(f, "{mag}*{var}")?;
            }
        }
        Ok(())
    }
}

/// Univariate polynomial over `ℚ`, coefficients from degree 0 up, trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPoly(Vec<BigRational>);

impl UPoly {
    pub fn zero() -> Self {
        UPoly(Vec::new())
    }

    pub fn one() -> Self {
        UPoly(vec![BigRational::one()])
    }

    pub fn new(mut c: Vec<BigRational>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        UPoly(c)
    }

    fn set(&mut self, i: usize, c: BigRational) {
        if self.0.len() <= i {
            self.0.resize(i + 1, BigRational::zero());
        }
        self.0[i] = c;
        *self = UPoly::new(std::mem::take(&mut self.0));
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        let z = BigRational::zero();
        UPoly::new((0..n).map(|i| self.0.get(i).unwrap_or(&z) + o.0.get(i).unwrap_or(&z)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&UPoly(o.0.iter().map(|c| -c).collect()))
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut c = vec![BigRational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        UPoly::new(c)
    }

    /// Quotient and remainder; division by zero returns `(0, self)`.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let Some(dd) = d.degree() else {
            return (UPoly::zero(), self.clone());
        };
        let mut r = self.0.clone();
        let mut q = vec![BigRational::zero(); self.0.len().saturating_sub(dd)];
        let lc = &d.0[dd];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let c = &r[r.len() - 1] / lc;
            for (i, dc) in d.0.iter().enumerate() {
                r[i + k] -= &c * dc;
            }
            q[k] = c;
            r.pop();
            while r.last().is_some_and(|x| x.is_zero()) {
                r.pop();
            }
        }
        (UPoly::new(q), UPoly::new(r))
    }

    pub fn monic(&self) -> Self {
        match self.0.last() {
            Some(lc) => UPoly(self.0.iter().map(|c| c / lc).collect()),
            None => UPoly::zero(),
        }
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s() -> QPoly {
        QPoly::var_x()
    }
    fn t() -> QPoly {
        QPoly::var_y()
    }

    #[test]
    fn gcd_recovers_common_factor() {
        let g = s().mul(&t()).sub(&QPoly::int(1)).add(&s().mul(&s()));
        let a = g.mul(&s().add(&t()).add(&QPoly::int(3)));
        let b = g.mul(&t().mul(&t()).sub(&s()));
        assert_eq!(a.gcd(&b), g.monic());
        assert_eq!(a.div_exact(&g).unwrap().mul(&g), a);
        assert!(a.div_exact(&s()).is_none());
        assert_eq!(s().gcd(&t()), QPoly::int(1));
    }

    #[test]
    fn gcd_with_pure_s_content() {
        let a = s().sub(&QPoly::int(2)).mul(&t());
        let b = s().sub(&QPoly::int(2)).mul(&s().sub(&QPoly::int(2)));
        assert_eq!(a.gcd(&b), s().sub(&QPoly::int(2)));
    }

    #[test]
    fn display() {
        let p = s().mul(&s()).mul(&t()).sub(&QPoly::int(3)).add(&t());
        assert_eq!(p.to_string(), "s^2*t + t - 3");
    }
}
