//! Isometries of an integral lattice.
//!
//! Convention: a matrix acts on coordinate columns, and column `j` is the
//! image of basis vector `j`. Composition is the matrix product, so
//! `compose(g, h)` applies `h` first. For pullbacks this reads
//! `(φ∘ψ)* = ψ*∘φ* = compose(ψ*, φ*)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::{ints_from_json, ints_to_json, JsonInt};
use crate::lattice::{BasisChange, DiscriminantGroup, DualVector, IntegerLattice, LatticeVector};
use crate::matrix::IntMatrix;

#[derive(Clone, PartialEq, Eq)]
pub struct Isometry {
    matrix: IntMatrix,
    lattice: IntegerLattice,
}

impl std::fmt::Debug for Isometry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Isometry<{}> {}", self.lattice.basis_tag(), self.matrix)
    }
}

pub fn make_isometry(lattice: &IntegerLattice, matrix: IntMatrix) -> Result<Isometry> {
    let n = lattice.rank();
    if matrix.rows() != n || matrix.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if matrix.rows() != n { matrix.rows() } else { matrix.cols() },
        });
    }
    let pulled = &(&matrix.transpose() * lattice.gram()) * &matrix;
    for r in 0..n {
        for c in 0..n {
            if pulled[(r, c)] != lattice.gram()[(r, c)] {
                return Err(Error::NotIsometry {
                    row: r,
                    col: c,
                    expected: lattice.gram()[(r, c)].clone(),
                    found: pulled[(r, c)].clone(),
                });
            }
        }
    }
    Ok(Isometry {
        matrix,
        lattice: lattice.clone(),
    })
}

/// `s_w(x) = x − 2(x,w)/(w²)·w`, required to be integral on every basis vector.
pub fn reflection_in(lattice: &IntegerLattice, w: &LatticeVector) -> Result<Isometry> {
    let w2 = lattice.norm(w)?;
    if w2.is_zero() {
        return Err(Error::IsotropicReflection);
    }
    let form = lattice.pairing_form(w);
    let mut columns = Vec::with_capacity(lattice.rank());
    for (i, pairing) in form.iter().enumerate() {
        let twice: BigInt = pairing * 2;
        if !twice.is_multiple_of(&w2) {
            return Err(Error::ReflectionNotIntegral { basis_index: i });
        }
        let k = twice / &w2;
        let col: Vec<BigInt> = w
            .coords()
            .iter()
            .enumerate()
            .map(|(r, wr)| {
                let delta = if r == i { BigInt::one() } else { BigInt::zero() };
                delta - &k * wr
            })
            .collect();
        columns.push(col);
    }
    make_isometry(lattice, IntMatrix::from_columns(&columns)?)
}

/// Matrix product `g·h`: apply `h`, then `g`.
pub fn compose(g: &Isometry, h: &Isometry) -> Result<Isometry> {
    if g.lattice != h.lattice {
        return Err(Error::LatticeMismatch);
    }
    make_isometry(&g.lattice, &g.matrix * &h.matrix)
}

/// Translation by the `n`-th section on the lattice in the `(f, e, v)` basis.
pub fn mw_translation(fev: &IntegerLattice, n: i64) -> Result<Isometry> {
    let n = BigInt::from(n);
    let m = IntMatrix::from_rows(vec![
        vec![BigInt::one(), &n * &n * 10, &n * 20],
        vec![BigInt::zero(), BigInt::one(), BigInt::zero()],
        vec![BigInt::zero(), n.clone(), BigInt::one()],
    ])?;
    make_isometry(fev, m)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InfiniteOrderCertificate {
    /// `g^N − I` is nonzero and nilpotent: a nontrivial Jordan block at a root of unity.
    Unipotent,
    /// `g^N ≠ I` and not quasi-unipotent, so by Kronecker's theorem some root of
    /// the integral characteristic polynomial lies off the unit circle.
    SpectralRadius,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    Finite(u64),
    /// Finite but larger than the requested cap.
    BeyondCap { cap: u64, order: u64 },
    Infinite {
        certificate: InfiniteOrderCertificate,
        /// `N = lcm{ d : φ(d) ≤ rank }`; every finite order divides it.
        exponent: u64,
        char_poly: Vec<JsonInt>,
    },
}

impl Order {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Order::Infinite { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKind {
    Identity,
    Negation,
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscriminantAction {
    pub kind: ActionKind,
    /// For `Other`: a generator and its image, neither congruent to ± the generator.
    pub witness: Option<(DualVector, DualVector)>,
}

impl Isometry {
    pub fn identity(lattice: &IntegerLattice) -> Isometry {
        Isometry {
            matrix: IntMatrix::identity(lattice.rank()),
            lattice: lattice.clone(),
        }
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn lattice(&self) -> &IntegerLattice {
        &self.lattice
    }

    pub fn determinant(&self) -> BigInt {
        self.matrix.determinant()
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
    }

    pub fn apply(&self, x: &LatticeVector) -> LatticeVector {
        LatticeVector::new(self.matrix.mul_vec(x.coords()))
    }

    pub fn apply_dual(&self, y: &DualVector) -> DualVector {
        let image = self.matrix.to_rational().mul_vec(y.coords());
        self.lattice
            .dual_vector(image)
            .expect("isometries preserve the dual lattice")
    }

    pub fn inverse(&self) -> Isometry {
        Isometry {
            matrix: self
                .matrix
                .unimodular_inverse()
                .expect("isometries are unimodular"),
            lattice: self.lattice.clone(),
        }
    }

    pub fn pow(&self, n: i64) -> Isometry {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        Isometry {
            matrix: base.matrix.pow(n.unsigned_abs()),
            lattice: self.lattice.clone(),
        }
    }

    /// Coefficients `c₀, …, c_{n−1}, 1` of `det(tI − g)`, lowest degree first.
    pub fn char_poly(&self) -> Vec<BigInt> {
        char_poly(&self.matrix)
    }

    pub fn order_of(&self, cap: u64) -> Order {
        let cap = cap.max(1);
        let n = self.lattice.rank();
        let exponent = finite_order_exponent(n);
        let g_n = self.matrix.pow(exponent);
        if g_n.is_identity() {
            let order = divisors(exponent)
                .into_iter()
                .find(|&d| self.matrix.pow(d).is_identity())
                .expect("exponent itself works");
            return if order <= cap {
                Order::Finite(order)
            } else {
                Order::BeyondCap { cap, order }
            };
        }
        let mut shifted = g_n;
        for i in 0..n {
            shifted[(i, i)] -= 1;
        }
        let certificate = if shifted.pow(n as u64).max_abs_entry().is_zero() {
            InfiniteOrderCertificate::Unipotent
        } else {
            InfiniteOrderCertificate::SpectralRadius
        };
        Order::Infinite {
            certificate,
            exponent,
            char_poly: ints_to_json(&self.char_poly()),
        }
    }

    pub fn discriminant_action(&self) -> Result<DiscriminantAction> {
        let group = self.lattice.discriminant_group()?;
        Ok(self.discriminant_action_on(&group))
    }

    pub fn discriminant_action_on(&self, group: &DiscriminantGroup) -> DiscriminantAction {
        let mut identity = true;
        let mut negation = true;
        let mut witness = None;
        for y in group.generators() {
            let gy = self.apply_dual(y);
            let fixes = gy.sub(y).is_integral();
            let negates = gy.add(y).is_integral();
            identity &= fixes;
            negation &= negates;
            if !fixes && !negates && witness.is_none() {
                witness = Some((y.clone(), gy));
            }
        }
        let kind = if identity {
            ActionKind::Identity
        } else if negation {
            ActionKind::Negation
        } else {
            ActionKind::Other
        };
        if kind != ActionKind::Other {
            witness = None;
        } else if witness.is_none() {
            // Mixed: some generators fixed, others negated.
            let y = group.generators()[0].clone();
            let gy = self.apply_dual(&y);
            witness = Some((y, gy));
        }
        DiscriminantAction { kind, witness }
    }

    /// Induced endomorphism of `⊕ ℤ/dᵢ`: column `j` is the log of the image of generator `j`.
    pub fn induced_action(&self, group: &DiscriminantGroup) -> Vec<Vec<BigInt>> {
        let logs: Vec<Vec<BigInt>> = group
            .generators()
            .iter()
            .map(|y| group.log(&self.apply_dual(y)).expect("image is dual"))
            .collect();
        let r = logs.len();
        (0..r)
            .map(|i| (0..r).map(|j| logs[j][i].clone()).collect())
            .collect()
    }

    /// Re-expresses the isometry in the coordinates of `target`, related to
    /// the current lattice by `change`.
    pub fn to_basis(&self, target: &IntegerLattice, change: &BasisChange) -> Result<Isometry> {
        make_isometry(target, change.matrix_to_new(&self.matrix))
    }

    pub fn from_basis(&self, target: &IntegerLattice, change: &BasisChange) -> Result<Isometry> {
        make_isometry(target, change.matrix_to_old(&self.matrix))
    }
}

/// Composition of induced endomorphisms `a ∘ b` on `⊕ ℤ/dᵢ`.
pub fn compose_induced(group: &DiscriminantGroup, a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let d = group.invariant_factors();
    let r = d.len();
    (0..r)
        .map(|i| {
            (0..r)
                .map(|j| {
                    let s: BigInt = (0..r).map(|k| &a[i][k] * &b[k][j]).sum();
                    s.mod_floor(&d[i])
                })
                .collect()
        })
        .collect()
}

/// Faddeev–LeVerrier over the integers; every division is exact.
pub fn char_poly(a: &IntMatrix) -> Vec<BigInt> {
    let n = a.rows();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    let mut m = IntMatrix::zeros(n, n);
    for k in 1..=n {
        let mut next = a * &m;
        for i in 0..n {
            next[(i, i)] += &coeffs[n - k + 1];
        }
        m = next;
        let am = a * &m;
        coeffs[n - k] = -am.trace() / BigInt::from(k);
    }
    coeffs
}

fn euler_phi(mut d: u64) -> u64 {
    let mut result = d;
    let mut p = 2;
    while p * p <= d {
        if d.is_multiple_of(p) {
            while d.is_multiple_of(p) {
                d /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if d > 1 {
        result -= result / d;
    }
    result
}

/// `lcm{ d : φ(d) ≤ n }`. Since `φ(d) ≥ √(d/2)`, candidates stop at `2n²`.
pub fn finite_order_exponent(n: usize) -> u64 {
    let bound = 2 * (n as u64).pow(2) + 2;
    (1..=bound)
        .filter(|&d| euler_phi(d) <= n as u64)
        .fold(1u64, |acc, d| acc.lcm(&d))
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

#[derive(Serialize, Deserialize)]
struct IsometryRepr {
    basis: String,
    lattice: IntegerLattice,
    matrix: Vec<Vec<JsonInt>>,
}

impl Serialize for Isometry {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        IsometryRepr {
            basis: self.lattice.basis_tag(),
            lattice: self.lattice.clone(),
            matrix: self.matrix.to_rows().iter().map(|r| ints_to_json(r)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Isometry {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = IsometryRepr::deserialize(d)?;
        if repr.basis != repr.lattice.basis_tag() {
            return Err(serde::de::Error::custom(format!(
                "basis tag {} does not match lattice labels {}",
                repr.basis,
                repr.lattice.basis_tag()
            )));
        }
        let m = IntMatrix::from_rows(repr.matrix.into_iter().map(ints_from_json).collect())
            .map_err(serde::de::Error::custom)?;
        make_isometry(&repr.lattice, m).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn hlm() -> IntegerLattice {
        IntegerLattice::from_i64(&["H", "L", "M"], &[&[4, 1, 1], &[1, -2, 0], &[1, 0, -2]])
            .unwrap()
    }

    fn fev() -> IntegerLattice {
        IntegerLattice::from_i64(&["f", "e", "v"], &[&[0, 1, 0], &[1, 0, 0], &[0, 0, -20]])
            .unwrap()
    }

    fn iota1() -> Isometry {
        make_isometry(&fev(), IntMatrix::from_i64(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, -1]])).unwrap()
    }

    #[test]
    fn make_isometry_checks_gram() {
        assert!(make_isometry(&fev(), IntMatrix::identity(3)).is_ok());
        let err = make_isometry(&fev(), IntMatrix::from_i64(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 2]]))
            .unwrap_err();
        assert_eq!(
            err,
            Error::NotIsometry {
                row: 2,
                col: 2,
                expected: BigInt::from(-20),
                found: BigInt::from(-80)
            }
        );
        assert!(matches!(
            make_isometry(&fev(), IntMatrix::identity(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn reflection_in_v_is_iota1() {
        let l = fev();
        let v = l.vector(&[0, 0, 1]).unwrap();
        assert_eq!(reflection_in(&l, &v).unwrap(), iota1());
        let w = l.vector(&[10, 0, 1]).unwrap();
        let s = reflection_in(&l, &w).unwrap();
        assert_eq!(
            s.matrix(),
            &IntMatrix::from_i64(&[&[1, 10, -20], &[0, 1, 0], &[0, 1, -1]])
        );
    }

    #[test]
    fn reflection_errors() {
        let l = hlm();
        let f = l.vector(&[1, -1, 0]).unwrap();
        assert_eq!(reflection_in(&l, &f).unwrap_err(), Error::IsotropicReflection);
        // (H,H)=4: 2(x,H)/4 is not integral on L.
        let h = l.basis_vector(0);
        assert_eq!(
            reflection_in(&l, &h).unwrap_err(),
            Error::ReflectionNotIntegral { basis_index: 1 }
        );
    }

    #[test]
    fn composition_and_orders() {
        let l = fev();
        let phi1 = mw_translation(&l, 1).unwrap();
        let i1 = iota1();
        let i3 = compose(&phi1, &i1).unwrap();
        assert_eq!(
            i3.matrix(),
            &IntMatrix::from_i64(&[&[1, 10, -20], &[0, 1, 0], &[0, 1, -1]])
        );
        assert!(compose(&i3, &i3).unwrap().is_identity());
        assert_eq!(compose(&phi1, &Isometry::identity(&l)).unwrap(), phi1);
        assert_eq!(i1.order_of(100), Order::Finite(2));
        assert_eq!(Isometry::identity(&l).order_of(100), Order::Finite(1));
        match phi1.order_of(100) {
            Order::Infinite { certificate, exponent, .. } => {
                assert_eq!(certificate, InfiniteOrderCertificate::Unipotent);
                assert_eq!(exponent, 12);
            }
            other => panic!("unexpected {other:?}"),
        }
        let other = hlm();
        assert_eq!(
            compose(&Isometry::identity(&other), &phi1).unwrap_err(),
            Error::LatticeMismatch
        );
    }

    #[test]
    fn beyond_cap_and_spectral() {
        let l = IntegerLattice::from_i64(&["a", "b"], &[&[2, -1], &[-1, 2]]).unwrap();
        // Order-6 rotation of the A2 lattice.
        let r = make_isometry(&l, IntMatrix::from_i64(&[&[1, -1], &[1, 0]])).unwrap();
        assert_eq!(r.order_of(100), Order::Finite(6));
        assert_eq!(r.order_of(4), Order::BeyondCap { cap: 4, order: 6 });

        let u = IntegerLattice::from_i64(&["x", "y"], &[&[0, 1], &[1, 0]]).unwrap();
        let hyp = make_isometry(&u, IntMatrix::from_i64(&[&[2, 0], &[0, 1]]));
        assert!(hyp.is_err());
        let p = IntegerLattice::from_i64(&["h1", "h2"], &[&[4, 24], &[24, 4]]).unwrap();
        let g = make_isometry(&p, IntMatrix::from_i64(&[&[0, -1], &[1, 12]])).unwrap();
        assert!(matches!(
            g.order_of(50),
            Order::Infinite { certificate: InfiniteOrderCertificate::SpectralRadius, .. }
        ));
    }

    #[test]
    fn discriminant_actions() {
        let l = fev();
        let phi1 = mw_translation(&l, 1).unwrap();
        assert_eq!(phi1.discriminant_action().unwrap().kind, ActionKind::Identity);
        assert_eq!(
            Isometry::identity(&l).discriminant_action().unwrap().kind,
            ActionKind::Identity
        );
        assert_eq!(iota1().discriminant_action().unwrap().kind, ActionKind::Negation);

        let h = hlm();
        let swap =
            make_isometry(&h, IntMatrix::from_i64(&[&[1, 0, 0], &[0, 0, 1], &[0, 1, 0]])).unwrap();
        let act = swap.discriminant_action().unwrap();
        assert_eq!(act.kind, ActionKind::Other);
        assert!(act.witness.is_some());
    }

    #[test]
    fn translations_match_powers() {
        let l = fev();
        let phi1 = mw_translation(&l, 1).unwrap();
        for n in -5..=5 {
            assert_eq!(mw_translation(&l, n).unwrap(), phi1.pow(n));
        }
        assert!(mw_translation(&l, 0).unwrap().is_identity());
        assert!(mw_translation(&hlm(), 1).is_err());
    }

    #[test]
    fn char_poly_of_identity_and_translation() {
        let l = fev();
        let cp = mw_translation(&l, 1).unwrap().char_poly();
        // (t−1)³
        assert_eq!(cp, crate::matrix::ints(&[-1, 3, -3, 1]));
        assert_eq!(finite_order_exponent(2), 12);
        assert_eq!(finite_order_exponent(3), 12);
        assert_eq!(finite_order_exponent(4), 120);
    }

    #[test]
    fn basis_conversion_round_trip() {
        let h = hlm();
        let f = h.vector(&[1, -1, 0]).unwrap();
        let e = h.vector(&[1, -1, 1]).unwrap();
        let v = h.vector(&[-6, 7, -3]).unwrap();
        let (fev_l, change) = h
            .change_basis(vec!["f".into(), "e".into(), "v".into()], &[f, e, v.clone()])
            .unwrap();
        let s = reflection_in(&h, &v).unwrap();
        let s_fev = s.to_basis(&fev_l, &change).unwrap();
        assert_eq!(s_fev, iota1());
        assert_eq!(s_fev.from_basis(&h, &change).unwrap(), s);
    }

    #[test]
    fn json_round_trip() {
        let g = mw_translation(&fev(), 2).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.starts_with(r#"{"basis":"fev""#));
        let back: Isometry = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
    }

    proptest! {
        #[test]
        fn translations_form_a_one_parameter_group(n in -10i64..=10, m in -10i64..=10) {
            let l = fev();
            let prod = compose(&mw_translation(&l, n).unwrap(), &mw_translation(&l, m).unwrap()).unwrap();
            prop_assert_eq!(prod, mw_translation(&l, n + m).unwrap());
        }

        #[test]
        fn reflections_are_involutions(a in -4i64..5, b in -4i64..5, c in -3i64..4) {
            let l = hlm();
            let w = l.vector(&[a, b, c]).unwrap();
            let w2 = l.norm(&w).unwrap();
            prop_assume!(!w2.is_zero());
            if let Ok(s) = reflection_in(&l, &w) {
                prop_assert!(compose(&s, &s).unwrap().is_identity());
                prop_assert_eq!(s.determinant(), BigInt::from(-1));
                prop_assert_eq!(s.apply(&w), -&w);
                // (w²)x − (x,w)w spans the orthogonal complement of w.
                for i in 0..3 {
                    let x = l.basis_vector(i);
                    let u = &x.scale(&w2) - &w.scale(&l.inner_product(&x, &w).unwrap());
                    prop_assert_eq!(s.apply(&u), u);
                }
            }
        }

        #[test]
        fn discriminant_action_is_a_homomorphism(n in -3i64..4, m in -3i64..4, s in 0usize..2, t in 0usize..2) {
            let l = fev();
            let flip = [Isometry::identity(&l), iota1()];
            let g = compose(&mw_translation(&l, n).unwrap(), &flip[s]).unwrap();
            let h = compose(&flip[t], &mw_translation(&l, m).unwrap()).unwrap();
            let group = l.discriminant_group().unwrap();
            let gh = compose(&g, &h).unwrap();
            prop_assert_eq!(
                gh.induced_action(&group),
                compose_induced(&group, &g.induced_action(&group), &h.induced_action(&group))
            );
        }
    }
}
