//! Integral lattices given by a symmetric Gram matrix.
//!
//! Vectors are coordinate columns in the lattice basis. Dual vectors are
//! rational coordinate columns `y` with `gram · y` integral. The discriminant
//! group `L*/L` is read off the Smith normal form `U·A·V = D`: since
//! `A⁻¹ = V·D⁻¹·U` and `U` is unimodular, `L* = V·D⁻¹·ℤⁿ`, so column `i` of `V`
//! divided by `dᵢ` generates the `ℤ/dᵢ` summand.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::{ints_from_json, ints_to_json, JsonInt};
use crate::matrix::{common_denominator, IntMatrix, RatMatrix};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<JsonInt>", from = "Vec<JsonInt>")]
pub struct LatticeVector(Vec<BigInt>);

impl LatticeVector {
    pub fn new(coords: Vec<BigInt>) -> Self {
        LatticeVector(coords)
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        LatticeVector(coords.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero(rank: usize) -> Self {
        LatticeVector(vec![BigInt::zero(); rank])
    }

    pub fn unit(rank: usize, i: usize) -> Self {
        let mut v = Self::zero(rank);
        v.0[i] = BigInt::one();
        v
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<BigInt> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        LatticeVector(self.0.iter().map(|x| x * k).collect())
    }

    /// Content (gcd of coordinates); zero for the zero vector.
    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
    }

    pub fn to_rational(&self) -> Vec<BigRational> {
        self.0
            .iter()
            .map(|x| BigRational::from_integer(x.clone()))
            .collect()
    }
}

impl From<Vec<JsonInt>> for LatticeVector {
    fn from(v: Vec<JsonInt>) -> Self {
        LatticeVector(ints_from_json(v))
    }
}

impl From<LatticeVector> for Vec<JsonInt> {
    fn from(v: LatticeVector) -> Self {
        ints_to_json(&v.0)
    }
}

impl fmt::Debug for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl<'a> Add<&'a LatticeVector> for &'a LatticeVector {
    type Output = LatticeVector;
    fn add(self, rhs: &'a LatticeVector) -> LatticeVector {
        assert_eq!(self.len(), rhs.len());
        LatticeVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl<'a> Sub<&'a LatticeVector> for &'a LatticeVector {
    type Output = LatticeVector;
    fn sub(self, rhs: &'a LatticeVector) -> LatticeVector {
        assert_eq!(self.len(), rhs.len());
        LatticeVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        LatticeVector(self.0.iter().map(|x| -x).collect())
    }
}

/// An element of `L ⊗ ℚ` that pairs integrally with `L`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DualVector(Vec<BigRational>);

impl DualVector {
    pub fn coords(&self) -> &[BigRational] {
        &self.0
    }

    /// Order modulo the lattice: the lcm of the coordinate denominators.
    pub fn order(&self) -> BigInt {
        common_denominator(&self.0)
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(BigRational::is_integer)
    }

    pub fn scale(&self, k: &BigInt) -> DualVector {
        let k = BigRational::from_integer(k.clone());
        DualVector(self.0.iter().map(|x| x * &k).collect())
    }

    pub fn add(&self, other: &DualVector) -> DualVector {
        DualVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &DualVector) -> DualVector {
        DualVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl fmt::Debug for DualVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(crate::json::format_rational).collect();
        write!(f, "({})", parts.join(", "))
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct IntegerLattice {
    labels: Vec<String>,
    gram: IntMatrix,
}

#[derive(Serialize, Deserialize)]
struct LatticeRepr {
    labels: Vec<String>,
    gram: Vec<Vec<JsonInt>>,
}

impl Serialize for IntegerLattice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LatticeRepr {
            labels: self.labels.clone(),
            gram: self.gram.to_rows().iter().map(|r| ints_to_json(r)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntegerLattice {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = LatticeRepr::deserialize(d)?;
        let gram = IntMatrix::from_rows(repr.gram.into_iter().map(ints_from_json).collect())
            .map_err(serde::de::Error::custom)?;
        IntegerLattice::new(repr.labels, gram).map_err(serde::de::Error::custom)
    }
}

impl fmt::Debug for IntegerLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntegerLattice<{}> {}", self.basis_tag(), self.gram)
    }
}

impl IntegerLattice {
    /// Even, non-degenerate lattice.
    pub fn new(labels: Vec<String>, gram: IntMatrix) -> Result<Self> {
        let lattice = Self::new_allow_odd(labels, gram)?;
        for i in 0..lattice.rank() {
            if lattice.gram[(i, i)].is_odd() {
                return Err(Error::OddDiagonal { index: i });
            }
        }
        Ok(lattice)
    }

    /// Non-degenerate lattice with no parity requirement.
    pub fn new_allow_odd(labels: Vec<String>, gram: IntMatrix) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::DimensionMismatch {
                expected: gram.rows(),
                found: gram.cols(),
            });
        }
        let n = gram.rows();
        if labels.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: labels.len(),
            });
        }
        for r in 0..n {
            for c in r + 1..n {
                if gram[(r, c)] != gram[(c, r)] {
                    return Err(Error::NotSymmetric { row: r, col: c });
                }
            }
        }
        if gram.determinant().is_zero() {
            return Err(Error::Degenerate);
        }
        Ok(IntegerLattice { labels, gram })
    }

    pub fn from_i64(labels: &[&str], rows: &[&[i64]]) -> Result<Self> {
        Self::new(
            labels.iter().map(|s| s.to_string()).collect(),
            IntMatrix::from_i64(rows),
        )
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Concatenated basis labels, e.g. `"HLM"`.
    pub fn basis_tag(&self) -> String {
        self.labels.concat()
    }

    pub fn basis_vector(&self, i: usize) -> LatticeVector {
        LatticeVector::unit(self.rank(), i)
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                found: n,
            });
        }
        Ok(())
    }

    pub fn vector(&self, coords: &[i64]) -> Result<LatticeVector> {
        self.check_len(coords.len())?;
        Ok(LatticeVector::from_i64(coords))
    }

    pub fn inner_product(&self, x: &LatticeVector, y: &LatticeVector) -> Result<BigInt> {
        self.check_len(x.len())?;
        self.check_len(y.len())?;
        Ok(self.pair(x, y))
    }

    /// Unchecked inner product for vectors already known to have the right length.
    pub(crate) fn pair(&self, x: &LatticeVector, y: &LatticeVector) -> BigInt {
        let gy = self.gram.mul_vec(y.coords());
        x.coords().iter().zip(&gy).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self, x: &LatticeVector) -> Result<BigInt> {
        self.inner_product(x, x)
    }

    /// The linear form `y ↦ (x, y)` as a coefficient row, i.e. `gram · x`.
    pub fn pairing_form(&self, x: &LatticeVector) -> Vec<BigInt> {
        self.gram.mul_vec(x.coords())
    }

    pub fn determinant(&self) -> BigInt {
        self.gram.determinant()
    }

    /// Rational inner product between arbitrary rational coordinate vectors.
    pub fn pair_rational(&self, x: &[BigRational], y: &[BigRational]) -> BigRational {
        let g = self.gram.to_rational();
        let gy = g.mul_vec(y);
        x.iter().zip(&gy).map(|(a, b)| a * b).sum()
    }

    pub fn dual_vector(&self, coords: Vec<BigRational>) -> Result<DualVector> {
        self.check_len(coords.len())?;
        let pairings = self.gram.to_rational().mul_vec(&coords);
        if let Some(i) = pairings.iter().position(|p| !p.is_integer()) {
            return Err(Error::Precondition(format!(
                "vector pairs non-integrally with basis vector {}",
                self.labels[i]
            )));
        }
        Ok(DualVector(coords))
    }

    /// Renders an integer vector as a signed combination of basis labels,
    /// e.g. `3H-3L+M`.
    pub fn render(&self, x: &LatticeVector) -> String {
        render_combination(&self.labels, x.coords())
    }

    pub fn discriminant_group(&self) -> Result<DiscriminantGroup> {
        DiscriminantGroup::of(self)
    }

    /// Re-expresses the lattice in a new basis given in current coordinates.
    pub fn change_basis(
        &self,
        labels: Vec<String>,
        new_basis: &[LatticeVector],
    ) -> Result<(IntegerLattice, BasisChange)> {
        self.check_len(new_basis.len())?;
        for b in new_basis {
            self.check_len(b.len())?;
        }
        let to_old = IntMatrix::from_columns(
            &new_basis
                .iter()
                .map(|b| b.coords().to_vec())
                .collect::<Vec<_>>(),
        )?;
        let det = to_old.determinant();
        if det.is_zero() {
            return Err(Error::NotFullRank);
        }
        if !det.abs().is_one() {
            return Err(Error::ProperSublattice { index: det.abs() });
        }
        let to_new = to_old
            .unimodular_inverse()
            .expect("determinant ±1 implies an integral inverse");
        let gram = &(&to_old.transpose() * &self.gram) * &to_old;
        let lattice = if self.gram_is_even() {
            IntegerLattice::new(labels, gram)?
        } else {
            IntegerLattice::new_allow_odd(labels, gram)?
        };
        Ok((lattice, BasisChange { to_old, to_new }))
    }

    fn gram_is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram[(i, i)].is_even())
    }

    /// All nonzero `x` with `|xᵢ| ≤ box_size`, `(x, cₖ) = tₖ` for every
    /// constraint and `(x²) = norm`, in ascending lexicographic order.
    pub fn solve_norm_system(
        &self,
        constraints: &[(LatticeVector, BigInt)],
        norm: &BigInt,
        box_size: i64,
    ) -> Result<Vec<LatticeVector>> {
        if box_size < 1 {
            return Err(Error::Precondition(format!(
                "box must be at least 1, got {box_size}"
            )));
        }
        for (c, _) in constraints {
            self.check_len(c.len())?;
        }
        let n = self.rank();
        let to_i128 = |x: &BigInt| {
            x.to_i128().ok_or_else(|| {
                Error::Precondition("entries exceed the enumeration range".to_string())
            })
        };
        let gram: Vec<Vec<i128>> = (0..n)
            .map(|r| (0..n).map(|c| to_i128(&self.gram[(r, c)])).collect())
            .collect::<Result<_>>()?;
        let forms: Vec<(Vec<i128>, i128)> = constraints
            .iter()
            .map(|(c, t)| {
                let form = self
                    .pairing_form(c)
                    .iter()
                    .map(to_i128)
                    .collect::<Result<Vec<_>>>()?;
                Ok((form, to_i128(t)?))
            })
            .collect::<Result<_>>()?;
        let target = to_i128(norm)?;
        let b = box_size as i128;

        let mut found: Vec<Vec<i128>> = (-b..=b)
            .into_par_iter()
            .flat_map_iter(|x0| {
                let mut out = Vec::new();
                let mut x = vec![-b; n];
                x[0] = x0;
                'odometer: loop {
                    let linear_ok = forms
                        .iter()
                        .all(|(f, t)| f.iter().zip(&x).map(|(a, b)| a * b).sum::<i128>() == *t);
                    if linear_ok && x.iter().any(|&c| c != 0) {
                        let mut q = 0i128;
                        for i in 0..n {
                            for j in 0..n {
                                q += gram[i][j] * x[i] * x[j];
                            }
                        }
                        if q == target {
                            out.push(x.clone());
                        }
                    }
                    let mut k = n;
                    loop {
                        if k == 1 {
                            break 'odometer;
                        }
                        k -= 1;
                        if x[k] < b {
                            x[k] += 1;
                            break;
                        }
                        x[k] = -b;
                    }
                }
                out
            })
            .collect();
        found.sort();
        Ok(found
            .into_iter()
            .map(|v| LatticeVector(v.into_iter().map(BigInt::from).collect()))
            .collect())
    }

    /// Coordinate bounds for the lattice points `x` with
    /// `2(x,a)²/(a²) − (x²) ≤ bound`.
    ///
    /// For a hyperbolic lattice and `(a²) > 0` the left side is a positive
    /// definite form (it equals `(x_a²) − (x_⊥²)` after splitting off the
    /// `a`-component), so the region is an ellipsoid and `|xᵢ|² ≤ bound · (P⁻¹)ᵢᵢ`.
    pub fn anchor_box(&self, anchor: &LatticeVector, bound: &BigRational) -> Result<Vec<BigInt>> {
        self.check_len(anchor.len())?;
        let a2 = self.pair(anchor, anchor);
        if !a2.is_positive() {
            return Err(Error::Precondition("anchor must have positive square".into()));
        }
        let n = self.rank();
        let form: Vec<BigRational> = self
            .pairing_form(anchor)
            .into_iter()
            .map(BigRational::from_integer)
            .collect();
        let a2 = BigRational::from_integer(a2);
        let two = BigRational::from_integer(2.into());
        let mut p = RatMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                p[(i, j)] = &two * &form[i] * &form[j] / &a2
                    - BigRational::from_integer(self.gram[(i, j)].clone());
            }
        }
        // Sylvester's criterion.
        for k in 1..=n {
            let mut minor = RatMatrix::zeros(k, k);
            for i in 0..k {
                for j in 0..k {
                    minor[(i, j)] = p[(i, j)].clone();
                }
            }
            if !rational_det(&minor).is_positive() {
                return Err(Error::Precondition(
                    "lattice is not hyperbolic with respect to the anchor".into(),
                ));
            }
        }
        let inv = p.inverse().expect("positive definite");
        Ok((0..n)
            .map(|i| floor_sqrt_rational(&(bound * &inv[(i, i)])))
            .collect())
    }
}

fn rational_det(m: &RatMatrix) -> BigRational {
    let n = m.rows();
    let mut a = m.clone();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[(r, col)].is_zero()) else {
            return BigRational::zero();
        };
        if pivot != col {
            a.swap_rows(col, pivot);
            det = -det;
        }
        let p = a[(col, col)].clone();
        det *= &p;
        for r in col + 1..n {
            let factor = &a[(r, col)] / &p;
            for c in col..n {
                let t = &factor * &a[(col, c)];
                a[(r, c)] = &a[(r, c)] - t;
            }
        }
    }
    det
}

/// `⌊√q⌋` for a non-negative rational.
pub fn floor_sqrt_rational(q: &BigRational) -> BigInt {
    if !q.is_positive() {
        return BigInt::zero();
    }
    q.floor().to_integer().sqrt()
}

pub(crate) fn render_combination(labels: &[String], coords: &[BigInt]) -> String {
    let mut out = String::new();
    for (label, c) in labels.iter().zip(coords) {
        if c.is_zero() {
            continue;
        }
        let negative = c.is_negative();
        let mag = c.abs();
        if negative {
            out.push('-');
        } else if !out.is_empty() {
            out.push('+');
        }
        if !mag.is_one() {
            out.push_str(&mag.to_string());
        }
        out.push_str(label);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Change of basis between two coordinate systems on the same lattice.
/// `to_old` has the new basis vectors as columns (in old coordinates).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisChange {
    pub to_old: IntMatrix,
    pub to_new: IntMatrix,
}

impl BasisChange {
    pub fn new_coords(&self, old: &LatticeVector) -> LatticeVector {
        LatticeVector(self.to_new.mul_vec(old.coords()))
    }

    pub fn old_coords(&self, new: &LatticeVector) -> LatticeVector {
        LatticeVector(self.to_old.mul_vec(new.coords()))
    }

    /// Conjugates a matrix acting on old coordinates to one acting on new coordinates.
    pub fn matrix_to_new(&self, old: &IntMatrix) -> IntMatrix {
        &(&self.to_new * old) * &self.to_old
    }

    pub fn matrix_to_old(&self, new: &IntMatrix) -> IntMatrix {
        &(&self.to_old * new) * &self.to_new
    }
}

/// Smith normal form `U·M·V = D` with `U`, `V` unimodular.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d[(i, i)].clone())
            .collect()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        loop {
            let pivot = (t..rows)
                .flat_map(|r| (t..cols).map(move |c| (r, c)))
                .filter(|&(r, c)| !a[(r, c)].is_zero())
                .min_by_key(|&(r, c)| a[(r, c)].abs());
            let Some((pr, pc)) = pivot else {
                return SmithForm { u, d: a, v };
            };
            a.swap_rows(t, pr);
            u.swap_rows(t, pr);
            a.swap_cols(t, pc);
            v.swap_cols(t, pc);

            let mut clean = true;
            for r in t + 1..rows {
                let q = a[(r, t)].div_floor(&a[(t, t)]);
                if !q.is_zero() {
                    add_row_multiple(&mut a, r, t, &-&q);
                    add_row_multiple(&mut u, r, t, &-&q);
                }
                clean &= a[(r, t)].is_zero();
            }
            for c in t + 1..cols {
                let q = a[(t, c)].div_floor(&a[(t, t)]);
                if !q.is_zero() {
                    add_col_multiple(&mut a, c, t, &-&q);
                    add_col_multiple(&mut v, c, t, &-&q);
                }
                clean &= a[(t, c)].is_zero();
            }
            if !clean {
                continue;
            }
            let offender = (t + 1..rows)
                .flat_map(|r| (t + 1..cols).map(move |c| (r, c)))
                .find(|&(r, c)| !a[(r, c)].is_multiple_of(&a[(t, t)]));
            match offender {
                Some((r, _)) => {
                    add_row_multiple(&mut a, t, r, &BigInt::one());
                    add_row_multiple(&mut u, t, r, &BigInt::one());
                }
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            for c in 0..cols {
                a[(t, c)] = -&a[(t, c)];
            }
            for c in 0..rows {
                u[(t, c)] = -&u[(t, c)];
            }
        }
    }
    SmithForm { u, d: a, v }
}

/// row[dst] += k · row[src]
fn add_row_multiple(m: &mut IntMatrix, dst: usize, src: usize, k: &BigInt) {
    for c in 0..m.cols() {
        let t = k * &m[(src, c)];
        m[(dst, c)] += t;
    }
}

/// col[dst] += k · col[src]
fn add_col_multiple(m: &mut IntMatrix, dst: usize, src: usize, k: &BigInt) {
    for r in 0..m.rows() {
        let t = k * &m[(r, src)];
        m[(r, dst)] += t;
    }
}

/// `L*/L` as a product of cyclic groups `ℤ/d₁ ⊕ … ⊕ ℤ/dₖ`, `d₁ | d₂ | …`.
#[derive(Clone, Debug)]
pub struct DiscriminantGroup {
    invariant_factors: Vec<BigInt>,
    generators: Vec<DualVector>,
    /// Rows of `V⁻¹` for the nontrivial summands, used for discrete logs.
    log_rows: Vec<Vec<BigInt>>,
    gram: IntMatrix,
}

impl DiscriminantGroup {
    fn of(lattice: &IntegerLattice) -> Result<Self> {
        let snf = smith_normal_form(lattice.gram());
        let diag = snf.diagonal();
        if diag.iter().any(Zero::is_zero) {
            return Err(Error::Degenerate);
        }
        let v_inv = snf
            .v
            .unimodular_inverse()
            .expect("Smith transforms are unimodular");
        let mut invariant_factors = Vec::new();
        let mut generators = Vec::new();
        let mut log_rows = Vec::new();
        for (i, d) in diag.iter().enumerate() {
            if d.is_one() {
                continue;
            }
            let coords = snf
                .v
                .column(i)
                .into_iter()
                .map(|x| BigRational::new(x, d.clone()))
                .collect();
            invariant_factors.push(d.clone());
            generators.push(DualVector(coords));
            log_rows.push(v_inv.row(i));
        }
        Ok(DiscriminantGroup {
            invariant_factors,
            generators,
            log_rows,
            gram: lattice.gram().clone(),
        })
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    pub fn generators(&self) -> &[DualVector] {
        &self.generators
    }

    pub fn order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    pub fn is_dual(&self, y: &DualVector) -> bool {
        self.gram
            .to_rational()
            .mul_vec(y.coords())
            .iter()
            .all(BigRational::is_integer)
    }

    /// Coefficients `kᵢ ∈ [0, dᵢ)` with `y ≡ Σ kᵢ gᵢ (mod L)`.
    pub fn log(&self, y: &DualVector) -> Result<Vec<BigInt>> {
        if !self.is_dual(y) {
            return Err(Error::Precondition("vector is not in the dual lattice".into()));
        }
        Ok(self
            .log_rows
            .iter()
            .zip(&self.invariant_factors)
            .map(|(row, d)| {
                let t: BigRational = row
                    .iter()
                    .zip(y.coords())
                    .map(|(a, b)| BigRational::from_integer(a.clone()) * b)
                    .sum();
                let z = (t * BigRational::from_integer(d.clone())).to_integer();
                z.mod_floor(d)
            })
            .collect())
    }

    /// Order of the subgroup generated by the given dual vectors.
    pub fn subgroup_order(&self, elements: &[DualVector]) -> Result<BigInt> {
        let r = self.invariant_factors.len();
        if r == 0 {
            return Ok(BigInt::one());
        }
        let mut columns: Vec<Vec<BigInt>> = Vec::new();
        for y in elements {
            columns.push(self.log(y)?);
        }
        for (i, d) in self.invariant_factors.iter().enumerate() {
            let mut e = vec![BigInt::zero(); r];
            e[i] = d.clone();
            columns.push(e);
        }
        let span = IntMatrix::from_columns(&columns)?;
        let index: BigInt = smith_normal_form(&span).diagonal().iter().product();
        Ok(self.order() / index)
    }

    /// True iff the elements generate the whole group.
    pub fn generated_by(&self, elements: &[DualVector]) -> Result<bool> {
        Ok(self.subgroup_order(elements)? == self.order())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn quartic() -> IntegerLattice {
        IntegerLattice::from_i64(&["H", "L", "M"], &[&[4, 1, 1], &[1, -2, 0], &[1, 0, -2]])
            .unwrap()
    }

    fn pell6() -> IntegerLattice {
        IntegerLattice::from_i64(&["h1", "h2"], &[&[4, 24], &[24, 4]]).unwrap()
    }

    #[test]
    fn inner_products() {
        let l = quartic();
        let h = l.basis_vector(0);
        assert_eq!(l.inner_product(&h, &h).unwrap(), BigInt::from(4));
        let zero = LatticeVector::zero(3);
        let x = l.vector(&[3, -7, 2]).unwrap();
        assert!(l.inner_product(&x, &zero).unwrap().is_zero());
        let v = l.vector(&[-6, 7, -3]).unwrap();
        assert_eq!(l.norm(&v).unwrap(), BigInt::from(-20));
        assert_eq!(
            l.inner_product(&x, &LatticeVector::from_i64(&[1, 2])),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        );
    }

    #[test]
    fn determinants() {
        // Signature (1,2) forces a positive determinant.
        assert_eq!(quartic().determinant(), BigInt::from(20));
        let id = IntegerLattice::new_allow_odd(
            vec!["a".into(), "b".into(), "c".into()],
            IntMatrix::identity(3),
        )
        .unwrap();
        assert_eq!(id.determinant(), BigInt::one());
        assert_eq!(pell6().determinant(), BigInt::from(16 - 576));
    }

    #[test]
    fn construction_rejects_bad_grams() {
        let err = IntegerLattice::from_i64(&["a", "b"], &[&[2, 1], &[0, 2]]).unwrap_err();
        assert_eq!(err, Error::NotSymmetric { row: 0, col: 1 });
        let err = IntegerLattice::from_i64(&["a", "b"], &[&[1, 0], &[0, 2]]).unwrap_err();
        assert_eq!(err, Error::OddDiagonal { index: 0 });
        let err = IntegerLattice::from_i64(&["a", "b"], &[&[2, 2], &[2, 2]]).unwrap_err();
        assert_eq!(err, Error::Degenerate);
    }

    #[test]
    fn smith_examples() {
        let id = IntMatrix::identity(3);
        let s = smith_normal_form(&id);
        assert!(s.u.is_identity() && s.v.is_identity() && s.d.is_identity());

        let s = smith_normal_form(&IntMatrix::from_i64(&[&[4, 24], &[24, 4]]));
        assert_eq!(s.diagonal(), vec![BigInt::from(4), BigInt::from(140)]);

        let s = smith_normal_form(quartic().gram());
        assert_eq!(
            s.diagonal(),
            vec![BigInt::one(), BigInt::one(), BigInt::from(20)]
        );
    }

    #[test]
    fn quartic_discriminant_is_cyclic_of_order_20() {
        let l = quartic();
        let g = l.discriminant_group().unwrap();
        assert_eq!(g.invariant_factors(), &[BigInt::from(20)]);
        assert_eq!(g.generators()[0].order(), BigInt::from(20));
        let v_over_20 = l
            .dual_vector(
                [-6, 7, -3]
                    .iter()
                    .map(|&x| BigRational::new(x.into(), 20.into()))
                    .collect(),
            )
            .unwrap();
        assert!(g.generated_by(&[v_over_20]).unwrap());
    }

    #[test]
    fn unimodular_lattice_has_trivial_discriminant() {
        let u = IntegerLattice::from_i64(&["e", "f"], &[&[0, 1], &[1, 0]]).unwrap();
        let g = u.discriminant_group().unwrap();
        assert!(g.is_trivial());
        assert_eq!(g.order(), BigInt::one());
    }

    #[test]
    fn change_basis_to_fev() {
        let l = quartic();
        let f = l.vector(&[1, -1, 0]).unwrap();
        let e = l.vector(&[1, -1, 1]).unwrap();
        let v = l.vector(&[-6, 7, -3]).unwrap();
        let (fev, change) = l
            .change_basis(vec!["f".into(), "e".into(), "v".into()], &[f, e, v])
            .unwrap();
        assert_eq!(
            fev.gram(),
            &IntMatrix::from_i64(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, -20]])
        );
        let h = l.basis_vector(0);
        assert_eq!(change.new_coords(&h), LatticeVector::from_i64(&[4, 3, 1]));

        let (same, ident) = l
            .change_basis(
                l.labels().to_vec(),
                &[l.basis_vector(0), l.basis_vector(1), l.basis_vector(2)],
            )
            .unwrap();
        assert_eq!(same.gram(), l.gram());
        assert!(ident.to_old.is_identity());
    }

    #[test]
    fn change_basis_distinguishes_failure_modes() {
        let l = quartic();
        let h = l.basis_vector(0);
        let m = l.basis_vector(2);
        let err = l
            .change_basis(vec!["a".into(), "b".into(), "c".into()], &[h.clone(), h.clone(), m.clone()])
            .unwrap_err();
        assert_eq!(err, Error::NotFullRank);
        let two_l = l.vector(&[0, 2, 0]).unwrap();
        let err = l
            .change_basis(vec!["a".into(), "b".into(), "c".into()], &[h, two_l, m])
            .unwrap_err();
        assert_eq!(err, Error::ProperSublattice { index: BigInt::from(2) });
    }

    #[test]
    fn degree_one_minus_two_classes() {
        let l = quartic();
        let h = l.basis_vector(0);
        let sols = l
            .solve_norm_system(&[(h, BigInt::one())], &BigInt::from(-2), 10)
            .unwrap();
        assert_eq!(
            sols,
            vec![LatticeVector::from_i64(&[0, 0, 1]), LatticeVector::from_i64(&[0, 1, 0])]
        );
    }

    #[test]
    fn no_minus_two_classes_in_fibers() {
        let l = quartic();
        let f = l.vector(&[1, -1, 0]).unwrap();
        let m = l.basis_vector(2);
        let sols = l
            .solve_norm_system(
                &[(f, BigInt::zero()), (m, BigInt::zero())],
                &BigInt::from(-2),
                10,
            )
            .unwrap();
        assert!(sols.is_empty());
    }

    #[test]
    fn zero_vector_is_excluded() {
        let l = quartic();
        let h = l.basis_vector(0);
        // (x, H) = 0 with (x²) = 0: the orthogonal complement of H is negative definite.
        let sols = l
            .solve_norm_system(&[(h, BigInt::zero())], &BigInt::zero(), 6)
            .unwrap();
        assert!(sols.is_empty());
        assert!(l.solve_norm_system(&[], &BigInt::zero(), 0).is_err());
    }

    #[test]
    fn anchor_box_contains_isotropic_degree_two_classes() {
        let l = quartic();
        let a = l.vector(&[2, -1, -1]).unwrap();
        // (E,A) = 2 and (E²) = 0 gives P(E) = 2·4/4 = 2.
        let bounds = l
            .anchor_box(&a, &BigRational::from_integer(2.into()))
            .unwrap();
        let f = [1i64, -1, 0];
        for (b, x) in bounds.iter().zip(f) {
            assert!(BigInt::from(x).abs() <= *b);
        }
    }

    #[test]
    fn lattice_json_round_trip() {
        let l = quartic();
        let s = serde_json::to_string(&l).unwrap();
        assert_eq!(s, r#"{"labels":["H","L","M"],"gram":[[4,1,1],[1,-2,0],[1,0,-2]]}"#);
        let back: IntegerLattice = serde_json::from_str(&s).unwrap();
        assert_eq!(back, l);
        let bad = r#"{"labels":["a","b"],"gram":[[1,0],[0,2]]}"#;
        assert!(serde_json::from_str::<IntegerLattice>(bad).is_err());
    }

    #[test]
    fn rendering() {
        let l = quartic();
        assert_eq!(l.render(&l.vector(&[3, -3, 1]).unwrap()), "3H-3L+M");
        assert_eq!(l.render(&l.vector(&[0, 0, 0]).unwrap()), "0");
        assert_eq!(l.render(&l.vector(&[-1, 0, 2]).unwrap()), "-H+2M");
    }

    fn small_matrix() -> impl Strategy<Value = IntMatrix> {
        (1usize..4, 1usize..4).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-30i64..30, r * c).prop_map(move |xs| {
                let rows: Vec<Vec<BigInt>> =
                    xs.chunks(c).map(|ch| ch.iter().map(|&x| x.into()).collect()).collect();
                IntMatrix::from_rows(rows).unwrap()
            })
        })
    }

    fn even_gram() -> impl Strategy<Value = IntMatrix> {
        (1usize..4)
            .prop_flat_map(|n| proptest::collection::vec(-9i64..9, n * n).prop_map(move |xs| (n, xs)))
            .prop_map(|(n, xs)| {
                let mut m = IntMatrix::zeros(n, n);
                for i in 0..n {
                    for j in 0..n {
                        let (a, b) = (i.min(j), i.max(j));
                        let x = xs[a * n + b];
                        m[(i, j)] = BigInt::from(if i == j { 2 * x } else { x });
                    }
                }
                m
            })
    }

    proptest! {
        #[test]
        fn smith_form_is_valid(m in small_matrix()) {
            let s = smith_normal_form(&m);
            prop_assert_eq!(&(&s.u * &m) * &s.v, s.d.clone());
            prop_assert!(s.u.determinant().abs().is_one());
            prop_assert!(s.v.determinant().abs().is_one());
            let diag = s.diagonal();
            for r in 0..s.d.rows() {
                for c in 0..s.d.cols() {
                    if r != c { prop_assert!(s.d[(r, c)].is_zero()); }
                }
            }
            for w in diag.windows(2) {
                prop_assert!(!w[0].is_negative());
                if w[0].is_zero() { prop_assert!(w[1].is_zero()); }
                else { prop_assert!(w[1].is_multiple_of(&w[0])); }
            }
        }

        #[test]
        fn discriminant_group_invariants(gram in even_gram()) {
            prop_assume!(!gram.determinant().is_zero());
            let n = gram.rows();
            let l = IntegerLattice::new((0..n).map(|i| format!("b{i}")).collect(), gram).unwrap();
            let g = l.discriminant_group().unwrap();
            prop_assert_eq!(g.order(), l.determinant().abs());
            for (y, d) in g.generators().iter().zip(g.invariant_factors()) {
                prop_assert!(g.is_dual(y));
                prop_assert_eq!(&y.order(), d);
                prop_assert!(y.scale(d).is_integral());
                let mut p = BigInt::from(2);
                let mut rest = d.clone();
                while rest > BigInt::one() {
                    if rest.is_multiple_of(&p) {
                        prop_assert!(!y.scale(&(d / &p)).is_integral());
                        while rest.is_multiple_of(&p) { rest /= &p; }
                    }
                    p += 1;
                }
            }
            prop_assert!(g.generated_by(g.generators()).unwrap());
        }

        #[test]
        fn change_basis_round_trip(a in -3i64..4, b in -3i64..4, c in -3i64..4) {
            // Upper unitriangular change keeps the lattice.
            let l = quartic();
            let basis = [
                l.vector(&[1, 0, 0]).unwrap(),
                l.vector(&[a, 1, 0]).unwrap(),
                l.vector(&[b, c, 1]).unwrap(),
            ];
            let (m, change) = l.change_basis(vec!["x".into(), "y".into(), "z".into()], &basis).unwrap();
            let back: Vec<LatticeVector> = (0..3).map(|i| change.new_coords(&l.basis_vector(i))).collect();
            let (orig, _) = m.change_basis(l.labels().to_vec(), &back).unwrap();
            prop_assert_eq!(orig.gram(), l.gram());
        }

        #[test]
        fn doubling_the_box_keeps_solutions(norm in -6i64..7, t in -2i64..3, bx in 1i64..5) {
            let l = quartic();
            let h = l.basis_vector(0);
            let small = l.solve_norm_system(&[(h.clone(), t.into())], &norm.into(), bx).unwrap();
            let large = l.solve_norm_system(&[(h, t.into())], &norm.into(), 2 * bx).unwrap();
            for s in &small {
                prop_assert!(large.contains(s));
            }
        }
    }
}
