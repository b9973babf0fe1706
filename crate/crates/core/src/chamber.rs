//! Chambers in the positive cone of a hyperbolic lattice.
//!
//! A chamber is cut out by reflective walls `ℓᵢ(x) = σᵢ·(x, wᵢ) ≥ 0` together
//! with optional non-reflective faces, all oriented so the anchor is strictly
//! inside. `Sᵢ` denotes the part of the closed positive cone (minus the origin)
//! where `ℓᵢ < 0`.
//!
//! Ping-pong containment `ιᵢ(Sⱼ) ⊂ Sᵢ` is equivalent to `Sⱼ ⊂ {ℓᵢ > 0}`
//! because `sᵢ` negates `ℓᵢ`. In rank 3 the projectivized closed cone is a
//! disk and `{ℓ = 0}` meets it in a chord with two isotropic endpoints. If
//! `ℓⱼ ≥ 0` at both endpoints of chord `i`, the convex connected set `Sⱼ`
//! misses `{ℓᵢ = 0}`, so `ℓᵢ` has constant sign on it. If moreover `ℓᵢ ≥ 0`
//! at both endpoints of chord `j` and is positive at one of them, points of
//! `Sⱼ` next to that chord have `ℓᵢ > 0`, hence all of `Sⱼ` does. Both checks
//! are exact sign evaluations at four isotropic rays.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::isometry::{reflection_in, Isometry};
use crate::lattice::{smith_normal_form, IntegerLattice, LatticeVector};
use crate::matrix::{common_denominator, IntMatrix};
use crate::quad::{is_perfect_square, QuadExt};

pub fn in_positive_cone(lattice: &IntegerLattice, anchor: &LatticeVector, x: &LatticeVector) -> bool {
    lattice.pair(x, x).is_positive() && lattice.pair(x, anchor).is_positive()
}

#[derive(Clone, Debug)]
pub struct Wall {
    pub vector: LatticeVector,
    /// `±1`, chosen so that `sign · (anchor, vector) > 0`.
    pub sign: i8,
    pub reflection: Isometry,
}

impl Wall {
    /// `ℓ(x) = sign · (x, w)`.
    pub fn value(&self, lattice: &IntegerLattice, x: &LatticeVector) -> BigInt {
        let p = lattice.pair(x, &self.vector);
        if self.sign < 0 {
            -p
        } else {
            p
        }
    }

    /// Coefficient row of `ℓ`.
    pub fn form(&self, lattice: &IntegerLattice) -> Vec<BigInt> {
        let f = lattice.pairing_form(&self.vector);
        if self.sign < 0 {
            f.into_iter().map(|x| -x).collect()
        } else {
            f
        }
    }
}

#[derive(Clone, Debug)]
pub struct Chamber {
    lattice: IntegerLattice,
    anchor: LatticeVector,
    walls: Vec<Wall>,
    /// Non-reflective faces as primitive coefficient rows, `≥ 0` on the chamber.
    faces: Vec<Vec<BigInt>>,
    extra_rays: Vec<LatticeVector>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionTrace {
    /// Wall indices in the order their reflections were applied.
    pub word: Vec<usize>,
    pub result: LatticeVector,
    /// Whether `result` also satisfies the non-reflective faces.
    pub in_chamber: bool,
}

pub const DEFAULT_REDUCTION_CAP: usize = 10_000;

impl Chamber {
    pub fn new(
        lattice: &IntegerLattice,
        anchor: &LatticeVector,
        walls: &[LatticeVector],
        faces: Vec<Vec<BigInt>>,
    ) -> Result<Chamber> {
        let a2 = lattice.norm(anchor)?;
        if !a2.is_positive() {
            return Err(Error::Precondition("anchor must have positive square".into()));
        }
        let mut built = Vec::with_capacity(walls.len());
        for w in walls {
            let p = lattice.inner_product(anchor, w)?;
            if p.is_zero() {
                return Err(Error::Precondition(format!(
                    "wall {} contains the anchor",
                    lattice.render(w)
                )));
            }
            built.push(Wall {
                vector: w.clone(),
                sign: if p.is_positive() { 1 } else { -1 },
                reflection: reflection_in(lattice, w)?,
            });
        }
        for f in &faces {
            if f.len() != lattice.rank() {
                return Err(Error::DimensionMismatch {
                    expected: lattice.rank(),
                    found: f.len(),
                });
            }
            if !dot(f, anchor.coords()).is_positive() {
                return Err(Error::Precondition("face is not positive on the anchor".into()));
            }
        }
        Ok(Chamber {
            lattice: lattice.clone(),
            anchor: anchor.clone(),
            walls: built,
            faces,
            extra_rays: Vec::new(),
        })
    }

    /// Rank-3 chamber given as the cone over a convex polygon with vertices
    /// `rays` in cyclic order. Each edge yields a facet; facets proportional
    /// to a wall form are reflective, the rest become non-reflective faces.
    pub fn from_rays(
        lattice: &IntegerLattice,
        anchor: &LatticeVector,
        walls: &[LatticeVector],
        rays: &[Vec<BigRational>],
    ) -> Result<Chamber> {
        if lattice.rank() != 3 {
            return Err(Error::Precondition("polygonal chambers need rank 3".into()));
        }
        let base = Chamber::new(lattice, anchor, walls, Vec::new())?;
        let rays: Vec<LatticeVector> = rays.iter().map(|r| primitive_from_rational(r)).collect();
        let k = rays.len();
        let mut faces = Vec::new();
        let mut matched = vec![false; walls.len()];
        for i in 0..k {
            let a = &rays[i];
            let b = &rays[(i + 1) % k];
            let mut facet = primitive(&cross(a.coords(), b.coords()));
            if facet.iter().all(Zero::is_zero) {
                return Err(Error::Precondition("consecutive rays are parallel".into()));
            }
            let at_anchor = dot(&facet, anchor.coords());
            if at_anchor.is_zero() {
                return Err(Error::Precondition("facet contains the anchor".into()));
            }
            if at_anchor.is_negative() {
                facet = facet.into_iter().map(|x| -x).collect();
            }
            if rays.iter().any(|r| dot(&facet, r.coords()).is_negative()) {
                return Err(Error::Precondition("rays are not in convex cyclic order".into()));
            }
            match base
                .walls
                .iter()
                .position(|w| primitive(&w.form(lattice)) == facet)
            {
                Some(j) => matched[j] = true,
                None => faces.push(facet),
            }
        }
        if let Some(j) = matched.iter().position(|m| !m) {
            return Err(Error::Precondition(format!(
                "wall {} is not a facet of the ray cone",
                lattice.render(&walls[j])
            )));
        }
        Ok(Chamber {
            faces,
            extra_rays: rays,
            ..base
        })
    }

    pub fn lattice(&self) -> &IntegerLattice {
        &self.lattice
    }

    pub fn anchor(&self) -> &LatticeVector {
        &self.anchor
    }

    pub fn walls(&self) -> &[Wall] {
        &self.walls
    }

    pub fn faces(&self) -> &[Vec<BigInt>] {
        &self.faces
    }

    pub fn extra_rays(&self) -> &[LatticeVector] {
        &self.extra_rays
    }

    pub fn in_positive_cone(&self, x: &LatticeVector) -> bool {
        in_positive_cone(&self.lattice, &self.anchor, x)
    }

    /// Boundary-inclusive membership.
    pub fn in_chamber(&self, x: &LatticeVector) -> bool {
        self.walls
            .iter()
            .all(|w| !w.value(&self.lattice, x).is_negative())
            && self.faces.iter().all(|f| !dot(f, x.coords()).is_negative())
    }

    /// Strict membership: every wall and face inequality holds strictly.
    pub fn in_interior(&self, x: &LatticeVector) -> bool {
        self.walls
            .iter()
            .all(|w| w.value(&self.lattice, x).is_positive())
            && self.faces.iter().all(|f| dot(f, x.coords()).is_positive())
    }

    /// Applies `word` left to right: the first letter acts first.
    pub fn apply_word(&self, word: &[usize], x: &LatticeVector) -> LatticeVector {
        word.iter()
            .fold(x.clone(), |acc, &i| self.walls[i].reflection.apply(&acc))
    }

    /// Reflects in the lowest-index strictly violated wall until none is.
    /// Each step lowers `(x, anchor)` by a positive integer, so the loop ends
    /// for classes in the closed positive cone.
    pub fn reduce_to_chamber(&self, x: &LatticeVector, cap: usize) -> Result<ReductionTrace> {
        if x.len() != self.lattice.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.lattice.rank(),
                found: x.len(),
            });
        }
        let mut current = x.clone();
        let mut word = Vec::new();
        let mut trajectory = vec![self.lattice.pair(&current, &self.anchor)];
        loop {
            let violated = self
                .walls
                .iter()
                .position(|w| w.value(&self.lattice, &current).is_negative());
            let Some(i) = violated else { break };
            if word.len() >= cap {
                return Err(Error::ReductionCapExceeded { cap, trajectory });
            }
            current = self.walls[i].reflection.apply(&current);
            trajectory.push(self.lattice.pair(&current, &self.anchor));
            word.push(i);
        }
        let in_chamber = self.in_chamber(&current);
        Ok(ReductionTrace {
            word,
            result: current,
            in_chamber,
        })
    }

    /// Inverse of a reduction: reflections are involutions, so replaying the
    /// word backwards on the result gives the input.
    pub fn replay(&self, trace: &ReductionTrace) -> LatticeVector {
        let reversed: Vec<usize> = trace.word.iter().rev().copied().collect();
        self.apply_word(&reversed, &trace.result)
    }

    /// Isotropic endpoints of the chord `{(x, w) = 0}`, oriented toward the anchor.
    pub fn wall_rays(&self, i: usize) -> Result<[RayCoords; 2]> {
        isotropic_rays_in_plane(&self.lattice, &self.anchor, &self.walls[i].vector)
    }

    pub fn pingpong_certify(&self) -> Result<PingPongCertificate> {
        let n = self.walls.len();
        let rays: Vec<[RayCoords; 2]> = (0..n).map(|i| self.wall_rays(i)).collect::<Result<_>>()?;
        let forms: Vec<Vec<BigInt>> = self.walls.iter().map(|w| w.form(&self.lattice)).collect();

        let mut pairs = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let on_j: Vec<i8> = rays[j].iter().map(|r| r.form_sign(&forms[i])).collect();
                let on_i: Vec<i8> = rays[i].iter().map(|r| r.form_sign(&forms[j])).collect();
                let ok = |s: &[i8]| s.iter().all(|&x| x >= 0) && s.iter().any(|&x| x > 0);
                let pass = ok(&on_j) && on_i.iter().all(|&x| x >= 0);
                let render = |r: &RayCoords| r.render(&self.lattice);
                pairs.push(PairCheck {
                    pair: [i, j],
                    rays: rays[j].iter().chain(rays[i].iter()).map(render).collect(),
                    signs: on_j.into_iter().chain(on_i).collect(),
                    pass,
                });
            }
        }

        let anchors = self
            .walls
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let image = w.reflection.apply(&self.anchor);
                let value = w.value(&self.lattice, &image);
                let positive = self.in_positive_cone(&image);
                AnchorCheck {
                    wall: i,
                    image: self.lattice.render(&image),
                    form_value: value.to_string(),
                    in_positive_cone: positive,
                    pass: positive && value.is_negative(),
                }
            })
            .collect::<Vec<_>>();

        let pass = pairs.iter().all(|p| p.pass) && anchors.iter().all(|a| a.pass);
        Ok(PingPongCertificate {
            walls: self
                .walls
                .iter()
                .zip(&rays)
                .map(|(w, r)| WallRays {
                    wall: self.lattice.render(&w.vector),
                    rays: [r[0].render(&self.lattice), r[1].render(&self.lattice)],
                })
                .collect(),
            pairs,
            anchors,
            pass,
        })
    }

    /// Images of the anchor under all reduced words of length `≤ max_word_len`,
    /// shortest first, lexicographic within a length.
    pub fn orbit_of_anchor(&self, max_word_len: usize) -> Result<Vec<LatticeVector>> {
        let n = self.walls.len();
        let mut seen = HashSet::new();
        let mut out = vec![self.anchor.clone()];
        seen.insert(self.anchor.clone());
        // (last letter, class) per word of the current length; the first letter acts last.
        let mut frontier: Vec<(Option<usize>, LatticeVector)> = vec![(None, self.anchor.clone())];
        for _ in 0..max_word_len {
            let mut next = Vec::new();
            for (first, x) in &frontier {
                for i in 0..n {
                    if Some(i) == *first {
                        continue;
                    }
                    let y = self.walls[i].reflection.apply(x);
                    if !seen.insert(y.clone()) {
                        return Err(Error::DuplicateOrbitClass(self.lattice.render(&y)));
                    }
                    next.push((Some(i), y));
                }
            }
            out.extend(next.iter().map(|(_, y)| y.clone()));
            frontier = next;
        }
        Ok(out)
    }
}

/// Endpoint of a chord: a rational or quadratic isotropic vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RayCoords {
    Rational(LatticeVector),
    Quadratic(Vec<QuadExt>),
}

impl RayCoords {
    pub fn form_sign(&self, form: &[BigInt]) -> i8 {
        match self {
            RayCoords::Rational(v) => {
                let s = dot(form, v.coords());
                if s.is_positive() {
                    1
                } else if s.is_negative() {
                    -1
                } else {
                    0
                }
            }
            RayCoords::Quadratic(v) => {
                let d = v[0].radicand().clone();
                let mut acc = QuadExt::zero_in(&d);
                for (c, x) in form.iter().zip(v) {
                    acc = &acc + &x.scale(&BigRational::from_integer(c.clone()));
                }
                acc.sign_of()
            }
        }
    }

    pub fn render(&self, lattice: &IntegerLattice) -> String {
        match self {
            RayCoords::Rational(v) => lattice.render(v),
            RayCoords::Quadratic(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                format!("({})", parts.join(", "))
            }
        }
    }
}

/// Isotropic rays of the plane `w^⊥`, each oriented so that `(r, anchor) > 0`.
pub fn isotropic_rays_in_plane(
    lattice: &IntegerLattice,
    anchor: &LatticeVector,
    w: &LatticeVector,
) -> Result<[RayCoords; 2]> {
    if lattice.rank() != 3 {
        return Err(Error::Precondition("chord endpoints need rank 3".into()));
    }
    let row = IntMatrix::from_rows(vec![lattice.pairing_form(w)])?;
    let v = smith_normal_form(&row).v;
    let p = LatticeVector::new(v.column(1));
    let q = LatticeVector::new(v.column(2));
    let a = lattice.pair(&p, &p);
    let b = lattice.pair(&p, &q);
    let c = lattice.pair(&q, &q);
    let disc = &b * &b - &a * &c;
    if !disc.is_positive() {
        return Err(Error::Precondition(format!(
            "plane orthogonal to {} misses the light cone",
            lattice.render(w)
        )));
    }
    // Points s·p + t·q with a s² + 2b s t + c t² = 0.
    let rays: Vec<RayCoords> = if a.is_zero() {
        vec![
            RayCoords::Rational(primitive_vec(&p)),
            RayCoords::Rational(primitive_vec(&(&p.scale(&-&c) + &q.scale(&(&b * 2))))),
        ]
    } else if is_perfect_square(&disc) {
        let r = disc.sqrt();
        [&r, &-&r]
            .iter()
            .map(|root| {
                let s = -&b + *root;
                let v = &p.scale(&s) + &q.scale(&a);
                RayCoords::Rational(primitive_vec(&v))
            })
            .collect()
    } else {
        [1i64, -1]
            .iter()
            .map(|&sgn| {
                let s = QuadExt::new(
                    BigRational::from_integer(-&b),
                    BigRational::from_integer(sgn.into()),
                    disc.clone(),
                )
                .expect("non-square radicand");
                let coords = (0..3)
                    .map(|k| {
                        let pk = BigRational::from_integer(p.coords()[k].clone());
                        let qk = BigRational::from_integer(&q.coords()[k] * &a);
                        &s.scale(&pk) + &QuadExt::rational(qk, &disc)
                    })
                    .collect();
                RayCoords::Quadratic(coords)
            })
            .collect()
    };
    let anchor_form = lattice.pairing_form(anchor);
    let oriented: Vec<RayCoords> = rays
        .into_iter()
        .map(|r| match r.form_sign(&anchor_form) {
            1 => Ok(r),
            -1 => Ok(negate_ray(&r)),
            _ => Err(Error::Precondition("isotropic ray orthogonal to the anchor".into())),
        })
        .collect::<Result<_>>()?;
    let [r0, r1]: [RayCoords; 2] = oriented.try_into().expect("two rays");
    Ok([r0, r1])
}

fn negate_ray(r: &RayCoords) -> RayCoords {
    match r {
        RayCoords::Rational(v) => RayCoords::Rational(-v),
        RayCoords::Quadratic(v) => RayCoords::Quadratic(v.iter().map(|x| -x).collect()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallRays {
    pub wall: String,
    pub rays: [String; 2],
}

/// Evidence for `ιᵢ(Sⱼ) ⊂ Sᵢ`: signs of `ℓᵢ` at the endpoints of chord `j`,
/// then signs of `ℓⱼ` at the endpoints of chord `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCheck {
    pub pair: [usize; 2],
    pub rays: Vec<String>,
    pub signs: Vec<i8>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnchorCheck {
    pub wall: usize,
    pub image: String,
    pub form_value: String,
    pub in_positive_cone: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PingPongCertificate {
    pub walls: Vec<WallRays>,
    pub pairs: Vec<PairCheck>,
    pub anchors: Vec<AnchorCheck>,
    pub pass: bool,
}

impl PingPongCertificate {
    pub fn failures(&self) -> Vec<&PairCheck> {
        self.pairs.iter().filter(|p| !p.pass).collect()
    }
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn cross(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    vec![
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

fn primitive(v: &[BigInt]) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() || g.is_one() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

fn primitive_vec(v: &LatticeVector) -> LatticeVector {
    LatticeVector::new(primitive(v.coords()))
}

fn primitive_from_rational(v: &[BigRational]) -> LatticeVector {
    let den = common_denominator(v);
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| (x * BigRational::from_integer(den.clone())).to_integer())
        .collect();
    LatticeVector::new(primitive(&ints))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ints;

    fn hlm() -> IntegerLattice {
        IntegerLattice::from_i64(&["H", "L", "M"], &[&[4, 1, 1], &[1, -2, 0], &[1, 0, -2]])
            .unwrap()
    }

    fn rat(v: &[(i64, i64)]) -> Vec<BigRational> {
        v.iter().map(|&(p, q)| BigRational::new(p.into(), q.into())).collect()
    }

    fn chamber() -> Chamber {
        let l = hlm();
        let h = l.basis_vector(0);
        let walls = [
            l.vector(&[-6, 7, -3]).unwrap(),
            l.vector(&[-6, -3, 7]).unwrap(),
            l.vector(&[4, -3, -3]).unwrap(),
        ];
        let rays = [
            rat(&[(1, 1), (1, 2), (1, 2)]),
            rat(&[(1, 1), (-1, 1), (1, 2)]),
            rat(&[(1, 1), (-1, 1), (0, 1)]),
            rat(&[(1, 1), (0, 1), (-1, 1)]),
            rat(&[(1, 1), (1, 2), (-1, 1)]),
        ];
        Chamber::from_rays(&l, &h, &walls, &rays).unwrap()
    }

    #[test]
    fn positive_cone() {
        let l = hlm();
        let h = l.basis_vector(0);
        assert!(in_positive_cone(&l, &h, &h));
        assert!(!in_positive_cone(&l, &h, &-&h));
        assert!(in_positive_cone(&l, &h, &l.vector(&[2, -1, -1]).unwrap()));
    }

    #[test]
    fn faces_from_rays() {
        let c = chamber();
        // (x,M) ≥ 0 and (x,L) ≥ 0 in coefficient form.
        assert_eq!(c.faces(), &[ints(&[1, 0, -2]), ints(&[1, -2, 0])]);
        let l = c.lattice();
        for (v, inside) in [([1, 0, 0], true), ([3, -3, 1], true), ([2, -1, -1], true), ([0, 0, 1], false)] {
            assert_eq!(c.in_chamber(&l.vector(&v).unwrap()), inside, "{v:?}");
        }
    }

    #[test]
    fn reductions() {
        let c = chamber();
        let l = c.lattice();
        let h = l.basis_vector(0);
        let t = c.reduce_to_chamber(&h, DEFAULT_REDUCTION_CAP).unwrap();
        assert!(t.word.is_empty() && t.in_chamber);
        let x = c.walls()[2].reflection.apply(&h);
        let t = c.reduce_to_chamber(&x, DEFAULT_REDUCTION_CAP).unwrap();
        assert_eq!(t.word, vec![2]);
        assert_eq!(t.result, h);
        let y = c.apply_word(&[1, 0], &h);
        let t = c.reduce_to_chamber(&y, DEFAULT_REDUCTION_CAP).unwrap();
        assert_eq!(t.word, vec![0, 1]);
        assert_eq!(t.result, h);
        assert_eq!(c.replay(&t), y);

        let m = l.vector(&[0, 0, 1]).unwrap();
        let t = c.reduce_to_chamber(&m, DEFAULT_REDUCTION_CAP).unwrap();
        assert!(t.word.is_empty());
        assert!(!t.in_chamber);
    }

    #[test]
    fn reduction_cap_reports_trajectory() {
        let c = chamber();
        let x = c.apply_word(&[0, 1, 2, 0, 1], c.anchor());
        match c.reduce_to_chamber(&x, 2) {
            Err(Error::ReductionCapExceeded { cap, trajectory }) => {
                assert_eq!(cap, 2);
                assert_eq!(trajectory.len(), 3);
                assert!(trajectory.windows(2).all(|w| w[1] < w[0]));
            }
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn chord_endpoints_are_rational_here() {
        let c = chamber();
        let l = c.lattice();
        let f = l.vector(&[1, -1, 0]).unwrap();
        let e = l.vector(&[1, -1, 1]).unwrap();
        let rays = c.wall_rays(0).unwrap();
        let got: HashSet<_> = rays
            .iter()
            .map(|r| match r {
                RayCoords::Rational(v) => v.clone(),
                _ => panic!("expected rational"),
            })
            .collect();
        assert_eq!(got, HashSet::from([f, e]));
    }

    #[test]
    fn quadratic_chord_endpoints() {
        // The plane c^⊥ carries 2s² − 4t², so Δ = 8 is not a square.
        let l = IntegerLattice::from_i64(&["a", "b", "c"], &[&[2, 0, 0], &[0, -4, 0], &[0, 0, -2]])
            .unwrap();
        let anchor = l.basis_vector(0);
        let w = l.basis_vector(2);
        let rays = isotropic_rays_in_plane(&l, &anchor, &w).unwrap();
        for r in &rays {
            let RayCoords::Quadratic(v) = r else { panic!("expected √2 coordinates") };
            let norm = crate::quad::quad_pairing(l.gram(), v, v);
            assert!(norm.is_zero());
            assert_eq!(r.form_sign(&l.pairing_form(&anchor)), 1);
        }
    }

    #[test]
    fn pingpong_certificate_passes() {
        let cert = chamber().pingpong_certify().unwrap();
        assert_eq!(cert.pairs.len(), 6);
        assert_eq!(cert.anchors.len(), 3);
        assert!(cert.pass, "{cert:?}");
    }

    #[test]
    fn single_wall_is_vacuous() {
        let l = hlm();
        let h = l.basis_vector(0);
        let c = Chamber::new(&l, &h, &[l.vector(&[-6, 7, -3]).unwrap()], Vec::new()).unwrap();
        let cert = c.pingpong_certify().unwrap();
        assert!(cert.pairs.is_empty());
        assert_eq!(cert.anchors.len(), 1);
        assert!(cert.pass);
    }

    #[test]
    fn orbit_sizes() {
        let c = chamber();
        assert_eq!(c.orbit_of_anchor(0).unwrap(), vec![c.anchor().clone()]);
        assert_eq!(c.orbit_of_anchor(1).unwrap().len(), 4);
        let orbit = c.orbit_of_anchor(3).unwrap();
        assert_eq!(orbit.len(), 22);
        for x in &orbit {
            assert_eq!(c.lattice().pair(x, x), BigInt::from(4));
            assert!(c.in_positive_cone(x));
        }
    }

    #[test]
    fn reflections_preserve_positive_cone() {
        let c = chamber();
        let l = c.lattice();
        for x in -6i64..=6 {
            for y in -6i64..=6 {
                for z in -6i64..=6 {
                    let v = l.vector(&[x, y, z]).unwrap();
                    if c.in_positive_cone(&v) {
                        for w in c.walls() {
                            assert!(c.in_positive_cone(&w.reflection.apply(&v)));
                        }
                    }
                }
            }
        }
    }
}
