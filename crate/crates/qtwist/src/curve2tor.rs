//! Elliptic curves over ℚ with full rational 2-torsion: y² = (x−a₁)(x−a₂)(x−a₃).
//!
//! Provides the explicit Kummer map, exact local Kummer images at every
//! place, quadratic twisting, Lutz–Nagell torsion, a partial local root
//! number calculus, and naive point search.  Local images are computed
//! honestly, by enumerating x-coordinate residues p-adically until the
//! image subgroup reaches its known size, and cross-checked against the
//! quadratic-form structure.

use std::collections::{BTreeMap, BTreeSet};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};
use thiserror::Error;

use crate::padic::{system_solvable, QuadraticForm};
use crate::qlocal::{factor, legendre, restrict_bigint, LocalClass, Place, SquareClass};
use crate::quadspace::{
    join_pair, local_quadratic_space_with_corrections, QuadSpace, Subspace,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CurveError {
    #[error("curve roots must be pairwise distinct")]
    CoincidentRoots,
    #[error("point is not on the curve")]
    NotOnCurve,
    #[error("local image computation failed at {0}: {1}")]
    LocalImage(Place, String),
}

/// A full-2-torsion curve in the integral model y² = (x−a₁)(x−a₂)(x−a₃).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Curve {
    a: [i128; 3],
    alpha: i128,
    beta: i128,
    gamma: i128,
    /// v_p of the discriminant 16(αβγ)², for every p dividing it.
    disc_vp: BTreeMap<u64, u32>,
    /// Finite places of T: 2, 3, and every prime dividing αβγ.
    t_fin: BTreeSet<u64>,
}

pub fn make_curve(a1: i128, a2: i128, a3: i128) -> Result<Curve, CurveError> {
    if a1 == a2 || a1 == a3 || a2 == a3 {
        return Err(CurveError::CoincidentRoots);
    }
    let (alpha, beta, gamma) = (a1 - a2, a1 - a3, a2 - a3);
    let prod = alpha
        .checked_mul(beta)
        .and_then(|x| x.checked_mul(gamma))
        .expect("root differences overflow");
    let fac = factor(prod);
    let mut disc_vp: BTreeMap<u64, u32> = fac.iter().map(|(&p, &e)| (p, 2 * e)).collect();
    *disc_vp.entry(2).or_insert(0) += 4;
    let mut t_fin: BTreeSet<u64> = fac.keys().copied().collect();
    t_fin.insert(2);
    t_fin.insert(3);
    Ok(Curve { a: [a1, a2, a3], alpha, beta, gamma, disc_vp, t_fin })
}

impl Curve {
    pub fn a(&self) -> [i128; 3] {
        self.a
    }

    pub fn alpha(&self) -> i128 {
        self.alpha
    }

    pub fn beta(&self) -> i128 {
        self.beta
    }

    pub fn gamma(&self) -> i128 {
        self.gamma
    }

    pub fn disc(&self) -> BigInt {
        let abg = BigInt::from(self.alpha) * BigInt::from(self.beta) * BigInt::from(self.gamma);
        BigInt::from(16) * &abg * &abg
    }

    pub fn disc_valuation(&self, p: u64) -> u32 {
        self.disc_vp.get(&p).copied().unwrap_or(0)
    }

    /// Finite places of the bad set T.
    pub fn t_finite(&self) -> impl Iterator<Item = u64> + '_ {
        self.t_fin.iter().copied()
    }

    /// All places of T, the real place first.
    pub fn t_places(&self) -> Vec<Place> {
        let mut v = vec![Place::Real];
        v.extend(self.t_fin.iter().map(|&p| Place::Finite(p)));
        v
    }

    pub fn contains_in_t(&self, v: Place) -> bool {
        match v {
            Place::Real => true,
            Place::Finite(p) => self.t_fin.contains(&p),
        }
    }

    /// The quadratic twist by d, as the integral model with roots d·aᵢ.
    pub fn twist(&self, d: &SquareClass) -> Curve {
        let dv = d.representative();
        let a: Vec<i128> = self
            .a
            .iter()
            .map(|&ai| dv.checked_mul(ai).expect("twist coefficient overflow"))
            .collect();
        let mut disc_vp = self.disc_vp.clone();
        let mut t_fin = self.t_fin.clone();
        for &p in d.support() {
            *disc_vp.entry(p).or_insert(0) += 6;
            t_fin.insert(p);
        }
        Curve {
            a: [a[0], a[1], a[2]],
            alpha: dv * self.alpha,
            beta: dv * self.beta,
            gamma: dv * self.gamma,
            disc_vp,
            t_fin,
        }
    }

    /// True iff the other model differs from this one by clearing a square:
    /// aᵢ' = g²·aᵢ for a single rational g.
    pub fn isomorphic_scaled(&self, other: &Curve) -> bool {
        let mut ratio: Option<BigRational> = None;
        for i in 0..3 {
            match (self.a[i], other.a[i]) {
                (0, 0) => continue,
                (0, _) | (_, 0) => return false,
                (x, y) => {
                    let r = BigRational::new(BigInt::from(y), BigInt::from(x));
                    match &ratio {
                        None => ratio = Some(r),
                        Some(r0) if *r0 == r => {}
                        _ => return false,
                    }
                }
            }
        }
        match ratio {
            None => true,
            Some(r) => {
                if r.is_negative() {
                    return false;
                }
                let (n, d) = (r.numer().clone(), r.denom().clone());
                n.sqrt().pow(2u32) == n && d.sqrt().pow(2u32) == d
            }
        }
    }

    fn f_at(&self, x: &BigInt) -> BigInt {
        (x - BigInt::from(self.a[0])) * (x - BigInt::from(self.a[1]))
            * (x - BigInt::from(self.a[2]))
    }

    fn f_at_rational(&self, x: &BigRational) -> BigRational {
        let a = |i: usize| BigRational::from(BigInt::from(self.a[i]));
        (x - a(0)) * (x - a(1)) * (x - a(2))
    }

    /// The quadratic space at v carrying the curve's form: the symbol form
    /// twisted by the correction classes (−αγ, αβ), which vanishes on
    /// every local Kummer image of every quadratic twist.
    pub fn quadratic_space(&self, v: Place) -> QuadSpace {
        let c1 = restrict_bigint(&(BigInt::from(-self.alpha) * BigInt::from(self.gamma)), v);
        let c2 = restrict_bigint(&(BigInt::from(self.alpha) * BigInt::from(self.beta)), v);
        local_quadratic_space_with_corrections(v, c1.mask, c2.mask)
    }

    /// The three nontrivial 2-torsion Kummer classes, as integer pairs.
    pub fn torsion_kummer_integers(&self) -> [(BigInt, BigInt); 3] {
        let (al, be, ga) = (
            BigInt::from(self.alpha),
            BigInt::from(self.beta),
            BigInt::from(self.gamma),
        );
        [
            (&al * &be, al.clone()),
            (-&al, &al * &ga * BigInt::from(-1)),
            (-&be, -&ga),
        ]
    }
}

// ---------------------------------------------------------------------------
// points and the group law
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum CurvePoint {
    Identity,
    Affine(BigRational, BigRational),
}

impl CurvePoint {
    pub fn affine_i64(x: i64, y: i64) -> CurvePoint {
        CurvePoint::Affine(
            BigRational::from(BigInt::from(x)),
            BigRational::from(BigInt::from(y)),
        )
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, CurvePoint::Identity)
    }
}

pub fn on_curve(e: &Curve, p: &CurvePoint) -> bool {
    match p {
        CurvePoint::Identity => true,
        CurvePoint::Affine(x, y) => y * y == e.f_at_rational(x),
    }
}

/// Chord-tangent addition on y² = (x−a₁)(x−a₂)(x−a₃).
pub fn add_points(e: &Curve, p: &CurvePoint, q: &CurvePoint) -> CurvePoint {
    use CurvePoint::*;
    let (x1, y1, x2, y2) = match (p, q) {
        (Identity, _) => return q.clone(),
        (_, Identity) => return p.clone(),
        (Affine(x1, y1), Affine(x2, y2)) => (x1, y1, x2, y2),
    };
    let s1 = BigRational::from(BigInt::from(e.a[0] + e.a[1] + e.a[2]));
    let s2 = BigRational::from(BigInt::from(
        e.a[0] * e.a[1] + e.a[0] * e.a[2] + e.a[1] * e.a[2],
    ));
    let lambda = if x1 == x2 {
        if (y1.clone() + y2.clone()).is_zero() {
            return Identity;
        }
        // tangent: f'(x)/2y
        let three = BigRational::from(BigInt::from(3));
        let two = BigRational::from(BigInt::from(2));
        (three * x1 * x1 - two.clone() * &s1 * x1 + s2) / (two * y1)
    } else {
        (y2.clone() - y1.clone()) / (x2.clone() - x1.clone())
    };
    let x3 = &lambda * &lambda + &s1 - x1 - x2;
    let y3 = lambda * (x1.clone() - x3.clone()) - y1.clone();
    Affine(x3, y3)
}

pub fn negate_point(p: &CurvePoint) -> CurvePoint {
    match p {
        CurvePoint::Identity => CurvePoint::Identity,
        CurvePoint::Affine(x, y) => CurvePoint::Affine(x.clone(), -y.clone()),
    }
}

pub fn multiply_point(e: &Curve, p: &CurvePoint, n: u32) -> CurvePoint {
    let mut acc = CurvePoint::Identity;
    let mut base = p.clone();
    let mut n = n;
    while n > 0 {
        if n & 1 == 1 {
            acc = add_points(e, &acc, &base);
        }
        base = add_points(e, &base, &base);
        n >>= 1;
    }
    acc
}

/// Torsion test for full-2-torsion curves over ℚ: rational torsion embeds
/// in ℤ/2 × ℤ/8 or ℤ/2 × ℤ/6, so P is torsion iff 24·P = O.
pub fn is_torsion(e: &Curve, p: &CurvePoint) -> bool {
    multiply_point(e, p, 24).is_identity()
}

/// The Kummer map E(ℚ)/2E(ℚ) → (ℚ*/ℚ*²)²: coordinatewise (x−a₁, x−a₂),
/// with the 2-torsion points sent to (αβ, α) and (−α, −αγ).
pub fn kummer_of_point(e: &Curve, p: &CurvePoint) -> (SquareClass, SquareClass) {
    match p {
        CurvePoint::Identity => (SquareClass::one(), SquareClass::one()),
        CurvePoint::Affine(x, y) => {
            let a1 = BigRational::from(BigInt::from(e.a[0]));
            let a2 = BigRational::from(BigInt::from(e.a[1]));
            if y.is_zero() && *x == a1 {
                let ab = SquareClass::from_integer(e.alpha * e.beta).unwrap();
                let al = SquareClass::from_integer(e.alpha).unwrap();
                return (ab, al);
            }
            if y.is_zero() && *x == a2 {
                let ma = SquareClass::from_integer(-e.alpha).unwrap();
                let mag = SquareClass::from_integer(-e.alpha * e.gamma).unwrap();
                return (ma, mag);
            }
            let d1 = x.clone() - a1;
            let d2 = x.clone() - a2;
            (
                SquareClass::from_rational(d1.numer(), d1.denom()).unwrap(),
                SquareClass::from_rational(d2.numer(), d2.denom()).unwrap(),
            )
        }
    }
}

// ---------------------------------------------------------------------------
// local membership and local images
// ---------------------------------------------------------------------------

/// Sign pair of the bounded real component (the egg): the class of
/// (x−a₁, x−a₂) for x strictly between the two smallest roots.
fn real_egg_mask(e: &Curve) -> u64 {
    let mut roots = e.a;
    roots.sort_unstable();
    let rmin = roots[0];
    // interior point of the egg has x - a_i < 0 exactly when a_i > rmin
    let m1 = u8::from(e.a[0] != rmin);
    let m2 = u8::from(e.a[1] != rmin);
    join_pair(m1, m2, Place::Real)
}

/// Decides (b₁, b₂) ∈ δ(E(ℚ_v)) through the defining pair of quadrics
/// b₁u₁² − b₂u₂² = (a₂−a₁)u₀², b₁u₁² − b₁b₂u₃² = (a₃−a₁)u₀², probed to
/// precision v_p(2⁴Δ) + 3; at the real place by interval sign analysis.
pub fn local_membership(e: &Curve, b: (LocalClass, LocalClass), v: Place) -> bool {
    debug_assert_eq!(b.0.place, v);
    debug_assert_eq!(b.1.place, v);
    match v {
        Place::Real => {
            let vec = join_pair(b.0.mask, b.1.mask, v);
            vec == 0 || vec == real_egg_mask(e)
        }
        Place::Finite(p) => {
            let b1 = b.0.representative() as i128;
            let b2 = b.1.representative() as i128;
            // variables (u0, u1, u2, u3)
            let q1 = QuadraticForm::diagonal(&[e.alpha, b1, -b2, 0]);
            let q2 = QuadraticForm::diagonal(&[e.beta, b1, 0, -b1 * b2]);
            let k = e.disc_valuation(p) + if p == 2 { 4 } else { 0 } + 3;
            system_solvable(&[q1, q2], p, k)
        }
    }
}

/// The image of the local Kummer map as a subspace of the pair space at v.
#[derive(Debug, Clone)]
pub struct LocalImage {
    pub place: Place,
    pub subspace: Subspace,
}

/// Computes δ(E(ℚ_v)) exactly.  At finite places the image subgroup is
/// grown from the 2-torsion classes and from x-coordinate residues
/// enumerated p-adically (branching only where the class is not yet
/// determined) until it reaches its known order; the result is then
/// cross-checked to be maximal isotropic for the curve's quadratic form.
pub fn local_image(e: &Curve, v: Place) -> Result<LocalImage, CurveError> {
    let subspace = match v {
        Place::Real => Subspace::new(2, &[real_egg_mask(e)]),
        Place::Finite(p) => {
            let target = if p == 2 { 3 } else { 2 };
            let mut gens: Vec<u64> = Vec::new();
            for (t1, t2) in e.torsion_kummer_integers() {
                let m1 = restrict_bigint(&t1, v);
                let m2 = restrict_bigint(&t2, v);
                gens.push(join_pair(m1.mask, m2.mask, v));
            }
            let mut span = Subspace::new(2 * v.local_dim(), &gens);
            if span.dim() < target {
                enumerate_local_classes(e, p, target, &mut span);
            }
            if span.dim() != target {
                return Err(CurveError::LocalImage(
                    v,
                    format!("image dimension {} instead of {}", span.dim(), target),
                ));
            }
            span
        }
    };
    // cross-check: maximal isotropic for the curve's quadratic form
    let space = e.quadratic_space(v);
    if !space.is_maximal_isotropic(&subspace) {
        return Err(CurveError::LocalImage(
            v,
            "image is not maximal isotropic".into(),
        ));
    }
    Ok(LocalImage { place: v, subspace })
}

/// p-adic square test for a nonzero value with known valuation margin.
fn is_padic_square(f: &BigInt, p: u64) -> bool {
    let bp = BigInt::from(p);
    let mut m = f.clone();
    let mut val = 0u64;
    while (&m % &bp).is_zero() {
        m /= &bp;
        val += 1;
    }
    if val % 2 == 1 {
        return false;
    }
    if p == 2 {
        m.mod_floor(&BigInt::from(8)) == BigInt::one()
    } else {
        let r: u64 = m.mod_floor(&bp).try_into().unwrap();
        legendre(r as i128, p) == 1
    }
}

fn bigint_vp(n: &BigInt, p: u64) -> u32 {
    if n.is_zero() {
        return u32::MAX;
    }
    let bp = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0;
    while (&m % &bp).is_zero() {
        m /= &bp;
        v += 1;
    }
    v
}

/// Grows `span` by the classes of points with x ∈ ℤ_p and x of negative
/// even valuation, stopping as soon as the target dimension is reached.
fn enumerate_local_classes(e: &Curve, p: u64, target: usize, span: &mut Subspace) {
    let v = Place::Finite(p);
    let margin = if p == 2 { 3 } else { 1 };
    let cap = e.disc_valuation(p) + if p == 2 { 2 } else { 0 } + 10;

    // integral x, deepest-first stack of (residue, level)
    let mut stack: Vec<(BigInt, u32)> = (0..p).rev().map(|t| (BigInt::from(t), 1)).collect();
    while let Some((r, j)) = stack.pop() {
        if span.dim() >= target {
            return;
        }
        let fr = e.f_at(&r);
        let decided = !fr.is_zero()
            && bigint_vp(&fr, p) + margin <= j
            && (0..2).all(|i| {
                let d = &r - BigInt::from(e.a[i]);
                !d.is_zero() && bigint_vp(&d, p) + margin <= j
            });
        if decided {
            if is_padic_square(&fr, p) {
                let m1 = restrict_bigint(&(&r - BigInt::from(e.a[0])), v);
                let m2 = restrict_bigint(&(&r - BigInt::from(e.a[1])), v);
                let vec = join_pair(m1.mask, m2.mask, v);
                if !span.contains(vec) {
                    let mut gens = span.basis().to_vec();
                    gens.push(vec);
                    *span = Subspace::new(span.ambient_dim(), &gens);
                }
            }
            continue;
        }
        if j < cap {
            let step = BigInt::from(p).pow(j);
            for t in (0..p).rev() {
                stack.push((&r + BigInt::from(t) * &step, j + 1));
            }
        }
        // branches that reach the cap cluster around a root; their classes
        // degenerate to the 2-torsion classes already present
    }

    // x of negative valuation: x = u / p^{2s}, u a unit
    let max_av = (0..3).map(|i| bigint_vp(&BigInt::from(e.a[i].max(1)), p)).max().unwrap_or(0);
    let depth = (max_av + margin) / 2 + 2;
    for s in 1..=depth {
        let scale = BigInt::from(p).pow(2 * s);
        // g(u) = prod(u - a_i p^{2s}); x - a_i has the class of g's factors
        let mut stack: Vec<(BigInt, u32)> = (1..p).rev().map(|t| (BigInt::from(t), 1)).collect();
        if p == 2 {
            stack = vec![(BigInt::one(), 1)];
        }
        while let Some((u, j)) = stack.pop() {
            if span.dim() >= target {
                return;
            }
            // f(u/p^{2s}) = p^{-6s} * prod(u - a_i p^{2s}), so squareness
            // and both slot classes are carried by the shifted factors
            let factors: Vec<BigInt> =
                (0..3).map(|i| &u - BigInt::from(e.a[i]) * &scale).collect();
            let fr: BigInt = factors.iter().product();
            let decided = !fr.is_zero()
                && bigint_vp(&fr, p) + margin <= j
                && factors[..2].iter().all(|d| bigint_vp(d, p) + margin <= j);
            if decided {
                if is_padic_square(&fr, p) {
                    let m1 = restrict_bigint(&factors[0], v);
                    let m2 = restrict_bigint(&factors[1], v);
                    let vec = join_pair(m1.mask, m2.mask, v);
                    if !span.contains(vec) {
                        let mut gens = span.basis().to_vec();
                        gens.push(vec);
                        *span = Subspace::new(span.ambient_dim(), &gens);
                    }
                }
                continue;
            }
            if j < cap {
                let step = BigInt::from(p).pow(j);
                for t in (0..p).rev() {
                    let cand = &u + BigInt::from(t) * &step;
                    if !(&cand % BigInt::from(p)).is_zero() {
                        stack.push((cand, j + 1));
                    }
                }
            }
        }
    }
}

/// The local condition of the twist by a uniformizer class at an odd place
/// outside T: the span of (αβ, πα) and (−πα, −αγ).  The uniformizer is
/// given as a local class mask with odd valuation.
pub fn twisted_condition(e: &Curve, p: u64, pi_mask: u8) -> Subspace {
    let v = Place::Finite(p);
    debug_assert!(p != 2 && pi_mask & 0b10 != 0, "uniformizer must have odd valuation");
    let al = restrict_bigint(&BigInt::from(e.alpha), v);
    let ab = restrict_bigint(&(BigInt::from(e.alpha) * BigInt::from(e.beta)), v);
    let mag = restrict_bigint(&(BigInt::from(-e.alpha) * BigInt::from(e.gamma)), v);
    let g1 = join_pair(ab.mask, pi_mask ^ al.mask, v);
    let m1 = restrict_bigint(&BigInt::from(-1), v);
    let g2 = join_pair(pi_mask ^ al.mask ^ m1.mask, mag.mask, v);
    Subspace::new(2 * v.local_dim(), &[g1, g2])
}

// ---------------------------------------------------------------------------
// torsion
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct TorsionSubgroup {
    /// Invariants (2, m): the group is ℤ/2 × ℤ/m.
    pub invariants: (u32, u32),
    pub points: Vec<CurvePoint>,
}

/// Full rational torsion by Lutz–Nagell: candidates have y = 0 or y² | Δ,
/// and each surviving candidate is certified by its exact order.
pub fn torsion_subgroup(e: &Curve) -> TorsionSubgroup {
    let mut points = vec![CurvePoint::Identity];
    for i in 0..3 {
        points.push(CurvePoint::Affine(
            BigRational::from(BigInt::from(e.a[i])),
            BigRational::zero(),
        ));
    }
    // divisors y with y^2 | disc
    let mut ys: Vec<BigInt> = vec![BigInt::one()];
    for (&p, &vp) in &e.disc_vp {
        let reps = vp / 2;
        let mut next = Vec::new();
        for y in &ys {
            let mut cur = y.clone();
            for _ in 0..=reps {
                next.push(cur.clone());
                cur *= BigInt::from(p);
            }
        }
        next.sort();
        next.dedup();
        ys = next;
    }
    let s3 = BigInt::from(e.a[0]) * BigInt::from(e.a[1]) * BigInt::from(e.a[2]);
    for y in ys {
        let y2 = &y * &y;
        // integer roots of f(x) - y^2 divide its constant term -s3 - y^2
        let constant = -&s3 - &y2;
        let candidates: Vec<BigInt> = if constant.is_zero() {
            // the cubic deflates to x (x^2 - s1 x + s2): remaining integer
            // roots divide s2
            let s2 = BigInt::from(e.a[0] * e.a[1] + e.a[0] * e.a[2] + e.a[1] * e.a[2]);
            let s1 = BigInt::from(e.a[0] + e.a[1] + e.a[2]);
            let mut c = vec![BigInt::zero(), s1];
            if !s2.is_zero() {
                let ds = divisors_of(&s2);
                c.extend(ds.iter().cloned());
                c.extend(ds.into_iter().map(|d| -d));
            }
            c
        } else {
            let mut ds = divisors_of(&constant);
            ds.extend(ds.clone().into_iter().map(|d| -d));
            ds
        };
        for x in candidates {
            if e.f_at(&x) == y2 {
                let pt = CurvePoint::Affine(
                    BigRational::from(x.clone()),
                    BigRational::from(y.clone()),
                );
                if is_torsion(e, &pt) {
                    points.push(pt.clone());
                    points.push(negate_point(&pt));
                }
            }
        }
    }
    points.sort();
    points.dedup();
    let max_order = points
        .iter()
        .map(|p| point_order(e, p))
        .max()
        .unwrap_or(1);
    TorsionSubgroup { invariants: (2, (points.len() / 2) as u32), points }
        .validated(max_order)
}

impl TorsionSubgroup {
    fn validated(self, max_order: u32) -> Self {
        debug_assert_eq!(
            2 * max_order as usize,
            self.points.len(),
            "torsion structure must be Z/2 x Z/max_order"
        );
        self
    }
}

fn point_order(e: &Curve, p: &CurvePoint) -> u32 {
    let mut acc = p.clone();
    for n in 1..=24 {
        if acc.is_identity() {
            return n;
        }
        acc = add_points(e, &acc, p);
    }
    u32::MAX
}

fn divisors_of(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    if let Ok(small) = i128::try_from(&n) {
        let fac = factor(small);
        let mut out = vec![BigInt::one()];
        for (p, e) in fac {
            let mut next = Vec::new();
            for d in &out {
                let mut cur = d.clone();
                for _ in 0..=e {
                    next.push(cur.clone());
                    cur *= BigInt::from(p);
                }
            }
            out = next;
        }
        out.sort();
        out.dedup();
        out
    } else {
        panic!("divisor enumeration out of range");
    }
}

// ---------------------------------------------------------------------------
// root numbers
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootNumber {
    Plus,
    Minus,
    /// Reduction types this calculus does not cover: additive reduction at
    /// residue characteristic 2 or 3, and additive potentially
    /// multiplicative reduction.
    Unsupported,
}

impl RootNumber {
    pub fn value(&self) -> Option<i8> {
        match self {
            RootNumber::Plus => Some(1),
            RootNumber::Minus => Some(-1),
            RootNumber::Unsupported => None,
        }
    }
}

/// Local root number: +1 at good places, −1 at the real place,
/// (−1)^⌊v(Δ)·p/12⌋ for additive potentially good reduction at p ≥ 5,
/// ∓1 for split/nonsplit multiplicative reduction.
pub fn root_number_local(e: &Curve, v: Place) -> RootNumber {
    let p = match v {
        Place::Real => return RootNumber::Minus,
        Place::Finite(p) => p,
    };
    // minimize within the family: x -> p^2 x + r when all roots agree mod p^2
    let mut roots: Vec<BigInt> = e.a.iter().map(|&ai| BigInt::from(ai)).collect();
    let bp = BigInt::from(p);
    let bp2 = &bp * &bp;
    loop {
        let (c4, _c6, disc) = family_invariants(&roots);
        if bigint_vp(&disc, p) == 0 {
            return RootNumber::Plus;
        }
        if bigint_vp(&c4, p) >= 4 && bigint_vp(&disc, p) >= 12 {
            let r0 = roots[0].mod_floor(&bp2);
            if roots.iter().all(|r| (r - &r0).mod_floor(&bp2).is_zero()) {
                roots = roots.iter().map(|r| (r - &r0) / &bp2).collect();
                continue;
            }
            return RootNumber::Unsupported;
        }
        break;
    }
    if p == 2 {
        return RootNumber::Unsupported;
    }
    let (c4, _c6, disc) = family_invariants(&roots);
    let vd = bigint_vp(&disc, p);
    let rbar: Vec<BigInt> = roots.iter().map(|r| r.mod_floor(&bp)).collect();
    let collide = [
        rbar[0] == rbar[1],
        rbar[0] == rbar[2],
        rbar[1] == rbar[2],
    ];
    let ncoll = collide.iter().filter(|&&c| c).count();
    if ncoll == 1 {
        // multiplicative: split iff the node's tangent slopes are rational
        let (i, k) = if collide[0] {
            (0, 2)
        } else if collide[1] {
            (0, 1)
        } else {
            (1, 0)
        };
        let diff = (&roots[i] - &roots[k]).mod_floor(&bp);
        let d: u64 = diff.try_into().unwrap();
        if legendre(d as i128, p) == 1 {
            RootNumber::Minus
        } else {
            RootNumber::Plus
        }
    } else {
        // additive
        if p < 5 {
            return RootNumber::Unsupported;
        }
        if 3 * bigint_vp(&c4, p) < vd {
            return RootNumber::Unsupported; // potentially multiplicative
        }
        let exponent = (vd as u64 * p / 12) % 2;
        if exponent == 0 {
            RootNumber::Plus
        } else {
            RootNumber::Minus
        }
    }
}

fn family_invariants(roots: &[BigInt]) -> (BigInt, BigInt, BigInt) {
    let s1: BigInt = roots.iter().sum();
    let s2: BigInt = &roots[0] * &roots[1] + &roots[0] * &roots[2] + &roots[1] * &roots[2];
    let s3: BigInt = roots.iter().product();
    let c4 = BigInt::from(16) * &s1 * &s1 - BigInt::from(48) * &s2;
    let c6 = BigInt::from(64) * &s1 * &s1 * &s1 - BigInt::from(288) * &s1 * &s2
        + BigInt::from(864) * &s3;
    let d01 = &roots[0] - &roots[1];
    let d02 = &roots[0] - &roots[2];
    let d12 = &roots[1] - &roots[2];
    let prod = &d01 * &d02 * &d12;
    let disc = BigInt::from(16) * &prod * &prod;
    (c4, c6, disc)
}

// ---------------------------------------------------------------------------
// point search
// ---------------------------------------------------------------------------

/// All affine points with x = u/w², |u| ≤ bound, 1 ≤ w ≤ bound, returned
/// with y ≥ 0 and deduplicated.
pub fn point_search(e: &Curve, bound: u32) -> Vec<CurvePoint> {
    let mut out: BTreeSet<CurvePoint> = BTreeSet::new();
    for w in 1..=bound as i64 {
        let w2 = BigInt::from(w) * BigInt::from(w);
        for u in -(bound as i64)..=bound as i64 {
            let m: BigInt = (0..3)
                .map(|i| BigInt::from(u) - BigInt::from(e.a[i]) * &w2)
                .product();
            if m.is_negative() {
                continue;
            }
            let root = m.sqrt();
            if &root * &root == m {
                let x = BigRational::new(BigInt::from(u), w2.clone());
                let y = BigRational::new(root, w2.clone() * BigInt::from(w));
                out.insert(CurvePoint::Affine(x, y));
            }
        }
    }
    out.into_iter().collect()
}
