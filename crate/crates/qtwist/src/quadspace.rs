//! Finite quadratic spaces over 𝔽₂ and the exact linear algebra behind the
//! descent computations.
//!
//! Vectors are bit masks over a fixed ordered basis; subspaces are kept in
//! reduced row echelon form, which makes them canonical and cheap to
//! compare.  The local pair spaces (ℚ_v*/ℚ_v*²)² carry the Hilbert-symbol
//! quadratic form; `M₂(𝔽₂)` with the determinant form is the model space
//! behind the degeneracy classification.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::qlocal::{self, legendre, Place, SquareClass};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QuadSpaceError {
    #[error("inputs are not maximal isotropic subspaces")]
    NotMaximalIsotropic,
    #[error("subspaces are required to intersect trivially")]
    NontrivialIntersection,
    #[error("degeneracy scan exhausted after {0} primes without a decision")]
    ScanExhausted(u64),
}

// ---------------------------------------------------------------------------
// F2 vectors and subspaces
// ---------------------------------------------------------------------------

/// Reduced row echelon form of a list of bit vectors.
pub fn echelonize(rows: &[u64]) -> Vec<u64> {
    let mut basis: Vec<u64> = Vec::new();
    for &row in rows {
        let mut v = row;
        for &b in &basis {
            let pivot = 1u64 << (63 - b.leading_zeros());
            if v & pivot != 0 {
                v ^= b;
            }
        }
        if v != 0 {
            basis.push(v);
        }
    }
    // back-substitute and sort by pivot for a canonical form
    basis.sort_unstable_by_key(|b| std::cmp::Reverse(*b));
    for i in (0..basis.len()).rev() {
        let pivot = 1u64 << (63 - basis[i].leading_zeros());
        for j in 0..i {
            if basis[j] & pivot != 0 {
                basis[j] ^= basis[i];
            }
        }
    }
    basis
}

/// An 𝔽₂-subspace of a fixed ambient space, stored in reduced echelon form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<u64>,
}

impl Subspace {
    pub fn new(ambient_dim: usize, generators: &[u64]) -> Self {
        debug_assert!(ambient_dim <= 64);
        debug_assert!(generators.iter().all(|g| g >> ambient_dim == 0 || ambient_dim == 64));
        Subspace { ambient_dim, basis: echelonize(generators) }
    }

    pub fn trivial(ambient_dim: usize) -> Self {
        Subspace { ambient_dim, basis: vec![] }
    }

    pub fn full(ambient_dim: usize) -> Self {
        let gens: Vec<u64> = (0..ambient_dim).map(|i| 1u64 << i).collect();
        Subspace::new(ambient_dim, &gens)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[u64] {
        &self.basis
    }

    /// Reduces `v` modulo the subspace; the result is zero iff `v` lies in it.
    pub fn reduce(&self, v: u64) -> u64 {
        let mut v = v;
        for &b in &self.basis {
            let pivot = 1u64 << (63 - b.leading_zeros());
            if v & pivot != 0 {
                v ^= b;
            }
        }
        v
    }

    pub fn contains(&self, v: u64) -> bool {
        self.reduce(v) == 0
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|&b| self.contains(b))
    }

    /// All 2^dim elements, in a deterministic order.
    pub fn elements(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(1 << self.basis.len());
        for mask in 0u64..(1 << self.basis.len()) {
            let mut v = 0u64;
            for (i, &b) in self.basis.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    v ^= b;
                }
            }
            out.push(v);
        }
        out
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        debug_assert_eq!(self.ambient_dim, other.ambient_dim);
        let mut gens = self.basis.clone();
        gens.extend_from_slice(&other.basis);
        Subspace::new(self.ambient_dim, &gens)
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        debug_assert_eq!(self.ambient_dim, other.ambient_dim);
        // ambient dims are tiny; enumerate the smaller side
        let (small, big) = if self.dim() <= other.dim() { (self, other) } else { (other, self) };
        let gens: Vec<u64> = small
            .elements()
            .into_iter()
            .filter(|&v| v != 0 && big.contains(v))
            .collect();
        Subspace::new(self.ambient_dim, &gens)
    }
}

/// Kernel of an 𝔽₂-linear map given by the images of the standard basis
/// vectors of the input space.  Returns an echelonized kernel basis as bit
/// vectors over the input coordinates.
pub fn kernel_of_map(images: &[u128], input_dim: usize) -> Vec<u128> {
    debug_assert_eq!(images.len(), input_dim);
    // rows: (image, marker); eliminate on image bits, collect markers of
    // rows whose image cancels to zero
    let mut rows: Vec<(u128, u128)> =
        images.iter().enumerate().map(|(i, &im)| (im, 1u128 << i)).collect();
    let mut kernel = Vec::new();
    let mut reduced: Vec<(u128, u128)> = Vec::new();
    for (mut im, mut mk) in rows.drain(..) {
        for &(rim, rmk) in &reduced {
            let pivot = 1u128 << (127 - rim.leading_zeros());
            if im & pivot != 0 {
                im ^= rim;
                mk ^= rmk;
            }
        }
        if im == 0 {
            kernel.push(mk);
        } else {
            reduced.push((im, mk));
        }
    }
    // echelonize the kernel over the marker bits for a canonical answer
    let mut basis: Vec<u128> = Vec::new();
    for mut v in kernel {
        for &b in &basis {
            let pivot = 1u128 << (127 - b.leading_zeros());
            if v & pivot != 0 {
                v ^= b;
            }
        }
        if v != 0 {
            basis.push(v);
        }
    }
    basis.sort_unstable();
    for i in (0..basis.len()).rev() {
        let pivot = 1u128 << (127 - basis[i].leading_zeros());
        for j in 0..i {
            if i != j && basis[j] & pivot != 0 {
                basis[j] ^= basis[i];
            }
        }
    }
    basis.sort_unstable();
    basis
}

// ---------------------------------------------------------------------------
// quadratic spaces
// ---------------------------------------------------------------------------

/// A finite quadratic space over 𝔽₂ with values in {±1}: a dimension and a
/// table of the form on every vector.  The bilinear pairing is induced:
/// `b(x, y) = q(x+y) q(x) q(y)`.
#[derive(Debug, Clone)]
pub struct QuadSpace {
    dim: usize,
    q: Vec<i8>,
}

impl QuadSpace {
    pub fn from_fn(dim: usize, f: impl Fn(u64) -> i8) -> Self {
        debug_assert!(dim <= 16);
        let q: Vec<i8> = (0..1u64 << dim).map(f).collect();
        debug_assert_eq!(q[0], 1, "q(0) must be trivial");
        QuadSpace { dim, q }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn q(&self, v: u64) -> i8 {
        self.q[v as usize]
    }

    pub fn pairing(&self, x: u64, y: u64) -> i8 {
        self.q(x ^ y) * self.q(x) * self.q(y)
    }

    /// True iff the subspace is q-trivial and self-orthogonal.
    pub fn is_isotropic(&self, s: &Subspace) -> bool {
        let elems = s.elements();
        elems.iter().all(|&v| self.q(v) == 1)
            && elems.iter().all(|&x| elems.iter().all(|&y| self.pairing(x, y) == 1))
    }

    pub fn is_maximal_isotropic(&self, s: &Subspace) -> bool {
        self.is_isotropic(s) && 2 * s.dim() == self.dim
    }

    /// Every maximal isotropic subspace, by exhaustive search.
    pub fn maximal_isotropics(&self) -> Vec<Subspace> {
        let mut level: BTreeSet<Subspace> = BTreeSet::new();
        level.insert(Subspace::trivial(self.dim));
        let mut best = vec![Subspace::trivial(self.dim)];
        loop {
            let mut next: BTreeSet<Subspace> = BTreeSet::new();
            for s in &level {
                for v in 1..(1u64 << self.dim) {
                    if s.contains(v) || self.q(v) != 1 {
                        continue;
                    }
                    if s.elements().iter().any(|&x| self.pairing(x, v) != 1) {
                        continue;
                    }
                    let mut gens = s.basis().to_vec();
                    gens.push(v);
                    next.insert(Subspace::new(self.dim, &gens));
                }
            }
            if next.is_empty() {
                return best;
            }
            best = next.iter().cloned().collect();
            level = next;
        }
    }
}

/// `M₂(𝔽₂)` with the determinant as quadratic form.  Bit order:
/// `(m11, m12, m21, m22)`.
pub fn m2_determinant_space() -> QuadSpace {
    QuadSpace::from_fn(4, |v| {
        let m11 = v & 1;
        let m12 = v >> 1 & 1;
        let m21 = v >> 2 & 1;
        let m22 = v >> 3 & 1;
        if (m11 & m22) ^ (m12 & m21) == 1 {
            -1
        } else {
            1
        }
    })
}

/// The six maximal isotropic subspaces of `(M₂(𝔽₂), det)`: both row spaces,
/// both column spaces, equal-rows and equal-columns.
pub fn m2_isotropic_families() -> Vec<Subspace> {
    let fam = [
        vec![0b0001u64, 0b0010], // first row free
        vec![0b0100, 0b1000],    // second row free
        vec![0b0001, 0b0100],    // first column free
        vec![0b0010, 0b1000],    // second column free
        vec![0b0011, 0b1100],    // equal rows
        vec![0b0101, 0b1010],    // equal columns
    ];
    fam.iter().map(|g| Subspace::new(4, g)).collect()
}

// ---------------------------------------------------------------------------
// local pair spaces
// ---------------------------------------------------------------------------

/// Hilbert symbols between the canonical basis classes of ℚ_v*/ℚ_v*².
fn basis_symbols(v: Place) -> Vec<Vec<i8>> {
    match v {
        Place::Real => vec![vec![-1]],
        Place::Finite(2) => {
            // basis [-1, 5, 2]
            vec![vec![-1, 1, 1], vec![1, 1, -1], vec![1, -1, 1]]
        }
        Place::Finite(p) => {
            // basis [u, p], u the least nonresidue
            let upp = if p % 4 == 1 { 1 } else { -1 }; // (p,p) = (-1|p)
            vec![vec![1, -1], vec![-1, upp]]
        }
    }
}

/// Hilbert symbol of two local classes given as masks, by bilinearity.
pub fn hilbert_local(a: u8, b: u8, v: Place) -> i8 {
    let s = basis_symbols(v);
    let d = v.local_dim();
    let mut out = 1i8;
    for (i, row) in s.iter().enumerate().take(d) {
        if a >> i & 1 == 0 {
            continue;
        }
        for (j, &sym) in row.iter().enumerate().take(d) {
            if b >> j & 1 == 1 {
                out *= sym;
            }
        }
    }
    out
}

/// The local pair space at `v`: vectors are `(b₁, b₂)` with slot-1 bits low
/// and slot-2 bits high, the form is the Hilbert symbol `q((b₁,b₂)) =
/// (b₁, b₂)_v` and the pairing is `(b₁, b₂')_v (b₁', b₂)_v`.
pub fn local_quadratic_space(v: Place) -> QuadSpace {
    local_quadratic_space_with_corrections(v, 0, 0)
}

/// The local pair space with the quadratic form twisted by a pair of
/// correction classes: `q((b₁,b₂)) = (b₁,b₂)_v (b₁,c₁)_v (b₂,c₂)_v`.
/// The corrections change the form but not the induced pairing, so both
/// versions refine the same local duality pairing.
pub fn local_quadratic_space_with_corrections(v: Place, c1: u8, c2: u8) -> QuadSpace {
    let d = v.local_dim();
    QuadSpace::from_fn(2 * d, move |vec| {
        let b1 = (vec & ((1 << d) - 1)) as u8;
        let b2 = (vec >> d) as u8;
        hilbert_local(b1, b2, v) * hilbert_local(b1, c1, v) * hilbert_local(b2, c2, v)
    })
}

/// Splits a pair-space vector into its two slot masks.
pub fn split_pair(vec: u64, v: Place) -> (u8, u8) {
    let d = v.local_dim();
    ((vec & ((1 << d) - 1)) as u8, (vec >> d) as u8)
}

pub fn join_pair(b1: u8, b2: u8, v: Place) -> u64 {
    let d = v.local_dim();
    (b1 as u64) | ((b2 as u64) << d)
}

/// The unramified subspace of the local pair space: both slots of even
/// valuation.  Only meaningful at finite places.
pub fn unramified_subspace(v: Place) -> Subspace {
    match v {
        Place::Real => Subspace::trivial(2),
        Place::Finite(2) => {
            // units are spanned by -1 and 5 in each slot
            Subspace::new(6, &[0b000001, 0b000010, 0b001000, 0b010000])
        }
        Place::Finite(_) => Subspace::new(4, &[0b0001, 0b0100]),
    }
}

// ---------------------------------------------------------------------------
// degeneracy classification
// ---------------------------------------------------------------------------

/// Outcome of scanning Frobenius determinants of a subspace of character
/// pairs: either one of the coordinate projections (or their sum) kills
/// the subspace, or some prime witnesses a non-vanishing 2×2 determinant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Degeneracy {
    FirstProjectionKills,
    SecondProjectionKills,
    SumProjectionKills,
    Nondegenerate { witness: u64 },
}

/// Classifies a subspace `V ⊆ (ℚ*/ℚ*²)²` given by basis pairs.  Frobenius
/// evaluation at an unramified prime is Legendre-symbol evaluation of both
/// coordinates; a witness prime is one where the evaluations span 𝔽₂².
pub fn classify_degenerate(
    basis: &[(SquareClass, SquareClass)],
    scan_bound: u64,
) -> Result<Degeneracy, QuadSpaceError> {
    let mut ramified: BTreeSet<u64> = BTreeSet::new();
    ramified.insert(2);
    for (x1, x2) in basis {
        ramified.extend(x1.support().iter().copied());
        ramified.extend(x2.support().iter().copied());
    }
    let mut scanned = 0u64;
    let mut p = 2u64;
    while scanned < scan_bound {
        p += 1;
        if !qlocal::is_prime(p) {
            continue;
        }
        scanned += 1;
        if ramified.contains(&p) {
            continue;
        }
        // rank over F2 of the (basis × 2) Frobenius evaluation matrix
        let mut first_nonzero = 0u8;
        let mut rank = 0;
        for (x1, x2) in basis {
            let r1 = u8::from(legendre(x1.representative(), p) == -1);
            let r2 = u8::from(legendre(x2.representative(), p) == -1);
            let r = r1 | (r2 << 1);
            if r == 0 {
                continue;
            }
            if first_nonzero == 0 {
                first_nonzero = r;
                rank = 1;
            } else if r != first_nonzero {
                rank = 2;
                break;
            }
        }
        if rank == 2 {
            return Ok(Degeneracy::Nondegenerate { witness: p });
        }
    }
    // no witness: report which projection annihilates V globally
    if basis.iter().all(|(x1, _)| x1.is_trivial()) {
        return Ok(Degeneracy::FirstProjectionKills);
    }
    if basis.iter().all(|(_, x2)| x2.is_trivial()) {
        return Ok(Degeneracy::SecondProjectionKills);
    }
    if basis.iter().all(|(x1, x2)| x1 == x2) {
        return Ok(Degeneracy::SumProjectionKills);
    }
    Err(QuadSpaceError::ScanExhausted(scan_bound))
}

/// The parity constraint on intersections of maximal isotropic subspaces:
/// with `L ∩ H = 0`, the dimensions of `A ∩ L` and `A ∩ H` agree mod 2.
/// Returns that congruence as a boolean after checking the preconditions.
pub fn kmr_parity_check(
    a: &Subspace,
    l: &Subspace,
    h: &Subspace,
    space: &QuadSpace,
) -> Result<bool, QuadSpaceError> {
    for s in [a, l, h] {
        if !space.is_maximal_isotropic(s) {
            return Err(QuadSpaceError::NotMaximalIsotropic);
        }
    }
    if l.intersect(h).dim() != 0 {
        return Err(QuadSpaceError::NontrivialIntersection);
    }
    Ok(a.intersect(l).dim() % 2 == a.intersect(h).dim() % 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn echelon_and_subspace_basics() {
        let s = Subspace::new(4, &[0b1100, 0b0110, 0b1010]);
        assert_eq!(s.dim(), 2);
        assert!(s.contains(0b1100 ^ 0b0110));
        assert!(!s.contains(0b0001));
        let t = Subspace::new(4, &[0b0110, 0b1100]);
        assert_eq!(s, t);
    }

    #[test]
    fn kernel_of_simple_map() {
        // map F2^3 -> F2^2: e0 -> 01, e1 -> 01, e2 -> 10
        let k = kernel_of_map(&[0b01, 0b01, 0b10], 3);
        assert_eq!(k, vec![0b011]);
    }

    #[test]
    fn intersection_and_sum() {
        let a = Subspace::new(4, &[0b0001, 0b0010]);
        let b = Subspace::new(4, &[0b0010, 0b0100]);
        assert_eq!(a.intersect(&b).basis(), &[0b0010]);
        assert_eq!(a.sum(&b).dim(), 3);
    }

    #[test]
    fn naive_form_examples() {
        // q((-1,-1)) at the real place
        let sp = local_quadratic_space(Place::Real);
        let v = join_pair(1, 1, Place::Real);
        assert_eq!(sp.q(v), -1);

        // trivial first slot is always isotropic for the naive form
        for place in [Place::Real, Place::Finite(2), Place::Finite(3)] {
            let sp = local_quadratic_space(place);
            let d = place.local_dim();
            for b2 in 0..(1u8 << d) {
                assert_eq!(sp.q(join_pair(0, b2, place)), 1);
            }
        }

        // q((2,3)) at p=3: 2 is the nonresidue, 3 the uniformizer
        let sp = local_quadratic_space(Place::Finite(3));
        let v = join_pair(0b01, 0b10, Place::Finite(3));
        assert_eq!(sp.q(v), -1);
    }

    #[test]
    fn form_induces_pairing_everywhere() {
        for place in [Place::Real, Place::Finite(2), Place::Finite(5)] {
            let sp = local_quadratic_space_with_corrections(place, 0b1, 0b10);
            let n = 1u64 << sp.dim();
            for x in 0..n {
                for y in 0..n {
                    assert_eq!(sp.pairing(x, y), sp.pairing(y, x));
                    // bilinearity of the pairing in the first argument
                    for z in 0..n {
                        assert_eq!(
                            sp.pairing(x ^ z, y),
                            sp.pairing(x, y) * sp.pairing(z, y)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn m2_has_exactly_six_maximal_isotropics() {
        let space = m2_determinant_space();
        let found = space.maximal_isotropics();
        assert_eq!(found.len(), 6);
        let expected: BTreeSet<_> = m2_isotropic_families().into_iter().collect();
        let got: BTreeSet<_> = found.into_iter().collect();
        assert_eq!(expected, got);
    }

    #[test]
    fn hyperbolic_plane_has_two() {
        let sp = QuadSpace::from_fn(2, |v| if v == 0b11 { -1 } else { 1 });
        let iso = sp.maximal_isotropics();
        assert_eq!(iso.len(), 2);
        assert!(iso.iter().all(|s| s.dim() == 1));
    }

    #[test]
    fn zero_space_has_one() {
        let sp = QuadSpace::from_fn(0, |_| 1);
        let iso = sp.maximal_isotropics();
        assert_eq!(iso.len(), 1);
        assert_eq!(iso[0].dim(), 0);
    }

    #[test]
    fn local_space_isotropic_dims() {
        for (place, want) in [
            (Place::Finite(5), 2usize),
            (Place::Finite(2), 3),
            (Place::Real, 1),
        ] {
            let sp = local_quadratic_space(place);
            let iso = sp.maximal_isotropics();
            assert!(iso.iter().all(|s| s.dim() == want), "at {place}");
        }
    }

    #[test]
    fn classify_examples() {
        let c = |n: i128| SquareClass::from_integer(n).unwrap();
        let v = vec![(c(1), c(3)), (c(1), c(5))];
        assert_eq!(classify_degenerate(&v, 100).unwrap(), Degeneracy::FirstProjectionKills);

        let v = vec![(c(3), c(3)), (c(5), c(5))];
        assert_eq!(classify_degenerate(&v, 100).unwrap(), Degeneracy::SumProjectionKills);

        // the first prime where both 3 and 5 are nonresidues is 7, so the
        // scan's witness is 7; 17 is a later witness of the same kind
        let v = vec![(c(3), c(1)), (c(1), c(5))];
        match classify_degenerate(&v, 1000).unwrap() {
            Degeneracy::Nondegenerate { witness } => {
                assert_eq!(witness, 7);
                assert_eq!(legendre(3, 17), -1);
                assert_eq!(legendre(5, 17), -1);
            }
            other => panic!("expected a witness, got {other:?}"),
        }
    }

    #[test]
    fn kmr_parity_over_all_triples_at_5() {
        let space = local_quadratic_space(Place::Finite(5));
        let iso = space.maximal_isotropics();
        let mut checked = 0;
        for a in &iso {
            for l in &iso {
                for h in &iso {
                    if l.intersect(h).dim() != 0 {
                        continue;
                    }
                    assert!(kmr_parity_check(a, l, h, &space).unwrap());
                    checked += 1;
                }
            }
        }
        assert!(checked > 0);
    }
}
