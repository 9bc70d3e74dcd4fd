//! Places of ℚ, global and local square classes, Hilbert symbols, and
//! deterministic prime search under congruence / residue-symbol / sign
//! constraints.
//!
//! A global square class is a sign together with a squarefree support; the
//! group law is sign product and symmetric difference of supports.  Local
//! square-class groups have order 2 at the real place, 4 at odd primes and
//! 8 at 2, with canonical representatives fixed once and for all:
//! `{±1}` at ∞, `{1, u, p, up}` at odd `p` (with `u` the least positive
//! non-residue), and `{±1, ±2, ±5, ±10}` at 2.

use std::collections::BTreeMap;
use std::fmt;

use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QLocalError {
    #[error("zero is not a square class")]
    ZeroInput,
    #[error("congruence system is inconsistent: {0}")]
    Inconsistent(String),
    #[error("no prime found within {0} candidates")]
    NotFound(u64),
}

/// A place of ℚ: the real place or a finite prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    /// The unique real place.
    Real,
    /// A finite prime p.
    Finite(u64),
}

impl Place {
    pub fn is_finite(&self) -> bool {
        matches!(self, Place::Finite(_))
    }

    pub fn prime(&self) -> Option<u64> {
        match self {
            Place::Real => None,
            Place::Finite(p) => Some(*p),
        }
    }

    /// 𝔽₂-dimension of ℚ_v*/ℚ_v*² at this place.
    pub fn local_dim(&self) -> usize {
        match self {
            Place::Real => 1,
            Place::Finite(2) => 3,
            Place::Finite(_) => 2,
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => write!(f, "oo"),
            Place::Finite(p) => write!(f, "{}", p),
        }
    }
}

// ---------------------------------------------------------------------------
// basic integer arithmetic helpers
// ---------------------------------------------------------------------------

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin, valid for all `n < 3.3 * 10^24` with this
/// base set; far beyond anything this crate tests.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes up to `bound` inclusive, by sieve.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return vec![];
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            out.push(p as u64);
            let mut q = p * p;
            while q <= n {
                composite[q] = true;
                q += p;
            }
        }
    }
    out
}

fn pollard_rho(n: u64) -> u64 {
    // n odd, composite
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = num::integer::gcd(x.abs_diff(y).max(1), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Prime factorization of |n| as a sorted map p -> exponent.
pub fn factor(n: i128) -> BTreeMap<u64, u32> {
    let mut out = BTreeMap::new();
    let mut m = n.unsigned_abs();
    if m == 0 {
        return out;
    }
    for p in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while m % p == 0 {
            *out.entry(p as u64).or_insert(0) += 1;
            m /= p;
        }
    }
    let mut d = 49u128;
    while d * d <= m && d < 1_000_000 {
        while m % d == 0 {
            *out.entry(d as u64).or_insert(0) += 1;
            m /= d;
        }
        d += 2;
    }
    // what is left is 1, a prime, or a product of primes > 10^6
    let mut stack = vec![m];
    while let Some(v) = stack.pop() {
        if v == 1 {
            continue;
        }
        assert!(v <= u64::MAX as u128, "factor: cofactor {v} out of range");
        let v = v as u64;
        if is_prime(v) {
            *out.entry(v).or_insert(0) += 1;
            continue;
        }
        let f = pollard_rho(v);
        stack.push(f as u128);
        stack.push((v / f) as u128);
    }
    out
}

/// Legendre symbol (a | p) for odd prime p, as ±1 (a coprime to p) or 0.
pub fn legendre(a: i128, p: u64) -> i8 {
    debug_assert!(p > 2 && is_prime(p));
    let r = a.rem_euclid(p as i128) as u64;
    if r == 0 {
        return 0;
    }
    let e = pow_mod(r, (p - 1) / 2, p);
    if e == 1 {
        1
    } else {
        -1
    }
}

/// Least positive quadratic non-residue modulo the odd prime p.
pub fn least_nonresidue(p: u64) -> u64 {
    debug_assert!(p > 2);
    let mut u = 2;
    while legendre(u as i128, p) != -1 {
        u += 1;
    }
    u
}

// ---------------------------------------------------------------------------
// square classes
// ---------------------------------------------------------------------------

/// A class of ℚ*/ℚ*²: a sign and the squarefree support.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SquareClass {
    negative: bool,
    support: Vec<u64>, // strictly increasing primes
}

impl SquareClass {
    pub fn one() -> Self {
        SquareClass::default()
    }

    pub fn minus_one() -> Self {
        SquareClass { negative: true, support: vec![] }
    }

    /// Builds a class from a sign and a set of primes (deduplicated mod 2).
    pub fn from_parts(negative: bool, primes: &[u64]) -> Self {
        let mut counts: BTreeMap<u64, u32> = BTreeMap::new();
        for &p in primes {
            debug_assert!(is_prime(p), "{p} is not prime");
            *counts.entry(p).or_insert(0) += 1;
        }
        let support = counts
            .into_iter()
            .filter(|(_, e)| e % 2 == 1)
            .map(|(p, _)| p)
            .collect();
        SquareClass { negative, support }
    }

    pub fn from_integer(n: i128) -> Result<Self, QLocalError> {
        if n == 0 {
            return Err(QLocalError::ZeroInput);
        }
        let support = factor(n)
            .into_iter()
            .filter(|(_, e)| e % 2 == 1)
            .map(|(p, _)| p)
            .collect();
        Ok(SquareClass { negative: n < 0, support })
    }

    pub fn from_bigint(n: &BigInt) -> Result<Self, QLocalError> {
        if n.is_zero() {
            return Err(QLocalError::ZeroInput);
        }
        // strip squares prime by prime via trial division + rho on the rest
        if let Ok(small) = n.to_string().parse::<i128>() {
            return Self::from_integer(small);
        }
        // fall back: factor |n| with BigInt trial division up to 10^6 and
        // require the cofactor to be a perfect square times a u64 prime
        let mut m = n.abs();
        let mut support = Vec::new();
        for p in primes_up_to(1_000_000) {
            let bp = BigInt::from(p);
            let mut e = 0u32;
            while (&m % &bp).is_zero() {
                m /= &bp;
                e += 1;
            }
            if e % 2 == 1 {
                support.push(p);
            }
            if m.is_one() {
                break;
            }
        }
        if !m.is_one() {
            let s = m.sqrt();
            if &s * &s == m {
                // even power, nothing to add
            } else {
                let r: u64 = (&m).try_into().map_err(|_| {
                    QLocalError::Inconsistent("unfactorable large cofactor".into())
                })?;
                if !is_prime(r) {
                    return Err(QLocalError::Inconsistent(
                        "unfactorable large cofactor".into(),
                    ));
                }
                support.push(r);
                support.sort_unstable();
            }
        }
        Ok(SquareClass { negative: n.is_negative(), support })
    }

    /// Squarefree part of num/den (same class as the rational itself).
    pub fn from_rational(num: &BigInt, den: &BigInt) -> Result<Self, QLocalError> {
        if num.is_zero() || den.is_zero() {
            return Err(QLocalError::ZeroInput);
        }
        Self::from_bigint(&(num * den))
    }

    pub fn is_trivial(&self) -> bool {
        !self.negative && self.support.is_empty()
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn support(&self) -> &[u64] {
        &self.support
    }

    /// Group law: product modulo squares.
    pub fn mul(&self, other: &SquareClass) -> SquareClass {
        let mut support = Vec::with_capacity(self.support.len() + other.support.len());
        let (mut i, mut j) = (0, 0);
        while i < self.support.len() && j < other.support.len() {
            match self.support[i].cmp(&other.support[j]) {
                std::cmp::Ordering::Less => {
                    support.push(self.support[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    support.push(other.support[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        support.extend_from_slice(&self.support[i..]);
        support.extend_from_slice(&other.support[j..]);
        SquareClass { negative: self.negative ^ other.negative, support }
    }

    /// The canonical signed squarefree integer representative.
    pub fn representative(&self) -> i128 {
        let mut r: i128 = 1;
        for &p in &self.support {
            r = r.checked_mul(p as i128).expect("representative overflow");
        }
        if self.negative {
            -r
        } else {
            r
        }
    }

    /// p-adic valuation mod 2 (0 or 1).
    pub fn valuation_parity(&self, p: u64) -> u8 {
        u8::from(self.support.binary_search(&p).is_ok())
    }

    /// The unit part at p reduced mod m (m a power of p times anything
    /// coprime works; used with m = p or m = 8).
    fn unit_part_mod(&self, p: u64, m: u64) -> u64 {
        let mut r: u64 = if self.negative { m - 1 } else { 1 };
        for &q in &self.support {
            if q != p {
                r = mul_mod(r, q % m, m);
            }
        }
        r
    }

    /// True iff the class is a square in ℚ_v*.
    pub fn is_local_square(&self, v: Place) -> bool {
        restrict(self, v).is_trivial()
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.representative())
    }
}

/// A local square class, as a bit vector over the canonical basis of
/// ℚ_v*/ℚ_v*²: `[u, p]` at odd p, `[-1, 5, 2]` at 2, `[-1]` at ∞.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LocalClass {
    pub place: Place,
    pub mask: u8,
}

impl LocalClass {
    pub fn is_trivial(&self) -> bool {
        self.mask == 0
    }

    /// Canonical integer representative of the class.
    pub fn representative(&self) -> i64 {
        match self.place {
            Place::Real => {
                if self.mask & 1 == 1 {
                    -1
                } else {
                    1
                }
            }
            Place::Finite(2) => {
                let mut r: i64 = 1;
                if self.mask & 1 == 1 {
                    r = -r;
                }
                if self.mask & 2 == 2 {
                    r *= 5;
                }
                if self.mask & 4 == 4 {
                    r *= 2;
                }
                r
            }
            Place::Finite(p) => {
                let mut r: i64 = 1;
                if self.mask & 1 == 1 {
                    r *= least_nonresidue(p) as i64;
                }
                if self.mask & 2 == 2 {
                    r *= p as i64;
                }
                r
            }
        }
    }
}

/// Restriction ℚ*/ℚ*² → ℚ_v*/ℚ_v*², a group homomorphism.
pub fn restrict(x: &SquareClass, v: Place) -> LocalClass {
    let mask = match v {
        Place::Real => u8::from(x.negative),
        Place::Finite(2) => {
            let v2 = x.valuation_parity(2);
            let u = x.unit_part_mod(2, 8); // odd, mod 8
            let (m1, m5) = match u {
                1 => (0u8, 0u8),
                3 => (1, 1), // 3 = -5 mod squares in Z_2
                5 => (0, 1),
                7 => (1, 0), // 7 = -1
                _ => unreachable!(),
            };
            m1 | (m5 << 1) | (v2 << 2)
        }
        Place::Finite(p) => {
            let vp = x.valuation_parity(p);
            let u = x.unit_part_mod(p, p);
            let nonres = u8::from(legendre(u as i128, p) == -1);
            nonres | (vp << 1)
        }
    };
    LocalClass { place: v, mask }
}

/// Local restriction of an arbitrary nonzero integer, without factoring.
pub fn restrict_bigint(n: &BigInt, v: Place) -> LocalClass {
    debug_assert!(!n.is_zero());
    match v {
        Place::Real => LocalClass { place: v, mask: u8::from(n.is_negative()) },
        Place::Finite(p) => {
            let bp = BigInt::from(p);
            let mut m = n.clone();
            let mut val = 0u64;
            while (&m % &bp).is_zero() {
                m /= &bp;
                val += 1;
            }
            let mask = if p == 2 {
                let u = (m.mod_floor(&BigInt::from(8u8))).to_string().parse::<u64>().unwrap();
                let (m1, m5) = match u {
                    1 => (0u8, 0u8),
                    3 => (1, 1),
                    5 => (0, 1),
                    7 => (1, 0),
                    _ => unreachable!(),
                };
                m1 | (m5 << 1) | (((val % 2) as u8) << 2)
            } else {
                let u: u64 = m.mod_floor(&bp).try_into().unwrap();
                let nonres = u8::from(legendre(u as i128, p) == -1);
                nonres | (((val % 2) as u8) << 1)
            };
            LocalClass { place: v, mask }
        }
    }
}

// ---------------------------------------------------------------------------
// Hilbert symbols
// ---------------------------------------------------------------------------

fn two_adic_eps(u: i128) -> u8 {
    // (u-1)/2 mod 2 for odd u
    ((u.rem_euclid(8) - 1) / 2 % 2) as u8
}

fn two_adic_omega(u: i128) -> u8 {
    // (u^2-1)/8 mod 2 for odd u
    let r = u.rem_euclid(8);
    u8::from(r == 3 || r == 5)
}

/// Hilbert symbol (a, b)_v on nonzero rationals given as square classes.
///
/// Convention at the real place: −1 iff both arguments are negative.
pub fn hilbert_symbol(a: &SquareClass, b: &SquareClass, v: Place) -> i8 {
    match v {
        Place::Real => {
            if a.negative && b.negative {
                -1
            } else {
                1
            }
        }
        Place::Finite(2) => {
            let va = a.valuation_parity(2);
            let vb = b.valuation_parity(2);
            let ua = a.unit_part_mod(2, 8) as i128;
            let ub = b.unit_part_mod(2, 8) as i128;
            let e = two_adic_eps(ua) * two_adic_eps(ub)
                + va * two_adic_omega(ub)
                + vb * two_adic_omega(ua);
            if e % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Place::Finite(p) => {
            let va = a.valuation_parity(p);
            let vb = b.valuation_parity(p);
            let ua = a.unit_part_mod(p, p);
            let ub = b.unit_part_mod(p, p);
            let mut s = 1i8;
            if va & vb == 1 && p % 4 == 3 {
                s = -s;
            }
            if vb == 1 && legendre(ua as i128, p) == -1 {
                s = -s;
            }
            if va == 1 && legendre(ub as i128, p) == -1 {
                s = -s;
            }
            s
        }
    }
}

/// Hilbert symbol of two integers at a place.
pub fn hilbert_symbol_int(a: i128, b: i128, v: Place) -> Result<i8, QLocalError> {
    let ca = SquareClass::from_integer(a)?;
    let cb = SquareClass::from_integer(b)?;
    Ok(hilbert_symbol(&ca, &cb, v))
}

/// All local Hilbert symbols of (a, b) over the support of both arguments
/// together with 2 and ∞, plus the global product (which must be +1).
pub struct ReciprocityAudit {
    pub symbols: BTreeMap<Place, i8>,
    pub product: i8,
}

pub fn reciprocity_audit(a: &SquareClass, b: &SquareClass) -> ReciprocityAudit {
    let mut places = vec![Place::Real, Place::Finite(2)];
    for &p in a.support().iter().chain(b.support().iter()) {
        if p != 2 {
            places.push(Place::Finite(p));
        }
    }
    places.sort_unstable();
    places.dedup();
    let mut symbols = BTreeMap::new();
    let mut product = 1i8;
    for v in places {
        let s = hilbert_symbol(a, b, v);
        product *= s;
        symbols.insert(v, s);
    }
    ReciprocityAudit { symbols, product }
}

// ---------------------------------------------------------------------------
// deterministic prime search
// ---------------------------------------------------------------------------

/// A prime element of ℚ: a rational prime with a sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeElement {
    pub prime: u64,
    pub negative: bool,
}

impl PrimeElement {
    pub fn value(&self) -> i64 {
        if self.negative {
            -(self.prime as i64)
        } else {
            self.prime as i64
        }
    }

    pub fn class(&self) -> SquareClass {
        SquareClass::from_parts(self.negative, &[self.prime])
    }
}

/// Search request for `find_prime`: scan primes in increasing order and
/// return the first one matching every constraint.
#[derive(Debug, Clone, Default)]
pub struct PrimeSearch {
    /// (modulus, residue) pairs; must be CRT-consistent with residues
    /// coprime to their moduli.
    pub congruences: Vec<(u64, u64)>,
    /// Sign of the returned prime element.
    pub negative: bool,
    /// (q, s): require the Legendre symbol (p | q) = s for the odd prime q.
    pub legendre: Vec<(u64, i8)>,
    /// Primes that must be skipped.
    pub exclude: Vec<u64>,
    /// Number of progression candidates to scan before giving up.
    pub bound: u64,
}

impl PrimeSearch {
    pub fn new() -> Self {
        PrimeSearch { bound: 1_000_000, ..Default::default() }
    }

    pub fn congruent(mut self, modulus: u64, residue: u64) -> Self {
        self.congruences.push((modulus, residue));
        self
    }

    pub fn negative(mut self, neg: bool) -> Self {
        self.negative = neg;
        self
    }

    pub fn legendre(mut self, q: u64, sign: i8) -> Self {
        self.legendre.push((q, sign));
        self
    }

    pub fn excluding(mut self, primes: &[u64]) -> Self {
        self.exclude.extend_from_slice(primes);
        self
    }

    pub fn bound(mut self, bound: u64) -> Self {
        self.bound = bound;
        self
    }

    pub fn run(&self) -> Result<PrimeElement, QLocalError> {
        find_prime(self)
    }
}

fn crt_merge(congruences: &[(u64, u64)]) -> Result<(u128, u128), QLocalError> {
    let mut m: u128 = 1;
    let mut r: u128 = 0;
    for &(mi, ri) in congruences {
        if mi == 0 {
            return Err(QLocalError::Inconsistent("zero modulus".into()));
        }
        let ri = (ri % mi) as u128;
        if mi > 1 && num::integer::gcd(ri, mi as u128) != 1 {
            return Err(QLocalError::Inconsistent(format!(
                "residue {ri} not coprime to modulus {mi}"
            )));
        }
        let g = num::integer::gcd(m, mi as u128);
        if (r % g) != (ri % g) {
            return Err(QLocalError::Inconsistent(format!(
                "congruences conflict at modulus {mi}"
            )));
        }
        // merge r mod m with ri mod mi
        let lcm = m / g * mi as u128;
        let mut k = 0u128;
        // small moduli only; step search is fine
        while (r + k * m) % mi as u128 != ri {
            k += 1;
        }
        r += k * m;
        m = lcm;
        r %= m;
    }
    Ok((m, r))
}

/// Deterministic prime search: the smallest prime satisfying all
/// congruences, Legendre conditions and exclusions, returned with the
/// requested sign.  Scans the arithmetic progression in increasing order.
pub fn find_prime(search: &PrimeSearch) -> Result<PrimeElement, QLocalError> {
    let (m, r) = crt_merge(&search.congruences)?;
    if m > 1 && num::integer::gcd(m, r.max(1)) != 1 {
        return Err(QLocalError::Inconsistent(format!(
            "residue {r} not coprime to merged modulus {m}"
        )));
    }
    let bound = if search.bound == 0 { 1_000_000 } else { search.bound };
    let mut candidate = if r == 0 { m } else { r };
    if candidate < 2 {
        candidate += m;
    }
    for _ in 0..bound {
        if candidate > u64::MAX as u128 {
            break;
        }
        let c = candidate as u64;
        candidate += m.max(1);
        if !is_prime(c) || search.exclude.contains(&c) {
            continue;
        }
        if search
            .legendre
            .iter()
            .all(|&(q, s)| legendre(c as i128, q) == s)
        {
            return Ok(PrimeElement { prime: c, negative: search.negative });
        }
    }
    Err(QLocalError::NotFound(bound))
}

/// Chebotarev-style hunt: the smallest prime p (outside `exclude`) at which
/// each listed integer has the requested Legendre symbol (value | p).
pub fn find_prime_with_residue_conditions(
    conditions: &[(i128, i8)],
    exclude: &[u64],
    bound: u64,
) -> Result<PrimeElement, QLocalError> {
    let mut scanned = 0u64;
    let mut p = 2u64;
    while scanned < bound {
        p += 1;
        if !is_prime(p) {
            continue;
        }
        scanned += 1;
        if exclude.contains(&p) {
            continue;
        }
        if conditions.iter().any(|&(v, _)| v.rem_euclid(p as i128) == 0) {
            continue;
        }
        if conditions.iter().all(|&(v, s)| legendre(v, p) == s) {
            return Ok(PrimeElement { prime: p, negative: false });
        }
    }
    Err(QLocalError::NotFound(bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn square_class_canonical_form() {
        let c = SquareClass::from_integer(18).unwrap(); // 2 * 3^2
        assert_eq!(c.representative(), 2);
        let d = SquareClass::from_integer(-50).unwrap(); // -2 * 5^2
        assert_eq!(d.representative(), -2);
        assert_eq!(c.mul(&d).representative(), -1);
        assert!(SquareClass::from_integer(0).is_err());
    }

    #[test]
    fn restriction_examples() {
        // 18 = 2 * 3^2 restricts to the nonresidue class at 3
        let c = SquareClass::from_integer(18).unwrap();
        let l = restrict(&c, Place::Finite(3));
        assert_eq!(l.mask, 0b01);
        assert_eq!(l.representative(), 2); // least nonresidue mod 3

        // 8 ~ 2 at the prime 2
        let c = SquareClass::from_integer(8).unwrap();
        assert_eq!(restrict(&c, Place::Finite(2)).representative(), 2);

        // positive numbers are trivial at the real place
        let c = SquareClass::from_integer(7).unwrap();
        assert!(restrict(&c, Place::Real).is_trivial());
    }

    #[test]
    fn restriction_is_homomorphism() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let places = [Place::Real, Place::Finite(2), Place::Finite(3), Place::Finite(7)];
        for _ in 0..200 {
            let a = rng.gen_range(1..500i128) * if rng.gen_bool(0.5) { -1 } else { 1 };
            let b = rng.gen_range(1..500i128) * if rng.gen_bool(0.5) { -1 } else { 1 };
            let ca = SquareClass::from_integer(a).unwrap();
            let cb = SquareClass::from_integer(b).unwrap();
            let cab = ca.mul(&cb);
            for v in places {
                assert_eq!(
                    restrict(&cab, v).mask,
                    restrict(&ca, v).mask ^ restrict(&cb, v).mask
                );
            }
        }
    }

    #[test]
    fn hilbert_fixed_values() {
        let m1 = SquareClass::minus_one();
        assert_eq!(hilbert_symbol(&m1, &m1, Place::Real), -1);
        assert_eq!(hilbert_symbol_int(3, 5, Place::Finite(5)).unwrap(), -1);
        assert_eq!(hilbert_symbol_int(2, 17, Place::Finite(17)).unwrap(), 1);
        assert_eq!(hilbert_symbol_int(-1, -1, Place::Finite(2)).unwrap(), -1);
    }

    #[test]
    fn hilbert_bilinear_and_symmetric() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let places = [
            Place::Real,
            Place::Finite(2),
            Place::Finite(3),
            Place::Finite(5),
            Place::Finite(13),
        ];
        for _ in 0..300 {
            let pick = |rng: &mut rand_chacha::ChaCha8Rng| {
                let v = rng.gen_range(1..300i128);
                if rng.gen_bool(0.5) {
                    -v
                } else {
                    v
                }
            };
            let (a, b, c) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
            for v in places {
                let ab = hilbert_symbol_int(a * b, c, v).unwrap();
                let s = hilbert_symbol_int(a, c, v).unwrap() * hilbert_symbol_int(b, c, v).unwrap();
                assert_eq!(ab, s, "bilinearity fails at {v} for ({a},{b},{c})");
                assert_eq!(
                    hilbert_symbol_int(a, b, v).unwrap(),
                    hilbert_symbol_int(b, a, v).unwrap()
                );
            }
        }
    }

    #[test]
    fn reciprocity_examples() {
        let a = SquareClass::from_integer(3).unwrap();
        let b = SquareClass::from_integer(5).unwrap();
        let audit = reciprocity_audit(&a, &b);
        assert_eq!(audit.product, 1);
        assert_eq!(audit.symbols[&Place::Finite(3)], -1);
        assert_eq!(audit.symbols[&Place::Finite(5)], -1);
        assert_eq!(audit.symbols[&Place::Finite(2)], 1);
        assert_eq!(audit.symbols[&Place::Real], 1);

        let m1 = SquareClass::minus_one();
        let audit = reciprocity_audit(&m1, &m1);
        assert_eq!(audit.product, 1);
        assert_eq!(audit.symbols[&Place::Real], -1);
        assert_eq!(audit.symbols[&Place::Finite(2)], -1);

        let one = SquareClass::one();
        let n = SquareClass::from_integer(30).unwrap();
        let audit = reciprocity_audit(&one, &n);
        assert!(audit.symbols.values().all(|&s| s == 1));
    }

    #[test]
    fn find_prime_examples() {
        let p = PrimeSearch::new()
            .congruent(8, 1)
            .excluding(&[2, 3, 5, 7, 11, 13])
            .run()
            .unwrap();
        assert_eq!(p.prime, 17);

        let p = PrimeSearch::new().congruent(24, 1).legendre(5, 1).run().unwrap();
        assert_eq!(p.prime, 241);

        let err = PrimeSearch::new().congruent(4, 0).run();
        assert!(matches!(err, Err(QLocalError::Inconsistent(_))));
    }

    #[test]
    fn find_prime_with_residue_conditions_works() {
        // smallest p where 3 and 5 are both nonresidues
        let p = find_prime_with_residue_conditions(&[(3, -1), (5, -1)], &[], 10_000).unwrap();
        assert_eq!(p.prime, 7);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_class() -> impl Strategy<Value = SquareClass> {
            (any::<bool>(), proptest::bits::u8::ANY).prop_map(|(neg, bits)| {
                let primes = [2u64, 3, 5, 7, 11, 13, 17, 19];
                let sup: Vec<u64> = primes
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| bits >> i & 1 == 1)
                    .map(|(_, &p)| p)
                    .collect();
                SquareClass::from_parts(neg, &sup)
            })
        }

        proptest! {
            #[test]
            fn class_group_law_is_involutive(a in arb_class(), b in arb_class()) {
                prop_assert!(a.mul(&a).is_trivial());
                prop_assert_eq!(a.mul(&b), b.mul(&a));
                prop_assert_eq!(a.mul(&b).mul(&b), a.clone());
            }

            #[test]
            fn hilbert_is_bilinear_and_symmetric(
                a in arb_class(),
                b in arb_class(),
                c in arb_class(),
            ) {
                for v in [Place::Real, Place::Finite(2), Place::Finite(3), Place::Finite(7)] {
                    prop_assert_eq!(
                        hilbert_symbol(&a.mul(&b), &c, v),
                        hilbert_symbol(&a, &c, v) * hilbert_symbol(&b, &c, v)
                    );
                    prop_assert_eq!(hilbert_symbol(&a, &b, v), hilbert_symbol(&b, &a, v));
                }
            }

            #[test]
            fn restriction_respects_products(a in arb_class(), b in arb_class()) {
                for v in [Place::Real, Place::Finite(2), Place::Finite(5)] {
                    prop_assert_eq!(
                        restrict(&a.mul(&b), v).mask,
                        restrict(&a, v).mask ^ restrict(&b, v).mask
                    );
                }
            }
        }
    }

    #[test]
    fn factoring_and_primality() {
        assert!(is_prime(2) && is_prime(97) && !is_prime(91));
        let f = factor(2 * 2 * 3 * 49 * 101);
        assert_eq!(f[&2], 2);
        assert_eq!(f[&3], 1);
        assert_eq!(f[&7], 2);
        assert_eq!(f[&101], 1);
    }
}
