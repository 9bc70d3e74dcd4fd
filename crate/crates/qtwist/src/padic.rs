//! Local solvability of systems of integral quadratic forms over ℚ_p.
//!
//! The decision procedure lifts primitive solutions level by level modulo
//! p^j, deduplicating up to unit scaling, and exits early as soon as a
//! solution is certified liftable by the quantitative Hensel criterion
//! (every relevant Jacobian minor of valuation e lifts once j ≥ 2e + 1).
//! If the level budget k is exhausted while primitive solutions survive,
//! the system is declared solvable at the configured precision.

/// A quadratic form with integer coefficients in `n` variables, stored as
/// the upper-triangular coefficient list: `coeffs[(i, j)]` multiplies
/// `x_i x_j` for `i <= j`.
#[derive(Debug, Clone)]
pub struct QuadraticForm {
    pub n: usize,
    pub coeffs: Vec<(usize, usize, i128)>,
}

impl QuadraticForm {
    pub fn diagonal(diag: &[i128]) -> Self {
        QuadraticForm {
            n: diag.len(),
            coeffs: diag
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(i, &c)| (i, i, c))
                .collect(),
        }
    }

    fn eval_mod(&self, x: &[u64], m: u128) -> u128 {
        let mut acc: u128 = 0;
        for &(i, j, c) in &self.coeffs {
            let prod = (x[i] as u128 % m) * (x[j] as u128 % m) % m;
            let c = c.rem_euclid(m as i128) as u128;
            acc = (acc + c * prod) % m;
        }
        acc
    }

    /// Gradient entry d/dx_k evaluated mod m.
    fn grad_mod(&self, x: &[u64], k: usize, m: u128) -> u128 {
        let mut acc: u128 = 0;
        for &(i, j, c) in &self.coeffs {
            let c = c.rem_euclid(m as i128) as u128;
            if i == j {
                if i == k {
                    acc = (acc + 2 * c % m * (x[i] as u128 % m)) % m;
                }
            } else {
                if i == k {
                    acc = (acc + c * (x[j] as u128 % m)) % m;
                }
                if j == k {
                    acc = (acc + c * (x[i] as u128 % m)) % m;
                }
            }
        }
        acc % m
    }
}

fn vp(mut x: u128, p: u64) -> u32 {
    if x == 0 {
        return u32::MAX;
    }
    let mut v = 0;
    while x % p as u128 == 0 {
        x /= p as u128;
        v += 1;
    }
    v
}

/// Decides whether the simultaneous system `forms = 0` has a common
/// nontrivial primitive zero over ℤ_p, probing up to precision `p^k`.
pub fn system_solvable(forms: &[QuadraticForm], p: u64, k: u32) -> bool {
    let n = forms[0].n;
    debug_assert!(forms.iter().all(|f| f.n == n));
    let k = k.max(2);
    let pk = |j: u32| (p as u128).checked_pow(j).expect("precision overflow");

    // level sets of primitive solutions mod p^j, canonicalized up to unit
    // scaling; start at j = 1
    let m1 = pk(1);
    let mut level: Vec<Vec<u64>> = Vec::new();
    let mut x = vec![0u64; n];
    loop {
        if x.iter().any(|&c| c != 0) && forms.iter().all(|f| f.eval_mod(&x, m1) == 0) {
            if let Some(c) = canonicalize(&x, p, 1) {
                level.push(c);
            }
        }
        // odometer over [0, p)^n
        let mut i = 0;
        loop {
            if i == n {
                break;
            }
            x[i] += 1;
            if x[i] < p {
                break;
            }
            x[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
    }
    level.sort_unstable();
    level.dedup();

    for j in 1..=k {
        if level.is_empty() {
            return false;
        }
        let m = pk(j);
        // certification pass
        for x in &level {
            if certified(forms, x, p, j, m) {
                return true;
            }
        }
        if j == k {
            // primitive solutions survive at full precision
            return true;
        }
        // lift to level j + 1
        let mnext = pk(j + 1);
        let mut next: Vec<Vec<u64>> = Vec::new();
        for x in &level {
            lift_one(forms, x, p, j, mnext, &mut next);
        }
        next.sort_unstable();
        next.dedup();
        level = next;
    }
    false
}

fn lift_one(
    forms: &[QuadraticForm],
    x: &[u64],
    p: u64,
    j: u32,
    mnext: u128,
    out: &mut Vec<Vec<u64>>,
) {
    let n = x.len();
    let step = (mnext / p as u128) as u64; // p^j
    let mut digits = vec![0u64; n];
    loop {
        let cand: Vec<u64> = (0..n)
            .map(|i| (x[i] as u128 + digits[i] as u128 * step as u128).rem_euclid(mnext) as u64)
            .collect();
        if forms.iter().all(|f| f.eval_mod(&cand, mnext) == 0) {
            if let Some(c) = canonicalize(&cand, p, j + 1) {
                out.push(c);
            }
        }
        let mut i = 0;
        loop {
            if i == n {
                return;
            }
            digits[i] += 1;
            if digits[i] < p {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// Scales a primitive vector mod p^j so that the first coordinate of
/// minimal valuation has unit part 1; returns None for imprimitive input.
fn canonicalize(x: &[u64], p: u64, j: u32) -> Option<Vec<u64>> {
    let m = (p as u128).pow(j);
    let lead = x
        .iter()
        .enumerate()
        .min_by_key(|(i, &c)| (vp(c as u128, p), *i))
        .map(|(i, _)| i)?;
    let v = vp(x[lead] as u128, p);
    if v != 0 {
        return None; // not primitive
    }
    let inv = mod_inverse(x[lead] as u128, m)?;
    Some(x.iter().map(|&c| ((c as u128) * inv % m) as u64).collect())
}

fn mod_inverse(a: u128, m: u128) -> Option<u128> {
    let (mut t, mut newt) = (0i128, 1i128);
    let (mut r, mut newr) = (m as i128, (a % m) as i128);
    while newr != 0 {
        let q = r / newr;
        (t, newt) = (newt, t - q * newt);
        (r, newr) = (newr, r - q * newr);
    }
    if r != 1 {
        return None;
    }
    Some(t.rem_euclid(m as i128) as u128)
}

/// Quantitative Hensel check for a solution mod p^j of a system of one or
/// two quadrics: liftable when the system's Jacobian at x has a unimodular
/// enough minor, i.e. valuation e with j >= 2e + 1.
fn certified(forms: &[QuadraticForm], x: &[u64], p: u64, j: u32, m: u128) -> bool {
    let n = x.len();
    match forms.len() {
        1 => {
            let f = &forms[0];
            let e = (0..n).map(|k| vp(f.grad_mod(x, k, m), p)).min().unwrap_or(u32::MAX);
            e != u32::MAX && j > 2 * e && vp(forms[0].eval_mod(x, m), p).min(j) > 2 * e
        }
        2 => {
            // minimal valuation over all 2x2 minors of the 2 x n Jacobian
            let g0: Vec<u128> = (0..n).map(|k| forms[0].grad_mod(x, k, m)).collect();
            let g1: Vec<u128> = (0..n).map(|k| forms[1].grad_mod(x, k, m)).collect();
            let mut e = u32::MAX;
            for a in 0..n {
                for b in a + 1..n {
                    let minor =
                        (g0[a] * g1[b] % m + m - g0[b] * g1[a] % m) % m;
                    e = e.min(vp(minor, p));
                }
            }
            e != u32::MAX
                && j > 2 * e
                && forms
                    .iter()
                    .all(|f| vp(f.eval_mod(x, m), p).min(j) > 2 * e)
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn conic(a: i128, b: i128) -> Vec<QuadraticForm> {
        // z^2 - a x^2 - b y^2 in variables (x, y, z)
        vec![QuadraticForm::diagonal(&[-a, -b, 1])]
    }

    #[test]
    fn conic_solvability_matches_symbols() {
        use crate::qlocal::{hilbert_symbol_int, Place};
        for p in [2u64, 3, 5, 7, 13] {
            for a in [-5i128, -2, -1, 2, 3, 5, 10] {
                for b in [-6i128, -1, 1, 2, 7, 15] {
                    let k = vp((4 * a * b).unsigned_abs(), p) + 3;
                    let got = system_solvable(&conic(a, b), p, k);
                    let want = hilbert_symbol_int(a, b, Place::Finite(p)).unwrap() == 1;
                    assert_eq!(got, want, "(a,b,p)=({a},{b},{p})");
                }
            }
        }
    }

    #[test]
    fn insolvable_pair_dies() {
        // x^2 + y^2 + z^2 = 0 and x^2 - 7 w^2 = 0 have no common primitive
        // 7-adic zero: the first forces x=y=z=0 mod 7 repeatedly
        let f1 = QuadraticForm { n: 4, coeffs: vec![(0, 0, 1), (1, 1, 1), (2, 2, 1)] };
        let f2 = QuadraticForm { n: 4, coeffs: vec![(0, 0, 1), (3, 3, -7)] };
        assert!(!system_solvable(&[f1, f2], 7, 8));
    }
}
