//! Four affine linear forms in two integer variables, their local
//! densities, the singular series, convex search regions, and the sieve
//! counting lattice points where all four forms take prime values.
//!
//! The four forms come from a curve triple (a₁, a₂, a₃) and parameters
//! (κ, m, λ): with c = m²κX + 1 and d = m²κ(m²κY + λ),
//! Lᵢ = c + aᵢ·d for i ≤ 3 and L₄ = m²κY + λ, so that
//! κ·L₁L₂L₃L₄ = m⁻²·d·(c + a₁d)(c + a₂d)(c + a₃d).

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qlocal::{is_prime, primes_up_to};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConstellationError {
    #[error("curve roots must be pairwise distinct")]
    CoincidentRoots,
    #[error("m and kappa must be nonzero")]
    ZeroParameter,
    #[error("lambda must be coprime to m and kappa")]
    LambdaNotCoprime,
    #[error("homogeneous parts are linearly dependent")]
    DependentForms,
    #[error("system is inadmissible at p = {0}")]
    Inadmissible(u64),
    #[error("region has empty interior")]
    DegenerateRegion,
}

/// An affine form c_x·X + c_y·Y + c_0 over the integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineForm {
    pub cx: i128,
    pub cy: i128,
    pub c0: i128,
}

impl AffineForm {
    pub fn eval(&self, x: i64, y: i64) -> i128 {
        self.cx * x as i128 + self.cy * y as i128 + self.c0
    }

    fn eval_mod(&self, x: u64, y: u64, p: u64) -> u64 {
        let m = p as i128;
        (self.cx.rem_euclid(m) * x as i128
            + self.cy.rem_euclid(m) * y as i128
            + self.c0.rem_euclid(m))
        .rem_euclid(m) as u64
    }
}

/// The four forms together with their provenance parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearFormSystem {
    pub a: [i64; 3],
    pub kappa: i64,
    pub m: i64,
    pub lambda: i64,
    pub forms: [AffineForm; 4],
}

/// Builds the system, checking pairwise independence of the homogeneous
/// parts and the basic coprimality constraints on λ.
pub fn build_system(
    a: [i64; 3],
    kappa: i64,
    m: i64,
    lambda: i64,
) -> Result<LinearFormSystem, ConstellationError> {
    if a[0] == a[1] || a[0] == a[2] || a[1] == a[2] {
        return Err(ConstellationError::CoincidentRoots);
    }
    if m == 0 || kappa == 0 {
        return Err(ConstellationError::ZeroParameter);
    }
    if lambda == 0
        || num::integer::gcd(lambda.unsigned_abs(), m.unsigned_abs()) != 1
        || num::integer::gcd(lambda.unsigned_abs(), kappa.unsigned_abs()) != 1
    {
        return Err(ConstellationError::LambdaNotCoprime);
    }
    let mk = (m as i128) * (m as i128) * (kappa as i128);
    let mut forms = [AffineForm { cx: 0, cy: 0, c0: 0 }; 4];
    for i in 0..3 {
        forms[i] = AffineForm {
            cx: mk,
            cy: a[i] as i128 * mk * mk,
            c0: a[i] as i128 * mk * lambda as i128 + 1,
        };
    }
    forms[3] = AffineForm { cx: 0, cy: mk, c0: lambda as i128 };
    for i in 0..4 {
        for j in i + 1..4 {
            if forms[i].cx * forms[j].cy - forms[i].cy * forms[j].cx == 0 {
                return Err(ConstellationError::DependentForms);
            }
        }
    }
    Ok(LinearFormSystem { a, kappa, m, lambda, forms })
}

impl LinearFormSystem {
    /// c = m²κX + 1.
    pub fn c_value(&self, x: i64) -> i128 {
        let mk = (self.m as i128) * (self.m as i128) * (self.kappa as i128);
        mk * x as i128 + 1
    }

    /// d = m²κ(m²κY + λ) = m²κ·L₄.
    pub fn d_value(&self, y: i64) -> i128 {
        let mk = (self.m as i128) * (self.m as i128) * (self.kappa as i128);
        mk * self.forms[3].eval(0, y)
    }

    /// The twist value t = κ·L₁L₂L₃L₄ at a lattice point, as a big integer.
    pub fn t_value(&self, x: i64, y: i64) -> BigInt {
        let mut t = BigInt::from(self.kappa);
        for f in &self.forms {
            t *= BigInt::from(f.eval(x, y));
        }
        t
    }

    /// Primes at which the generic local-density count does not apply:
    /// divisors of the coefficients, constants and their pairwise
    /// resultants.
    fn exceptional_modulus(&self) -> i128 {
        let mut m: i128 = 6 * self.m as i128 * self.kappa as i128 * self.lambda as i128;
        for f in &self.forms {
            if f.c0 != 0 {
                m = m.saturating_mul(f.c0);
            }
        }
        for i in 0..3 {
            for j in i + 1..3 {
                m = m.saturating_mul((self.a[i] - self.a[j]) as i128);
            }
        }
        m
    }
}

/// Exact local density at p: (p/φ(p))⁴ times the proportion of residue
/// pairs where none of the four forms vanishes, by full enumeration.
pub fn beta_p(system: &LinearFormSystem, p: u64) -> BigRational {
    let mut count: u64 = 0;
    for x in 0..p {
        for y in 0..p {
            if system.forms.iter().all(|f| f.eval_mod(x, y, p) != 0) {
                count += 1;
            }
        }
    }
    let pb = BigInt::from(p);
    let phi = BigInt::from(p - 1);
    let norm = BigRational::new(pb.clone(), phi).pow(4);
    norm * BigRational::new(BigInt::from(count), &pb * &pb)
}

/// Closed form of the density at primes away from all coefficients and
/// constants: four distinct lines through a common point leave
/// (p−1)(p−3) of the p² residue pairs, giving p²(p−3)/(p−1)³.
fn beta_p_generic(p: u64) -> f64 {
    let p = p as f64;
    p * p * (p - 3.0) / ((p - 1.0) * (p - 1.0) * (p - 1.0))
}

/// Verifies β_p > 0 for every prime up to the bound (and up to the largest
/// coefficient prime); beyond that positivity is automatic.
pub fn admissibility_check(
    system: &LinearFormSystem,
    p_bound: u64,
) -> Result<(), ConstellationError> {
    let coeff_bound = system
        .forms
        .iter()
        .flat_map(|f| [f.cx.unsigned_abs(), f.cy.unsigned_abs(), f.c0.unsigned_abs()])
        .max()
        .unwrap_or(2)
        .min(100_000) as u64;
    for p in primes_up_to(p_bound.max(coeff_bound.min(1000))) {
        if beta_p(system, p).is_zero() {
            return Err(ConstellationError::Inadmissible(p));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SingularSeries {
    pub value: f64,
    pub cutoff: u64,
    /// Relative change of the partial product over the last decade of
    /// primes, as a truncation diagnostic.
    pub tail_change: f64,
}

/// The truncated singular series ∏_{p ≤ P} β_p.  Densities at small or
/// exceptional primes are enumerated exactly; the validated closed form
/// is used past the coefficient range.
pub fn singular_series(
    system: &LinearFormSystem,
    cutoff: u64,
) -> Result<SingularSeries, ConstellationError> {
    admissibility_check(system, 100)?;
    let exceptional = system.exceptional_modulus();
    let enum_bound = 300u64;
    let mut value = 1f64;
    let mut value_at_decade = 1f64;
    let decade = cutoff / 10;
    for p in primes_up_to(cutoff) {
        let factor = if p <= enum_bound || exceptional % p as i128 == 0 {
            beta_p(system, p).to_f64().unwrap()
        } else {
            beta_p_generic(p)
        };
        if factor == 0.0 {
            return Err(ConstellationError::Inadmissible(p));
        }
        value *= factor;
        if p <= decade {
            value_at_decade = value;
        }
    }
    let tail_change = if value_at_decade != 0.0 {
        (value / value_at_decade - 1.0).abs()
    } else {
        f64::INFINITY
    };
    Ok(SingularSeries { value, cutoff, tail_change })
}

// ---------------------------------------------------------------------------
// regions
// ---------------------------------------------------------------------------

/// An open half-plane a·x + b·y > c.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HalfPlane {
    pub a: i128,
    pub b: i128,
    pub c: i128,
}

/// A convex region given by finitely many open half-planes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Region {
    pub halfplanes: Vec<HalfPlane>,
}

impl Region {
    pub fn whole_plane() -> Self {
        Region { halfplanes: vec![] }
    }

    /// The region where all four forms are positive.
    pub fn all_forms_positive(system: &LinearFormSystem) -> Self {
        Region {
            halfplanes: system
                .forms
                .iter()
                .map(|f| HalfPlane { a: f.cx, b: f.cy, c: -f.c0 })
                .collect(),
        }
    }

    pub fn contains(&self, x: i64, y: i64) -> bool {
        self.halfplanes
            .iter()
            .all(|h| h.a * x as i128 + h.b * y as i128 > h.c)
    }
}

/// The growth constant C with vol(Ω ∩ [−H, H]²) ~ C·H²: computed exactly
/// as the area of the unit-box section of the homogenized region (the
/// constants only perturb the volume by a lower-order term).
pub fn region_volume(region: &Region) -> Result<BigRational, ConstellationError> {
    // clip [-1, 1]^2 by each homogenized half-plane a x + b y > 0
    let one = BigRational::from(BigInt::one());
    let mut poly: Vec<(BigRational, BigRational)> = vec![
        (-one.clone(), -one.clone()),
        (one.clone(), -one.clone()),
        (one.clone(), one.clone()),
        (-one.clone(), one.clone()),
    ];
    for h in &region.halfplanes {
        if h.a == 0 && h.b == 0 {
            continue;
        }
        let a = BigRational::from(BigInt::from(h.a));
        let b = BigRational::from(BigInt::from(h.b));
        let side = |p: &(BigRational, BigRational)| &a * &p.0 + &b * &p.1;
        let mut next: Vec<(BigRational, BigRational)> = Vec::new();
        for i in 0..poly.len() {
            let cur = poly[i].clone();
            let prev = poly[(i + poly.len() - 1) % poly.len()].clone();
            let sc = side(&cur);
            let sp = side(&prev);
            let cur_in = sc >= BigRational::zero();
            let prev_in = sp >= BigRational::zero();
            if cur_in != prev_in {
                // intersection of the edge with the boundary line
                let t = &sp / (&sp - &sc);
                let ix = &prev.0 + &t * (&cur.0 - &prev.0);
                let iy = &prev.1 + &t * (&cur.1 - &prev.1);
                next.push((ix, iy));
            }
            if cur_in {
                next.push(cur);
            }
        }
        poly = next;
        if poly.len() < 3 {
            return Err(ConstellationError::DegenerateRegion);
        }
    }
    // shoelace
    let mut area2 = BigRational::zero();
    for i in 0..poly.len() {
        let (x1, y1) = &poly[i];
        let (x2, y2) = &poly[(i + 1) % poly.len()];
        area2 += x1 * y2 - x2 * y1;
    }
    let area = area2.abs() / BigRational::from(BigInt::from(2));
    if area.is_zero() {
        return Err(ConstellationError::DegenerateRegion);
    }
    Ok(area)
}

/// Monte Carlo estimate of the same constant with its standard error.
pub fn region_volume_monte_carlo(region: &Region, samples: u64, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    for _ in 0..samples {
        let x: f64 = rng.gen_range(-1.0..1.0);
        let y: f64 = rng.gen_range(-1.0..1.0);
        let inside = region
            .halfplanes
            .iter()
            .all(|h| h.a as f64 * x + h.b as f64 * y > 0.0);
        if inside {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    let est = 4.0 * p;
    let se = 4.0 * (p * (1.0 - p) / samples as f64).sqrt();
    (est, se)
}

// ---------------------------------------------------------------------------
// the sieve
// ---------------------------------------------------------------------------

/// A lattice point where all four forms take prime-element values.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Witness {
    pub x: i64,
    pub y: i64,
    /// Signed values of L₁..L₄ at (x, y); each has prime absolute value.
    pub values: [i64; 4],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstellationReport {
    pub betas: Vec<(u64, f64)>,
    pub series: SingularSeries,
    pub volume_constant: f64,
    pub n: u64,
    pub witness_count: u64,
    /// Σ over witnesses of ∏ log|Lᵢ|.
    pub weighted_count: f64,
    pub prediction: f64,
    pub ratio: f64,
}

/// Enumerates the witnesses in Ω ∩ [−N, N]² in raster order.
pub fn sieve_witnesses(system: &LinearFormSystem, region: &Region, n: u64) -> Vec<Witness> {
    let n = n as i64;
    let mut out = Vec::new();
    for x in -n..=n {
        for y in -n..=n {
            if !region.contains(x, y) {
                continue;
            }
            let mut values = [0i64; 4];
            let mut ok = true;
            for (i, f) in system.forms.iter().enumerate() {
                let v = f.eval(x, y);
                let abs = v.unsigned_abs();
                if abs > u64::MAX as u128 || !is_prime(abs as u64) {
                    ok = false;
                    break;
                }
                values[i] = v as i64;
            }
            if ok {
                out.push(Witness { x, y, values });
            }
        }
    }
    out
}

/// Counts witnesses with the von Mangoldt weight ∏ log|Lᵢ| restricted to
/// prime values, and compares against the main-term prediction
/// C·N²·∏_{p≤P} β_p.  Accumulation is chunked with compensated summation
/// so reports are reproducible.
pub fn count_and_compare(
    system: &LinearFormSystem,
    region: &Region,
    n: u64,
    series_cutoff: u64,
) -> Result<(ConstellationReport, Vec<Witness>), ConstellationError> {
    let series = singular_series(system, series_cutoff)?;
    let volume = region_volume(region)?;
    let witnesses = sieve_witnesses(system, region, n);

    // Kahan summation in fixed chunk order
    let mut sum = 0f64;
    let mut comp = 0f64;
    for w in &witnesses {
        let weight: f64 = w.values.iter().map(|&v| (v.abs() as f64).ln()).product();
        let y = weight - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }

    let c = volume.to_f64().unwrap();
    let prediction = c * (n as f64) * (n as f64) * series.value;
    let betas = primes_up_to(30)
        .into_iter()
        .map(|p| (p, beta_p(system, p).to_f64().unwrap()))
        .collect();
    let report = ConstellationReport {
        betas,
        series,
        volume_constant: c,
        n,
        witness_count: witnesses.len() as u64,
        weighted_count: sum,
        prediction,
        ratio: if prediction != 0.0 { sum / prediction } else { f64::NAN },
    };
    Ok((report, witnesses))
}
