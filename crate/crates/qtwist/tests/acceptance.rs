//! Acceptance suite: one test per criterion, each printing a pass line
//! with its elapsed time.  Tolerances and bounds are pinned here.
//!
//! Criteria:
//!  1. Hilbert reciprocity on 10^4 random signed pairs, plus symbol
//!     equivalence with brute-force conic solvability (|a|,|b| ≤ 50,
//!     p ≤ 50); under 30 s.
//!  2. The quadratic form induces the pairing on the full dim-6 space at
//!     p = 2 for three fixed curves; exact.
//!  3. Local Kummer images: maximal isotropic of dims (2, 3, 1) for 20
//!     random curves; unramified equality at 5 good odd places each;
//!     twisted-span and trivial-intersection identities at 5 places
//!     outside T each; exact.
//!  4. M₂(𝔽₂): exactly six maximal isotropics matching the displayed
//!     families, and every determinant-degenerate subgroup lies in one;
//!     under 1 s.
//!  5. ≥200 randomized transition steps: dim A = 2, n ∈ {−2, 0, +2}
//!     matching the case hypotheses, codim-2 containment on drops,
//!     constant parity along chains; exact.
//!  6. dim Sel²(E^d) = 2 + dim of the one-short chain group for 50
//!     sampled locally-square twists; exact.
//!  7. Baseline dims 2 and 3 for y² = x³ − x and y² = x(x−5)(x+5),
//!     certified by an independent exhaustive descent oracle; exact.
//!  8. Sign-table replay: all 24 constrained products match, and the
//!     cascade predicts [6, 4, 2, 0] then final dimension 2; under 1 s.
//!  9. Selmer reduction reaches the trivial group on 10 seed curves,
//!     within 10^4 scan candidates per step; exact.
//! 10. Constellation: β₂ = 16, β₃ = 81/16, β₅ = 0.78125 for the frozen
//!     system; sieve counts at N ≤ 30 equal brute force; ratio within
//!     [0.75, 1.25] at ≥500 witnesses; under 120 s.
//! 11. End-to-end: the bundled config reproduces the frozen certificate
//!     byte for byte, and the certificate re-verifies; under 10 min.

use std::time::Instant;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qtwist::constellation::{
    beta_p, build_system, count_and_compare, sieve_witnesses, Region,
};
use qtwist::curve2tor::{
    local_image, local_membership, make_curve, twisted_condition, Curve,
};
use qtwist::pipeline::{run_experiment, verify_certificate, Certificate, ExperimentConfig};
use qtwist::qlocal::{
    hilbert_symbol, hilbert_symbol_int, is_prime, reciprocity_audit, restrict, LocalClass,
    Place, SquareClass,
};
use qtwist::quadspace::{
    join_pair, m2_determinant_space, m2_isotropic_families, unramified_subspace, Subspace,
};
use qtwist::seltrans::{
    basis_sign_table, cascade_predict, compute_selmer, form_sign_table, sel2_of_twist,
    selmer_reduce, sign_table_products, suitability_target, transition_step, SelmerStructure,
    TransitionChain,
};

fn pass(name: &str, start: Instant, budget_secs: u64) {
    let elapsed = start.elapsed();
    if elapsed.as_secs() > budget_secs {
        println!("acceptance {name}: FAIL (budget {budget_secs}s, took {elapsed:.2?})");
        panic!("{name} exceeded its {budget_secs}s budget: {elapsed:?}");
    }
    println!("acceptance {name}: PASS ({elapsed:.2?})");
}

// independent brute-force conic oracle: a primitive solution of
// z^2 = a x^2 + b y^2 modulo p^k, by exhaustive level-by-level lifting of
// the solution set (deduplicated up to unit scaling), with the standard
// smooth-point early exit.  Square factors of a and b are stripped first;
// that substitution visibly preserves solvability and keeps the lift depth
// small.
fn conic_solvable_oracle(a: i128, b: i128, p: u64, _k_hint: u32) -> bool {
    let pp = p as i128;
    let strip = |mut v: i128| -> i128 {
        while v % (pp * pp) == 0 {
            v /= pp * pp;
        }
        v
    };
    let (a, b) = (strip(a), strip(b));
    let vp = |mut x: i128| -> u32 {
        if x == 0 {
            return u32::MAX;
        }
        let mut v = 0;
        while x % pp == 0 {
            x /= pp;
            v += 1;
        }
        v
    };
    let k = vp(4 * a * b) + 3;
    let pj = |j: u32| pp.pow(j);

    let f = |t: &[i128; 3], m: i128| -> i128 {
        (t[2] * t[2] - a * t[0] * t[0] - b * t[1] * t[1]).rem_euclid(m)
    };
    let modinv = |x: i128, m: i128| -> Option<i128> {
        let (mut r0, mut r1, mut s0, mut s1) = (m, x.rem_euclid(m), 0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        (r0 == 1).then(|| s0.rem_euclid(m))
    };
    let canon = |t: &[i128; 3], m: i128| -> Option<[i128; 3]> {
        let lead = (0..3).min_by_key(|&i| {
            let mut v = t[i].rem_euclid(m);
            let mut val = 0u32;
            if v == 0 {
                val = u32::MAX;
            } else {
                while v % pp == 0 {
                    v /= pp;
                    val += 1;
                }
            }
            (val, i)
        })?;
        let lv = t[lead].rem_euclid(m);
        if lv == 0 || lv % pp == 0 {
            return None; // imprimitive
        }
        let inv = modinv(lv, m)?;
        Some([
            (t[0] * inv).rem_euclid(m),
            (t[1] * inv).rem_euclid(m),
            (t[2] * inv).rem_euclid(m),
        ])
    };
    let smooth = |t: &[i128; 3], j: u32, m: i128| -> bool {
        let grads = [
            (-2 * a * t[0]).rem_euclid(m),
            (-2 * b * t[1]).rem_euclid(m),
            (2 * t[2]).rem_euclid(m),
        ];
        let e = grads.iter().map(|&g| vp(g).min(j)).min().unwrap();
        e < j && j >= 2 * e + 1
    };

    // level 1: square-root table modulo p, smooth early exit
    let m1 = pj(1);
    let mut root_of = vec![None; p as usize];
    for z in 0..pp {
        root_of[(z * z % pp) as usize] = Some(z);
    }
    let mut level: Vec<[i128; 3]> = Vec::new();
    for x in 0..pp {
        for y in 0..pp {
            let v = (a * x * x + b * y * y).rem_euclid(m1);
            if let Some(z) = root_of[v as usize] {
                for zz in [z, (m1 - z) % m1] {
                    let t = [x, y, zz];
                    if t == [0, 0, 0] {
                        continue;
                    }
                    if smooth(&t, 1, m1) {
                        return true;
                    }
                    if let Some(c) = canon(&t, m1) {
                        level.push(c);
                    }
                }
            }
        }
    }
    level.sort_unstable();
    level.dedup();

    // lift: f(t + p^j d) = f(t) + p^j grad(t)·d (mod p^{j+1}), a linear
    // condition on the digit vector d
    for j in 1..k {
        if level.is_empty() {
            return false;
        }
        let m = pj(j);
        let mnext = pj(j + 1);
        let mut next: Vec<[i128; 3]> = Vec::new();
        for t in &level {
            let g = [
                (-2 * a * t[0]).rem_euclid(pp),
                (-2 * b * t[1]).rem_euclid(pp),
                (2 * t[2]).rem_euclid(pp),
            ];
            let r = (-(f(t, mnext) / m)).rem_euclid(pp);
            let push = |next: &mut Vec<[i128; 3]>, d: [i128; 3]| {
                let c = [t[0] + d[0] * m, t[1] + d[1] * m, t[2] + d[2] * m];
                if smooth(&c, j + 1, mnext) {
                    return true;
                }
                if let Some(cc) = canon(&c, mnext) {
                    next.push(cc);
                }
                false
            };
            if g == [0, 0, 0] {
                if r != 0 {
                    continue;
                }
                for d0 in 0..pp {
                    for d1 in 0..pp {
                        for d2 in 0..pp {
                            if push(&mut next, [d0, d1, d2]) {
                                return true;
                            }
                        }
                    }
                }
            } else {
                // solve g·d = r mod p: pivot on a nonzero coordinate
                let piv = (0..3).find(|&i| g[i] != 0).unwrap();
                let inv = modinv(g[piv], pp).unwrap();
                let others: Vec<usize> = (0..3).filter(|&i| i != piv).collect();
                for u in 0..pp {
                    for v in 0..pp {
                        let mut d = [0i128; 3];
                        d[others[0]] = u;
                        d[others[1]] = v;
                        d[piv] = ((r - g[others[0]] * u - g[others[1]] * v) * inv)
                            .rem_euclid(pp);
                        if push(&mut next, d) {
                            return true;
                        }
                    }
                }
            }
        }
        next.sort_unstable();
        next.dedup();
        level = next;
    }
    !level.is_empty()
}

#[test]
fn acceptance_01_hilbert_reciprocity_and_conic_oracle() {
    let start = Instant::now();
    // 10^4 random signed pairs supported on the first 10 primes
    let primes = [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29];
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC_01);
    for _ in 0..10_000 {
        let draw = |rng: &mut ChaCha8Rng| {
            let mut sup = Vec::new();
            for &p in &primes {
                if rng.gen_bool(0.3) {
                    sup.push(p);
                }
            }
            SquareClass::from_parts(rng.gen_bool(0.5), &sup)
        };
        let a = draw(&mut rng);
        let b = draw(&mut rng);
        let audit = reciprocity_audit(&a, &b);
        assert_eq!(audit.product, 1, "reciprocity fails for ({a}, {b})");
    }
    // symbol vs brute-force conic solvability
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        for a in -50i128..=50 {
            if a == 0 {
                continue;
            }
            for b in -50i128..=50 {
                if b == 0 {
                    continue;
                }
                // restrict the heavy deep-lift cases to where they matter:
                // at p coprime to 2ab, a smooth point always certifies fast
                let k = {
                    let mut v = 0;
                    let mut n = (4 * a * b).unsigned_abs();
                    while n % p as u128 == 0 {
                        n /= p as u128;
                        v += 1;
                    }
                    v + 3
                };
                let want = hilbert_symbol_int(a, b, Place::Finite(p)).unwrap() == 1;
                let got = conic_solvable_oracle(a, b, p, k);
                assert_eq!(got, want, "symbol/oracle mismatch at ({a}, {b}, {p})");
            }
        }
    }
    pass("1 (reciprocity + conic oracle)", start, 30);
}

#[test]
fn acceptance_02_form_induces_pairing_dim6() {
    let start = Instant::now();
    for a in [[0i128, 1, 2], [0, 5, -5], [0, 2, 6]] {
        let e = make_curve(a[0], a[1], a[2]).unwrap();
        let space = e.quadratic_space(Place::Finite(2));
        assert_eq!(space.dim(), 6);
        for x in 0..64u64 {
            for y in 0..64u64 {
                assert_eq!(
                    space.pairing(x, y),
                    space.q(x ^ y) * space.q(x) * space.q(y),
                    "curve {a:?}, pair ({x}, {y})"
                );
            }
        }
    }
    pass("2 (quadratic-form consistency)", start, 30);
}

fn random_curves(n: usize, seed: u64) -> Vec<Curve> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < n {
        let a1 = rng.gen_range(-9i128..=9);
        let a2 = rng.gen_range(-9i128..=9);
        let a3 = rng.gen_range(-9i128..=9);
        if let Ok(e) = make_curve(a1, a2, a3) {
            out.push(e);
        }
    }
    out
}

#[test]
fn acceptance_03_local_kummer_images() {
    let start = Instant::now();
    for e in random_curves(20, 0xACC_03) {
        // dims and maximal isotropy at every place of T
        for v in e.t_places() {
            let img = local_image(&e, v).unwrap();
            let want = match v {
                Place::Real => 1,
                Place::Finite(2) => 3,
                Place::Finite(_) => 2,
            };
            assert_eq!(img.subspace.dim(), want, "{:?} at {v}", e.a());
            assert!(e.quadratic_space(v).is_maximal_isotropic(&img.subspace));
        }
        // unramified equality at 5 good odd places
        let mut good = Vec::new();
        let mut p = 3u64;
        while good.len() < 5 {
            p += 2;
            if is_prime(p) && !e.contains_in_t(Place::Finite(p)) {
                good.push(p);
            }
        }
        for p in good {
            let img = local_image(&e, Place::Finite(p)).unwrap();
            assert_eq!(
                img.subspace,
                unramified_subspace(Place::Finite(p)),
                "{:?} at good {p}",
                e.a()
            );
        }
        // twisted span and trivial intersection at 5 places outside T
        let mut outside = Vec::new();
        let mut p = 3u64;
        while outside.len() < 5 {
            p += 2;
            if is_prime(p) && !e.contains_in_t(Place::Finite(p)) {
                outside.push(p);
            }
        }
        for p in outside {
            // realize both uniformizer classes by global twists
            for eps in [false, true] {
                let d = if eps {
                    let mut r = 2u64;
                    while !is_prime(r)
                        || qtwist::qlocal::legendre(r as i128, p) != -1
                        || e.contains_in_t(Place::Finite(r))
                        || r == p
                    {
                        r += 1;
                    }
                    SquareClass::from_parts(false, &[p, r])
                } else {
                    SquareClass::from_parts(false, &[p])
                };
                let pi_mask = restrict(&d, Place::Finite(p)).mask;
                assert_eq!(pi_mask & 0b10, 0b10);
                let img = local_image(&e.twist(&d), Place::Finite(p)).unwrap();
                let span = twisted_condition(&e, p, pi_mask);
                assert_eq!(img.subspace, span, "{:?} twisted at {p} eps {eps}", e.a());
                assert_eq!(
                    span.intersect(&unramified_subspace(Place::Finite(p))).dim(),
                    0
                );
            }
        }
    }
    pass("3 (local Kummer images)", start, 300);
}

#[test]
fn acceptance_04_m2_classification() {
    let start = Instant::now();
    let space = m2_determinant_space();
    let found = space.maximal_isotropics();
    assert_eq!(found.len(), 6);
    let families = m2_isotropic_families();
    for f in &families {
        assert!(found.contains(f));
    }
    // every subgroup on which det vanishes lies in one of the six
    let mut all_subspaces: Vec<Subspace> = vec![Subspace::trivial(4)];
    let mut level = vec![Subspace::trivial(4)];
    while !level.is_empty() {
        let mut next = Vec::new();
        for s in &level {
            for v in 1..16u64 {
                if !s.contains(v) {
                    let mut gens = s.basis().to_vec();
                    gens.push(v);
                    let t = Subspace::new(4, &gens);
                    if !all_subspaces.contains(&t) {
                        all_subspaces.push(t.clone());
                        next.push(t);
                    }
                }
            }
        }
        level = next;
    }
    assert_eq!(all_subspaces.len(), 67); // Gaussian binomial count for F2^4
    let mut degenerate = 0;
    for s in &all_subspaces {
        if s.elements().iter().all(|&v| space.q(v) == 1) {
            degenerate += 1;
            assert!(
                families.iter().any(|f| f.contains_subspace(s)),
                "degenerate subgroup {s:?} not inside a family"
            );
        }
    }
    assert!(degenerate > 6);
    pass("4 (M2 classification)", start, 1);
}

#[test]
fn acceptance_05_transition_trichotomy() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC_05);
    let mut steps = 0usize;
    let curves = random_curves(140, 0xACC_05_0);
    'outer: for e in &curves {
        // a random chain of up to 3 primes outside T
        let mut pool = Vec::new();
        let mut p = 3u64;
        while pool.len() < 8 {
            p += 2;
            if is_prime(p) && !e.contains_in_t(Place::Finite(p)) {
                pool.push(p);
            }
        }
        let len = rng.gen_range(1..=3usize);
        let mut primes = Vec::new();
        while primes.len() < len {
            let c = pool[rng.gen_range(0..pool.len())];
            if !primes.contains(&c) {
                primes.push(c);
            }
        }
        let eps = (0..len).map(|_| rng.gen_bool(0.5)).collect();
        let chain = TransitionChain::new(primes, eps);
        let mut parities = Vec::new();
        for i in 0..chain.len() {
            // transition_step asserts dim A = 2, the case hypothesis match
            // and the codim-2 containment internally
            let report = transition_step(e, &chain, i).unwrap();
            assert!([-2, 0, 2].contains(&report.n_i));
            parities.push(report.dim_before % 2);
            parities.push(report.dim_after % 2);
            steps += 1;
            if steps >= 220 {
                assert!(parities.windows(2).all(|w| w[0] == w[1]));
                break 'outer;
            }
        }
        assert!(
            parities.windows(2).all(|w| w[0] == w[1]),
            "parity drifted along chain on {:?}",
            e.a()
        );
    }
    assert!(steps >= 200, "only {steps} steps exercised");
    pass("5 (transition trichotomy)", start, 600);
}

#[test]
fn acceptance_06_final_step_identity() {
    let start = Instant::now();
    let e = make_curve(0, 1, -1).unwrap();
    // twists that are locally square on all of T: products of primes
    // congruent to 1 mod 24
    let mut qs = Vec::new();
    let mut p = 1u64;
    while qs.len() < 12 {
        p += 24;
        if is_prime(p) {
            qs.push(p);
        }
    }
    let mut sampled = 0;
    'outer: for i in 0..qs.len() {
        for j in (i + 1)..qs.len() + 1 {
            let d = if j == qs.len() {
                SquareClass::from_parts(false, &[qs[i]])
            } else {
                SquareClass::from_parts(false, &[qs[i], qs[j]])
            };
            assert!(e.t_places().iter().all(|&v| restrict(&d, v).is_trivial()));
            let direct = sel2_of_twist(&e, &d).unwrap();
            let chain = TransitionChain::for_twist(&d);
            let st = SelmerStructure::with_chain(&e, &chain, chain.len() - 1).unwrap();
            let partial = compute_selmer(&st);
            assert_eq!(
                direct.dim,
                2 + partial.dim(),
                "final-step identity fails for d = {}",
                d.representative()
            );
            sampled += 1;
            if sampled >= 50 {
                break 'outer;
            }
        }
    }
    assert!(sampled >= 50);
    pass("6 (final-step identity)", start, 600);
}

/// Independent descent oracle: enumerate every candidate global pair
/// supported on T ∪ {−1} and keep those passing the torsor-solvability
/// membership test at every place of T.
fn descent_oracle_dim(e: &Curve) -> usize {
    let mut coords = vec![-1i128];
    coords.extend(e.t_finite().map(|p| p as i128));
    let n = coords.len();
    let class_of = |bits: u32| -> SquareClass {
        let mut c = SquareClass::one();
        for (i, &v) in coords.iter().enumerate() {
            if bits >> i & 1 == 1 {
                c = c.mul(&SquareClass::from_integer(v).unwrap());
            }
        }
        c
    };
    let mut members = Vec::new();
    for b1 in 0..(1u32 << n) {
        for b2 in 0..(1u32 << n) {
            let c1 = class_of(b1);
            let c2 = class_of(b2);
            let ok = e.t_places().iter().all(|&v| {
                local_membership(
                    e,
                    (restrict(&c1, v), restrict(&c2, v)),
                    v,
                )
            });
            if ok {
                members.push((c1, c2));
            }
        }
    }
    // the member count is a power of two; its log is the dimension
    let count = members.len();
    assert!(count.is_power_of_two(), "descent oracle found {count} members");
    count.trailing_zeros() as usize
}

#[test]
fn acceptance_07_baseline_oracle_regressions() {
    let start = Instant::now();
    let e = make_curve(0, 1, -1).unwrap(); // y^2 = x^3 - x
    assert_eq!(descent_oracle_dim(&e), 2);
    let sel = compute_selmer(&SelmerStructure::baseline(&e).unwrap());
    assert_eq!(sel.dim(), 2);

    let e = make_curve(0, 5, -5).unwrap(); // y^2 = x(x-5)(x+5)
    assert_eq!(descent_oracle_dim(&e), 3);
    let sel = compute_selmer(&SelmerStructure::baseline(&e).unwrap());
    assert_eq!(sel.dim(), 3);
    pass("7 (baseline oracle regressions)", start, 600);
}

#[test]
fn acceptance_08_sign_table_replay() {
    let start = Instant::now();
    let prods = sign_table_products(&basis_sign_table(), &form_sign_table());
    let mut constrained = 0;
    for i in 0..12 {
        for j in 0..3 {
            if let Some(want) = suitability_target(i, j) {
                assert_eq!(prods[i][j], want, "product (z{}, q{})", i + 1, j + 1);
                constrained += 1;
            }
        }
    }
    assert_eq!(constrained, 24);
    let mut rows = [[1i8; 12]; 3];
    for i in 0..12 {
        for (j, row) in rows.iter_mut().enumerate() {
            row[i] = prods[i][j];
        }
    }
    let pred = cascade_predict(&rows, 6).unwrap();
    assert_eq!(pred.dims, vec![6, 4, 2, 0]);
    assert_eq!(pred.final_sel2, 2);
    assert!(pred.flags.is_empty());
    pass("8 (sign-table replay + cascade)", start, 1);
}

#[test]
fn acceptance_09_selmer_reduce_seeds() {
    let start = Instant::now();
    let seeds: [[i128; 3]; 10] = [
        [0, 1, 2],
        [0, 1, -1],
        [0, 2, 6],
        [0, 1, 6],
        [0, 2, 3],
        [0, 3, 5],
        [0, 1, 5],
        [0, 2, 12],
        [0, 1, -3],
        [1, 3, 7],
    ];
    for a in seeds {
        let e = make_curve(a[0], a[1], a[2]).unwrap();
        let base = compute_selmer(&SelmerStructure::baseline(&e).unwrap());
        assert_eq!(base.dim() % 2, 0, "seed {a:?} must have even parity");
        // every step's drop is verified against compute_selmer inside
        let red = selmer_reduce(&e, 10_000, 16).unwrap();
        assert_eq!(*red.dims.last().unwrap(), 0, "seed {a:?}");
    }
    pass("9 (selmer reduction)", start, 600);
}

#[test]
fn acceptance_10_constellation() {
    let start = Instant::now();
    let system = build_system([0, 1, 2], 1, 6, 1).unwrap();
    // frozen local densities
    assert_eq!(beta_p(&system, 2), BigRational::from(BigInt::from(16)));
    assert_eq!(
        beta_p(&system, 3),
        BigRational::new(BigInt::from(81), BigInt::from(16))
    );
    assert_eq!(beta_p(&system, 5).to_f64().unwrap(), 0.78125);

    // sieve at N <= 30 equals an independent brute force
    let region = Region::all_forms_positive(&system);
    for n in [10i64, 20, 30] {
        let witnesses = sieve_witnesses(&system, &region, n as u64);
        let naive_prime = |v: i128| -> bool {
            let v = v.abs();
            if v < 2 {
                return false;
            }
            let mut d = 2;
            while d * d <= v {
                if v % d == 0 {
                    return false;
                }
                d += 1;
            }
            true
        };
        let mut brute = Vec::new();
        for x in -n..=n {
            for y in -n..=n {
                let vals: Vec<i128> = system.forms.iter().map(|f| f.eval(x, y)).collect();
                if vals.iter().all(|&v| v > 0 && naive_prime(v)) {
                    brute.push((x, y));
                }
            }
        }
        let got: Vec<(i64, i64)> = witnesses.iter().map(|w| (w.x, w.y)).collect();
        assert_eq!(got, brute, "sieve vs brute force at N = {n}");
    }

    // ratio at an N giving at least 500 witnesses
    let (report, _) = count_and_compare(&system, &region, 500, 10_000).unwrap();
    assert!(report.witness_count >= 500, "only {} witnesses", report.witness_count);
    assert!(
        (0.75..=1.25).contains(&report.ratio),
        "ratio {} out of tolerance",
        report.ratio
    );
    pass("10 (constellation densities + ratio)", start, 120);
}

#[test]
fn acceptance_11_end_to_end_regression() {
    let start = Instant::now();
    let config_text = include_str!("../../../configs/regression.toml");
    let config = ExperimentConfig::from_toml(config_text).unwrap();
    let cert = run_experiment(&config).unwrap();
    assert_eq!(cert.selmer.dim, 2);

    // byte-identical against the frozen fixture and across reruns
    let frozen = include_str!("fixtures/regression_certificate.json");
    assert_eq!(cert.to_json(), frozen, "certificate drifted from the fixture");
    let again = run_experiment(&config).unwrap();
    assert_eq!(cert.to_json(), again.to_json());

    // and it verifies (including the non-torsion point check)
    let parsed = Certificate::from_json(frozen).unwrap();
    verify_certificate(&parsed).unwrap();
    pass("11 (end-to-end regression)", start, 600);
}
