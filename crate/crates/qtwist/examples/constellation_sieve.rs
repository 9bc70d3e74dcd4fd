//! Local densities, the singular series, the region volume constant, and
//! the simultaneous-prime sieve compared against its main-term prediction.
//!
//! Run with `cargo run --example constellation_sieve`.

use qtwist::constellation::{beta_p, build_system, count_and_compare, region_volume, Region};

fn main() {
    let system = build_system([0, 1, 2], 1, 6, 1).unwrap();
    println!("forms:");
    for (i, f) in system.forms.iter().enumerate() {
        println!("  L{} = {}X + {}Y + {}", i + 1, f.cx, f.cy, f.c0);
    }
    for p in [2u64, 3, 5, 7, 11] {
        println!("beta_{p} = {}", beta_p(&system, p));
    }
    let region = Region::all_forms_positive(&system);
    println!("volume constant C = {}", region_volume(&region).unwrap());
    let (report, witnesses) = count_and_compare(&system, &region, 400, 10_000).unwrap();
    println!(
        "N = {}: {} witnesses, weighted count {:.1}, prediction {:.1}, ratio {:.4}",
        report.n, report.witness_count, report.weighted_count, report.prediction, report.ratio
    );
    let w = &witnesses[0];
    println!("first witness ({}, {}) with values {:?}", w.x, w.y, w.values);
}
