//! Hilbert symbols, a reciprocity audit, and deterministic prime search.
//!
//! Run with `cargo run --example hilbert_reciprocity`.

use qtwist::qlocal::{reciprocity_audit, PrimeSearch, SquareClass};

fn main() {
    let a = SquareClass::from_integer(-15).unwrap();
    let b = SquareClass::from_integer(26).unwrap();
    println!("local Hilbert symbols of ({a}, {b}):");
    let audit = reciprocity_audit(&a, &b);
    for (place, symbol) in &audit.symbols {
        println!("  ({a}, {b})_{place} = {symbol:+}");
    }
    println!("global product = {:+} (always +1 by reciprocity)", audit.product);

    // the smallest prime that is 1 mod 24 and a square modulo 5
    let p = PrimeSearch::new().congruent(24, 1).legendre(5, 1).run().unwrap();
    println!("first prime p = 1 mod 24 with (p|5) = +1: {}", p.prime);
}
