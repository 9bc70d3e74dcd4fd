//! Driving a Selmer group to zero: witness primes with full-rank
//! Frobenius evaluation drop the dimension by two; degenerate groups are
//! handled by a two-prime step.  Afterwards the three auxiliary spaces
//! are shrunk to zero as well.
//!
//! Run with `cargo run --example selmer_reduction`.

use qtwist::curve2tor::make_curve;
use qtwist::seltrans::{prepare_auxiliary_chain, selmer_reduce};

fn main() {
    let e = make_curve(0, 2, 6).unwrap();
    let red = selmer_reduce(&e, 10_000, 16).unwrap();
    println!("Selmer dimensions along the reduction: {:?}", red.dims);
    for (i, step) in red.steps.iter().enumerate() {
        println!("  step {}: {:?}", i + 1, step);
    }
    println!("chain primes: {:?}", red.chain.primes);

    let (chain, history) = prepare_auxiliary_chain(&e, 10_000, 24).unwrap();
    println!("auxiliary space dimensions while shrinking: {history:?}");
    println!("final chain length: {}", chain.len());
}
