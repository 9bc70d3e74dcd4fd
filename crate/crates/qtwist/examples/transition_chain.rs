//! The transition process: switching places one at a time to the
//! twisted-curve condition moves the Selmer dimension by -2, 0 or +2,
//! and each step's case is decided by the restriction of the current
//! group and the relaxed subspace A.
//!
//! Run with `cargo run --example transition_chain`.

use qtwist::curve2tor::make_curve;
use qtwist::seltrans::{transition_step, TransitionChain};

fn main() {
    let e = make_curve(0, 1, 2).unwrap();
    let chain = TransitionChain::new(vec![5, 7, 11, 13], vec![false, true, false, false]);
    for i in 0..chain.len() {
        let r = transition_step(&e, &chain, i).unwrap();
        println!(
            "step {} at {}: dim {} -> {} (n_i = {:+}, case {:?}, restriction dim {}, dim A = {})",
            i + 1,
            r.place,
            r.dim_before,
            r.dim_after,
            r.n_i,
            r.case,
            r.restriction_dim,
            r.a_subspace.dim()
        );
    }
}
