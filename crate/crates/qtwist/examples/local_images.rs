//! Local Kummer images of a full-2-torsion curve at its bad places, and
//! the twisted-condition span at a place outside the bad set.
//!
//! Run with `cargo run --example local_images`.

use qtwist::curve2tor::{local_image, make_curve, twisted_condition};
use qtwist::qlocal::Place;

fn main() {
    let e = make_curve(0, 5, -5).unwrap(); // y^2 = x(x-5)(x+5)
    println!("curve y^2 = x(x-5)(x+5), bad places T = {:?}", e.t_places());
    for v in e.t_places() {
        let img = local_image(&e, v).unwrap();
        println!(
            "  image at {v}: dimension {} of {} (maximal isotropic)",
            img.subspace.dim(),
            img.subspace.ambient_dim()
        );
        for b in img.subspace.basis() {
            println!("    generator {b:#08b}");
        }
    }
    // the local condition of the twist by a uniformizer at 7
    for eps in [0u8, 1] {
        let span = twisted_condition(&e, 7, 0b10 | eps);
        println!(
            "twisted condition at 7 (uniformizer {}): dim {}",
            if eps == 0 { "7" } else { "7u" },
            span.dim()
        );
    }
}
