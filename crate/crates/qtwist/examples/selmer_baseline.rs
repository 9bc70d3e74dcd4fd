//! 2-Selmer groups: the baseline group of a curve and the group of a
//! quadratic twist, computed by exact descent.
//!
//! Run with `cargo run --example selmer_baseline`.

use qtwist::curve2tor::make_curve;
use qtwist::qlocal::SquareClass;
use qtwist::seltrans::{compute_selmer, sel2_of_twist, SelmerStructure};

fn main() {
    for (label, a) in [("y^2 = x^3 - x", [0i128, 1, -1]), ("y^2 = x(x-5)(x+5)", [0, 5, -5])] {
        let e = make_curve(a[0], a[1], a[2]).unwrap();
        let sel = compute_selmer(&SelmerStructure::baseline(&e).unwrap());
        println!("{label}: dim Sel^2 = {}", sel.dim());
        for (x1, x2) in &sel.pairs {
            println!("  basis class ({x1}, {x2})");
        }
    }

    let e = make_curve(0, 1, -1).unwrap();
    let d = SquareClass::from_integer(73).unwrap();
    let tw = sel2_of_twist(&e, &d).unwrap();
    println!("twist of x^3 - x by 73: dim Sel^2 = {}", tw.dim);
}
