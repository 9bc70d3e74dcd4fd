//! The sign-table calculus: products of the frozen basis signs against
//! the form signs at the six real slots reproduce the suitability
//! pattern, and the cascade replay predicts the dimension sequence
//! [6, 4, 2, 0] with final 2-Selmer dimension 2.
//!
//! Run with `cargo run --example sign_tables`.

use qtwist::seltrans::{
    basis_sign_table, cascade_predict, form_sign_table, sign_table_products, suitability_target,
};

fn main() {
    let z = basis_sign_table();
    let q = form_sign_table();
    let products = sign_table_products(&z, &q);
    println!("products (rows z1..z12, columns q1..q3; parentheses = unconstrained):");
    for (i, row) in products.iter().enumerate() {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(j, s)| match suitability_target(i, j) {
                Some(_) => format!("{s:+}"),
                None => format!("({s:+})"),
            })
            .collect();
        println!("  {:>3}: {}", z.labels[i], cells.join("  "));
    }
    let mut rows = [[1i8; 12]; 3];
    for i in 0..12 {
        for (j, row) in rows.iter_mut().enumerate() {
            row[i] = products[i][j];
        }
    }
    let pred = cascade_predict(&rows, 6).unwrap();
    println!("cascade: dims {:?}, final Sel2 dimension {}", pred.dims, pred.final_sel2);
}
