//! End to end: search for a twist with 2-Selmer dimension 2 and a
//! non-torsion tautological point, then re-verify the certificate.
//!
//! Run with `cargo run --example twist_search`.

use qtwist::pipeline::{run_experiment, verify_certificate, ExperimentConfig};

fn main() {
    let config = ExperimentConfig {
        curve: [0, 2, 6],
        kappa: 1,
        m: 1,
        lambda: 1,
        search_n: 100,
        series_cutoff: 10_000,
        max_witnesses: 0,
    };
    let cert = run_experiment(&config).expect("search should succeed at this bound");
    println!("witness (x, y) = {:?}", cert.witness);
    println!("t = {}{:?}", if cert.t.sign < 0 { "-" } else { "" }, cert.t.factors);
    println!("dim Sel^2(E^t) = {}", cert.selmer.dim);
    println!("tautological point x = {}/{}", cert.point.x[0], cert.point.x[1]);
    println!("conclusion: {}", cert.conclusion);
    verify_certificate(&cert).expect("certificate must re-verify");
    println!("certificate re-verified");
}
