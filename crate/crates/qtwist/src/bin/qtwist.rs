//! Thin command-line front end over the qtwist library.
//!
//! Exit codes: 0 success, 2 search exhausted, 3 verification failure,
//! 4 configuration error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qtwist::constellation::{count_and_compare, build_system, Region};
use qtwist::curve2tor::make_curve;
use qtwist::pipeline::{
    gaussian_probe, run_experiment, verify_certificate, Certificate, ExperimentConfig,
    PipelineError,
};
use qtwist::qlocal::SquareClass;
use qtwist::seltrans::{
    basis_sign_table, cascade_predict, compute_selmer, form_sign_table, sel2_of_twist,
    sign_table_products, suitability_target, transition_step, SelmerStructure, TransitionChain,
};

#[derive(Parser)]
#[command(name = "qtwist", about = "2-descent on quadratic twists over Q")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute 2-Selmer groups, optionally of a twist or along a chain.
    Selmer {
        /// Curve roots a1,a2,a3
        #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
        curve: Vec<i64>,
        /// Twist by this squarefree integer
        #[arg(long, allow_hyphen_values = true)]
        twist: Option<i64>,
        /// Transition chain entries p or p:e (e = 1 for the non-residue
        /// uniformizer), comma separated
        #[arg(long, value_delimiter = ',')]
        chain: Option<Vec<String>>,
    },
    /// Search for a certified twist from a config file.
    TwistSearch {
        #[arg(long)]
        config: PathBuf,
        /// Write the certificate here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Local densities, singular series, and the sieve count/prediction.
    Constellation {
        #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
        curve: Vec<i64>,
        #[arg(long, default_value_t = 1)]
        kappa: i64,
        #[arg(long)]
        m: i64,
        #[arg(long)]
        lambda: i64,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 10_000)]
        series_cutoff: u64,
    },
    /// Replay the sign-table products and the cascade prediction.
    Tables,
    /// Re-verify a certificate file.
    Verify {
        certificate: PathBuf,
        /// Also run the bounded Gaussian-integer point sweep.
        #[arg(long)]
        gaussian_probe: bool,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(4)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Selmer { curve, twist, chain } => {
            if curve.len() != 3 {
                return Err("expected --curve a1,a2,a3".into());
            }
            let e = make_curve(curve[0] as i128, curve[1] as i128, curve[2] as i128)
                .map_err(|e| e.to_string())?;
            if let Some(entries) = chain {
                let mut primes = Vec::new();
                let mut eps = Vec::new();
                for entry in entries {
                    let (p, e) = match entry.split_once(':') {
                        Some((p, e)) => (p.parse().map_err(|_| "bad chain entry")?, e == "1"),
                        None => (entry.parse().map_err(|_| "bad chain entry")?, false),
                    };
                    primes.push(p);
                    eps.push(e);
                }
                let chain = TransitionChain::new(primes, eps);
                for i in 0..chain.len() {
                    let report = transition_step(&e, &chain, i).map_err(|e| e.to_string())?;
                    println!(
                        "step {} at {}: dim {} -> {} (n = {:+}, case {:?}, restriction dim {})",
                        i + 1,
                        report.place,
                        report.dim_before,
                        report.dim_after,
                        report.n_i,
                        report.case,
                        report.restriction_dim
                    );
                }
                return Ok(ExitCode::SUCCESS);
            }
            let (dim, basis) = if let Some(d) = twist {
                let d = SquareClass::from_integer(d as i128).map_err(|e| e.to_string())?;
                let descent = sel2_of_twist(&e, &d).map_err(|e| e.to_string())?;
                (descent.dim, descent.basis)
            } else {
                let st = SelmerStructure::baseline(&e).map_err(|e| e.to_string())?;
                let basis = compute_selmer(&st);
                (basis.dim(), basis)
            };
            println!("dim Sel2 = {dim}");
            for (a, b) in &basis.pairs {
                println!("  ({}, {})", a, b);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::TwistSearch { config, output } => {
            let text = std::fs::read_to_string(&config).map_err(|e| e.to_string())?;
            let cfg = ExperimentConfig::from_toml(&text).map_err(|e| e.to_string())?;
            match run_experiment(&cfg) {
                Ok(cert) => {
                    let json = cert.to_json();
                    match output {
                        Some(path) => std::fs::write(path, &json).map_err(|e| e.to_string())?,
                        None => print!("{json}"),
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Err(PipelineError::NotFound(stats)) => {
                    eprintln!("search exhausted: {stats:?}");
                    Ok(ExitCode::from(2))
                }
                Err(e) => Err(e.to_string()),
            }
        }
        Command::Constellation { curve, kappa, m, lambda, n, series_cutoff } => {
            if curve.len() != 3 {
                return Err("expected --curve a1,a2,a3".into());
            }
            let system = build_system([curve[0], curve[1], curve[2]], kappa, m, lambda)
                .map_err(|e| e.to_string())?;
            let region = Region::all_forms_positive(&system);
            let (report, _) =
                count_and_compare(&system, &region, n, series_cutoff).map_err(|e| e.to_string())?;
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            Ok(ExitCode::SUCCESS)
        }
        Command::Tables => {
            let z = basis_sign_table();
            let q = form_sign_table();
            let products = sign_table_products(&z, &q);
            println!("constrained products (rows z1..z12, columns q1..q3):");
            let mut all_match = true;
            for (i, row) in products.iter().enumerate() {
                let marks: Vec<String> = row
                    .iter()
                    .enumerate()
                    .map(|(j, &s)| match suitability_target(i, j) {
                        Some(want) => {
                            if s != want {
                                all_match = false;
                            }
                            format!("{s:+}{}", if s == want { "" } else { "!" })
                        }
                        None => format!("({s:+})"),
                    })
                    .collect();
                println!("  z{:<2} {}", i + 1, marks.join(" "));
            }
            let mut rows = [[1i8; 12]; 3];
            for i in 0..12 {
                for (j, row) in rows.iter_mut().enumerate() {
                    row[i] = products[i][j];
                }
            }
            let pred = cascade_predict(&rows, 6).map_err(|e| e.to_string())?;
            println!("pattern matches: {all_match}");
            println!("predicted dims: {:?}, final Sel2 dim {}", pred.dims, pred.final_sel2);
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { certificate, gaussian_probe: probe } => {
            let text = std::fs::read_to_string(&certificate).map_err(|e| e.to_string())?;
            let cert = match Certificate::from_json(&text) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{e}");
                    return Ok(ExitCode::from(4));
                }
            };
            match verify_certificate(&cert) {
                Ok(()) => {
                    println!("certificate verifies");
                    if probe {
                        match gaussian_probe(&cert, 6) {
                            Ok(p) => println!(
                                "gaussian probe (bound {}): {} square values found (consistency only)",
                                p.bound, p.points_found
                            ),
                            Err(e) => println!("gaussian probe skipped: {e}"),
                        }
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    eprintln!("{e}");
                    Ok(ExitCode::from(3))
                }
            }
        }
    }
}
