//! Round trip through the on-disk formats: write a matrix file, analyze it
//! with the `solve` and `verify` commands, and print the JSON report.
//!
//! Usage: `cargo run --example solve_matrix_file [path.json]`; without a
//! path the two-dimensional example is written to the temp directory.

use std::path::PathBuf;

use anisometric::cli::{cmd_solve, cmd_verify, AnalysisOptions, MatrixFile};
use anisometric::oracle::OracleOptions;
use anisometric::ComplexMatrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = match std::env::args().nth(1) {
        Some(p) => PathBuf::from(p),
        None => {
            let p = std::env::temp_dir().join("anisometric_two_by_two.json");
            let h = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[1.0, 2.0]])?;
            std::fs::write(&p, MatrixFile::from_matrix(&h).to_json())?;
            p
        }
    };
    let opts = AnalysisOptions {
        emit_metric: true,
        ..Default::default()
    };
    let report = cmd_solve(&path, &opts)?;
    print!("{}", report.to_json());
    let check = cmd_verify(&path, &OracleOptions::default())?;
    println!("oracle agrees: {} (max |alpha_el - alpha*| = {:.2e})", check.agrees, check.max_alpha_diff);
    std::process::exit(report.exit_code());
}
