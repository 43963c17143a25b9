//! Euler-Lagrange verdicts against the projected-gradient oracle on a seeded
//! corpus of random similarity transforms of `diag(1..n)`.
//!
//! Usage: `cargo run --example random_crosscheck [count]`

use anisometric::elsolve::analyze_gram;
use anisometric::finite_models::random_instance;
use anisometric::metric_cone::gram;
use anisometric::oracle::OracleOptions;
use anisometric::{eigensystem, Tolerances, Verdict};

const PERTURBATIONS: [f64; 3] = [0.05, 0.2, 0.6];

fn main() -> anisometric::Result<()> {
    let count: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100);
    println!("{:>4} {:>3} {:>5} {:>16} {:>10} {:>10} {:>8} {:>6}", "seed", "n", "p", "verdict", "min alpha", "diff", "lam_min", "agree");
    let (mut agreed, mut exists, mut sufficient) = (0, 0, 0);
    for seed in 0..count {
        let n = 3 + (seed % 10) as usize;
        let p = PERTURBATIONS[(seed % 3) as usize];
        let h = random_instance(n, p, seed)?;
        let sys = eigensystem(&h, &Tolerances::for_matrix(&h))?;
        let g = gram(&sys)?;
        let r = analyze_gram(&g, &OracleOptions::default())?;
        let min_alpha = r.alpha_el.iter().copied().fold(f64::INFINITY, f64::min);
        println!(
            "{seed:>4} {n:>3} {p:>5} {:>16} {min_alpha:>10.6} {:>10.2e} {:>8.1e} {:>6}",
            format!("{:?}", r.verdict),
            r.oracle.max_alpha_diff,
            g.min_eigenvalue(),
            r.oracle.agrees
        );
        agreed += r.oracle.agrees as u32;
        exists += (r.verdict == Verdict::MetricExists) as u32;
        sufficient += r.sufficiency_holds as u32;
    }
    println!("{agreed}/{count} agree, {exists} with a metric, {sufficient} satisfy the sufficient condition");
    Ok(())
}
