//! PT-symmetric Robin Laplacian on `(-pi/2, pi/2)`: truncated EL solutions,
//! their convergence in `N`, and the off-diagonal Gram sum against its
//! closed-form bound.
//!
//! Usage: `cargo run --example robin_truncation [beta]`

use anisometric::cli::convergence_csv;
use anisometric::robin::{convergence_table, max_delta, sufficiency_bound, truncated_analyze, RobinModel};

fn main() -> anisometric::Result<()> {
    let beta: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.1);
    let analysis = truncated_analyze(&RobinModel::new(beta, 200)?)?;
    let r = &analysis.report;
    println!("beta = {beta}, N = 200: {:?}", r.verdict);
    println!("alpha_0..4 = {:?}", &r.alpha_el[..5]);
    println!("quadrature residuals: {:?}", analysis.residuals);

    let rows = convergence_table(&RobinModel::new(beta, 200)?, &[50, 100, 200])?;
    println!("max component change across N = 50, 100, 200: {:.3e}", max_delta(&rows));
    let head: Vec<_> = rows.iter().filter(|r| r.index < 3).copied().collect();
    print!("{}", convergence_csv(&head));

    println!("\n{:>6} {:>12} {:>12}", "beta", "sum N=1000", "bound");
    for b in [0.05, 0.1, 0.2, 0.4] {
        let sum = RobinModel::new(b, 1000)?.offdiagonal_sum();
        println!("{b:>6} {sum:>12.6} {:>12.6}", sufficiency_bound(b)?);
    }
    Ok(())
}
