//! The four-dimensional family: no minimal metric for small `x`, a metric
//! for `x > 1/sqrt(2)`.
//!
//! A coarse sweep locates the flip, a fine sweep brackets it to `1e-3`, and
//! the EL solution is compared with `a = -3y^2/(y^2+1)`, `b = -y^2/(y^2+1)`.

use anisometric::cli::{cmd_sweep, grid, verdict_flips, SweepModel, SweepOptions};
use anisometric::finite_models::{build_4x4, FourByFourSpec};
use anisometric::{analyze, eigensystem, Tolerances};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let opts = SweepOptions::default();
    let coarse = cmd_sweep(SweepModel::FourByFour, &grid(0.1, 0.9, 0.1)?, &opts);
    for r in &coarse {
        println!("x = {:.1}: {:?}, min alpha = {:.6}", r.param, r.verdict.unwrap(), r.min_alpha_el.unwrap());
    }
    let (lo, hi) = verdict_flips(&coarse)[0];
    let fine = cmd_sweep(SweepModel::FourByFour, &grid(lo, hi, 1e-3)?, &opts);
    let (a, b) = verdict_flips(&fine)[0];
    println!("threshold in [{a}, {b}], 1/sqrt(2) = {:.6}", std::f64::consts::FRAC_1_SQRT_2);

    println!("\n{:>5} {:>14} {:>14} {:>14} {:>14}", "x", "alpha_0", "a", "alpha_1", "b");
    for x in [0.3, 0.6, 0.75, 0.9] {
        let h = build_4x4(&FourByFourSpec::new(x))?;
        let r = analyze(&eigensystem(&h, &Tolerances::for_matrix(&h))?)?;
        let y2 = 1.0 - x * x;
        println!(
            "{x:>5} {:>14.10} {:>14.10} {:>14.10} {:>14.10}",
            r.alpha_el[0],
            -3.0 * y2 / (y2 + 1.0),
            r.alpha_el[1],
            -y2 / (y2 + 1.0)
        );
    }
    Ok(())
}
