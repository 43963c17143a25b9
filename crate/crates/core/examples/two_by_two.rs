//! The two-dimensional example: `H = [[1, 0], [1, 2]]`.
//!
//! Prints the characteristic vector, the minimal metric and its distance to
//! the identity, then repeats the analysis over the angle between the two
//! eigenvectors of `H*` against `alpha = -gamma / (1 + gamma)`.

use anisometric::finite_models::{build_2x2, TwoByTwoSpec};
use anisometric::{analyze, eigensystem, Tolerances};

fn main() -> anisometric::Result<()> {
    let spec = TwoByTwoSpec::standard();
    let h = build_2x2(&spec)?;
    println!("H = {}", h.as_matrix());
    let sys = eigensystem(&h, &Tolerances::for_matrix(&h))?;
    let r = analyze(&sys)?;
    println!("alpha_el = {:?}  ({:?})", r.alpha_el, r.verdict);
    let m = r.metric.as_ref().expect("interior solution");
    println!("Theta = {}", m.theta.as_matrix());
    println!("||Theta - I||_2^2 = {:.15}", r.minimizer.hs_distance.powi(2));
    println!("intertwining residual = {:.3e}", m.check.intertwining);
    println!(
        "sufficiency sum = {} (holds: {}), yet a metric exists",
        r.sufficiency_sum, r.sufficiency_holds
    );

    println!("\n{:>8} {:>10} {:>14} {:>14}", "angle", "gamma", "alpha_el", "closed form");
    for k in 1..=8 {
        let angle = k as f64 * std::f64::consts::FRAC_PI_2 / 8.0;
        let spec = TwoByTwoSpec::with_angle(angle, 0.7);
        let h = build_2x2(&spec)?;
        let r = analyze(&eigensystem(&h, &Tolerances::for_matrix(&h))?)?;
        let gamma = spec.gamma();
        println!("{angle:>8.4} {gamma:>10.6} {:>14.10} {:>14.10}", r.alpha_el[0], -gamma / (1.0 + gamma));
    }
    Ok(())
}
