//! The charge-operator metric of the Robin model is not the minimally
//! anisotropic one: the HS distance decreases when its first coefficient is
//! lowered, and its characteristic vector violates the EL equations.

use anisometric::elsolve::{el_residual, solve_el};
use anisometric::robin::{csym_characteristic_vector, csym_f0_prime, csym_f0_prime_closed_form, RobinModel};

fn main() -> anisometric::Result<()> {
    println!("{:>5} {:>16} {:>16}", "beta", "f0'(0) quad", "2 beta pi tan");
    for beta in [0.1, 0.2, 0.25, 0.3, 0.4] {
        println!("{beta:>5} {:>16.12} {:>16.12}", csym_f0_prime(beta, 64)?, csym_f0_prime_closed_form(beta)?);
    }

    let model = RobinModel::new(0.25, 50)?;
    let g = model.gram_matrix()?;
    let alpha_c = csym_characteristic_vector(&model)?;
    let alpha_el = solve_el(&g)?;
    println!("\nbeta = 0.25, N = 50");
    println!("{:>3} {:>14} {:>14}", "n", "alpha(Theta_C)", "alpha_el");
    for n in 0..6 {
        println!("{n:>3} {:>14.10} {:>14.10}", alpha_c[n], alpha_el[n]);
    }
    println!("EL residual of Theta_C: {:.6}", el_residual(&g, &alpha_c)?);
    println!("EL residual of alpha_el: {:.3e}", el_residual(&g, &alpha_el)?);
    Ok(())
}
