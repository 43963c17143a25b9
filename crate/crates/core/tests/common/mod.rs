//! Invariant checks shared by the property suite and the acceptance target.
#![allow(dead_code)]

use anisometric::biortho::resolution_of_identity_residual;
use anisometric::elsolve::{classify, solve_el, sufficiency_check};
use anisometric::finite_models::{build_2x2, build_4x4, random_instance, FourByFourSpec, TwoByTwoSpec};
use anisometric::linalg::inner;
use anisometric::metric_cone::{assemble_metric, gram, hs_objective, verify_metric, GramMatrix};
use anisometric::oracle::{minimize, minimize_observed, OracleOptions};
use anisometric::{eigensystem, BiorthogonalSystem, ComplexMatrix, Tolerances, Verdict};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestError, TestRng, TestRunner};
use std::f64::consts::PI;

pub type Check = Result<(), TestCaseError>;

pub const CASES: u32 = 100;

/// Unit eigenfunction of the adjoint Robin operator, coded from scratch.
pub fn robin_phi(beta: f64, n: usize, x: f64) -> Complex64 {
    let t = x + PI / 2.0;
    if n == 0 {
        Complex64::from_polar(1.0 / PI.sqrt(), beta * t)
    } else {
        let nf = n as f64;
        let b = (2.0 / PI).sqrt() * nf / (nf * nf + beta * beta).sqrt();
        Complex64::new((nf * t).cos(), beta / nf * (nf * t).sin()) * b
    }
}

pub fn system(h: &ComplexMatrix) -> BiorthogonalSystem {
    eigensystem(h, &Tolerances::for_matrix(h)).expect("eigensystem")
}

/// A seeded random instance: dimension, perturbation, seed.
pub fn instance() -> impl Strategy<Value = (usize, f64, u64)> {
    (2usize..=10, 0.0f64..0.9, any::<u64>())
}

pub fn random_system((n, p, seed): (usize, f64, u64)) -> BiorthogonalSystem {
    system(&random_instance(n, p, seed).expect("random instance"))
}

/// Gram matrices from both random instances and the four-dimensional family.
pub fn gram_matrix() -> impl Strategy<Value = GramMatrix> {
    prop_oneof![
        instance().prop_map(|i| gram(&random_system(i)).unwrap()),
        (0.2f64..0.95).prop_map(|x| gram(&system(&build_4x4(&FourByFourSpec::new(x)).unwrap())).unwrap()),
    ]
}

pub fn cone_vector(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.0f64..2.0, n)
}

/// Gram matrix with two cone points and a weight in `(0, 1)`.
pub fn gram_with_pair() -> impl Strategy<Value = (GramMatrix, Vec<f64>, Vec<f64>, f64)> {
    gram_matrix().prop_flat_map(|g| {
        let n = g.dim();
        (Just(g), cone_vector(n), cone_vector(n), 0.001f64..0.999)
    })
}

pub fn biorthogonality(i: (usize, f64, u64)) -> Check {
    let sys = random_system(i);
    let h = sys.hamiltonian().as_matrix();
    for (m, psi) in sys.psi().iter().enumerate() {
        for (n, phi) in sys.phi().iter().enumerate() {
            let expect = if m == n { 1.0 } else { 0.0 };
            let d = (inner(psi, phi) - Complex64::new(expect, 0.0)).norm();
            prop_assert!(d <= 1e-10, "<psi_{m}, phi_{n}> off by {d:e}");
        }
        prop_assert!((sys.phi()[m].norm() - 1.0).abs() <= 1e-12);
        let lam = Complex64::new(sys.eigenvalues()[m], 0.0);
        let scale = 1e-9 * h.norm().max(1.0) * psi.norm().max(1.0);
        prop_assert!((h * psi - psi * lam).norm() <= scale);
        prop_assert!((h.adjoint() * &sys.phi()[m] - &sys.phi()[m] * lam).norm() <= 1e-9 * h.norm().max(1.0));
    }
    Ok(())
}

pub fn resolution_of_identity(i: (usize, f64, u64)) -> Check {
    let sys = random_system(i);
    let n = sys.dim();
    let mut sum = DMatrix::<Complex64>::zeros(n, n);
    for (p, f) in sys.psi().iter().zip(sys.phi()) {
        sum += p * f.adjoint();
    }
    let direct = (sum - DMatrix::identity(n, n)).norm();
    prop_assert!(direct <= 1e-10, "sum psi phi* - I = {direct:e}");
    prop_assert!((resolution_of_identity_residual(&sys) - direct).abs() <= 1e-12);
    Ok(())
}

/// Rephasing the eigenvectors, or conjugating `H` by a diagonal unitary,
/// leaves the Gram matrix and the EL solution unchanged.
pub fn phase_invariance((i, phases): ((usize, f64, u64), Vec<f64>)) -> Check {
    let sys = random_system(i);
    let n = sys.dim();
    let phases = &phases[..n];
    let g = gram(&sys).unwrap();
    let alpha = solve_el(&g).unwrap();

    let g2 = gram(&sys.rephased(phases).unwrap()).unwrap();
    prop_assert!((g.as_matrix() - g2.as_matrix()).amax() <= 1e-14);

    let u = DMatrix::from_fn(n, n, |r, c| {
        if r == c {
            Complex64::from_polar(1.0, phases[r])
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let h = ComplexMatrix::new(&u * sys.hamiltonian().as_matrix() * u.adjoint()).unwrap();
    let g3 = gram(&system(&h)).unwrap();
    prop_assert!((g.as_matrix() - g3.as_matrix()).amax() <= 1e-10);
    let alpha3 = solve_el(&g3).unwrap();
    for (a, b) in alpha.iter().zip(&alpha3) {
        prop_assert!((a - b).abs() <= 1e-9);
    }
    Ok(())
}

pub fn convexity((g, a1, a2, t): (GramMatrix, Vec<f64>, Vec<f64>, f64)) -> Check {
    let mix: Vec<f64> = a1.iter().zip(&a2).map(|(x, y)| t * x + (1.0 - t) * y).collect();
    let lhs = hs_objective(&g, &mix).unwrap();
    let rhs = t * hs_objective(&g, &a1).unwrap() + (1.0 - t) * hs_objective(&g, &a2).unwrap();
    prop_assert!(lhs <= rhs + 1e-12, "f(mix) = {lhs}, chord = {rhs}");
    Ok(())
}

/// The midpoint of two metrics is a metric.
pub fn midpoint_closure((i, a1, a2): ((usize, f64, u64), Vec<f64>, Vec<f64>)) -> Check {
    let sys = random_system(i);
    let n = sys.dim();
    let interior = |v: &[f64]| -> Vec<f64> { v[..n].iter().map(|a| a.max(-1.0 + 1e-3)).collect() };
    let (a1, a2) = (interior(&a1), interior(&a2));
    let mid: Vec<f64> = a1.iter().zip(&a2).map(|(x, y)| 0.5 * (x + y)).collect();
    let theta = assemble_metric(&sys, &mid).unwrap();
    let check = verify_metric(sys.hamiltonian(), &theta).unwrap();
    let scale = sys.hamiltonian().frobenius_norm().max(1.0) * theta.frobenius_norm();
    prop_assert!(check.intertwining <= 1e-9 * scale, "intertwining {:e}", check.intertwining);
    prop_assert!(check.min_eigenvalue > 0.0);
    Ok(())
}

pub fn monotone_descent(g: GramMatrix) -> Check {
    let mut values = vec![hs_objective(&g, &vec![0.0; g.dim()]).unwrap()];
    minimize_observed(&g, &OracleOptions::default(), |_, f| values.push(f)).unwrap();
    for w in values.windows(2) {
        prop_assert!(w[1] <= w[0] + 1e-13 * w[0].max(1.0), "objective rose from {} to {}", w[0], w[1]);
    }
    Ok(())
}

pub fn step_size_robustness((g, divisor): (GramMatrix, f64)) -> Check {
    let base = minimize(&g, &OracleOptions::default()).unwrap();
    let other = minimize(
        &g,
        &OracleOptions {
            step_divisor: divisor,
            ..Default::default()
        },
    )
    .unwrap();
    for (a, b) in base.alpha_star.iter().zip(&other.alpha_star) {
        prop_assert!((a - b).abs() <= 1e-8, "{a} vs {b}");
    }
    prop_assert_eq!(base.active_set, other.active_set);
    Ok(())
}

/// No sampled feasible point beats the oracle value.
pub fn minimality_certificate((g, seed): (GramMatrix, u64)) -> Check {
    use rand::{Rng, SeedableRng};
    let r = minimize(&g, &OracleOptions::default()).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for k in 0..200 {
        // half the samples are local perturbations of the minimizer
        let alpha: Vec<f64> = if k % 2 == 0 {
            (0..g.dim()).map(|_| rng.random_range(-1.0..2.0)).collect()
        } else {
            r.alpha_star
                .iter()
                .map(|a| (a + rng.random_range(-0.01..0.01)).max(-1.0))
                .collect()
        };
        let f = hs_objective(&g, &alpha).unwrap();
        prop_assert!(f >= r.objective_value - 1e-10, "{f} < {}", r.objective_value);
    }
    Ok(())
}

/// Distinct eigenvalues for the four-dimensional family, separated by at
/// least 0.1.
pub fn distinct_lambdas() -> impl Strategy<Value = [f64; 4]> {
    proptest::array::uniform4(-5.0f64..5.0).prop_filter("separated", |l| {
        let mut s = l.to_vec();
        s.sort_by(f64::total_cmp);
        s.windows(2).all(|w| w[1] - w[0] >= 0.1)
    })
}

/// The verdict and characteristic vector depend only on the eigenvectors.
pub fn lambda_independence((x, lambdas): (f64, [f64; 4])) -> Check {
    prop_assume!((x - std::f64::consts::FRAC_1_SQRT_2).abs() > 1e-3);
    let base = solve_el(&gram(&system(&build_4x4(&FourByFourSpec::new(x)).unwrap())).unwrap()).unwrap();
    let spec = FourByFourSpec { x, lambdas };
    let sys = system(&build_4x4(&spec).unwrap());
    let alpha = solve_el(&gram(&sys).unwrap()).unwrap();
    let expected = if x > std::f64::consts::FRAC_1_SQRT_2 {
        Verdict::MetricExists
    } else {
        Verdict::NoMinimalMetric
    };
    prop_assert_eq!(classify(&base), expected);
    prop_assert_eq!(classify(&alpha), expected);
    // the solution is a permutation-free function of the phi family, so
    // compare as multisets
    let mut a = alpha.clone();
    let mut b = base.clone();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    for (u, v) in a.iter().zip(&b) {
        prop_assert!((u - v).abs() <= 1e-9, "{u} vs {v}");
    }
    Ok(())
}

pub fn two_by_two_spec() -> impl Strategy<Value = TwoByTwoSpec> {
    (0.01f64..1.56, -3.0f64..3.0, -5.0f64..5.0, 0.1f64..5.0).prop_map(|(angle, phase, l1, gap)| {
        let mut s = TwoByTwoSpec::with_angle(angle, phase);
        s.lambda1 = l1;
        s.lambda2 = l1 + gap;
        s
    })
}

pub fn two_by_two_closed_form(spec: TwoByTwoSpec) -> Check {
    let sys = system(&build_2x2(&spec).unwrap());
    let gamma = spec.gamma();
    let alpha = solve_el(&gram(&sys).unwrap()).unwrap();
    for a in alpha {
        prop_assert!((a + gamma / (1.0 + gamma)).abs() <= 1e-10);
    }
    Ok(())
}

pub fn sufficiency_soundness(i: (usize, f64, u64)) -> Check {
    let g = gram(&random_system(i)).unwrap();
    let s = sufficiency_check(&g);
    if s.holds {
        prop_assert_eq!(classify(&solve_el(&g).unwrap()), Verdict::MetricExists);
    }
    Ok(())
}

/// Coordinate perturbations of an interior EL solution raise the objective.
pub fn optimality_vs_perturbation((g, idx, sign): (GramMatrix, usize, bool)) -> Check {
    let alpha = solve_el(&g).unwrap();
    prop_assume!(classify(&alpha) == Verdict::MetricExists);
    let mut moved = alpha.clone();
    let k = idx % g.dim();
    moved[k] += if sign { 1e-3 } else { -1e-3 };
    prop_assert!(hs_objective(&g, &moved).unwrap() > hs_objective(&g, &alpha).unwrap());
    Ok(())
}

/// Runs `check` over `CASES` deterministic draws of `strategy`.
pub fn run_suite<S, F>(strategy: S, check: F) -> Result<(), String>
where
    S: Strategy,
    S::Value: std::fmt::Debug,
    F: Fn(S::Value) -> Check,
{
    let config = Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&strategy, check).map_err(|e| match e {
        TestError::Abort(r) => format!("aborted: {r}"),
        TestError::Fail(r, v) => format!("{r} at {v:?}"),
    })
}
