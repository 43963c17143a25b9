//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::time::{Duration, Instant};

use anisometric::cli::{cmd_sweep, grid, verdict_flips, SweepModel, SweepOptions};
use anisometric::elsolve::{analyze_gram, el_residual, solve_el};
use anisometric::finite_models::{build_4x4, random_instance, FourByFourSpec};
use anisometric::linalg::frobenius;
use anisometric::metric_cone::{gram, hs_objective};
use anisometric::oracle::OracleOptions;
use anisometric::quadrature::CompositeRule;
use anisometric::robin::{
    convergence_table, csym_characteristic_vector, csym_f0_prime, csym_f0_prime_closed_form, max_delta,
    sufficiency_bound, RobinModel,
};
use anisometric::{analyze, ComplexMatrix, Verdict};
use common::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn two_by_two() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[1.0, 2.0]]).unwrap()
}

fn criterion_1() -> Outcome {
    let h = two_by_two();
    let start = Instant::now();
    let r = analyze(&system(&h)).unwrap();
    let elapsed = start.elapsed();
    let m = r.metric.as_ref().unwrap();
    let alpha_err = r.alpha_el.iter().map(|a| (a + 1.0 / 3.0).abs()).fold(0.0, f64::max);
    let expect = DMatrix::from_row_slice(2, 2, &[1.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]).map(|v| Complex64::new(v, 0.0));
    let theta_err = (m.theta.as_matrix() - expect).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pass = r.verdict == Verdict::MetricExists
        && alpha_err <= 1e-12
        && theta_err <= 1e-12
        && m.check.intertwining <= 1e-12
        && elapsed < Duration::from_millis(10);
    outcome(
        pass,
        format!(
            "alpha err {alpha_err:.1e}, Theta err {theta_err:.1e}, intertwining {:.1e}, {:.2} ms",
            m.check.intertwining,
            ms(elapsed)
        ),
    )
}

fn criterion_2() -> Outcome {
    let sys = system(&two_by_two());
    let r = analyze(&sys).unwrap();
    let by_gram = hs_objective(&gram(&sys).unwrap(), &r.alpha_el).unwrap();
    let theta = r.metric.unwrap().theta;
    let explicit = frobenius(&(theta.as_matrix() - DMatrix::identity(2, 2))).powi(2);
    let pass = (by_gram - explicit).abs() <= 1e-12 && (by_gram - 2.0 / 3.0).abs() <= 1e-12;
    outcome(pass, format!("Gram form {by_gram:.15}, Frobenius {explicit:.15}"))
}

fn criterion_3() -> Outcome {
    let opts = SweepOptions::default();
    let start = Instant::now();
    let coarse = cmd_sweep(SweepModel::FourByFour, &grid(0.1, 0.9, 0.1).unwrap(), &opts);
    let bracket = verdict_flips(&coarse);
    let fine_flip = bracket.first().map(|&(lo, hi)| {
        let fine = cmd_sweep(SweepModel::FourByFour, &grid(lo, hi, 1e-3).unwrap(), &opts);
        verdict_flips(&fine)
    });
    let elapsed = start.elapsed();

    let verdict_of = |x: f64| coarse.iter().find(|r| r.param == x).and_then(|r| r.verdict);
    let mut pass = (1..=6).all(|k| verdict_of(k as f64 / 10.0) == Some(Verdict::NoMinimalMetric))
        && [0.8, 0.9].iter().all(|&x| verdict_of(x) == Some(Verdict::MetricExists))
        && bracket.len() == 1;
    let flip = match fine_flip.as_deref() {
        Some([(lo, hi)]) => {
            pass &= *lo < FRAC_1_SQRT_2 && FRAC_1_SQRT_2 < *hi && hi - lo <= 1e-3 + 1e-12;
            format!("[{lo}, {hi}]")
        }
        _ => {
            pass = false;
            "none".into()
        }
    };

    let mut formula_err: f64 = 0.0;
    for k in 1..=9 {
        let x = k as f64 / 10.0;
        let alpha = solve_el(&gram(&system(&build_4x4(&FourByFourSpec::new(x)).unwrap())).unwrap()).unwrap();
        let y2 = 1.0 - x * x;
        let (a, b) = (-3.0 * y2 / (y2 + 1.0), -y2 / (y2 + 1.0));
        formula_err = formula_err.max((alpha[0] - a).abs());
        for v in &alpha[1..] {
            formula_err = formula_err.max((v - b).abs());
        }
    }
    pass &= formula_err <= 1e-10 && elapsed < Duration::from_secs(1);
    outcome(
        pass,
        format!(
            "flip in {flip} around {FRAC_1_SQRT_2:.5}, closed-form err {formula_err:.1e}, sweep {:.1} ms",
            ms(elapsed)
        ),
    )
}

const PERTURBATIONS: [f64; 3] = [0.05, 0.2, 0.6];

struct CorpusEntry {
    verdict: Verdict,
    sufficient: bool,
    agrees: bool,
    max_diff: f64,
    active: usize,
}

/// 100 seeded instances covering every pairing of `n in 3..=12` with the
/// three perturbation levels.
fn corpus() -> (Vec<CorpusEntry>, Duration) {
    let start = Instant::now();
    let entries = (0..100u64)
        .map(|seed| {
            let n = 3 + (seed % 10) as usize;
            let p = PERTURBATIONS[(seed % 3) as usize];
            let sys = system(&random_instance(n, p, seed).unwrap());
            let r = analyze_gram(&gram(&sys).unwrap(), &OracleOptions::default()).unwrap();
            CorpusEntry {
                verdict: r.verdict,
                sufficient: r.sufficiency_holds,
                agrees: r.oracle.agrees,
                max_diff: r.oracle.max_alpha_diff,
                active: r.oracle.active_set.len(),
            }
        })
        .collect();
    (entries, start.elapsed())
}

fn criterion_4(corpus: &[CorpusEntry], elapsed: Duration) -> Outcome {
    let interior: Vec<_> = corpus.iter().filter(|e| e.verdict == Verdict::MetricExists).collect();
    let boundary: Vec<_> = corpus.iter().filter(|e| e.verdict == Verdict::NoMinimalMetric).collect();
    let worst = interior.iter().map(|e| e.max_diff).fold(0.0, f64::max);
    let corpus_ok = interior.iter().all(|e| e.agrees && e.max_diff <= 1e-8)
        && boundary.iter().all(|e| e.agrees && e.active > 0);

    // the corpus never leaves the interior, so the boundary branch is also
    // exercised on the four-dimensional family
    let extra: Vec<usize> = (1..=7)
        .map(|k| {
            let g = gram(&system(&build_4x4(&FourByFourSpec::new(k as f64 / 10.0)).unwrap())).unwrap();
            let r = analyze_gram(&g, &OracleOptions::default()).unwrap();
            if r.verdict == Verdict::NoMinimalMetric && r.oracle.agrees {
                r.oracle.active_set.len()
            } else {
                0
            }
        })
        .collect();
    let pass = corpus_ok && extra.iter().all(|&a| a > 0) && elapsed < Duration::from_secs(30);
    outcome(
        pass,
        format!(
            "{} interior (max diff {worst:.1e}), {} boundary in corpus; 4x4 x=0.1..0.7 active sets {:?}; {:.2} s",
            interior.len(),
            boundary.len(),
            extra,
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_5(corpus: &[CorpusEntry]) -> Outcome {
    let sufficient: Vec<_> = corpus.iter().filter(|e| e.sufficient).collect();
    let sound = sufficient.iter().all(|e| e.verdict == Verdict::MetricExists);
    let r = analyze(&system(&two_by_two())).unwrap();
    let pass = sound
        && (r.sufficiency_sum - 1.0).abs() <= 1e-12
        && !r.sufficiency_holds
        && r.verdict == Verdict::MetricExists;
    outcome(
        pass,
        format!(
            "{}/{} sufficient instances have a metric; 2x2 sum = {} with {:?}",
            sufficient.iter().filter(|e| e.verdict == Verdict::MetricExists).count(),
            sufficient.len(),
            r.sufficiency_sum,
            r.verdict
        ),
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let rule = CompositeRule::new(-PI / 2.0, PI / 2.0, 8, 48).unwrap();
    let (mut worst, mut worst_parity): (f64, f64) = (0.0, 0.0);
    for beta in [0.1, 0.3, 0.45] {
        let m = RobinModel::new(beta, 20).unwrap();
        let tables: Vec<Vec<Complex64>> = (0..=20)
            .map(|n| rule.points.iter().map(|&x| robin_phi(beta, n, x)).collect())
            .collect();
        for n in 0..=20 {
            for k in 0..=20 {
                let q: Complex64 = tables[n]
                    .iter()
                    .zip(&tables[k])
                    .zip(&rule.weights)
                    .map(|((u, v), w)| u.conj() * v * w)
                    .sum();
                let a = m.gram_coefficient(n, k).unwrap();
                worst = worst.max((a - q).norm());
                if n >= 1 && k >= 1 && n != k && (n + k) % 2 == 0 {
                    worst_parity = worst_parity.max(a.norm());
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = worst <= 1e-8 && worst_parity <= 1e-14 && elapsed < Duration::from_secs(5);
    outcome(
        pass,
        format!(
            "max |analytic - quadrature| {worst:.1e}, same-parity max {worst_parity:.1e}, {:.1} ms",
            ms(elapsed)
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for beta in [0.05, 0.1, 0.2, 0.4] {
        let sum = RobinModel::new(beta, 1000).unwrap().offdiagonal_sum();
        let bound = sufficiency_bound(beta).unwrap();
        pass &= sum <= bound;
        parts.push(format!("{beta}: {sum:.4} <= {bound:.4}"));
    }
    let b = sufficiency_bound(0.1).unwrap();
    let g = RobinModel::new(0.1, 1000).unwrap().gram_matrix().unwrap();
    let verdict = analyze_gram(&g, &OracleOptions::default()).unwrap().verdict;
    pass &= (b - 0.330).abs() < 5e-4 && b < 1.0 && verdict == Verdict::MetricExists;
    outcome(pass, format!("{}; beta 0.1 verdict {verdict:?}", parts.join(", ")))
}

fn criterion_8() -> Outcome {
    let mut worst: f64 = 0.0;
    for beta in [0.1, 0.2, 0.3, 0.4] {
        let q = csym_f0_prime(beta, 64).unwrap();
        worst = worst.max((q - csym_f0_prime_closed_form(beta).unwrap()).abs());
    }
    let model = RobinModel::new(0.25, 50).unwrap();
    let alpha_c = csym_characteristic_vector(&model).unwrap();
    let residual = el_residual(&model.gram_matrix().unwrap(), &alpha_c).unwrap();
    let pass = worst <= 1e-6 && residual > 1e-3;
    outcome(
        pass,
        format!("f0'(0) max err {worst:.1e}; EL residual of the charge metric {residual:.4}"),
    )
}

fn robin_delta(beta: f64) -> f64 {
    max_delta(&convergence_table(&RobinModel::new(beta, 200).unwrap(), &[50, 100, 200]).unwrap())
}

fn criterion_9() -> Outcome {
    let delta = robin_delta(0.1);
    let property = run_suite(0.01f64..0.2, |beta| {
        let d = robin_delta(beta);
        prop_assert!(d < 1e-4, "delta {d:e} at beta {beta}");
        Ok(())
    });
    let pass = delta < 1e-4 && property.is_ok();
    let prop_note = match &property {
        Ok(()) => format!("{CASES} random beta in [0.01, 0.2) also Cauchy"),
        Err(e) => e.clone(),
    };
    outcome(pass, format!("beta 0.1 max delta {delta:.2e}; {prop_note}"))
}

fn criterion_10() -> Outcome {
    let suites: Vec<(&str, Result<(), String>)> = vec![
        ("biorthogonality", run_suite(instance(), biorthogonality)),
        ("resolution of identity", run_suite(instance(), resolution_of_identity)),
        (
            "phase invariance",
            run_suite((instance(), proptest::collection::vec(-3.2f64..3.2, 10)), phase_invariance),
        ),
        ("convexity", run_suite(gram_with_pair(), convexity)),
        ("monotone descent", run_suite(gram_matrix(), monotone_descent)),
        ("lambda independence", run_suite((0.05f64..0.95, distinct_lambdas()), lambda_independence)),
    ];
    let failed: Vec<String> = suites
        .iter()
        .filter_map(|(name, r)| r.as_ref().err().map(|e| format!("{name}: {e}")))
        .collect();
    let detail = if failed.is_empty() {
        format!("{} suites x {CASES} cases", suites.len())
    } else {
        failed.join("; ")
    };
    outcome(failed.is_empty(), detail)
}

fn main() {
    let (corpus, corpus_time) = corpus();
    let results = [
        ("two-by-two reproduction", criterion_1()),
        ("HS distance identity", criterion_2()),
        ("four-by-four trichotomy", criterion_3()),
        ("oracle equivalence", criterion_4(&corpus, corpus_time)),
        ("sufficiency soundness", criterion_5(&corpus)),
        ("Robin Gram coefficients", criterion_6()),
        ("Robin bound chain", criterion_7()),
        ("charge metric is not minimal", criterion_8()),
        ("truncation stability", criterion_9()),
        ("invariant suites", criterion_10()),
    ];
    let mut failures = 0;
    for (k, (name, o)) in results.iter().enumerate() {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag} {name}: {}", k + 1, o.detail);
        failures += !o.pass as usize;
    }
    println!("acceptance: {} passed, {failures} failed", results.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
