//! Command-line front end: argument parsing, the matrix and report file
//! formats, and the subcommand implementations behind the `anisometric`
//! binary.
//!
//! Every command is a plain function returning a serializable report, so
//! the same code paths are reachable from tests and examples. [`run`] ties
//! them to argument parsing and the exit-code contract:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | metric exists (or verification agreed) |
//! | 1 | oracle cross-check failed |
//! | 2 | parse, usage or parameter error |
//! | 3 | no minimal metric |
//! | 4 | numerical failure |

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::biortho::{eigensystem, Tolerances};
use crate::elsolve::{analyze_with, el_residual, OracleSummary, Sufficiency, Verdict};
use crate::error::Error;
use crate::finite_models::{build_2x2, build_4x4, random_instance, FourByFourSpec, TwoByTwoSpec};
use crate::linalg::{c, ComplexMatrix};
use crate::metric_cone::{min_of, MetricCheck};
use crate::oracle::OracleOptions;
use crate::robin::{self, ConvergenceRow, RobinModel, DEFAULT_QUAD_ORDER, DEFAULT_TRUNCATION};

pub const EXIT_METRIC_EXISTS: i32 = 0;
pub const EXIT_CROSSCHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NO_MINIMAL_METRIC: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

/// Sweep parameters are rounded to this grid so that printed values are
/// stable across platforms.
const PARAM_ROUNDING: f64 = 1e12;
const MAX_GRID_POINTS: usize = 1_000_000;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Model(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Model(e) => match e {
                Error::NotSquare { .. }
                | Error::NonFinite { .. }
                | Error::DimensionMismatch { .. }
                | Error::InvalidParameter(_)
                | Error::BetaOutOfRange(_)
                | Error::IntegerBeta(_)
                | Error::TanPole(_)
                | Error::DegenerateVectors { .. }
                | Error::IndexOutOfTruncation { .. } => EXIT_USAGE,
                _ => EXIT_NUMERICAL,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn exit_for(verdict: Verdict) -> i32 {
    match verdict {
        Verdict::MetricExists => EXIT_METRIC_EXISTS,
        Verdict::NoMinimalMetric => EXIT_NO_MINIMAL_METRIC,
    }
}

// ---------------------------------------------------------------- formats

/// Dense complex matrix on disk: `{"n": 2, "rows": [[[1, 0], [0, 0]], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub n: usize,
    pub rows: Vec<Vec<[f64; 2]>>,
}

impl MatrixFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        let file: MatrixFile = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        if file.n == 0 {
            return Err(CliError::Parse("n must be positive".into()));
        }
        if file.rows.len() != file.n {
            return Err(CliError::Parse(format!("expected {} rows, found {}", file.n, file.rows.len())));
        }
        for (i, row) in file.rows.iter().enumerate() {
            if row.len() != file.n {
                return Err(CliError::Parse(format!(
                    "row {i} has {} entries, expected {}",
                    row.len(),
                    file.n
                )));
            }
        }
        Ok(file)
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn from_matrix(h: &ComplexMatrix) -> Self {
        Self {
            n: h.dim(),
            rows: complex_rows(h),
        }
    }

    pub fn to_matrix(&self) -> CliResult<ComplexMatrix> {
        let n = self.n;
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| c(self.rows[i][j][0], self.rows[i][j][1]));
        Ok(ComplexMatrix::new(m)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("matrix file serializes");
        s.push('\n');
        s
    }
}

fn complex_rows(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.dim())
        .map(|i| {
            (0..m.dim())
                .map(|j| {
                    let z = m.get(i, j);
                    [z.re, z.im]
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub biortho: f64,
    pub eigen: f64,
    pub el: f64,
    /// `||Theta H - H* Theta||_F`; null when no metric was assembled.
    pub intertwining: Option<f64>,
}

/// Full analysis report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub input: String,
    pub dimension: usize,
    pub eigenvalues: Vec<f64>,
    pub alpha_el: Vec<f64>,
    pub verdict: Verdict,
    pub marginal: bool,
    /// `||Theta - I||_2` at `minimizer`.
    pub hs_distance: f64,
    /// Cone minimizer: `alpha_el` if interior, the oracle point otherwise.
    pub minimizer: Vec<f64>,
    pub sufficiency: Sufficiency,
    pub residuals: Residuals,
    pub oracle: OracleSummary,
    pub metric: Option<Vec<Vec<[f64; 2]>>>,
}

impl ReportFile {
    pub fn exit_code(&self) -> i32 {
        exit_for(self.verdict)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

// ---------------------------------------------------------------- commands

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    pub oracle: OracleOptions,
    pub emit_metric: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            oracle: OracleOptions::default(),
            emit_metric: false,
        }
    }
}

/// Runs the finite-dimensional pipeline on `h`.
pub fn analyze_matrix(h: &ComplexMatrix, input: String, opts: &AnalysisOptions) -> CliResult<ReportFile> {
    let sys = eigensystem(h, &Tolerances::for_matrix(h))?;
    let report = analyze_with(&sys, &opts.oracle)?;
    let residuals = sys.residuals();
    Ok(ReportFile {
        input,
        dimension: sys.dim(),
        eigenvalues: sys.eigenvalues().to_vec(),
        verdict: report.verdict,
        marginal: report.marginal,
        hs_distance: report.minimizer.hs_distance,
        minimizer: report.minimizer.alpha.clone(),
        sufficiency: Sufficiency {
            sum: report.sufficiency_sum,
            holds: report.sufficiency_holds,
        },
        residuals: Residuals {
            biortho: residuals.biortho,
            eigen: residuals.eigen,
            el: report.el_residual,
            intertwining: report.metric.as_ref().map(|m| m.check.intertwining),
        },
        metric: match (&report.metric, opts.emit_metric) {
            (Some(m), true) => Some(complex_rows(&m.theta)),
            _ => None,
        },
        oracle: report.oracle,
        alpha_el: report.alpha_el,
    })
}

fn file_label(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn cmd_solve(path: &Path, opts: &AnalysisOptions) -> CliResult<ReportFile> {
    let h = MatrixFile::read(path)?.to_matrix()?;
    analyze_matrix(&h, format!("file:{}", file_label(path)), opts)
}

/// Named finite model with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelSpec {
    /// `phi_1 = e_1`, `phi_2 = (cos t, e^{i phase} sin t)`; `None` is the
    /// standard pair at `t = pi/4`.
    TwoByTwo { angle: Option<f64>, phase: f64 },
    FourByFour { x: f64 },
    Random { n: usize, perturbation: f64, seed: u64 },
}

impl ModelSpec {
    pub fn build(&self) -> CliResult<ComplexMatrix> {
        Ok(match *self {
            ModelSpec::TwoByTwo { angle: None, .. } => build_2x2(&TwoByTwoSpec::standard())?,
            ModelSpec::TwoByTwo { angle: Some(t), phase } => build_2x2(&TwoByTwoSpec::with_angle(t, phase))?,
            ModelSpec::FourByFour { x } => build_4x4(&FourByFourSpec::new(x))?,
            ModelSpec::Random { n, perturbation, seed } => random_instance(n, perturbation, seed)?,
        })
    }

    pub fn label(&self) -> String {
        match *self {
            ModelSpec::TwoByTwo { angle: None, .. } => "model:two-by-two".into(),
            ModelSpec::TwoByTwo { angle: Some(t), phase } => {
                format!("model:two-by-two angle={t} phase={phase}")
            }
            ModelSpec::FourByFour { x } => format!("model:four-by-four x={x}"),
            ModelSpec::Random { n, perturbation, seed } => {
                format!("model:random n={n} perturbation={perturbation} seed={seed}")
            }
        }
    }
}

pub fn cmd_model(spec: &ModelSpec, opts: &AnalysisOptions) -> CliResult<(ReportFile, ComplexMatrix)> {
    let h = spec.build()?;
    let report = analyze_matrix(&h, spec.label(), opts)?;
    Ok((report, h))
}

/// Oracle cross-check report for a matrix file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub input: String,
    pub verdict: Verdict,
    pub alpha_el: Vec<f64>,
    pub alpha_star: Vec<f64>,
    pub max_alpha_diff: f64,
    pub active_set: Vec<usize>,
    pub iterations: usize,
    pub kkt_residual: f64,
    pub agrees: bool,
    pub metric_check: Option<MetricCheck>,
}

impl VerifyReport {
    pub fn exit_code(&self) -> i32 {
        if self.agrees {
            EXIT_METRIC_EXISTS
        } else {
            EXIT_CROSSCHECK_FAILED
        }
    }
}

pub fn cmd_verify(path: &Path, opts: &OracleOptions) -> CliResult<VerifyReport> {
    let h = MatrixFile::read(path)?.to_matrix()?;
    let sys = eigensystem(&h, &Tolerances::for_matrix(&h))?;
    let report = analyze_with(&sys, opts)?;
    Ok(VerifyReport {
        input: format!("file:{}", file_label(path)),
        verdict: report.verdict,
        alpha_el: report.alpha_el,
        alpha_star: report.oracle.alpha_star,
        max_alpha_diff: report.oracle.max_alpha_diff,
        active_set: report.oracle.active_set,
        iterations: report.oracle.iterations,
        kkt_residual: report.oracle.kkt_residual,
        agrees: report.oracle.agrees,
        metric_check: report.metric.map(|m| m.check),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobinOptions {
    pub beta: f64,
    pub truncation: usize,
    pub quad_order: usize,
    pub csym: bool,
    pub oracle: OracleOptions,
}

impl RobinOptions {
    pub fn new(beta: f64) -> Self {
        Self {
            beta,
            truncation: DEFAULT_TRUNCATION,
            quad_order: DEFAULT_QUAD_ORDER,
            csym: false,
            oracle: OracleOptions::default(),
        }
    }
}

/// Comparison of the charge-operator metric with the EL solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsymSection {
    pub f0_prime_quadrature: f64,
    pub f0_prime_closed_form: f64,
    /// Characteristic vector of the charge-operator metric.
    pub alpha: Vec<f64>,
    /// `||G alpha + r||_inf` for that vector; nonzero means it is not the
    /// minimizer.
    pub el_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobinReport {
    pub beta: f64,
    pub truncation: usize,
    pub quad_order: usize,
    /// Closed-form bound on the off-diagonal sum; null outside `0 < beta < 1/2`.
    pub sufficiency_bound: Option<f64>,
    pub convergence_truncations: Vec<usize>,
    pub convergence_max_delta: f64,
    pub report: ReportFile,
    pub csym: Option<CsymSection>,
    #[serde(skip)]
    pub convergence: Vec<ConvergenceRow>,
}

pub fn cmd_robin(opts: &RobinOptions) -> CliResult<RobinReport> {
    let model = RobinModel::new(opts.beta, opts.truncation)?.with_quad_order(opts.quad_order)?;
    let g = model.gram_matrix()?;
    let report = crate::elsolve::analyze_gram(&g, &opts.oracle)?;
    let n = opts.truncation;
    let nested: Vec<usize> = [n / 4, n / 2, n].into_iter().filter(|&t| t >= 1).collect();
    let convergence = robin::convergence_table(&model, &nested)?;
    let residuals = model.normalization_residuals()?;
    let eigenvalues = (0..=n)
        .map(|k| model.eigendata(k).map(|d| d.lambda))
        .collect::<crate::Result<Vec<_>>>()?;

    let csym = if opts.csym {
        let alpha = robin::csym_characteristic_vector(&model)?;
        Some(CsymSection {
            f0_prime_quadrature: robin::csym_f0_prime(opts.beta, opts.quad_order)?,
            f0_prime_closed_form: robin::csym_f0_prime_closed_form(opts.beta)?,
            el_residual: el_residual(&g, &alpha)?,
            alpha,
        })
    } else {
        None
    };

    let file = ReportFile {
        input: format!("robin beta={} N={} quad_order={}", opts.beta, n, opts.quad_order),
        dimension: n + 1,
        eigenvalues,
        verdict: report.verdict,
        marginal: report.marginal,
        hs_distance: report.minimizer.hs_distance,
        minimizer: report.minimizer.alpha.clone(),
        sufficiency: Sufficiency {
            sum: report.sufficiency_sum,
            holds: report.sufficiency_holds,
        },
        residuals: Residuals {
            biortho: residuals.biortho,
            eigen: residuals.eigen,
            el: report.el_residual,
            intertwining: None,
        },
        oracle: report.oracle,
        metric: None,
        alpha_el: report.alpha_el,
    };
    Ok(RobinReport {
        beta: opts.beta,
        truncation: n,
        quad_order: opts.quad_order,
        sufficiency_bound: robin::sufficiency_bound(opts.beta).ok(),
        convergence_max_delta: robin::max_delta(&convergence),
        convergence_truncations: nested,
        report: file,
        csym,
        convergence,
    })
}

/// `N,n,alpha_n,delta_vs_prev`; the delta is empty for the smallest `N`.
pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv is utf-8")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepModel {
    /// parameter: angle between the two eigenvectors of `H*`
    TwoByTwo,
    /// parameter: x
    FourByFour,
    /// parameter: perturbation strength (uses --n and --seed)
    Random,
    /// parameter: beta (uses --truncation and --quad-order)
    Robin,
}

/// One grid point of a sweep. Numeric fields are empty when `status` is an
/// error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: f64,
    pub verdict: Option<Verdict>,
    pub min_alpha_el: Option<f64>,
    pub hs_distance: Option<f64>,
    pub sufficiency_sum: Option<f64>,
    pub sufficiency_holds: Option<bool>,
    pub oracle_agrees: Option<bool>,
    pub status: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub n: usize,
    pub seed: u64,
    pub truncation: usize,
    pub quad_order: usize,
    pub oracle: OracleOptions,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            n: 4,
            seed: 0,
            truncation: DEFAULT_TRUNCATION,
            quad_order: DEFAULT_QUAD_ORDER,
            oracle: OracleOptions::default(),
        }
    }
}

/// Rounds a grid parameter to `1e-12`.
pub fn round_param(p: f64) -> f64 {
    (p * PARAM_ROUNDING).round() / PARAM_ROUNDING
}

/// `from, from + step, ...` up to `to` inclusive (within `1e-9 step`).
pub fn grid(from: f64, to: f64, step: f64) -> CliResult<Vec<f64>> {
    if !(from.is_finite() && to.is_finite() && step > 0.0 && step.is_finite() && to >= from) {
        return Err(CliError::Model(Error::InvalidParameter(format!(
            "grid from={from} to={to} step={step}"
        ))));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    if count > MAX_GRID_POINTS {
        return Err(CliError::Model(Error::InvalidParameter(format!("grid has {count} points"))));
    }
    Ok((0..count).map(|k| round_param(from + k as f64 * step)).collect())
}

fn sweep_point(model: SweepModel, param: f64, opts: &SweepOptions) -> CliResult<ReportFile> {
    let analysis = AnalysisOptions {
        oracle: opts.oracle,
        emit_metric: false,
    };
    match model {
        SweepModel::TwoByTwo => {
            let spec = ModelSpec::TwoByTwo {
                angle: Some(param),
                phase: 0.0,
            };
            Ok(cmd_model(&spec, &analysis)?.0)
        }
        SweepModel::FourByFour => Ok(cmd_model(&ModelSpec::FourByFour { x: param }, &analysis)?.0),
        SweepModel::Random => {
            let spec = ModelSpec::Random {
                n: opts.n,
                perturbation: param,
                seed: opts.seed,
            };
            Ok(cmd_model(&spec, &analysis)?.0)
        }
        SweepModel::Robin => {
            let model = RobinModel::new(param, opts.truncation)?.with_quad_order(opts.quad_order)?;
            let g = model.gram_matrix()?;
            let r = crate::elsolve::analyze_gram(&g, &opts.oracle)?;
            Ok(ReportFile {
                input: String::new(),
                dimension: g.dim(),
                eigenvalues: Vec::new(),
                verdict: r.verdict,
                marginal: r.marginal,
                hs_distance: r.minimizer.hs_distance,
                minimizer: r.minimizer.alpha.clone(),
                sufficiency: Sufficiency {
                    sum: r.sufficiency_sum,
                    holds: r.sufficiency_holds,
                },
                residuals: Residuals {
                    biortho: 0.0,
                    eigen: 0.0,
                    el: r.el_residual,
                    intertwining: None,
                },
                oracle: r.oracle,
                metric: None,
                alpha_el: r.alpha_el,
            })
        }
    }
}

/// Evaluates every grid point independently (in parallel) and returns the
/// rows in grid order. Failures at a point are recorded in its row.
pub fn cmd_sweep(model: SweepModel, params: &[f64], opts: &SweepOptions) -> Vec<SweepRow> {
    params
        .par_iter()
        .map(|&p| {
            let param = round_param(p);
            match sweep_point(model, param, opts) {
                Ok(r) => SweepRow {
                    param,
                    verdict: Some(r.verdict),
                    min_alpha_el: Some(min_of(&r.alpha_el)),
                    hs_distance: Some(r.hs_distance),
                    sufficiency_sum: Some(r.sufficiency.sum),
                    sufficiency_holds: Some(r.sufficiency.holds),
                    oracle_agrees: Some(r.oracle.agrees),
                    status: "ok".into(),
                },
                Err(e) => SweepRow {
                    param,
                    verdict: None,
                    min_alpha_el: None,
                    hs_distance: None,
                    sufficiency_sum: None,
                    sufficiency_holds: None,
                    oracle_agrees: None,
                    status: format!("error: {e}"),
                },
            }
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv is utf-8")
}

/// Adjacent grid points whose verdicts differ.
pub fn verdict_flips(rows: &[SweepRow]) -> Vec<(f64, f64)> {
    rows.windows(2)
        .filter(|w| w[0].verdict.is_some() && w[1].verdict.is_some() && w[0].verdict != w[1].verdict)
        .map(|w| (w[0].param, w[1].param))
        .collect()
}

// ---------------------------------------------------------------- argument parsing

#[derive(Debug, Parser)]
#[command(name = "anisometric", version, about = "Minimally anisotropic metric operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze a matrix read from a JSON matrix file
    Solve(SolveArgs),
    /// Analyze a built-in finite model
    Model(ModelArgs),
    /// Truncated analysis of the PT-symmetric Robin Laplacian
    Robin(RobinArgs),
    /// Cross-check the EL solution of a matrix file against the oracle
    Verify(VerifyArgs),
    /// Verdict table over a parameter grid
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelName {
    TwoByTwo,
    FourByFour,
    Random,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// KKT tolerance of the projected-gradient oracle
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

impl OracleArgs {
    fn options(&self) -> CliResult<OracleOptions> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::Model(Error::InvalidParameter(format!("--tol {}", self.tol))));
        }
        Ok(OracleOptions {
            tol: self.tol,
            ..Default::default()
        })
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub path: PathBuf,
    #[command(flatten)]
    pub oracle: OracleArgs,
    /// Include the dense metric in the report
    #[arg(long)]
    pub emit_metric: bool,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(value_enum)]
    pub name: ModelName,
    /// four-by-four: mixing parameter in (0, 1)
    #[arg(long, default_value_t = 0.6)]
    pub x: f64,
    /// two-by-two: angle between the eigenvectors of H* (default pi/4)
    #[arg(long)]
    pub angle: Option<f64>,
    /// two-by-two: relative phase of the second eigenvector
    #[arg(long, default_value_t = 0.0)]
    pub phase: f64,
    /// random: dimension
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// random: similarity perturbation in [0, 1)
    #[arg(long, default_value_t = 0.2)]
    pub perturbation: f64,
    /// random: RNG seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub oracle: OracleArgs,
    #[arg(long)]
    pub emit_metric: bool,
    /// Also write the generated matrix as a matrix file
    #[arg(long)]
    pub save_matrix: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RobinArgs {
    #[arg(long)]
    pub beta: f64,
    /// Highest mode index N (modes 0..=N)
    #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
    pub truncation: usize,
    /// Gauss-Legendre points per panel
    #[arg(long, default_value_t = DEFAULT_QUAD_ORDER)]
    pub quad_order: usize,
    /// Add the charge-operator metric comparison
    #[arg(long)]
    pub csym: bool,
    /// json: report; csv: convergence table
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Also write the convergence table to this CSV file
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[command(flatten)]
    pub oracle: OracleArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub path: PathBuf,
    #[command(flatten)]
    pub oracle: OracleArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(value_enum)]
    pub model: SweepModel,
    #[arg(long, default_value_t = 0.1)]
    pub from: f64,
    #[arg(long, default_value_t = 0.9)]
    pub to: f64,
    #[arg(long, default_value_t = 0.1)]
    pub step: f64,
    /// Explicit comma-separated grid; overrides --from/--to/--step
    #[arg(long, value_delimiter = ',')]
    pub values: Option<Vec<f64>>,
    /// random: dimension
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// random: RNG seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// robin: highest mode index
    #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
    pub truncation: usize,
    #[arg(long, default_value_t = DEFAULT_QUAD_ORDER)]
    pub quad_order: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub oracle: OracleArgs,
}

/// Captured result of one CLI invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(code: i32, stdout: String) -> Self {
        Self {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn err(e: CliError) -> Self {
        Self {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        }
    }
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli.command).unwrap_or_else(Outcome::err),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome::ok(0, text)
            }
        }
    }
}

fn execute(command: Command) -> CliResult<Outcome> {
    match command {
        Command::Solve(a) => {
            let opts = AnalysisOptions {
                oracle: a.oracle.options()?,
                emit_metric: a.emit_metric,
            };
            let r = cmd_solve(&a.path, &opts)?;
            Ok(Outcome::ok(r.exit_code(), r.to_json()))
        }
        Command::Model(a) => {
            let spec = match a.name {
                ModelName::TwoByTwo => ModelSpec::TwoByTwo {
                    angle: a.angle,
                    phase: a.phase,
                },
                ModelName::FourByFour => ModelSpec::FourByFour { x: a.x },
                ModelName::Random => ModelSpec::Random {
                    n: a.n,
                    perturbation: a.perturbation,
                    seed: a.seed,
                },
            };
            let opts = AnalysisOptions {
                oracle: a.oracle.options()?,
                emit_metric: a.emit_metric,
            };
            let (r, h) = cmd_model(&spec, &opts)?;
            if let Some(path) = &a.save_matrix {
                write_file(path, &MatrixFile::from_matrix(&h).to_json())?;
            }
            Ok(Outcome::ok(r.exit_code(), r.to_json()))
        }
        Command::Robin(a) => {
            let opts = RobinOptions {
                beta: a.beta,
                truncation: a.truncation,
                quad_order: a.quad_order,
                csym: a.csym,
                oracle: a.oracle.options()?,
            };
            let r = cmd_robin(&opts)?;
            let table = convergence_csv(&r.convergence);
            if let Some(path) = &a.table {
                write_file(path, &table)?;
            }
            let out = match a.format {
                Format::Json => to_json(&r),
                Format::Csv => table,
            };
            Ok(Outcome::ok(r.report.exit_code(), out))
        }
        Command::Verify(a) => {
            let r = cmd_verify(&a.path, &a.oracle.options()?)?;
            Ok(Outcome::ok(r.exit_code(), to_json(&r)))
        }
        Command::Sweep(a) => {
            let params = match &a.values {
                Some(v) if !v.is_empty() => v.clone(),
                Some(_) => return Err(CliError::Parse("--values is empty".into())),
                None => grid(a.from, a.to, a.step)?,
            };
            let opts = SweepOptions {
                n: a.n,
                seed: a.seed,
                truncation: a.truncation,
                quad_order: a.quad_order,
                oracle: a.oracle.options()?,
            };
            let rows = cmd_sweep(a.model, &params, &opts);
            let out = match a.format {
                Format::Csv => sweep_csv(&rows),
                Format::Json => to_json(&rows),
            };
            Ok(Outcome::ok(0, out))
        }
    }
}

/// Human-readable one-line summary of a report.
pub fn summary_line(r: &ReportFile) -> String {
    format!(
        "{}: {:?}, min alpha_el = {:.6}, hs distance = {:.6}",
        r.input,
        r.verdict,
        min_of(&r.alpha_el),
        r.hs_distance
    )
}
