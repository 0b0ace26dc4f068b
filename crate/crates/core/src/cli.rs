//! Command-line front end.
//!
//! Exit codes: 0 success, 2 configuration error, 3 physically invalid or
//! unstable parameters, 4 failed check (or an inconclusive protocol under
//! `--strict`).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, ValueEnum};
use num_complex::Complex64;

use crate::channel::{
    asymmetric_channel_at, asymmetric_drift_matrix, asymmetric_transfer_numeric, TransferCoefficients,
    drift_matrix, transfer_coefficients_analytic, transfer_coefficients_numeric, transparency_linewidth,
};
use crate::config::{Config, ModelParams};
use crate::criteria::{Classification, GridSpec, DEFAULT_OMEGA_A};
use crate::error::Error;
use crate::linalg;
use crate::model::{rwa_valid_with, AsymmetricParams, SymmetricParams, DEFAULT_RWA_MARGIN};
use crate::oracle::{self, IntegrationOptions};
use crate::parallel::default_workers;
use crate::protocols::{self, FidelityEstimator, ProtocolKind, ProtocolOptions, Verdict};
use crate::sweep::{self, FigureId, DEFAULT_SPECTRUM_POINTS, DEFAULT_SPECTRUM_SPAN};
use crate::table::format_float;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_PHYSICS: i32 = 3;
pub const EXIT_CHECK: i32 = 4;

const MANIFEST: &str = "manifest.conf";
/// Relative frequency mismatch above which two-system runs print a warning.
const MISMATCH_WARNING: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Transmissivity, output noise and ratio against probe frequency.
    Spectrum,
    /// Quantum/classical map over mechanical frequency and quality factor.
    Map,
    /// Simulated verification protocol on the predicted channel.
    Protocol,
    /// Cross-check the closed forms against the independent solvers.
    Check,
}

impl Command {
    fn as_str(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Map => "map",
            Command::Protocol => "protocol",
            Command::Check => "check",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "git-channel", version, about = "Gravity-induced optical channel between two optomechanical systems")]
pub struct Args {
    pub command: Command,
    /// Parameter file of `key = value` lines.
    #[arg(long)]
    pub config: PathBuf,
    /// Replace a configuration value, as `key=value`.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// fig2, s2, s3, s4 or s5.
    #[arg(long, default_value = "fig2")]
    pub figure: String,
    /// probe, benchmark or entanglement.
    #[arg(long, default_value = "entanglement")]
    pub protocol: String,
    /// Treat an inconclusive protocol verdict as a failure.
    #[arg(long)]
    pub strict: bool,
}

/// Transfer coefficients at interaction-frame `omega`. `check` compares an
/// implementation of this against the generic solver.
pub type CoefficientFn = fn(&SymmetricParams, f64) -> crate::Result<TransferCoefficients>;

/// Failure that maps to an exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_) | Error::InvalidParameter { .. } | Error::Dimension(_) => EXIT_CONFIG,
            _ => EXIT_PHYSICS,
        };
        Failure { code, message: e.to_string() }
    }
}

fn fail(code: i32, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

type Outcome = std::result::Result<(), Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, transfer_coefficients_analytic, out, err)
}

/// [`run`] with a substitute coefficient function for `check`.
pub fn run_with<I, T>(args: I, coefficients: CoefficientFn, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = e.exit_code();
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match execute(&args, coefficients, out, err) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(args: &Args, coefficients: CoefficientFn, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let mut cfg = Config::from_file(&args.config)?;
    for o in &args.overrides {
        cfg.apply_override(o)?;
    }
    let workers = args.workers.unwrap_or_else(default_workers).max(1);
    std::fs::create_dir_all(&args.out)
        .map_err(|e| fail(EXIT_CONFIG, format!("cannot create {}: {e}", args.out.display())))?;
    let mut header = vec![("command", args.command.as_str().to_string())];
    match args.command {
        Command::Spectrum => cmd_spectrum(&cfg, args, workers, out, err)?,
        Command::Map => {
            let figure = FigureId::parse(&args.figure)?;
            header.push(("figure", figure.as_str().to_string()));
            cmd_map(&cfg, figure, args, workers, out)?
        }
        Command::Protocol => {
            let kind = ProtocolKind::parse(&args.protocol)?;
            header.push(("protocol", args.protocol.clone()));
            cmd_protocol(&cfg, kind, args, workers, out, err)?
        }
        Command::Check => cmd_check(&cfg, coefficients, out, err)?,
    }
    write_file(&args.out.join(MANIFEST), &cfg.manifest(&header))
}

fn write_file(path: &Path, contents: &str) -> Outcome {
    std::fs::write(path, contents).map_err(|e| fail(EXIT_CONFIG, format!("cannot write {}: {e}", path.display())))
}

fn rwa_margin(cfg: &Config) -> crate::Result<f64> {
    cfg.f64_or("rwa_margin", DEFAULT_RWA_MARGIN)
}

/// The single-system parameters that the validity bound depends on.
fn per_system(p: &AsymmetricParams) -> crate::Result<Vec<SymmetricParams>> {
    p.systems
        .iter()
        .map(|s| {
            let mut q = SymmetricParams::new(s.omega_b, s.gamma, s.kappa, s.g, p.lambda, s.n_thermal)?;
            q.delta = s.delta;
            Ok(q)
        })
        .collect()
}

/// Rejects parameters outside the rotating-wave regime.
fn require_rwa(cfg: &Config, model: &ModelParams, err: &mut dyn Write) -> Outcome {
    let margin = rwa_margin(cfg)?;
    let systems = match model {
        ModelParams::Symmetric(p) => vec![*p],
        ModelParams::Asymmetric(p) => {
            if p.frequency_mismatch() > MISMATCH_WARNING {
                let _ = writeln!(
                    err,
                    "warning: mechanical frequencies differ by {:.1}%; the two-system model assumes a small mismatch",
                    100.0 * p.frequency_mismatch()
                );
            }
            per_system(p)?
        }
    };
    for (i, p) in systems.iter().enumerate() {
        let r = rwa_valid_with(p, margin);
        if !r.valid {
            return Err(fail(
                EXIT_PHYSICS,
                format!(
                    "rotating-wave approximation not valid for system {}: N_T / bound = {} (needs > {margin}), g << kappa: {}",
                    i + 1,
                    format_float(r.margin),
                    r.weak_coupling
                ),
            ));
        }
    }
    Ok(())
}

fn cmd_spectrum(cfg: &Config, args: &Args, workers: usize, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let model = cfg.model()?;
    require_rwa(cfg, &model, err)?;
    let linewidth = match model {
        ModelParams::Symmetric(p) => transparency_linewidth(&p),
        ModelParams::Asymmetric(p) => sweep::asymmetric_linewidth(&p),
    };
    let half = DEFAULT_SPECTRUM_SPAN * linewidth;
    let lo = cfg.f64_or("omega_min", -half)?;
    let hi = cfg.f64_or("omega_max", half)?;
    let n = cfg.usize_or("points", DEFAULT_SPECTRUM_POINTS)?;
    let scan = match model {
        ModelParams::Symmetric(p) => sweep::spectrum_scan(&p, (lo, hi), n, workers)?,
        ModelParams::Asymmetric(p) => sweep::asymmetric_spectrum_scan(&p, (lo, hi), n, workers)?,
    };
    write_file(&args.out.join("spectrum.csv"), &scan.to_csv())?;
    let s = scan.summary();
    let _ = writeln!(out, "points       {}", scan.rows.len());
    let _ = writeln!(out, "peak eta     {} at omega = {}", format_float(s.peak_eta), format_float(s.peak_eta_omega));
    let _ = writeln!(out, "peak ratio   {}", format_float(s.peak_ratio));
    let _ = writeln!(out, "linewidth    {} s^-1", format_float(s.linewidth));
    match s.nonclassical_band {
        Some((a, b)) => {
            let _ = writeln!(out, "nonclassical {} .. {} s^-1", format_float(a), format_float(b));
        }
        None => {
            let _ = writeln!(out, "nonclassical none");
        }
    }
    Ok(())
}

fn grid_spec(cfg: &Config) -> crate::Result<GridSpec> {
    let d = GridSpec::default();
    let spec = GridSpec {
        omega_b: (cfg.f64_or("omega_B_min", d.omega_b.0)?, cfg.f64_or("omega_B_max", d.omega_b.1)?),
        q: (cfg.f64_or("Q_min", d.q.0)?, cfg.f64_or("Q_max", d.q.1)?),
        n_omega: cfg.usize_or("n_omega", d.n_omega)?,
        n_q: cfg.usize_or("n_Q", d.n_q)?,
        omega_a: cfg.f64_or("omega_A", DEFAULT_OMEGA_A)?,
    };
    spec.validate()?;
    Ok(spec)
}

fn cmd_map(cfg: &Config, figure: FigureId, args: &Args, workers: usize, out: &mut dyn Write) -> Outcome {
    let device = cfg.device()?;
    let spec = grid_spec(cfg)?;
    let grid = sweep::figure_grid(figure, &device, &spec, workers)?;
    let name = format!("{}.csv", figure.as_str());
    write_file(&args.out.join(&name), &grid.to_csv())?;
    let quantum = grid.points.iter().filter(|p| p.classification == Classification::Quantum).count();
    let _ = writeln!(out, "figure    {} ({})", figure.as_str(), figure.column());
    let _ = writeln!(out, "cells     {} x {} = {}", spec.n_omega, spec.n_q, grid.points.len());
    let _ = writeln!(out, "quantum   {quantum}");
    let _ = writeln!(out, "written   {name}");
    Ok(())
}

fn protocol_options(cfg: &Config, args: &Args, workers: usize) -> crate::Result<ProtocolOptions> {
    let d = ProtocolOptions::default();
    let amplitude = cfg.f64_or("amplitude", d.amplitudes[0].norm())?;
    let phases = cfg.usize_or("probe_phases", d.amplitudes.len())?;
    let amplitudes = (0..phases)
        .map(|k| Complex64::from_polar(amplitude, std::f64::consts::TAU * k as f64 / phases as f64))
        .collect();
    let estimator = match cfg.string_or("estimator", "analytic").as_str() {
        "analytic" => FidelityEstimator::Analytic,
        "sampling" => FidelityEstimator::Sampling,
        other => return Err(Error::Config(format!("key `estimator`: `{other}` is not analytic or sampling"))),
    };
    let seed = match args.seed {
        Some(s) => s,
        None => cfg.u64("seed")?.unwrap_or(d.seed),
    };
    cfg.set_resolved("seed", seed.to_string());
    Ok(ProtocolOptions {
        amplitudes,
        shots: cfg.usize_or("shots", d.shots)?,
        n_in: cfg.f64_or("N_in", d.n_in)?,
        inputs: cfg.usize_or("inputs", d.inputs)?,
        estimator,
        squeezing: cfg.f64_or("squeezing", d.squeezing)?,
        k: cfg.f64_or("k", d.k)?,
        seed,
        workers,
    })
}

fn cmd_protocol(
    cfg: &Config,
    kind: ProtocolKind,
    args: &Args,
    workers: usize,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let model = cfg.model()?;
    require_rwa(cfg, &model, err)?;
    let opts = protocol_options(cfg, args, workers)?;
    let report = match model {
        ModelParams::Symmetric(p) => protocols::end_to_end(&p, kind, &opts)?,
        ModelParams::Asymmetric(p) => {
            let (channel, _) = asymmetric_channel_at(&p, p.systems[0].omega_b)?;
            protocols::run(kind, &channel, &opts)?
        }
    };
    let mut json = report.to_json();
    json.push('\n');
    write_file(&args.out.join("report.json"), &json)?;
    let verdict = serde_json::to_value(report.verdict).map_err(|e| fail(EXIT_CONFIG, e.to_string()))?;
    let verdict = verdict.as_str().unwrap_or("?").to_string();
    for (k, v) in &report.estimates {
        let _ = writeln!(out, "{k:<16}{}", format_float(*v));
    }
    let _ = writeln!(out, "verdict: {verdict}");
    if args.strict && report.verdict == Verdict::Inconclusive {
        return Err(fail(EXIT_CHECK, "inconclusive verdict under --strict"));
    }
    Ok(())
}

/// One row of the `check` table.
#[derive(Debug, Clone)]
pub struct CheckRow {
    pub name: &'static str,
    /// `None` for rows that were not applicable.
    pub passed: Option<bool>,
    pub detail: String,
    pub seconds: f64,
}

fn timed(name: &'static str, f: impl FnOnce() -> crate::Result<(bool, String)>) -> CheckRow {
    let t = Instant::now();
    let (passed, detail) = match f() {
        Ok((p, d)) => (Some(p), d),
        Err(e) => (Some(false), e.to_string()),
    };
    CheckRow { name, passed, detail, seconds: t.elapsed().as_secs_f64() }
}

fn skipped(name: &'static str, why: &str) -> CheckRow {
    CheckRow { name, passed: None, detail: why.to_string(), seconds: 0.0 }
}

fn stability_row(drift: &linalg::ComplexMatrix) -> CheckRow {
    timed("stability", || {
        let eig = linalg::eigenvalues(drift)?;
        let worst = eig.iter().copied().max_by(|a, b| a.re.total_cmp(&b.re)).unwrap_or_default();
        Ok((worst.re < 0.0, format!("largest Re(eigenvalue) = {}", format_float(worst.re))))
    })
}

fn rwa_row(systems: &[SymmetricParams], margin: f64) -> CheckRow {
    timed("rwa_validity", || {
        let mut ok = true;
        let mut parts = Vec::new();
        for p in systems {
            let r = rwa_valid_with(p, margin);
            ok &= r.valid;
            parts.push(format!("margin {} (needs > {margin}), g << kappa {}", format_float(r.margin), r.weak_coupling));
        }
        Ok((ok, parts.join("; ")))
    })
}

/// Probe frequencies spanning a few linewidths either side of resonance.
fn check_frequencies(linewidth: f64) -> Vec<f64> {
    (0..21).map(|i| (i as f64 - 10.0) / 10.0 * 3.0 * linewidth).collect()
}

fn coefficient_rows(
    analytic: impl Fn(f64) -> crate::Result<TransferCoefficients>,
    numeric: impl Fn(f64) -> crate::Result<TransferCoefficients>,
    omegas: &[f64],
    tol: f64,
) -> [CheckRow; 2] {
    let coeff = timed("coefficients", || {
        let mut worst = 0.0f64;
        for &w in omegas {
            worst = worst.max(analytic(w)?.max_difference(&numeric(w)?));
        }
        Ok((worst <= tol, format!("max |closed form - generic solve| = {} (tol {})", format_float(worst), format_float(tol))))
    });
    let unit = timed("unitarity", || {
        let mut worst = 0.0f64;
        for &w in omegas {
            worst = worst.max((analytic(w)?.unitarity_sum() - 1.0).abs());
        }
        Ok((worst <= tol, format!("max |sum of weights - 1| = {} (tol {})", format_float(worst), format_float(tol))))
    });
    [coeff, unit]
}

/// Runs the cross-checks on a configuration and returns the table rows.
pub fn check_rows(cfg: &Config, coefficients: CoefficientFn) -> crate::Result<Vec<CheckRow>> {
    let model = cfg.model()?;
    let margin = rwa_margin(cfg)?;
    let tol = cfg.f64_or("coefficient_tolerance", 1e-10)?;
    let mf_tol = cfg.f64_or("mean_field_tolerance", 1e-6)?;
    let mut rows = Vec::new();
    match model {
        ModelParams::Symmetric(p) => {
            rows.push(stability_row(&drift_matrix(&p).0));
            rows.push(rwa_row(&[p], margin));
            let omegas = check_frequencies(transparency_linewidth(&p));
            rows.extend(coefficient_rows(|w| coefficients(&p, w), |w| transfer_coefficients_numeric(&p, w), &omegas, tol));
            let peak = transfer_coefficients_numeric(&p, 0.0)?.alpha_1.norm();
            rows.push(timed("mean_field", || {
                let mut worst = 0.0f64;
                for &w in omegas.iter().step_by(5) {
                    let mf = oracle::mean_field_transmission(&p, w, &IntegrationOptions::default())?;
                    // Relative to the resonant amplitude so that zeros of the
                    // response do not blow up the comparison.
                    let scale = peak.max(f64::MIN_POSITIVE);
                    worst = worst.max((mf.ratio - coefficients(&p, w)?.alpha_1).norm() / scale);
                }
                Ok((worst <= mf_tol, format!("max relative deviation = {} (tol {})", format_float(worst), format_float(mf_tol))))
            }));
            rows.push(timed("output_noise", || {
                let tc = coefficients(&p, 0.0)?;
                let closed = (tc.beta_1.norm_sqr() + tc.beta_2.norm_sqr()) * p.n_thermal;
                let direct = oracle::output_spectrum(&p, 0.0)?;
                let dev = if direct == 0.0 { (closed - direct).abs() } else { (closed - direct).abs() / direct };
                Ok((dev <= 1e-9, format!("relative deviation = {} (tol 1e-9)", format_float(dev))))
            }));
            rows.push(timed("lyapunov", || {
                let model = oracle::quadrature_model(&p);
                let sigma = linalg::lyapunov_solve(&model.drift, &model.diffusion)?;
                let state = crate::gaussian::GaussianState::new(vec![0.0; 8], sigma.clone())?;
                let nu = state.symplectic_eigenvalues()?;
                let min = nu.iter().copied().fold(f64::INFINITY, f64::min);
                let res = linalg::lyapunov_residual(&model.drift, &sigma, &model.diffusion)?.max_abs();
                let scale = model.diffusion.max_abs().max(f64::MIN_POSITIVE);
                let sep = crate::gaussian::two_mode_verdict(&state, 1, 3)?;
                Ok((
                    min >= 0.5 - 1e-10 && res <= 1e-8 * scale,
                    format!(
                        "min symplectic eigenvalue = {}, residual = {}, mechanical modes {}",
                        format_float(min),
                        format_float(res),
                        if sep.entangled { "entangled" } else { "separable" }
                    ),
                ))
            }));
        }
        ModelParams::Asymmetric(p) => {
            rows.push(stability_row(&asymmetric_drift_matrix(&p).0));
            rows.push(rwa_row(&per_system(&p)?, margin));
            let center = p.systems[0].omega_b;
            let omegas: Vec<f64> = check_frequencies(sweep::asymmetric_linewidth(&p)).iter().map(|w| center + w).collect();
            rows.extend(coefficient_rows(
                |w| crate::channel::asymmetric::asymmetric_coefficients(&p, w),
                |w| asymmetric_transfer_numeric(&p, w),
                &omegas,
                tol,
            ));
            for name in ["mean_field", "output_noise", "lyapunov"] {
                rows.push(skipped(name, "single-system oracle; not run for two distinct systems"));
            }
        }
    }
    Ok(rows)
}

fn cmd_check(cfg: &Config, coefficients: CoefficientFn, out: &mut dyn Write, _err: &mut dyn Write) -> Outcome {
    let rows = check_rows(cfg, coefficients)?;
    let _ = writeln!(out, "{:<14}{:<7}{:>10}  detail", "check", "result", "seconds");
    let mut failed = Vec::new();
    for r in &rows {
        let result = match r.passed {
            Some(true) => "pass",
            Some(false) => {
                failed.push(r.name);
                "FAIL"
            }
            None => "skip",
        };
        let _ = writeln!(out, "{:<14}{:<7}{:>10.3}  {}", r.name, result, r.seconds, r.detail);
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(fail(EXIT_CHECK, format!("failed checks: {}", failed.join(", "))))
    }
}
