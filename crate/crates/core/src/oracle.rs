//! Independent numerical checks of the frequency-domain channel.
//!
//! Everything here starts from the linear Langevin equations for the modes
//! `(a₁, b₁, a₂, b₂)` and never calls the transfer-coefficient formulas.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::{self, GaussianState, TwoModeVerdict};
use crate::linalg::{self, ComplexMatrix, RealMatrix};
use crate::model::SymmetricParams;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Equations of motion `ȧ = M a + L a_in` with one input per mode.
struct Langevin {
    drift: ComplexMatrix,
    /// Input coupling `√rate` of each mode to its own bath.
    input: [f64; 4],
    /// Bath occupations.
    occupation: [f64; 4],
}

fn langevin(p: &SymmetricParams) -> Langevin {
    let mut m = ComplexMatrix::zeros(4, 4);
    let damp = [p.kappa, p.gamma, p.kappa, p.gamma];
    for (k, d) in damp.iter().enumerate() {
        m[(k, k)] = Complex64::new(-d / 2.0, 0.0);
    }
    // Cavity-mechanics coupling within each system.
    for (a, b) in [(0, 1), (2, 3)] {
        m[(a, b)] = -I * p.g;
        m[(b, a)] = -I * p.g;
    }
    // Gravitational mechanics-mechanics coupling.
    m[(1, 3)] = -I * p.lambda;
    m[(3, 1)] = -I * p.lambda;
    Langevin {
        drift: m,
        input: damp.map(f64::sqrt),
        occupation: [0.0, p.n_thermal, 0.0, p.n_thermal],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Elimination {
    /// Eliminate the cavities when the stiffness exceeds [`STIFFNESS_LIMIT`].
    Auto,
    Never,
    Always,
}

/// Cavity-to-effective-linewidth ratio above which the cavities are eliminated.
pub const STIFFNESS_LIMIT: f64 = 1e6;

#[derive(Debug, Clone, Copy)]
pub struct IntegrationOptions {
    /// Drive amplitude on the first cavity input.
    pub drive: f64,
    /// Relative change of the envelope over one slow time constant at which
    /// the integration counts as settled.
    pub tolerance: f64,
    pub max_steps: usize,
    pub elimination: Elimination,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self { drive: 1.0, tolerance: 1e-13, max_steps: 50_000_000, elimination: Elimination::Auto }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldResult {
    /// Output amplitude on the second cavity divided by the drive.
    pub ratio: Complex64,
    pub eliminated: bool,
    /// Relative size of the neglected cavity dynamics, `slow rate / (κ/2)`.
    /// It bounds the error of the transient only; the settled envelope of the
    /// reduced equations is the same as that of the full ones.
    pub elimination_error_budget: f64,
    pub steps: usize,
    pub time: f64,
    /// Relative change of the envelope vector over the last slow time constant.
    pub settling_change: f64,
}

/// Drives the first cavity with `ε e^{−iωt}` and integrates the mean-field
/// envelope with fixed-step RK4 until it stops changing.
pub fn mean_field_transmission(params: &SymmetricParams, omega: f64, opts: &IntegrationOptions) -> Result<MeanFieldResult> {
    params.validate()?;
    crate::error::check_positive("drive", opts.drive)?;
    crate::error::check_finite("omega", omega)?;
    let sys = langevin(params);
    linalg::check_hurwitz(&sys.drift)?;

    let gamma_eff = 4.0 * params.g * params.g / params.kappa + params.gamma;
    let stiffness = params.kappa / gamma_eff;
    let eliminate = match opts.elimination {
        Elimination::Auto => stiffness > STIFFNESS_LIMIT,
        Elimination::Never => false,
        Elimination::Always => true,
    };

    // Envelope u with s = u e^{−iωt}: u̇ = (M + iω) u + f.
    let shift = ComplexMatrix::identity(4).scale(I * omega);
    let full = sys.drift.add(&shift)?;
    let mut forcing = vec![Complex64::new(0.0, 0.0); 4];
    forcing[0] = Complex64::new(sys.input[0] * opts.drive, 0.0);

    type Readout = Box<dyn Fn(&[Complex64]) -> Complex64>;
    let (env, f, read): (ComplexMatrix, Vec<Complex64>, Readout) = if eliminate {
        // Cavity envelopes follow the mechanics: a_j = (−i g b_j + f_j)/(κ/2 − iω).
        let den = Complex64::new(params.kappa / 2.0, -omega);
        let mut red = ComplexMatrix::zeros(2, 2);
        for (r, mech) in [1usize, 3].iter().enumerate() {
            for (c, other) in [1usize, 3].iter().enumerate() {
                red[(r, c)] = full[(*mech, *other)];
            }
            let cav = mech - 1;
            red[(r, r)] += full[(*mech, cav)] * full[(cav, *mech)] / den;
        }
        let f = vec![full[(1, 0)] * forcing[0] / den, Complex64::new(0.0, 0.0)];
        let sqrt_k = sys.input[2];
        let g_to_cav = full[(2, 3)];
        (red, f, Box::new(move |u: &[Complex64]| sqrt_k * g_to_cav * u[1] / den))
    } else {
        let sqrt_k = sys.input[2];
        (full, forcing, Box::new(move |u: &[Complex64]| sqrt_k * u[2]))
    };

    let eig = linalg::eigenvalues(&env)?;
    let radius = eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let slow = eig.iter().map(|z| -z.re).fold(f64::INFINITY, f64::min);
    if !(slow > 0.0) {
        return Err(Error::NotHurwitz { eigenvalue: eig[0] });
    }
    let h = 0.5 / radius;
    let per_chunk = ((1.0 / (slow * h)).ceil() as usize).max(1);
    let min_steps = ((10.0 / (slow * h)).ceil() as usize).max(1);

    let n = env.rows();
    let rhs = |u: &[Complex64]| -> Vec<Complex64> {
        (0..n).map(|r| (0..n).map(|c| env[(r, c)] * u[c]).sum::<Complex64>() + f[r]).collect()
    };
    let axpy = |u: &[Complex64], k: &[Complex64], s: f64| -> Vec<Complex64> {
        u.iter().zip(k).map(|(a, b)| a + b * s).collect()
    };

    let mut u = vec![Complex64::new(0.0, 0.0); n];
    let mut steps = 0;
    let mut change = f64::INFINITY;
    while steps < opts.max_steps {
        let before = u.clone();
        for _ in 0..per_chunk {
            let k1 = rhs(&u);
            let k2 = rhs(&axpy(&u, &k1, h / 2.0));
            let k3 = rhs(&axpy(&u, &k2, h / 2.0));
            let k4 = rhs(&axpy(&u, &k3, h));
            for i in 0..n {
                u[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0);
            }
        }
        steps += per_chunk;
        let norm = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let diff = u.iter().zip(&before).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        change = if norm > 0.0 { diff / norm } else { 0.0 };
        if steps >= min_steps && change < opts.tolerance {
            break;
        }
    }
    if change >= opts.tolerance {
        return Err(Error::NotSettled(format!(
            "envelope still changing by {change:e} per slow time constant after {steps} steps"
        )));
    }
    Ok(MeanFieldResult {
        ratio: read(&u) / opts.drive,
        eliminated: eliminate,
        elimination_error_budget: if eliminate { 2.0 * slow / params.kappa } else { 0.0 },
        steps,
        time: steps as f64 * h,
        settling_change: change,
    })
}

/// Drift, diffusion and output read-out of the quadrature form, ordered
/// `(q₁, p₁, …, q₄, p₄)` for modes `(a₁, b₁, a₂, b₂)`.
#[derive(Debug, Clone)]
pub struct QuadratureModel {
    pub drift: RealMatrix,
    pub diffusion: RealMatrix,
    /// Rows giving the output quadratures `√κ (q₃, p₃)` of the second cavity.
    pub output: RealMatrix,
}

pub fn quadrature_model(params: &SymmetricParams) -> QuadratureModel {
    let sys = langevin(params);
    let drift = RealMatrix::from_fn(8, 8, |r, c| {
        let z = sys.drift[(r / 2, c / 2)];
        match (r % 2, c % 2) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => -z.im,
            _ => z.im,
        }
    });
    let diffusion = RealMatrix::from_fn(8, 8, |r, c| {
        if r == c {
            let k = r / 2;
            sys.input[k].powi(2) * (sys.occupation[k] + 0.5)
        } else {
            0.0
        }
    });
    let output = RealMatrix::from_fn(2, 8, |r, c| if c == 4 + r { sys.input[2] } else { 0.0 });
    QuadratureModel { drift, diffusion, output }
}

/// Stationary covariance from `A Σ + Σ Aᵀ + D = 0`.
pub fn steady_state_covariance(params: &SymmetricParams) -> Result<RealMatrix> {
    params.validate()?;
    let model = quadrature_model(params);
    linalg::lyapunov_solve(&model.drift, &model.diffusion)
}

/// The stationary state as a four-mode Gaussian state, validated physical.
pub fn steady_state(params: &SymmetricParams) -> Result<GaussianState> {
    GaussianState::new(vec![0.0; 8], steady_state_covariance(params)?)
}

/// Partial-transpose test on the two mechanical modes of the stationary state.
pub fn mechanical_entanglement(params: &SymmetricParams) -> Result<TwoModeVerdict> {
    gaussian::two_mode_verdict(&steady_state(params)?, 1, 3)
}

/// Thermal photons added at the second cavity output, `(1 − η) N`, from the
/// response matrix `−(M + iω)⁻¹` and the bath occupations.
pub fn output_spectrum(params: &SymmetricParams, omega: f64) -> Result<f64> {
    params.validate()?;
    let sys = langevin(params);
    let m = sys.drift.add(&ComplexMatrix::identity(4).scale(I * omega))?;
    let lu = linalg::Lu::new(&m)?;
    let mut total = 0.0;
    for k in 0..4 {
        if sys.occupation[k] == 0.0 {
            continue;
        }
        let mut e = vec![Complex64::new(0.0, 0.0); 4];
        e[k] = Complex64::new(-sys.input[k], 0.0);
        let col = lu.solve_unchecked(&e)?;
        total += (sys.input[2] * col[2]).norm_sqr() * sys.occupation[k];
    }
    Ok(total)
}
