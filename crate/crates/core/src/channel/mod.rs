//! The gravity-induced optical channel from the input of cavity 1 to the
//! output of cavity 2.
//!
//! Symmetric-case frequencies are in the interaction picture: `ω = 0` is the
//! cavity resonance. The asymmetric model in [`asymmetric`] uses the laser
//! frame; [`to_laser_frame`] and [`to_interaction_frame`] convert between them.

pub mod asymmetric;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::model::SymmetricParams;

pub use asymmetric::{
    asymmetric_channel_at, asymmetric_coefficients, asymmetric_drift_matrix, asymmetric_optimum, asymmetric_ratio,
    asymmetric_transfer_numeric, equal_temperature_tuned_eta, ratio_optimal_first_system, TunedSystems,
};

/// Below this, `1 − η` is treated as zero and the channel as noiseless.
pub const NOISELESS_THRESHOLD: f64 = 1e-15;

/// Input amplitudes of `a_out,2`: `a_out,2 = α₁ a_in,1 + β₁ b_in,1 + α₂ a_in,2 + β₂ b_in,2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferCoefficients {
    pub alpha_1: Complex64,
    pub beta_1: Complex64,
    pub alpha_2: Complex64,
    pub beta_2: Complex64,
    pub omega: f64,
}

impl TransferCoefficients {
    pub fn as_array(&self) -> [Complex64; 4] {
        [self.alpha_1, self.beta_1, self.alpha_2, self.beta_2]
    }

    /// `Σ|αᵢ|² + |βᵢ|²`; equals 1 when commutators are preserved.
    pub fn unitarity_sum(&self) -> f64 {
        self.as_array().iter().map(|c| c.norm_sqr()).sum()
    }

    /// `1 − |α₁|²` evaluated as the sum of the other three weights, which
    /// keeps full relative precision when the transmissivity is close to one.
    pub fn loss(&self) -> f64 {
        self.alpha_2.norm_sqr() + self.beta_1.norm_sqr() + self.beta_2.norm_sqr()
    }

    /// Largest component difference to `other`. The coefficient vector has
    /// unit norm, so this doubles as a relative error.
    pub fn max_difference(&self, other: &Self) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Phase-insensitive thermal attenuator `(η, N, φ)` at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttenuatorChannel {
    pub eta: f64,
    pub n_eff: f64,
    pub phi: f64,
    pub omega: f64,
    /// Added noise `(1 − η) N` in photons.
    pub output_noise: f64,
    /// Set when `1 − η` is below [`NOISELESS_THRESHOLD`]; `n_eff` is then 0.
    pub noiseless_limit: bool,
}

impl AttenuatorChannel {
    pub fn new(eta: f64, n_eff: f64, phi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidParameter { name: "eta", reason: format!("{eta} is outside [0, 1]") });
        }
        crate::error::check_non_negative("N", n_eff)?;
        crate::error::check_finite("phi", phi)?;
        let loss = 1.0 - eta;
        let noiseless_limit = loss < NOISELESS_THRESHOLD;
        Ok(Self {
            eta,
            n_eff: if noiseless_limit { 0.0 } else { n_eff },
            phi,
            omega: 0.0,
            output_noise: loss * n_eff,
            noiseless_limit,
        })
    }

    pub fn identity() -> Self {
        Self { eta: 1.0, n_eff: 0.0, phi: 0.0, omega: 0.0, output_noise: 0.0, noiseless_limit: true }
    }

    pub fn at_frequency(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    /// `η / ((1 − η) N)`; infinite for a noiseless channel with `η > 0`.
    pub fn ratio(&self) -> f64 {
        if self.eta == 0.0 {
            0.0
        } else if self.output_noise == 0.0 {
            f64::INFINITY
        } else {
            self.eta / self.output_noise
        }
    }

    /// Builds the channel seen by `a_in,1` given the coefficients and the
    /// thermal occupations feeding `b_in,1` and `b_in,2`.
    pub fn from_coefficients(tc: &TransferCoefficients, n_thermal: [f64; 2]) -> Self {
        let eta = tc.alpha_1.norm_sqr().min(1.0);
        let loss = tc.loss();
        let output_noise = tc.beta_1.norm_sqr() * n_thermal[0] + tc.beta_2.norm_sqr() * n_thermal[1];
        let noiseless_limit = loss < NOISELESS_THRESHOLD;
        let n_eff = if noiseless_limit { 0.0 } else { output_noise / loss };
        let phi = if tc.alpha_1 == Complex64::new(0.0, 0.0) { 0.0 } else { tc.alpha_1.arg() };
        Self { eta, n_eff, phi, omega: tc.omega, output_noise, noiseless_limit }
    }
}

/// Channel parameters at the optimal operating point `ω = 0`, `g = g_opt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalPoint {
    pub g_opt: f64,
    pub eta_opt: f64,
    /// `1 − η_opt`, kept separately because it underflows `1 − eta_opt`.
    pub loss_opt: f64,
    pub n_opt: f64,
    pub ratio_opt: f64,
    pub omega_opt: f64,
}

pub fn to_laser_frame(omega_interaction: f64, omega_b: f64) -> f64 {
    omega_interaction + omega_b
}

pub fn to_interaction_frame(omega_laser: f64, omega_b: f64) -> f64 {
    omega_laser - omega_b
}

/// Drift `A` and input matrix `B` of `ṙ = A r + B r_in`, modes `(a₁, b₁, a₂, b₂)`.
pub fn drift_matrix(params: &SymmetricParams) -> (ComplexMatrix, [f64; 4]) {
    let p = params;
    let z = Complex64::new(0.0, 0.0);
    let ig = Complex64::new(0.0, -p.g);
    let il = Complex64::new(0.0, -p.lambda);
    let k = Complex64::new(-p.kappa / 2.0, 0.0);
    let m = Complex64::new(-p.gamma / 2.0, 0.0);
    #[rustfmt::skip]
    let data = vec![
        k,  ig, z,  z,
        ig, m,  z,  il,
        z,  z,  k,  ig,
        z,  il, ig, m,
    ];
    let a = ComplexMatrix::from_rows(4, 4, data).expect("4x4 of finite entries");
    (a, [p.kappa.sqrt(), p.gamma.sqrt(), p.kappa.sqrt(), p.gamma.sqrt()])
}

/// Reads `a_out,2` off the generic solve `r = −(A + iω)⁻¹ B r_in`.
pub(crate) fn coefficients_from_drift(
    drift: &ComplexMatrix,
    input: [f64; 4],
    omega: f64,
) -> Result<[Complex64; 4]> {
    // Row 3 of −(A + iω)⁻¹ is the solution of −(A + iω)ᵀ y = e₃.
    let m = ComplexMatrix::from_fn(4, 4, |r, c| {
        let diag = if r == c { Complex64::new(0.0, omega) } else { Complex64::new(0.0, 0.0) };
        -(drift[(c, r)] + diag)
    });
    let mut e3 = [Complex64::new(0.0, 0.0); 4];
    e3[2] = Complex64::new(1.0, 0.0);
    let y = linalg::solve(&m, &e3).map_err(|e| match e {
        Error::Singular { .. } => Error::DegenerateDenominator { omega },
        other => other,
    })?;
    let sk2 = input[2];
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for k in 0..4 {
        out[k] = sk2 * y[k] * input[k];
    }
    out[2] -= 1.0;
    Ok(out)
}

/// Transfer coefficients from the closed-form cofactor expressions.
pub fn transfer_coefficients_analytic(params: &SymmetricParams, omega: f64) -> Result<TransferCoefficients> {
    params.validate()?;
    crate::error::check_finite("omega", omega)?;
    // Work in units of κ; the coefficients are dimensionless.
    let p = params.rescaled(params.kappa);
    let w = omega / params.kappa;
    let i = Complex64::i();
    let (k, gm, g, l) = (p.kappa, p.gamma, p.g, p.lambda);
    let a = Complex64::new(k / 2.0, -w);
    let b = Complex64::new(gm / 2.0, -w);
    let ab_g2 = a * b + g * g;
    let det = ab_g2 * ab_g2 + l * l * a * a;
    if det.norm() == 0.0 || !det.is_finite() {
        return Err(Error::DegenerateDenominator { omega });
    }
    let sk = k.sqrt();
    let sg = gm.sqrt();
    let t_alpha_1 = sk * i * g * g * l / det;
    let t_beta_1 = sg * g * l * (i * w - k / 2.0) / det;
    let t_alpha_2 = sk * (a * (b * b + l * l) + g * g * b) / det;
    let t_beta_2 = sg * (-i) * g * ab_g2 / det;
    Ok(TransferCoefficients {
        alpha_1: sk * t_alpha_1,
        beta_1: sk * t_beta_1,
        alpha_2: sk * t_alpha_2 - 1.0,
        beta_2: sk * t_beta_2,
        omega,
    })
}

/// Transfer coefficients from a generic LU solve of the drift matrix.
pub fn transfer_coefficients_numeric(params: &SymmetricParams, omega: f64) -> Result<TransferCoefficients> {
    params.validate()?;
    crate::error::check_finite("omega", omega)?;
    let scale = params.kappa;
    let (drift, input) = drift_matrix(&params.rescaled(scale));
    let c = coefficients_from_drift(&drift, input, omega / scale)?;
    Ok(TransferCoefficients { alpha_1: c[0], beta_1: c[1], alpha_2: c[2], beta_2: c[3], omega })
}

/// `(η, N, φ)` at frequency `omega` from the closed-form coefficients.
pub fn channel_at(params: &SymmetricParams, omega: f64) -> Result<AttenuatorChannel> {
    let tc = transfer_coefficients_analytic(params, omega)?;
    Ok(AttenuatorChannel::from_coefficients(&tc, [params.n_thermal; 2]))
}

/// Same as [`channel_at`] but built on [`transfer_coefficients_numeric`].
pub fn channel_numeric_at(params: &SymmetricParams, omega: f64) -> Result<AttenuatorChannel> {
    let tc = transfer_coefficients_numeric(params, omega)?;
    Ok(AttenuatorChannel::from_coefficients(&tc, [params.n_thermal; 2]))
}

/// `η/((1 − η)N)` in the simplified form that never divides by `1 − η`.
pub fn ratio_at(params: &SymmetricParams, omega: f64) -> f64 {
    let p = params.rescaled(params.kappa);
    let w = omega / params.kappa;
    let (k, gm, g, l) = (p.kappa, p.gamma, p.g, p.lambda);
    let num = g * g * k * l * l;
    if num == 0.0 {
        return 0.0;
    }
    let w2 = w * w;
    let detuned = g * g + k * gm / 4.0 - w2;
    let damped = w * (k + gm) / 2.0;
    let den = gm * (l * l * (k * k / 4.0 + w2) + detuned * detuned + damped * damped);
    if p.n_thermal == 0.0 {
        return f64::INFINITY;
    }
    num / (p.n_thermal * den)
}

pub fn optimal_point(params: &SymmetricParams) -> OptimalPoint {
    let p = params;
    let s2 = (p.lambda / p.gamma).powi(2);
    let root = (1.0 + 4.0 * s2).sqrt();
    let eta_opt = 2.0 * s2 / (1.0 + root + 2.0 * s2);
    let loss_opt = (1.0 + root) / (1.0 + root + 2.0 * s2);
    let ratio_opt = if s2 == 0.0 {
        0.0
    } else if p.n_thermal == 0.0 {
        f64::INFINITY
    } else {
        2.0 * s2 / (p.n_thermal * (1.0 + root))
    };
    OptimalPoint { g_opt: p.g_opt(), eta_opt, loss_opt, n_opt: p.n_thermal, ratio_opt, omega_opt: 0.0 }
}

/// `α₂` at `ω = 0` with `g` replaced by `g_opt`.
pub fn reflection_at_optimum(params: &SymmetricParams) -> Result<Complex64> {
    Ok(transfer_coefficients_analytic(&params.at_optimal_coupling(), 0.0)?.alpha_2)
}

/// Side stationary point `ω′` of `ratio_at` at the given `g`, if real.
pub fn suboptimal_critical_frequency(params: &SymmetricParams) -> Option<f64> {
    let p = params;
    let arg = p.g * p.g - p.kappa * p.kappa / 8.0 - p.gamma * p.gamma / 8.0 - p.lambda * p.lambda / 2.0;
    (arg >= 0.0).then(|| arg.sqrt())
}

/// Effective mechanical linewidth `γ + √(γ² + 4λ²)` at the optimal coupling.
pub fn transparency_linewidth(params: &SymmetricParams) -> f64 {
    let p = params;
    p.gamma + (p.gamma * p.gamma + 4.0 * p.lambda * p.lambda).sqrt()
}
