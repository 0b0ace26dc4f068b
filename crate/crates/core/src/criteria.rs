//! Non-classicality decisions and feasibility quantities over `(ω_B, Q)`.

use crate::channel::{transparency_linewidth, AttenuatorChannel};
use crate::error::{check_non_negative, check_positive, Error, Result};
use crate::model::{DeviceGeometry, SymmetricParams, CONSTANTS};
use crate::parallel::map_indexed;
use crate::table::format_float;

/// Optical carrier frequency used for the probe-power bound unless overridden.
pub const DEFAULT_OMEGA_A: f64 = 1e15;

/// Header of every `(ω_B, Q)` grid file.
pub const GRID_HEADER: &str = "omega_B,Q,ratio,classification,eta_opt,tau_min_s,P_min_W";

fn check_channel(eta: f64, n_eff: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidParameter { name: "eta", reason: format!("{eta} is outside [0, 1]") });
    }
    check_non_negative("N", n_eff)
}

/// `η / ((1 − η) N)` with the conventions `0` for `η = 0` and `∞` for a noiseless channel.
pub fn attenuator_ratio(eta: f64, n_eff: f64) -> f64 {
    let noise = (1.0 - eta) * n_eff;
    if eta == 0.0 {
        0.0
    } else if noise == 0.0 {
        f64::INFINITY
    } else {
        eta / noise
    }
}

/// True when `η < (1 − η) N`. The boundary itself is not entanglement-breaking.
pub fn is_entanglement_breaking(eta: f64, n_eff: f64) -> Result<bool> {
    check_channel(eta, n_eff)?;
    Ok(eta < (1.0 - eta) * n_eff)
}

/// Same decision from a channel, comparing against its stored output noise.
pub fn channel_is_entanglement_breaking(channel: &AttenuatorChannel) -> bool {
    channel.eta < channel.output_noise
}

/// Verdicts of the three equivalent non-classicality criteria.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Criteria {
    pub ratio: f64,
    /// Not entanglement-breaking (strict form, ratio > 1).
    pub a: bool,
    /// Not simulable by local operations and classical communication.
    pub b: bool,
    /// Nonzero two-way quantum capacity.
    pub c: bool,
    /// Channel-level flag using `η ≥ (1 − η)N`; differs from `a` only at ratio = 1.
    pub not_entanglement_breaking: bool,
}

impl Criteria {
    pub fn nonclassical(&self) -> bool {
        self.a
    }
}

/// For thermal attenuators all three criteria reduce to `η/((1 − η)N) > 1`.
pub fn nonclassicality_criteria(eta: f64, n_eff: f64) -> Result<Criteria> {
    let not_eb = !is_entanglement_breaking(eta, n_eff)?;
    let ratio = attenuator_ratio(eta, n_eff);
    let v = ratio > 1.0;
    Ok(Criteria { ratio, a: v, b: v, c: v, not_entanglement_breaking: not_eb })
}

/// `2Q (w_G/ω_B)² sinh(ω_B / 2w_T)`, the optimal-point criterion written in
/// terms of the mechanical frequency and quality factor.
pub fn parameter_space_ratio(omega_b: f64, q: f64, w_g: f64, w_t: f64) -> f64 {
    2.0 * q * (w_g * w_g / (omega_b * omega_b)) * (omega_b / (2.0 * w_t)).sinh()
}

/// Quality factor where the criterion equals one, without approximation.
pub fn boundary_q(omega_b: f64, w_g: f64, w_t: f64) -> f64 {
    omega_b * omega_b / (2.0 * w_g * w_g * (omega_b / (2.0 * w_t)).sinh())
}

/// Low-frequency boundary `Q = w_T ω_B / w_G²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowFrequencyBoundary {
    pub q: f64,
    /// Set when `ω_B > w_T/10`, where the linear law is a poor approximation.
    pub outside_validity: bool,
}

pub fn low_frequency_boundary_q(omega_b: f64, w_g: f64, w_t: f64) -> LowFrequencyBoundary {
    LowFrequencyBoundary { q: w_t * omega_b / (w_g * w_g), outside_validity: omega_b > w_t / 10.0 }
}

/// `λ/γ` at `(ω_B, Q)` for a coupling scale `w² = λ ω_B`.
fn coupling_over_damping(omega_b: f64, q: f64, w_sq: f64) -> f64 {
    q * w_sq / (omega_b * omega_b)
}

/// Optimal transmissivity `2s²/(1 + √(1+4s²) + 2s²)` with `s = λ/γ`.
pub fn eta_opt_from_ratio(s: f64) -> f64 {
    let s2 = s * s;
    2.0 * s2 / (1.0 + (1.0 + 4.0 * s2).sqrt() + 2.0 * s2)
}

/// Optimal transmissivity at `(ω_B, Q)` for touching spheres with critical frequency `w_G`.
pub fn eta_opt_q(omega_b: f64, q: f64, w_g: f64) -> f64 {
    eta_opt_from_ratio(coupling_over_damping(omega_b, q, w_g * w_g))
}

/// Time needed to resolve the transparency window, `1/γ_eff`.
pub fn minimum_time(params: &SymmetricParams) -> f64 {
    1.0 / transparency_linewidth(params)
}

/// `(Q/ω_B) / (1 + √(1 + 4Q² w_G⁴/ω_B⁴))`.
pub fn minimum_time_q(omega_b: f64, q: f64, w_g: f64) -> f64 {
    let s = coupling_over_damping(omega_b, q, w_g * w_g);
    (q / omega_b) / (1.0 + 1f64.hypot(2.0 * s))
}

/// Input photons needed for one photon to come out, `1/η_opt`.
pub fn minimum_input_photons(eta_opt: f64) -> f64 {
    1.0 / eta_opt
}

/// `ħ ω_A / (η_opt τ_min)`; infinite (untestable) when `η_opt = 0`.
pub fn minimum_power(eta_opt: f64, tau_min: f64, omega_a: f64) -> Result<f64> {
    check_non_negative("eta_opt", eta_opt)?;
    if eta_opt > 1.0 {
        return Err(Error::InvalidParameter { name: "eta_opt", reason: format!("{eta_opt} exceeds 1") });
    }
    check_positive("tau_min", tau_min)?;
    check_positive("omega_A", omega_a)?;
    if eta_opt == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(CONSTANTS.hbar * omega_a / (eta_opt * tau_min))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Quantum,
    Classical,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Quantum => "quantum",
            Classification::Classical => "classical",
        }
    }
}

/// One cell of a feasibility map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityPoint {
    pub omega_b: f64,
    pub q: f64,
    pub ratio: f64,
    pub classification: Classification,
    pub eta_opt: f64,
    pub tau_min: f64,
    pub p_min: f64,
}

impl FeasibilityPoint {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            format_float(self.omega_b),
            format_float(self.q),
            format_float(self.ratio),
            self.classification.as_str(),
            format_float(self.eta_opt),
            format_float(self.tau_min),
            format_float(self.p_min),
        )
    }
}

/// Logarithmic axis and resolution of a feasibility map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub omega_b: (f64, f64),
    pub q: (f64, f64),
    pub n_omega: usize,
    pub n_q: usize,
    pub omega_a: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { omega_b: (1e-3, 1e11), q: (1.0, 1e16), n_omega: 200, n_q: 200, omega_a: DEFAULT_OMEGA_A }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in [("omega_B range", self.omega_b), ("Q range", self.q)] {
            check_positive(name, lo)?;
            check_positive(name, hi)?;
            if hi <= lo {
                return Err(Error::InvalidParameter { name, reason: format!("empty range [{lo}, {hi}]") });
            }
        }
        if self.n_omega < 2 || self.n_q < 2 {
            return Err(Error::InvalidParameter { name: "resolution", reason: "need at least 2 points per axis".into() });
        }
        check_positive("omega_A", self.omega_a)
    }

    pub fn omega_axis(&self) -> Vec<f64> {
        log_axis(self.omega_b, self.n_omega)
    }

    pub fn q_axis(&self) -> Vec<f64> {
        log_axis(self.q, self.n_q)
    }
}

pub fn log_axis((lo, hi): (f64, f64), n: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64),
        })
        .collect()
}

/// Evaluates one cell for the given device.
pub fn feasibility_point(omega_b: f64, q: f64, device: &DeviceGeometry, omega_a: f64) -> Result<FeasibilityPoint> {
    let cf = device.critical_frequencies();
    // λ ω_B = G m / d³, which is w_G² for touching spheres.
    let w_sq = CONSTANTS.g_newton * device.mass / device.distance.powi(3);
    let w_eff = w_sq.sqrt();
    let ratio = parameter_space_ratio(omega_b, q, w_eff, cf.w_t);
    let eta_opt = eta_opt_from_ratio(coupling_over_damping(omega_b, q, w_sq));
    let tau_min = minimum_time_q(omega_b, q, w_eff);
    let p_min = minimum_power(eta_opt, tau_min, omega_a)?;
    let classification = if ratio > 1.0 { Classification::Quantum } else { Classification::Classical };
    Ok(FeasibilityPoint { omega_b, q, ratio, classification, eta_opt, tau_min, p_min })
}

/// Cells ordered with `ω_B` as the outer index and `Q` inner.
pub fn classify_grid(spec: &GridSpec, device: &DeviceGeometry, workers: usize) -> Result<Vec<FeasibilityPoint>> {
    spec.validate()?;
    let omegas = spec.omega_axis();
    let qs = spec.q_axis();
    let rows = map_indexed(omegas.len(), workers, |i| {
        qs.iter().map(|&q| feasibility_point(omegas[i], q, device, spec.omega_a)).collect::<Result<Vec<_>>>()
    });
    let mut out = Vec::with_capacity(omegas.len() * qs.len());
    for row in rows {
        out.extend(row?);
    }
    Ok(out)
}

pub fn grid_csv(points: &[FeasibilityPoint]) -> String {
    let mut s = String::with_capacity(points.len() * 96);
    s.push_str(GRID_HEADER);
    s.push('\n');
    for p in points {
        s.push_str(&p.csv_row());
        s.push('\n');
    }
    s
}
