//! Physical constants, parameter sets and derived quantities of the two
//! gravitationally coupled optomechanical systems.
//!
//! Every rate and frequency is an angular frequency in s⁻¹.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{check_finite, check_non_negative, check_positive, Error, Result};

/// Fixed physical constants (SI units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Gravitational constant, m³ kg⁻¹ s⁻².
    pub g_newton: f64,
    /// Reduced Planck constant, J s.
    pub hbar: f64,
    /// Boltzmann constant, J K⁻¹.
    pub k_boltzmann: f64,
    /// Mass density of gold, kg m⁻³.
    pub rho_gold: f64,
}

pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    g_newton: 6.674e-11,
    hbar: 1.0546e-34,
    k_boltzmann: 1.3807e-23,
    rho_gold: 1.93e4,
};

/// Default factor used to turn "much greater than" into a numeric test.
pub const DEFAULT_RWA_MARGIN: f64 = 10.0;

/// Bose-Einstein occupation `1/(exp(ħω/k_B T) − 1)`; zero at `T = 0`.
pub fn thermal_occupation(omega_b: f64, temperature: f64) -> Result<f64> {
    check_positive("omega_B", omega_b)?;
    check_non_negative("temperature", temperature)?;
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = CONSTANTS.hbar * omega_b / (CONSTANTS.k_boltzmann * temperature);
    Ok(1.0 / x.exp_m1())
}

/// Gravitational coupling rate `G m / (d³ ω_B)` of two equal masses.
pub fn lambda_spheres(mass: f64, distance: f64, omega_b: f64) -> Result<f64> {
    check_positive("mass", mass)?;
    check_positive("distance", distance)?;
    check_positive("omega_B", omega_b)?;
    Ok(CONSTANTS.g_newton * mass / (distance.powi(3) * omega_b))
}

/// Gravitational (`w_G`) and environmental (`w_T`) critical frequencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalFrequencies {
    pub w_g: f64,
    pub w_t: f64,
}

pub fn critical_frequencies(density: f64, temperature: f64) -> Result<CriticalFrequencies> {
    check_positive("rho", density)?;
    check_positive("temperature", temperature)?;
    Ok(CriticalFrequencies {
        w_g: (PI * CONSTANTS.g_newton * density / 6.0).sqrt(),
        w_t: CONSTANTS.k_boltzmann * temperature / CONSTANTS.hbar,
    })
}

/// Parameters of two identical optomechanical systems in the resonant
/// (`Δ = ω_B`) rotating-wave model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricParams {
    pub omega_b: f64,
    pub gamma: f64,
    pub kappa: f64,
    pub g: f64,
    pub lambda: f64,
    pub n_thermal: f64,
    /// Optical detuning; equal to `omega_b` in the resonant model.
    pub delta: f64,
}

impl SymmetricParams {
    pub fn new(omega_b: f64, gamma: f64, kappa: f64, g: f64, lambda: f64, n_thermal: f64) -> Result<Self> {
        let p = Self { omega_b, gamma, kappa, g, lambda, n_thermal, delta: omega_b };
        p.validate()?;
        Ok(p)
    }

    /// Same as [`SymmetricParams::new`] with `N_T` derived from a temperature.
    pub fn with_temperature(
        omega_b: f64,
        gamma: f64,
        kappa: f64,
        g: f64,
        lambda: f64,
        temperature: f64,
    ) -> Result<Self> {
        let n_thermal = thermal_occupation(omega_b, temperature)?;
        Self::new(omega_b, gamma, kappa, g, lambda, n_thermal)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("omega_B", self.omega_b)?;
        check_positive("gamma", self.gamma)?;
        check_positive("kappa", self.kappa)?;
        check_non_negative("g", self.g)?;
        check_non_negative("lambda", self.lambda)?;
        check_non_negative("N_T", self.n_thermal)?;
        check_finite("Delta", self.delta)?;
        Ok(())
    }

    /// Two touching gold spheres at 1 mK, `ω_B = 2π × 0.03 s⁻¹`,
    /// `γ = 10⁻¹⁴ ω_B`, `κ = 0.1 ω_B`, with `g` at its optimum.
    pub fn reference() -> Self {
        let omega_b = 2.0 * PI * 0.03;
        let cf = critical_frequencies(CONSTANTS.rho_gold, 1e-3).expect("constants are valid");
        let gamma = 1e-14 * omega_b;
        let kappa = 0.1 * omega_b;
        let lambda = cf.w_g * cf.w_g / omega_b;
        let n_thermal = thermal_occupation(omega_b, 1e-3).expect("constants are valid");
        let g = optimal_coupling(kappa, gamma, lambda);
        Self { omega_b, gamma, kappa, g, lambda, n_thermal, delta: omega_b }
    }

    pub fn with_g(mut self, g: f64) -> Self {
        self.g = g;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_n_thermal(mut self, n_thermal: f64) -> Self {
        self.n_thermal = n_thermal;
        self
    }

    /// The optimal optomechanical coupling `(√κ/2)(γ² + 4λ²)^{1/4}` for these rates.
    pub fn g_opt(&self) -> f64 {
        optimal_coupling(self.kappa, self.gamma, self.lambda)
    }

    /// Copy with `g` set to [`SymmetricParams::g_opt`].
    pub fn at_optimal_coupling(self) -> Self {
        let g = self.g_opt();
        self.with_g(g)
    }

    /// All rates divided by `scale`; dimensionless outputs are invariant.
    pub(crate) fn rescaled(&self, scale: f64) -> Self {
        Self {
            omega_b: self.omega_b / scale,
            gamma: self.gamma / scale,
            kappa: self.kappa / scale,
            g: self.g / scale,
            lambda: self.lambda / scale,
            n_thermal: self.n_thermal,
            delta: self.delta / scale,
        }
    }
}

pub(crate) fn optimal_coupling(kappa: f64, gamma: f64, lambda: f64) -> f64 {
    0.5 * kappa.sqrt() * (gamma * gamma + 4.0 * lambda * lambda).powf(0.25)
}

/// Outcome of the rotating-wave validity check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RwaCheck {
    pub valid: bool,
    /// `N_T / bound`; validity requires this to exceed the margin factor.
    pub margin: f64,
    /// Light-induced noise bound `(g²/γ)(κ/ω_B²)`.
    pub bound: f64,
    /// Whether `g ≪ κ` holds with the same margin factor.
    pub weak_coupling: bool,
}

pub fn rwa_valid(params: &SymmetricParams) -> RwaCheck {
    rwa_valid_with(params, DEFAULT_RWA_MARGIN)
}

pub fn rwa_valid_with(params: &SymmetricParams, margin_factor: f64) -> RwaCheck {
    let p = params;
    let bound = p.g * p.g * p.kappa / (p.gamma * p.omega_b * p.omega_b);
    let margin = if bound == 0.0 { f64::INFINITY } else { p.n_thermal / bound };
    let weak_coupling = p.g * margin_factor <= p.kappa;
    let noise_ok = if bound == 0.0 { true } else { margin > margin_factor };
    RwaCheck { valid: noise_ok && weak_coupling, margin, bound, weak_coupling }
}

/// Parameters of one of the two optomechanical systems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub omega_b: f64,
    pub gamma: f64,
    pub kappa: f64,
    pub g: f64,
    pub delta: f64,
    pub n_thermal: f64,
}

impl SystemParams {
    fn validate(&self, which: usize) -> Result<()> {
        let tag = |n: &'static str| -> &'static str {
            match (n, which) {
                ("omega_B", 0) => "omega_B_1",
                ("omega_B", _) => "omega_B_2",
                ("gamma", 0) => "gamma_1",
                ("gamma", _) => "gamma_2",
                ("kappa", 0) => "kappa_1",
                ("kappa", _) => "kappa_2",
                ("g", 0) => "g_1",
                ("g", _) => "g_2",
                ("Delta", 0) => "Delta_1",
                ("Delta", _) => "Delta_2",
                ("N_T", 0) => "N_T_1",
                _ => "N_T_2",
            }
        };
        check_positive(tag("omega_B"), self.omega_b)?;
        check_positive(tag("gamma"), self.gamma)?;
        check_positive(tag("kappa"), self.kappa)?;
        check_non_negative(tag("g"), self.g)?;
        check_finite(tag("Delta"), self.delta)?;
        check_non_negative(tag("N_T"), self.n_thermal)?;
        Ok(())
    }
}

/// Two possibly different optomechanical systems sharing one gravitational
/// coupling. Frequencies follow the laser frame (`ω = 0` at the pump).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymmetricParams {
    pub systems: [SystemParams; 2],
    pub lambda: f64,
}

impl AsymmetricParams {
    pub fn new(first: SystemParams, second: SystemParams, lambda: f64) -> Result<Self> {
        let p = Self { systems: [first, second], lambda };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.systems[0].validate(0)?;
        self.systems[1].validate(1)?;
        check_non_negative("lambda", self.lambda)
    }

    pub fn from_symmetric(p: &SymmetricParams) -> Self {
        let s = SystemParams {
            omega_b: p.omega_b,
            gamma: p.gamma,
            kappa: p.kappa,
            g: p.g,
            delta: p.delta,
            n_thermal: p.n_thermal,
        };
        Self { systems: [s, s], lambda: p.lambda }
    }

    /// Relative mismatch `|ω_B,1 − ω_B,2| / ω_B,1`. The model assumes it is small;
    /// callers may warn when it exceeds a few percent.
    pub fn frequency_mismatch(&self) -> f64 {
        (self.systems[0].omega_b - self.systems[1].omega_b).abs() / self.systems[0].omega_b
    }

    pub(crate) fn rescaled(&self, scale: f64) -> Self {
        let r = |s: &SystemParams| SystemParams {
            omega_b: s.omega_b / scale,
            gamma: s.gamma / scale,
            kappa: s.kappa / scale,
            g: s.g / scale,
            delta: s.delta / scale,
            n_thermal: s.n_thermal,
        };
        Self { systems: [r(&self.systems[0]), r(&self.systems[1])], lambda: self.lambda / scale }
    }
}

/// Dimensionless couplings and detunings of the asymmetric model at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cooperativities {
    pub gamma_1: f64,
    pub gamma_2: f64,
    pub gamma_lambda: f64,
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub varrho: Complex64,
    pub varsigma: Complex64,
}

pub fn cooperativities(params: &AsymmetricParams, omega: f64) -> Cooperativities {
    let [s1, s2] = params.systems;
    let coop = |s: &SystemParams| 4.0 * s.g * s.g / (s.kappa * s.gamma);
    let gamma_1 = coop(&s1);
    let gamma_2 = coop(&s2);
    let gamma_lambda = 4.0 * params.lambda * params.lambda / (s1.gamma * s2.gamma);
    let x = [2.0 * (s1.delta - omega) / s1.kappa, 2.0 * (s2.delta - omega) / s2.kappa];
    let y = [2.0 * (s1.omega_b - omega) / s1.gamma, 2.0 * (s2.omega_b - omega) / s2.gamma];
    let one_ix1 = Complex64::new(1.0, x[0]);
    let one_iy1 = Complex64::new(1.0, y[0]);
    let one_ix2 = Complex64::new(1.0, x[1]);
    let one_iy2 = Complex64::new(1.0, y[1]);
    let varrho = one_ix1 * one_iy1 + gamma_1;
    let varsigma = one_ix2 * (one_iy2 + one_ix1 * gamma_lambda / varrho);
    Cooperativities { gamma_1, gamma_2, gamma_lambda, x, y, varrho, varsigma }
}

/// Two homogeneous spheres whose mechanical modes couple gravitationally.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceGeometry {
    pub mass: f64,
    pub distance: f64,
    pub radius: f64,
    pub density: f64,
    pub temperature: f64,
}

impl DeviceGeometry {
    /// Spheres of radius `radius` and density `density`, touching (`d = 2R`).
    pub fn touching_spheres(radius: f64, density: f64, temperature: f64) -> Result<Self> {
        Self::spheres(radius, density, 2.0 * radius, temperature)
    }

    pub fn spheres(radius: f64, density: f64, distance: f64, temperature: f64) -> Result<Self> {
        check_positive("radius", radius)?;
        check_positive("rho", density)?;
        check_positive("temperature", temperature)?;
        check_finite("distance", distance)?;
        if distance < 2.0 * radius {
            return Err(Error::InvalidParameter {
                name: "distance",
                reason: format!("{distance} is smaller than the contact distance {}", 2.0 * radius),
            });
        }
        let mass = 4.0 / 3.0 * PI * radius.powi(3) * density;
        Ok(Self { mass, distance, radius, density, temperature })
    }

    /// Gold spheres of 1 mm radius in contact, at 1 mK.
    pub fn gold_reference() -> Self {
        Self::touching_spheres(1e-3, CONSTANTS.rho_gold, 1e-3).expect("constants are valid")
    }

    pub fn lambda(&self, omega_b: f64) -> Result<f64> {
        lambda_spheres(self.mass, self.distance, omega_b)
    }

    pub fn critical_frequencies(&self) -> CriticalFrequencies {
        critical_frequencies(self.density, self.temperature).expect("validated at construction")
    }
}

/// `ħ G m / (γ k_B T d³)`: the ratio of the gravitational entanglement rate
/// to the Brownian decoherence rate. In the low-frequency limit it coincides
/// with `λ / (γ N_T)`, the channel criterion at its optimum.
pub fn git_vs_gie_ratio(geometry: &DeviceGeometry, gamma: f64) -> Result<f64> {
    check_positive("gamma", gamma)?;
    let c = CONSTANTS;
    Ok(c.hbar * c.g_newton * geometry.mass
        / (gamma * c.k_boltzmann * geometry.temperature * geometry.distance.powi(3)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn thermal_occupation_reference_point() {
        let n = thermal_occupation(2.0 * PI * 0.03, 1e-3).unwrap();
        assert!(rel(n, 6.94e8) < 5e-3, "{n}");
    }

    #[test]
    fn thermal_occupation_zero_temperature() {
        assert_eq!(thermal_occupation(3.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn thermal_occupation_at_critical_frequency() {
        let w_t = critical_frequencies(CONSTANTS.rho_gold, 1e-3).unwrap().w_t;
        let n = thermal_occupation(w_t, 1e-3).unwrap();
        let expected = 1.0 / (std::f64::consts::E - 1.0);
        assert!(rel(n, expected) < 1e-12);
        assert!((n - 0.5820).abs() < 1e-4);
    }

    #[test]
    fn thermal_occupation_rejects_non_finite() {
        assert!(thermal_occupation(f64::NAN, 1.0).is_err());
        assert!(thermal_occupation(1.0, f64::INFINITY).is_err());
        assert!(thermal_occupation(1.0, -1.0).is_err());
    }

    #[test]
    fn thermal_occupation_classical_limit() {
        let w_t = critical_frequencies(CONSTANTS.rho_gold, 1e-3).unwrap().w_t;
        for k in 1..20 {
            let w = w_t / 100.0 / k as f64;
            let n = thermal_occupation(w, 1e-3).unwrap();
            assert!(rel(n, w_t / w) < 1e-2);
        }
    }

    #[test]
    fn thermal_occupation_monotone() {
        let mut last = f64::INFINITY;
        for k in 1..50 {
            let n = thermal_occupation(0.1 * k as f64 * 1e7, 1e-3).unwrap();
            assert!(n < last);
            last = n;
        }
        let mut last = 0.0;
        for k in 1..50 {
            let n = thermal_occupation(1e8, 1e-4 * k as f64).unwrap();
            assert!(n > last);
            last = n;
        }
    }

    #[test]
    fn lambda_of_touching_gold_spheres_is_radius_independent() {
        let omega_b = 2.0 * PI * 0.03;
        let w_g = critical_frequencies(CONSTANTS.rho_gold, 1e-3).unwrap().w_g;
        for radius in [1e-6, 1e-3, 0.1, 3.0] {
            let geo = DeviceGeometry::touching_spheres(radius, CONSTANTS.rho_gold, 1e-3).unwrap();
            let lambda = geo.lambda(omega_b).unwrap();
            assert!(rel(lambda, w_g * w_g / omega_b) < 1e-12);
            assert!(rel(lambda, PI * CONSTANTS.g_newton * CONSTANTS.rho_gold / (6.0 * omega_b)) < 1e-12);
        }
        let lambda = DeviceGeometry::gold_reference().lambda(omega_b).unwrap();
        assert!(rel(lambda, 3.58e-6) < 1e-2, "{lambda}");
    }

    #[test]
    fn lambda_cubic_in_distance() {
        let a = lambda_spheres(2.0, 0.1, 0.5).unwrap();
        let b = lambda_spheres(2.0, 0.2, 0.5).unwrap();
        assert!(rel(b, a / 8.0) < 1e-14);
    }

    #[test]
    fn critical_frequency_values() {
        let cf = critical_frequencies(CONSTANTS.rho_gold, 1e-3).unwrap();
        assert!((cf.w_g - 8.2e-4).abs() < 0.05e-4, "{}", cf.w_g);
        assert!((cf.w_t - 1.3e8).abs() < 0.05e8, "{}", cf.w_t);
        let quad = critical_frequencies(4.0 * CONSTANTS.rho_gold, 1e-3).unwrap();
        assert!(rel(quad.w_g, 2.0 * cf.w_g) < 1e-14);
    }

    #[test]
    fn rwa_reference_is_valid() {
        let p = SymmetricParams::reference();
        let check = rwa_valid(&p);
        // (g²/γ)(κ/ω_B²) evaluated by hand from the reference rates.
        let bound = p.g.powi(2) / p.gamma * p.kappa / p.omega_b.powi(2);
        assert!(rel(check.bound, bound) < 1e-14);
        assert!(rel(check.bound, 9.49e6) < 1e-3, "{}", check.bound);
        assert!(check.valid);
        assert!(check.weak_coupling);
        assert!(check.margin > 70.0 && check.margin < 75.0, "{}", check.margin);
    }

    #[test]
    fn rwa_trivial_without_coupling() {
        let p = SymmetricParams::reference().with_g(0.0);
        let check = rwa_valid(&p);
        assert_eq!(check.bound, 0.0);
        assert!(check.valid);
    }

    #[test]
    fn rwa_breaks_for_vanishing_damping() {
        let p = SymmetricParams::reference().with_gamma(1e-30);
        assert!(!rwa_valid(&p).valid);
    }

    #[test]
    fn cooperativities_at_resonance() {
        let p = SymmetricParams::reference();
        let a = AsymmetricParams::from_symmetric(&p);
        let c = cooperativities(&a, p.omega_b);
        assert_eq!(c.x, [0.0, 0.0]);
        assert_eq!(c.y, [0.0, 0.0]);
        assert!((c.varrho - Complex64::new(1.0 + c.gamma_1, 0.0)).norm() < 1e-12 * c.varrho.norm());
        assert_eq!(c.gamma_1, c.gamma_2);
        let expected = 1.0 + c.gamma_lambda / (1.0 + c.gamma_1);
        assert!(rel(c.varsigma.re, expected) < 1e-12);
        assert!(rel(c.gamma_lambda, 1.44e19) < 1e-2, "{}", c.gamma_lambda);
    }

    #[test]
    fn cooperativity_vanishes_without_coupling() {
        let p = SymmetricParams::reference().with_g(0.0);
        let c = cooperativities(&AsymmetricParams::from_symmetric(&p), 0.3);
        assert_eq!(c.gamma_1, 0.0);
        assert_eq!(c.gamma_2, 0.0);
    }

    #[test]
    fn git_vs_gie_matches_channel_criterion() {
        let p = SymmetricParams::reference();
        let geo = DeviceGeometry::gold_reference();
        let ratio = git_vs_gie_ratio(&geo, p.gamma).unwrap();
        let cf = geo.critical_frequencies();
        // λ/(γ N_T) with N_T in its classical limit w_T/ω_B.
        let criterion = p.lambda / (p.gamma * cf.w_t / p.omega_b);
        assert!(rel(ratio, criterion) < 1e-12);
        assert!((ratio - 2.74).abs() < 0.02, "{ratio}");
        let hot = DeviceGeometry { temperature: 2e-3, ..geo };
        assert!(rel(git_vs_gie_ratio(&hot, p.gamma).unwrap(), ratio / 2.0) < 1e-14);
    }

    #[test]
    fn git_vs_gie_unit_at_boundary() {
        let geo = DeviceGeometry::gold_reference();
        let c = CONSTANTS;
        let gamma = c.hbar * c.g_newton * geo.mass / (c.k_boltzmann * geo.temperature * geo.distance.powi(3));
        assert!(rel(git_vs_gie_ratio(&geo, gamma).unwrap(), 1.0) < 1e-14);
    }

    #[test]
    fn geometry_rejects_overlap() {
        assert!(DeviceGeometry::spheres(1.0, 1.0, 1.5, 1.0).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(SymmetricParams::new(1.0, 0.0, 1.0, 0.0, 0.0, 0.0).is_err());
        assert!(SymmetricParams::new(1.0, 1.0, 1.0, -1.0, 0.0, 0.0).is_err());
        assert!(SymmetricParams::new(1.0, 1.0, 1.0, 0.0, 0.0, 0.0).is_ok());
    }
}
