//! Two different optomechanical systems, laser frame (`ω = 0` at the pumps).

use num_complex::Complex64;

use super::{coefficients_from_drift, AttenuatorChannel, TransferCoefficients};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::model::{cooperativities, AsymmetricParams, SystemParams};

/// Drift and input matrices of the laser-frame Langevin equations.
pub fn asymmetric_drift_matrix(params: &AsymmetricParams) -> (ComplexMatrix, [f64; 4]) {
    let [s1, s2] = params.systems;
    let z = Complex64::new(0.0, 0.0);
    let cav = |s: &SystemParams| -Complex64::new(s.kappa / 2.0, s.delta);
    let mech = |s: &SystemParams| -Complex64::new(s.gamma / 2.0, s.omega_b);
    let ig1 = Complex64::new(0.0, -s1.g);
    let ig2 = Complex64::new(0.0, -s2.g);
    let il = Complex64::new(0.0, -params.lambda);
    #[rustfmt::skip]
    let data = vec![
        cav(&s1), ig1,       z,         z,
        ig1,      mech(&s1), z,         il,
        z,        z,         cav(&s2),  ig2,
        z,        il,        ig2,       mech(&s2),
    ];
    let a = ComplexMatrix::from_rows(4, 4, data).expect("4x4 of finite entries");
    (a, [s1.kappa.sqrt(), s1.gamma.sqrt(), s2.kappa.sqrt(), s2.gamma.sqrt()])
}

/// Generic-solve coefficients of the asymmetric model at laser-frame `omega`.
pub fn asymmetric_transfer_numeric(params: &AsymmetricParams, omega: f64) -> Result<TransferCoefficients> {
    params.validate()?;
    let scale = params.systems[0].kappa;
    let (drift, input) = asymmetric_drift_matrix(&params.rescaled(scale));
    let c = coefficients_from_drift(&drift, input, omega / scale)?;
    Ok(TransferCoefficients { alpha_1: c[0], beta_1: c[1], alpha_2: c[2], beta_2: c[3], omega })
}

/// Closed-form coefficients expressed through cooperativities; `omega` in the laser frame.
pub fn asymmetric_coefficients(params: &AsymmetricParams, omega: f64) -> Result<TransferCoefficients> {
    params.validate()?;
    crate::error::check_finite("omega", omega)?;
    let c = cooperativities(params, omega);
    let i = Complex64::i();
    let one_ix1 = Complex64::new(1.0, c.x[0]);
    let one_ix2 = Complex64::new(1.0, c.x[1]);
    let tail = c.varsigma + c.gamma_2;
    if c.varrho.norm() == 0.0 || tail.norm() == 0.0 || !tail.is_finite() {
        return Err(Error::DegenerateDenominator { omega });
    }
    let sg2 = c.gamma_2.sqrt();
    let sgl = c.gamma_lambda.sqrt();
    let alpha_1 = 2.0 * i * (sgl * c.gamma_1.sqrt()) / c.varrho * sg2 / tail;
    let beta_1 = -2.0 * one_ix1 * sgl / c.varrho * sg2 / tail;
    let beta_2 = -2.0 * i * sg2 / tail;
    // From eliminating a₂ and b₂ directly.
    let alpha_2 = 2.0 * c.varsigma / (one_ix2 * tail) - 1.0;
    Ok(TransferCoefficients { alpha_1, beta_1, alpha_2, beta_2, omega })
}

/// Channel and coefficients of the asymmetric model at laser-frame `omega`.
pub fn asymmetric_channel_at(
    params: &AsymmetricParams,
    omega: f64,
) -> Result<(AttenuatorChannel, TransferCoefficients)> {
    let tc = asymmetric_coefficients(params, omega)?;
    let n = [params.systems[0].n_thermal, params.systems[1].n_thermal];
    Ok((AttenuatorChannel::from_coefficients(&tc, n), tc))
}

/// `Γ₁ / (|1 + i x₁|² N₁ + |ϱ|² N₂ / Γ_λ)` at laser-frame `omega`.
pub fn asymmetric_ratio(params: &AsymmetricParams, omega: f64) -> f64 {
    let c = cooperativities(params, omega);
    if c.gamma_lambda == 0.0 || c.gamma_1 == 0.0 {
        return 0.0;
    }
    let [s1, s2] = params.systems;
    let den = (1.0 + c.x[0] * c.x[0]) * s1.n_thermal + c.varrho.norm_sqr() * s2.n_thermal / c.gamma_lambda;
    if den == 0.0 {
        f64::INFINITY
    } else {
        c.gamma_1 / den
    }
}

/// Operating point maximizing the ratio (system 1) and then the
/// transmissivity (system 2) at `ω = ω_B,1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TunedSystems {
    pub omega: f64,
    pub delta_1: f64,
    pub g_1: f64,
    pub delta_2: f64,
    pub g_2: f64,
    pub cooperativity_1: f64,
    pub cooperativity_2: f64,
    pub detuning_2: f64,
    /// Ratio reached at the tuned point.
    pub ratio: f64,
    /// Transmissivity reached at the tuned point.
    pub eta: f64,
    /// `Γ_λ / (4 N₂ (1 + N₁))`: exceeds 1 exactly when `ratio` does.
    pub threshold: f64,
}

impl TunedSystems {
    /// `params` with the four tuned values substituted.
    pub fn apply(&self, params: &AsymmetricParams) -> AsymmetricParams {
        let mut out = *params;
        out.systems[0].delta = self.delta_1;
        out.systems[0].g = self.g_1;
        out.systems[1].delta = self.delta_2;
        out.systems[1].g = self.g_2;
        out
    }
}

pub fn asymmetric_optimum(params: &AsymmetricParams) -> Result<TunedSystems> {
    params.validate()?;
    let [s1, s2] = params.systems;
    let (n1, n2) = (s1.n_thermal, s2.n_thermal);
    if n2 == 0.0 {
        return Err(Error::InvalidParameter {
            name: "N_T_2",
            reason: "the ratio grows without bound in g_1 when system 2 is at zero temperature".into(),
        });
    }
    let omega = s1.omega_b;
    let gamma_lambda = 4.0 * params.lambda * params.lambda / (s1.gamma * s2.gamma);
    let coop_1 = (gamma_lambda * n1 / n2 + 1.0).sqrt();
    // 1 + (N₂/N₁)(Γ₁ − 1), rewritten so N₁ = 0 is harmless.
    let c = 1.0 + gamma_lambda / (1.0 + coop_1);
    let y2 = 2.0 * (s2.omega_b - omega) / s2.gamma;
    let x2 = y2 / c;
    let coop_2 = (1.0 + x2 * x2) * c;
    let ratio = coop_1 * gamma_lambda / (2.0 * n1 * gamma_lambda + 2.0 * (1.0 + coop_1) * n2);
    let eta = gamma_lambda * coop_1 / ((1.0 + coop_1).powi(2) * c);
    Ok(TunedSystems {
        omega,
        delta_1: omega,
        g_1: (coop_1 * s1.kappa * s1.gamma / 4.0).sqrt(),
        delta_2: omega + s2.kappa * x2 / 2.0,
        g_2: (coop_2 * s2.kappa * s2.gamma / 4.0).sqrt(),
        cooperativity_1: coop_1,
        cooperativity_2: coop_2,
        detuning_2: x2,
        ratio,
        eta,
        threshold: gamma_lambda / (4.0 * n2 * (1.0 + n1)),
    })
}

/// Transmissivity of the tuned point when both thermal occupations are equal.
pub fn equal_temperature_tuned_eta(gamma_lambda: f64) -> f64 {
    if gamma_lambda == 0.0 {
        return 0.0;
    }
    1.0 - 2.0 * ((gamma_lambda + 1.0).sqrt() - 1.0) / gamma_lambda
}

/// Cooperativity and detuning of system 1 maximizing the ratio at an
/// arbitrary laser-frame frequency. The maximum equals the resonant one.
pub fn ratio_optimal_first_system(params: &AsymmetricParams, omega: f64) -> (f64, f64) {
    let [s1, s2] = params.systems;
    let gamma_lambda = 4.0 * params.lambda * params.lambda / (s1.gamma * s2.gamma);
    let resonant = (gamma_lambda * s1.n_thermal / s2.n_thermal + 1.0).sqrt();
    let y1 = 2.0 * (s1.omega_b - omega) / s1.gamma;
    ((resonant * resonant + y1 * y1) / resonant, y1 / resonant)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{channel_at, ratio_at, to_laser_frame, transfer_coefficients_analytic};
    use crate::model::SymmetricParams;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn random_asymmetric(rng: &mut ChaCha8Rng) -> AsymmetricParams {
        let sys = |rng: &mut ChaCha8Rng| SystemParams {
            omega_b: rng.random_range(0.9..1.1) * 100.0,
            gamma: 10f64.powf(rng.random_range(-2.0..0.0)),
            kappa: 10f64.powf(rng.random_range(0.0..1.0)),
            g: 10f64.powf(rng.random_range(-1.0..0.5)),
            delta: rng.random_range(95.0..105.0),
            n_thermal: 10f64.powf(rng.random_range(0.0..2.0)),
        };
        let s1 = sys(rng);
        let s2 = sys(rng);
        AsymmetricParams::new(s1, s2, 10f64.powf(rng.random_range(-1.5..0.0))).unwrap()
    }

    #[test]
    fn closed_form_matches_numeric() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..300 {
            let p = random_asymmetric(&mut rng);
            let w = p.systems[0].omega_b + rng.random_range(-2.0..2.0);
            let a = asymmetric_coefficients(&p, w).unwrap();
            let n = asymmetric_transfer_numeric(&p, w).unwrap();
            assert!(a.max_difference(&n) < 1e-10, "{a:?}\n{n:?}");
            assert!((a.unitarity_sum() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn symmetric_limit() {
        let p = SymmetricParams::reference();
        let a = AsymmetricParams::from_symmetric(&p);
        let lw = crate::channel::transparency_linewidth(&p);
        for k in -5..=5 {
            let w = k as f64 * lw;
            let sym = transfer_coefficients_analytic(&p, w).unwrap();
            let (ch, asym) = asymmetric_channel_at(&a, to_laser_frame(w, p.omega_b)).unwrap();
            assert!(sym.max_difference(&asym) < 1e-10);
            let reference = channel_at(&p, w).unwrap();
            assert!(rel(ch.ratio(), reference.ratio()) < 1e-10);
            assert!(rel(asymmetric_ratio(&a, to_laser_frame(w, p.omega_b)), ratio_at(&p, w)) < 1e-10);
        }
    }

    #[test]
    fn no_gravity_no_transmission() {
        let mut p = AsymmetricParams::from_symmetric(&SymmetricParams::reference());
        p.lambda = 0.0;
        let (ch, tc) = asymmetric_channel_at(&p, p.systems[0].omega_b).unwrap();
        assert_eq!(tc.alpha_1.norm(), 0.0);
        assert_eq!(ch.eta, 0.0);
        assert_eq!(asymmetric_ratio(&p, 0.3), 0.0);
    }

    #[test]
    fn hot_second_system_kills_ratio() {
        let mut p = AsymmetricParams::from_symmetric(&SymmetricParams::reference());
        p.systems[1].n_thermal = 1e300;
        assert!(asymmetric_ratio(&p, p.systems[0].omega_b) < 1e-280);
    }

    #[test]
    fn tuned_point_reproduces_closed_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..100 {
            let p = random_asymmetric(&mut rng);
            let t = asymmetric_optimum(&p).unwrap();
            let q = t.apply(&p);
            let (ch, _) = asymmetric_channel_at(&q, t.omega).unwrap();
            assert!(rel(asymmetric_ratio(&q, t.omega), t.ratio) < 1e-10);
            assert!(rel(ch.eta, t.eta) < 1e-10);
            assert_eq!(t.ratio > 1.0, t.threshold > 1.0);
        }
    }

    #[test]
    fn tuned_eta_equal_temperatures() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let mut p = random_asymmetric(&mut rng);
            p.systems[1].n_thermal = p.systems[0].n_thermal;
            let t = asymmetric_optimum(&p).unwrap();
            let gl = 4.0 * p.lambda.powi(2) / (p.systems[0].gamma * p.systems[1].gamma);
            assert!(rel(t.eta, equal_temperature_tuned_eta(gl)) < 1e-10);
        }
    }

    #[test]
    fn symmetric_tuning_reduces_to_optimal_coupling() {
        let p = SymmetricParams::reference();
        let t = asymmetric_optimum(&AsymmetricParams::from_symmetric(&p)).unwrap();
        assert!(rel(t.g_1, p.g_opt()) < 1e-12);
        assert!(rel(t.g_2, p.g_opt()) < 1e-12);
        assert_eq!(t.delta_1, p.omega_b);
        assert_eq!(t.delta_2, p.omega_b);
    }

    #[test]
    fn equal_mechanical_frequencies_keep_resonant_detuning() {
        let p = SymmetricParams::new(2.0, 0.01, 0.5, 0.1, 0.05, 20.0).unwrap();
        let mut a = AsymmetricParams::from_symmetric(&p);
        a.systems[1].gamma = 0.03;
        a.systems[1].n_thermal = 7.0;
        let t = asymmetric_optimum(&a).unwrap();
        assert_eq!(t.delta_2, a.systems[0].omega_b);
    }

    #[test]
    fn dimensional_coupling_formulas_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..50 {
            let p = random_asymmetric(&mut rng);
            let t = asymmetric_optimum(&p).unwrap();
            let [s1, s2] = p.systems;
            let (n1, n2, l) = (s1.n_thermal, s2.n_thermal, p.lambda);
            let g1_sq = s1.kappa / 4.0
                * (4.0 * l * l * s1.gamma * n1 / (s2.gamma * n2) + s1.gamma * s1.gamma).sqrt();
            assert!(rel(t.g_1 * t.g_1, g1_sq) < 1e-12);
            let den = n2 / n1 * (4.0 * l * l * s2.gamma * n1 / (s1.gamma * n2) + s2.gamma * s2.gamma).sqrt()
                - s2.gamma * (n2 - n1) / n1;
            let delta_2 = s1.omega_b + s2.kappa * (s2.omega_b - s1.omega_b) / den;
            assert!((t.delta_2 - delta_2).abs() < 1e-10 * s1.omega_b);
        }
    }

    fn with_first_system(p: &AsymmetricParams, omega: f64, coop: f64, x1: f64) -> AsymmetricParams {
        let mut q = *p;
        let s = &mut q.systems[0];
        s.g = (coop * s.kappa * s.gamma / 4.0).sqrt();
        s.delta = omega + s.kappa * x1 / 2.0;
        q
    }

    #[test]
    fn off_resonance_optimum_reaches_resonant_ratio() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for _ in 0..50 {
            let p = random_asymmetric(&mut rng);
            let w = p.systems[0].omega_b + rng.random_range(-0.05..0.05);
            let (coop, x1) = ratio_optimal_first_system(&p, w);
            let tuned = asymmetric_ratio(&with_first_system(&p, w, coop, x1), w);
            let at_resonance = asymmetric_optimum(&p).unwrap().ratio;
            assert!(rel(tuned, at_resonance) < 1e-9, "{tuned} {at_resonance}");
            for (dc, dx) in [(1.01, 0.0), (0.99, 0.0), (1.0, 0.01), (1.0, -0.01)] {
                let q = with_first_system(&p, w, coop * dc, x1 + dx * (1.0 + x1.abs()));
                assert!(asymmetric_ratio(&q, w) < tuned);
            }
        }
    }

    #[test]
    fn factorized_off_resonance_form_is_exact_only_at_threshold() {
        // Factorized form: Γ = √((Γ₀² + y²)(1 + y²/(1+2N₁)²)), x = y/(1+2N₁) with Γ₀² = Γ_λN₁/N₂ + 1.
        let factorized = |p: &AsymmetricParams, w: f64| {
            let [s1, s2] = p.systems;
            let gl = 4.0 * p.lambda.powi(2) / (s1.gamma * s2.gamma);
            let y = 2.0 * (s1.omega_b - w) / s1.gamma;
            let m = 1.0 + 2.0 * s1.n_thermal;
            let g0_sq = gl * s1.n_thermal / s2.n_thermal + 1.0;
            (((g0_sq + y * y) * (1.0 + y * y / (m * m))).sqrt(), y / m)
        };
        let base = SystemParams { omega_b: 100.0, gamma: 0.1, kappa: 2.0, g: 0.3, delta: 100.0, n_thermal: 3.0 };
        let second = SystemParams { gamma: 0.2, n_thermal: 5.0, ..base };
        let mut p = AsymmetricParams::new(base, second, 0.0).unwrap();
        // λ placed so that Γ₀ = 1 + 2N₁, i.e. the threshold.
        let gl: f64 = 4.0 * 3.0 * 4.0 * 5.0 / 3.0;
        p.lambda = (gl * 0.1 * 0.2 / 4.0).sqrt();
        let w = 99.97;
        assert!((asymmetric_optimum(&p).unwrap().ratio - 1.0).abs() < 1e-12);
        let (c_ok, x_ok) = ratio_optimal_first_system(&p, w);
        let (c_pr, x_pr) = factorized(&p, w);
        assert!(rel(c_pr, c_ok) < 1e-12 && rel(x_pr, x_ok) < 1e-12);
        p.lambda *= 3.0;
        let (c_ok, _) = ratio_optimal_first_system(&p, w);
        let (c_pr, _) = factorized(&p, w);
        assert!(rel(c_pr, c_ok) > 1e-3);
    }
}
