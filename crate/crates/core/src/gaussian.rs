//! Gaussian states in the quadrature picture.
//!
//! Quadratures are ordered `(q₁, p₁, q₂, p₂, …)` with vacuum covariance `I/2`
//! and `a = (q + i p)/√2`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::AttenuatorChannel;
use crate::error::{check_finite, check_non_negative, Error, Result};
use crate::linalg::{self, ComplexMatrix, RealMatrix};

/// Relative slack for the uncertainty principle and for the PT verdict.
const PHYSICAL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: Vec<f64>,
    cov: RealMatrix,
}

/// Recipes accepted by [`make_state`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateKind {
    Vacuum,
    Thermal { n: f64 },
    Coherent { alpha: Complex64 },
    /// Two-mode squeezed vacuum with squeeze parameter `r`.
    TwoModeSqueezed { r: f64 },
}

pub fn make_state(kind: StateKind) -> Result<GaussianState> {
    match kind {
        StateKind::Vacuum => Ok(GaussianState::vacuum(1)),
        StateKind::Thermal { n } => {
            check_non_negative("n", n)?;
            GaussianState::new(vec![0.0; 2], RealMatrix::identity(2).scale(n + 0.5))
        }
        StateKind::Coherent { alpha } => {
            check_finite("alpha", alpha.re)?;
            check_finite("alpha", alpha.im)?;
            let s = std::f64::consts::SQRT_2;
            GaussianState::new(vec![s * alpha.re, s * alpha.im], RealMatrix::identity(2).scale(0.5))
        }
        StateKind::TwoModeSqueezed { r } => {
            check_non_negative("r", r)?;
            let (c, s) = ((2.0 * r).cosh() / 2.0, (2.0 * r).sinh() / 2.0);
            let cov = RealMatrix::from_rows(
                4,
                4,
                vec![
                    c, 0.0, s, 0.0, //
                    0.0, c, 0.0, -s, //
                    s, 0.0, c, 0.0, //
                    0.0, -s, 0.0, c,
                ],
            )?;
            GaussianState::new(vec![0.0; 4], cov)
        }
    }
}

impl GaussianState {
    /// Validates symmetry and the uncertainty relation `σ + iΩ/2 ⪰ 0`.
    pub fn new(mean: Vec<f64>, cov: RealMatrix) -> Result<Self> {
        let dim = mean.len();
        if dim == 0 || !dim.is_multiple_of(2) || cov.rows() != dim || cov.cols() != dim {
            return Err(Error::Dimension(format!(
                "mean of length {dim} with {}x{} covariance",
                cov.rows(),
                cov.cols()
            )));
        }
        if mean.iter().chain(cov.as_slice()).any(|x| !x.is_finite()) {
            return Err(Error::Unphysical("non-finite entry".into()));
        }
        let scale = cov.max_abs().max(1.0);
        for r in 0..dim {
            for c in 0..r {
                if (cov[(r, c)] - cov[(c, r)]).abs() > PHYSICAL_TOLERANCE * scale {
                    return Err(Error::Unphysical(format!("covariance not symmetric at ({r}, {c})")));
                }
            }
        }
        let state = Self { mean, cov };
        let min = linalg::hermitian_eigenvalues(&state.uncertainty_matrix())?[0];
        if min < -PHYSICAL_TOLERANCE * scale {
            return Err(Error::Unphysical(format!("σ + iΩ/2 has eigenvalue {min:e}")));
        }
        Ok(state)
    }

    pub fn vacuum(modes: usize) -> Self {
        Self { mean: vec![0.0; 2 * modes], cov: RealMatrix::identity(2 * modes).scale(0.5) }
    }

    pub fn modes(&self) -> usize {
        self.mean.len() / 2
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn covariance(&self) -> &RealMatrix {
        &self.cov
    }

    /// Mean photon number of one mode.
    pub fn photon_number(&self, mode: usize) -> Result<f64> {
        self.require_mode(mode)?;
        let (q, p) = (2 * mode, 2 * mode + 1);
        let m2 = self.mean[q].powi(2) + self.mean[p].powi(2);
        Ok((self.cov[(q, q)] + self.cov[(p, p)] + m2 - 1.0) / 2.0)
    }

    /// Symplectic eigenvalues, ascending. All are `≥ 1/2` for a physical state.
    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        let n = self.mean.len();
        let m = ComplexMatrix::from_fn(n, n, |r, c| {
            let mut s = 0.0;
            for k in 0..n {
                s += omega(r, k) * self.cov[(k, c)];
            }
            Complex64::new(0.0, s)
        });
        let mut ev: Vec<f64> = linalg::eigenvalues(&m)?.iter().map(|z| z.re).filter(|x| *x > 0.0).collect();
        ev.sort_by(f64::total_cmp);
        Ok(ev)
    }

    /// Mean vector and covariance of a subset of modes, in the given order.
    pub fn reduced(&self, modes: &[usize]) -> Result<GaussianState> {
        for &m in modes {
            self.require_mode(m)?;
        }
        let idx: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        let mean = idx.iter().map(|&i| self.mean[i]).collect();
        let cov = RealMatrix::from_fn(idx.len(), idx.len(), |r, c| self.cov[(idx[r], idx[c])]);
        Ok(GaussianState { mean, cov })
    }

    fn uncertainty_matrix(&self) -> ComplexMatrix {
        let n = self.mean.len();
        ComplexMatrix::from_fn(n, n, |r, c| Complex64::new(self.cov[(r, c)], 0.5 * omega(r, c)))
    }

    fn require_mode(&self, mode: usize) -> Result<()> {
        if mode < self.modes() {
            Ok(())
        } else {
            Err(Error::Dimension(format!("mode {mode} of a {}-mode state", self.modes())))
        }
    }
}

/// Symplectic form entry `Ω_{rc}` for block-diagonal `[[0, 1], [-1, 0]]`.
fn omega(r: usize, c: usize) -> f64 {
    if r / 2 != c / 2 {
        0.0
    } else if r.is_multiple_of(2) && c == r + 1 {
        1.0
    } else if r % 2 == 1 && c + 1 == r {
        -1.0
    } else {
        0.0
    }
}

fn rotation(phi: f64) -> [[f64; 2]; 2] {
    let (s, c) = phi.sin_cos();
    [[c, -s], [s, c]]
}

/// Sends one mode of `state` through the attenuator. Other modes are untouched;
/// correlations with them are scaled by `√η R(φ)`.
pub fn apply_attenuator(state: &GaussianState, mode: usize, channel: &AttenuatorChannel) -> Result<GaussianState> {
    state.require_mode(mode)?;
    let rot = rotation(channel.phi);
    let t = channel.eta.sqrt();
    let x = [[t * rot[0][0], t * rot[0][1]], [t * rot[1][0], t * rot[1][1]]];
    let n = state.mean.len();
    let (q, p) = (2 * mode, 2 * mode + 1);
    let in_mode = |i: usize| i == q || i == p;

    // Full transform S = I except the 2x2 block X on this mode.
    let s = |r: usize, c: usize| -> f64 {
        if in_mode(r) && in_mode(c) {
            x[r - q][c - q]
        } else if r == c && !in_mode(r) {
            1.0
        } else {
            0.0
        }
    };
    let mut mean = state.mean.clone();
    mean[q] = x[0][0] * state.mean[q] + x[0][1] * state.mean[p];
    mean[p] = x[1][0] * state.mean[q] + x[1][1] * state.mean[p];

    let smat = RealMatrix::from_fn(n, n, s);
    let mut cov = smat.matmul(&state.cov)?.matmul(&smat.transpose())?;
    let added = (1.0 - channel.eta) * (channel.n_eff + 0.5);
    cov[(q, q)] += added;
    cov[(p, p)] += added;
    for r in 0..n {
        for c in 0..r {
            let avg = 0.5 * (cov[(r, c)] + cov[(c, r)]);
            cov[(r, c)] = avg;
            cov[(c, r)] = avg;
        }
    }
    Ok(GaussianState { mean, cov })
}

/// Outcome of the partial-transpose test on a two-mode reduced state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeVerdict {
    pub entangled: bool,
    /// Smallest symplectic eigenvalue of the partially transposed covariance.
    pub nu_tilde_minus: f64,
    pub log_negativity: f64,
}

pub fn two_mode_verdict(state: &GaussianState, mode_a: usize, mode_b: usize) -> Result<TwoModeVerdict> {
    if mode_a == mode_b {
        return Err(Error::Dimension("two distinct modes are required".into()));
    }
    let reduced = state.reduced(&[mode_a, mode_b])?;
    let scale = reduced.cov.max_abs().max(1.0);
    let min = linalg::hermitian_eigenvalues(&reduced.uncertainty_matrix())?[0];
    if min < -PHYSICAL_TOLERANCE * scale {
        return Err(Error::Unphysical(format!("two-mode covariance violates uncertainty ({min:e})")));
    }
    let s = &reduced.cov;
    let det2 = |r: usize, c: usize| s[(r, c)] * s[(r + 1, c + 1)] - s[(r, c + 1)] * s[(r + 1, c)];
    let (det_a, det_b, det_c) = (det2(0, 0), det2(2, 2), det2(0, 2));
    let det_full = linalg::determinant(s)?;
    let delta = det_a + det_b - 2.0 * det_c;
    let disc = (delta * delta - 4.0 * det_full).max(0.0);
    // Rationalized root of ν² − Δ̃ν + detσ = 0 to avoid cancellation.
    let denom = delta + disc.sqrt();
    let nu_sq = if denom > 0.0 { 2.0 * det_full / denom } else { 0.0 };
    let nu = nu_sq.max(0.0).sqrt();
    let entangled = nu < 0.5 * (1.0 - PHYSICAL_TOLERANCE);
    let log_negativity = if entangled { -(2.0 * nu).log2() } else { 0.0 };
    Ok(TwoModeVerdict { entangled, nu_tilde_minus: nu, log_negativity })
}

/// One heterodyne outcome `α = (q + i p)/√2` for `mode`, drawn from the
/// Gaussian with covariance `σ + I/2`.
pub fn heterodyne_sample<R: Rng + ?Sized>(state: &GaussianState, mode: usize, rng: &mut R) -> Result<Complex64> {
    let sampler = HeterodyneSampler::new(state, mode)?;
    Ok(sampler.draw(rng))
}

pub fn heterodyne_samples<R: Rng + ?Sized>(
    state: &GaussianState,
    mode: usize,
    count: usize,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    let sampler = HeterodyneSampler::new(state, mode)?;
    Ok((0..count).map(|_| sampler.draw(rng)).collect())
}

struct HeterodyneSampler {
    mean: [f64; 2],
    chol: [f64; 3],
}

impl HeterodyneSampler {
    fn new(state: &GaussianState, mode: usize) -> Result<Self> {
        state.require_mode(mode)?;
        let (q, p) = (2 * mode, 2 * mode + 1);
        let a = state.cov[(q, q)] + 0.5;
        let b = state.cov[(q, p)];
        let d = state.cov[(p, p)] + 0.5;
        let l11 = a.sqrt();
        let l21 = b / l11;
        let rest = d - l21 * l21;
        if !(rest > 0.0) {
            return Err(Error::Unphysical("heterodyne covariance not positive definite".into()));
        }
        Ok(Self { mean: [state.mean[q], state.mean[p]], chol: [l11, l21, rest.sqrt()] })
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        let q = self.mean[0] + self.chol[0] * z1;
        let p = self.mean[1] + self.chol[1] * z1 + self.chol[2] * z2;
        Complex64::new(q, p) / std::f64::consts::SQRT_2
    }
}

/// `⟨α|ρ|α⟩` for the output of a coherent input sent through `channel`, with
/// the channel phase compensated up to `residual_phase`.
pub fn coherent_overlap_fidelity_with_phase(channel: &AttenuatorChannel, alpha: Complex64, residual_phase: f64) -> f64 {
    let m = channel.output_noise;
    let out = channel.eta.sqrt() * Complex64::from_polar(1.0, residual_phase) * alpha;
    (-(alpha - out).norm_sqr() / (m + 1.0)).exp() / (m + 1.0)
}

pub fn coherent_overlap_fidelity(channel: &AttenuatorChannel, alpha: Complex64) -> f64 {
    coherent_overlap_fidelity_with_phase(channel, alpha, 0.0)
}

/// Fidelity averaged over coherent inputs drawn from a thermal ensemble of
/// mean photon number `n_in`, phase compensated.
pub fn average_fidelity(channel: &AttenuatorChannel, n_in: f64) -> f64 {
    let loss_amp = 1.0 - channel.eta.sqrt();
    1.0 / (channel.output_noise + 1.0 + loss_amp * loss_amp * n_in)
}

/// Best average fidelity achievable by measure-and-prepare strategies.
pub fn classical_fidelity_bound(n_in: f64) -> f64 {
    (n_in + 1.0) / (2.0 * n_in + 1.0)
}

/// `⟨α|ρ|α⟩` for a single-mode Gaussian state, computed from its moments.
pub fn coherent_overlap(state: &GaussianState, mode: usize, alpha: Complex64) -> Result<f64> {
    state.require_mode(mode)?;
    let (q, p) = (2 * mode, 2 * mode + 1);
    let s = std::f64::consts::SQRT_2;
    let d = [state.mean[q] - s * alpha.re, state.mean[p] - s * alpha.im];
    let h = [state.cov[(q, q)] + 0.5, state.cov[(q, p)], state.cov[(p, p)] + 0.5];
    Ok(gaussian_overlap(d, h))
}

/// Plug-in estimate of `⟨α|ρ|α⟩` from heterodyne outcomes: fits the sample
/// mean and covariance of the outcomes and evaluates the Gaussian Q-function.
pub fn fidelity_from_heterodyne(samples: &[Complex64], alpha: Complex64) -> Result<f64> {
    if samples.len() < 3 {
        return Err(Error::InvalidParameter { name: "samples", reason: "at least 3 outcomes are needed".into() });
    }
    let s = std::f64::consts::SQRT_2;
    let n = samples.len() as f64;
    let (mq, mp) = samples.iter().fold((0.0, 0.0), |(a, b), z| (a + s * z.re, b + s * z.im));
    let (mq, mp) = (mq / n, mp / n);
    let mut h = [0.0; 3];
    for z in samples {
        let (dq, dp) = (s * z.re - mq, s * z.im - mp);
        h[0] += dq * dq;
        h[1] += dq * dp;
        h[2] += dp * dp;
    }
    for v in &mut h {
        *v /= n - 1.0;
    }
    Ok(gaussian_overlap([mq - s * alpha.re, mp - s * alpha.im], h))
}

/// `2π f(d)` for a 2D Gaussian density with covariance `[[h0, h1], [h1, h2]]`.
fn gaussian_overlap(d: [f64; 2], h: [f64; 3]) -> f64 {
    let det = h[0] * h[2] - h[1] * h[1];
    let quad = (h[2] * d[0] * d[0] - 2.0 * h[1] * d[0] * d[1] + h[0] * d[1] * d[1]) / det;
    (-0.5 * quad).exp() / det.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn chan(eta: f64, n: f64, phi: f64) -> AttenuatorChannel {
        AttenuatorChannel::new(eta, n, phi).unwrap()
    }

    #[test]
    fn identity_channel_preserves_state() {
        let s = make_state(StateKind::Coherent { alpha: Complex64::new(1.5, -0.3) }).unwrap();
        let out = apply_attenuator(&s, 0, &AttenuatorChannel::identity()).unwrap();
        for (a, b) in s.mean().iter().zip(out.mean()) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(s.covariance().sub(out.covariance()).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn zero_transmission_gives_thermal() {
        let s = make_state(StateKind::Coherent { alpha: Complex64::new(3.0, 1.0) }).unwrap();
        let out = apply_attenuator(&s, 0, &chan(0.0, 4.0, 0.3)).unwrap();
        assert!(out.mean().iter().all(|x| x.abs() < 1e-14));
        assert!((out.photon_number(0).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_unphysical() {
        let cov = RealMatrix::identity(2).scale(0.3);
        assert!(matches!(GaussianState::new(vec![0.0; 2], cov), Err(Error::Unphysical(_))));
        let cov = RealMatrix::from_rows(2, 2, vec![1.0, 0.5, 0.2, 1.0]).unwrap();
        assert!(GaussianState::new(vec![0.0; 2], cov).is_err());
    }

    #[test]
    fn thermal_symplectic_eigenvalue() {
        let s = make_state(StateKind::Thermal { n: 2.0 }).unwrap();
        let ev = s.symplectic_eigenvalues().unwrap();
        assert_eq!(ev.len(), 1);
        assert!((ev[0] - 2.5).abs() < 1e-12);
        let t = make_state(StateKind::TwoModeSqueezed { r: 0.8 }).unwrap();
        for v in t.symplectic_eigenvalues().unwrap() {
            assert!((v - 0.5).abs() < 1e-10);
        }
    }

    #[test]
    fn tmsv_log_negativity() {
        let r = 0.7;
        let s = make_state(StateKind::TwoModeSqueezed { r }).unwrap();
        let v = two_mode_verdict(&s, 0, 1).unwrap();
        assert!(v.entangled);
        assert!((v.log_negativity - 2.0 * r / std::f64::consts::LN_2).abs() < 1e-10);
    }

    #[test]
    fn tmsv_through_attenuator_boundary() {
        let s = make_state(StateKind::TwoModeSqueezed { r: 1.0 }).unwrap();
        let n = 9.0;
        let eta_star = n / (n + 1.0);
        for (eta, expect) in [(eta_star * 0.99, false), (eta_star + 0.01 * (1.0 - eta_star), true)] {
            let out = apply_attenuator(&s, 1, &chan(eta, n, 0.4)).unwrap();
            assert_eq!(two_mode_verdict(&out, 0, 1).unwrap().entangled, expect, "eta = {eta}");
        }
    }

    #[test]
    fn vacuum_heterodyne_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let v = GaussianState::vacuum(1);
        let xs = heterodyne_samples(&v, 0, 200_000, &mut rng).unwrap();
        let n = xs.len() as f64;
        let s = std::f64::consts::SQRT_2;
        let var_q = xs.iter().map(|z| (s * z.re).powi(2)).sum::<f64>() / n;
        let var_p = xs.iter().map(|z| (s * z.im).powi(2)).sum::<f64>() / n;
        // Standard error of a variance estimate of 1 is √(2/n) ≈ 3.2e-3.
        assert!((var_q - 1.0).abs() < 0.015 && (var_p - 1.0).abs() < 0.015);
    }

    #[test]
    fn fidelity_closed_forms() {
        assert!((coherent_overlap_fidelity(&AttenuatorChannel::identity(), Complex64::new(2.0, 1.0)) - 1.0).abs() < 1e-15);
        let c = chan(0.0, 10.0, 0.0);
        assert!((average_fidelity(&c, 50.0) - 1.0 / 61.0).abs() < 1e-15);
        assert!(average_fidelity(&c, 50.0) < classical_fidelity_bound(50.0));
        assert!((classical_fidelity_bound(0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn overlap_from_moments_matches_closed_form() {
        let c = chan(0.8, 3.0, 0.0);
        let alpha = Complex64::new(1.2, -0.7);
        let out = apply_attenuator(&make_state(StateKind::Coherent { alpha }).unwrap(), 0, &c).unwrap();
        let a = coherent_overlap(&out, 0, alpha).unwrap();
        assert!((a - coherent_overlap_fidelity(&c, alpha)).abs() < 1e-13);
    }

    #[test]
    fn heterodyne_fidelity_estimate() {
        let c = chan(0.99, 30.0, 0.0);
        let alpha = Complex64::new(2.0, 0.0);
        let out = apply_attenuator(&make_state(StateKind::Coherent { alpha }).unwrap(), 0, &c).unwrap();
        let exact = coherent_overlap_fidelity(&c, alpha);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let xs = heterodyne_samples(&out, 0, 100_000, &mut rng).unwrap();
        let est = fidelity_from_heterodyne(&xs, alpha).unwrap();
        assert!((est - exact).abs() / exact < 0.02, "{est} vs {exact}");
    }
}
