//! Simulated verification protocols for an attenuator channel.
//!
//! Sampling is split into fixed-size chunks, each with its own ChaCha stream
//! derived from the seed, so results do not depend on the worker count.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::channel::{channel_at, AttenuatorChannel};
use crate::error::{check_non_negative, check_positive, Error, Result};
use crate::gaussian::{self, GaussianState, StateKind};
use crate::model::SymmetricParams;
use crate::parallel::map_indexed;

const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Nonclassical,
    Classical,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    Probe,
    Benchmark,
    Entanglement,
}

impl ProtocolKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "probe" | "1" => Ok(Self::Probe),
            "benchmark" | "2" => Ok(Self::Benchmark),
            "entanglement" | "3" => Ok(Self::Entanglement),
            _ => Err(Error::Config(format!("unknown protocol `{s}` (expected probe, benchmark or entanglement)"))),
        }
    }
}

/// How the benchmark protocol turns each input into a fidelity value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FidelityEstimator {
    /// Exact overlap for the sampled coherent input.
    Analytic,
    /// Moment fit to simulated heterodyne outcomes of the output.
    Sampling,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChannelSummary {
    pub eta: f64,
    #[serde(rename = "N")]
    pub n: f64,
    pub phi: f64,
    pub omega: f64,
}

impl From<&AttenuatorChannel> for ChannelSummary {
    fn from(c: &AttenuatorChannel) -> Self {
        Self { eta: c.eta, n: c.n_eff, phi: c.phi, omega: c.omega }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProtocolReport {
    pub protocol: ProtocolKind,
    pub channel: ChannelSummary,
    pub estimates: BTreeMap<String, f64>,
    pub verdict: Verdict,
    pub seed: u64,
    pub samples: u64,
}

impl ProtocolReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone)]
pub struct ProtocolOptions {
    /// Coherent probe amplitudes for the probe protocol.
    pub amplitudes: Vec<Complex64>,
    /// Heterodyne shots per probe amplitude, or per input for sampling benchmarks.
    pub shots: usize,
    /// Mean photon number of the benchmark input ensemble.
    pub n_in: f64,
    pub inputs: usize,
    pub estimator: FidelityEstimator,
    /// Squeeze parameter of the two-mode state for the entanglement protocol.
    pub squeezing: f64,
    /// Confidence multiplier on the standard error.
    pub k: f64,
    pub seed: u64,
    pub workers: usize,
}

impl Default for ProtocolOptions {
    fn default() -> Self {
        let a = 100.0;
        Self {
            amplitudes: vec![
                Complex64::new(a, 0.0),
                Complex64::new(0.0, a),
                Complex64::new(-a, 0.0),
                Complex64::new(0.0, -a),
            ],
            shots: 10_000,
            n_in: 50.0,
            inputs: 100_000,
            estimator: FidelityEstimator::Analytic,
            squeezing: 1.0,
            k: 3.0,
            seed: 0,
            workers: 1,
        }
    }
}

impl ProtocolOptions {
    fn validate(&self) -> Result<()> {
        check_positive("k", self.k)?;
        check_non_negative("n_in", self.n_in)?;
        check_non_negative("squeezing", self.squeezing)?;
        for a in &self.amplitudes {
            if !(a.re.is_finite() && a.im.is_finite()) {
                return Err(Error::InvalidParameter { name: "amplitudes", reason: format!("{a} is not finite") });
            }
        }
        Ok(())
    }
}

fn chunk_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Fits transmission and added noise from coherent probes.
pub fn probe(channel: &AttenuatorChannel, opts: &ProtocolOptions) -> Result<ProtocolReport> {
    opts.validate()?;
    let mut tasks = Vec::new();
    for (ai, &alpha) in opts.amplitudes.iter().enumerate() {
        for (ci, start) in (0..opts.shots).step_by(CHUNK).enumerate() {
            tasks.push((ai, alpha, ci, CHUNK.min(opts.shots - start)));
        }
    }
    let outputs: Vec<GaussianState> = opts
        .amplitudes
        .iter()
        .map(|&alpha| gaussian::apply_attenuator(&gaussian::make_state(StateKind::Coherent { alpha })?, 0, channel))
        .collect::<Result<_>>()?;
    let chunks = map_indexed(tasks.len(), opts.workers, |i| {
        let (ai, alpha, ci, len) = tasks[i];
        let mut rng = chunk_rng(opts.seed, ((ai as u64) << 32) | ci as u64);
        gaussian::heterodyne_samples(&outputs[ai], 0, len, &mut rng).map(|b| (alpha, b))
    });
    let mut pairs = Vec::with_capacity(opts.amplitudes.len() * opts.shots);
    for chunk in chunks {
        let (alpha, betas) = chunk?;
        pairs.extend(betas.into_iter().map(|b| (alpha, b)));
    }

    let n = pairs.len() as f64;
    let power: f64 = pairs.iter().map(|(a, _)| a.norm_sqr()).sum();
    let mut estimates = BTreeMap::new();
    let verdict = if pairs.len() < 2 || power == 0.0 {
        Verdict::Inconclusive
    } else {
        let cross: Complex64 = pairs.iter().map(|(a, b)| a.conj() * b).sum();
        let t = cross / power;
        let eta = t.norm_sqr();
        let noise = pairs.iter().map(|(a, b)| (b - t * a).norm_sqr()).sum::<f64>() / n;
        let m = noise - 1.0;
        let se_t = (noise / (2.0 * power)).sqrt();
        let se_eta = 2.0 * t.norm() * se_t;
        let se_m = noise / n.sqrt();
        let stat = eta - m;
        let se_stat = (se_eta * se_eta + se_m * se_m).sqrt();
        estimates.insert("eta".into(), eta);
        estimates.insert("eta_se".into(), se_eta);
        estimates.insert("added_noise".into(), m);
        estimates.insert("added_noise_se".into(), se_m);
        estimates.insert("phase".into(), t.arg());
        estimates.insert("statistic".into(), stat);
        estimates.insert("statistic_se".into(), se_stat);
        if m > 0.0 {
            estimates.insert("ratio".into(), eta / m);
        }
        if t.norm() <= opts.k * se_t {
            Verdict::Inconclusive
        } else if stat > opts.k * se_stat {
            Verdict::Nonclassical
        } else if stat < -opts.k * se_stat {
            Verdict::Classical
        } else {
            Verdict::Inconclusive
        }
    };
    Ok(ProtocolReport {
        protocol: ProtocolKind::Probe,
        channel: channel.into(),
        estimates,
        verdict,
        seed: opts.seed,
        samples: pairs.len() as u64,
    })
}

/// Average coherent-state fidelity against the measure-and-prepare bound.
pub fn benchmark(channel: &AttenuatorChannel, opts: &ProtocolOptions) -> Result<ProtocolReport> {
    opts.validate()?;
    if opts.inputs < 2 {
        return Err(Error::InvalidParameter { name: "inputs", reason: "at least 2 inputs are needed".into() });
    }
    if opts.estimator == FidelityEstimator::Sampling && opts.shots < 3 {
        return Err(Error::InvalidParameter { name: "shots", reason: "sampling estimator needs at least 3 shots".into() });
    }
    // The receiver undoes the known channel phase.
    let compensated = AttenuatorChannel { phi: 0.0, ..*channel };
    let n_chunks = opts.inputs.div_ceil(CHUNK);
    let width = (opts.n_in / 2.0).sqrt();
    let chunks = map_indexed(n_chunks, opts.workers, |ci| -> Result<(f64, f64)> {
        let mut rng = chunk_rng(opts.seed, ci as u64);
        let len = CHUNK.min(opts.inputs - ci * CHUNK);
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..len {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            let alpha = Complex64::new(width * re, width * im);
            let f = match opts.estimator {
                FidelityEstimator::Analytic => gaussian::coherent_overlap_fidelity(&compensated, alpha),
                FidelityEstimator::Sampling => {
                    let input = gaussian::make_state(StateKind::Coherent { alpha })?;
                    let out = gaussian::apply_attenuator(&input, 0, &compensated)?;
                    let xs = gaussian::heterodyne_samples(&out, 0, opts.shots, &mut rng)?;
                    gaussian::fidelity_from_heterodyne(&xs, alpha)?
                }
            };
            sum += f;
            sum_sq += f * f;
        }
        Ok((sum, sum_sq))
    });
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for c in chunks {
        let (s, s2) = c?;
        sum += s;
        sum_sq += s2;
    }
    let n = opts.inputs as f64;
    let mean = sum / n;
    let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    let se = (var / n).sqrt();
    let bound = gaussian::classical_fidelity_bound(opts.n_in);
    let verdict = if mean > bound + opts.k * se {
        Verdict::Nonclassical
    } else if mean < bound - opts.k * se {
        Verdict::Classical
    } else {
        Verdict::Inconclusive
    };
    let mut estimates = BTreeMap::new();
    estimates.insert("fidelity".into(), mean);
    estimates.insert("fidelity_se".into(), se);
    estimates.insert("classical_bound".into(), bound);
    estimates.insert("n_in".into(), opts.n_in);
    let samples = match opts.estimator {
        FidelityEstimator::Analytic => opts.inputs,
        FidelityEstimator::Sampling => opts.inputs * opts.shots,
    };
    Ok(ProtocolReport {
        protocol: ProtocolKind::Benchmark,
        channel: channel.into(),
        estimates,
        verdict,
        seed: opts.seed,
        samples: samples as u64,
    })
}

/// Sends one arm of a two-mode squeezed vacuum through the channel and applies
/// the partial-transpose test to the result.
pub fn entanglement(channel: &AttenuatorChannel, opts: &ProtocolOptions) -> Result<ProtocolReport> {
    opts.validate()?;
    let tmsv = gaussian::make_state(StateKind::TwoModeSqueezed { r: opts.squeezing })?;
    let out = gaussian::apply_attenuator(&tmsv, 1, channel)?;
    let v = gaussian::two_mode_verdict(&out, 0, 1)?;
    let mut estimates = BTreeMap::new();
    estimates.insert("log_negativity".into(), v.log_negativity);
    estimates.insert("nu_tilde_minus".into(), v.nu_tilde_minus);
    estimates.insert("squeezing".into(), opts.squeezing);
    Ok(ProtocolReport {
        protocol: ProtocolKind::Entanglement,
        channel: channel.into(),
        estimates,
        verdict: if v.entangled { Verdict::Nonclassical } else { Verdict::Classical },
        seed: opts.seed,
        samples: 0,
    })
}

pub fn run(kind: ProtocolKind, channel: &AttenuatorChannel, opts: &ProtocolOptions) -> Result<ProtocolReport> {
    match kind {
        ProtocolKind::Probe => probe(channel, opts),
        ProtocolKind::Benchmark => benchmark(channel, opts),
        ProtocolKind::Entanglement => entanglement(channel, opts),
    }
}

/// Runs a protocol on the channel the model predicts at optimal coupling on
/// resonance.
pub fn end_to_end(params: &SymmetricParams, kind: ProtocolKind, opts: &ProtocolOptions) -> Result<ProtocolReport> {
    let channel = channel_at(&params.at_optimal_coupling(), 0.0)?;
    run(kind, &channel, opts)
}
