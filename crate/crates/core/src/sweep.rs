//! Spectral scans and parameter-space maps as CSV tables.

use crate::channel::{asymmetric_channel_at, asymmetric_ratio, channel_at, ratio_at, transparency_linewidth};
use crate::criteria::{classify_grid, grid_csv, FeasibilityPoint, GridSpec};
use crate::error::{check_finite, Error, Result};
use crate::model::{AsymmetricParams, DeviceGeometry, SymmetricParams};
use crate::parallel::map_indexed;
use crate::table::format_float;

pub const SPECTRUM_HEADER: &str = "omega,eta,output_noise,ratio,nonclassical";
pub const DEFAULT_SPECTRUM_POINTS: usize = 2001;
/// Default half-width of a spectral scan in units of the transparency linewidth.
pub const DEFAULT_SPECTRUM_SPAN: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralRow {
    pub omega: f64,
    pub eta: f64,
    pub output_noise: f64,
    pub ratio: f64,
    pub nonclassical: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralScan {
    pub rows: Vec<SpectralRow>,
    /// `±γ_eff/2` around resonance.
    pub window: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumSummary {
    pub peak_eta: f64,
    pub peak_eta_omega: f64,
    pub peak_ratio: f64,
    pub linewidth: f64,
    /// Extent of the contiguous nonclassical band around the peak, if any.
    pub nonclassical_band: Option<(f64, f64)>,
}

/// Symmetric scan range of `span` linewidths either side of resonance.
pub fn default_range(params: &SymmetricParams, span: f64) -> (f64, f64) {
    let w = span * transparency_linewidth(params);
    (-w, w)
}

pub fn spectrum_scan(params: &SymmetricParams, range: (f64, f64), n: usize, workers: usize) -> Result<SpectralScan> {
    params.validate()?;
    let (lo, hi) = range;
    check_finite("omega_min", lo)?;
    check_finite("omega_max", hi)?;
    if !(lo < hi && lo <= 0.0 && hi >= 0.0) {
        return Err(Error::InvalidParameter { name: "omega range", reason: format!("[{lo:e}, {hi:e}] must straddle 0") });
    }
    if n < 3 {
        return Err(Error::InvalidParameter { name: "points", reason: format!("{n} < 3") });
    }
    let rows = map_indexed(n, workers, |i| -> Result<SpectralRow> {
        let t = i as f64 / (n - 1) as f64;
        let omega = lo * (1.0 - t) + hi * t;
        let ch = channel_at(params, omega)?;
        let ratio = ratio_at(params, omega);
        Ok(SpectralRow { omega, eta: ch.eta, output_noise: ch.output_noise, ratio, nonclassical: ratio > 1.0 })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let half = transparency_linewidth(params) / 2.0;
    Ok(SpectralScan { rows, window: (-half, half) })
}

/// Effective linewidth of a two-system channel: the mean of the optically
/// broadened mechanical linewidths `γ_j + 4g_j²/κ_j`.
pub fn asymmetric_linewidth(params: &AsymmetricParams) -> f64 {
    params.systems.iter().map(|s| s.gamma + 4.0 * s.g * s.g / s.kappa).sum::<f64>() / 2.0
}

/// Spectral scan of a two-system channel; `omega` is the offset of the
/// laser-frame frequency from `ω_B,1`.
pub fn asymmetric_spectrum_scan(params: &AsymmetricParams, range: (f64, f64), n: usize, workers: usize) -> Result<SpectralScan> {
    params.validate()?;
    let (lo, hi) = range;
    check_finite("omega_min", lo)?;
    check_finite("omega_max", hi)?;
    if !(lo < hi && lo <= 0.0 && hi >= 0.0) {
        return Err(Error::InvalidParameter { name: "omega range", reason: format!("[{lo:e}, {hi:e}] must straddle 0") });
    }
    if n < 3 {
        return Err(Error::InvalidParameter { name: "points", reason: format!("{n} < 3") });
    }
    let center = params.systems[0].omega_b;
    let rows = map_indexed(n, workers, |i| -> Result<SpectralRow> {
        let t = i as f64 / (n - 1) as f64;
        let omega = lo * (1.0 - t) + hi * t;
        let (ch, _) = asymmetric_channel_at(params, center + omega)?;
        let ratio = asymmetric_ratio(params, center + omega);
        Ok(SpectralRow { omega, eta: ch.eta, output_noise: ch.output_noise, ratio, nonclassical: ratio > 1.0 })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let half = asymmetric_linewidth(params) / 2.0;
    Ok(SpectralScan { rows, window: (-half, half) })
}

impl SpectralScan {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SPECTRUM_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                format_float(r.omega),
                format_float(r.eta),
                format_float(r.output_noise),
                format_float(r.ratio),
                r.nonclassical
            ));
        }
        out
    }

    pub fn summary(&self) -> SpectrumSummary {
        let peak = self
            .rows
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.eta.total_cmp(&b.1.eta))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let peak_ratio = self.rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
        let nonclassical_band = if self.rows[peak].nonclassical {
            let mut a = peak;
            while a > 0 && self.rows[a - 1].nonclassical {
                a -= 1;
            }
            let mut b = peak;
            while b + 1 < self.rows.len() && self.rows[b + 1].nonclassical {
                b += 1;
            }
            Some((self.rows[a].omega, self.rows[b].omega))
        } else {
            None
        };
        SpectrumSummary {
            peak_eta: self.rows[peak].eta,
            peak_eta_omega: self.rows[peak].omega,
            peak_ratio,
            linewidth: self.window.1 - self.window.0,
            nonclassical_band,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    /// Quantum/classical classification.
    Fig2,
    /// Ratio map.
    S2,
    /// Optimal transmissivity.
    S3,
    /// Minimum measurement time.
    S4,
    /// Minimum probe power.
    S5,
}

impl FigureId {
    pub const ALL: [FigureId; 5] = [FigureId::Fig2, FigureId::S2, FigureId::S3, FigureId::S4, FigureId::S5];

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fig2" => Ok(Self::Fig2),
            "s2" => Ok(Self::S2),
            "s3" => Ok(Self::S3),
            "s4" => Ok(Self::S4),
            "s5" => Ok(Self::S5),
            _ => Err(Error::Config(format!("unknown figure `{s}` (expected fig2, s2, s3, s4 or s5)"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Fig2 => "fig2",
            Self::S2 => "s2",
            Self::S3 => "s3",
            Self::S4 => "s4",
            Self::S5 => "s5",
        }
    }

    /// Column this figure is drawn from.
    pub fn column(self) -> &'static str {
        match self {
            Self::Fig2 => "classification",
            Self::S2 => "ratio",
            Self::S3 => "eta_opt",
            Self::S4 => "tau_min_s",
            Self::S5 => "P_min_W",
        }
    }
}

#[derive(Debug, Clone)]
pub struct FigureGrid {
    pub figure: FigureId,
    pub spec: GridSpec,
    pub points: Vec<FeasibilityPoint>,
}

impl FigureGrid {
    pub fn to_csv(&self) -> String {
        grid_csv(&self.points)
    }

    /// Point whose grid cell contains `(omega_b, q)` in log coordinates.
    pub fn nearest(&self, omega_b: f64, q: f64) -> Option<&FeasibilityPoint> {
        let wi = nearest_index(&self.spec.omega_axis(), omega_b)?;
        let qi = nearest_index(&self.spec.q_axis(), q)?;
        self.points.get(wi * self.spec.n_q + qi)
    }
}

fn nearest_index(axis: &[f64], x: f64) -> Option<usize> {
    axis.iter()
        .enumerate()
        .min_by(|a, b| (a.1.ln() - x.ln()).abs().total_cmp(&(b.1.ln() - x.ln()).abs()))
        .map(|(i, _)| i)
}

/// Every figure carries the full grid schema; the id only selects which
/// column the figure is drawn from.
pub fn figure_grid(figure: FigureId, device: &DeviceGeometry, spec: &GridSpec, workers: usize) -> Result<FigureGrid> {
    let points = classify_grid(spec, device, workers)?;
    for p in &points {
        let quantum = p.classification == crate::criteria::Classification::Quantum;
        if quantum != (p.ratio > 1.0) || !(0.0..=1.0).contains(&p.eta_opt) {
            return Err(Error::Unphysical(format!("inconsistent grid row at omega_B = {:e}, Q = {:e}", p.omega_b, p.q)));
        }
    }
    Ok(FigureGrid { figure, spec: *spec, points })
}
