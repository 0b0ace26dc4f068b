//! Flat `key = value` run configuration.
//!
//! Lines are `key = value`; `#` starts a comment. Per-system keys accept `_1`
//! and `_2` suffixes, which switch the model to two distinct systems. Every
//! value that is read, including defaults, is recorded so a run can write a
//! manifest that reproduces it.

use std::cell::RefCell;
use std::collections::BTreeMap;

use crate::channel::asymmetric_optimum;
use crate::error::{Error, Result};
use crate::model::{thermal_occupation, AsymmetricParams, DeviceGeometry, SymmetricParams, SystemParams, CONSTANTS};
use crate::table::format_float;

/// Keys describing one optomechanical system.
const SYSTEM_KEYS: [&str; 7] = ["omega_B", "gamma", "kappa", "g", "Delta", "temperature_K", "N_T"];

const GLOBAL_KEYS: [&str; 27] = [
    "lambda",
    "rwa_margin",
    "seed",
    "omega_min",
    "omega_max",
    "points",
    "rho",
    "radius",
    "distance",
    "omega_B_min",
    "omega_B_max",
    "Q_min",
    "Q_max",
    "n_omega",
    "n_Q",
    "omega_A",
    "amplitude",
    "probe_phases",
    "shots",
    "N_in",
    "inputs",
    "squeezing",
    "k",
    "estimator",
    "mean_field_tolerance",
    "coefficient_tolerance",
    "omega",
];

fn is_known(key: &str) -> bool {
    if GLOBAL_KEYS.contains(&key) || SYSTEM_KEYS.contains(&key) {
        return true;
    }
    match key.rsplit_once('_') {
        Some((base, "1" | "2")) => SYSTEM_KEYS.contains(&base),
        _ => false,
    }
}

#[derive(Debug, Clone, Default)]
pub struct Config {
    entries: BTreeMap<String, String>,
    resolved: RefCell<BTreeMap<String, String>>,
}

/// Model described by a configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelParams {
    Symmetric(SymmetricParams),
    Asymmetric(AsymmetricParams),
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`, got `{line}`", i + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if cfg.entries.contains_key(k) {
                return Err(Error::Config(format!("line {}: duplicate key `{k}`", i + 1)));
            }
            cfg.insert(k, v)?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn insert(&mut self, k: &str, v: &str) -> Result<()> {
        if !is_known(k) {
            return Err(Error::Config(format!("unknown key `{k}`")));
        }
        if v.is_empty() {
            return Err(Error::Config(format!("key `{k}` has no value")));
        }
        self.entries.insert(k.to_string(), v.to_string());
        Ok(())
    }

    /// Applies a `key=value` override, replacing any existing value.
    pub fn apply_override(&mut self, spec: &str) -> Result<()> {
        let (k, v) = spec
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{spec}` is not `key=value`")))?;
        self.insert(k.trim(), v.trim())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn record(&self, key: &str, value: String) {
        self.resolved.borrow_mut().insert(key.to_string(), value);
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>> {
        let Some(raw) = self.entries.get(key) else { return Ok(None) };
        let v: f64 = raw
            .parse()
            .map_err(|_| Error::Config(format!("key `{key}`: `{raw}` is not a number")))?;
        if !v.is_finite() {
            return Err(Error::Config(format!("key `{key}`: `{raw}` is not finite")));
        }
        self.record(key, format_float(v));
        Ok(Some(v))
    }

    pub fn require_f64(&self, key: &str) -> Result<f64> {
        self.f64(key)?.ok_or_else(|| Error::Config(format!("missing key `{key}`")))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        let v = self.f64(key)?.unwrap_or(default);
        self.record(key, format_float(v));
        Ok(v)
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        let v = match self.entries.get(key) {
            None => default,
            Some(raw) => {
                // Accept `1e4`-style counts as long as they are whole.
                let x: f64 = raw
                    .parse()
                    .map_err(|_| Error::Config(format!("key `{key}`: `{raw}` is not a count")))?;
                if !(x >= 0.0 && x.fract() == 0.0 && x <= 1e15) {
                    return Err(Error::Config(format!("key `{key}`: `{raw}` is not a count")));
                }
                x as usize
            }
        };
        self.record(key, v.to_string());
        Ok(v)
    }

    pub fn u64(&self, key: &str) -> Result<Option<u64>> {
        let Some(raw) = self.entries.get(key) else { return Ok(None) };
        let v = raw
            .parse()
            .map_err(|_| Error::Config(format!("key `{key}`: `{raw}` is not an unsigned integer")))?;
        self.record(key, raw.clone());
        Ok(Some(v))
    }

    pub fn string_or(&self, key: &str, default: &str) -> String {
        let v = self.entries.get(key).cloned().unwrap_or_else(|| default.to_string());
        self.record(key, v.clone());
        v
    }

    /// Records a value the run settled on that is not itself a key lookup,
    /// such as a command-line seed.
    pub fn set_resolved(&self, key: &str, value: String) {
        self.record(key, value);
    }

    /// Whether any key carries a `_1`/`_2` system suffix.
    pub fn is_asymmetric(&self) -> bool {
        self.entries.keys().any(|k| matches!(k.rsplit_once('_'), Some((b, "1" | "2")) if SYSTEM_KEYS.contains(&b)))
    }

    fn system_f64(&self, base: &str, which: Option<usize>) -> Result<Option<f64>> {
        if let Some(j) = which {
            let key = format!("{base}_{}", j + 1);
            if let Some(v) = self.f64(&key)? {
                return Ok(Some(v));
            }
        }
        self.f64(base)
    }

    fn occupation(&self, omega_b: f64, which: Option<usize>) -> Result<f64> {
        let n = self.system_f64("N_T", which)?;
        let t = self.system_f64("temperature_K", which)?;
        let suffix = which.map(|j| format!("_{}", j + 1)).unwrap_or_default();
        match (n, t) {
            (Some(_), Some(_)) => Err(Error::Config(format!("give either `temperature_K{suffix}` or `N_T{suffix}`, not both"))),
            (Some(n), None) => Ok(n),
            (None, Some(t)) => thermal_occupation(omega_b, t),
            (None, None) => Err(Error::Config(format!("missing key `temperature_K{suffix}` or `N_T{suffix}`"))),
        }
    }

    fn required_system(&self, base: &str, which: Option<usize>) -> Result<f64> {
        self.system_f64(base, which)?.ok_or_else(|| {
            let name = match which {
                Some(j) => format!("{base}_{}", j + 1),
                None => base.to_string(),
            };
            Error::Config(format!("missing key `{name}`"))
        })
    }

    pub fn symmetric(&self) -> Result<SymmetricParams> {
        let omega_b = self.required_system("omega_B", None)?;
        let gamma = self.required_system("gamma", None)?;
        let kappa = self.required_system("kappa", None)?;
        let lambda = self.require_f64("lambda")?;
        let n_thermal = self.occupation(omega_b, None)?;
        let mut p = SymmetricParams::new(omega_b, gamma, kappa, 0.0, lambda, n_thermal)?;
        p.g = match self.f64("g")? {
            Some(g) => g,
            None => p.g_opt(),
        };
        if let Some(d) = self.f64("Delta")? {
            p.delta = d;
        }
        p.validate()?;
        self.record("g", format_float(p.g));
        self.record("N_T", format_float(p.n_thermal));
        Ok(p)
    }

    /// Two-system model. Missing couplings and detunings are filled with the
    /// tuned optimum at `ω = ω_B,1`.
    pub fn asymmetric(&self) -> Result<AsymmetricParams> {
        let mut systems = [SystemParams { omega_b: 0.0, gamma: 0.0, kappa: 0.0, g: 0.0, delta: 0.0, n_thermal: 0.0 }; 2];
        let mut missing = [[false; 2]; 2];
        for (j, s) in systems.iter_mut().enumerate() {
            s.omega_b = self.required_system("omega_B", Some(j))?;
            s.gamma = self.required_system("gamma", Some(j))?;
            s.kappa = self.required_system("kappa", Some(j))?;
            s.n_thermal = self.occupation(s.omega_b, Some(j))?;
            match self.system_f64("g", Some(j))? {
                Some(g) => s.g = g,
                None => missing[j][0] = true,
            }
            match self.system_f64("Delta", Some(j))? {
                Some(d) => s.delta = d,
                None => {
                    s.delta = s.omega_b;
                    missing[j][1] = true;
                }
            }
        }
        let lambda = self.require_f64("lambda")?;
        let mut p = AsymmetricParams::new(systems[0], systems[1], lambda)?;
        if missing.iter().flatten().any(|m| *m) {
            let tuned = asymmetric_optimum(&p)?.apply(&p);
            for ((sys, tuned), [no_g, no_delta]) in p.systems.iter_mut().zip(tuned.systems).zip(missing) {
                if no_g {
                    sys.g = tuned.g;
                }
                if no_delta {
                    sys.delta = tuned.delta;
                }
            }
        }
        p.validate()?;
        for (j, s) in p.systems.iter().enumerate() {
            for (k, v) in [("g", s.g), ("Delta", s.delta), ("N_T", s.n_thermal)] {
                self.record(&format!("{k}_{}", j + 1), format_float(v));
            }
        }
        Ok(p)
    }

    pub fn model(&self) -> Result<ModelParams> {
        if self.is_asymmetric() {
            self.asymmetric().map(ModelParams::Asymmetric)
        } else {
            self.symmetric().map(ModelParams::Symmetric)
        }
    }

    /// Sphere pair for parameter-space maps; touching gold spheres at 1 mK
    /// unless overridden.
    pub fn device(&self) -> Result<DeviceGeometry> {
        let rho = self.f64_or("rho", CONSTANTS.rho_gold)?;
        let radius = self.f64_or("radius", 1e-3)?;
        let temperature = self.f64_or("temperature_K", 1e-3)?;
        let distance = self.f64_or("distance", 2.0 * radius)?;
        DeviceGeometry::spheres(radius, rho, distance, temperature)
    }

    /// Keys actually used by the run, with defaults and derived model
    /// values filled in. Derived values that are not inputs (`N_T` computed
    /// from a temperature, tuned couplings) appear as comments so the
    /// manifest stays a valid configuration that reproduces the run.
    pub fn manifest(&self, header: &[(&str, String)]) -> String {
        let mut out = String::new();
        for (k, v) in header {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        let resolved = self.resolved.borrow();
        let mut keys: Vec<&String> = resolved.keys().collect();
        keys.sort();
        for k in keys {
            let v = &resolved[k];
            let given = self.entries.contains_key(k.as_str());
            let derived = !given && self.conflicts_if_written(k);
            if derived {
                out.push_str(&format!("# {k} = {v}\n"));
            } else {
                out.push_str(&format!("{k} = {v}\n"));
            }
        }
        out
    }

    /// Whether writing `key` back would change or invalidate the config.
    fn conflicts_if_written(&self, key: &str) -> bool {
        let (base, suffix) = match key.rsplit_once('_') {
            Some((b, s @ ("1" | "2"))) if SYSTEM_KEYS.contains(&b) => (b, Some(s)),
            _ => (key, None),
        };
        match base {
            "N_T" => {
                let t = match suffix {
                    Some(s) => format!("temperature_K_{s}"),
                    None => "temperature_K".into(),
                };
                self.entries.contains_key(&t) || self.entries.contains_key("temperature_K")
            }
            // Couplings and detunings written in a two-system manifest would
            // pin the tuned point; they reproduce it exactly, so they are kept.
            _ => false,
        }
    }
}
