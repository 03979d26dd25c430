//! Run configuration, design maps, power maps, tabular artifacts and run
//! manifests.

mod design;
mod power;
mod tables;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bifurcation::HarmonicScale;
use crate::config::KeyValues;
use crate::error::{Error, Result};
use crate::hydro::{BuoyGeometry, NondimParams};
use crate::simulator::{IcPolicy, SimOptions};

pub use design::{
    build_design_map, critical_amplitudes, compatible, CriticalAmplitudes, DesignCell, DesignMap, Region,
    Verification,
};
pub use power::{power_map, PowerMap};
pub use tables::write_branch_csv;

/// Evenly spaced values `start, start + step, ..., <= end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl Grid {
    pub fn single(v: f64) -> Self {
        Self { start: v, end: v, step: 1.0 }
    }

    /// `a..b:s` or a single number.
    pub fn parse(s: &str) -> Result<Self> {
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("grid {s:?}: not a number: {t:?}")))
        };
        let g = match s.split_once("..") {
            None => Self::single(num(s)?),
            Some((a, rest)) => {
                let (b, step) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::Parse(format!("grid {s:?}: expected start..end:step")))?;
                Self {
                    start: num(a)?,
                    end: num(b)?,
                    step: num(step)?,
                }
            }
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.end.is_finite() && self.step.is_finite()) {
            return Err(Error::InvalidInput("grid bounds must be finite".into()));
        }
        if !(self.step > 0.0) || self.end < self.start {
            return Err(Error::InvalidInput(format!(
                "grid needs step > 0 and end >= start, got {}..{}:{}",
                self.start, self.end, self.step
            )));
        }
        Ok(())
    }

    /// Values rounded to 12 decimals so that grids print cleanly.
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.end - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n)
            .map(|k| ((self.start + k as f64 * self.step) * 1e12).round() / 1e12)
            .collect()
    }

    pub fn is_single(&self) -> bool {
        self.values().len() == 1
    }
}

/// Every key a configuration file may hold.
pub const CONFIG_KEYS: &[&str] = &[
    "R",
    "rho",
    "g",
    "m",
    "m_inf",
    "k1",
    "k3",
    "c",
    "R_L",
    "L",
    "delta1",
    "delta2",
    "omega_n",
    "gamma",
    "theta",
    "force_ratio",
    "xi_convention",
    "omega",
    "amp",
    "harmonic_scale",
    "steps_per_period",
    "discard",
    "window",
    "policy",
    "verify",
    "y_range",
    "ydot_range",
    "trajectory",
    "t_end",
    "dt",
    "impulse",
    "order",
    "hankel",
];

/// Parsed run settings. The merged key/value text is kept for hashing.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub values: KeyValues,
    pub params: NondimParams,
    pub geometry: BuoyGeometry,
    pub omegas: Grid,
    pub amplitudes: Grid,
    pub harmonic_scale: HarmonicScale,
    pub sim: SimOptions,
    pub policy: IcPolicy,
    /// Fraction of design-map cells checked by simulation.
    pub verify_fraction: f64,
    pub y_range: Grid,
    pub ydot_range: Grid,
}

impl RunConfig {
    pub fn from_key_values(kv: &KeyValues) -> Result<Self> {
        kv.check_keys(CONFIG_KEYS)?;
        let (params, geometry) = NondimParams::from_key_values(kv)?;
        let grid = |key: &str, default: &str| Grid::parse(kv.get(key).unwrap_or(default));
        let count = |key: &str, default: usize| -> Result<usize> {
            match kv.get(key) {
                None => Ok(default),
                Some(s) => s
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("{key}: expected a nonnegative integer, got {s:?}"))),
            }
        };
        let defaults = SimOptions::default();
        let sim = SimOptions {
            steps_per_period: count("steps_per_period", defaults.steps_per_period)?,
            discard_periods: count("discard", defaults.discard_periods)?,
            window_periods: count("window", defaults.window_periods)?,
        };
        sim.validate()?;
        let harmonic_scale = match kv.get("harmonic_scale") {
            None => HarmonicScale::default(),
            Some(s) => HarmonicScale::parse(s)
                .ok_or_else(|| Error::Parse(format!("harmonic_scale: expected forcing or natural, got {s:?}")))?,
        };
        let policy = match kv.get("policy") {
            None => IcPolicy::default(),
            Some(s) => IcPolicy::parse(s).ok_or_else(|| {
                Error::Parse(format!(
                    "policy: expected fixed-zero, continuation-up or continuation-down, got {s:?}"
                ))
            })?,
        };
        let verify_fraction = kv.f64("verify")?.unwrap_or(0.0);
        if !(0.0..=1.0).contains(&verify_fraction) {
            return Err(Error::InvalidInput(format!("verify must lie in [0, 1], got {verify_fraction}")));
        }
        let omegas = grid("omega", "0.2..2:0.01")?;
        if !(omegas.start > 0.0) {
            return Err(Error::InvalidInput("frequencies must be positive".into()));
        }
        let amplitudes = grid("amp", "0.1")?;
        if amplitudes.start < 0.0 {
            return Err(Error::InvalidInput("wave amplitudes must be nonnegative".into()));
        }
        Ok(Self {
            values: kv.clone(),
            params,
            geometry,
            omegas,
            amplitudes,
            harmonic_scale,
            sim,
            policy,
            verify_fraction,
            y_range: grid("y_range", "-0.3..0.3:0.006")?,
            ydot_range: grid("ydot_range", "-0.3..0.3:0.006")?,
        })
    }

    /// Configuration with reference parameters and the given overrides.
    pub fn with(pairs: &[(&str, &str)]) -> Result<Self> {
        let mut kv = KeyValues::default();
        for (k, v) in pairs {
            kv.set(k, *v);
        }
        Self::from_key_values(&kv)
    }

    /// Hex SHA-256 of the canonical configuration text.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.values.to_text().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// The single amplitude of commands that take one.
    pub fn amplitude(&self) -> Result<f64> {
        single(&self.amplitudes, "amp")
    }

    pub fn omega(&self) -> Result<f64> {
        single(&self.omegas, "omega")
    }
}

fn single(g: &Grid, key: &str) -> Result<f64> {
    if g.is_single() {
        Ok(g.start)
    } else {
        Err(Error::InvalidInput(format!("{key}: expected a single value, got a grid")))
    }
}

/// Run record written next to the artifacts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub config_hash: String,
    pub config: BTreeMap<String, String>,
    pub versions: BTreeMap<String, String>,
    pub threads: usize,
    pub artifacts: Vec<String>,
    /// Wall-clock seconds per phase.
    pub timings: BTreeMap<String, f64>,
    /// Per-run findings such as verification scores.
    pub notes: BTreeMap<String, String>,
}

impl Manifest {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        let mut versions = BTreeMap::new();
        versions.insert("bpwa".to_string(), env!("CARGO_PKG_VERSION").to_string());
        versions.insert("manifest".to_string(), "1".to_string());
        Self {
            command: command.to_string(),
            config_hash: config.hash(),
            config: config
                .values
                .keys()
                .map(|k| (k.to_string(), config.values.get(k).unwrap_or_default().to_string()))
                .collect(),
            versions,
            threads: rayon::current_num_threads(),
            artifacts: Vec::new(),
            timings: BTreeMap::new(),
            notes: BTreeMap::new(),
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(dir.join("manifest.json"), text + "\n")?;
        Ok(())
    }
}
