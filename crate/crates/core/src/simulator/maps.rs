use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{classify, steady_response, FullState, MotionLabel, SimOptions};
use crate::era::fmt_num;
use crate::error::{Error, Result};
use crate::hydro::NondimParams;

/// Integer codes of a basin map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BasinLabel {
    IntraLower = 0,
    IntraUpper = 1,
    SymmetricP1 = 2,
    AsymmetricP1 = 3,
    Subharmonic = 4,
    Chaotic = 5,
    /// The run blew up.
    Diverged = 6,
}

impl BasinLabel {
    pub fn code(&self) -> u8 {
        *self as u8
    }

    pub fn from_motion(label: MotionLabel, mean_offset: f64) -> Self {
        match label {
            MotionLabel::P1Intra if mean_offset < 0.0 => BasinLabel::IntraLower,
            MotionLabel::P1Intra => BasinLabel::IntraUpper,
            MotionLabel::P1InterSymmetric => BasinLabel::SymmetricP1,
            MotionLabel::P1InterAsymmetric => BasinLabel::AsymmetricP1,
            MotionLabel::Periodic(_) => BasinLabel::Subharmonic,
            MotionLabel::Chaotic => BasinLabel::Chaotic,
        }
    }
}

/// Attractor labels over a grid of initial `(Y, Y')`; `labels[i][j]`
/// belongs to `ydots[i]`, `ys[j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinMap {
    pub ys: Vec<f64>,
    pub ydots: Vec<f64>,
    pub labels: Vec<Vec<BasinLabel>>,
}

impl BasinMap {
    /// Distinct labels present, sorted.
    pub fn distinct(&self) -> Vec<BasinLabel> {
        let mut v: Vec<BasinLabel> = self.labels.iter().flatten().copied().collect();
        v.sort();
        v.dedup();
        v
    }

    /// Integer matrix, one row per `Y'` value.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for row in &self.labels {
            let line: Vec<String> = row.iter().map(|l| l.code().to_string()).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }
}

fn classify_from(
    params: &NondimParams,
    omega: f64,
    g_wave: f64,
    init: &FullState,
    opts: &SimOptions,
) -> Result<BasinLabel> {
    match steady_response(params, omega, g_wave, init, opts) {
        Ok(tr) => {
            let c = classify(&tr, omega, params)?;
            Ok(BasinLabel::from_motion(c.label, c.mean_offset))
        }
        Err(Error::Divergence { .. }) => Ok(BasinLabel::Diverged),
        Err(e) => Err(e),
    }
}

/// Classifies the attractor reached from every initial condition of the
/// grid. Rows run in parallel.
pub fn basin_map(
    params: &NondimParams,
    omega: f64,
    g_wave: f64,
    ys: &[f64],
    ydots: &[f64],
    opts: &SimOptions,
) -> Result<BasinMap> {
    if ys.is_empty() || ydots.is_empty() {
        return Err(Error::InvalidInput("basin grid must be nonempty".into()));
    }
    let rows: Vec<Result<Vec<BasinLabel>>> = ydots
        .par_iter()
        .map(|&yd| {
            ys.iter()
                .map(|&y| classify_from(params, omega, g_wave, &FullState::new(y, yd), opts))
                .collect()
        })
        .collect();
    Ok(BasinMap {
        ys: ys.to_vec(),
        ydots: ydots.to_vec(),
        labels: rows.into_iter().collect::<Result<_>>()?,
    })
}

/// How each frequency of a sweep is started.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum IcPolicy {
    /// Every run starts from rest at `Y = 0`.
    #[default]
    FixedZero,
    /// Increasing frequency, each run seeded by the previous final state.
    ContinuationUp,
    /// Decreasing frequency, seeded likewise.
    ContinuationDown,
}

impl IcPolicy {
    pub fn label(&self) -> &'static str {
        match self {
            IcPolicy::FixedZero => "fixed-zero",
            IcPolicy::ContinuationUp => "continuation-up",
            IcPolicy::ContinuationDown => "continuation-down",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "fixed-zero" => Some(IcPolicy::FixedZero),
            "continuation-up" => Some(IcPolicy::ContinuationUp),
            "continuation-down" => Some(IcPolicy::ContinuationDown),
            _ => None,
        }
    }
}

/// Steady strobe samples and verdict at one frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub omega: f64,
    pub g_wave: f64,
    /// `Y` at every strobe time of the window; empty if the run diverged.
    pub strobe_y: Vec<f64>,
    pub label: Option<MotionLabel>,
    pub clusters: usize,
    pub p_avg: f64,
    pub final_state: FullState,
}

fn sweep_point(
    params: &NondimParams,
    amplitude_ratio: f64,
    omega: f64,
    init: &FullState,
    opts: &SimOptions,
) -> Result<SweepRow> {
    let g = params.g_wave(amplitude_ratio, omega)?;
    let tr = match steady_response(params, omega, g, init, opts) {
        Ok(tr) => tr,
        Err(Error::Divergence { .. }) => {
            return Ok(SweepRow {
                omega,
                g_wave: g,
                strobe_y: Vec::new(),
                label: None,
                clusters: 0,
                p_avg: f64::NAN,
                final_state: FullState::default(),
            })
        }
        Err(e) => return Err(e),
    };
    let c = classify(&tr, omega, params)?;
    let p_avg = super::numeric_power(&tr, omega, params, opts.window_periods)?;
    Ok(SweepRow {
        omega,
        g_wave: g,
        strobe_y: c.strobe_points.iter().map(|p| p[0]).collect(),
        label: Some(c.label),
        clusters: c.clusters,
        p_avg,
        final_state: FullState::from_slice(tr.last().unwrap_or(&[0.0; 6]))?,
    })
}

/// Stroboscopic bifurcation diagram at fixed `A/R`. Rows come back in the
/// order of `omegas`; continuation policies walk the grid in the stated
/// direction and are sequential, fixed starts run in parallel.
pub fn frequency_sweep(
    params: &NondimParams,
    amplitude_ratio: f64,
    omegas: &[f64],
    policy: IcPolicy,
    opts: &SimOptions,
) -> Result<Vec<SweepRow>> {
    opts.validate()?;
    match policy {
        IcPolicy::FixedZero => omegas
            .par_iter()
            .map(|&w| sweep_point(params, amplitude_ratio, w, &FullState::default(), opts))
            .collect(),
        IcPolicy::ContinuationUp | IcPolicy::ContinuationDown => {
            let mut order: Vec<usize> = (0..omegas.len()).collect();
            order.sort_by(|&a, &b| omegas[a].total_cmp(&omegas[b]));
            if policy == IcPolicy::ContinuationDown {
                order.reverse();
            }
            let mut rows: Vec<Option<SweepRow>> = vec![None; omegas.len()];
            let mut seed = FullState::default();
            for i in order {
                let row = sweep_point(params, amplitude_ratio, omegas[i], &seed, opts)?;
                seed = if row.label.is_some() { row.final_state } else { FullState::default() };
                rows[i] = Some(row);
            }
            Ok(rows.into_iter().flatten().collect())
        }
    }
}

/// `Omega,Y_strobe` rows.
pub fn write_strobe_csv<W: Write>(mut out: W, rows: &[SweepRow]) -> Result<()> {
    writeln!(out, "Omega,Y_strobe")?;
    for r in rows {
        for y in &r.strobe_y {
            writeln!(out, "{},{}", fmt_num(r.omega), fmt_num(*y))?;
        }
    }
    Ok(())
}
