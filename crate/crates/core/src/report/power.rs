use std::io::Write;

use rayon::prelude::*;

use super::RunConfig;
use crate::era::fmt_num;
use crate::error::{Error, Result};
use crate::simulator::{numeric_power, steady_response, FullState};

/// Simulated mean power over the `(A/R, W)` grid; `NaN` marks cells whose
/// run diverged or whose forcing is undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerMap {
    pub amplitudes: Vec<f64>,
    pub omegas: Vec<f64>,
    /// One row per amplitude.
    pub power: Vec<Vec<f64>>,
}

impl PowerMap {
    /// `A_over_R,Omega,P_avg` rows; missing cells are written as `NaN`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "A_over_R,Omega,P_avg")?;
        for (a, row) in self.amplitudes.iter().zip(&self.power) {
            for (w, p) in self.omegas.iter().zip(row) {
                writeln!(out, "{},{},{}", fmt_num(*a), fmt_num(*w), fmt_num(*p))?;
            }
        }
        Ok(())
    }

    /// Mean of the finite cells of row `i` at the given frequencies.
    pub fn mean_over(&self, i: usize, omegas: &[f64]) -> Option<f64> {
        let vals: Vec<f64> = self.omegas
            .iter()
            .zip(&self.power[i])
            .filter(|(w, p)| p.is_finite() && omegas.iter().any(|o| (*o - **w).abs() < 1e-9))
            .map(|(_, p)| *p)
            .collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    }
}

/// Numeric power from rest at `Y = 0` in every cell.
pub fn power_map(cfg: &RunConfig) -> Result<PowerMap> {
    let params = &cfg.params;
    let amplitudes = cfg.amplitudes.values();
    let omegas = cfg.omegas.values();
    let cells: Vec<(f64, f64)> = amplitudes
        .iter()
        .flat_map(|&a| omegas.iter().map(move |&w| (a, w)))
        .collect();
    let values: Vec<Result<f64>> = cells
        .par_iter()
        .map(|&(a, w)| {
            let g = match params.g_wave(a, w) {
                Ok(g) => g,
                Err(Error::KernelValidity { .. }) => return Ok(f64::NAN),
                Err(e) => return Err(e),
            };
            match steady_response(params, w, g, &FullState::default(), &cfg.sim) {
                Ok(tr) => numeric_power(&tr, w, params, cfg.sim.window_periods),
                Err(Error::Divergence { .. }) => Ok(f64::NAN),
                Err(e) => Err(e),
            }
        })
        .collect();
    let flat: Vec<f64> = values.into_iter().collect::<Result<_>>()?;
    let power = flat.chunks(omegas.len()).map(<[f64]>::to_vec).collect();
    Ok(PowerMap {
        amplitudes,
        omegas,
        power,
    })
}
