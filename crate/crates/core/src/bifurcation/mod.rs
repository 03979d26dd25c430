//! Bifurcation loci in the wave amplitude / frequency plane: cyclic folds of
//! the inter-well and intra-well branches, the first period doubling of the
//! resonant intra-well orbit and symmetry breaking of the inter-well orbit.

mod constants;
mod floquet;
mod loci;

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::era::fmt_num;
use crate::error::Result;

pub use constants::{g_constants, k_constants, k_constants_with, GConstants, HarmonicScale, KConstants};
pub use floquet::{
    floquet_margin, floquet_multipliers, interwell_orbit, monodromy, monodromy_from_k, monodromy_with, row_stability,
    sb_locus, FloquetMargin, RowStability, MONODROMY_STEPS, SB_TOL,
};
pub use loci::{cf1_locus, cf_intrawell_locus, pd_locus, pd_residual};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BifurcationKind {
    Cf1,
    Cf2,
    Cf3,
    PD,
    SB1,
    SB2,
}

impl BifurcationKind {
    pub const ALL: [BifurcationKind; 6] = [Self::Cf1, Self::Cf2, Self::Cf3, Self::PD, Self::SB1, Self::SB2];

    pub fn label(&self) -> &'static str {
        match self {
            Self::Cf1 => "Cf1",
            Self::Cf2 => "Cf2",
            Self::Cf3 => "Cf3",
            Self::PD => "pd",
            Self::SB1 => "SB1",
            Self::SB2 => "SB2",
        }
    }
}

impl fmt::Display for BifurcationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocusPoint {
    pub omega: f64,
    pub amplitude_ratio: f64,
    /// Response amplitude at the bifurcation.
    pub a: f64,
    /// Defining residual at the point.
    pub residual: f64,
}

/// Sampled bifurcation curve, sorted by frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationLocus {
    pub kind: BifurcationKind,
    pub points: Vec<LocusPoint>,
}

impl BifurcationLocus {
    pub fn new(kind: BifurcationKind, mut points: Vec<LocusPoint>) -> Self {
        points.sort_by(|a, b| a.omega.total_cmp(&b.omega).then(a.amplitude_ratio.total_cmp(&b.amplitude_ratio)));
        Self { kind, points }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn max_residual(&self) -> f64 {
        self.points.iter().fold(0.0f64, |m, p| m.max(p.residual.abs()))
    }

    pub fn min_amplitude(&self) -> Option<f64> {
        self.points.iter().map(|p| p.amplitude_ratio).min_by(f64::total_cmp)
    }

    /// Frequencies where the piecewise-linear curve `A/R(W)` passes through
    /// `amplitude_ratio`. Only neighbours at most `max_gap` apart in
    /// frequency are joined.
    pub fn crossings(&self, amplitude_ratio: f64, max_gap: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for pair in self.points.windows(2) {
            let (p, q) = (pair[0], pair[1]);
            if q.omega - p.omega > max_gap || q.omega == p.omega {
                continue;
            }
            let (da, db) = (p.amplitude_ratio - amplitude_ratio, q.amplitude_ratio - amplitude_ratio);
            if da == 0.0 {
                out.push(p.omega);
            } else if da * db < 0.0 {
                out.push(p.omega + (q.omega - p.omega) * da / (da - db));
            }
        }
        if let Some(last) = self.points.last() {
            if last.amplitude_ratio == amplitude_ratio && !out.contains(&last.omega) {
                out.push(last.omega);
            }
        }
        out
    }

    /// Amplitude on the curve at `omega`, by linear interpolation between
    /// bracketing points; several values when the curve folds over.
    pub fn amplitude_at(&self, omega: f64, max_gap: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for pair in self.points.windows(2) {
            let (p, q) = (pair[0], pair[1]);
            if q.omega - p.omega > max_gap {
                continue;
            }
            if p.omega <= omega && omega <= q.omega && q.omega > p.omega {
                let s = (omega - p.omega) / (q.omega - p.omega);
                out.push(p.amplitude_ratio + s * (q.amplitude_ratio - p.amplitude_ratio));
            }
        }
        out
    }
}

/// Writes `kind,Omega_b,A_over_R,a_b,residual` rows for all loci.
pub fn write_loci_csv<W: Write>(mut out: W, loci: &[BifurcationLocus]) -> Result<()> {
    writeln!(out, "kind,Omega_b,A_over_R,a_b,residual")?;
    for l in loci {
        for p in &l.points {
            writeln!(
                out,
                "{},{},{},{},{}",
                l.kind,
                fmt_num(p.omega),
                fmt_num(p.amplitude_ratio),
                fmt_num(p.a),
                fmt_num(p.residual)
            )?;
        }
    }
    Ok(())
}
