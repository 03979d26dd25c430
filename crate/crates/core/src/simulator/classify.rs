use std::fmt;

use serde::{Deserialize, Serialize};

use super::stroboscopic_map;
use crate::error::Result;
use crate::hydro::NondimParams;
use crate::numerics::{fft_magnitudes, Trajectory};

/// Strobe points closer than this belong to one cluster.
pub const CLUSTER_RADIUS: f64 = 1e-3;
/// Largest period resolved as periodic; more clusters count as chaos.
pub const MAX_PERIOD: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MotionLabel {
    P1Intra,
    P1InterSymmetric,
    P1InterAsymmetric,
    /// Period-`n` orbit, `2 <= n <= MAX_PERIOD`.
    Periodic(usize),
    Chaotic,
}

impl MotionLabel {
    pub fn is_symmetric_p1(&self) -> bool {
        matches!(self, MotionLabel::P1InterSymmetric)
    }

    pub fn period(&self) -> Option<usize> {
        match self {
            MotionLabel::Periodic(n) => Some(*n),
            MotionLabel::Chaotic => None,
            _ => Some(1),
        }
    }
}

impl fmt::Display for MotionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MotionLabel::P1Intra => f.write_str("P1-intra"),
            MotionLabel::P1InterSymmetric => f.write_str("P1-inter-symmetric"),
            MotionLabel::P1InterAsymmetric => f.write_str("P1-inter-asymmetric"),
            MotionLabel::Periodic(n) => write!(f, "P{n}"),
            MotionLabel::Chaotic => f.write_str("chaotic"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseClassification {
    pub label: MotionLabel,
    pub strobe_points: Vec<[f64; 2]>,
    /// Number of strobe clusters (capped at `MAX_PERIOD + 1`).
    pub clusters: usize,
    /// `mean(Y)` over the window.
    pub mean_offset: f64,
    pub max_abs: f64,
    pub interwell: bool,
    /// Angular frequencies of the strongest spectral lines, strongest first.
    pub dominant_harmonics: Vec<f64>,
    /// Largest line strictly between DC and the forcing frequency, relative
    /// to the line at the forcing frequency.
    pub subharmonic_ratio: f64,
}

/// Greedy clustering of strobe points; stops counting past `cap`.
pub fn cluster_count(points: &[[f64; 2]], radius: f64, cap: usize) -> usize {
    let mut centers: Vec<[f64; 2]> = Vec::new();
    for p in points {
        let near = centers
            .iter()
            .any(|c| (c[0] - p[0]).hypot(c[1] - p[1]) < radius);
        if !near {
            centers.push(*p);
            if centers.len() > cap {
                break;
            }
        }
    }
    centers.len()
}

const HARMONIC_LINES: usize = 8;

/// Labels a post-transient trajectory from its strobe clusters, sign changes
/// of `Y` and mean offset.
pub fn classify(traj: &Trajectory, omega: f64, _params: &NondimParams) -> Result<ResponseClassification> {
    let strobe = stroboscopic_map(traj, omega, 0)?;
    let clusters = cluster_count(&strobe, CLUSTER_RADIUS, MAX_PERIOD);
    let y = traj.component(0);
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let max_abs = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let interwell = y.iter().any(|v| *v > 0.0) && y.iter().any(|v| *v < 0.0);
    let label = match clusters {
        1 if !interwell => MotionLabel::P1Intra,
        1 if mean.abs() > 1e-2 * max_abs => MotionLabel::P1InterAsymmetric,
        1 => MotionLabel::P1InterSymmetric,
        n if n <= MAX_PERIOD => MotionLabel::Periodic(n),
        _ => MotionLabel::Chaotic,
    };
    let (dominant_harmonics, subharmonic_ratio) = spectrum_lines(traj, &y, omega);
    Ok(ResponseClassification {
        label,
        strobe_points: strobe,
        clusters,
        mean_offset: mean,
        max_abs,
        interwell,
        dominant_harmonics,
        subharmonic_ratio,
    })
}

fn spectrum_lines(traj: &Trajectory, y: &[f64], omega: f64) -> (Vec<f64>, f64) {
    let n = y.len().checked_next_power_of_two().map_or(0, |p| if p == y.len() { p } else { p / 2 });
    if n < 8 || traj.len() < 2 {
        return (Vec::new(), f64::NAN);
    }
    let dt = traj.times[1] - traj.times[0];
    let Ok(spec) = fft_magnitudes(&y[..n], dt) else {
        return (Vec::new(), f64::NAN);
    };
    let mut bins: Vec<usize> = (1..spec.magnitudes.len()).collect();
    bins.sort_by(|&a, &b| spec.magnitudes[b].total_cmp(&spec.magnitudes[a]).then(a.cmp(&b)));
    let top = spec.magnitudes[bins[0]];
    let lines = bins
        .iter()
        .take(HARMONIC_LINES)
        .filter(|&&k| spec.magnitudes[k] > 1e-3 * top)
        .map(|&k| spec.frequencies[k])
        .collect();
    let fund = spec.bin_of(omega);
    let sub = (1..fund).fold(0.0f64, |m, k| m.max(spec.magnitudes[k]));
    let ratio = if spec.magnitudes[fund] > 0.0 { sub / spec.magnitudes[fund] } else { f64::NAN };
    (lines, ratio)
}
