use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::RunConfig;
use crate::bifurcation::{
    cf1_locus, cf_intrawell_locus, pd_locus, pd_residual, row_stability, BifurcationKind, BifurcationLocus,
    LocusPoint, RowStability,
};
use crate::era::fmt_num;
use crate::error::{Error, Result};
use crate::hydro::NondimParams;
use crate::mms::{intrawell_steady_states, reconstruct_response, Well};
use crate::simulator::{classify, steady_response, FullState, MotionLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    /// Small intra-well periodic motion.
    Br,
    /// Unique large inter-well period-one motion.
    BL,
    /// Chaos only.
    CH,
    BLCH,
    CHBLBn,
    /// Subharmonic or asymmetric orbits with chaos.
    NTCH,
}

impl Region {
    pub fn label(&self) -> &'static str {
        match self {
            Region::Br => "B_r",
            Region::BL => "B_L",
            Region::CH => "CH",
            Region::BLCH => "B_L+CH",
            Region::CHBLBn => "CH+B_L+B_n",
            Region::NTCH => "nT+CH",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Whether a simulated response is one of the attractors the region admits.
pub fn compatible(region: Region, label: MotionLabel) -> bool {
    use MotionLabel::*;
    match region {
        Region::Br => matches!(label, P1Intra),
        Region::BL => matches!(label, P1InterSymmetric),
        Region::CH => matches!(label, Chaotic | Periodic(_)),
        Region::BLCH => matches!(label, P1InterSymmetric | Chaotic | Periodic(_)),
        Region::CHBLBn => matches!(label, P1InterSymmetric | Chaotic | Periodic(_) | P1Intra),
        Region::NTCH => matches!(label, Chaotic | Periodic(_) | P1InterAsymmetric),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignCell {
    pub amplitude_ratio: f64,
    pub omega: f64,
    /// `None` where the wave forcing is undefined.
    pub region: Option<Region>,
    /// Simulated label, for verified cells.
    pub numeric: Option<MotionLabel>,
}

impl DesignCell {
    pub fn agrees(&self) -> Option<bool> {
        Some(compatible(self.region?, self.numeric?))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub checked: usize,
    pub agreed: usize,
}

impl Verification {
    pub fn fraction(&self) -> f64 {
        if self.checked == 0 {
            f64::NAN
        } else {
            self.agreed as f64 / self.checked as f64
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CriticalAmplitudes {
    /// Where the `Cf1` and `SB1` curves meet.
    pub cr1: Option<f64>,
    /// Where the `Cf1` and `pd` curves meet.
    pub cr2: Option<f64>,
    /// Lowest amplitude on any locus.
    pub cr3: Option<f64>,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignMap {
    pub amplitudes: Vec<f64>,
    pub omegas: Vec<f64>,
    /// One row per amplitude.
    pub cells: Vec<Vec<DesignCell>>,
    pub loci: Vec<BifurcationLocus>,
    pub critical: CriticalAmplitudes,
    pub verification: Verification,
}

impl DesignMap {
    pub fn locus(&self, kind: BifurcationKind) -> Option<&BifurcationLocus> {
        self.loci.iter().find(|l| l.kind == kind)
    }

    fn step(&self) -> f64 {
        if self.omegas.len() > 1 {
            self.omegas[1] - self.omegas[0]
        } else {
            0.0
        }
    }

    /// Frequency extent of the `B_L` cells of row `i`.
    pub fn bandwidth(&self, i: usize) -> f64 {
        self.cells[i].iter().filter(|c| c.region == Some(Region::BL)).count() as f64 * self.step()
    }

    /// Bandwidth of the row closest to `amplitude_ratio`.
    pub fn bandwidth_at(&self, amplitude_ratio: f64) -> Option<f64> {
        let i = (0..self.amplitudes.len())
            .min_by(|&a, &b| {
                (self.amplitudes[a] - amplitude_ratio)
                    .abs()
                    .total_cmp(&(self.amplitudes[b] - amplitude_ratio).abs())
            })?;
        Some(self.bandwidth(i))
    }

    /// Smallest amplitude with a `B_L` cell.
    pub fn bl_onset(&self) -> Option<f64> {
        self.cells
            .iter()
            .zip(&self.amplitudes)
            .find(|(row, _)| row.iter().any(|c| c.region == Some(Region::BL)))
            .map(|(_, a)| *a)
    }

    /// Frequencies of the `B_L` cells in the row closest to `amplitude_ratio`.
    pub fn bl_omegas(&self, amplitude_ratio: f64) -> Vec<f64> {
        let Some(i) = (0..self.amplitudes.len()).min_by(|&a, &b| {
            (self.amplitudes[a] - amplitude_ratio)
                .abs()
                .total_cmp(&(self.amplitudes[b] - amplitude_ratio).abs())
        }) else {
            return Vec::new();
        };
        self.cells[i]
            .iter()
            .filter(|c| c.region == Some(Region::BL))
            .map(|c| c.omega)
            .collect()
    }

    /// `A_over_R,Omega,region,numeric` rows. `NA` marks cells with no
    /// analytic region; `numeric` is blank where no simulation was run.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "A_over_R,Omega,region,numeric")?;
        for row in &self.cells {
            for c in row {
                writeln!(
                    out,
                    "{},{},{},{}",
                    fmt_num(c.amplitude_ratio),
                    fmt_num(c.omega),
                    c.region.map_or("NA".to_string(), |r| r.to_string()),
                    c.numeric.map_or(String::new(), |l| l.to_string())
                )?;
            }
        }
        Ok(())
    }
}

/// Intra-well attractors at one point: a slow-flow stable orbit that stays in
/// its well either survives (`periodic`) or sits inside the period-doubling
/// tongue (`cascade`).
#[derive(Debug, Clone, Copy, Default)]
struct IntraVerdict {
    periodic: bool,
    cascade: bool,
}

fn intra_verdict(omega: f64, g: f64, params: &NondimParams) -> Result<IntraVerdict> {
    let mut v = IntraVerdict::default();
    let wo = params.omega_o();
    if (omega - wo).abs() >= wo {
        return Ok(v);
    }
    let period = 2.0 * std::f64::consts::PI / omega;
    let times: Vec<f64> = (0..128).map(|k| k as f64 * period / 128.0).collect();
    for s in intrawell_steady_states(omega, g, params)? {
        if !s.stable {
            continue;
        }
        let r = reconstruct_response(&s, omega, params, Well::Upper, &times);
        if r.y.iter().any(|y| *y <= 0.0) {
            continue;
        }
        match pd_residual(s.a0, omega, params) {
            Ok(x) if x >= 0.0 => v.periodic = true,
            _ => v.cascade = true,
        }
    }
    Ok(v)
}

fn classify_cell(
    omega: f64,
    amp: f64,
    j: usize,
    row: &RowStability,
    params: &NondimParams,
) -> Result<Option<Region>> {
    let g = match params.g_wave(amp, omega) {
        Ok(g) => g,
        Err(Error::KernelValidity { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let intra = intra_verdict(omega, g, params)?;
    let bl_stable = row.in_window(j);
    let bl_exists = row.margins[j].is_some();
    Ok(Some(if bl_stable && intra.periodic {
        Region::CHBLBn
    } else if bl_stable && intra.cascade {
        Region::BLCH
    } else if bl_stable {
        Region::BL
    } else if intra.periodic {
        Region::Br
    } else if bl_exists {
        Region::NTCH
    } else {
        Region::CH
    }))
}

/// Deterministic sample of roughly `fraction` of the cells.
fn selected(index: usize, fraction: f64) -> bool {
    let h = (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 40;
    (h as f64) < fraction * (1u64 << 24) as f64
}

/// Labels every `(A/R, W)` cell from the analytic loci and optionally checks
/// a sample of cells against zero-start simulations. Disagreements stay in
/// the cells and the tally; labels are never overwritten.
pub fn build_design_map(cfg: &RunConfig) -> Result<DesignMap> {
    let params = &cfg.params;
    let omegas = cfg.omegas.values();
    let amplitudes = cfg.amplitudes.values();
    let rows: Vec<Result<(RowStability, Vec<DesignCell>)>> = amplitudes
        .par_iter()
        .map(|&amp| {
            let row = row_stability(params, &omegas, amp, cfg.harmonic_scale)?;
            let mut cells = Vec::with_capacity(omegas.len());
            for (j, &w) in omegas.iter().enumerate() {
                cells.push(DesignCell {
                    amplitude_ratio: amp,
                    omega: w,
                    region: classify_cell(w, amp, j, &row, params)?,
                    numeric: None,
                });
            }
            Ok((row, cells))
        })
        .collect();
    let mut cells = Vec::with_capacity(rows.len());
    let (mut sb1, mut sb2) = (Vec::new(), Vec::new());
    for r in rows {
        let (row, c) = r?;
        sb1.extend(row.sb1);
        sb2.extend(row.sb2);
        cells.push(c);
    }

    let mut verification = Verification::default();
    if cfg.verify_fraction > 0.0 {
        let n = omegas.len();
        let picks: Vec<(usize, usize)> = (0..amplitudes.len() * n)
            .filter(|&k| selected(k, cfg.verify_fraction))
            .map(|k| (k / n, k % n))
            .filter(|&(i, j)| cells[i][j].region.is_some())
            .collect();
        let labels: Vec<Result<Option<MotionLabel>>> = picks
            .par_iter()
            .map(|&(i, j)| {
                let (amp, w) = (amplitudes[i], omegas[j]);
                let g = params.g_wave(amp, w)?;
                match steady_response(params, w, g, &FullState::default(), &cfg.sim) {
                    Ok(tr) => Ok(Some(classify(&tr, w, params)?.label)),
                    Err(Error::Divergence { .. }) => Ok(None),
                    Err(e) => Err(e),
                }
            })
            .collect();
        for (&(i, j), label) in picks.iter().zip(labels) {
            cells[i][j].numeric = label?;
            if let Some(ok) = cells[i][j].agrees() {
                verification.checked += 1;
                verification.agreed += ok as usize;
            }
        }
    }

    let cf1 = cf1_locus(params, &omegas)?;
    let (cf2, cf3) = cf_intrawell_locus(params, &omegas)?;
    let pd = pd_locus(params, &omegas)?;
    let loci = vec![
        cf1,
        cf2,
        cf3,
        pd,
        BifurcationLocus::new(BifurcationKind::SB1, sb1),
        BifurcationLocus::new(BifurcationKind::SB2, sb2),
    ];
    let mut map = DesignMap {
        amplitudes,
        omegas,
        cells,
        loci,
        critical: CriticalAmplitudes::default(),
        verification,
    };
    map.critical = critical_amplitudes(&map);
    Ok(map)
}

/// Largest frequency gap bridged when interpolating a locus.
fn max_gap(map: &DesignMap) -> f64 {
    1.5 * map.step().max(1e-12)
}

/// First Cf1 amplitude at `omega`.
fn cf1_at(cf1: &BifurcationLocus, omega: f64, gap: f64) -> Option<f64> {
    cf1.amplitude_at(omega, gap).into_iter().next()
}

/// Critical wave amplitudes read off the loci: `cr1` where the lower edge
/// of the effective bandwidth meets the fold of the large orbit, `cr2` where
/// the period-doubling curve meets that fold, `cr3` the lowest locus point.
pub fn critical_amplitudes(map: &DesignMap) -> CriticalAmplitudes {
    let mut out = CriticalAmplitudes::default();
    let gap = max_gap(map);
    let (Some(cf1), Some(sb1), Some(pd)) = (
        map.locus(BifurcationKind::Cf1),
        map.locus(BifurcationKind::SB1),
        map.locus(BifurcationKind::PD),
    ) else {
        out.diagnostics.push("loci missing".into());
        return out;
    };

    // SB1 is the left edge of the stable window and the Cf1 fold its right
    // edge, so the two curves meet where the window closes. The window width
    // of the two lowest rows is extrapolated to zero, clamped to the row gap
    // below the first row that has a window.
    let mut rows: Vec<LocusPoint> = sb1.points.clone();
    rows.sort_by(|a, b| a.amplitude_ratio.total_cmp(&b.amplitude_ratio));
    let widths: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|p| {
            let right = cf1
                .crossings(p.amplitude_ratio, gap)
                .into_iter()
                .filter(|c| *c > p.omega)
                .min_by(f64::total_cmp)?;
            // Narrow windows in low-frequency tongues end well short of the fold.
            let last = map.bl_omegas(p.amplitude_ratio).into_iter().fold(f64::NEG_INFINITY, f64::max);
            (right - last <= gap).then_some((p.amplitude_ratio, right - p.omega))
        })
        .collect();
    let da = if map.amplitudes.len() > 1 {
        map.amplitudes[1] - map.amplitudes[0]
    } else {
        0.0
    };
    match widths.as_slice() {
        [(a0, w0), (a1, w1), ..] if map.amplitudes.first().is_some_and(|f| f < a0) => {
            let slope = (w1 - w0) / (a1 - a0);
            let lo = a0 - da;
            out.cr1 = Some(if slope > 0.0 { (a0 - w0 / slope).clamp(lo, *a0) } else { lo });
        }
        [..] if widths.len() >= 2 => {
            out.diagnostics.push("stable window already open on the lowest row".into());
        }
        _ => out.diagnostics.push("fewer than two rows with an SB1 edge below Cf1".into()),
    }

    // pd and Cf1 share the frequency grid; take the highest-frequency meeting.
    let mut diff: Vec<(f64, f64, f64)> = Vec::new();
    for p in &pd.points {
        if let Some(c) = cf1_at(cf1, p.omega, gap) {
            diff.push((p.omega, p.amplitude_ratio - c, p.amplitude_ratio));
        }
    }
    out.cr2 = diff.windows(2).rev().find_map(|w| {
        let ((w0, d0, a0), (w1, d1, a1)) = (w[0], w[1]);
        if w1 - w0 > gap || d0 * d1 > 0.0 || d0 == d1 {
            return None;
        }
        let s = d0 / (d0 - d1);
        Some(a0 + s * (a1 - a0))
    });
    if out.cr2.is_none() {
        out.diagnostics.push("pd does not cross Cf1 within the grid".into());
    }

    out.cr3 = map
        .loci
        .iter()
        .filter_map(|l| l.min_amplitude())
        .min_by(f64::total_cmp);
    if out.cr3.is_none() {
        out.diagnostics.push("all loci empty".into());
    }
    out
}
