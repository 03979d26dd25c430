use num_complex::Complex64;
use rayon::prelude::*;

use super::constants::{k_constants_with, HarmonicScale, KConstants};
use super::{BifurcationKind, BifurcationLocus, LocusPoint};
use crate::error::{Error, Result};
use crate::hydro::NondimParams;
use crate::mms::{interwell_steady_states, SteadyState};
use crate::numerics::{eigenvalues, DenseMatrix, FnSystem, Rk4};

/// RK4 steps per parametric period.
pub const MONODROMY_STEPS: usize = 2000;

/// Frequency resolution of symmetry-breaking crossings.
pub const SB_TOL: f64 = 1e-10;

const DIM: usize = 5;

/// `Phi(T)` for `p'' + d1 C x + d2 p' + f(t) p = 0`, `x' = A x + B p'`
/// over `T = pi / W`, starting from the identity. States are
/// `(p, p', x1, x2, x3)`.
pub fn monodromy_from_k(omega: f64, k: &KConstants, params: &NondimParams) -> Result<DenseMatrix> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::InvalidInput(format!("frequency must be positive, got {omega}")));
    }
    let r = &params.radiation;
    if r.order() != DIM - 2 {
        return Err(Error::InvalidInput(format!(
            "monodromy needs a third-order radiation model, got order {}",
            r.order()
        )));
    }
    let mut m = [[0.0; DIM]; DIM];
    m[0][1] = 1.0;
    m[1][1] = -params.delta2;
    for i in 0..3 {
        m[1][2 + i] = -params.delta1 * r.c[(0, i)];
        m[2 + i][1] = r.b[(i, 0)];
        for j in 0..3 {
            m[2 + i][2 + j] = r.a[(i, j)];
        }
    }
    let k = *k;
    let sys = FnSystem::new(DIM * DIM, move |t, phi: &[f64], d: &mut [f64]| {
        let mut mt = m;
        mt[1][0] = -k.stiffness(omega, t);
        for i in 0..DIM {
            for j in 0..DIM {
                let mut s = 0.0;
                for l in 0..DIM {
                    s += mt[i][l] * phi[l * DIM + j];
                }
                d[i * DIM + j] = s;
            }
        }
    });
    let mut phi = DenseMatrix::identity(DIM).as_slice().to_vec();
    let period = std::f64::consts::PI / omega;
    Rk4::new(DIM * DIM).run(&sys, 0.0, period, MONODROMY_STEPS, &mut phi, |_, _| {})?;
    DenseMatrix::new(DIM, DIM, phi)
}

pub fn monodromy(omega: f64, a0: f64, params: &NondimParams) -> Result<DenseMatrix> {
    monodromy_with(omega, a0, params, HarmonicScale::default())
}

pub fn monodromy_with(omega: f64, a0: f64, params: &NondimParams, scale: HarmonicScale) -> Result<DenseMatrix> {
    if !(a0 >= 0.0) {
        return Err(Error::InvalidInput(format!("amplitude must be nonnegative, got {a0}")));
    }
    monodromy_from_k(omega, &k_constants_with(a0, omega, params, scale), params)
}

/// Eigenvalues of a monodromy matrix, largest modulus first.
pub fn floquet_multipliers(phi: &DenseMatrix) -> Vec<Complex64> {
    let mut ev = eigenvalues(phi);
    ev.sort_by(|a, b| b.norm().total_cmp(&a.norm()).then(a.im.total_cmp(&b.im)));
    ev
}

/// Largest-amplitude inter-well steady state at `(W, A/R)`, if any.
pub fn interwell_orbit(omega: f64, amplitude_ratio: f64, params: &NondimParams) -> Result<Option<SteadyState>> {
    let g = match params.g_wave(amplitude_ratio, omega) {
        Ok(g) => g,
        Err(Error::KernelValidity { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    if g == 0.0 {
        return Ok(None);
    }
    Ok(interwell_steady_states(omega, g, params)?.into_iter().last())
}

/// Floquet verdict for the inter-well orbit at one point of the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloquetMargin {
    pub a0: f64,
    /// Multiplier of largest modulus.
    pub dominant: Complex64,
    /// `max |lambda| - 1`; negative when the orbit is stable.
    pub margin: f64,
}

pub fn floquet_margin(
    omega: f64,
    amplitude_ratio: f64,
    params: &NondimParams,
    scale: HarmonicScale,
) -> Result<Option<FloquetMargin>> {
    let Some(state) = interwell_orbit(omega, amplitude_ratio, params)? else {
        return Ok(None);
    };
    let phi = monodromy_with(omega, state.a0, params, scale)?;
    let dominant = floquet_multipliers(&phi)[0];
    Ok(Some(FloquetMargin {
        a0: state.a0,
        dominant,
        margin: dominant.norm() - 1.0,
    }))
}

fn through_plus_one(m: &FloquetMargin) -> bool {
    m.dominant.re > 0.0 && m.dominant.im.abs() <= 1e-6 * m.dominant.norm().max(1.0)
}

/// Bisects the sign change of the margin between `lo` and `hi`, where the
/// orbit exists at both ends.
fn refine(
    amp: f64,
    params: &NondimParams,
    scale: HarmonicScale,
    (mut lo, mut m_lo): (f64, FloquetMargin),
    (mut hi, mut m_hi): (f64, FloquetMargin),
) -> Result<(f64, FloquetMargin)> {
    let lo_sign = m_lo.margin < 0.0;
    while hi - lo > SB_TOL {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let Some(m) = floquet_margin(mid, amp, params, scale)? else {
            break;
        };
        if (m.margin < 0.0) == lo_sign {
            lo = mid;
            m_lo = m;
        } else {
            hi = mid;
            m_hi = m;
        }
    }
    Ok(if m_lo.margin.abs() <= m_hi.margin.abs() { (lo, m_lo) } else { (hi, m_hi) })
}

fn check_increasing(omegas: &[f64]) -> Result<()> {
    if omegas.windows(2).any(|p| !(p[1] > p[0])) {
        return Err(Error::InvalidInput("frequency grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Floquet verdicts along one amplitude row.
#[derive(Debug, Clone, PartialEq)]
pub struct RowStability {
    pub amplitude_ratio: f64,
    pub omegas: Vec<f64>,
    /// `None` where no inter-well orbit exists.
    pub margins: Vec<Option<FloquetMargin>>,
    /// Index range of the widest run of stable samples (ties go to the
    /// higher frequencies).
    pub window: Option<(usize, usize)>,
    /// Lower end of the window where the multiplier leaves through `+1`.
    pub sb1: Option<LocusPoint>,
    /// Upper end likewise.
    pub sb2: Option<LocusPoint>,
}

impl RowStability {
    pub fn in_window(&self, i: usize) -> bool {
        self.window.map_or(false, |(s, e)| s <= i && i <= e)
    }
}

pub fn row_stability(
    params: &NondimParams,
    omegas: &[f64],
    amp: f64,
    scale: HarmonicScale,
) -> Result<RowStability> {
    check_increasing(omegas)?;
    let mut margins = Vec::with_capacity(omegas.len());
    for &w in omegas {
        margins.push(floquet_margin(w, amp, params, scale)?);
    }
    let stable = |i: usize| matches!(margins[i], Some(m) if m.margin < 0.0);
    let mut window: Option<(usize, usize)> = None;
    let mut i = 0;
    while i < margins.len() {
        if !stable(i) {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < margins.len() && stable(i + 1) {
            i += 1;
        }
        if window.map_or(true, |(s, e)| i - start >= e - s) {
            window = Some((start, i));
        }
        i += 1;
    }
    let edge = |inside: usize, outside: usize| -> Result<Option<LocusPoint>> {
        let (Some(m_in), Some(m_out)) = (margins[inside], margins[outside]) else {
            return Ok(None);
        };
        if !through_plus_one(&m_out) {
            return Ok(None);
        }
        let (lo, hi) = if outside < inside {
            ((omegas[outside], m_out), (omegas[inside], m_in))
        } else {
            ((omegas[inside], m_in), (omegas[outside], m_out))
        };
        let (w, m) = refine(amp, params, scale, lo, hi)?;
        Ok(Some(LocusPoint {
            omega: w,
            amplitude_ratio: amp,
            a: m.a0,
            residual: m.margin,
        }))
    };
    let (mut sb1, mut sb2) = (None, None);
    if let Some((start, end)) = window {
        if start > 0 {
            sb1 = edge(start, start - 1)?;
        }
        if end + 1 < margins.len() {
            sb2 = edge(end, end + 1)?;
        }
    }
    Ok(RowStability {
        amplitude_ratio: amp,
        omegas: omegas.to_vec(),
        margins,
        window,
        sb1,
        sb2,
    })
}

/// Symmetry-breaking loci of the inter-well orbit. Along each amplitude row
/// the dominant multiplier is tracked across the frequency grid; the widest
/// run of stable samples is the effective bandwidth of that row and its ends,
/// bisected where the multiplier leaves through `+1`, are `SB1` (lower) and
/// `SB2` (upper). Narrow stability windows at low frequency, between
/// higher-order parametric tongues, are ignored. Rows are evaluated in
/// parallel.
pub fn sb_locus(
    params: &NondimParams,
    omegas: &[f64],
    amplitudes: &[f64],
    scale: HarmonicScale,
) -> Result<(BifurcationLocus, BifurcationLocus)> {
    check_increasing(omegas)?;
    let rows: Vec<Result<RowStability>> = amplitudes
        .par_iter()
        .map(|&amp| row_stability(params, omegas, amp, scale))
        .collect();
    let (mut sb1, mut sb2) = (Vec::new(), Vec::new());
    for row in rows {
        let row = row?;
        sb1.extend(row.sb1);
        sb2.extend(row.sb2);
    }
    Ok((
        BifurcationLocus::new(BifurcationKind::SB1, sb1),
        BifurcationLocus::new(BifurcationKind::SB2, sb2),
    ))
}
