//! Multiple-scales steady states: intra-well and inter-well amplitude/phase
//! solutions, their stability, reconstructed responses, power and capture width.

mod intrawell;
mod interwell;
mod slow_flow;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hydro::{BuoyGeometry, KernelConstants, NondimParams, WaveInput, XiConvention};

pub use interwell::{interwell_flow, interwell_steady_states, spans_both_wells, InterwellHarmonics};
pub use intrawell::{intrawell_flow, intrawell_steady_states};
pub use slow_flow::SlowFlow;

/// In-phase (`xi`) and quadrature (`xi_bar`) kernel constants at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiConstants {
    pub xi: f64,
    pub xi_bar: f64,
    pub at_frequency: f64,
}

/// Sine and cosine transforms of the kernel: the convolution of a harmonic
/// velocity `Y' = Re(i w a e^{iwt})` is `xi w Y + xi_bar Y'`.
pub fn xi_constants(omega: f64, kernel: &KernelConstants) -> Result<XiConstants> {
    check_frequency(omega)?;
    Ok(XiConstants {
        xi: kernel.sine_transform(omega),
        xi_bar: kernel.cosine_transform(omega),
        at_frequency: omega,
    })
}

/// The closed forms in their originally printed arrangement. They differ from
/// the transforms in the `lambda2`/`lambda3` terms.
pub fn xi_constants_as_printed(omega: f64, kernel: &KernelConstants) -> Result<XiConstants> {
    check_frequency(omega)?;
    let (m, l1, l2, l3) = (kernel.mu, kernel.lambda1, kernel.lambda2, kernel.lambda3);
    let d = 4.0 * m.powi(4) + omega.powi(4);
    Ok(XiConstants {
        xi: l1 * omega / (m * m + omega * omega) + 2.0 * l2 * m * m * omega / d
            - l3 * omega.powi(3) / d,
        xi_bar: l1 * m / (m * m + omega * omega) + l2 * (2.0 * m.powi(3) - m * omega * omega) / d
            - l3 * (2.0 * m.powi(3) + m * omega * omega) / d,
        at_frequency: omega,
    })
}

/// Kernel constants under the convention selected in `params`.
pub fn xi_for(params: &NondimParams, omega: f64) -> Result<XiConstants> {
    match params.xi_convention {
        XiConvention::Transform => xi_constants(omega, &params.radiation.kernel),
        XiConvention::Printed => xi_constants_as_printed(omega, &params.radiation.kernel),
    }
}

fn check_frequency(omega: f64) -> Result<()> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::InvalidInput(format!("frequency must be positive, got {omega}")));
    }
    Ok(())
}

/// Steady-state family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Branch {
    /// Intra-well, beyond the bent backbone (resonant side).
    Resonant,
    /// Intra-well, on the near side of the backbone.
    NonResonant,
    /// Large inter-well orbit.
    Large,
}

impl Branch {
    pub fn label(&self) -> &'static str {
        match self {
            Branch::Resonant => "B_r",
            Branch::NonResonant => "B_n",
            Branch::Large => "B_L",
        }
    }

    pub fn is_interwell(&self) -> bool {
        matches!(self, Branch::Large)
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Well an intra-well orbit lives in.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Well {
    #[default]
    Upper,
    Lower,
}

impl Well {
    pub fn center(&self, params: &NondimParams) -> f64 {
        match self {
            Well::Upper => params.y_s(),
            Well::Lower => -params.y_s(),
        }
    }

    /// Quadratic coefficient of the local expansion `z = Y - center`.
    pub fn eta(&self, params: &NondimParams) -> f64 {
        match self {
            Well::Upper => params.eta(),
            Well::Lower => -params.eta(),
        }
    }
}

/// Fixed point of a slow flow with its linear stability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub a0: f64,
    /// In `(-pi, pi]`.
    pub psi0: f64,
    pub branch: Branch,
    pub stable: bool,
    pub eigenvalues: [Complex64; 2],
}

/// Stability verdict of a slow-flow fixed point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stability {
    pub stable: bool,
    pub eigenvalues: [Complex64; 2],
}

/// Slow flow the state belongs to.
pub fn flow_for(state: &SteadyState, omega: f64, g_wave: f64, params: &NondimParams) -> Result<SlowFlow> {
    if state.branch.is_interwell() {
        interwell_flow(omega, g_wave, params)
    } else {
        intrawell_flow(omega, g_wave, params)
    }
}

/// Eigenvalues of the slow-flow Jacobian at the state, in Cartesian
/// coordinates so that `a0 = 0` is regular.
pub fn local_stability(state: &SteadyState, omega: f64, g_wave: f64, params: &NondimParams) -> Result<Stability> {
    let flow = flow_for(state, omega, g_wave, params)?;
    let (u, w) = (state.a0 * state.psi0.cos(), state.a0 * state.psi0.sin());
    let eigenvalues = flow.eigenvalues(u, w);
    Ok(Stability {
        stable: eigenvalues.iter().all(|z| z.re < 0.0),
        eigenvalues,
    })
}

/// Polar residuals `(a', a psi')` of the state's slow flow.
pub fn slow_flow_residuals(state: &SteadyState, omega: f64, g_wave: f64, params: &NondimParams) -> Result<(f64, f64)> {
    Ok(flow_for(state, omega, g_wave, params)?.polar_residuals(state.a0, state.psi0))
}

/// Reconstructed displacement and voltage.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Response {
    pub t: Vec<f64>,
    pub y: Vec<f64>,
    pub v: Vec<f64>,
}

/// Time series of a steady state in absolute coordinates. Intra-well
/// orbits sit in `well`; inter-well orbits ignore it.
///
/// The voltage keeps only the fundamental: the second intra-well harmonic of
/// the voltage drops out at this order.
pub fn reconstruct_response(
    state: &SteadyState,
    omega: f64,
    params: &NondimParams,
    well: Well,
    times: &[f64],
) -> Response {
    let a = state.a0;
    let mut out = Response {
        t: times.to_vec(),
        y: Vec::with_capacity(times.len()),
        v: Vec::with_capacity(times.len()),
    };
    if state.branch.is_interwell() {
        let h = InterwellHarmonics::new(a, params);
        let wn = params.omega_n;
        let den = wn * wn + params.theta * params.theta;
        for &t in times {
            let ph = omega * t + state.psi0;
            out.y.push(h.r1 * ph.cos() + h.r3 * (3.0 * ph).cos() + h.r5 * (5.0 * ph).cos());
            out.v.push(a * (wn * wn * ph.cos() - wn * params.theta * ph.sin()) / den);
        }
    } else {
        let wo = params.omega_o();
        let eta = well.eta(params);
        let c = well.center(params);
        let q = eta / (2.0 * wo * wo);
        let den = wo * wo + params.theta * params.theta;
        for &t in times {
            let ph = omega * t - state.psi0;
            out.y.push(c + a * ph.cos() + q * (-a * a + a * a / 3.0 * (2.0 * ph).cos()));
            out.v.push(a * (wo * wo * ph.cos() - wo * params.theta * ph.sin()) / den);
        }
    }
    out
}

/// Closed-form mean of `delta2 Y'^2` over a period.
pub fn average_power(state: &SteadyState, omega: f64, params: &NondimParams) -> f64 {
    let a = state.a0;
    let w2 = omega * omega;
    if state.branch.is_interwell() {
        let wn4 = params.omega_n.powi(4);
        params.delta2 * (w2 * a * a / 2.0 + 9.0 * params.gamma.powi(2) * w2 * a.powi(6) / (2048.0 * wn4))
    } else {
        let eta = params.eta();
        let wo4 = params.omega_o().powi(4);
        params.delta2 * (w2 * a * a / 2.0 + eta * eta * w2 * a.powi(4) / (18.0 * wo4))
    }
}

/// `6 (m + m_inf) W P / (rho R A^2)` with `A = (A/R) R`.
pub fn capture_width_ratio(p_avg: f64, geometry: &BuoyGeometry, wave: &WaveInput) -> Result<f64> {
    wave.validate()?;
    if wave.amplitude_ratio == 0.0 {
        return Err(Error::ZeroAmplitude);
    }
    let a = wave.amplitude_ratio * geometry.radius;
    Ok(6.0 * geometry.total_mass() * wave.omega * p_avg / (geometry.rho * geometry.radius * a * a))
}

/// One row of a frequency-response table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchSample {
    pub omega: f64,
    pub state: SteadyState,
    pub p_avg: f64,
    pub cwr: f64,
}

/// All intra- and inter-well steady states along a frequency grid at fixed
/// `A/R`. Frequencies where the forcing is undefined are skipped; intra-well
/// roots are only sought where `|W - wo| < wo`.
pub fn branch_sweep(
    params: &NondimParams,
    geometry: &BuoyGeometry,
    amplitude_ratio: f64,
    omegas: &[f64],
) -> Result<Vec<BranchSample>> {
    let mut rows = Vec::new();
    for &w in omegas {
        let g = match params.g_wave(amplitude_ratio, w) {
            Ok(g) => g,
            Err(Error::KernelValidity { .. }) => continue,
            Err(e) => return Err(e),
        };
        let mut states = Vec::new();
        if (w - params.omega_o()).abs() < params.omega_o() {
            states.extend(intrawell_steady_states(w, g, params)?);
        }
        states.extend(interwell_steady_states(w, g, params)?);
        let wave = WaveInput::new(amplitude_ratio, w)?;
        for s in states {
            let p = average_power(&s, w, params);
            let cwr = if amplitude_ratio > 0.0 {
                capture_width_ratio(p, geometry, &wave)?
            } else {
                0.0
            };
            rows.push(BranchSample { omega: w, state: s, p_avg: p, cwr });
        }
    }
    Ok(rows)
}
