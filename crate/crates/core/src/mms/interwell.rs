use super::slow_flow::SlowFlow;
use super::{xi_for, Branch, Response, SteadyState, Well};
use crate::error::Result;
use crate::hydro::NondimParams;

/// Slow flow of the symmetric inter-well orbit:
/// `wn a' = -zeta1 a - (g/2) sin psi`,
/// `wn a psi' = (-nu1 + 3 gamma a^2/8 + 3 gamma^2 a^4/(256 wn^2)) a - (g/2) cos psi`,
/// with `zeta1 = wn (d1 xi_bar + d2)/2`, `nu1 = (W^2 + wn^2)/2 - wn d1 xi`
/// and kernel constants at `wn`.
pub fn interwell_flow(omega: f64, g_wave: f64, params: &NondimParams) -> Result<SlowFlow> {
    let wn = params.omega_n;
    let xi = xi_for(params, wn)?;
    let g = params.gamma;
    Ok(SlowFlow {
        rate: 1.0 / wn,
        zeta: 0.5 * wn * (params.delta1 * xi.xi_bar + params.delta2),
        q: [
            -(0.5 * (omega * omega + wn * wn) - wn * params.delta1 * xi.xi),
            3.0 * g / 8.0,
            3.0 * g * g / (256.0 * wn * wn),
        ],
        force: -0.5 * g_wave,
    })
}

/// Harmonic amplitudes of the reconstructed inter-well orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterwellHarmonics {
    pub r1: f64,
    pub r3: f64,
    pub r5: f64,
}

impl InterwellHarmonics {
    pub fn new(a: f64, params: &NondimParams) -> Self {
        let (g, wn) = (params.gamma, params.omega_n);
        Self {
            r1: a,
            r3: g / (32.0 * wn * wn) * a.powi(3) + 3.0 * g * g / (1024.0 * wn.powi(4)) * a.powi(5),
            r5: g * g / (1024.0 * wn.powi(4)) * a.powi(5),
        }
    }

    /// Upper bound of `max |Y|` over a period.
    pub fn peak(&self) -> f64 {
        self.r1 + self.r3.abs() + self.r5.abs()
    }
}

/// Inter-well steady states with `max |Y| > Y_s`; orbits that stay inside a
/// well contradict the inter-well expansion and are dropped. Unforced, only
/// the rest state is returned.
pub fn interwell_steady_states(omega: f64, g_wave: f64, params: &NondimParams) -> Result<Vec<SteadyState>> {
    let flow = interwell_flow(omega, g_wave, params)?;
    let mut out = Vec::new();
    for (u, w) in flow.fixed_points()? {
        let a0 = (u * u + w * w).sqrt();
        let eigenvalues = flow.eigenvalues(u, w);
        let state = SteadyState {
            a0,
            psi0: if a0 == 0.0 { 0.0 } else { w.atan2(u) },
            branch: Branch::Large,
            stable: eigenvalues.iter().all(|z| z.re < 0.0),
            eigenvalues,
        };
        if g_wave != 0.0 && !spans_both_wells(a0, omega, params) {
            continue;
        }
        out.push(state);
    }
    Ok(out)
}

/// Whether an inter-well orbit of amplitude `a0` reaches past the wells.
pub fn spans_both_wells(a0: f64, omega: f64, params: &NondimParams) -> bool {
    let ys = params.y_s();
    if InterwellHarmonics::new(a0, params).peak() <= ys {
        return false;
    }
    let state = SteadyState {
        a0,
        psi0: 0.0,
        branch: Branch::Large,
        stable: true,
        eigenvalues: Default::default(),
    };
    let period = 2.0 * std::f64::consts::PI / omega;
    let times: Vec<f64> = (0..256).map(|k| k as f64 * period / 256.0).collect();
    let Response { y, .. } = super::reconstruct_response(&state, omega, params, Well::Upper, &times);
    y.iter().fold(0.0f64, |m, v| m.max(v.abs())) > ys
}
