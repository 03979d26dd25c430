use super::slow_flow::SlowFlow;
use super::{xi_for, Branch, SteadyState};
use crate::error::{Error, Result};
use crate::hydro::NondimParams;

/// Slow flow of oscillations about a well at forcing frequency `omega`:
/// `zeta = (d1 xi_bar + d2)/2`, `Q = W - wo - d1 xi/2 + kappa a^2`,
/// `F = g/(2 wo)`, all kernel constants at `wo`.
pub fn intrawell_flow(omega: f64, g_wave: f64, params: &NondimParams) -> Result<SlowFlow> {
    let wo = params.omega_o();
    let xi = xi_for(params, wo)?;
    Ok(SlowFlow {
        rate: 1.0,
        zeta: 0.5 * (params.delta1 * xi.xi_bar + params.delta2),
        q: [omega - wo - 0.5 * params.delta1 * xi.xi, params.kappa(), 0.0],
        force: g_wave / (2.0 * wo),
    })
}

/// Intra-well steady states sorted by amplitude. Roots with nonnegative
/// effective detuning `Q(a^2)` lie beyond the backbone and are labelled
/// resonant.
pub fn intrawell_steady_states(omega: f64, g_wave: f64, params: &NondimParams) -> Result<Vec<SteadyState>> {
    let wo = params.omega_o();
    if !((omega - wo).abs() < wo) {
        return Err(Error::InvalidInput(format!(
            "intra-well expansion needs |W - wo| < wo, got W = {omega}"
        )));
    }
    let flow = intrawell_flow(omega, g_wave, params)?;
    let mut out = Vec::new();
    for (u, w) in flow.fixed_points()? {
        let a0 = (u * u + w * w).sqrt();
        let eigenvalues = flow.eigenvalues(u, w);
        let branch = if flow.q_of(a0 * a0) >= 0.0 {
            Branch::Resonant
        } else {
            Branch::NonResonant
        };
        out.push(SteadyState {
            a0,
            psi0: if a0 == 0.0 { 0.0 } else { w.atan2(u) },
            branch,
            stable: eigenvalues.iter().all(|z| z.re < 0.0),
            eigenvalues,
        });
    }
    Ok(out)
}
