use super::constants::g_constants;
use super::{BifurcationKind, BifurcationLocus, LocusPoint};
use crate::error::{Error, Result};
use crate::hydro::NondimParams;
use crate::mms::{interwell_flow, intrawell_flow, spans_both_wells, xi_for, SlowFlow};
use crate::numerics::{bisect, real_positive_roots, Polynomial};

fn check_grid(omegas: &[f64]) -> Result<()> {
    if let Some(w) = omegas.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
        return Err(Error::InvalidInput(format!("frequencies must be positive, got {w}")));
    }
    Ok(())
}

/// `x (zeta^2 + Q(x)^2)`: squared forcing needed for amplitude `sqrt(x)`.
fn unforced_amplitude_polynomial(flow: &SlowFlow) -> Polynomial {
    SlowFlow { force: 0.0, ..*flow }.amplitude_polynomial()
}

fn relative_residual(p: &Polynomial, x: f64) -> f64 {
    let scale: f64 = p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| (c * x.powi(k as i32)).abs())
        .sum();
    p.eval(x).abs() / scale.max(f64::MIN_POSITIVE)
}

/// Folds of the inter-well branch at fixed wave amplitude.
///
/// With `H(x) = x (zeta^2 + Q(x)^2)` the steady states satisfy `H(x) = g^2/4`,
/// so the fold condition `dW/da = 0` is `H'(x) = 0` (a quartic in `x = a^2`)
/// independently of the forcing. Each root is mapped back to the forcing
/// `g = 2 sqrt(H(x))` and then to `A/R`. Only minima of `H` are kept: below
/// that forcing the large orbit ceases to exist. Roots whose orbit does not
/// leave the wells are dropped.
pub fn cf1_locus(params: &NondimParams, omegas: &[f64]) -> Result<BifurcationLocus> {
    check_grid(omegas)?;
    let mut points = Vec::new();
    for &w in omegas {
        let flow = interwell_flow(w, 0.0, params)?;
        let h = unforced_amplitude_polynomial(&flow);
        let dh = h.derivative();
        let ddh = dh.derivative();
        for x in real_positive_roots(&dh, f64::INFINITY)? {
            if ddh.eval(x) <= 0.0 {
                continue;
            }
            let a = x.sqrt();
            let g = 2.0 * h.eval(x).max(0.0).sqrt();
            if !spans_both_wells(a, w, params) {
                continue;
            }
            let amp = match params.amplitude_ratio(g, w) {
                Ok(v) => v,
                Err(Error::KernelValidity { .. }) => continue,
                Err(e) => return Err(e),
            };
            points.push(LocusPoint {
                omega: w,
                amplitude_ratio: amp,
                a,
                residual: relative_residual(&dh, x),
            });
        }
    }
    Ok(BifurcationLocus::new(BifurcationKind::Cf1, points))
}

/// Folds of the intra-well branch, `x = (-2 nu +- sqrt(nu^2 - 3 zeta^2)) / (3 kappa)`
/// with `nu` the linear detuning. The smaller amplitude is `Cf2`, the larger
/// (tip of the resonant branch) `Cf3`; they merge where the discriminant
/// vanishes.
pub fn cf_intrawell_locus(params: &NondimParams, omegas: &[f64]) -> Result<(BifurcationLocus, BifurcationLocus)> {
    check_grid(omegas)?;
    let wo = params.omega_o();
    let kappa = params.kappa();
    let (mut lo, mut hi) = (Vec::new(), Vec::new());
    for &w in omegas {
        if (w - wo).abs() >= wo {
            continue;
        }
        let flow = intrawell_flow(w, 0.0, params)?;
        let (nu, zeta) = (flow.q[0], flow.zeta);
        let disc = nu * nu - 3.0 * zeta * zeta;
        if disc < 0.0 {
            continue;
        }
        let h = unforced_amplitude_polynomial(&flow);
        let dh = h.derivative();
        let sq = disc.sqrt();
        let mut roots = [(-2.0 * nu - sq) / (3.0 * kappa), (-2.0 * nu + sq) / (3.0 * kappa)];
        roots.sort_by(f64::total_cmp);
        for (k, &x) in roots.iter().enumerate() {
            if !(x > 0.0) {
                continue;
            }
            let g = 2.0 * wo * h.eval(x).max(0.0).sqrt();
            let amp = match params.amplitude_ratio(g, w) {
                Ok(v) => v,
                Err(Error::KernelValidity { .. }) => continue,
                Err(e) => return Err(e),
            };
            let p = LocusPoint {
                omega: w,
                amplitude_ratio: amp,
                a: x.sqrt(),
                residual: relative_residual(&dh, x),
            };
            if k == 0 {
                lo.push(p);
            } else {
                hi.push(p);
            }
        }
    }
    Ok((
        BifurcationLocus::new(BifurcationKind::Cf2, lo),
        BifurcationLocus::new(BifurcationKind::Cf3, hi),
    ))
}

/// Principal parametric resonance condition of the Hill equation about an
/// intra-well orbit of amplitude `a0`:
/// `(s W - 2 G0 - d1 s xi2)^2 + (d1 s xi_bar2 + d2 s)^2 - G1^2 / 4` with
/// `s = sqrt(G0)` and kernel constants at `s`. Negative inside the unstable
/// tongue.
pub fn pd_residual(a0: f64, omega: f64, params: &NondimParams) -> Result<f64> {
    let g = g_constants(a0, params);
    if !(g.g0 > 0.0) {
        return Err(Error::InvalidInput(format!("G0 = {} is not positive at a0 = {a0}", g.g0)));
    }
    let s = g.g0.sqrt();
    let xi = xi_for(params, s)?;
    let d1 = params.delta1;
    let re = s * omega - 2.0 * g.g0 - d1 * s * xi.xi;
    let im = d1 * s * xi.xi_bar + params.delta2 * s;
    Ok(re * re + im * im - g.g1 * g.g1 / 4.0)
}

const PD_SCAN: usize = 600;

/// First period doubling of the intra-well orbit: at each frequency the
/// smallest amplitude entering the parametric tongue, mapped to the wave
/// amplitude that drives the orbit there.
pub fn pd_locus(params: &NondimParams, omegas: &[f64]) -> Result<BifurcationLocus> {
    check_grid(omegas)?;
    let wo = params.omega_o();
    let a_max = 1.5 * params.y_s();
    let mut points = Vec::new();
    for &w in omegas {
        if (w - wo).abs() >= wo {
            continue;
        }
        let f = |a: f64| pd_residual(a, w, params).unwrap_or(f64::NAN);
        let mut prev = (0.0, f(0.0));
        let mut root = None;
        for k in 1..=PD_SCAN {
            let a = a_max * k as f64 / PD_SCAN as f64;
            let v = f(a);
            if !v.is_finite() {
                break;
            }
            if prev.1 > 0.0 && v <= 0.0 {
                root = Some(bisect(f, prev.0, a, 1e-15)?);
                break;
            }
            prev = (a, v);
        }
        let Some(a) = root else { continue };
        let flow = intrawell_flow(w, 0.0, params)?;
        let g = 2.0 * wo * unforced_amplitude_polynomial(&flow).eval(a * a).max(0.0).sqrt();
        let amp = match params.amplitude_ratio(g, w) {
            Ok(v) => v,
            Err(Error::KernelValidity { .. }) => continue,
            Err(e) => return Err(e),
        };
        points.push(LocusPoint {
            omega: w,
            amplitude_ratio: amp,
            a,
            residual: f(a),
        });
    }
    Ok(BifurcationLocus::new(BifurcationKind::PD, points))
}
