use std::f64::consts::PI;

use bpwa::hydro::{KernelConstants, NondimParams};
use bpwa::mms::*;
use proptest::prelude::*;

fn reference() -> NondimParams {
    NondimParams::reference()
}

// Convolution of a unit harmonic velocity, projected on cos and sin, by
// direct quadrature. Independent of the closed forms.
fn secular_projection(w: f64) -> (f64, f64) {
    let k = KernelConstants::HEMISPHERE;
    let (t_end, n) = (60.0, 240_000);
    let h = t_end / n as f64;
    let (mut c, mut s) = (0.0, 0.0);
    for i in 0..=n {
        let t = i as f64 * h;
        let wt = if i == 0 || i == n { 0.5 } else { 1.0 };
        c += wt * k.impulse(t) * (w * t).cos();
        s += wt * k.impulse(t) * (w * t).sin();
    }
    (s * h, c * h)
}

#[test]
fn xi_matches_quadrature_at_local_frequency() {
    let p = reference();
    let xi = xi_constants(p.omega_o(), &p.radiation.kernel).unwrap();
    let (s, c) = secular_projection(p.omega_o());
    assert!((xi.xi - s).abs() < 1e-6 && (xi.xi_bar - c).abs() < 1e-6);
    assert!((xi.xi - 0.1141).abs() < 1e-4);
}

#[test]
fn unforced_intrawell_rests() {
    let p = reference();
    let s = intrawell_steady_states(1.2, 0.0, &p).unwrap();
    assert_eq!(s.len(), 1);
    assert_eq!(s[0].a0, 0.0);
    assert!(s[0].stable);
    let times: Vec<f64> = (0..50).map(|k| k as f64 * 0.3).collect();
    let r = reconstruct_response(&s[0], 1.2, &p, Well::Lower, &times);
    assert!(r.y.iter().all(|&y| (y + p.y_s()).abs() < 1e-15));
}

#[test]
fn intrawell_requires_neighbourhood() {
    let p = reference();
    assert!(intrawell_steady_states(2.0 * p.omega_o() + 0.1, 0.01, &p).is_err());
}

#[test]
fn small_forcing_matches_linear_response() {
    let p = reference();
    let (w, g) = (2.0, 1e-5);
    let s = intrawell_steady_states(w, g, &p).unwrap();
    assert_eq!(s.len(), 1);
    let xi = xi_constants(p.omega_o(), &p.radiation.kernel).unwrap();
    let sigma = w - p.omega_o();
    let lin = (g / (2.0 * p.omega_o()))
        / ((sigma - p.delta1 * xi.xi / 2.0).powi(2) + (p.delta1 * xi.xi_bar / 2.0 + p.delta2 / 2.0).powi(2)).sqrt();
    assert!((s[0].a0 - lin).abs() < 1e-6 * lin);
    let expect = -(p.delta1 * xi.xi_bar + p.delta2) / 2.0;
    for z in s[0].eigenvalues {
        assert!((z.re - expect).abs() < 1e-6);
    }
}

#[test]
fn one_stable_resonant_root_at_high_frequency() {
    let p = reference();
    let g = p.g_wave(0.1, 1.5).unwrap();
    let s = intrawell_steady_states(1.5, g, &p).unwrap();
    assert_eq!(s.len(), 1);
    assert_eq!(s[0].branch, Branch::Resonant);
    assert!(s[0].stable);
}

#[test]
fn one_stable_large_orbit_at_062() {
    let p = reference();
    let g = p.g_wave(0.1, 0.62).unwrap();
    let s = interwell_steady_states(0.62, g, &p).unwrap();
    assert_eq!(s.len(), 1, "{s:?}");
    assert!(s[0].stable);
    let times: Vec<f64> = (0..200).map(|k| k as f64 * 2.0 * PI / 0.62 / 200.0).collect();
    let r = reconstruct_response(&s[0], 0.62, &p, Well::Upper, &times);
    assert!(r.y.iter().fold(0.0f64, |m, y| m.max(y.abs())) > p.y_s());
    assert!(r.y.iter().any(|&y| y < 0.0) && r.y.iter().any(|&y| y > 0.0));
}

#[test]
fn unforced_interwell_is_rest_only() {
    let s = interwell_steady_states(0.7, 0.0, &reference()).unwrap();
    assert_eq!(s.len(), 1);
    assert_eq!(s[0].a0, 0.0);
}

#[test]
fn middle_intrawell_root_is_saddle_and_count_changes_by_two() {
    let p = reference();
    let mut seen_three = false;
    let mut prev: Option<usize> = None;
    for k in 0..=160 {
        let w = 0.5 + k as f64 * 0.005;
        let g = p.g_wave(0.034, w).unwrap();
        let s = intrawell_steady_states(w, g, &p).unwrap();
        if s.len() == 3 {
            seen_three = true;
            assert!(s[0].stable && !s[1].stable, "at {w}: {s:?}");
            assert!(s[1].eigenvalues.iter().any(|z| z.re > 0.0 && z.im == 0.0));
        }
        if let Some(n) = prev {
            let d = (s.len() as i64 - n as i64).abs();
            assert!(d == 0 || d == 2, "root count jumped by {d} at {w}");
        }
        prev = Some(s.len());
    }
    assert!(seen_three);
}

#[test]
fn intrawell_mean_offset() {
    let p = reference();
    let g = p.g_wave(0.1, 1.5).unwrap();
    let s = intrawell_steady_states(1.5, g, &p).unwrap()[0];
    let n = 1000;
    let times: Vec<f64> = (0..n).map(|k| k as f64 * 2.0 * PI / 1.5 / n as f64).collect();
    for well in [Well::Upper, Well::Lower] {
        let r = reconstruct_response(&s, 1.5, &p, well, &times);
        let mean = r.y.iter().sum::<f64>() / n as f64 - well.center(&p);
        let expect = -well.eta(&p) * s.a0 * s.a0 / (2.0 * p.omega_o().powi(2));
        assert!((mean - expect).abs() < 1e-14);
    }
}

fn quadrature_power(state: &SteadyState, w: f64, p: &NondimParams) -> f64 {
    let n = 4096;
    let period = 2.0 * PI / w;
    let h = period / n as f64;
    let times: Vec<f64> = (0..=n + 1).map(|k| k as f64 * h).collect();
    let y = reconstruct_response(state, w, p, Well::Upper, &times).y;
    let mut acc = 0.0;
    for k in 0..n {
        let v = (y[k + 1] - y[(k + n - 1) % n]) / (2.0 * h);
        let v = if k == 0 { (y[1] - y[n - 1]) / (2.0 * h) } else { v };
        acc += v * v;
    }
    p.delta2 * acc / n as f64
}

#[test]
fn intrawell_power_closed_form_is_exact() {
    let p = reference();
    let g = p.g_wave(0.1, 1.5).unwrap();
    let s = intrawell_steady_states(1.5, g, &p).unwrap()[0];
    let q = quadrature_power(&s, 1.5, &p);
    assert!((average_power(&s, 1.5, &p) - q).abs() < 1e-6 * q);
}

#[test]
fn interwell_power_tracks_quadrature() {
    let p = reference();
    for w in [0.5, 0.62, 0.7] {
        let g = p.g_wave(0.1, w).unwrap();
        for s in interwell_steady_states(w, g, &p).unwrap() {
            let q = quadrature_power(&s, w, &p);
            let gap = (average_power(&s, w, &p) - q).abs() / q;
            assert!(gap < 0.05, "W={w} a={} gap={gap}", s.a0);
        }
    }
}

#[test]
fn power_quadruples_with_amplitude_at_small_amplitude() {
    let p = reference();
    let mk = |a0| SteadyState {
        a0,
        psi0: 0.0,
        branch: Branch::Resonant,
        stable: true,
        eigenvalues: [bpwa::numerics::Complex64::new(-1.0, 0.0); 2],
    };
    let r = average_power(&mk(2e-4), 1.2, &p) / average_power(&mk(1e-4), 1.2, &p);
    assert!((r - 4.0).abs() < 0.04);
}

#[test]
fn cwr_peak_sits_on_large_orbit() {
    let p = reference();
    let geo = bpwa::BuoyGeometry::default();
    let grid: Vec<f64> = (0..=180).map(|k| 0.3 + k as f64 * 0.01).collect();
    let rows = branch_sweep(&p, &geo, 0.1, &grid).unwrap();
    let best = rows
        .iter()
        .filter(|r| r.state.stable)
        .max_by(|a, b| a.cwr.total_cmp(&b.cwr))
        .unwrap();
    assert_eq!(best.state.branch, Branch::Large);
}

proptest! {
    #[test]
    fn steady_states_zero_slow_flow(w in 0.3f64..2.0, amp in 0.0f64..0.2) {
        let p = reference();
        let g = p.g_wave(amp, w).unwrap();
        let mut states = interwell_steady_states(w, g, &p).unwrap();
        if (w - p.omega_o()).abs() < p.omega_o() {
            states.extend(intrawell_steady_states(w, g, &p).unwrap());
        }
        for s in states {
            let (r1, r2) = slow_flow_residuals(&s, w, g, &p).unwrap();
            prop_assert!(r1.abs() < 1e-10 && r2.abs() < 1e-10, "{:?} {} {}", s, r1, r2);
            let st = local_stability(&s, w, g, &p).unwrap();
            prop_assert_eq!(st.stable, s.stable);
            prop_assert!(s.a0 >= 0.0 && s.psi0 > -PI - 1e-12 && s.psi0 <= PI);
        }
    }

    #[test]
    fn phase_recovery_is_unit(w in 0.8f64..1.9, amp in 0.001f64..0.2) {
        let p = reference();
        let g = p.g_wave(amp, w).unwrap();
        let flow = intrawell_flow(w, g, &p).unwrap();
        for s in intrawell_steady_states(w, g, &p).unwrap() {
            let sin = flow.zeta * s.a0 / flow.force;
            let cos = -flow.q_of(s.a0 * s.a0) * s.a0 / flow.force;
            prop_assert!((sin * sin + cos * cos - 1.0).abs() < 1e-12);
        }
    }
}
