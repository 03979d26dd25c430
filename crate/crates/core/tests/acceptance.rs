//! Acceptance run: one PASS/FAIL line per criterion with the measured values.
//! Red criteria are reported, not asserted; a panic here means the run
//! itself broke.

use std::f64::consts::PI;
use std::time::Instant;

use bpwa::bifurcation::{monodromy, pd_locus, row_stability, write_loci_csv, HarmonicScale};
use bpwa::era::{build_hankel, realize, to_continuous, validate_roundtrip, ImpulseSequence, DEFAULT_DT, DEFAULT_HANKEL, DEFAULT_ORDER};
use bpwa::hydro::{KernelConstants, NondimParams, RadiationRealization};
use bpwa::mms::{branch_sweep, intrawell_steady_states, slow_flow_residuals, Branch};
use bpwa::report::{build_design_map, DesignMap, RunConfig};
use bpwa::simulator::{
    classify, energy, frequency_sweep, numeric_power, simulate, steady_response, write_strobe_csv, FullState,
    IcPolicy, MotionLabel, SimOptions, SweepRow,
};
use bpwa::BuoyGeometry;

fn grid(a: f64, b: f64, step: f64) -> Vec<f64> {
    let n = ((b - a) / step + 1e-9).floor() as usize;
    (0..=n).map(|k| ((a + k as f64 * step) * 1e9).round() / 1e9).collect()
}

fn verdict(n: usize, pass: bool, what: &str, detail: String) -> bool {
    println!("criterion {n} {}: {what}: {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

fn kernel_fidelity() -> bool {
    let t0 = Instant::now();
    let gap = RadiationRealization::hemisphere().kernel_gap(20.0, 0.01);
    let secs = t0.elapsed().as_secs_f64();
    verdict(1, gap < 1e-2 && secs < 1.0, "kernel fidelity", format!("max gap {gap:.2e}, {secs:.3} s"))
}

fn era_roundtrip() -> bool {
    let t0 = Instant::now();
    let seq = ImpulseSequence::from_damping_curve(&KernelConstants::HEMISPHERE, DEFAULT_DT, 2 * DEFAULT_HANKEL + 1);
    let pair = build_hankel(&seq, DEFAULT_HANKEL, DEFAULT_HANKEL).expect("hankel");
    let cont = to_continuous(&realize(&pair, DEFAULT_ORDER).expect("realize"), seq.dt).expect("continuous");
    let truth = ImpulseSequence::from_kernel(&KernelConstants::HEMISPHERE, 0.05, 401);
    let rep = validate_roundtrip(&cont, &truth);
    let secs = t0.elapsed().as_secs_f64();
    let near = [(-0.8, 0.0), (-0.8, 0.8), (-0.8, -0.8)].iter().all(|&(re, im)| {
        rep.eigenvalues
            .iter()
            .any(|z| (z.re - re).hypot(z.im - im) < 0.05 * f64::hypot(re, im))
    });
    let eig: Vec<String> = rep.eigenvalues.iter().map(|z| format!("{:.3}{:+.3}i", z.re, z.im)).collect();
    verdict(
        2,
        rep.max_abs_error < 1e-2 && near && secs < 5.0,
        "ERA round trip",
        format!("error {:.2e}, eigenvalues [{}], {secs:.2} s", rep.max_abs_error, eig.join(", ")),
    )
}

/// Half the peak-to-peak `Y` of the settled run started in the upper well.
fn simulated_amplitude(p: &NondimParams, w: f64, g: f64) -> (f64, MotionLabel) {
    let tr = steady_response(p, w, g, &FullState::at_well(p, 1.0), &SimOptions::default()).expect("simulation");
    let y = tr.component(0);
    let (lo, hi) = y.iter().fold((f64::MAX, f64::MIN), |(l, h), v| (l.min(*v), h.max(*v)));
    (0.5 * (hi - lo), classify(&tr, w, p).expect("classify").label)
}

fn mms_vs_simulation() -> bool {
    let t0 = Instant::now();
    let p = NondimParams::reference();
    let mut ok = true;
    let mut parts = Vec::new();
    for w in [1.3, 1.5, 1.7, 2.0] {
        let g = p.g_wave(0.1, w).expect("forcing");
        let (sim, label) = simulated_amplitude(&p, w, g);
        let states = intrawell_steady_states(w, g, &p).expect("states");
        let stable: Vec<_> = states.iter().filter(|s| s.stable).collect();
        let pick = stable
            .iter()
            .find(|s| s.branch == Branch::Resonant)
            .or_else(|| stable.first())
            .copied();
        match pick {
            Some(s) => {
                let rel = (sim - s.a0).abs() / s.a0;
                ok &= rel < 0.1 && label == MotionLabel::P1Intra;
                parts.push(format!("W={w}: mms {:.4} sim {sim:.4} ({:.1}%, {label})", s.a0, 100.0 * rel));
            }
            None => {
                ok = false;
                parts.push(format!("W={w}: no stable intra-well state"));
            }
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    verdict(3, ok && secs < 60.0, "MMS vs simulation on B_r", format!("{}; {secs:.1} s", parts.join("; ")))
}

fn sweep(omegas: &[f64], policy: IcPolicy) -> Vec<SweepRow> {
    frequency_sweep(&NondimParams::reference(), 0.1, omegas, policy, &SimOptions::default()).expect("sweep")
}

fn period_doubling(rows: &[SweepRow]) -> bool {
    let p = NondimParams::reference();
    let pd = pd_locus(&p, &grid(0.9, 1.6, 0.01)).expect("pd locus");
    let crossings = pd.crossings(0.1, 0.015);
    let Some(&analytic) = crossings.first() else {
        return verdict(4, false, "period-doubling onset", "pd locus does not reach A/R=0.1".into());
    };
    // Walk down from the top of the grid to the first row that is no longer a single intra-well orbit.
    let onset = rows.iter().rev().find(|r| r.label != Some(MotionLabel::P1Intra));
    let (numeric, label) = match onset {
        Some(r) => (r.omega, r.label.map_or("diverged".to_string(), |l| l.to_string())),
        None => (f64::NAN, "none".to_string()),
    };
    let two = rows
        .iter()
        .filter(|r| (r.omega - analytic).abs() <= 0.1 + 1e-9)
        .find(|r| r.label == Some(MotionLabel::Periodic(2)))
        .map(|r| r.omega);
    let pass = crossings.len() == 1
        && (analytic - 1.2).abs() <= 0.1
        && (numeric - analytic).abs() <= 0.1 + 1e-9
        && two.is_some();
    verdict(
        4,
        pass,
        "period-doubling onset",
        format!(
            "analytic {analytic:.3}; numeric onset {numeric:.2} ({label}); 2-cluster strobe within 0.1 at {}",
            two.map_or("none".into(), |w| format!("{w:.2}"))
        ),
    )
}

/// Periodic windows up to this wide inside a chaotic band do not split it.
const WINDOW_GAP: f64 = 0.05;

fn chaos_window(rows: &[SweepRow]) -> bool {
    let chaotic: Vec<f64> = rows
        .iter()
        .filter(|r| r.label == Some(MotionLabel::Chaotic))
        .map(|r| r.omega)
        .collect();
    let mut bands: Vec<(f64, f64)> = Vec::new();
    for w in chaotic {
        match bands.last_mut() {
            Some(b) if w - b.1 <= WINDOW_GAP + 1e-9 => b.1 = w,
            _ => bands.push((w, w)),
        }
    }
    match bands.iter().max_by(|a, b| (a.1 - a.0).total_cmp(&(b.1 - b.0))) {
        Some(&(lo, hi)) => verdict(
            5,
            (lo - 0.9).abs() <= 0.1 + 1e-9,
            "chaos window",
            format!("non-clustering strobes on [{lo:.2}, {hi:.2}] (periodic windows up to {WINDOW_GAP} merged)"),
        ),
        None => verdict(5, false, "chaos window", "no non-clustering strobes".into()),
    }
}

fn effective_bandwidth() -> bool {
    let p = NondimParams::reference();
    let row = row_stability(&p, &grid(0.2, 2.0, 0.01), 0.1, HarmonicScale::default()).expect("row stability");
    let sb1 = row.sb1.map(|q| q.omega);
    let sb2 = row.sb2.map(|q| q.omega);
    let label = |w: f64| {
        let g = p.g_wave(0.1, w).expect("forcing");
        let tr = steady_response(&p, w, g, &FullState::default(), &SimOptions::default()).expect("simulation");
        classify(&tr, w, &p).expect("classify").label
    };
    let (l42, l62, l80) = (label(0.42), label(0.62), label(0.8));
    let sym = MotionLabel::P1InterSymmetric;
    let pass = sb1.is_some_and(|w| w < 0.62)
        && sb2.is_some_and(|w| w > 0.62)
        && l62 == sym
        && l42 != sym
        && l80 != sym;
    let show = |o: Option<f64>| o.map_or("none".to_string(), |w| format!("{w:.3}"));
    verdict(
        6,
        pass,
        "effective bandwidth",
        format!("SB1 {} SB2 {}; W=0.42 {l42}, W=0.62 {l62}, W=0.8 {l80}", show(sb1), show(sb2)),
    )
}

fn design_map(gamma: &str) -> (DesignMap, f64) {
    let t0 = Instant::now();
    let cfg = RunConfig::with(&[("gamma", gamma), ("amp", "0..0.2:0.005"), ("omega", "0.2..2:0.01")]).expect("config");
    let map = build_design_map(&cfg).expect("design map");
    (map, t0.elapsed().as_secs_f64())
}

fn design_thresholds(map: &DesignMap) -> bool {
    let onset = map.bl_onset();
    let (b15, b19) = (map.bandwidth_at(0.15).unwrap_or(0.0), map.bandwidth_at(0.19).unwrap_or(0.0));
    let rel = (b15 - b19).abs() / b15.max(b19);
    let pass = onset.is_some_and(|a| (a - 0.05).abs() <= 0.02 + 1e-9) && b15 > 0.0 && rel < 0.15;
    verdict(
        7,
        pass,
        "design-map thresholds",
        format!(
            "B_L onset {}; bandwidth {b15:.2} at 0.15, {b19:.2} at 0.19 ({:.1}%)",
            onset.map_or("none".into(), |a| format!("{a}")),
            100.0 * rel
        ),
    )
}

/// Mean simulated power over the `B_L` cells of the `A/R = 0.15` row.
fn bandwidth_power(gamma: f64, map: &DesignMap) -> Option<f64> {
    let mut p = NondimParams::reference();
    p.gamma = gamma;
    let vals: Vec<f64> = map
        .bl_omegas(0.15)
        .into_iter()
        .filter_map(|w| {
            let g = p.g_wave(0.15, w).ok()?;
            let tr = steady_response(&p, w, g, &FullState::default(), &SimOptions::default()).ok()?;
            numeric_power(&tr, w, &p, SimOptions::default().window_periods).ok()
        })
        .collect();
    (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
}

fn potential_shape(maps: &[(f64, DesignMap, f64)]) -> bool {
    let t0 = Instant::now();
    let crit: Vec<_> = maps.iter().map(|(_, m, _)| &m.critical).collect();
    let falling = |f: &dyn Fn(usize) -> Option<f64>| {
        (0..maps.len()).all(|i| f(i).is_some()) && (1..maps.len()).all(|i| f(i).unwrap() < f(i - 1).unwrap())
    };
    let cr1_ok = falling(&|i| crit[i].cr1);
    let cr2_ok = falling(&|i| crit[i].cr2);
    let power: Vec<Option<f64>> = maps.iter().map(|(g, m, _)| bandwidth_power(*g, m)).collect();
    let power_ok = matches!((power.first(), power.last()), (Some(Some(a)), Some(Some(b))) if a > b);
    let secs = maps.iter().map(|(_, _, s)| s).sum::<f64>() + t0.elapsed().as_secs_f64();
    let fmt = |o: Option<f64>| o.map_or("none".to_string(), |v| format!("{v:.4}"));
    let parts: Vec<String> = maps
        .iter()
        .zip(&power)
        .map(|((g, m, _), pw)| {
            format!(
                "gamma {g}: cr1 {} cr2 {} power {}",
                fmt(m.critical.cr1),
                fmt(m.critical.cr2),
                pw.map_or("none".to_string(), |v| format!("{v:.3e}"))
            )
        })
        .collect();
    verdict(
        8,
        cr1_ok && cr2_ok && power_ok && secs < 3600.0,
        "potential-shape study",
        format!("{}; {secs:.0} s", parts.join("; ")),
    )
}

fn property_suite(map: &DesignMap) -> bool {
    let p = NondimParams::reference();
    let geo = BuoyGeometry::default();
    let mut worst_residual = 0.0f64;
    let omegas = grid(0.3, 2.0, 0.01);
    for amp in [0.02, 0.1, 0.19] {
        for r in branch_sweep(&p, &geo, amp, &omegas).expect("branches") {
            let g = p.g_wave(amp, r.omega).expect("forcing");
            let (r1, r2) = slow_flow_residuals(&r.state, r.omega, g, &p).expect("residual");
            worst_residual = worst_residual.max(r1.abs()).max(r2.abs());
        }
    }

    let mut worst_liouville = 0.0f64;
    for (w, a) in [(0.4, 0.2), (0.62, 0.25), (0.8, 0.3), (1.0, 0.1), (1.6, 0.35)] {
        let phi = monodromy(w, a, &p).expect("monodromy");
        let expect = ((-p.delta2 + p.radiation.a.trace()) * PI / w).exp();
        worst_liouville = worst_liouville.max((phi.determinant() - expect).abs() / expect);
    }

    let mut c = p.clone();
    c.delta1 = 0.0;
    c.delta2 = 0.0;
    let mut worst_drift = 0.0f64;
    for (y0, v0) in [(0.05, 0.0), (0.2, 0.1), (-0.3, 0.05)] {
        // Default stepping gives a step of 1e-3 at this frequency.
        let tr = simulate(&c, 2.0 * PI / 0.256, 0.0, &FullState::new(y0, v0), 100.0).expect("simulation");
        let e0 = energy(&c, y0, v0);
        for s in &tr.states {
            worst_drift = worst_drift.max((energy(&c, s[0], s[1]) - e0).abs());
        }
    }

    let strobe = |rows: &[SweepRow]| {
        let mut buf = Vec::new();
        write_strobe_csv(&mut buf, rows).expect("csv");
        buf
    };
    let w = grid(0.6, 1.4, 0.1);
    let same_sweep = strobe(&sweep(&w, IcPolicy::ContinuationDown)) == strobe(&sweep(&w, IcPolicy::ContinuationDown));
    let loci_csv = |m: &DesignMap| {
        let mut buf = Vec::new();
        write_loci_csv(&mut buf, &m.loci).expect("csv");
        m.write_csv(&mut buf).expect("csv");
        buf
    };
    let same_map = loci_csv(map) == loci_csv(&design_map("50").0);
    let cfg_a = RunConfig::with(&[("gamma", "50"), ("amp", "0.1")]).expect("config");
    let cfg_b = RunConfig::with(&[("amp", "0.1"), ("gamma", "50")]).expect("config");
    let same_hash = cfg_a.hash() == cfg_b.hash();

    verdict(
        9,
        worst_residual < 1e-10
            && worst_liouville < 1e-6
            && worst_drift < 1e-7
            && same_sweep
            && same_map
            && same_hash,
        "property suite",
        format!(
            "slow-flow residual {worst_residual:.1e}, Liouville {worst_liouville:.1e}, energy drift {worst_drift:.1e}, \
             repeat sweep {}, repeat design map {}, config hash {}",
            if same_sweep { "identical" } else { "differs" },
            if same_map { "identical" } else { "differs" },
            if same_hash { "stable" } else { "unstable" },
        ),
    )
}

fn main() {
    // Test harness flags such as --list or a name filter are accepted and ignored.
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let mut passed = 0;
    passed += kernel_fidelity() as usize;
    passed += era_roundtrip() as usize;
    passed += mms_vs_simulation() as usize;
    let rows = sweep(&grid(0.4, 1.6, 0.01), IcPolicy::FixedZero);
    passed += period_doubling(&rows) as usize;
    passed += chaos_window(&rows) as usize;
    passed += effective_bandwidth() as usize;
    let maps: Vec<(f64, DesignMap, f64)> = ["30", "50", "90"]
        .iter()
        .map(|g| {
            let (m, s) = design_map(g);
            (g.parse().unwrap(), m, s)
        })
        .collect();
    passed += design_thresholds(&maps[1].1) as usize;
    passed += potential_shape(&maps) as usize;
    passed += property_suite(&maps[1].1) as usize;
    println!("acceptance: {passed}/9 criteria pass");
}
