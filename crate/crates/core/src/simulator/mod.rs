//! Time-domain integration of the full absorber model, stroboscopic sampling,
//! response classification, numeric power and basins of attraction.

mod classify;
mod maps;

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::era::fmt_num;
use crate::error::{Error, Result};
use crate::hydro::NondimParams;
use crate::numerics::{OdeSystem, Rk4, Trajectory};

pub use classify::{classify, cluster_count, MotionLabel, ResponseClassification, CLUSTER_RADIUS, MAX_PERIOD};
pub use maps::{basin_map, frequency_sweep, write_strobe_csv, BasinLabel, BasinMap, IcPolicy, SweepRow};

/// Number of state components: `Y, Y', x1, x2, x3, v`.
pub const STATE_DIM: usize = 6;

/// Displacement, velocity, radiation states and voltage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FullState {
    pub y: f64,
    pub ydot: f64,
    pub xr: [f64; 3],
    pub v: f64,
}

impl FullState {
    pub fn new(y: f64, ydot: f64) -> Self {
        Self { y, ydot, ..Self::default() }
    }

    /// Rest in the `+Y_s` (`sign >= 0`) or `-Y_s` well.
    pub fn at_well(params: &NondimParams, sign: f64) -> Self {
        Self::new(if sign >= 0.0 { params.y_s() } else { -params.y_s() }, 0.0)
    }

    pub fn to_array(&self) -> [f64; STATE_DIM] {
        [self.y, self.ydot, self.xr[0], self.xr[1], self.xr[2], self.v]
    }

    pub fn from_slice(x: &[f64]) -> Result<Self> {
        if x.len() != STATE_DIM {
            return Err(Error::InvalidInput(format!("state needs {STATE_DIM} components, got {}", x.len())));
        }
        Ok(Self {
            y: x[0],
            ydot: x[1],
            xr: [x[2], x[3], x[4]],
            v: x[5],
        })
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

/// Mechanical energy `Y'^2/2 + U(Y)`.
pub fn energy(params: &NondimParams, y: f64, ydot: f64) -> f64 {
    0.5 * ydot * ydot + params.potential(y)
}

/// Right-hand side of the forced model with the radiation convolution
/// replaced by its state-space realization.
pub struct Plant {
    delta1: f64,
    delta2: f64,
    wn2: f64,
    gamma: f64,
    theta: f64,
    a: [[f64; 3]; 3],
    b: [f64; 3],
    c: [f64; 3],
    omega: f64,
    g_wave: f64,
}

impl Plant {
    pub fn new(params: &NondimParams, omega: f64, g_wave: f64) -> Result<Self> {
        let r = &params.radiation;
        if r.order() != 3 {
            return Err(Error::InvalidInput(format!(
                "simulator needs a third-order radiation model, got order {}",
                r.order()
            )));
        }
        if !omega.is_finite() || !g_wave.is_finite() {
            return Err(Error::InvalidInput("forcing must be finite".into()));
        }
        let mut a = [[0.0; 3]; 3];
        let (mut b, mut c) = ([0.0; 3], [0.0; 3]);
        for i in 0..3 {
            b[i] = r.b[(i, 0)];
            c[i] = r.c[(0, i)];
            for j in 0..3 {
                a[i][j] = r.a[(i, j)];
            }
        }
        Ok(Self {
            delta1: params.delta1,
            delta2: params.delta2,
            wn2: params.omega_n * params.omega_n,
            gamma: params.gamma,
            theta: params.theta,
            a,
            b,
            c,
            omega,
            g_wave,
        })
    }
}

impl OdeSystem for Plant {
    fn dim(&self) -> usize {
        STATE_DIM
    }

    fn rhs(&self, t: f64, x: &[f64], d: &mut [f64]) {
        let (y, yd) = (x[0], x[1]);
        let xr = [x[2], x[3], x[4]];
        let conv = self.c[0] * xr[0] + self.c[1] * xr[1] + self.c[2] * xr[2];
        d[0] = yd;
        d[1] = -self.delta1 * conv - self.delta2 * yd + self.wn2 * y - self.gamma * y * y * y
            + self.g_wave * (self.omega * t).cos();
        for i in 0..3 {
            d[2 + i] = self.a[i][0] * xr[0] + self.a[i][1] * xr[1] + self.a[i][2] * xr[2] + self.b[i] * yd;
        }
        d[5] = -self.theta * x[5] + yd;
    }
}

/// Step and window settings for forced runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    /// RK4 steps per forcing period; a power of two keeps windows FFT-ready.
    pub steps_per_period: usize,
    /// Transient periods integrated without storage.
    pub discard_periods: usize,
    /// Recorded steady-state periods.
    pub window_periods: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            steps_per_period: 256,
            discard_periods: 100,
            window_periods: 128,
        }
    }
}

impl SimOptions {
    pub fn validate(&self) -> Result<()> {
        if self.steps_per_period < 8 || self.window_periods == 0 {
            return Err(Error::InvalidInput(format!(
                "need at least 8 steps per period and a nonempty window, got {self:?}"
            )));
        }
        Ok(())
    }
}

fn period(omega: f64) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::InvalidInput(format!("forcing frequency must be positive, got {omega}")));
    }
    Ok(2.0 * PI / omega)
}

/// Fixed-step RK4 trajectory of the full model over `[0, t_end]`. The step is
/// `T / 256` shortened uniformly so that `t_end` is hit exactly; every step is
/// recorded. A trajectory whose length is a whole number of periods therefore
/// lands on every stroboscopic time.
pub fn simulate(
    params: &NondimParams,
    omega: f64,
    g_wave: f64,
    initial: &FullState,
    t_end: f64,
) -> Result<Trajectory> {
    let t = period(omega)?;
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidInput(format!("end time must be positive, got {t_end}")));
    }
    let steps = (t_end / (t / SimOptions::default().steps_per_period as f64) - 1e-9).ceil().max(1.0) as usize;
    record(params, omega, g_wave, initial, 0.0, t_end, steps)
}

fn record(
    params: &NondimParams,
    omega: f64,
    g_wave: f64,
    initial: &FullState,
    t0: f64,
    t1: f64,
    steps: usize,
) -> Result<Trajectory> {
    let plant = Plant::new(params, omega, g_wave)?;
    let mut x = initial.to_array();
    let mut traj = Trajectory {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
    };
    traj.times.push(t0);
    traj.states.push(x.to_vec());
    Rk4::new(STATE_DIM).run(&plant, t0, t1, steps, &mut x, |t, s| {
        traj.times.push(t);
        traj.states.push(s.to_vec());
    })?;
    Ok(traj)
}

/// Integrates `periods` whole forcing periods from `t0 = start_period T` without
/// storing anything and returns the final state.
fn advance(
    params: &NondimParams,
    omega: f64,
    g_wave: f64,
    initial: &FullState,
    start_period: usize,
    periods: usize,
    steps_per_period: usize,
) -> Result<FullState> {
    let t = period(omega)?;
    let plant = Plant::new(params, omega, g_wave)?;
    let mut x = initial.to_array();
    let mut rk = Rk4::new(STATE_DIM);
    for k in start_period..start_period + periods {
        rk.run(&plant, k as f64 * t, (k + 1) as f64 * t, steps_per_period, &mut x, |_, _| {})?;
    }
    FullState::from_slice(&x)
}

/// Runs the transient, then records the steady window. The returned
/// trajectory starts at `discard T` and spans `window` periods.
pub fn steady_response(
    params: &NondimParams,
    omega: f64,
    g_wave: f64,
    initial: &FullState,
    opts: &SimOptions,
) -> Result<Trajectory> {
    opts.validate()?;
    let t = period(omega)?;
    let start = advance(params, omega, g_wave, initial, 0, opts.discard_periods, opts.steps_per_period)?;
    let t0 = opts.discard_periods as f64 * t;
    let t1 = (opts.discard_periods + opts.window_periods) as f64 * t;
    record(params, omega, g_wave, &start, t0, t1, opts.window_periods * opts.steps_per_period)
}

/// Minimum number of strobe samples for classification use.
pub const MIN_STROBE: usize = 128;

/// `(Y, Y')` at `t = k T` for every whole period `k >= discard` present in
/// the trajectory.
pub fn stroboscopic_map(traj: &Trajectory, omega: f64, discard: usize) -> Result<Vec<[f64; 2]>> {
    let t = period(omega)?;
    let (Some(&first), Some(&last)) = (traj.times.first(), traj.times.last()) else {
        return Err(Error::InvalidInput("empty trajectory".into()));
    };
    let k0 = ((first / t) - 1e-9).ceil().max(discard as f64) as usize;
    let k1 = ((last / t) + 1e-9).floor() as usize;
    if k1 < k0 || k1 - k0 + 1 < MIN_STROBE {
        return Err(Error::InvalidInput(format!(
            "trajectory holds {} strobe periods after discarding {discard}, need {MIN_STROBE}",
            (k1 + 1).saturating_sub(k0)
        )));
    }
    let mut out = Vec::with_capacity(k1 - k0 + 1);
    let mut idx = 0;
    for k in k0..=k1 {
        let target = k as f64 * t;
        let tol = 1e-9 * target.abs().max(1.0);
        while idx < traj.times.len() && traj.times[idx] < target - tol {
            idx += 1;
        }
        if idx == traj.times.len() || (traj.times[idx] - target).abs() > tol {
            return Err(Error::InvalidInput(format!("trajectory has no sample at strobe time {target}")));
        }
        let s = &traj.states[idx];
        out.push([s[0], s[1]]);
    }
    Ok(out)
}

/// Trapezoidal mean of `delta2 Y'^2` over the last `window` whole periods.
pub fn numeric_power(traj: &Trajectory, omega: f64, params: &NondimParams, window: usize) -> Result<f64> {
    let t = period(omega)?;
    let Some(&t_end) = traj.times.last() else {
        return Err(Error::InvalidInput("empty trajectory".into()));
    };
    if window == 0 {
        return Err(Error::InvalidInput("power window must hold at least one period".into()));
    }
    let k1 = ((t_end / t) + 1e-9).floor();
    let (a, b) = ((k1 - window as f64) * t, k1 * t);
    let tol = 1e-9 * b.abs().max(1.0);
    if a < traj.times[0] - tol {
        return Err(Error::InvalidInput(format!("trajectory is shorter than {window} periods")));
    }
    let mut acc = 0.0;
    for i in 1..traj.len() {
        let (ta, tb) = (traj.times[i - 1], traj.times[i]);
        if ta < a - tol || tb > b + tol {
            continue;
        }
        let (ya, yb) = (traj.states[i - 1][1], traj.states[i][1]);
        acc += 0.5 * (ya * ya + yb * yb) * (tb - ta);
    }
    Ok(params.delta2 * acc / (b - a))
}

/// `t,Y,Ydot,v` rows.
pub fn write_trajectory_csv<W: Write>(mut out: W, traj: &Trajectory) -> Result<()> {
    writeln!(out, "t,Y,Ydot,v")?;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        writeln!(out, "{},{},{},{}", fmt_num(*t), fmt_num(s[0]), fmt_num(s[1]), fmt_num(s[5]))?;
    }
    Ok(())
}
