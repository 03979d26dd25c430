use crate::error::{Error, Result};

/// First-order system `x' = f(t, x)`.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, x: &[f64], dxdt: &mut [f64]);
}

/// Adapts a closure into an [`OdeSystem`].
pub struct FnSystem<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(f64, &[f64], &mut [f64])> FnSystem<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(f64, &[f64], &mut [f64])> OdeSystem for FnSystem<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn rhs(&self, t: f64, x: &[f64], dxdt: &mut [f64]) {
        (self.f)(t, x, dxdt)
    }
}

/// Classical fourth-order Runge-Kutta stepper with reusable scratch space.
pub struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4 {
    pub fn new(dim: usize) -> Self {
        Self {
            k1: vec![0.0; dim],
            k2: vec![0.0; dim],
            k3: vec![0.0; dim],
            k4: vec![0.0; dim],
            tmp: vec![0.0; dim],
        }
    }

    /// Advance `x` in place from `t` to `t + h`.
    pub fn step<S: OdeSystem + ?Sized>(&mut self, sys: &S, t: f64, h: f64, x: &mut [f64]) {
        let n = x.len();
        sys.rhs(t, x, &mut self.k1);
        for i in 0..n {
            self.tmp[i] = x[i] + 0.5 * h * self.k1[i];
        }
        sys.rhs(t + 0.5 * h, &self.tmp, &mut self.k2);
        for i in 0..n {
            self.tmp[i] = x[i] + 0.5 * h * self.k2[i];
        }
        sys.rhs(t + 0.5 * h, &self.tmp, &mut self.k3);
        for i in 0..n {
            self.tmp[i] = x[i] + h * self.k3[i];
        }
        sys.rhs(t + h, &self.tmp, &mut self.k4);
        for i in 0..n {
            x[i] += h / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
    }

    /// Integrate over `[t0, t1]` in `steps` equal steps, calling `observe`
    /// after every step. The step count is fixed by the caller so that
    /// period boundaries land exactly.
    pub fn run<S, O>(
        &mut self,
        sys: &S,
        t0: f64,
        t1: f64,
        steps: usize,
        x: &mut [f64],
        mut observe: O,
    ) -> Result<()>
    where
        S: OdeSystem + ?Sized,
        O: FnMut(f64, &[f64]),
    {
        let h = (t1 - t0) / steps as f64;
        for k in 0..steps {
            let t = t0 + k as f64 * h;
            self.step(sys, t, h, x);
            let tn = if k + 1 == steps { t1 } else { t0 + (k + 1) as f64 * h };
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::Divergence { time: tn });
            }
            observe(tn, x);
        }
        Ok(())
    }
}

/// Sampled solution.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&[f64]> {
        self.states.last().map(Vec::as_slice)
    }

    /// Component `i` of every sample.
    pub fn component(&self, i: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[i]).collect()
    }
}

/// Fixed-step RK4 from `t0` to `t1`, sampled at `t0 + k dt`; the last step is
/// shortened to land on `t1`.
pub fn integrate_ode<S: OdeSystem + ?Sized>(
    sys: &S,
    t0: f64,
    t1: f64,
    dt: f64,
    x0: &[f64],
) -> Result<Trajectory> {
    if !(dt > 0.0) || !(t1 > t0) {
        return Err(Error::InvalidInput(format!(
            "need dt > 0 and t1 > t0 (dt={dt}, t0={t0}, t1={t1})"
        )));
    }
    if x0.len() != sys.dim() {
        return Err(Error::InvalidInput(format!(
            "state has {} entries, system dimension is {}",
            x0.len(),
            sys.dim()
        )));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("initial state must be finite".into()));
    }
    let mut rk = Rk4::new(sys.dim());
    let mut x = x0.to_vec();
    let full = ((t1 - t0) / dt).floor() as usize;
    let mut traj = Trajectory {
        times: Vec::with_capacity(full + 2),
        states: Vec::with_capacity(full + 2),
    };
    traj.times.push(t0);
    traj.states.push(x.clone());
    let mut t = t0;
    let mut k = 0usize;
    loop {
        let next = t0 + (k + 1) as f64 * dt;
        // Merge a sliver of a final step into the previous one.
        let (h, t_next) = if next >= t1 - 1e-9 * dt { (t1 - t, t1) } else { (next - t, next) };
        if h <= 0.0 {
            break;
        }
        rk.step(sys, t, h, &mut x);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { time: t_next });
        }
        t = t_next;
        k += 1;
        traj.times.push(t);
        traj.states.push(x.clone());
        if t >= t1 {
            break;
        }
    }
    Ok(traj)
}
