use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{eigenvalues, DenseMatrix};

/// Constants of `h(t) = exp(-mu t) (l1 + l2 cos(mu t) + l3 sin(mu t))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelConstants {
    pub mu: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
}

impl KernelConstants {
    /// Fitted constants for a floating hemisphere.
    pub const HEMISPHERE: Self = Self {
        mu: 0.8,
        lambda1: -0.44,
        lambda2: 0.62,
        lambda3: 0.24,
    };

    pub fn impulse(&self, t: f64) -> f64 {
        let mt = self.mu * t;
        (-mt).exp() * (self.lambda1 + self.lambda2 * mt.cos() + self.lambda3 * mt.sin())
    }

    /// `int_0^inf h(t) cos(w t) dt`, the nondimensional radiation damping.
    pub fn cosine_transform(&self, w: f64) -> f64 {
        let m = self.mu;
        let d = 4.0 * m.powi(4) + w.powi(4);
        self.lambda1 * m / (m * m + w * w)
            + self.lambda2 * m * (2.0 * m * m + w * w) / d
            + self.lambda3 * (2.0 * m.powi(3) - m * w * w) / d
    }

    /// `int_0^inf h(t) sin(w t) dt`.
    pub fn sine_transform(&self, w: f64) -> f64 {
        let m = self.mu;
        let d = 4.0 * m.powi(4) + w.powi(4);
        self.lambda1 * w / (m * m + w * w)
            + self.lambda2 * w.powi(3) / d
            + self.lambda3 * 2.0 * m * m * w / d
    }
}

impl Default for KernelConstants {
    fn default() -> Self {
        Self::HEMISPHERE
    }
}

/// Continuous state-space model of the radiation convolution
/// (`x' = A x + B u`, `y = C x`) together with the analytic kernel it fits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiationRealization {
    pub a: DenseMatrix,
    pub b: DenseMatrix,
    pub c: DenseMatrix,
    pub kernel: KernelConstants,
}

impl RadiationRealization {
    /// Third-order realization of the hemisphere kernel.
    pub fn hemisphere() -> Self {
        Self {
            a: DenseMatrix::from_rows(&[
                &[-0.8, 0.8, 0.8],
                &[-0.8, 0.0, 0.0],
                &[-0.8, 0.0, -1.6],
            ]),
            b: DenseMatrix::column_vector(&[-0.48, -0.02, -0.22]),
            c: DenseMatrix::row_vector(&[-0.46, 0.0, 0.18]),
            kernel: KernelConstants::HEMISPHERE,
        }
    }

    /// Validated constructor: shapes must agree and `A` must be Hurwitz.
    pub fn new(
        a: DenseMatrix,
        b: DenseMatrix,
        c: DenseMatrix,
        kernel: KernelConstants,
    ) -> Result<Self> {
        let n = a.rows();
        if !a.is_square() || b.rows() != n || b.cols() != 1 || c.rows() != 1 || c.cols() != n {
            return Err(Error::InvalidInput(format!(
                "realization shapes A {}x{}, B {}x{}, C {}x{} do not agree",
                a.rows(),
                a.cols(),
                b.rows(),
                b.cols(),
                c.rows(),
                c.cols()
            )));
        }
        if let Some(ev) = eigenvalues(&a).into_iter().find(|z| z.re >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "realization is not stable: eigenvalue {} + {}i",
                ev.re, ev.im
            )));
        }
        Ok(Self { a, b, c, kernel })
    }

    pub fn order(&self) -> usize {
        self.a.rows()
    }

    pub fn b_vec(&self) -> Vec<f64> {
        self.b.column(0)
    }

    pub fn c_vec(&self) -> Vec<f64> {
        self.c.row(0).to_vec()
    }

    /// `C exp(A t) B`.
    pub fn state_space_response(&self, t: f64) -> f64 {
        let e = self.a.scale(t).expm();
        (&(&self.c * &e) * &self.b)[(0, 0)]
    }

    /// Samples of `C exp(A k dt) B` for `k = 0..n`, by repeated stepping.
    pub fn state_space_samples(&self, dt: f64, n: usize) -> Vec<f64> {
        let step = self.a.scale(dt).expm();
        let c = self.c_vec();
        let mut x = self.b_vec();
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            out.push(c.iter().zip(&x).map(|(a, b)| a * b).sum());
            x = step.matvec(&x);
        }
        out
    }

    /// Largest gap between the analytic kernel and the state-space response on
    /// `[0, t_end]` sampled every `dt`.
    pub fn kernel_gap(&self, t_end: f64, dt: f64) -> f64 {
        let n = (t_end / dt).round() as usize + 1;
        self.state_space_samples(dt, n)
            .iter()
            .enumerate()
            .map(|(k, h)| (h - self.kernel.impulse(k as f64 * dt)).abs())
            .fold(0.0, f64::max)
    }
}

impl Default for RadiationRealization {
    fn default() -> Self {
        Self::hemisphere()
    }
}

/// Analytic kernel at `t >= 0`, nondimensional.
pub fn impulse_response(t: f64, realization: &RadiationRealization) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::InvalidInput(format!("time must be nonnegative, got {t}")));
    }
    Ok(realization.kernel.impulse(t))
}

/// Closed-form radiation damping at `omega > 0`.
pub fn radiation_damping(omega: f64, kernel: &KernelConstants) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::InvalidInput(format!("frequency must be positive, got {omega}")));
    }
    Ok(kernel.cosine_transform(omega))
}

/// Discrete inverse cosine transform `(2/pi) sum B(w_i) cos(w_i t) dw` over
/// `w_i = i dw`, `i = 1..=n`.
pub fn ogilvie_impulse(t: f64, kernel: &KernelConstants, dw: f64, w_max: f64) -> f64 {
    let n = (w_max / dw).round() as usize;
    let s: f64 = (1..=n)
        .map(|i| {
            let w = i as f64 * dw;
            kernel.cosine_transform(w) * (w * t).cos()
        })
        .sum();
    2.0 / std::f64::consts::PI * s * dw
}
