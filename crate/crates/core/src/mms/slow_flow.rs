use num_complex::Complex64;

use crate::error::Result;
use crate::numerics::{real_positive_roots, Polynomial};

/// Autonomous amplitude/phase flow written in Cartesian form
/// (`u = a cos psi`, `w = a sin psi`):
///
/// `u' = s (-zeta u - Q(r^2) w)`, `w' = s (-zeta w + Q(r^2) u + F)`
///
/// with `Q(x) = q0 + q1 x + q2 x^2`. In polar form this reads
/// `a' = s (-zeta a + F sin psi)`, `a psi' = s (Q a + F cos psi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlowFlow {
    pub rate: f64,
    pub zeta: f64,
    pub q: [f64; 3],
    pub force: f64,
}

impl SlowFlow {
    pub fn q_of(&self, x: f64) -> f64 {
        self.q[0] + x * (self.q[1] + x * self.q[2])
    }

    pub fn dq_of(&self, x: f64) -> f64 {
        self.q[1] + 2.0 * self.q[2] * x
    }

    pub fn rhs(&self, u: f64, w: f64) -> (f64, f64) {
        let q = self.q_of(u * u + w * w);
        (
            self.rate * (-self.zeta * u - q * w),
            self.rate * (-self.zeta * w + q * u + self.force),
        )
    }

    pub fn polar_residuals(&self, a: f64, psi: f64) -> (f64, f64) {
        let q = self.q_of(a * a);
        (
            self.rate * (-self.zeta * a + self.force * psi.sin()),
            self.rate * (q * a + self.force * psi.cos()),
        )
    }

    pub fn jacobian(&self, u: f64, w: f64) -> [[f64; 2]; 2] {
        let x = u * u + w * w;
        let (q, dq) = (self.q_of(x), self.dq_of(x));
        let s = self.rate;
        [
            [s * (-self.zeta - 2.0 * dq * u * w), s * (-q - 2.0 * dq * w * w)],
            [s * (q + 2.0 * dq * u * u), s * (-self.zeta + 2.0 * dq * u * w)],
        ]
    }

    pub fn eigenvalues(&self, u: f64, w: f64) -> [Complex64; 2] {
        let j = self.jacobian(u, w);
        let tr = j[0][0] + j[1][1];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let disc = Complex64::new(tr * tr / 4.0 - det, 0.0).sqrt();
        let half = Complex64::new(tr / 2.0, 0.0);
        [half - disc, half + disc]
    }

    /// `x (zeta^2 + Q(x)^2) - F^2`, whose positive roots are the squared
    /// steady amplitudes.
    pub fn amplitude_polynomial(&self) -> Polynomial {
        let [q0, q1, q2] = self.q;
        let q_sq = Polynomial::new(vec![q0 * q0, 2.0 * q0 * q1, q1 * q1 + 2.0 * q0 * q2, 2.0 * q1 * q2, q2 * q2]);
        let inner = q_sq.add(&Polynomial::new(vec![self.zeta * self.zeta]));
        inner
            .mul(&Polynomial::new(vec![0.0, 1.0]))
            .add(&Polynomial::new(vec![-self.force * self.force]))
    }

    /// Fixed points `(u, w)`, ordered by amplitude. The origin is the only
    /// fixed point when unforced.
    pub fn fixed_points(&self) -> Result<Vec<(f64, f64)>> {
        if self.force == 0.0 {
            return Ok(vec![(0.0, 0.0)]);
        }
        let roots = real_positive_roots(&self.amplitude_polynomial(), f64::INFINITY)?;
        let mut out = Vec::with_capacity(roots.len());
        for x in roots {
            let q = self.q_of(x);
            let den = self.zeta * self.zeta + q * q;
            let (u, w) = self.polish(-q * self.force / den, self.zeta * self.force / den);
            out.push((u, w));
        }
        Ok(out)
    }

    /// Newton on the Cartesian right-hand side.
    fn polish(&self, mut u: f64, mut w: f64) -> (f64, f64) {
        for _ in 0..6 {
            let (f1, f2) = self.rhs(u, w);
            let j = self.jacobian(u, w);
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det == 0.0 || !det.is_finite() {
                break;
            }
            let du = (f1 * j[1][1] - f2 * j[0][1]) / det;
            let dw = (j[0][0] * f2 - j[1][0] * f1) / det;
            let (nu, nw) = (u - du, w - dw);
            let (g1, g2) = self.rhs(nu, nw);
            if g1.abs().max(g2.abs()) >= f1.abs().max(f2.abs()) {
                break;
            }
            u = nu;
            w = nw;
        }
        (u, w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn duffing() -> SlowFlow {
        SlowFlow {
            rate: 1.0,
            zeta: 0.05,
            q: [-0.2, 3.0, 0.0],
            force: 0.02,
        }
    }

    #[test]
    fn fixed_points_zero_the_flow() {
        let f = duffing();
        let pts = f.fixed_points().unwrap();
        assert_eq!(pts.len(), 3);
        for (u, w) in pts {
            let (a, b) = f.rhs(u, w);
            assert!(a.abs() < 1e-15 && b.abs() < 1e-15);
        }
    }

    #[test]
    fn middle_root_is_saddle() {
        let f = duffing();
        let pts = f.fixed_points().unwrap();
        let (u, w) = pts[1];
        let ev = f.eigenvalues(u, w);
        assert!(ev.iter().any(|z| z.re > 0.0));
        assert!(ev.iter().all(|z| z.im == 0.0));
        let (u, w) = pts[0];
        assert!(f.eigenvalues(u, w).iter().all(|z| z.re < 0.0));
    }

    #[test]
    fn trace_is_minus_two_zeta() {
        let f = duffing();
        for (u, w) in f.fixed_points().unwrap() {
            let ev = f.eigenvalues(u, w);
            assert!(((ev[0] + ev[1]).re + 2.0 * f.zeta).abs() < 1e-14);
        }
    }
}
