use num_complex::Complex64;

use super::matrix::{eigenvalues, DenseMatrix};
use crate::error::{Error, Result};

/// Real polynomial, coefficients in ascending degree order.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Trailing (highest-degree) zeros are trimmed.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn from_roots(roots: &[f64]) -> Self {
        let mut p = Self::new(vec![1.0]);
        for &r in roots {
            p = p.mul(&Self::new(vec![-r, 1.0]));
        }
        p
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::new(vec![0.0]);
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(
            (0..n)
                .map(|k| self.coeffs.get(k).unwrap_or(&0.0) + other.coeffs.get(k).unwrap_or(&0.0))
                .collect(),
        )
    }

    /// Sum of absolute coefficients.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    /// Companion matrix of the monic normalization.
    pub fn companion(&self) -> DenseMatrix {
        let n = self.degree();
        let lead = self.coeffs[n];
        let mut m = DenseMatrix::zeros(n, n);
        for i in 1..n {
            m[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            m[(i, n - 1)] = -self.coeffs[i] / lead;
        }
        m
    }

    /// All complex roots via companion eigenvalues.
    pub fn roots(&self) -> Vec<Complex64> {
        if self.degree() == 0 {
            return Vec::new();
        }
        // Zero roots are split off exactly so the companion stays well scaled.
        let zeros = self.coeffs.iter().take_while(|&&c| c == 0.0).count();
        let reduced = Self::new(self.coeffs[zeros..].to_vec());
        let mut out = vec![Complex64::new(0.0, 0.0); zeros];
        if reduced.degree() > 0 {
            out.extend(eigenvalues(&reduced.companion()));
        }
        out
    }
}

/// Newton polish on a real root.
fn polish(p: &Polynomial, dp: &Polynomial, mut x: f64) -> f64 {
    for _ in 0..8 {
        let d = dp.eval(x);
        if d == 0.0 {
            break;
        }
        let step = p.eval(x) / d;
        let nx = x - step;
        if !nx.is_finite() || p.eval(nx).abs() > p.eval(x).abs() {
            break;
        }
        x = nx;
        if step.abs() <= 1e-16 * x.abs() {
            break;
        }
    }
    x
}

/// Sorted distinct real roots in `(0, bracket_max]`.
///
/// Candidates come from the companion eigenvalues, are polished by Newton and
/// kept when `|p(r)| < 1e-8 * scale` where `scale` accounts for the
/// magnitude of the individual terms at `r`.
pub fn real_positive_roots(p: &Polynomial, bracket_max: f64) -> Result<Vec<f64>> {
    if p.degree() < 1 {
        return Err(Error::InvalidInput("polynomial degree must be at least 1".into()));
    }
    let dp = p.derivative();
    let mut found: Vec<f64> = Vec::new();
    for z in p.roots() {
        let mag = z.norm().max(1.0);
        if z.im.abs() > 1e-6 * mag {
            continue;
        }
        let r = polish(p, &dp, z.re);
        if !(r > 0.0) || r > bracket_max {
            continue;
        }
        let scale: f64 = p
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| (c * r.powi(k as i32)).abs())
            .sum();
        if p.eval(r).abs() > 1e-8 * scale.max(f64::MIN_POSITIVE) {
            continue;
        }
        found.push(r);
    }
    found.sort_by(f64::total_cmp);
    found.dedup_by(|a, b| (*a - *b).abs() <= 1e-7 * b.abs().max(1e-12));
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trims_leading_zeros() {
        let p = Polynomial::new(vec![1.0, 2.0, 0.0, 0.0]);
        assert_eq!(p.degree(), 1);
    }

    #[test]
    fn simple_roots() {
        let p = Polynomial::new(vec![-1.0, 0.0, 1.0]);
        assert_eq!(real_positive_roots(&p, 10.0).unwrap(), vec![1.0]);

        let q = Polynomial::from_roots(&[2.0, 3.0, -1.0]);
        let r = real_positive_roots(&q, 10.0).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0] - 2.0).abs() < 1e-12 && (r[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn double_root_collapsed() {
        let p = Polynomial::from_roots(&[1.5, 1.5, 4.0]);
        let r = real_positive_roots(&p, 10.0).unwrap();
        assert_eq!(r.len(), 2, "{r:?}");
        assert!((r[0] - 1.5).abs() < 1e-6);
    }

    #[test]
    fn bracket_limit_applies() {
        let p = Polynomial::from_roots(&[1.0, 5.0]);
        assert_eq!(real_positive_roots(&p, 2.0).unwrap(), vec![1.0]);
    }

    #[test]
    fn constant_is_rejected() {
        assert!(real_positive_roots(&Polynomial::new(vec![3.0]), 1.0).is_err());
    }

    #[test]
    fn zero_root_excluded() {
        let p = Polynomial::new(vec![0.0, -2.0, 1.0]);
        assert_eq!(real_positive_roots(&p, 10.0).unwrap(), vec![2.0]);
    }

    #[test]
    fn derivative_and_eval() {
        let p = Polynomial::new(vec![1.0, 2.0, 3.0]);
        assert_eq!(p.eval(2.0), 17.0);
        assert_eq!(p.derivative().coeffs(), &[2.0, 6.0]);
    }
}
