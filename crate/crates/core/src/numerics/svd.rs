use super::matrix::DenseMatrix;

/// Thin singular value decomposition `m = U diag(sigma) Vt`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    pub vt: DenseMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> DenseMatrix {
        let s = DenseMatrix::diag(&self.sigma);
        &(&self.u * &s) * &self.vt
    }

    /// Count of singular values above `rel_tol * sigma_max`.
    pub fn numerical_rank(&self, rel_tol: f64) -> usize {
        let top = self.sigma.first().copied().unwrap_or(0.0);
        self.sigma.iter().filter(|&&s| s > rel_tol * top && s > 0.0).count()
    }
}

/// One-sided Jacobi SVD. Singular values come out nonincreasing.
pub fn svd(m: &DenseMatrix) -> Svd {
    if m.rows() < m.cols() {
        let t = svd(&m.transpose());
        return Svd {
            u: t.vt.transpose(),
            sigma: t.sigma,
            vt: t.u.transpose(),
        };
    }
    let (rows, n) = (m.rows(), m.cols());
    // Column-major working copies for cache-friendly column rotations.
    let mut a: Vec<Vec<f64>> = (0..n).map(|j| m.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();

    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta, gamma) = {
                    let (cp, cq) = (&a[p], &a[q]);
                    let mut al = 0.0;
                    let mut be = 0.0;
                    let mut ga = 0.0;
                    for i in 0..rows {
                        al += cp[i] * cp[i];
                        be += cq[i] * cq[i];
                        ga += cp[i] * cq[i];
                    }
                    (al, be, ga)
                };
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut a, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<(f64, usize)> = a
        .iter()
        .enumerate()
        .map(|(j, col)| (col.iter().map(|x| x * x).sum::<f64>().sqrt(), j))
        .collect();
    order.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));

    let mut u = DenseMatrix::zeros(rows, n);
    let mut vt = DenseMatrix::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    for (k, &(s, j)) in order.iter().enumerate() {
        sigma.push(s);
        for i in 0..rows {
            u[(i, k)] = if s > 0.0 { a[j][i] / s } else { 0.0 };
        }
        for i in 0..n {
            vt[(k, i)] = v[j][i];
        }
    }
    Svd { u, sigma, vt }
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (lo, hi) = cols.split_at_mut(q);
    let (cp, cq) = (&mut lo[p], &mut hi[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, xq) = (*x, *y);
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity() {
        let d = svd(&DenseMatrix::identity(3));
        assert_eq!(d.sigma, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn rank_one() {
        let u = [1.0, -2.0, 0.5, 3.0];
        let v = [0.3, 1.0, -1.0];
        let mut m = DenseMatrix::zeros(4, 3);
        for i in 0..4 {
            for j in 0..3 {
                m[(i, j)] = u[i] * v[j];
            }
        }
        let d = svd(&m);
        assert_eq!(d.sigma.iter().filter(|&&s| s > 1e-12).count(), 1);
        assert!(d.reconstruct().max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn wide_matrix() {
        let m = DenseMatrix::from_rows(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]]);
        let d = svd(&m);
        assert_eq!(d.sigma.len(), 2);
        assert!(d.reconstruct().max_abs_diff(&m) < 1e-12);
        assert!(d.sigma[0] >= d.sigma[1]);
    }

    #[test]
    fn matches_nalgebra() {
        let m = DenseMatrix::from_rows(&[
            &[2.0, -1.0, 0.3],
            &[0.5, 4.0, 1.0],
            &[1.5, 0.2, -3.0],
            &[0.0, 1.0, 1.0],
        ]);
        let ours = svd(&m).sigma;
        let mut theirs: Vec<f64> = m.to_nalgebra().singular_values().iter().copied().collect();
        theirs.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in ours.iter().zip(&theirs) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
