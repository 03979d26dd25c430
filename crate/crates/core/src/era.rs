//! Eigensystem realization of a sampled impulse response.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hydro::{ogilvie_impulse, KernelConstants, RadiationRealization};
use crate::numerics::{eigenvalues, svd, Complex64, DenseMatrix};

/// Impulse response samples `h(k dt)`, `k = 0..K`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpulseSequence {
    pub dt: f64,
    pub samples: Vec<f64>,
}

impl ImpulseSequence {
    pub fn new(dt: f64, samples: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::InvalidInput(format!("sample step must be positive, got {dt}")));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("impulse samples must be finite".into()));
        }
        Ok(Self { dt, samples })
    }

    /// Samples of the analytic kernel.
    pub fn from_kernel(kernel: &KernelConstants, dt: f64, n: usize) -> Self {
        Self {
            dt,
            samples: (0..n).map(|k| kernel.impulse(k as f64 * dt)).collect(),
        }
    }

    /// Samples regenerated from the damping curve by the discrete inverse
    /// cosine transform over `(0, 8]` with step 0.01.
    pub fn from_damping_curve(kernel: &KernelConstants, dt: f64, n: usize) -> Self {
        Self {
            dt,
            samples: (0..n)
                .map(|k| ogilvie_impulse(k as f64 * dt, kernel, 0.01, 8.0))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,hbar\n");
        for (k, h) in self.samples.iter().enumerate() {
            let _ = writeln!(s, "{},{}", fmt_num(k as f64 * self.dt), fmt_num(*h));
        }
        s
    }

    /// Parses `t,hbar` rows; times must be uniformly spaced from zero.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty impulse file".into()))?;
        if header.trim().replace(' ', "") != "t,hbar" {
            return Err(Error::Parse(format!("expected header t,hbar, got {header:?}")));
        }
        let mut times = Vec::new();
        let mut samples = Vec::new();
        for (i, line) in lines.enumerate() {
            let (t, h) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("row {}: expected two columns", i + 2)))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("row {}: bad number {s:?}", i + 2)))
            };
            times.push(parse(t)?);
            samples.push(parse(h)?);
        }
        if times.len() < 2 {
            return Err(Error::Parse("need at least two impulse samples".into()));
        }
        let dt = times[1] - times[0];
        for (k, t) in times.iter().enumerate() {
            if (t - k as f64 * dt).abs() > 1e-9 * (1.0 + t.abs()) || times[0].abs() > 1e-12 {
                return Err(Error::Parse("impulse samples must be uniform and start at t=0".into()));
            }
        }
        Self::new(dt, samples)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }
}

/// Shifted Hankel matrices `H0[i][j] = h[i+j]`, `H1[i][j] = h[i+j+1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelPair {
    pub h0: DenseMatrix,
    pub h1: DenseMatrix,
}

pub fn build_hankel(seq: &ImpulseSequence, r: usize, s: usize) -> Result<HankelPair> {
    if r == 0 || s == 0 {
        return Err(Error::InvalidInput("Hankel dimensions must be positive".into()));
    }
    if seq.len() < r + s {
        return Err(Error::InvalidInput(format!(
            "{}x{} Hankel pair needs {} samples, got {}",
            r,
            s,
            r + s,
            seq.len()
        )));
    }
    let mut h0 = DenseMatrix::zeros(r, s);
    let mut h1 = DenseMatrix::zeros(r, s);
    for i in 0..r {
        for j in 0..s {
            h0[(i, j)] = seq.samples[i + j];
            h1[(i, j)] = seq.samples[i + j + 1];
        }
    }
    Ok(HankelPair { h0, h1 })
}

/// Discrete-time triple with the Hankel singular values it was cut from.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteRealization {
    pub a: DenseMatrix,
    pub b: DenseMatrix,
    pub c: DenseMatrix,
    pub singular_values: Vec<f64>,
}

impl DiscreteRealization {
    /// `C A^k B` for `k = 0..n`.
    pub fn markov(&self, n: usize) -> Vec<f64> {
        let c = self.c.row(0).to_vec();
        let mut x = self.b.column(0);
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            out.push(c.iter().zip(&x).map(|(a, b)| a * b).sum());
            x = self.a.matvec(&x);
        }
        out
    }
}

/// Default sample step. A long window matters more than fine sampling: the
/// regenerated data carry a small high-frequency truncation error that a
/// short window cannot separate from the slowest mode.
pub const DEFAULT_DT: f64 = 0.5;
/// Default Hankel rows and columns.
pub const DEFAULT_HANKEL: usize = 30;
/// Default model order.
pub const DEFAULT_ORDER: usize = 3;

/// Singular values below this fraction of the largest count as zero.
const RANK_TOL: f64 = 1e-10;

/// Truncated realization of the requested order.
pub fn realize(pair: &HankelPair, order: usize) -> Result<DiscreteRealization> {
    let dec = svd(&pair.h0);
    let rank = dec.numerical_rank(RANK_TOL);
    if order == 0 || order > rank {
        return Err(Error::Truncation {
            order,
            rank,
            singular_values: dec.sigma.clone(),
        });
    }
    let (r, s) = (pair.h0.rows(), pair.h0.cols());
    let u = dec.u.block(0, 0, r, order);
    let vt = dec.vt.block(0, 0, order, s);
    let sq: Vec<f64> = dec.sigma[..order].iter().map(|v| v.sqrt()).collect();
    let isq: Vec<f64> = sq.iter().map(|v| 1.0 / v).collect();
    let s_half = DenseMatrix::diag(&sq);
    let s_ihalf = DenseMatrix::diag(&isq);

    let a = &(&(&(&s_ihalf * &u.transpose()) * &pair.h1) * &vt.transpose()) * &s_ihalf;
    let svt = &s_half * &vt;
    let us = &u * &s_half;
    Ok(DiscreteRealization {
        a,
        b: DenseMatrix::column_vector(&svt.column(0)),
        c: DenseMatrix::row_vector(us.row(0)),
        singular_values: dec.sigma,
    })
}

/// Continuous realization with `A_c = log(A_d) / dt`. Since the samples are
/// the kernel values themselves, `B` and `C` carry over unchanged.
pub fn to_continuous(d: &DiscreteRealization, dt: f64) -> Result<RadiationRealization> {
    if !(dt > 0.0) {
        return Err(Error::InvalidInput("sample step must be positive".into()));
    }
    if let Some(z) = eigenvalues(&d.a).into_iter().find(|z| z.norm() >= 1.0) {
        return Err(Error::InvalidInput(format!(
            "discrete realization is not stable: eigenvalue modulus {}",
            z.norm()
        )));
    }
    let a = d.a.logm()?.scale(1.0 / dt);
    RadiationRealization::new(a, d.b.clone(), d.c.clone(), KernelConstants::HEMISPHERE)
}

/// Outcome of comparing a realization against impulse data.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundtripReport {
    pub max_abs_error: f64,
    pub worst_time: f64,
    /// `sigma_{N+1} / sigma_N` of the data's Hankel matrix at the model order.
    pub rank_gap: f64,
    pub eigenvalues: Vec<Complex64>,
    pub pass: bool,
}

pub const ROUNDTRIP_TOL: f64 = 1e-2;

pub fn validate_roundtrip(realization: &RadiationRealization, seq: &ImpulseSequence) -> RoundtripReport {
    let model = realization.state_space_samples(seq.dt, seq.len());
    let (mut max_abs_error, mut worst) = (0.0f64, 0usize);
    for (k, (m, h)) in model.iter().zip(&seq.samples).enumerate() {
        let e = (m - h).abs();
        if e > max_abs_error {
            max_abs_error = e;
            worst = k;
        }
    }
    let order = realization.order();
    let half = (seq.len() / 2).min(30);
    let rank_gap = if half > order {
        build_hankel(seq, half, half)
            .map(|p| {
                let s = svd(&p.h0).sigma;
                if s[order - 1] > 0.0 {
                    s[order] / s[order - 1]
                } else {
                    0.0
                }
            })
            .unwrap_or(f64::NAN)
    } else {
        f64::NAN
    };
    RoundtripReport {
        max_abs_error,
        worst_time: worst as f64 * seq.dt,
        rank_gap,
        eigenvalues: eigenvalues(&realization.a),
        pass: max_abs_error < ROUNDTRIP_TOL,
    }
}

#[derive(Serialize, Deserialize)]
struct RealizationJson {
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    b: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    c: Vec<Vec<f64>>,
    dt: f64,
    order: usize,
}

/// JSON form `{A, B, C, dt, order}`, matrices as arrays of rows.
pub fn realization_to_json(r: &RadiationRealization, dt: f64) -> Result<String> {
    let j = RealizationJson {
        a: r.a.to_rows(),
        b: r.b.to_rows(),
        c: r.c.to_rows(),
        dt,
        order: r.order(),
    };
    Ok(serde_json::to_string_pretty(&j)?)
}

pub fn realization_from_json(text: &str) -> Result<(RadiationRealization, f64)> {
    let j: RealizationJson = serde_json::from_str(text)?;
    let mat = |rows: &[Vec<f64>]| -> Result<DenseMatrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        DenseMatrix::new(r, c, rows.concat())
    };
    let r = RadiationRealization::new(mat(&j.a)?, mat(&j.b)?, mat(&j.c)?, KernelConstants::HEMISPHERE)?;
    if r.order() != j.order {
        return Err(Error::Parse(format!("order {} does not match A ({})", j.order, r.order())));
    }
    Ok((r, j.dt))
}

/// Shortest round-trip decimal form; zero prints as `0`.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}
