//! Standard BBOB building blocks: oscillation and asymmetry transforms,
//! conditioning diagonals, the boundary penalty and random rotations.

use crate::error::{Error, Result};
use crate::rng::InstanceStream;

const MAX_REDRAWS: usize = 100;

/// Oscillation transform for a single coordinate.
pub fn tosz_scalar(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let xh = x.abs().ln();
    let (c1, c2) = if x > 0.0 { (10.0, 7.9) } else { (5.5, 3.1) };
    x.signum() * (xh + 0.049 * ((c1 * xh).sin() + (c2 * xh).sin())).exp()
}

pub fn tosz(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| tosz_scalar(v)).collect()
}

pub(crate) fn tosz_in_place(x: &mut [f64]) {
    for v in x {
        *v = tosz_scalar(*v);
    }
}

/// Asymmetry transform; coordinate i gets exponent `1 + beta * i/(D-1) * sqrt(x_i)`
/// (0-based i) on its positive part.
pub fn tasy(x: &[f64], beta: f64) -> Vec<f64> {
    let mut out = x.to_vec();
    tasy_in_place(&mut out, beta);
    out
}

pub(crate) fn tasy_in_place(x: &mut [f64], beta: f64) {
    let denom = (x.len().max(2) - 1) as f64;
    for (i, v) in x.iter_mut().enumerate() {
        if *v > 0.0 {
            *v = v.powf(1.0 + beta * (i as f64 / denom) * v.sqrt());
        }
    }
}

/// Diagonal of the conditioning matrix: entry i is `cond^(0.5 * i/(D-1))`.
///
/// Values of `cond` below one give the inverse scaling used by Weierstrass.
pub fn lambda_alpha(cond: f64, dimension: usize) -> Vec<f64> {
    let denom = (dimension.max(2) - 1) as f64;
    (0..dimension)
        .map(|i| cond.powf(0.5 * i as f64 / denom))
        .collect()
}

/// Quadratic penalty for leaving `[-5, 5]^D`.
pub fn f_pen(x: &[f64]) -> f64 {
    x.iter()
        .map(|&v| {
            let excess = (v.abs() - 5.0).max(0.0);
            excess * excess
        })
        .sum()
}

/// Dense row-major orthogonal matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Rotation {
    dim: usize,
    data: Vec<f64>,
}

impl Rotation {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0;
        }
        Self { dim, data }
    }

    /// Random orthogonal matrix: Gaussian entries drawn column by column,
    /// orthonormalized with modified Gram-Schmidt.
    pub fn random(stream: &mut InstanceStream, dim: usize) -> Result<Self> {
        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(dim);
        for _ in 0..dim {
            let mut attempts = 0;
            let col = loop {
                if attempts == MAX_REDRAWS {
                    return Err(Error::DegenerateStream(MAX_REDRAWS));
                }
                attempts += 1;
                let mut v: Vec<f64> = (0..dim).map(|_| stream.normal()).collect();
                for q in &cols {
                    let proj = dot(q, &v);
                    for (vi, qi) in v.iter_mut().zip(q) {
                        *vi -= proj * qi;
                    }
                }
                let norm = dot(&v, &v).sqrt();
                if norm >= 1e-12 {
                    v.iter_mut().for_each(|vi| *vi /= norm);
                    break v;
                }
            };
            cols.push(col);
        }
        let mut data = vec![0.0; dim * dim];
        for (j, col) in cols.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                data[i * dim + j] = v;
            }
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.dim + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    /// `out = M x`
    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(self.row(i), x);
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.apply_into(x, &mut out);
        out
    }

    /// `M^T x`
    pub fn apply_transpose(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (i, &xi) in x.iter().enumerate() {
            for (o, &m) in out.iter_mut().zip(self.row(i)) {
                *o += m * xi;
            }
        }
        out
    }

    /// Largest entry of `|M^T M - I|`.
    pub fn orthogonality_error(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                let s: f64 = (0..n).map(|k| self.get(k, a) * self.get(k, b)).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }
}

/// Convenience wrapper matching the stream-first calling convention.
pub fn random_rotation(stream: &mut InstanceStream, dimension: usize) -> Result<Rotation> {
    Rotation::random(stream, dimension)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
