//! Small dense kernels: vector helpers, packed Cholesky, and closed-form
//! 2×2 symmetric eigen-decomposition / exponential.

use crate::error::{Error, Result};

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm_sq(x: &[f64]) -> f64 {
    dot(x, x)
}

pub fn norm(x: &[f64]) -> f64 {
    norm_sq(x).sqrt()
}

pub fn distance_sq(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

pub fn distance(x: &[f64], y: &[f64]) -> f64 {
    distance_sq(x, y).sqrt()
}

/// Lower Cholesky factor of a symmetric matrix, stored packed by rows
/// (`row i` occupies `i*(i+1)/2 .. i*(i+1)/2 + i + 1`).
#[derive(Debug, Clone)]
pub struct PackedCholesky {
    n: usize,
    lower: Vec<f64>,
}

impl PackedCholesky {
    /// Factors the `n × n` matrix whose entries are produced by `entry(i, j)`
    /// for `j <= i`.
    pub fn factor(n: usize, entry: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut lower = vec![0.0; n * (n + 1) / 2];
        let row = |i: usize| i * (i + 1) / 2;
        for i in 0..n {
            let ri = row(i);
            for j in 0..=i {
                let rj = row(j);
                let mut s = entry(i, j);
                for k in 0..j {
                    s -= lower[ri + k] * lower[rj + k];
                }
                if i == j {
                    if !(s > 0.0) {
                        return Err(Error::NonPositiveDefinite { pivot: i, value: s });
                    }
                    lower[ri + i] = s.sqrt();
                } else {
                    lower[ri + j] = s / lower[rj + j];
                }
            }
        }
        Ok(Self { n, lower })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `out = L z`.
    pub fn mul(&self, z: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate().take(self.n) {
            let r = i * (i + 1) / 2;
            *o = dot(&self.lower[r..r + i + 1], &z[..i + 1]);
        }
    }
}

/// Symmetric 2×2 matrix `[[p, q], [q, r]]`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Sym2 {
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl Sym2 {
    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mid = 0.5 * (self.p + self.r);
        let rad = (0.25 * (self.p - self.r).powi(2) + self.q * self.q).sqrt();
        (mid + rad, mid - rad)
    }

    /// Matrix exponential applied to `m`.
    pub fn expm_apply(&self, m: [f64; 2]) -> [f64; 2] {
        let (l1, l2) = self.eigenvalues();
        let gap = l1 - l2;
        // exp(S) = e^{l2} I + (e^{l1} - e^{l2}) / (l1 - l2) (S - l2 I)
        let slope = if gap.abs() < 1e-12 * (1.0 + l1.abs()) {
            l1.exp()
        } else {
            (l1.exp() - l2.exp()) / gap
        };
        let e2 = l2.exp();
        [
            e2 * m[0] + slope * ((self.p - l2) * m[0] + self.q * m[1]),
            e2 * m[1] + slope * (self.q * m[0] + (self.r - l2) * m[1]),
        ]
    }
}
