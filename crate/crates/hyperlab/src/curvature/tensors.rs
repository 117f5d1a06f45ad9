use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gamma^a_{bc}, stored flat.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Christoffel {
    pub n: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn zeros(n: usize) -> Self {
        Christoffel {
            n,
            data: vec![0.0; n * n * n],
        }
    }
    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[(a * self.n + b) * self.n + c]
    }
    #[inline]
    pub fn set(&mut self, a: usize, b: usize, c: usize, v: f64) {
        self.data[(a * self.n + b) * self.n + c] = v;
    }
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// R^a_{bcd} with R(d_c, d_d) d_b = R^a_{bcd} d_a.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Riemann {
    pub n: usize,
    data: Vec<f64>,
}

impl Riemann {
    pub fn zeros(n: usize) -> Self {
        Riemann {
            n,
            data: vec![0.0; n * n * n * n],
        }
    }
    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        let n = self.n;
        self.data[((a * n + b) * n + c) * n + d]
    }
    #[inline]
    pub fn set(&mut self, a: usize, b: usize, c: usize, d: usize, v: f64) {
        let n = self.n;
        self.data[((a * n + b) * n + c) * n + d] = v;
    }

    /// Ric_{bd} = R^a_{bad}.
    pub fn ricci(&self) -> DMatrix<f64> {
        let n = self.n;
        DMatrix::from_fn(n, n, |b, d| (0..n).map(|a| self.get(a, b, a, d)).sum())
    }

    /// Largest |R^a_{bcd} + R^a_{bdc}|.
    pub fn antisymmetry_defect(&self) -> f64 {
        let n = self.n;
        let mut m: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        m = m.max((self.get(a, b, c, d) + self.get(a, b, d, c)).abs());
                    }
                }
            }
        }
        m
    }

    /// <R(X,Y)Y, X> / (|X|^2 |Y|^2 - <X,Y>^2).
    pub fn sectional(&self, g: &DMatrix<f64>, x: &[f64], y: &[f64]) -> Result<f64> {
        let n = self.n;
        let dot = |u: &[f64], v: &[f64]| -> f64 {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += g[(i, j)] * u[i] * v[j];
                }
            }
            s
        };
        let (xx, yy, xy) = (dot(x, x), dot(y, y), dot(x, y));
        let den = xx * yy - xy * xy;
        if !(den > 1e-12 * xx * yy) {
            return Err(Error::Degenerate("plane spanned by parallel vectors".into()));
        }
        let mut num = 0.0;
        for e in 0..n {
            let mut r = 0.0;
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        r += self.get(e, b, c, d) * y[b] * x[c] * y[d];
                    }
                }
            }
            for a in 0..n {
                num += g[(a, e)] * x[a] * r;
            }
        }
        Ok(num / den)
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }
}

/// Scalar curvature g^{ab} Ric_{ab}.
pub fn scalar_from_ricci(g: &DMatrix<f64>, ric: &DMatrix<f64>) -> Result<f64> {
    let gi = g
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("metric not invertible".into()))?;
    Ok(gi.component_mul(ric).sum())
}

/// |a - b| / max(|b|, 1).
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}
