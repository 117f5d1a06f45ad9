//! Curvature of an arbitrary coordinate metric by finite differences: the
//! independent reference for the closed forms.

use nalgebra::DMatrix;

use super::tensors::{scalar_from_ricci, Christoffel, Riemann};
use crate::error::{Error, Result};

/// Steps used for the nested differences (Christoffel, then Riemann).
#[derive(Debug, Clone, Copy)]
pub struct OracleSteps {
    pub inner: f64,
    pub outer: f64,
}

impl Default for OracleSteps {
    fn default() -> Self {
        OracleSteps {
            inner: 1e-3,
            outer: 1e-2,
        }
    }
}

fn richardson_partial<T, F>(f: &F, x: &[f64], c: usize, h: f64) -> T
where
    F: Fn(&[f64]) -> T,
    T: std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let mut y = x.to_vec();
    let mut central = |h: f64| {
        y[c] = x[c] + h;
        let a = f(&y);
        y[c] = x[c] - h;
        let b = f(&y);
        y[c] = x[c];
        (a - b) * (0.5 / h)
    };
    let coarse = central(h);
    let fine = central(h / 2.0);
    (fine * 4.0 - coarse) * (1.0 / 3.0)
}

pub fn christoffel_fd<G>(g: &G, x: &[f64], h: f64) -> Result<Christoffel>
where
    G: Fn(&[f64]) -> DMatrix<f64>,
{
    let n = x.len();
    let g0 = g(x);
    let gi = g0
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("metric not invertible".into()))?;
    let dg: Vec<DMatrix<f64>> = (0..n).map(|c| richardson_partial(g, x, c, h)).collect();
    let mut out = Christoffel::zeros(n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut s = 0.0;
                for d in 0..n {
                    s += gi[(a, d)] * (dg[b][(d, c)] + dg[c][(d, b)] - dg[d][(b, c)]);
                }
                out.set(a, b, c, 0.5 * s);
            }
        }
    }
    Ok(out)
}

/// Flat vector wrapper so Christoffel tables can be differenced.
#[derive(Clone)]
struct Flat(Vec<f64>);

impl std::ops::Sub for Flat {
    type Output = Flat;
    fn sub(self, o: Flat) -> Flat {
        Flat(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
}

impl std::ops::Mul<f64> for Flat {
    type Output = Flat;
    fn mul(self, s: f64) -> Flat {
        Flat(self.0.iter().map(|a| a * s).collect())
    }
}

pub fn riemann_fd<G>(g: &G, x: &[f64], steps: OracleSteps) -> Result<Riemann>
where
    G: Fn(&[f64]) -> DMatrix<f64>,
{
    let n = x.len();
    let gam = christoffel_fd(g, x, steps.inner)?;
    let flat = |y: &[f64]| -> Flat {
        let c = christoffel_fd(g, y, steps.inner).expect("metric singular near sample");
        let mut v = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                for cc in 0..n {
                    v.push(c.get(a, b, cc));
                }
            }
        }
        Flat(v)
    };
    let dgam: Vec<Flat> = (0..n).map(|c| richardson_partial(&flat, x, c, steps.outer)).collect();
    let idx = |a: usize, b: usize, c: usize| (a * n + b) * n + c;
    let mut r = Riemann::zeros(n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut v = dgam[c].0[idx(a, d, b)] - dgam[d].0[idx(a, c, b)];
                    for e in 0..n {
                        v += gam.get(a, c, e) * gam.get(e, d, b) - gam.get(a, d, e) * gam.get(e, c, b);
                    }
                    r.set(a, b, c, d, v);
                }
            }
        }
    }
    Ok(r)
}

/// Everything the oracle produces at one point.
#[derive(Debug, Clone)]
pub struct OracleCurvature {
    pub metric: DMatrix<f64>,
    pub christoffel: Christoffel,
    pub riemann: Riemann,
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
}

pub fn curvature_fd<G>(g: &G, x: &[f64], steps: OracleSteps) -> Result<OracleCurvature>
where
    G: Fn(&[f64]) -> DMatrix<f64>,
{
    let metric = g(x);
    let christoffel = christoffel_fd(g, x, steps.inner)?;
    let riemann = riemann_fd(g, x, steps)?;
    let ricci = riemann.ricci();
    let scalar = scalar_from_ricci(&metric, &ricci)?;
    Ok(OracleCurvature {
        metric,
        christoffel,
        riemann,
        ricci,
        scalar,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_sphere_has_unit_curvature() {
        let g = |x: &[f64]| DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, x[0].sin().powi(2)]);
        let c = curvature_fd(&g, &[0.8, 0.3], OracleSteps::default()).unwrap();
        assert!((c.scalar - 2.0).abs() < 1e-8);
        let k = c.riemann.sectional(&c.metric, &[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert!((k - 1.0).abs() < 1e-8);
    }

    #[test]
    fn flat_polar_is_flat() {
        let g = |x: &[f64]| DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, x[0] * x[0]]);
        let c = curvature_fd(&g, &[1.7, 0.0], OracleSteps::default()).unwrap();
        assert!(c.riemann.entries().iter().all(|v| v.abs() < 1e-8));
        assert!((c.christoffel.get(0, 1, 1) + 1.7).abs() < 1e-10);
    }
}
