//! Points of H^n in the hyperboloid model x0^2 - |x|^2 = 1, x0 > 0.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::numerics::acosh1p;
use crate::tolerances;

/// Minkowski form x0*y0 - x1*y1 - ... - xn*yn.
pub fn minkowski(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x[0] * y[0] - x[1..].iter().zip(&y[1..]).map(|(a, b)| a * b).sum::<f64>()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperboloidPoint {
    coords: Vec<f64>,
}

impl HyperboloidPoint {
    /// Validates the constraint. The tolerance scales with x0^2, the size of
    /// the two terms that cancel in <x,x>.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 3 {
            return Err(domain("hyperboloid points need n >= 2"));
        }
        let p = HyperboloidPoint { coords };
        if p.coords[0] <= 0.0 || p.constraint_defect() > 1e-9 {
            return Err(domain(format!(
                "point off the upper sheet (x0={}, defect={:e})",
                p.coords[0],
                p.constraint_defect()
            )));
        }
        Ok(p)
    }

    /// Builds a point from its spatial part; x0 is solved for.
    pub fn from_spatial(spatial: &[f64]) -> Self {
        let r2: f64 = spatial.iter().map(|v| v * v).sum();
        let mut coords = Vec::with_capacity(spatial.len() + 1);
        coords.push((1.0 + r2).sqrt());
        coords.extend_from_slice(spatial);
        HyperboloidPoint { coords }
    }

    pub fn origin(n: usize) -> Self {
        let mut coords = vec![0.0; n + 1];
        coords[0] = 1.0;
        HyperboloidPoint { coords }
    }

    /// Geodesic polar coordinates about the origin with a unit direction in R^n.
    pub fn from_polar(rho: f64, direction: &[f64]) -> Self {
        let norm = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
        let s = rho.sinh() / norm;
        let spatial: Vec<f64> = direction.iter().map(|d| s * d).collect();
        HyperboloidPoint::from_spatial(&spatial)
    }

    /// (cosh rho, sinh rho cos theta, sinh rho sin theta) on H^2.
    pub fn polar2(rho: f64, theta: f64) -> Self {
        let s = rho.sinh();
        HyperboloidPoint::from_spatial(&[s * theta.cos(), s * theta.sin()])
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Scale-aware |<x,x> - 1| / max(1, x0^2).
    pub fn constraint_defect(&self) -> f64 {
        let q = minkowski(&self.coords, &self.coords);
        (q - 1.0).abs() / self.coords[0].powi(2).max(1.0)
    }

    /// Re-solves x0 from the spatial part.
    fn renormalized(mut coords: Vec<f64>) -> Self {
        let r2: f64 = coords[1..].iter().map(|v| v * v).sum();
        coords[0] = (1.0 + r2).sqrt();
        HyperboloidPoint { coords }
    }

    /// Orthonormal basis of the tangent space at self, obtained by boosting
    /// the standard basis at the origin.
    pub fn tangent_frame(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let x0 = self.coords[0];
        (1..=n)
            .map(|j| {
                let xj = self.coords[j];
                let mut col = vec![0.0; n + 1];
                col[0] = xj;
                for k in 1..=n {
                    col[k] = xj * self.coords[k] / (1.0 + x0);
                }
                col[j] += 1.0;
                col
            })
            .collect()
    }

    /// Tangent vector at self with coordinates `local` in `tangent_frame`.
    pub fn tangent_from_local(&self, local: &[f64]) -> Vec<f64> {
        let frame = self.tangent_frame();
        let mut v = vec![0.0; self.dim() + 1];
        for (c, col) in local.iter().zip(&frame) {
            for k in 0..v.len() {
                v[k] += c * col[k];
            }
        }
        v
    }
}

/// Geodesic distance arccosh(<x,y>).
///
/// With the form above <x,y> >= 1 on the upper sheet; close pairs are
/// handled through <x,y> - 1 = (|dx|^2 - dx0^2)/2 and log1p.
pub fn hyperbolic_distance(x: &HyperboloidPoint, y: &HyperboloidPoint) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(domain("dimension mismatch"));
    }
    let b = minkowski(x.coords(), y.coords());
    if b < 1.0 - tolerances::DISTANCE_DOMAIN {
        return Err(domain(format!("Minkowski product {b} < 1")));
    }
    let z = b - 1.0;
    if z <= tolerances::ACOSH_LOG1P_BRANCH {
        let dx0 = x.coords[0] - y.coords[0];
        let ds: f64 = x.coords[1..]
            .iter()
            .zip(&y.coords[1..])
            .map(|(a, c)| (a - c) * (a - c))
            .sum();
        let z = (0.5 * (ds - dx0 * dx0)).max(0.0);
        Ok(acosh1p(z))
    } else {
        Ok(b.acosh())
    }
}

/// Exponential map at `base` of a tangent vector `v` (ambient coordinates).
pub fn exp_map(base: &HyperboloidPoint, v: &[f64]) -> Result<HyperboloidPoint> {
    if v.len() != base.coords.len() {
        return Err(domain("tangent vector has the wrong length"));
    }
    let scale = base.coords[0] * v.iter().map(|a| a.abs()).fold(0.0, f64::max).max(1.0);
    if minkowski(base.coords(), v).abs() > tolerances::TANGENCY * scale {
        return Err(domain("vector is not tangent to the hyperboloid at base"));
    }
    let nv2 = -minkowski(v, v);
    if nv2 <= 0.0 {
        return Ok(base.clone());
    }
    let nv = nv2.sqrt();
    let (c, s) = (nv.cosh(), nv.sinh() / nv);
    let coords = base.coords.iter().zip(v).map(|(b, w)| c * b + s * w).collect();
    Ok(HyperboloidPoint::renormalized(coords))
}

/// Geodesic distance for points given in polar coordinates on H^2
/// (hyperbolic law of cosines).
pub fn polar2_distance(rho1: f64, theta1: f64, rho2: f64, theta2: f64) -> f64 {
    let b = rho1.cosh() * rho2.cosh() - rho1.sinh() * rho2.sinh() * (theta1 - theta2).cos();
    if b - 1.0 < tolerances::ACOSH_LOG1P_BRANCH {
        hyperbolic_distance(
            &HyperboloidPoint::polar2(rho1, theta1),
            &HyperboloidPoint::polar2(rho2, theta2),
        )
        .unwrap_or(0.0)
    } else {
        b.acosh()
    }
}

impl From<HyperboloidPoint> for Vec<f64> {
    fn from(p: HyperboloidPoint) -> Self {
        p.coords
    }
}

impl TryFrom<Vec<f64>> for HyperboloidPoint {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        HyperboloidPoint::new(v)
    }
}
