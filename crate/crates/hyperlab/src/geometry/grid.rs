use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::numerics::gauss_legendre;

/// Radial nodes with quadrature weights for the measure sinh^{n-1}(rho) d rho.
///
/// Uniform grids are cell-centred (rho_i = (i + 1/2) h) and each weight is
/// the exact sinh^{n-1} mass of its cell, so the origin is never a node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    n: usize,
    nodes: Vec<f64>,
    edges: Vec<f64>,
    quad_weights: Vec<f64>,
}

/// Integral of sinh^{n-1} over [a, b], by the reduction
/// I_k = sinh^{k-1} cosh / k - (k-1)/k I_{k-2}.
pub fn shell_volume(n: usize, a: f64, b: f64) -> f64 {
    fn antiderivative(k: usize, r: f64) -> f64 {
        match k {
            0 => r,
            1 => r.cosh(),
            _ => {
                let kf = k as f64;
                r.sinh().powi(k as i32 - 1) * r.cosh() / kf
                    - (kf - 1.0) / kf * antiderivative(k - 2, r)
            }
        }
    }
    if n == 2 {
        // cosh b - cosh a without cancellation for thin cells.
        return 2.0 * (0.5 * (a + b)).sinh() * (0.5 * (b - a)).sinh();
    }
    if b - a < 0.05 {
        let (x, w) = gauss_legendre(8);
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        return x
            .iter()
            .zip(&w)
            .map(|(xi, wi)| wi * h * (c + h * xi).sinh().powi(n as i32 - 1))
            .sum();
    }
    antiderivative(n - 1, b) - antiderivative(n - 1, a)
}

impl RadialGrid {
    pub fn uniform(n: usize, rho_max: f64, cells: usize) -> Result<Self> {
        if n < 2 {
            return Err(domain("dimension must be >= 2"));
        }
        if !(rho_max > 0.0) || cells == 0 {
            return Err(domain("rho_max must be positive and cells nonzero"));
        }
        let h = rho_max / cells as f64;
        let edges: Vec<f64> = (0..=cells).map(|i| i as f64 * h).collect();
        Self::from_edges(n, edges)
    }

    /// Cells given by their edges; nodes are the cell midpoints.
    pub fn from_edges(n: usize, edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 || edges[0] < 0.0 {
            return Err(domain("need at least one cell starting at rho >= 0"));
        }
        if edges.windows(2).any(|w| w[1] <= w[0]) {
            return Err(domain("edges must increase strictly"));
        }
        let nodes = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let quad_weights = edges.windows(2).map(|w| shell_volume(n, w[0], w[1])).collect();
        Ok(RadialGrid {
            n,
            nodes,
            edges,
            quad_weights,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
    pub fn edges(&self) -> &[f64] {
        &self.edges
    }
    pub fn quad_weights(&self) -> &[f64] {
        &self.quad_weights
    }
    pub fn len(&self) -> usize {
        self.nodes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
    pub fn rho_max(&self) -> f64 {
        *self.edges.last().unwrap()
    }
    /// Cell width of a uniform grid (first cell otherwise).
    pub fn spacing(&self) -> f64 {
        self.edges[1] - self.edges[0]
    }

    /// Sum of w_i f_i.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().zip(&self.quad_weights).map(|(a, w)| a * w).sum()
    }
}

/// Area of the unit sphere S^{n-1}.
pub fn sphere_area(n: usize) -> f64 {
    match n {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        _ => 2.0 * std::f64::consts::PI / (n as f64 - 2.0) * sphere_area(n - 2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_volumes_sum_to_shell() {
        for n in [2, 3, 4, 5] {
            let g = RadialGrid::uniform(n, 6.0, 97).unwrap();
            let total: f64 = g.quad_weights().iter().sum();
            let want = shell_volume(n, 0.0, 6.0);
            assert!((total - want).abs() / want < 1e-12);
        }
        assert!((shell_volume(4, 0.0, 2.0) - (2f64.cosh().powi(3) / 3.0 - 2f64.cosh() + 2.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(2) - 2.0 * std::f64::consts::PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * std::f64::consts::PI).abs() < 1e-14);
        assert!((sphere_area(4) - 2.0 * std::f64::consts::PI.powi(2)).abs() < 1e-13);
    }
}
