//! Radial differential operators and the closed-form bilaplacians of rho^2
//! and rho^{2-2 delta} on H^n.

use serde::{Deserialize, Serialize};

use super::grid::RadialGrid;
use crate::error::{domain, Error, Result};
use crate::numerics::{coth, csch2};
use crate::tolerances::SMALL_RHO_SERIES;

/// Finite difference weights (Fornberg) for derivatives 0..=m at z on nodes x.
pub fn fd_weights(z: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c
}

/// h'' + (n-1) coth(rho) h' at every node; three-point stencils inside and
/// four-point one-sided stencils at the two ends.
pub fn radial_laplacian(h: &[f64], grid: &RadialGrid) -> Result<Vec<f64>> {
    let x = grid.nodes();
    let len = x.len();
    if len < 5 {
        return Err(Error::GridTooSmall(format!("{len} nodes, need 5")));
    }
    if h.len() != len {
        return Err(domain("sample count does not match grid"));
    }
    let nm1 = (grid.n() - 1) as f64;
    let mut out = vec![0.0; len];
    for i in 0..len {
        let range = if i == 0 {
            0..4
        } else if i == len - 1 {
            len - 4..len
        } else {
            i - 1..i + 2
        };
        let w = fd_weights(x[i], &x[range.clone()], 2);
        let (mut d1, mut d2) = (0.0, 0.0);
        for (k, j) in range.enumerate() {
            d1 += w[k][1] * h[j];
            d2 += w[k][2] * h[j];
        }
        out[i] = d2 + nm1 * coth(x[i]) * d1;
    }
    Ok(out)
}

/// Delta(rho^2) = 2 + 2 (n-1) rho coth rho.
pub fn laplacian_rho_squared(n: usize, rho: f64) -> f64 {
    2.0 + 2.0 * (n as f64 - 1.0) * rho * coth(rho)
}

/// (1 - rho coth rho) csch^2 rho with its small-rho series.
fn defect_term(rho: f64) -> f64 {
    if rho < SMALL_RHO_SERIES {
        let r2 = rho * rho;
        -1.0 / 3.0 + 2.0 * r2 / 15.0
    } else {
        (1.0 - rho * coth(rho)) * csch2(rho)
    }
}

/// Closed form 2(n-1)[(n-1) + (n-3)(1 - rho coth rho) csch^2 rho].
pub fn bilaplacian_rho_squared(n: usize, rho: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(domain(format!("rho must be positive, got {rho}")));
    }
    if n < 2 {
        return Err(domain("dimension must be >= 2"));
    }
    let nm1 = n as f64 - 1.0;
    Ok(2.0 * nm1 * (nm1 + (n as f64 - 3.0) * defect_term(rho)))
}

/// Interval containing bilaplacian_rho_squared over rho > 0, as
/// (lower, upper, lower_closed, upper_closed).
pub fn bilaplacian_interval(n: usize) -> (f64, f64, bool, bool) {
    let nf = n as f64;
    match n {
        2 => (2.0, 8.0 / 3.0, false, true),
        3 => (8.0, 8.0, true, true),
        _ => (4.0 * nf * (nf - 1.0) / 3.0, 2.0 * (nf - 1.0).powi(2), false, false),
    }
}

/// Uniform bound on |Delta^2(rho^2)| over H^n.
pub fn frak_c(n: usize) -> f64 {
    match n {
        2 => 8.0 / 3.0,
        3 => 8.0,
        _ => 2.0 * (n as f64 - 1.0).powi(2),
    }
}

/// Delta(rho^{2-2 delta}) = 2(1-delta) rho^{-2 delta}((1-2 delta) + (n-1) rho coth rho).
pub fn laplacian_rho_power(n: usize, delta: f64, rho: f64) -> f64 {
    2.0 * (1.0 - delta)
        * rho.powf(-2.0 * delta)
        * ((1.0 - 2.0 * delta) + (n as f64 - 1.0) * rho * coth(rho))
}

/// Closed form of Delta^2(rho^{2-2 delta}) for rho >= 1, 0 < delta < 1/2.
pub fn bilaplacian_rho_power(n: usize, delta: f64, rho: f64) -> Result<f64> {
    if !(rho >= 1.0) || !(delta > 0.0 && delta < 0.5) {
        return Err(domain(format!(
            "need rho >= 1 and 0 < delta < 1/2, got rho={rho}, delta={delta}"
        )));
    }
    Ok(bilaplacian_rho_power_unchecked(n, delta, rho))
}

/// Same formula without the domain guard (used for limits and sweeps).
pub fn bilaplacian_rho_power_unchecked(n: usize, delta: f64, rho: f64) -> f64 {
    let nm1 = n as f64 - 1.0;
    let c = coth(rho);
    let e = 1.0 - 2.0 * delta;
    let first = e
        * (nm1 * nm1 + 2.0 * delta * (2.0 * delta + 1.0) / (rho * rho)
            - 4.0 * delta * nm1 * c / rho);
    let second = nm1 * (3.0 - n as f64) * csch2(rho) * (rho * c - e);
    2.0 * (1.0 - delta) * rho.powf(-2.0 * delta) * (first + second)
}

/// Empirical sup of |Delta^2(rho^{2-2 delta})| over a (delta, rho) lattice.
pub fn frak_d_sweep(n: usize, deltas: &[f64], rho_min: f64, rho_max: f64, points: usize) -> f64 {
    let mut sup: f64 = 0.0;
    for &d in deltas {
        for k in 0..points {
            let t = k as f64 / (points - 1).max(1) as f64;
            let rho = rho_min * (rho_max / rho_min).powf(t);
            sup = sup.max(bilaplacian_rho_power_unchecked(n, d, rho).abs());
        }
    }
    sup
}

/// Default delta lattice for the frak_D sweep.
pub fn default_delta_lattice() -> Vec<f64> {
    (1..50).map(|k| k as f64 * 0.01).collect()
}

/// Bounds on the radial bilaplacians for one dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryConstants {
    pub n: usize,
    /// sup |Delta^2(rho^2)| on H^n.
    pub frak_c_n: f64,
    /// sup |Delta^2(rho^{2-2 delta})| over rho >= 1 (measured).
    pub frak_d_n: f64,
    /// sup of the perturbed bilaplacian (measured; equals frak_c_n on H^n).
    pub frak_f_n: f64,
}

impl GeometryConstants {
    /// H^n constants with frak_D measured on rho in [1, 100].
    pub fn hyperbolic(n: usize) -> Self {
        GeometryConstants {
            n,
            frak_c_n: frak_c(n),
            frak_d_n: frak_d_sweep(n, &default_delta_lattice(), 1.0, 100.0, 2000),
            frak_f_n: frak_c(n),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fd_weights_match_textbook() {
        let w = fd_weights(0.0, &[-1.0, 0.0, 1.0], 2);
        assert!((w[0][2] - 1.0).abs() < 1e-14 && (w[1][2] + 2.0).abs() < 1e-14);
        assert!((w[0][1] + 0.5).abs() < 1e-14 && (w[2][1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn n3_is_constant() {
        for rho in [1e-4, 0.5, 3.0, 40.0] {
            assert!((bilaplacian_rho_squared(3, rho).unwrap() - 8.0).abs() < 1e-12);
        }
        assert!(bilaplacian_rho_squared(3, 0.0).is_err());
    }

    #[test]
    fn n2_tends_to_sup_at_origin() {
        assert!((bilaplacian_rho_squared(2, 1e-6).unwrap() - 8.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn power_closed_form_values() {
        // Reference values from an exact symbolic double Laplacian.
        let cases = [
            (3, 0.05, 2.0, 6.09481722942919),
            (2, 0.1, 10.0, 0.874416107587247),
            (4, 0.3, 1.5, 2.06164668172501),
        ];
        for (n, d, r, want) in cases {
            let v = bilaplacian_rho_power(n, d, r).unwrap();
            assert!((v - want).abs() < 1e-12, "{n} {d} {r}: {v}");
        }
        assert!(bilaplacian_rho_power(3, 0.6, 2.0).is_err());
        assert!(bilaplacian_rho_power(3, 0.2, 0.5).is_err());
    }

    #[test]
    fn delta_to_zero_limit() {
        for n in 2..6 {
            let a = bilaplacian_rho_power_unchecked(n, 1e-12, 2.5);
            let b = bilaplacian_rho_squared(n, 2.5).unwrap();
            assert!((a - b).abs() < 1e-7);
        }
    }

    #[test]
    fn laplacian_of_constant_is_zero() {
        let g = RadialGrid::uniform(3, 5.0, 50).unwrap();
        let out = radial_laplacian(&vec![2.5; 50], &g).unwrap();
        assert!(out.iter().all(|v| v.abs() < 1e-10));
        let small = RadialGrid::uniform(3, 1.0, 4).unwrap();
        assert!(matches!(radial_laplacian(&[0.0; 4], &small), Err(Error::GridTooSmall(_))));
    }
}
