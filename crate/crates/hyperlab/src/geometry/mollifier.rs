//! Geodesic-ball averages through the exponential map.

use serde::{Deserialize, Serialize};

use super::hyperboloid::{exp_map, HyperboloidPoint};
use crate::error::{domain, Result};
use crate::numerics::gauss_legendre;
use crate::tolerances::MOLLIFIER_CONVERGENCE;

/// exp(-1/(1 - z^2)) on |z| < 1.
pub fn bump_profile(z: f64) -> f64 {
    if z.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - z * z)).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MollifiedValue {
    pub value: f64,
    /// Change between `samples` and `2 * samples`.
    pub doubling_change: f64,
    pub converged: bool,
}

/// Unit directions in R^n with weights summing to the area of S^{n-1}.
fn sphere_rule(n: usize, samples: usize) -> Vec<(Vec<f64>, f64)> {
    let m = (2 * samples).max(8);
    let azimuth: Vec<(f64, f64)> = (0..m)
        .map(|k| {
            let a = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
            (a, 2.0 * std::f64::consts::PI / m as f64)
        })
        .collect();
    let mut dirs: Vec<(Vec<f64>, f64)> =
        azimuth.iter().map(|&(a, w)| (vec![a.cos(), a.sin()], w)).collect();
    // Add one polar angle per extra dimension: x_new = cos(phi), rest scaled by sin(phi),
    // measure sin^{k-1}(phi) d phi on [0, pi].
    let (gx, gw) = gauss_legendre(samples.max(4));
    for k in 3..=n {
        let mut next = Vec::with_capacity(dirs.len() * gx.len());
        for (xi, wi) in gx.iter().zip(&gw) {
            let phi = 0.5 * std::f64::consts::PI * (xi + 1.0);
            let w_phi = 0.5 * std::f64::consts::PI * wi * phi.sin().powi(k as i32 - 2);
            for (d, w) in &dirs {
                let mut v = Vec::with_capacity(k);
                v.push(phi.cos());
                v.extend(d.iter().map(|c| c * phi.sin()));
                next.push((v, w * w_phi));
            }
        }
        dirs = next;
    }
    dirs
}

fn average<F: Fn(&HyperboloidPoint) -> f64>(
    phi: &F,
    eps: f64,
    x: &HyperboloidPoint,
    samples: usize,
) -> Result<f64> {
    let n = x.dim();
    let (gx, gw) = gauss_legendre(samples);
    let dirs = sphere_rule(n, samples);
    let frame = x.tangent_frame();
    let mut num = 0.0;
    let mut den = 0.0;
    for (ri, wi) in gx.iter().zip(&gw) {
        let r = 0.5 * eps * (ri + 1.0);
        // theta_eps(r) * r^{n-1} * (sinh r / r)^{n-1} = theta_eps(r) sinh^{n-1} r
        let wr = 0.5 * eps * wi * bump_profile(r / eps) * r.sinh().powi(n as i32 - 1);
        if wr == 0.0 {
            continue;
        }
        for (d, wd) in &dirs {
            let mut v = vec![0.0; n + 1];
            for (c, col) in d.iter().zip(&frame) {
                for k in 0..=n {
                    v[k] += r * c * col[k];
                }
            }
            let y = exp_map(x, &v)?;
            num += wr * wd * phi(&y);
            den += wr * wd;
        }
    }
    Ok(num / den)
}

/// Normalised average of phi over the tangent ball of radius eps, weighted by
/// a radial bump and the Jacobian (sinh|v|/|v|)^{n-1} of exp_x.
pub fn mollify_exp<F: Fn(&HyperboloidPoint) -> f64>(
    phi: &F,
    eps: f64,
    x: &HyperboloidPoint,
    samples: usize,
) -> Result<MollifiedValue> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(domain(format!("mollifier radius must lie in (0, 1], got {eps}")));
    }
    if samples < 2 {
        return Err(domain("need at least 2 radial samples"));
    }
    let coarse = average(phi, eps, x, samples)?;
    let fine = average(phi, eps, x, 2 * samples)?;
    let change = (fine - coarse).abs();
    let converged = change <= MOLLIFIER_CONVERGENCE;
    if !converged {
        log::warn!("mollifier quadrature not converged: doubling changed the value by {change:e}");
    }
    Ok(MollifiedValue {
        value: fine,
        doubling_change: change,
        converged,
    })
}

/// min(rho^2, R^2) with rho the distance to the origin.
pub fn capped_square(x: &HyperboloidPoint, r: f64) -> f64 {
    let rho = crate::geometry::hyperbolic_distance(x, &HyperboloidPoint::origin(x.dim())).unwrap_or(0.0);
    (rho * rho).min(r * r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientStructure {
    /// Mollified capped square at x.
    pub phi: f64,
    /// |grad phi|^2 by Richardson-extrapolated central differences along
    /// geodesics of an orthonormal frame.
    pub grad2: f64,
    /// |grad phi|^2 - 4 phi.
    pub excess: f64,
}

/// |grad Phi_{R,eps}|^2 - 4 Phi_{R,eps} at x, differencing the mollified
/// capped square with step h along the frame geodesics.
pub fn gradient_structure(x: &HyperboloidPoint, r: f64, eps: f64, samples: usize, h: f64) -> Result<GradientStructure> {
    if !(h > 0.0) {
        return Err(domain("difference step must be positive"));
    }
    let phi = |y: &HyperboloidPoint| capped_square(y, r);
    let value = |y: &HyperboloidPoint| -> Result<f64> { Ok(average(&phi, eps, y, samples)?) };
    let mut grad2 = 0.0;
    for e in x.tangent_frame() {
        let at = |s: f64| -> Result<f64> {
            let v: Vec<f64> = e.iter().map(|c| s * c).collect();
            value(&exp_map(x, &v)?)
        };
        let central = |s: f64| -> Result<f64> { Ok((at(s)? - at(-s)?) / (2.0 * s)) };
        let d = (4.0 * central(0.5 * h)? - central(h)?) / 3.0;
        grad2 += d * d;
    }
    let phi = value(x)?;
    Ok(GradientStructure {
        phi,
        grad2,
        excess: grad2 - 4.0 * phi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_are_preserved() {
        for n in [2, 3, 4] {
            let x = HyperboloidPoint::from_polar(1.0, &vec![1.0; n]);
            let m = mollify_exp(&|_: &HyperboloidPoint| 3.25, 0.3, &x, 8).unwrap();
            assert!((m.value - 3.25).abs() < 1e-12);
            assert!(m.converged);
        }
    }

    #[test]
    fn sphere_rule_has_full_area() {
        for n in 2..=5 {
            let a: f64 = sphere_rule(n, 10).iter().map(|(_, w)| w).sum();
            assert!((a / crate::geometry::sphere_area(n) - 1.0).abs() < 1e-10, "n={n}");
        }
    }

    #[test]
    fn rejects_large_radius() {
        let x = HyperboloidPoint::origin(2);
        assert!(mollify_exp(&|_: &HyperboloidPoint| 1.0, 1.5, &x, 8).is_err());
    }
}
