//! Laplace-method integral I(rho) with its Gaussian reference, and the
//! exponent Q(l, R) of the quadratic-log weight.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::numerics::integrate_adaptive;

/// h(u) = e^u - u - 1, with h(0) = h'(0) = 0 and h''(0) = 1.
pub fn h(u: f64) -> f64 {
    u.exp_m1() - u
}

pub fn h_prime(u: f64) -> f64 {
    u.exp_m1()
}

pub fn h_second(u: f64) -> f64 {
    u.exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplaceProbe {
    pub sigma: f64,
    pub rho: f64,
    pub gamma0: f64,
    pub log_i: f64,
    pub log_ref: f64,
}

impl LaplaceProbe {
    pub fn ratio(&self) -> f64 {
        (self.log_i - self.log_ref).exp()
    }
}

/// Default lower limit gamma0 = sigma / 2.
pub fn default_gamma0(sigma: f64) -> f64 {
    0.5 * sigma
}

/// Split point of the near/far decomposition.
pub fn split_point(rho: f64) -> f64 {
    rho.powf(-1.0 / 3.0)
}

/// log of int_{u0}^inf exp(-lambda h(u)) du, split at +-delta. The far
/// pieces are cut where lambda h exceeds 745 (below the smallest double).
fn log_u_integral(lambda: f64, u0: f64, delta: f64) -> f64 {
    let f = |u: f64| (-lambda * h(u)).exp();
    let cut = 745.0 / lambda;
    // Upper cut: e^u = cut + 1 + u by fixed-point iteration.
    let mut hi = (cut + 2.0).ln().max(delta) + 1.0;
    for _ in 0..8 {
        hi = (cut + 1.0 + hi).ln().max(delta);
    }
    let lo = u0.max(-1.0 - cut);
    let tol = 1e-15;
    let mut total = 0.0;
    if lo < -delta {
        total += integrate_adaptive(&f, lo, -delta, tol).0;
    }
    let mid_lo = lo.max(-delta);
    total += integrate_adaptive(&f, mid_lo, delta, tol).0;
    total += integrate_adaptive(&f, delta, hi + 1.0, tol).0;
    total.ln()
}

/// log I(rho), written after the substitution gamma = sigma log rho + sigma u:
/// log I = sigma rho^2 log rho - sigma rho + log(sigma int_{u0}^inf e^{-sigma rho h(u)} du),
/// u0 = gamma0 / sigma - log rho.
pub fn laplace_integral_log(sigma: f64, rho: f64, gamma0: f64) -> Result<f64> {
    Ok(laplace_probe(sigma, rho, gamma0)?.log_i)
}

pub fn laplace_probe(sigma: f64, rho: f64, gamma0: f64) -> Result<LaplaceProbe> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(domain(format!("sigma must be positive, got {sigma}")));
    }
    if !(rho >= 2.0) || !rho.is_finite() {
        return Err(domain(format!("rho must be >= 2, got {rho}")));
    }
    if !(gamma0 > 0.0) {
        return Err(domain(format!("gamma0 must be positive, got {gamma0}")));
    }
    let lambda = sigma * rho;
    let saddle = sigma * rho.ln();
    if gamma0 > saddle - 3.0 * sigma / lambda.sqrt() {
        return Err(domain(format!(
            "saddle sigma log rho = {saddle} is not inside the domain above gamma0 = {gamma0}"
        )));
    }
    let u0 = gamma0 / sigma - rho.ln();
    let base = sigma * rho * rho * rho.ln() - sigma * rho;
    let log_i = base + sigma.ln() + log_u_integral(lambda, u0, split_point(rho));
    let log_ref = base + 0.5 * (2.0 * std::f64::consts::PI * sigma / rho).ln();
    Ok(LaplaceProbe { sigma, rho, gamma0, log_i, log_ref })
}

/// exp(log I - log reference); tends to 1 as rho grows.
pub fn asymptotic_ratio(sigma: f64, rho: f64, gamma0: f64) -> Result<f64> {
    Ok(laplace_probe(sigma, rho, gamma0)?.ratio())
}

/// Q(l, R) = 3 - 6 / (2 + log(log R / l) / log R) and the relative residual of
/// R^{6/(3-Q)} = (1/l) R^2 log R, both sides compared as logarithms.
pub fn q_exponent(ell: u32, r: f64) -> Result<(f64, f64)> {
    if ell == 0 {
        return Err(domain("l must be a positive integer"));
    }
    if !(r > 1.0) || !r.is_finite() {
        return Err(domain(format!("R must exceed 1, got {r}")));
    }
    let lr = r.ln();
    let x = (lr / ell as f64).ln() / lr;
    let denom = 2.0 + x;
    if !(denom > 0.0) {
        return Err(domain(format!("log(log R / l) / log R = {x} leaves 3 - Q undefined")));
    }
    let q = 3.0 - 6.0 / denom;
    let lhs = 6.0 / (3.0 - q) * lr;
    let rhs = 2.0 * lr + (lr / ell as f64).ln();
    Ok((q, (lhs - rhs).exp_m1().abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_at_zero() {
        assert_eq!(h(0.0), 0.0);
        assert_eq!(h_prime(0.0), 0.0);
        assert_eq!(h_second(0.0), 1.0);
        assert!((h(1e-8) - 5e-17).abs() < 1e-24);
    }

    #[test]
    fn q_identity_and_limits() {
        for ell in [1, 2, 5] {
            for k in [2.0, 5.0, 10.0] {
                let (_, res) = q_exponent(ell, f64::exp(k)).unwrap();
                assert!(res <= 1e-12);
            }
        }
        let (q, _) = q_exponent(1, f64::exp(20.0)).unwrap();
        assert!(q > 0.0 && q < 1.0);
        assert!(q_exponent(1, 1.0).is_err());
        assert!(q_exponent(0, 10.0).is_err());
    }

    #[test]
    fn saddle_must_be_inside() {
        assert!(laplace_probe(1.0, 2.0, 5.0).is_err());
        assert!(laplace_probe(1.0, 1.0, 0.5).is_err());
    }
}
