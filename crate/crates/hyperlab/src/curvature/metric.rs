//! Warped metrics g = d rho^2 + sinh^2(rho) Upsilon_{jk}(rho, theta) d theta^j d theta^k.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Angular part of a warped metric. Radial and angular derivatives default to
/// Richardson-extrapolated central differences.
pub trait WarpedMetric: Send + Sync {
    fn n(&self) -> usize;

    /// Polynomial decay order of Upsilon - h.
    fn decay_m(&self) -> f64;

    fn upsilon(&self, rho: f64, theta: &[f64]) -> DMatrix<f64>;

    fn upsilon_rho(&self, rho: f64, theta: &[f64]) -> DMatrix<f64> {
        let h = 1e-3 * rho.max(1.0);
        let c = |h: f64| (self.upsilon(rho + h, theta) - self.upsilon(rho - h, theta)) / (2.0 * h);
        (c(h / 2.0) * 4.0 - c(h)) / 3.0
    }

    fn upsilon_rho_rho(&self, rho: f64, theta: &[f64]) -> DMatrix<f64> {
        let h = 2e-3 * rho.max(1.0);
        let f = |r: f64| self.upsilon(r, theta);
        (f(rho - 2.0 * h) * -1.0 + f(rho - h) * 16.0 - f(rho) * 30.0 + f(rho + h) * 16.0
            - f(rho + 2.0 * h))
            / (12.0 * h * h)
    }

    /// d Upsilon / d theta^k for every angle k.
    fn upsilon_theta(&self, rho: f64, theta: &[f64]) -> Vec<DMatrix<f64>> {
        angular_gradient(&|th: &[f64]| self.upsilon(rho, th), theta)
    }

    /// d^2 Upsilon / d theta^k d theta^l, indexed [k][l].
    fn upsilon_theta_theta(&self, rho: f64, theta: &[f64]) -> Vec<Vec<DMatrix<f64>>> {
        let m = theta.len();
        (0..m)
            .map(|k| {
                let g = angular_gradient(&|th: &[f64]| self.upsilon_theta(rho, th)[k].clone(), theta);
                g.into_iter().collect()
            })
            .collect()
    }

    /// d Upsilon_rho / d theta^k.
    fn upsilon_rho_theta(&self, rho: f64, theta: &[f64]) -> Vec<DMatrix<f64>> {
        angular_gradient(&|th: &[f64]| self.upsilon_rho(rho, th), theta)
    }
}

const THETA_STEP: f64 = 2e-3;

/// Richardson central differences of a matrix-valued function of the angles.
pub fn angular_gradient<F: Fn(&[f64]) -> DMatrix<f64>>(f: &F, theta: &[f64]) -> Vec<DMatrix<f64>> {
    let mut th = theta.to_vec();
    (0..theta.len())
        .map(|k| {
            let mut c = |h: f64| {
                th[k] = theta[k] + h;
                let a = f(&th);
                th[k] = theta[k] - h;
                let b = f(&th);
                th[k] = theta[k];
                (a - b) / (2.0 * h)
            };
            let coarse = c(THETA_STEP);
            let fine = c(THETA_STEP / 2.0);
            (fine * 4.0 - coarse) / 3.0
        })
        .collect()
}

/// Round metric on S^{n-1} in spherical angles: diag(1, sin^2 t1, sin^2 t1 sin^2 t2, ...).
pub fn sphere_metric(theta: &[f64]) -> DMatrix<f64> {
    let m = theta.len();
    let mut h = DMatrix::zeros(m, m);
    let mut acc = 1.0;
    for k in 0..m {
        h[(k, k)] = acc;
        acc *= theta[k].sin().powi(2);
    }
    h
}

fn sphere_metric_theta(theta: &[f64]) -> Vec<DMatrix<f64>> {
    let m = theta.len();
    let h = sphere_metric(theta);
    (0..m)
        .map(|p| {
            let mut d = DMatrix::zeros(m, m);
            for k in (p + 1)..m {
                d[(k, k)] = 2.0 / theta[p].tan() * h[(k, k)];
            }
            d
        })
        .collect()
}

fn sphere_metric_theta_theta(theta: &[f64]) -> Vec<Vec<DMatrix<f64>>> {
    let m = theta.len();
    let h = sphere_metric(theta);
    let mut out = vec![vec![DMatrix::zeros(m, m); m]; m];
    for p in 0..m {
        for q in 0..m {
            for k in (p.max(q) + 1)..m {
                let v = if p == q {
                    let c = 1.0 / theta[p].tan();
                    (4.0 * c * c - 2.0 / theta[p].sin().powi(2)) * h[(k, k)]
                } else {
                    4.0 / (theta[p].tan() * theta[q].tan()) * h[(k, k)]
                };
                out[p][q][(k, k)] = v;
            }
        }
    }
    out
}

/// Perturbations Lambda = Upsilon - h offered by the built-in specs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Perturbation {
    /// Lambda = 0: hyperbolic space.
    None,
    /// Lambda = <rho>^{-m} eps0 cos(theta_1) h.
    ConformalCos { eps0: f64 },
    /// Conformal part plus an off-diagonal coupling of the first two angles;
    /// exercises the generic difference paths (no analytic angular derivatives).
    Mixed { eps0: f64 },
}

/// Warped metric with Upsilon = h + Lambda(rho, theta).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WarpedMetricSpec {
    pub n: usize,
    pub decay_m: f64,
    pub perturbation: Perturbation,
}

/// <rho>^{-m} = (1 + rho^2)^{-m/2} and its first two derivatives.
fn japanese(rho: f64, m: f64) -> (f64, f64, f64) {
    let q = 1.0 + rho * rho;
    let f = q.powf(-m / 2.0);
    let f1 = -m * rho * q.powf(-m / 2.0 - 1.0);
    let f2 = -m * q.powf(-m / 2.0 - 1.0) + m * (m + 2.0) * rho * rho * q.powf(-m / 2.0 - 2.0);
    (f, f1, f2)
}

impl WarpedMetricSpec {
    pub fn hyperbolic(n: usize) -> Self {
        WarpedMetricSpec {
            n,
            decay_m: 2.0,
            perturbation: Perturbation::None,
        }
    }

    pub fn conformal_cos(n: usize, eps0: f64, m: f64) -> Self {
        WarpedMetricSpec {
            n,
            decay_m: m,
            perturbation: Perturbation::ConformalCos { eps0 },
        }
    }

    pub fn mixed(n: usize, eps0: f64, m: f64) -> Self {
        WarpedMetricSpec {
            n,
            decay_m: m,
            perturbation: Perturbation::Mixed { eps0 },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Invalid("warped metric needs n >= 2".into()));
        }
        if !(self.decay_m > 0.0) {
            return Err(Error::Invalid("decay order m must be positive".into()));
        }
        match self.perturbation {
            Perturbation::ConformalCos { eps0 } | Perturbation::Mixed { eps0 } => {
                if !(eps0.abs() < 0.5) {
                    return Err(Error::Invalid(format!(
                        "|eps0| = {} too large; Upsilon may lose positivity",
                        eps0.abs()
                    )));
                }
            }
            Perturbation::None => {}
        }
        Ok(())
    }

    fn mixed_block(&self, theta: &[f64]) -> DMatrix<f64> {
        let m = self.n - 1;
        let h = sphere_metric(theta);
        let mut e = DMatrix::zeros(m, m);
        if m >= 2 {
            let v = 0.5 * (theta[0] + theta[m - 1]).sin() * (h[(0, 0)] * h[(1, 1)]).sqrt();
            e[(0, 1)] = v;
            e[(1, 0)] = v;
        }
        e + h * theta[0].cos()
    }

    /// Checks that Upsilon is symmetric positive definite at (rho, theta).
    pub fn check_positive(&self, rho: f64, theta: &[f64]) -> Result<()> {
        let u = self.upsilon(rho, theta);
        if (&u - u.transpose()).amax() > 1e-12 * u.amax().max(1.0) {
            return Err(Error::SingularMetric {
                rho,
                detail: "Upsilon not symmetric".into(),
            });
        }
        let min = u.symmetric_eigenvalues().min();
        if !(min > 0.0) {
            return Err(Error::SingularMetric {
                rho,
                detail: format!("Upsilon has eigenvalue {min}"),
            });
        }
        Ok(())
    }
}

impl WarpedMetric for WarpedMetricSpec {
    fn n(&self) -> usize {
        self.n
    }

    fn decay_m(&self) -> f64 {
        self.decay_m
    }

    fn upsilon(&self, rho: f64, theta: &[f64]) -> DMatrix<f64> {
        let h = sphere_metric(theta);
        match self.perturbation {
            Perturbation::None => h,
            Perturbation::ConformalCos { eps0 } => {
                let (f, _, _) = japanese(rho, self.decay_m);
                &h * (1.0 + eps0 * f * theta[0].cos())
            }
            Perturbation::Mixed { eps0 } => {
                let (f, _, _) = japanese(rho, self.decay_m);
                h + self.mixed_block(theta) * (eps0 * f)
            }
        }
    }

    fn upsilon_rho(&self, rho: f64, theta: &[f64]) -> DMatrix<f64> {
        let m = self.n - 1;
        match self.perturbation {
            Perturbation::None => DMatrix::zeros(m, m),
            Perturbation::ConformalCos { eps0 } => {
                let (_, f1, _) = japanese(rho, self.decay_m);
                sphere_metric(theta) * (eps0 * f1 * theta[0].cos())
            }
            Perturbation::Mixed { eps0 } => {
                let (_, f1, _) = japanese(rho, self.decay_m);
                self.mixed_block(theta) * (eps0 * f1)
            }
        }
    }

    fn upsilon_rho_rho(&self, rho: f64, theta: &[f64]) -> DMatrix<f64> {
        let m = self.n - 1;
        match self.perturbation {
            Perturbation::None => DMatrix::zeros(m, m),
            Perturbation::ConformalCos { eps0 } => {
                let (_, _, f2) = japanese(rho, self.decay_m);
                sphere_metric(theta) * (eps0 * f2 * theta[0].cos())
            }
            Perturbation::Mixed { eps0 } => {
                let (_, _, f2) = japanese(rho, self.decay_m);
                self.mixed_block(theta) * (eps0 * f2)
            }
        }
    }

    fn upsilon_theta(&self, rho: f64, theta: &[f64]) -> Vec<DMatrix<f64>> {
        match self.perturbation {
            Perturbation::None => sphere_metric_theta(theta),
            Perturbation::ConformalCos { eps0 } => {
                let (f, _, _) = japanese(rho, self.decay_m);
                conformal_theta(theta, eps0 * f)
            }
            Perturbation::Mixed { .. } => angular_gradient(&|th: &[f64]| self.upsilon(rho, th), theta),
        }
    }

    fn upsilon_theta_theta(&self, rho: f64, theta: &[f64]) -> Vec<Vec<DMatrix<f64>>> {
        match self.perturbation {
            Perturbation::None => sphere_metric_theta_theta(theta),
            Perturbation::ConformalCos { eps0 } => {
                let (f, _, _) = japanese(rho, self.decay_m);
                conformal_theta_theta(theta, eps0 * f)
            }
            Perturbation::Mixed { .. } => {
                let m = theta.len();
                (0..m)
                    .map(|k| angular_gradient(&|th: &[f64]| self.upsilon_theta(rho, th)[k].clone(), theta))
                    .collect()
            }
        }
    }

    fn upsilon_rho_theta(&self, rho: f64, theta: &[f64]) -> Vec<DMatrix<f64>> {
        match self.perturbation {
            Perturbation::None => vec![DMatrix::zeros(self.n - 1, self.n - 1); self.n - 1],
            Perturbation::ConformalCos { eps0 } => {
                let (_, f1, _) = japanese(rho, self.decay_m);
                // d/d theta of c(theta) h with c = eps0 f1 cos(theta_1)
                let h = sphere_metric(theta);
                let dh = sphere_metric_theta(theta);
                let c = eps0 * f1 * theta[0].cos();
                (0..theta.len())
                    .map(|k| {
                        let mut d = &dh[k] * c;
                        if k == 0 {
                            d -= &h * (eps0 * f1 * theta[0].sin());
                        }
                        d
                    })
                    .collect()
            }
            Perturbation::Mixed { .. } => angular_gradient(&|th: &[f64]| self.upsilon_rho(rho, th), theta),
        }
    }
}

/// Angular derivatives of (1 + a cos theta_1) h.
fn conformal_theta(theta: &[f64], a: f64) -> Vec<DMatrix<f64>> {
    let h = sphere_metric(theta);
    let dh = sphere_metric_theta(theta);
    let c = 1.0 + a * theta[0].cos();
    (0..theta.len())
        .map(|k| {
            let mut d = &dh[k] * c;
            if k == 0 {
                d -= &h * (a * theta[0].sin());
            }
            d
        })
        .collect()
}

fn conformal_theta_theta(theta: &[f64], a: f64) -> Vec<Vec<DMatrix<f64>>> {
    let m = theta.len();
    let h = sphere_metric(theta);
    let dh = sphere_metric_theta(theta);
    let ddh = sphere_metric_theta_theta(theta);
    let c = 1.0 + a * theta[0].cos();
    let c1 = -a * theta[0].sin();
    let c11 = -a * theta[0].cos();
    let mut out = vec![vec![DMatrix::zeros(m, m); m]; m];
    for p in 0..m {
        for q in 0..m {
            let mut d = &ddh[p][q] * c;
            if p == 0 {
                d += &dh[q] * c1;
            }
            if q == 0 {
                d += &dh[p] * c1;
            }
            if p == 0 && q == 0 {
                d += &h * c11;
            }
            out[p][q] = d;
        }
    }
    out
}

/// Full metric in coordinates (rho, theta_1, ..., theta_{n-1}).
pub fn full_metric<M: WarpedMetric + ?Sized>(metric: &M, x: &[f64]) -> DMatrix<f64> {
    let n = metric.n();
    let u = metric.upsilon(x[0], &x[1..]);
    let s2 = x[0].sinh().powi(2);
    let mut g = DMatrix::zeros(n, n);
    g[(0, 0)] = 1.0;
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            g[(i + 1, j + 1)] = s2 * u[(i, j)];
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
        (a - b).amax() <= tol
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        let theta = [0.9, 0.4, 2.0];
        for spec in [WarpedMetricSpec::conformal_cos(4, 0.1, 2.0), WarpedMetricSpec::hyperbolic(4)] {
            let fd = angular_gradient(&|th: &[f64]| spec.upsilon(1.3, th), &theta);
            let an = spec.upsilon_theta(1.3, &theta);
            for k in 0..3 {
                assert!(close(&fd[k], &an[k], 1e-9));
            }
            let an2 = spec.upsilon_theta_theta(1.3, &theta);
            for k in 0..3 {
                let fd2 = angular_gradient(&|th: &[f64]| spec.upsilon_theta(1.3, th)[k].clone(), &theta);
                for l in 0..3 {
                    assert!(close(&fd2[l], &an2[k][l], 1e-8), "{k} {l}");
                }
            }
            let fdr = angular_gradient(&|th: &[f64]| spec.upsilon_rho(1.3, th), &theta);
            let anr = spec.upsilon_rho_theta(1.3, &theta);
            for k in 0..3 {
                assert!(close(&fdr[k], &anr[k], 1e-9));
            }
        }
    }

    #[test]
    fn radial_derivatives_match_trait_defaults() {
        struct Wrap(WarpedMetricSpec);
        impl WarpedMetric for Wrap {
            fn n(&self) -> usize {
                self.0.n
            }
            fn decay_m(&self) -> f64 {
                self.0.decay_m
            }
            fn upsilon(&self, rho: f64, theta: &[f64]) -> DMatrix<f64> {
                self.0.upsilon(rho, theta)
            }
        }
        let spec = WarpedMetricSpec::mixed(3, 0.1, 2.0);
        let w = Wrap(spec);
        let th = [1.1, 0.3];
        assert!(close(&w.upsilon_rho(2.0, &th), &spec.upsilon_rho(2.0, &th), 1e-10));
        assert!(close(&w.upsilon_rho_rho(2.0, &th), &spec.upsilon_rho_rho(2.0, &th), 1e-7));
    }

    #[test]
    fn test_family_stays_positive() {
        let spec = WarpedMetricSpec::mixed(4, 0.1, 2.0);
        for rho in [0.1, 1.0, 10.0] {
            spec.check_positive(rho, &[0.5, 1.0, 3.0]).unwrap();
        }
        assert!(WarpedMetricSpec::conformal_cos(3, 0.9, 2.0).validate().is_err());
    }
}
