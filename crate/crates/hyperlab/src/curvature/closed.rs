//! Closed-form curvature of g = d rho^2 + sinh^2(rho) Upsilon.
//!
//! Index 0 is the radial direction; index i >= 1 is the angle theta_i, which
//! is row/column i-1 of the Upsilon matrices.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::metric::{full_metric, WarpedMetric};
use super::tensors::{Christoffel, Riemann};
use crate::error::{Error, Result};
use crate::numerics::coth;

/// Upsilon and everything derived from it at one point.
#[derive(Debug, Clone)]
pub struct AngularData {
    pub n: usize,
    pub rho: f64,
    pub u: DMatrix<f64>,
    pub ui: DMatrix<f64>,
    pub ud: DMatrix<f64>,
    pub udd: DMatrix<f64>,
    /// T = Upsilon^{-1} Upsilon_rho (mixed indices).
    pub t: DMatrix<f64>,
    /// Christoffel symbols of (S^{n-1}, Upsilon): gt[i][j][k] = Gamma~^i_{jk}.
    pub gt: Vec<Vec<Vec<f64>>>,
    /// Riemann tensor of (S^{n-1}, Upsilon): rt[i][j][k][l] = R~^i_{jkl}.
    pub rt: Vec<Vec<Vec<Vec<f64>>>>,
    /// Ricci tensor of (S^{n-1}, Upsilon).
    pub ric_t: DMatrix<f64>,
    /// nabla~_j Upsilon_rho_{ki}, stored [j][(k, i)].
    pub nabla_ud: Vec<DMatrix<f64>>,
}

impl AngularData {
    pub fn new<M: WarpedMetric + ?Sized>(metric: &M, rho: f64, theta: &[f64]) -> Result<Self> {
        let n = metric.n();
        let m = n - 1;
        if theta.len() != m {
            return Err(Error::Invalid(format!("expected {m} angles, got {}", theta.len())));
        }
        if !(rho > 0.0) {
            return Err(Error::Domain(format!("rho must be positive, got {rho}")));
        }
        let u = metric.upsilon(rho, theta);
        let ui = u.clone().try_inverse().ok_or_else(|| Error::SingularMetric {
            rho,
            detail: "Upsilon not invertible".into(),
        })?;
        let ud = metric.upsilon_rho(rho, theta);
        let udd = metric.upsilon_rho_rho(rho, theta);
        let du = metric.upsilon_theta(rho, theta);
        let ddu = metric.upsilon_theta_theta(rho, theta);
        let dud = metric.upsilon_rho_theta(rho, theta);
        let t = &ui * &ud;

        let mut gt = vec![vec![vec![0.0; m]; m]; m];
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let mut s = 0.0;
                    for l in 0..m {
                        s += ui[(i, l)] * (du[j][(l, k)] + du[k][(l, j)] - du[l][(j, k)]);
                    }
                    gt[i][j][k] = 0.5 * s;
                }
            }
        }
        // d_p Gamma~^i_{jk}
        let dui: Vec<DMatrix<f64>> = (0..m).map(|p| -(&ui * &du[p] * &ui)).collect();
        let mut dgt = vec![vec![vec![vec![0.0; m]; m]; m]; m];
        for p in 0..m {
            for i in 0..m {
                for j in 0..m {
                    for k in 0..m {
                        let mut s = 0.0;
                        for l in 0..m {
                            s += dui[p][(i, l)] * (du[j][(l, k)] + du[k][(l, j)] - du[l][(j, k)]);
                            s += ui[(i, l)]
                                * (ddu[p][j][(l, k)] + ddu[p][k][(l, j)] - ddu[p][l][(j, k)]);
                        }
                        dgt[p][i][j][k] = 0.5 * s;
                    }
                }
            }
        }
        let mut rt = vec![vec![vec![vec![0.0; m]; m]; m]; m];
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        let mut v = dgt[k][i][l][j] - dgt[l][i][k][j];
                        for e in 0..m {
                            v += gt[i][k][e] * gt[e][l][j] - gt[i][l][e] * gt[e][k][j];
                        }
                        rt[i][j][k][l] = v;
                    }
                }
            }
        }
        let ric_t = DMatrix::from_fn(m, m, |j, l| (0..m).map(|k| rt[k][j][k][l]).sum());
        let nabla_ud = (0..m)
            .map(|j| {
                DMatrix::from_fn(m, m, |k, i| {
                    let mut v = dud[j][(k, i)];
                    for l in 0..m {
                        v -= gt[l][j][k] * ud[(l, i)] + gt[l][j][i] * ud[(k, l)];
                    }
                    v
                })
            })
            .collect();
        Ok(AngularData {
            n,
            rho,
            u,
            ui,
            ud,
            udd,
            t,
            gt,
            rt,
            ric_t,
            nabla_ud,
        })
    }

    /// Scalar curvature of (S^{n-1}, Upsilon).
    pub fn scalar_t(&self) -> f64 {
        self.ui.component_mul(&self.ric_t).sum()
    }

    /// nabla~_j T^i_k = Upsilon^{il} nabla~_j Upsilon_rho_{lk}.
    pub fn nabla_t(&self, j: usize) -> DMatrix<f64> {
        &self.ui * &self.nabla_ud[j]
    }
}

pub fn christoffel_closed<M: WarpedMetric + ?Sized>(metric: &M, rho: f64, theta: &[f64]) -> Result<Christoffel> {
    let ad = AngularData::new(metric, rho, theta)?;
    Ok(christoffel_from(&ad))
}

pub fn christoffel_from(ad: &AngularData) -> Christoffel {
    let n = ad.n;
    let m = n - 1;
    let (s, c) = (ad.rho.sinh(), ad.rho.cosh());
    let ct = coth(ad.rho);
    let mut g = Christoffel::zeros(n);
    for i in 0..m {
        for j in 0..m {
            g.set(0, i + 1, j + 1, -s * c * ad.u[(i, j)] - 0.5 * s * s * ad.ud[(i, j)]);
            let v = if i == j { ct } else { 0.0 } + 0.5 * ad.t[(i, j)];
            g.set(i + 1, 0, j + 1, v);
            g.set(i + 1, j + 1, 0, v);
            for k in 0..m {
                g.set(i + 1, j + 1, k + 1, ad.gt[i][j][k]);
            }
        }
    }
    g
}

pub fn riemann_closed<M: WarpedMetric + ?Sized>(metric: &M, rho: f64, theta: &[f64]) -> Result<Riemann> {
    let ad = AngularData::new(metric, rho, theta)?;
    Ok(riemann_from(&ad))
}

/// Radial-radial block R^i_{0j0} as a matrix (the operator X -> R(X, d_rho) d_rho).
pub fn radial_curvature_operator(ad: &AngularData) -> DMatrix<f64> {
    let m = ad.n - 1;
    let ct = coth(ad.rho);
    DMatrix::identity(m, m) * -1.0 - &ad.t * ct - &ad.ui * &ad.udd * 0.5 + &ad.t * &ad.t * 0.25
}

pub fn riemann_from(ad: &AngularData) -> Riemann {
    let n = ad.n;
    let m = n - 1;
    let rho = ad.rho;
    let s2 = rho.sinh().powi(2);
    let ct = coth(rho);
    let gam = christoffel_from(ad);
    let mut r = Riemann::zeros(n);

    // R^0_{i0j} = -sinh^2 [Upsilon + coth Upsilon' + Upsilon''/2 - Upsilon' Upsilon^{-1} Upsilon'/4]
    let p = &ad.u + &ad.ud * ct + &ad.udd * 0.5 - &ad.ud * &ad.ui * &ad.ud * 0.25;
    // R^i_{0j0}
    let q = radial_curvature_operator(ad);
    for i in 0..m {
        for j in 0..m {
            r.set(0, i + 1, 0, j + 1, -s2 * p[(i, j)]);
            r.set(0, i + 1, j + 1, 0, s2 * p[(i, j)]);
            r.set(i + 1, 0, j + 1, 0, q[(i, j)]);
            r.set(i + 1, 0, 0, j + 1, -q[(i, j)]);
        }
    }
    // R^i_{jkl} = R~^i_{jkl} + Gamma^i_{k0} Gamma^0_{lj} - Gamma^i_{l0} Gamma^0_{kj}
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    let v = ad.rt[i][j][k][l] + gam.get(i + 1, k + 1, 0) * gam.get(0, l + 1, j + 1)
                        - gam.get(i + 1, l + 1, 0) * gam.get(0, k + 1, j + 1);
                    r.set(i + 1, j + 1, k + 1, l + 1, v);
                }
            }
        }
    }
    // R^0_{ijk} = -sinh^2/2 (nabla~_j Upsilon'_{ki} - nabla~_k Upsilon'_{ji})
    // R^i_{0jk} = 1/2 (nabla~_j T^i_k - nabla~_k T^i_j)
    let nt: Vec<DMatrix<f64>> = (0..m).map(|j| ad.nabla_t(j)).collect();
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let v0 = -0.5 * s2 * (ad.nabla_ud[j][(k, i)] - ad.nabla_ud[k][(j, i)]);
                r.set(0, i + 1, j + 1, k + 1, v0);
                r.set(i + 1, 0, j + 1, k + 1, 0.5 * (nt[j][(i, k)] - nt[k][(i, j)]));
            }
        }
    }
    // R^i_{j0k} = g^{il} R_{lj0k} = g^{il} R_{0klj} = (Upsilon^{il}/sinh^2) R^0_{klj}
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let mut v = 0.0;
                for l in 0..m {
                    v += ad.ui[(i, l)] * r.get(0, k + 1, l + 1, j + 1);
                }
                v /= s2;
                r.set(i + 1, j + 1, 0, k + 1, v);
                r.set(i + 1, j + 1, k + 1, 0, -v);
            }
        }
    }
    r
}

/// Ricci tensor from the displayed closed forms and the scalar curvature.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RicciScalar {
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
}

pub fn ricci_scalar_closed<M: WarpedMetric + ?Sized>(metric: &M, rho: f64, theta: &[f64]) -> Result<RicciScalar> {
    let ad = AngularData::new(metric, rho, theta)?;
    Ok(ricci_scalar_from(&ad))
}

pub fn ricci_scalar_from(ad: &AngularData) -> RicciScalar {
    let n = ad.n;
    let m = n - 1;
    let nm1 = m as f64;
    let rho = ad.rho;
    let (s, c) = (rho.sinh(), rho.cosh());
    let ct = coth(rho);
    let tr_t = ad.t.trace();
    let ui_udd = &ad.ui * &ad.udd;
    let t2 = &ad.t * &ad.t;
    let alpha = (n as f64 - 2.0) * c * c + s * s;
    let ud2 = &ad.ud * &ad.ui * &ad.ud;

    let mut ric = DMatrix::zeros(n, n);
    ric[(0, 0)] = -nm1 - ct * tr_t - 0.5 * ui_udd.trace() + 0.25 * t2.trace();
    let nt: Vec<DMatrix<f64>> = (0..m).map(|j| ad.nabla_t(j)).collect();
    for i in 0..m {
        // nabla~_j T^j_i - d_i tr T; the covariant derivative of the trace is
        // the trace of the covariant derivative.
        let div: f64 = (0..m).map(|j| nt[j][(j, i)]).sum();
        let grad_tr: f64 = nt[i].trace();
        let v = 0.5 * (div - grad_tr);
        ric[(0, i + 1)] = v;
        ric[(i + 1, 0)] = v;
    }
    for i in 0..m {
        for j in 0..m {
            ric[(i + 1, j + 1)] = ad.ric_t[(i, j)] - alpha * ad.u[(i, j)]
                - 0.5 * s * c * (tr_t * ad.u[(i, j)] + nm1 * ad.ud[(i, j)])
                - 0.5 * s * s * (ad.udd[(i, j)] - ud2[(i, j)] + 0.5 * tr_t * ad.ud[(i, j)]);
        }
    }
    let scalar = ric[(0, 0)]
        + (0..m)
            .flat_map(|i| (0..m).map(move |j| (i, j)))
            .map(|(i, j)| ad.ui[(i, j)] * ric[(i + 1, j + 1)])
            .sum::<f64>()
            / (s * s);
    RicciScalar { ricci: ric, scalar }
}

/// Everything at one point, closed form.
#[derive(Debug, Clone)]
pub struct CurvatureReport {
    pub rho: f64,
    pub theta: Vec<f64>,
    pub metric: DMatrix<f64>,
    pub christoffels: Christoffel,
    pub riemann: Riemann,
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
    /// K(d_rho, d_theta_j).
    pub sectional_radial: Vec<f64>,
    /// K(d_theta_j, d_theta_k), j < k, row-major.
    pub sectional_tangential: Vec<f64>,
}

pub fn curvature_report<M: WarpedMetric + ?Sized>(metric: &M, rho: f64, theta: &[f64]) -> Result<CurvatureReport> {
    let ad = AngularData::new(metric, rho, theta)?;
    let n = ad.n;
    let mut x = vec![rho];
    x.extend_from_slice(theta);
    let g = full_metric(metric, &x);
    let riemann = riemann_from(&ad);
    let rs = ricci_scalar_from(&ad);
    let e = |k: usize| {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        v
    };
    let mut sectional_radial = Vec::new();
    let mut sectional_tangential = Vec::new();
    for j in 1..n {
        sectional_radial.push(riemann.sectional(&g, &e(0), &e(j))?);
        for k in (j + 1)..n {
            sectional_tangential.push(riemann.sectional(&g, &e(j), &e(k))?);
        }
    }
    Ok(CurvatureReport {
        rho,
        theta: theta.to_vec(),
        metric: g,
        christoffels: christoffel_from(&ad),
        riemann,
        ricci: rs.ricci,
        scalar: rs.scalar,
        sectional_radial,
        sectional_tangential,
    })
}

/// A 2-plane given by two coordinate-basis vectors.
pub type Plane = (Vec<f64>, Vec<f64>);

/// Sectional curvature of the given planes along a list of radii at fixed angles.
pub fn sectional_scan<M: WarpedMetric + ?Sized>(
    metric: &M,
    theta: &[f64],
    planes: &[Plane],
    rho_list: &[f64],
) -> Result<Vec<Vec<f64>>> {
    if rho_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid("rho_list must increase".into()));
    }
    let mut out = Vec::with_capacity(rho_list.len());
    for &rho in rho_list {
        let ad = AngularData::new(metric, rho, theta)?;
        let r = riemann_from(&ad);
        let mut x = vec![rho];
        x.extend_from_slice(theta);
        let g = full_metric(metric, &x);
        let row = planes
            .iter()
            .map(|(a, b)| r.sectional(&g, a, b))
            .collect::<Result<Vec<f64>>>()?;
        out.push(row);
    }
    Ok(out)
}

/// Coordinate planes (d_rho, d_theta_j) followed by (d_theta_j, d_theta_k).
pub fn coordinate_planes(n: usize) -> Vec<Plane> {
    let e = |k: usize| {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        v
    };
    let mut planes: Vec<Plane> = (1..n).map(|j| (e(0), e(j))).collect();
    for j in 1..n {
        for k in (j + 1)..n {
            planes.push((e(j), e(k)));
        }
    }
    planes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::metric::WarpedMetricSpec;
    use crate::curvature::tensors::scalar_from_ricci;

    #[test]
    fn hyperbolic_christoffels() {
        let spec = WarpedMetricSpec::hyperbolic(2);
        let g = christoffel_closed(&spec, 1.3, &[0.4]).unwrap();
        assert!((g.get(0, 1, 1) + 1.3f64.sinh() * 1.3f64.cosh()).abs() < 1e-12);
        assert!((g.get(1, 0, 1) - coth(1.3)).abs() < 1e-12);
        assert_eq!(g.get(0, 0, 1), 0.0);
        assert_eq!(g.get(1, 0, 0), 0.0);
    }

    #[test]
    fn hyperbolic_space_has_constant_curvature() {
        for n in 2..=5 {
            let spec = WarpedMetricSpec::hyperbolic(n);
            let theta: Vec<f64> = (0..n - 1).map(|k| 0.6 + 0.3 * k as f64).collect();
            for rho in [0.3, 2.0, 9.0] {
                let rep = curvature_report(&spec, rho, &theta).unwrap();
                for k in rep.sectional_radial.iter().chain(&rep.sectional_tangential) {
                    assert!((k + 1.0).abs() < 1e-9, "n={n} rho={rho} K={k}");
                }
                let err = (&rep.ricci + &rep.metric * (n as f64 - 1.0)).amax();
                assert!(err <= 1e-9 * rep.metric.amax().max(1.0), "n={n} rho={rho}");
                assert!((rep.scalar + (n * (n - 1)) as f64).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn scalar_matches_contraction_of_table() {
        let spec = WarpedMetricSpec::mixed(4, 0.1, 2.0);
        let th = [1.0, 0.5, 2.0];
        let rep = curvature_report(&spec, 1.7, &th).unwrap();
        let from_table = scalar_from_ricci(&rep.metric, &rep.riemann.ricci()).unwrap();
        assert!((from_table - rep.scalar).abs() < 1e-9);
        assert!(rep.riemann.antisymmetry_defect() < 1e-9);
    }

    #[test]
    fn degenerate_plane_is_an_error() {
        let spec = WarpedMetricSpec::hyperbolic(3);
        let planes = vec![(vec![0.0, 1.0, 0.0], vec![0.0, 2.0, 0.0])];
        assert!(sectional_scan(&spec, &[0.5, 0.5], &planes, &[1.0]).is_err());
        assert!(sectional_scan(&spec, &[0.5, 0.5], &coordinate_planes(3), &[2.0, 1.0]).is_err());
    }
}
