//! Geodesic spheres S_rho of a warped metric: shape operator, Riccati and
//! Bochner identities, and the assembled bilaplacian of rho^2.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::closed::{radial_curvature_operator, ricci_scalar_from, AngularData};
use super::metric::{full_metric, sphere_metric, WarpedMetric, WarpedMetricSpec};
use super::oracle::christoffel_fd;
use crate::error::{Error, Result};
use crate::numerics::{coth, loglog_slope, richardson_d1};

const RHO_STEP: f64 = 1e-3;
const THETA_STEP: f64 = 2e-3;

fn rho_step(rho: f64) -> f64 {
    RHO_STEP * rho.clamp(0.1, 1.0)
}

/// Shape operator of S_rho with respect to the outward normal d_rho.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShapeOperatorState {
    /// S^i_j.
    pub s: DMatrix<f64>,
    /// A_{ij} = g_{ik} S^k_j.
    pub a: DMatrix<f64>,
    /// Mean curvature tr S.
    pub h: f64,
}

impl ShapeOperatorState {
    pub fn from_angular(ad: &AngularData) -> Self {
        let m = ad.n - 1;
        let (s, c) = (ad.rho.sinh(), ad.rho.cosh());
        let so = DMatrix::identity(m, m) * coth(ad.rho) + &ad.t * 0.5;
        let a = &ad.u * (s * c) + &ad.ud * (0.5 * s * s);
        let h = so.trace();
        ShapeOperatorState { s: so, a, h }
    }

    pub fn new<M: WarpedMetric + ?Sized>(metric: &M, rho: f64, theta: &[f64]) -> Result<Self> {
        Ok(Self::from_angular(&AngularData::new(metric, rho, theta)?))
    }

    /// |S|^2 = tr S^2.
    pub fn norm2(&self) -> f64 {
        (&self.s * &self.s).trace()
    }

    /// A^{ij} with both indices raised by g.
    pub fn a_upper(&self, ad: &AngularData) -> DMatrix<f64> {
        let s2 = ad.rho.sinh().powi(2);
        &ad.ui * &self.a * &ad.ui / (s2 * s2)
    }

    /// Distance from S = (1/2) Upsilon_g^{-1} d_rho Upsilon_g, Upsilon_g = sinh^2 Upsilon.
    pub fn construction_defect(&self, ad: &AngularData) -> f64 {
        let (s, c) = (ad.rho.sinh(), ad.rho.cosh());
        let ug = &ad.u * (s * s);
        let dug = &ad.u * (2.0 * s * c) + &ad.ud * (s * s);
        match ug.try_inverse() {
            Some(inv) => (inv * dug * 0.5 - &self.s).amax(),
            None => f64::INFINITY,
        }
    }
}

/// Frobenius norm of d_rho S + S^2 + R(., d_rho) d_rho, with d_rho S by differences.
pub fn riccati_residual<M: WarpedMetric + ?Sized>(metric: &M, rho: f64, theta: &[f64]) -> Result<f64> {
    let ad = AngularData::new(metric, rho, theta)?;
    let st = ShapeOperatorState::from_angular(&ad);
    let h = rho_step(rho);
    let sp = ShapeOperatorState::new(metric, rho + h, theta)?.s;
    let sm = ShapeOperatorState::new(metric, rho - h, theta)?.s;
    let sp2 = ShapeOperatorState::new(metric, rho + h / 2.0, theta)?.s;
    let sm2 = ShapeOperatorState::new(metric, rho - h / 2.0, theta)?.s;
    let ds = ((&sp2 - &sm2) / h * 4.0 - (&sp - &sm) / (2.0 * h)) / 3.0;
    let res = ds + &st.s * &st.s + radial_curvature_operator(&ad);
    Ok(res.norm())
}

/// |d_rho H + |S|^2 + Ric(d_rho, d_rho)|, the trace of the Riccati equation.
pub fn riccati_trace_residual<M: WarpedMetric + ?Sized>(metric: &M, rho: f64, theta: &[f64]) -> Result<f64> {
    let ad = AngularData::new(metric, rho, theta)?;
    let st = ShapeOperatorState::from_angular(&ad);
    let ric00 = ricci_scalar_from(&ad).ricci[(0, 0)];
    let dh = d_rho(|r| ShapeOperatorState::new(metric, r, theta).map(|s| s.h), rho)?;
    Ok((dh + st.norm2() + ric00).abs())
}

fn d_rho<F: Fn(f64) -> Result<f64>>(f: F, rho: f64) -> Result<f64> {
    let h = rho_step(rho);
    let mut err = None;
    let v = richardson_d1(
        |r| match f(r) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                f64::NAN
            }
        },
        rho,
        h,
    );
    match err {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// Mean curvature as the Laplacian of the distance, d_rho log sqrt(det g),
/// from differences of the full metric.
pub fn mean_curvature_fd<M: WarpedMetric + ?Sized>(metric: &M, rho: f64, theta: &[f64]) -> f64 {
    let mut x = vec![rho];
    x.extend_from_slice(theta);
    richardson_d1(
        |r| {
            x[0] = r;
            0.5 * full_metric(metric, &x).determinant().ln()
        },
        rho,
        rho_step(rho),
    )
}

/// |tr S - Delta rho| with Delta rho computed independently from the metric.
pub fn mean_curvature_gap<M: WarpedMetric + ?Sized>(metric: &M, rho: f64, theta: &[f64]) -> Result<f64> {
    let st = ShapeOperatorState::new(metric, rho, theta)?;
    Ok((st.h - mean_curvature_fd(metric, rho, theta)).abs())
}

/// |Hess rho|^2 + <grad rho, grad Delta rho> + Ric(grad rho, grad rho).
///
/// The Hessian comes from difference Christoffels of the full metric
/// (Hess rho_ab = -Gamma^0_ab), Delta rho from d_rho log sqrt(det g), and the
/// Ricci term from the closed form.
pub fn bochner_residual<M: WarpedMetric + ?Sized>(metric: &M, rho: f64, theta: &[f64]) -> Result<f64> {
    let n = metric.n();
    let mut x = vec![rho];
    x.extend_from_slice(theta);
    let g = full_metric(metric, &x);
    let gi = g
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::SingularMetric {
            rho,
            detail: "full metric not invertible".into(),
        })?;
    let gam = christoffel_fd(&|y: &[f64]| full_metric(metric, y), &x, 1e-3)?;
    let hess = DMatrix::from_fn(n, n, |a, b| -gam.get(0, a, b));
    let hess_norm2 = (&gi * &hess * &gi * &hess).trace();
    let dh = richardson_d1(|r| mean_curvature_fd(metric, r, theta), rho, 10.0 * rho_step(rho));
    let ad = AngularData::new(metric, rho, theta)?;
    let ric00 = ricci_scalar_from(&ad).ricci[(0, 0)];
    Ok((hess_norm2 + dh + ric00).abs())
}

/// div_Upsilon of the covector w_i = Upsilon^{jk} nabla~_j Upsilon_rho_{ki}.
fn div_div_upsilon_rho<M: WarpedMetric + ?Sized>(metric: &M, ad: &AngularData, theta: &[f64]) -> Result<f64> {
    let m = ad.n - 1;
    let w_at = |th: &[f64]| -> Result<Vec<f64>> {
        let a = AngularData::new(metric, ad.rho, th)?;
        Ok((0..m)
            .map(|i| {
                let mut s = 0.0;
                for j in 0..m {
                    for k in 0..m {
                        s += a.ui[(j, k)] * a.nabla_ud[j][(k, i)];
                    }
                }
                s
            })
            .collect())
    };
    let w = w_at(theta)?;
    let mut th = theta.to_vec();
    let mut dw = vec![vec![0.0; m]; m];
    for j in 0..m {
        let mut central = |h: f64| -> Result<Vec<f64>> {
            th[j] = theta[j] + h;
            let p = w_at(&th)?;
            th[j] = theta[j] - h;
            let q = w_at(&th)?;
            th[j] = theta[j];
            Ok(p.iter().zip(&q).map(|(a, b)| (a - b) / (2.0 * h)).collect())
        };
        let c1 = central(THETA_STEP)?;
        let c2 = central(THETA_STEP / 2.0)?;
        for i in 0..m {
            dw[j][i] = (4.0 * c2[i] - c1[i]) / 3.0;
        }
    }
    let mut div = 0.0;
    for i in 0..m {
        for j in 0..m {
            let mut cov = dw[j][i];
            for l in 0..m {
                cov -= ad.gt[l][j][i] * w[l];
            }
            div += ad.ui[(i, j)] * cov;
        }
    }
    Ok(div)
}

/// Pieces of the assembled bilaplacian, kept for diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BilaplacianTerms {
    pub mean_curvature: f64,
    pub shape_norm2: f64,
    pub tr_s3: f64,
    pub curvature_pairing: f64,
    pub ric00: f64,
    pub d_ric00: f64,
    pub div_div_a: f64,
    pub d_scalar: f64,
    pub tr_a_ric: f64,
    /// div_S of the tangential 1-form Ric(d_rho, .).
    pub codazzi_divergence: f64,
    /// Delta(Delta rho).
    pub bilaplacian_rho: f64,
    /// Delta^2(rho^2).
    pub value: f64,
}

/// Delta^2(rho^2) assembled from the shape operator and curvature:
/// 2H^2 - 4|S|^2 - 4 Ric_00 + 2 rho Delta H, where
/// Delta H = H'' + H H' + Delta_S H,
/// H'' + H H' = 2 tr S^3 + 2 <R(., d_rho) d_rho, S> - d_rho Ric_00 - H |S|^2 - H Ric_00,
/// Delta_S H = div div A - div_S Ric(d_rho, .)^T (traced Codazzi), and
/// div_S Ric(d_rho, .)^T = d_rho R / 2 + tr(A Ric|tan) - H Ric_00 - d_rho Ric_00
/// (contracted Bianchi).
pub fn bilaplacian_terms<M: WarpedMetric + ?Sized>(metric: &M, rho: f64, theta: &[f64]) -> Result<BilaplacianTerms> {
    let ad = AngularData::new(metric, rho, theta)?;
    let st = ShapeOperatorState::from_angular(&ad);
    let rs = ricci_scalar_from(&ad);
    let m = ad.n - 1;
    let s2 = &st.s * &st.s;
    let shape_norm2 = s2.trace();
    let tr_s3 = (&s2 * &st.s).trace();
    let curvature_pairing = (radial_curvature_operator(&ad) * &st.s).trace();
    let ric00 = rs.ricci[(0, 0)];
    let ric00_at = |r: f64| AngularData::new(metric, r, theta).map(|a| ricci_scalar_from(&a).ricci[(0, 0)]);
    let d_ric00 = d_rho(ric00_at, rho)?;
    let scalar_at = |r: f64| AngularData::new(metric, r, theta).map(|a| ricci_scalar_from(&a).scalar);
    let d_scalar = d_rho(scalar_at, rho)?;
    let div_div_a = div_div_upsilon_rho(metric, &ad, theta)? / (2.0 * rho.sinh().powi(2));
    let a_up = st.a_upper(&ad);
    let ric_tan = rs.ricci.view((1, 1), (m, m)).into_owned();
    let tr_a_ric = a_up.component_mul(&ric_tan).sum();
    let h = st.h;
    let codazzi_divergence = 0.5 * d_scalar + tr_a_ric - h * ric00 - d_ric00;
    let bilaplacian_rho = 2.0 * tr_s3 + 2.0 * curvature_pairing - d_ric00 - h * shape_norm2 - h * ric00
        + div_div_a
        - codazzi_divergence;
    let value = 2.0 * h * h - 4.0 * shape_norm2 - 4.0 * ric00 + 2.0 * rho * bilaplacian_rho;
    Ok(BilaplacianTerms {
        mean_curvature: h,
        shape_norm2,
        tr_s3,
        curvature_pairing,
        ric00,
        d_ric00,
        div_div_a,
        d_scalar,
        tr_a_ric,
        codazzi_divergence,
        bilaplacian_rho,
        value,
    })
}

/// Assembled Delta^2(rho^2); rho below `rho0` is rejected.
pub fn bilaplacian_perturbed<M: WarpedMetric + ?Sized>(metric: &M, rho: f64, theta: &[f64], rho0: f64) -> Result<f64> {
    if rho < rho0 {
        return Err(Error::Domain(format!("rho = {rho} below rho0 = {rho0}")));
    }
    Ok(bilaplacian_terms(metric, rho, theta)?.value)
}

/// Delta^2(rho^2) by applying the coordinate Laplacian
/// (1/sqrt g) d_a (sqrt g g^{ab} d_b F) to F = Delta(rho^2) = 2 + 2 rho tr S.
pub fn bilaplacian_direct<M: WarpedMetric + ?Sized>(metric: &M, rho: f64, theta: &[f64]) -> Result<f64> {
    let n = metric.n();
    let f = |x: &[f64]| -> f64 {
        match ShapeOperatorState::new(metric, x[0], &x[1..]) {
            Ok(s) => 2.0 + 2.0 * x[0] * s.h,
            Err(_) => f64::NAN,
        }
    };
    let grad = |x: &[f64], h: f64| -> Vec<f64> {
        let mut y = x.to_vec();
        (0..n)
            .map(|c| {
                let mut central = |h: f64| {
                    y[c] = x[c] + h;
                    let a = f(&y);
                    y[c] = x[c] - h;
                    let b = f(&y);
                    y[c] = x[c];
                    (a - b) / (2.0 * h)
                };
                (4.0 * central(h / 2.0) - central(h)) / 3.0
            })
            .collect()
    };
    let flux = |x: &[f64], c: usize| -> f64 {
        let g = full_metric(metric, x);
        let det = g.determinant();
        let gi = match g.try_inverse() {
            Some(v) => v,
            None => return f64::NAN,
        };
        let df = grad(x, 1e-3);
        det.sqrt() * (0..n).map(|b| gi[(c, b)] * df[b]).sum::<f64>()
    };
    let mut x = vec![rho];
    x.extend_from_slice(theta);
    let sqrt_det = full_metric(metric, &x).determinant().sqrt();
    let mut div = 0.0;
    let h = 1e-2;
    let mut y = x.clone();
    for c in 0..n {
        let mut central = |h: f64| {
            y[c] = x[c] + h;
            let a = flux(&y, c);
            y[c] = x[c] - h;
            let b = flux(&y, c);
            y[c] = x[c];
            (a - b) / (2.0 * h)
        };
        div += (4.0 * central(h / 2.0) - central(h)) / 3.0;
    }
    let v = div / sqrt_det;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite {
            time: 0.0,
            detail: format!("direct bilaplacian at rho = {rho}"),
        })
    }
}

/// tr(A Ric|tan) by direct contraction and through the X/Y decomposition.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TraceDecomposition {
    pub direct: f64,
    pub decomposed: f64,
    pub residual: f64,
}

pub fn trace_decomposition_check<M: WarpedMetric + ?Sized>(
    metric: &M,
    rho: f64,
    theta: &[f64],
) -> Result<TraceDecomposition> {
    let ad = AngularData::new(metric, rho, theta)?;
    let st = ShapeOperatorState::from_angular(&ad);
    let rs = ricci_scalar_from(&ad);
    let m = ad.n - 1;
    let direct = st
        .a_upper(&ad)
        .component_mul(&rs.ricci.view((1, 1), (m, m)).into_owned())
        .sum();

    let nm1 = m as f64;
    let (s, c) = (rho.sinh(), rho.cosh());
    let sc = s * c;
    let s2 = s * s;
    let alpha = (ad.n as f64 - 2.0) * c * c + s2;
    // Mixed-index versions: tr_Upsilon X = tr(Upsilon^{-1} X).
    let ud_m = &ad.t;
    let udd_m = &ad.ui * &ad.udd;
    let tr_ud = ud_m.trace();
    let tr_udd = udd_m.trace();
    let tr_ud2 = (ud_m * ud_m).trace();
    let tr_ud3 = (ud_m * ud_m * ud_m).trace();
    let ud_udd = (ud_m * &udd_m).trace();
    let ric_ud = (&ad.ui * &ad.ric_t * &ad.ui).component_mul(&ad.ud).sum();
    let x = ad.scalar_t()
        - nm1 * alpha
        - nm1 * sc * tr_ud
        - 0.5 * s2 * (tr_udd - tr_ud2 + 0.5 * tr_ud * tr_ud);
    let y = ric_ud - alpha * tr_ud - 0.5 * sc * (tr_ud * tr_ud + nm1 * tr_ud2)
        - 0.5 * s2 * (ud_udd - tr_ud3 + 0.5 * tr_ud * tr_ud2);
    let decomposed = coth(rho) / s2 * x + y / (2.0 * s2);
    Ok(TraceDecomposition {
        direct,
        decomposed,
        residual: (direct - decomposed).abs(),
    })
}

/// Largest |assembled bilaplacian| over a radial sweep at the given angles:
/// the measured frak_F_n.
pub fn frak_f_sweep<M: WarpedMetric + ?Sized>(metric: &M, rho_list: &[f64], thetas: &[Vec<f64>]) -> Result<f64> {
    let mut sup: f64 = 0.0;
    for th in thetas {
        for &r in rho_list {
            sup = sup.max(bilaplacian_terms(metric, r, th)?.value.abs());
        }
    }
    Ok(sup)
}

/// Fitted log-log slope of max_{ij} |Lambda_{ij}| against rho.
pub fn perturbation_decay_slope(spec: &WarpedMetricSpec, theta: &[f64], rho_list: &[f64]) -> Result<f64> {
    let h = sphere_metric(theta);
    let vals: Vec<f64> = rho_list
        .iter()
        .map(|&r| (spec.upsilon(r, theta) - &h).amax())
        .collect();
    if vals.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::Degenerate("perturbation vanishes; no decay to fit".into()));
    }
    Ok(loglog_slope(rho_list, &vals))
}

/// Unperturbed reference -(n-1)^2 coth(rho) for tr(A Ric|tan) on H^n.
pub fn hyperbolic_trace_reference(n: usize, rho: f64) -> f64 {
    let nm1 = (n - 1) as f64;
    -nm1 * nm1 * coth(rho)
}
