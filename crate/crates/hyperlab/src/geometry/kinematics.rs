//! The moving center P(t) = exp_0(-R t(1-t) e_1) and time derivatives of
//! the distance to it.

use serde::{Deserialize, Serialize};

use super::hyperboloid::{hyperbolic_distance, minkowski, HyperboloidPoint};
use crate::error::{domain, Error, Result};
use crate::tolerances::KINEMATICS_DEGENERATE;

/// Geodesic ray through the origin in the -e_1 direction, parametrised by
/// s(t) = R t (1 - t).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MovingCenter {
    pub n: usize,
    pub r: f64,
}

impl MovingCenter {
    pub fn new(n: usize, r: f64) -> Self {
        MovingCenter { n, r }
    }

    pub fn s(&self, t: f64) -> f64 {
        self.r * (t * (1.0 - t))
    }
    pub fn s_t(&self, t: f64) -> f64 {
        self.r * (1.0 - 2.0 * t)
    }
    pub fn s_tt(&self) -> f64 {
        -2.0 * self.r
    }

    pub fn point(&self, t: f64) -> HyperboloidPoint {
        let s = self.s(t);
        let mut spatial = vec![0.0; self.n];
        spatial[0] = -s.sinh();
        HyperboloidPoint::from_spatial(&spatial)
    }

    /// dP/ds, a unit tangent vector at P.
    pub fn unit_tangent(&self, t: f64) -> Vec<f64> {
        let s = self.s(t);
        let mut v = vec![0.0; self.n + 1];
        v[0] = s.sinh();
        v[1] = -s.cosh();
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kinematics {
    pub rho: f64,
    pub rho_t: f64,
    pub rho_tt: f64,
}

/// rho = d(x, P(t)) with rho_t = <P', grad rho> and
/// rho_tt = coth rho (|P'|^2 - rho_t^2) + <P'', grad rho>.
pub fn moving_center_kinematics(x: &HyperboloidPoint, r: f64, t: f64) -> Result<Kinematics> {
    if !(r > 0.0) {
        return Err(domain("R must be positive"));
    }
    let mc = MovingCenter::new(x.dim(), r);
    let p = mc.point(t);
    let rho = hyperbolic_distance(x, &p)?;
    if rho <= KINEMATICS_DEGENERATE {
        return Err(Error::Degenerate(format!(
            "x is within {rho:e} of the moving center at t={t}"
        )));
    }
    let u = mc.unit_tangent(t);
    let bu = minkowski(&u, x.coords());
    let sh = rho.sinh();
    let (sp, spp) = (mc.s_t(t), mc.s_tt());
    let rho_t = sp * bu / sh;
    let rho_tt = (sp * sp - rho_t * rho_t) / rho.tanh() + spp * bu / sh;
    Ok(Kinematics { rho, rho_t, rho_tt })
}

/// Derivatives of d(x, P(t))^2, regular also when x = P(t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquaredDistanceRates {
    pub d2: f64,
    pub d2_t: f64,
    pub d2_tt: f64,
}

pub fn squared_distance_rates(x: &HyperboloidPoint, mc: &MovingCenter, t: f64) -> SquaredDistanceRates {
    let p = mc.point(t);
    let rho = hyperbolic_distance(x, &p).unwrap_or(0.0);
    let u = mc.unit_tangent(t);
    let bu = minkowski(&u, x.coords());
    let q = crate::numerics::x_over_sinh(rho);
    let (sp, spp) = (mc.s_t(t), mc.s_tt());
    // rho * rho_t and rho_t^2 written without dividing by sinh rho.
    let rho_rho_t = sp * bu * q;
    // |rho_t| <= |P'|; the direction-dependent rho_t^2 is multiplied by
    // (1 - rho coth rho), which vanishes at coincidence.
    let rho_t2 = if rho > 1e-8 {
        (sp * bu / rho.sinh()).powi(2).min(sp * sp)
    } else {
        0.0
    };
    let rho_coth = if rho > 1e-4 { rho / rho.tanh() } else { 1.0 + rho * rho / 3.0 };
    let d2_tt = 2.0 * rho_t2 * (1.0 - rho_coth) + 2.0 * rho_coth * sp * sp + 2.0 * spp * bu * q;
    SquaredDistanceRates {
        d2: rho * rho,
        d2_t: 2.0 * rho_rho_t,
        d2_tt,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stationary_at_half() {
        let x = HyperboloidPoint::polar2(1.3, 0.7);
        let k = moving_center_kinematics(&x, 3.0, 0.5).unwrap();
        assert!(k.rho_t.abs() < 1e-14);
    }

    #[test]
    fn collinear_case() {
        let (r, t) = (3.0, 0.2);
        let s = r * t * (1.0 - t);
        let x = HyperboloidPoint::polar2(s + 1.0, std::f64::consts::PI);
        let k = moving_center_kinematics(&x, r, t).unwrap();
        assert!((k.rho - 1.0).abs() < 1e-12);
        assert!((k.rho_t + r * (1.0 - 2.0 * t)).abs() < 1e-12);
    }

    #[test]
    fn degenerate_rejected() {
        let mc = MovingCenter::new(2, 2.0);
        let p = mc.point(0.3);
        assert!(matches!(moving_center_kinematics(&p, 2.0, 0.3), Err(Error::Degenerate(_))));
    }

    #[test]
    fn squared_rates_agree_with_kinematics() {
        let x = HyperboloidPoint::polar2(2.0, 1.0);
        let k = moving_center_kinematics(&x, 4.0, 0.3).unwrap();
        let q = squared_distance_rates(&x, &MovingCenter::new(2, 4.0), 0.3);
        assert!((q.d2_t - 2.0 * k.rho * k.rho_t).abs() < 1e-12);
        assert!((q.d2_tt - 2.0 * (k.rho_t * k.rho_t + k.rho * k.rho_tt)).abs() < 1e-10);
    }
}
