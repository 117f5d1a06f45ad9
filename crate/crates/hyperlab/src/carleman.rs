//! Carleman weights (static, moving-center Schrödinger/heat, quadratic-log),
//! closed-form test bumps and the inequality checks built on them.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::q_exponent;
use crate::error::{domain, Error, Result};
use crate::evolution::{assemble_conjugated, PolarGrid, WeightField};
use crate::geometry::{
    frak_c, hyperbolic_distance, polar2_distance, squared_distance_rates, HyperboloidPoint, MovingCenter,
};
use crate::numerics::{composite_gauss, coth, LogSum};
use crate::tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    StaticQuadratic,
    SchrodingerMoving,
    HeatMoving,
    QuadraticLog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CarlemanOperator {
    /// d_t - i Delta
    Schrodinger,
    /// d_t - Delta
    Heat,
}

impl CarlemanOperator {
    pub fn for_kind(kind: WeightKind) -> Option<Self> {
        match kind {
            WeightKind::SchrodingerMoving => Some(CarlemanOperator::Schrodinger),
            WeightKind::HeatMoving => Some(CarlemanOperator::Heat),
            _ => None,
        }
    }

    /// (a, b) with the generator (a + ib) Delta.
    pub fn coefficients(self) -> (f64, f64) {
        match self {
            CarlemanOperator::Schrodinger => (0.0, 1.0),
            CarlemanOperator::Heat => (1.0, 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub kind: WeightKind,
    pub n: usize,
    pub mu: f64,
    pub eps: f64,
    pub r: f64,
    pub ell: u32,
    pub gamma: f64,
    /// Inner radius of the admissible support (quadratic-log only).
    pub rho0: f64,
}

impl WeightSpec {
    pub fn static_quadratic(gamma: f64) -> Self {
        WeightSpec {
            kind: WeightKind::StaticQuadratic,
            n: 2,
            mu: 0.0,
            eps: 0.0,
            r: 0.0,
            ell: 0,
            gamma,
            rho0: 0.0,
        }
    }

    pub fn schrodinger(mu: f64, eps: f64, r: f64) -> Self {
        WeightSpec {
            kind: WeightKind::SchrodingerMoving,
            mu,
            eps,
            r,
            ..Self::static_quadratic(0.0)
        }
    }

    pub fn heat(mu: f64, eps: f64, r: f64) -> Self {
        WeightSpec {
            kind: WeightKind::HeatMoving,
            ..Self::schrodinger(mu, eps, r)
        }
    }

    pub fn quadratic_log(ell: u32, r: f64, mu: f64, rho0: f64) -> Self {
        WeightSpec {
            kind: WeightKind::QuadraticLog,
            mu,
            r,
            ell,
            rho0,
            ..Self::static_quadratic(0.0)
        }
    }

    /// The same weight with mu at the quadratic-log threshold.
    pub fn quadratic_log_at_threshold(ell: u32, r: f64, rho0: f64) -> Result<Self> {
        let mu = qlog_mu_threshold(ell, r, rho0, frak_c(2))?;
        Ok(Self::quadratic_log(ell, r, mu, rho0))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(domain("n must be >= 2"));
        }
        let pos = |v: f64, name: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(domain(format!("{name} must be positive, got {v}")))
            }
        };
        match self.kind {
            WeightKind::StaticQuadratic => {
                if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
                    return Err(domain(format!("gamma must be >= 0, got {}", self.gamma)));
                }
            }
            WeightKind::SchrodingerMoving | WeightKind::HeatMoving => {
                pos(self.mu, "mu")?;
                pos(self.eps, "eps")?;
                pos(self.r, "R")?;
            }
            WeightKind::QuadraticLog => {
                pos(self.mu, "mu")?;
                pos(self.rho0, "rho0")?;
                if self.ell == 0 {
                    return Err(domain("l must be a positive integer"));
                }
                if !(self.r > 1.0) {
                    return Err(domain(format!("R must exceed 1, got {}", self.r)));
                }
            }
        }
        Ok(())
    }

    /// The value the hypothesis compares against: 4 mu eps^{-1/2} c_n for R
    /// (moving weights) or the mu threshold (quadratic-log).
    pub fn threshold(&self) -> Result<f64> {
        match self.kind {
            WeightKind::StaticQuadratic => Ok(0.0),
            WeightKind::SchrodingerMoving | WeightKind::HeatMoving => {
                Ok(4.0 * self.mu / self.eps.sqrt() * frak_c(self.n))
            }
            WeightKind::QuadraticLog => qlog_mu_threshold(self.ell, self.r, self.rho0, frak_c(self.n)),
        }
    }

    pub fn hypothesis_ok(&self) -> bool {
        if self.validate().is_err() {
            return false;
        }
        match (self.kind, self.threshold()) {
            (WeightKind::StaticQuadratic, _) => true,
            (WeightKind::QuadraticLog, Ok(th)) => self.mu >= th,
            (_, Ok(th)) => self.r > th,
            (_, Err(_)) => false,
        }
    }

    pub fn require_hypothesis(&self) -> Result<()> {
        self.validate()?;
        if self.hypothesis_ok() {
            return Ok(());
        }
        let th = self.threshold()?;
        Err(Error::Hypothesis(match self.kind {
            WeightKind::QuadraticLog => format!("mu = {} is below the threshold {th}", self.mu),
            _ => format!("R = {} does not exceed 4 mu eps^(-1/2) c_n = {th}", self.r),
        }))
    }

    /// Constant c of c ||e^phi h|| <= ||e^phi L h|| for the moving weights.
    pub fn carleman_constant(&self) -> f64 {
        self.r / 4.0 * (self.eps / self.mu).sqrt()
    }

    fn time_shift(&self, t: f64) -> (f64, f64, f64) {
        let c = (1.0 + self.eps) * self.r * self.r / (16.0 * self.mu);
        let mut v = (-c * t * (1.0 - t), -c * (1.0 - 2.0 * t), 2.0 * c);
        if self.kind == WeightKind::HeatMoving {
            let k = self.r * self.r / 6.0;
            v.0 += k * t * (1.0 - t) * (1.0 - 2.0 * t);
            v.1 += k * (1.0 - 6.0 * t + 6.0 * t * t);
            v.2 += k * (12.0 * t - 6.0);
        }
        v
    }

    fn mu_q(&self) -> f64 {
        let (q, _) = q_exponent(self.ell, self.r).unwrap_or((0.0, 0.0));
        (q * self.mu.ln()).exp()
    }

    /// phi from the distance to the origin and the squared distance to P(t).
    fn phi_from(&self, rho: f64, d2: f64, t: f64) -> f64 {
        match self.kind {
            WeightKind::StaticQuadratic => self.gamma * rho * rho,
            WeightKind::SchrodingerMoving | WeightKind::HeatMoving => self.mu * d2 + self.time_shift(t).0,
            WeightKind::QuadraticLog => {
                self.mu * rho * rho / (self.r * self.r) + self.mu_q() * time_cutoff(t).0
            }
        }
    }
}

impl WeightField for WeightSpec {
    fn phi(&self, rho: f64, theta: f64, t: f64) -> f64 {
        let d2 = match self.kind {
            WeightKind::SchrodingerMoving | WeightKind::HeatMoving => {
                polar2_distance(rho, theta, self.r * (t * (1.0 - t)), PI).powi(2)
            }
            _ => 0.0,
        };
        self.phi_from(rho, d2, t)
    }

    fn phi_t(&self, rho: f64, theta: f64, t: f64) -> f64 {
        match self.kind {
            WeightKind::StaticQuadratic => 0.0,
            WeightKind::SchrodingerMoving | WeightKind::HeatMoving => {
                let q = squared_distance_rates(
                    &HyperboloidPoint::polar2(rho, theta),
                    &MovingCenter::new(2, self.r),
                    t,
                );
                self.mu * q.d2_t + self.time_shift(t).1
            }
            WeightKind::QuadraticLog => self.mu_q() * time_cutoff(t).1,
        }
    }

    fn phi_tt(&self, rho: f64, theta: f64, t: f64) -> f64 {
        match self.kind {
            WeightKind::StaticQuadratic => 0.0,
            WeightKind::SchrodingerMoving | WeightKind::HeatMoving => {
                let q = squared_distance_rates(
                    &HyperboloidPoint::polar2(rho, theta),
                    &MovingCenter::new(2, self.r),
                    t,
                );
                self.mu * q.d2_tt + self.time_shift(t).2
            }
            WeightKind::QuadraticLog => self.mu_q() * time_cutoff(t).2,
        }
    }

    fn label(&self) -> String {
        format!("{:?}(mu={}, eps={}, R={}, l={}, gamma={})", self.kind, self.mu, self.eps, self.r, self.ell, self.gamma)
    }
}

/// phi(x, t) at a point of H^n. The moving center travels along -e_1.
pub fn weight_eval(spec: &WeightSpec, x: &HyperboloidPoint, t: f64) -> Result<f64> {
    spec.validate()?;
    let o = HyperboloidPoint::origin(x.dim());
    let rho = hyperbolic_distance(x, &o)?;
    let d2 = match spec.kind {
        WeightKind::SchrodingerMoving | WeightKind::HeatMoving => {
            hyperbolic_distance(x, &MovingCenter::new(x.dim(), spec.r).point(t))?.powi(2)
        }
        _ => 0.0,
    };
    Ok(spec.phi_from(rho, d2, t))
}

fn smooth_step_parts(x: f64) -> [f64; 3] {
    if x <= 0.0 {
        return [0.0; 3];
    }
    let f = (-1.0 / x).exp();
    [f, f / (x * x), f * (1.0 / x.powi(4) - 2.0 / x.powi(3))]
}

/// C-infinity step: 0 for x <= 0, 1 for x >= 1, with two derivatives.
pub fn smooth_step(x: f64) -> [f64; 3] {
    if x <= 0.0 {
        return [0.0; 3];
    }
    if x >= 1.0 {
        return [1.0, 0.0, 0.0];
    }
    let a = smooth_step_parts(x);
    let b0 = smooth_step_parts(1.0 - x);
    let b = [b0[0], -b0[1], b0[2]];
    let s = a[0] + b[0];
    let num = a[1] * b[0] - a[0] * b[1];
    let num_d = a[2] * b[0] - a[0] * b[2];
    let den = s * s;
    let den_d = 2.0 * s * (a[1] + b[1]);
    [a[0] / s, num / den, (num_d * den - num * den_d) / (den * den)]
}

/// Time cutoff of the quadratic-log weight: 3 on [1/4, 3/4], supported in
/// (1/8, 7/8). Returns value and two derivatives.
pub fn time_cutoff(t: f64) -> (f64, f64, f64) {
    let u = smooth_step(8.0 * t - 1.0);
    let v = smooth_step(7.0 - 8.0 * t);
    (
        3.0 * u[0] * v[0],
        24.0 * (u[1] * v[0] - u[0] * v[1]),
        192.0 * (u[2] * v[0] - 2.0 * u[1] * v[1] + u[0] * v[2]),
    )
}

/// sup |phi_tt| of the time cutoff, sampled on 16001 points.
pub fn time_cutoff_max_tt() -> f64 {
    static MAX: OnceLock<f64> = OnceLock::new();
    *MAX.get_or_init(|| {
        (0..=16000)
            .map(|k| time_cutoff(k as f64 / 16000.0).2.abs())
            .fold(0.0, f64::max)
    })
}

/// mu >= max(rho0^{-1} F^{1/2} R^2 / 4, (|phi_tt|_inf / (8 rho0^2))^{1/(3-Q)} R^{6/(3-Q)}),
/// with R^{6/(3-Q)} = (1/l) R^2 log R.
pub fn qlog_mu_threshold(ell: u32, r: f64, rho0: f64, frak_f: f64) -> Result<f64> {
    if !(rho0 > 0.0) {
        return Err(domain("rho0 must be positive"));
    }
    let (q, _) = q_exponent(ell, r)?;
    let first = frak_f.sqrt() / (4.0 * rho0) * r * r;
    let k = time_cutoff_max_tt() / (8.0 * rho0 * rho0);
    let second = k.powf(1.0 / (3.0 - q)) * r * r * r.ln() / ell as f64;
    Ok(first.max(second))
}

/// h(x, t) = A G(r) tau(t), r the distance to the spatial center,
/// G(r) = exp(-r^2/w^2 + i k r^2) (1 - r^2/r_s^2)^4 and
/// tau(t) = exp(-(t - t_c)^2 / w_t^2) (1 - (t - t_c)^2 / s_t^2)^4.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestBump {
    pub rho_c: f64,
    pub theta_c: f64,
    pub t_c: f64,
    pub width: f64,
    pub support: f64,
    pub t_width: f64,
    pub t_support: f64,
    pub tilt: f64,
    pub amplitude: f64,
}

impl TestBump {
    /// Gaussian bump cut off at three widths in space and time.
    pub fn gaussian(rho_c: f64, theta_c: f64, t_c: f64, width: f64, t_width: f64) -> Self {
        TestBump {
            rho_c,
            theta_c,
            t_c,
            width,
            support: 3.0 * width,
            t_width,
            t_support: 3.0 * t_width,
            tilt: 0.0,
            amplitude: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.width > 0.0
            && self.support > 0.0
            && self.t_width > 0.0
            && self.t_support > 0.0
            && self.rho_c >= 0.0
            && self.amplitude.is_finite()
            && self.tilt.is_finite();
        if !ok {
            return Err(domain(format!("invalid bump {self:?}")));
        }
        if self.t_c - self.t_support <= 0.0 || self.t_c + self.t_support >= 1.0 {
            return Err(Error::Support(format!(
                "time support [{}, {}] is not inside (0, 1)",
                self.t_c - self.t_support,
                self.t_c + self.t_support
            )));
        }
        Ok(())
    }

    /// (G, G', G'') at distance r from the center.
    pub fn profile(&self, r: f64) -> [Complex64; 3] {
        let zero = Complex64::new(0.0, 0.0);
        if r >= self.support {
            return [zero; 3];
        }
        let alpha = Complex64::new(-1.0 / (self.width * self.width), self.tilt);
        let e = (alpha * r * r).exp() * self.amplitude;
        let s2 = self.support * self.support;
        let q = 1.0 - r * r / s2;
        let q1 = -2.0 * r / s2;
        let p = q.powi(4);
        let p1 = 4.0 * q.powi(3) * q1;
        let p2 = 12.0 * q * q * q1 * q1 - 8.0 * q.powi(3) / s2;
        let g = e * p;
        let g1 = e * (alpha * 2.0 * r * p + p1);
        let g2 = e * ((alpha * 2.0 + alpha * alpha * 4.0 * r * r) * p + alpha * 4.0 * r * p1 + p2);
        [g, g1, g2]
    }

    /// Radial Laplacian G'' + coth r G' on H^2.
    pub fn laplacian(&self, r: f64) -> Complex64 {
        let [_, g1, g2] = self.profile(r);
        if r < 1e-8 {
            g2 * 2.0
        } else {
            g2 + g1 * coth(r)
        }
    }

    /// (tau, tau').
    pub fn time_profile(&self, t: f64) -> (f64, f64) {
        let s = t - self.t_c;
        if s.abs() >= self.t_support {
            return (0.0, 0.0);
        }
        let w2 = self.t_width * self.t_width;
        let ts2 = self.t_support * self.t_support;
        let e = (-s * s / w2).exp();
        let q = 1.0 - s * s / ts2;
        let tau = e * q.powi(4);
        let d = e * (-2.0 * s / w2 * q.powi(4) - 8.0 * s / ts2 * q.powi(3));
        (tau, d)
    }

    pub fn distance_to_center(&self, rho: f64, theta: f64) -> f64 {
        polar2_distance(rho, theta, self.rho_c, self.theta_c)
    }

    pub fn value(&self, rho: f64, theta: f64, t: f64) -> Complex64 {
        self.profile(self.distance_to_center(rho, theta))[0] * self.time_profile(t).0
    }

    /// Spatial slice at time t, with the time factor dropped when
    /// `spatial_only` (used for virial checks on a single slice).
    pub fn sample(&self, grid: &PolarGrid, t: Option<f64>) -> Vec<Complex64> {
        let tau = t.map(|t| self.time_profile(t).0).unwrap_or(1.0);
        grid.sample(|rho, theta| self.profile(self.distance_to_center(rho, theta))[0] * tau)
    }

    /// Support ends at least `cells` radial cells inside the grid.
    pub fn fits_grid(&self, grid: &PolarGrid, cells: usize) -> bool {
        self.rho_c + self.support <= grid.radial.rho_max() - cells as f64 * grid.radial.spacing()
    }
}

/// Tensor quadrature in bump-centred polar coordinates (r, psi) times
/// Gauss-Legendre in t.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpQuadrature {
    pub r_panels: usize,
    pub r_order: usize,
    pub npsi: usize,
    pub t_panels: usize,
    pub t_order: usize,
}

impl Default for BumpQuadrature {
    fn default() -> Self {
        BumpQuadrature {
            r_panels: 8,
            r_order: 8,
            npsi: 192,
            t_panels: 8,
            t_order: 8,
        }
    }
}

impl BumpQuadrature {
    pub fn refined(&self) -> Self {
        BumpQuadrature {
            r_panels: 2 * self.r_panels,
            npsi: 2 * self.npsi,
            t_panels: 2 * self.t_panels,
            ..*self
        }
    }
}

/// Geometry at one quadrature node.
struct Node {
    t: f64,
    r: f64,
    /// Hyperboloid coordinates of the point.
    x: [f64; 3],
    /// Distance to the origin.
    rho: f64,
    /// <grad r, grad rho>.
    cos_angle: f64,
    weight: f64,
}

/// Runs `visit` over all nodes, one accumulator per time node (in parallel),
/// returned in time order.
fn over_nodes<A, I, F>(bump: &TestBump, quad: &BumpQuadrature, init: I, visit: F) -> Vec<A>
where
    A: Send,
    I: Fn() -> A + Sync,
    F: Fn(&mut A, &Node) + Sync,
{
    let (tn, tw) = composite_gauss(
        bump.t_c - bump.t_support,
        bump.t_c + bump.t_support,
        quad.t_panels,
        quad.t_order,
    );
    let (rn, rw) = composite_gauss(0.0, bump.support, quad.r_panels, quad.r_order);
    let (ch, sh) = (bump.rho_c.cosh(), bump.rho_c.sinh());
    let (ct, st) = (bump.theta_c.cos(), bump.theta_c.sin());
    let c = [ch, sh * ct, sh * st];
    let e1 = [sh, ch * ct, ch * st];
    let e2 = [0.0, -st, ct];
    let dpsi = 2.0 * PI / quad.npsi as f64;
    let trig: Vec<(f64, f64)> = (0..quad.npsi).map(|j| (j as f64 * dpsi).sin_cos()).collect();
    tn.par_iter()
        .zip(tw.par_iter())
        .map(|(&t, &wt)| {
            let mut acc = init();
            for (&r, &wr) in rn.iter().zip(&rw) {
                let (cr, sr) = (r.cosh(), r.sinh());
                for &(sp, cp) in &trig {
                    let x = [
                        cr * c[0] + sr * (cp * e1[0] + sp * e2[0]),
                        cr * c[1] + sr * (cp * e1[1] + sp * e2[1]),
                        cr * c[2] + sr * (cp * e1[2] + sp * e2[2]),
                    ];
                    let rho = x[0].max(1.0).acosh();
                    let cos_angle = if rho > 1e-12 {
                        (ch * sr + sh * cr * cp) / rho.sinh()
                    } else {
                        1.0
                    };
                    let node = Node {
                        t,
                        r,
                        x,
                        rho,
                        cos_angle,
                        weight: wt * wr * sr * dpsi,
                    };
                    visit(&mut acc, &node);
                }
            }
            acc
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarlemanRatio {
    /// log ||e^phi h||
    pub log_lhs: f64,
    /// log ||e^phi L h||
    pub log_rhs: f64,
    pub constant: f64,
    /// ||e^phi L h|| / (c ||e^phi h||); +inf for h = 0.
    pub ratio: f64,
    pub pass: bool,
}

/// Both sides of c ||e^phi h|| <= ||e^phi L h|| for a moving-center weight,
/// rejecting specs that violate R > 4 mu eps^{-1/2} c_n.
pub fn carleman_ratio(
    spec: &WeightSpec,
    bump: &TestBump,
    op: CarlemanOperator,
    quad: &BumpQuadrature,
) -> Result<CarlemanRatio> {
    spec.require_hypothesis()?;
    carleman_ratio_unchecked(spec, bump, op, quad)
}

/// As [`carleman_ratio`] without the hypothesis check (used by sweeps).
pub fn carleman_ratio_unchecked(
    spec: &WeightSpec,
    bump: &TestBump,
    op: CarlemanOperator,
    quad: &BumpQuadrature,
) -> Result<CarlemanRatio> {
    spec.validate()?;
    if !matches!(spec.kind, WeightKind::SchrodingerMoving | WeightKind::HeatMoving) {
        return Err(Error::Invalid("carleman_ratio needs a moving-center weight".into()));
    }
    if spec.n != 2 {
        return Err(Error::Invalid("moving-center checks run on H^2".into()));
    }
    bump.validate()?;
    let constant = spec.carleman_constant();
    if bump.amplitude == 0.0 {
        return Ok(CarlemanRatio {
            log_lhs: f64::NEG_INFINITY,
            log_rhs: f64::NEG_INFINITY,
            constant,
            ratio: f64::INFINITY,
            pass: true,
        });
    }
    let parts = over_nodes(
        bump,
        quad,
        || (LogSum::new(), LogSum::new()),
        |acc, nd| {
            let [g, g1, g2] = bump.profile(nd.r);
            let (tau, tau_t) = bump.time_profile(nd.t);
            let lap = if nd.r < 1e-8 { g2 * 2.0 } else { g2 + g1 * coth(nd.r) };
            let lh = match op {
                CarlemanOperator::Schrodinger => g * tau_t - Complex64::i() * lap * tau,
                CarlemanOperator::Heat => g * tau_t - lap * tau,
            };
            let s = spec.r * (nd.t * (1.0 - nd.t));
            let b = nd.x[0] * s.cosh() + nd.x[1] * s.sinh();
            let d = b.max(1.0).acosh();
            let phi = spec.phi_from(nd.rho, d * d, nd.t);
            acc.0.add_weighted(2.0 * phi + (g * tau).norm_sqr().ln(), nd.weight);
            acc.1.add_weighted(2.0 * phi + lh.norm_sqr().ln(), nd.weight);
        },
    );
    let (mut lhs, mut rhs) = (LogSum::new(), LogSum::new());
    for (a, b) in &parts {
        lhs.merge(a);
        rhs.merge(b);
    }
    let log_lhs = 0.5 * lhs.value();
    let log_rhs = 0.5 * rhs.value();
    let ratio = (log_rhs - log_lhs - constant.ln()).exp();
    Ok(CarlemanRatio {
        log_lhs,
        log_rhs,
        constant,
        ratio,
        pass: ratio >= 1.0 - tolerances::CARLEMAN,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QlogRatio {
    pub mu: f64,
    pub q: f64,
    pub mu_threshold: f64,
    /// (mu/R^2) int |grad f|^2 + (mu^3/R^6) int |rho f|^2
    pub lhs: f64,
    /// int |e^phi (d_t - i Delta)(e^-phi f)|^2
    pub rhs: f64,
    pub ratio: f64,
    pub pass: bool,
}

/// The quadratic-log Carleman inequality on H^2 for f = bump. The bump must
/// live outside B_{rho0} and, in time, inside [1/4, 3/4] where the time
/// cutoff is constant, so the mu^Q term drops out of the conjugation.
pub fn carleman_ratio_qlog(spec: &WeightSpec, bump: &TestBump, quad: &BumpQuadrature) -> Result<QlogRatio> {
    if spec.kind != WeightKind::QuadraticLog {
        return Err(Error::Invalid("carleman_ratio_qlog needs a quadratic-log weight".into()));
    }
    if spec.n != 2 {
        return Err(Error::Invalid("the quadratic-log check runs on H^2".into()));
    }
    spec.require_hypothesis()?;
    bump.validate()?;
    if bump.t_c - bump.t_support < 0.25 || bump.t_c + bump.t_support > 0.75 {
        return Err(Error::Support("time support must lie in [1/4, 3/4]".into()));
    }
    if bump.rho_c - bump.support < spec.rho0 {
        return Err(Error::Support(format!(
            "spatial support reaches rho = {} < rho0 = {}",
            bump.rho_c - bump.support,
            spec.rho0
        )));
    }
    let (q, _) = q_exponent(spec.ell, spec.r)?;
    let k = spec.mu / (spec.r * spec.r);
    let parts = over_nodes(
        bump,
        quad,
        || [0.0f64; 3],
        |acc, nd| {
            let [g, g1, g2] = bump.profile(nd.r);
            let (tau, tau_t) = bump.time_profile(nd.t);
            let f = g * tau;
            let lap = if nd.r < 1e-8 { g2 * 2.0 } else { g2 + g1 * coth(nd.r) } * tau;
            let grad_phi_grad_f = g1 * tau * (2.0 * k * nd.rho * nd.cos_angle);
            let grad_phi2 = 4.0 * k * k * nd.rho * nd.rho;
            let lap_phi = k * (2.0 + 2.0 * nd.rho * coth(nd.rho));
            let conj = g * tau_t - Complex64::i() * (lap - grad_phi_grad_f * 2.0 + f * (grad_phi2 - lap_phi));
            acc[0] += nd.weight * (g1 * tau).norm_sqr();
            acc[1] += nd.weight * nd.rho * nd.rho * f.norm_sqr();
            acc[2] += nd.weight * conj.norm_sqr();
        },
    );
    let mut s = [0.0; 3];
    for p in &parts {
        for i in 0..3 {
            s[i] += p[i];
        }
    }
    let lhs = k * s[0] + k * k * k * s[1];
    let rhs = s[2];
    let ratio = if lhs > 0.0 { rhs / lhs } else { f64::INFINITY };
    Ok(QlogRatio {
        mu: spec.mu,
        q,
        mu_threshold: spec.threshold()?,
        lhs,
        rhs,
        ratio,
        pass: ratio >= 1.0 - tolerances::CARLEMAN,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VirialCheck {
    pub time: f64,
    /// Re <(S_t + [S, A]) f, f>
    pub lhs: f64,
    /// Analytic lower bound times ||f||^2.
    pub rhs: f64,
    pub gap: f64,
    pub norm2: f64,
    pub pass: bool,
}

/// Coefficient of ||f||^2 in the commutator lower bound: eps R^2/(8 mu) - mu c_n
/// for the Schrödinger weight, eps R^2/(16 mu) for the heat weight.
pub fn virial_coefficient(spec: &WeightSpec) -> Result<f64> {
    let (mu, eps, r) = (spec.mu, spec.eps, spec.r);
    match spec.kind {
        WeightKind::SchrodingerMoving => Ok(eps * r * r / (8.0 * mu) - mu * frak_c(spec.n)),
        WeightKind::HeatMoving => Ok(eps * r * r / (16.0 * mu)),
        _ => Err(Error::Invalid("virial bound needs a moving-center weight".into())),
    }
}

/// Discrete <(S_t + [S, A]) f, f> on a time slice against the lower bound.
pub fn virial_lower_bound_check(spec: &WeightSpec, f: &[Complex64], grid: &PolarGrid, t: f64) -> Result<VirialCheck> {
    spec.validate()?;
    let op = CarlemanOperator::for_kind(spec.kind)
        .ok_or_else(|| Error::Invalid("virial check needs a moving-center weight".into()))?;
    if grid.is_mode() || grid.n() != 2 {
        return Err(Error::Invalid("virial check needs an angular H^2 grid".into()));
    }
    if f.len() != grid.len() {
        return Err(Error::Invalid(format!("field has {} values, grid has {}", f.len(), grid.len())));
    }
    let peak = f.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let rim = (grid.nr().saturating_sub(5)) * grid.ntheta;
    let edge = f[rim..].iter().map(|v| v.norm()).fold(0.0, f64::max);
    if edge > 1e-12 * peak {
        return Err(Error::Support(format!("field reaches the last 5 rings ({edge:e} vs peak {peak:e})")));
    }
    let norm2 = grid.norm2(f);
    let coef = virial_coefficient(spec)?;
    if peak == 0.0 {
        return Ok(VirialCheck { time: t, lhs: 0.0, rhs: 0.0, gap: 0.0, norm2, pass: true });
    }
    let (a, b) = op.coefficients();
    let pair = assemble_conjugated(grid, spec, a, b, t, 0)?;
    let lhs = pair.commutator_form(f).re;
    let rhs = coef * norm2;
    let gap = lhs - rhs;
    Ok(VirialCheck {
        time: t,
        lhs,
        rhs,
        gap,
        norm2,
        pass: gap >= -tolerances::VIRIAL,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierLattice {
    pub mus: Vec<f64>,
    pub epss: Vec<f64>,
    pub rs: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontierRow {
    pub mu: f64,
    pub eps: f64,
    pub r: f64,
    pub threshold: f64,
    pub hypothesis_ok: bool,
    pub min_ratio: f64,
    /// Index of the bump attaining the minimum.
    pub worst_bump: usize,
    pub pass: bool,
}

/// Minimum Carleman ratio over the corpus on every lattice cell.
pub fn feasibility_frontier(
    kind: WeightKind,
    lattice: &FrontierLattice,
    bumps: &[TestBump],
    quad: &BumpQuadrature,
) -> Result<Vec<FrontierRow>> {
    if bumps.is_empty() {
        return Err(Error::Invalid("empty bump corpus".into()));
    }
    let op = CarlemanOperator::for_kind(kind)
        .ok_or_else(|| Error::Invalid("frontier sweeps need a moving-center weight".into()))?;
    let mut rows = Vec::new();
    for &mu in &lattice.mus {
        for &eps in &lattice.epss {
            for &r in &lattice.rs {
                let spec = WeightSpec {
                    kind,
                    ..WeightSpec::schrodinger(mu, eps, r)
                };
                let mut min_ratio = f64::INFINITY;
                let mut worst = 0;
                for (i, b) in bumps.iter().enumerate() {
                    let v = carleman_ratio_unchecked(&spec, b, op, quad)?.ratio;
                    if v < min_ratio {
                        min_ratio = v;
                        worst = i;
                    }
                }
                rows.push(FrontierRow {
                    mu,
                    eps,
                    r,
                    threshold: spec.threshold()?,
                    hypothesis_ok: spec.hypothesis_ok(),
                    min_ratio,
                    worst_bump: worst,
                    pass: min_ratio >= 1.0 - tolerances::CARLEMAN,
                });
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MysteryMargin {
    pub r: f64,
    pub log_f: f64,
    /// log F(R) - log sqrt 2
    pub margin: f64,
}

/// log F(R) = C0 (log R / l)^3 + log C1 + 2 log log R - 2 log l - 2 log R with
/// C0 = C^{3 log(log R / l) / log R} and log C1 = 2 (log(log R / l) - log R) / log R * log C.
pub fn mystery_inequality_check(ell: u32, r_list: &[f64], c_cal: f64) -> Result<Vec<MysteryMargin>> {
    if ell == 0 {
        return Err(domain("l must be a positive integer"));
    }
    if !(c_cal > 0.0) {
        return Err(domain("C must be positive"));
    }
    let l = ell as f64;
    let lc = c_cal.ln();
    r_list
        .iter()
        .map(|&r| {
            if !(r > 1.0) || !r.is_finite() {
                return Err(domain(format!("R must exceed 1, got {r}")));
            }
            let lr = r.ln();
            let x = (lr / l).ln();
            let c0 = (3.0 * x / lr * lc).exp();
            let log_c1 = 2.0 * (x - lr) / lr * lc;
            let log_f = c0 * (lr / l).powi(3) + log_c1 + 2.0 * lr.ln() - 2.0 * l.ln() - 2.0 * lr;
            Ok(MysteryMargin {
                r,
                log_f,
                margin: log_f - 0.5 * 2f64.ln(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_cutoff_shape() {
        assert_eq!(time_cutoff(0.1).0, 0.0);
        assert_eq!(time_cutoff(0.9).0, 0.0);
        for t in [0.25, 0.4, 0.5, 0.75] {
            assert_eq!(time_cutoff(t), (3.0, 0.0, 0.0));
        }
        let h = 1e-5;
        for t in [0.15, 0.2, 0.8] {
            let (_, d, dd) = time_cutoff(t);
            let fd = (time_cutoff(t + h).0 - time_cutoff(t - h).0) / (2.0 * h);
            let fdd = (time_cutoff(t + h).1 - time_cutoff(t - h).1) / (2.0 * h);
            assert!((d - fd).abs() < 1e-5 * (1.0 + d.abs()), "{d} {fd}");
            assert!((dd - fdd).abs() < 1e-4 * (1.0 + dd.abs()), "{dd} {fdd}");
        }
        assert!(time_cutoff_max_tt().is_finite() && time_cutoff_max_tt() > 0.0);
    }

    #[test]
    fn bump_derivatives() {
        let b = TestBump { tilt: 0.7, ..TestBump::gaussian(1.0, 0.0, 0.5, 0.5, 0.1) };
        let h = 1e-5;
        for r in [0.1, 0.6, 1.2] {
            let [_, g1, g2] = b.profile(r);
            let fd1 = (b.profile(r + h)[0] - b.profile(r - h)[0]) / (2.0 * h);
            let fd2 = (b.profile(r + h)[1] - b.profile(r - h)[1]) / (2.0 * h);
            assert!((g1 - fd1).norm() < 1e-6 && (g2 - fd2).norm() < 1e-5);
        }
        let (_, d) = b.time_profile(0.53);
        let fd = (b.time_profile(0.53 + h).0 - b.time_profile(0.53 - h).0) / (2.0 * h);
        assert!((d - fd).abs() < 1e-4 * d.abs().max(1.0));
        assert_eq!(b.profile(1.5)[0], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn hypothesis_threshold() {
        let th = 4.0 * 8.0 / 3.0;
        assert!(WeightSpec::schrodinger(1.0, 1.0, th + 0.1).hypothesis_ok());
        assert!(!WeightSpec::schrodinger(1.0, 1.0, th).hypothesis_ok());
        assert!(matches!(
            WeightSpec::heat(1.0, 1.0, 5.0).require_hypothesis(),
            Err(Error::Hypothesis(_))
        ));
    }
}
