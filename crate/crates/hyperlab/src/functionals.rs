//! Weighted norms, log-convexity verdicts, Gaussian decay bounds, the
//! commutator identity and the space-time estimate.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{DiscreteOperatorPair, EvolutionParams, FieldState, PolarGrid, QuadraticWeight, Trajectory};
use crate::geometry::{bilaplacian_rho_squared, frak_c};
use crate::numerics::{composite_gauss, coth, csch2, LogSum};
use crate::tolerances;

/// log sum_k w_k |u_k|^2 e^{2 gamma rho_k^2}; -inf for the zero state.
pub fn weighted_norm(state: &FieldState, grid: &PolarGrid, gamma: f64) -> Result<f64> {
    if state.values.is_empty() {
        return Err(Error::EmptyState);
    }
    if state.values.len() != grid.len() {
        return Err(Error::Invalid("state does not match grid".into()));
    }
    if !(gamma >= 0.0) {
        return Err(Error::Invalid(format!("gamma must be >= 0, got {gamma}")));
    }
    let mut acc = LogSum::new();
    for (k, (u, w)) in state.values.iter().zip(grid.weights()).enumerate() {
        let r = grid.rho(k);
        acc.add_weighted(2.0 * gamma * r * r, w * u.norm_sqr());
    }
    Ok(acc.value())
}

/// log H(t) with H(t) = ||e^{gamma rho^2} u(t)||^2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedNormSeries {
    pub times: Vec<f64>,
    pub log_h: Vec<f64>,
    pub gamma: f64,
}

impl WeightedNormSeries {
    pub fn from_states(states: &[FieldState], grid: &PolarGrid, gamma: f64) -> Result<Self> {
        let mut times = Vec::with_capacity(states.len());
        let mut log_h = Vec::with_capacity(states.len());
        for s in states {
            times.push(s.time);
            log_h.push(weighted_norm(s, grid, gamma)?);
        }
        Ok(WeightedNormSeries { times, log_h, gamma })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityVerdict {
    /// Smallest three-point estimate of (log H)''.
    pub min_second_difference: f64,
    /// max over interior t of log H(t) - (1-s) log H(0) - s log H(1), s the
    /// normalised time.
    pub interpolation_gap: f64,
    /// Smallest N with gap <= N (M0 + M1 + M2 + M1^2 + M2^2).
    pub n_hat: f64,
    pub pass: bool,
}

pub fn convexity_report(series: &WeightedNormSeries, m0: f64, m1: f64, m2: f64) -> Result<ConvexityVerdict> {
    convexity_report_tol(series, m0, m1, m2, tolerances::CONVEXITY)
}

pub fn convexity_report_tol(
    series: &WeightedNormSeries,
    m0: f64,
    m1: f64,
    m2: f64,
    tol: f64,
) -> Result<ConvexityVerdict> {
    let (t, y) = (&series.times, &series.log_h);
    if t.len() < 5 {
        return Err(Error::TooFewSamples { needed: 5, got: t.len() });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Invalid("log H has non-finite entries".into()));
    }
    let mut min_dd = f64::INFINITY;
    for k in 1..t.len() - 1 {
        let (hm, hp) = (t[k] - t[k - 1], t[k + 1] - t[k]);
        let dd = 2.0 * ((y[k + 1] - y[k]) / hp - (y[k] - y[k - 1]) / hm) / (hp + hm);
        min_dd = min_dd.min(dd);
    }
    let (t0, t1) = (t[0], t[t.len() - 1]);
    let (y0, y1) = (y[0], y[y.len() - 1]);
    let gap = (1..t.len() - 1)
        .map(|k| {
            let s = (t[k] - t0) / (t1 - t0);
            y[k] - (1.0 - s) * y0 - s * y1
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let budget = m0 + m1 + m2 + m1 * m1 + m2 * m2;
    let n_hat = if gap <= 0.0 {
        0.0
    } else if budget > 0.0 {
        gap / budget
    } else {
        f64::INFINITY
    };
    Ok(ConvexityVerdict {
        min_second_difference: min_dd,
        interpolation_gap: gap,
        n_hat,
        pass: min_dd >= -tol,
    })
}

/// Decay rate alpha(t) = gamma a / (a + 4 gamma (a^2 + b^2) t).
pub fn alpha(gamma: f64, a: f64, b: f64, t: f64) -> f64 {
    gamma * a / (a + 4.0 * gamma * (a * a + b * b) * t)
}

/// Largest |alpha' + 4 (a + b^2/a) alpha^2| / alpha(0)^2 over the times, with
/// alpha' taken by a complex step (no cancellation, so exact to rounding).
pub fn alpha_ode_residual(gamma: f64, a: f64, b: f64, times: &[f64]) -> f64 {
    const H: f64 = 1e-30;
    times
        .iter()
        .map(|&t| {
            let z = Complex64::new(t, H);
            let da = (gamma * a / (a + 4.0 * gamma * (a * a + b * b) * z)).im / H;
            let al = alpha(gamma, a, b, t);
            (da + 4.0 * (a + b * b / a) * al * al).abs() / (gamma * gamma)
        })
        .fold(0.0, f64::max)
}

fn l2_norm_log(values: &[Complex64], grid: &PolarGrid, gamma: f64) -> f64 {
    let mut acc = LogSum::new();
    for (k, (u, w)) in values.iter().zip(grid.weights()).enumerate() {
        let r = grid.rho(k);
        acc.add_weighted(2.0 * gamma * r * r, w * u.norm_sqr());
    }
    0.5 * acc.value()
}

fn log_add(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        m
    } else {
        m + ((a - m).exp() + (b - m).exp()).ln()
    }
}

/// Margins log RHS - log LHS of the Gaussian decay bound at each recorded state.
pub fn gaussian_decay_check(
    traj: &Trajectory,
    grid: &PolarGrid,
    params: &EvolutionParams,
    gamma: f64,
) -> Result<Vec<f64>> {
    let (a, b) = (params.a, params.b);
    if !(a > 0.0) {
        return Err(Error::Invalid("the Gaussian decay bound needs a > 0".into()));
    }
    let states = &traj.states;
    if states.is_empty() {
        return Err(Error::EmptyState);
    }
    let pot = params
        .potential
        .iter()
        .map(|v| ((a * v.re).max(0.0) - b * v.im).abs())
        .fold(0.0, f64::max);
    let t0 = states[0].time;
    let log_u0 = l2_norm_log(&states[0].values, grid, gamma);
    let forcing_log = |s: &FieldState| -> f64 {
        match &params.forcing {
            None => f64::NEG_INFINITY,
            Some(f) => l2_norm_log(&f(s.time), grid, alpha(gamma, a, b, s.time - t0)),
        }
    };
    let modulus = (a * a + b * b).sqrt();
    let mut margins = Vec::with_capacity(states.len());
    let mut f_int = 0.0;
    let mut prev_f = forcing_log(&states[0]).exp();
    for (k, s) in states.iter().enumerate() {
        let t = s.time - t0;
        if k > 0 {
            let cur = forcing_log(s).exp();
            f_int += 0.5 * (s.time - states[k - 1].time) * (prev_f + cur);
            prev_f = cur;
        }
        let lhs = l2_norm_log(&s.values, grid, alpha(gamma, a, b, t));
        let rhs = pot * t + log_add(log_u0, (modulus * f_int).ln());
        margins.push(if lhs == f64::NEG_INFINITY { f64::INFINITY } else { rhs - lhs });
    }
    Ok(margins)
}

/// Derivative in rho of a mode-grid field: central differences inside,
/// second-order one-sided stencils at both ends.
pub fn radial_derivative(values: &[Complex64], grid: &PolarGrid) -> Result<Vec<Complex64>> {
    if !grid.is_mode() {
        return Err(Error::Invalid("radial derivative needs a mode grid".into()));
    }
    let nr = grid.nr();
    if nr < 3 || values.len() != nr {
        return Err(Error::GridTooSmall(format!("{nr} cells")));
    }
    let h = grid.radial.spacing();
    let f = values;
    let mut d = Vec::with_capacity(nr);
    d.push((-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h));
    for i in 1..nr - 1 {
        d.push((f[i + 1] - f[i - 1]) / (2.0 * h));
    }
    d.push((3.0 * f[nr - 1] - 4.0 * f[nr - 2] + f[nr - 3]) / (2.0 * h));
    Ok(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommutatorCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub norm2: f64,
}

/// Compares <(S_t + [S, A]) f, f> from the assembled matrices with the
/// geometric expression for phi = c(t) rho^2 + beta(t) on a mode grid.
pub fn commutator_check(
    pair: &DiscreteOperatorPair,
    f: &[Complex64],
    weight: &QuadraticWeight,
    grid: &PolarGrid,
    a: f64,
    b: f64,
    ell: usize,
) -> Result<CommutatorCheck> {
    let nr = grid.nr();
    if f.len() != grid.len() || !grid.is_mode() {
        return Err(Error::Invalid("commutator check needs a mode-grid vector".into()));
    }
    let peak = f.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    if nr < 10 || f[nr - 5..].iter().any(|v| v.norm() > 1e-12 * peak.max(1e-300)) {
        return Err(Error::Support("test vector reaches the last 5 cells".into()));
    }
    let lhs = pair.commutator_form(f).re;
    let n = grid.n();
    let t = pair.time;
    let (c, ct, ctt) = (weight.c(t), weight.c_t(t), weight.c_tt());
    let btt = 2.0 * weight.beta[2];
    let ang = (ell * (ell + n - 2)) as f64;
    let df = radial_derivative(f, grid)?;
    let z2 = a * a + b * b;
    let mut rhs = 0.0;
    let w = grid.weights();
    for i in 0..nr {
        let r = grid.rho(i);
        let f2 = f[i].norm_sqr();
        let hess_grad = 8.0 * c * c * c * r * r;
        let hess_f = 2.0 * c * df[i].norm_sqr() + 2.0 * c * r * coth(r) * ang * csch2(r) * f2;
        let bilap = c * bilaplacian_rho_squared(n, r)?;
        let mut v = z2 * (4.0 * hess_grad * f2 - bilap * f2 + 4.0 * hess_f);
        v += 4.0 * b * 2.0 * ct * r * (df[i] * f[i].conj()).im;
        v += 4.0 * a * 4.0 * c * ct * r * r * f2;
        v += (ctt * r * r + btt) * f2;
        rhs += w[i] * v;
    }
    Ok(CommutatorCheck {
        lhs,
        rhs,
        gap: (lhs - rhs).abs() / (1.0 + rhs.abs()),
        norm2: grid.norm2(f),
    })
}

/// Lower bound -(a^2 + b^2) gamma C_n ||f||^2 for phi = gamma rho^2.
pub fn commutator_lower_bound(n: usize, gamma: f64, a: f64, b: f64, norm2: f64) -> f64 {
    -(a * a + b * b) * gamma * frak_c(n) * norm2
}

pub fn m3(m1: f64, a: f64, b: f64, n: usize) -> f64 {
    (m1 * m1 + 1.0 / 6.0 + 2.0 * frak_c(n)) * (a * a + b * b) + 3.0
}

pub fn m4(a: f64, b: f64) -> f64 {
    7.0 / 6.0 * (a * a + b * b)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeCheck {
    pub log_lhs: f64,
    pub log_rhs: f64,
    pub margin: f64,
}

/// Both sides of the t(1-t)-weighted space-time estimate on a mode grid;
/// the trajectory must keep every state on [0, 1].
pub fn space_time_estimate_check(
    traj: &Trajectory,
    grid: &PolarGrid,
    params: &EvolutionParams,
    gamma: f64,
) -> Result<SpaceTimeCheck> {
    let st = &traj.states;
    if st.len() < 3 || st[0].time.abs() > 1e-12 || (st[st.len() - 1].time - 1.0).abs() > 1e-9 {
        return Err(Error::Invalid("space-time estimate needs a trajectory covering [0, 1]".into()));
    }
    let (a, b) = (params.a, params.b);
    let z2 = a * a + b * b;
    let n = grid.n();
    let w = grid.weights();
    let mut lhs = LogSum::new();
    let mut sup_u = f64::NEG_INFINITY;
    let mut sup_f = f64::NEG_INFINITY;
    for (k, s) in st.iter().enumerate() {
        let t = s.time;
        let dt = if k == 0 {
            0.5 * (st[1].time - t)
        } else if k == st.len() - 1 {
            0.5 * (t - st[k - 1].time)
        } else {
            0.5 * (st[k + 1].time - st[k - 1].time)
        };
        let ang = (s.mode_ell * (s.mode_ell + n - 2)) as f64;
        let du = radial_derivative(&s.values, grid)?;
        let tw = t * (1.0 - t) * dt;
        for i in 0..grid.nr() {
            let r = grid.rho(i);
            let u2 = s.values[i].norm_sqr();
            let grad2 = du[i].norm_sqr() + ang * csch2(r) * u2;
            let e = 2.0 * gamma * r * r;
            lhs.add_weighted(e, tw * w[i] * 2.0 * gamma * z2 * grad2);
            lhs.add_weighted(e, tw * w[i] * 16.0 * gamma.powi(3) * z2 * (r * r + r.powi(3) * coth(r)) * u2);
        }
        sup_u = sup_u.max(2.0 * l2_norm_log(&s.values, grid, gamma));
        if let Some(f) = &params.forcing {
            sup_f = sup_f.max(2.0 * l2_norm_log(&f(t), grid, gamma));
        }
    }
    let log_rhs = log_add(m3(params.m1(), a, b, n).ln() + sup_u, m4(a, b).ln() + sup_f);
    let log_lhs = lhs.value();
    let margin = if log_lhs == f64::NEG_INFINITY { f64::INFINITY } else { log_rhs - log_lhs };
    Ok(SpaceTimeCheck { log_lhs, log_rhs, margin })
}

/// log of the transfer kernel 2 e^{2 gamma rho^2 - sigma e^{2 gamma / sigma}}.
fn kernel_log(gamma: f64, rho: f64, sigma: f64) -> f64 {
    2f64.ln() + 2.0 * gamma * rho * rho - sigma * (2.0 * gamma / sigma).exp()
}

/// log int_{gamma0}^inf 2 e^{2 gamma rho^2} e^{-sigma e^{2 gamma/sigma}} d gamma
/// by adaptive quadrature around the saddle gamma* = sigma log rho.
pub fn transfer_kernel_log(rho: f64, sigma: f64, gamma0: f64) -> f64 {
    let star = (sigma * rho.max(1.0).ln()).max(gamma0);
    let peak = kernel_log(star, rho, sigma);
    let width = (sigma / (2.0 * rho * rho)).sqrt().max(1e-6);
    let hi = star + 40.0 * width + sigma;
    let panels = (((hi - gamma0) / width).ceil() as usize).clamp(4, 100_000);
    let (x, w) = composite_gauss(gamma0, hi, panels, 10);
    let v: f64 = x.iter().zip(&w).map(|(g, w)| w * (kernel_log(*g, rho, sigma) - peak).exp()).sum();
    peak + v.ln()
}

/// Largest log(kernel) - 2 sigma rho^2 log rho over the radii: the kernel is
/// dominated by the squared-norm weight e^{2 sigma rho^2 log rho}.
pub fn transfer_kernel_bound(sigma: f64, gamma0: f64, rhos: &[f64]) -> f64 {
    rhos.iter()
        .map(|&r| transfer_kernel_log(r, sigma, gamma0) - 2.0 * sigma * r * r * r.ln())
        .fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferredSeries {
    pub times: Vec<f64>,
    pub log_t: Vec<f64>,
    pub sigma: f64,
    pub coverage_ok: bool,
    pub verdict: ConvexityVerdict,
}

/// Integrates a family of log H_gamma series against the transfer kernel in
/// gamma (trapezoid in log space).
pub fn log_weight_transfer(family: &[WeightedNormSeries], sigma: f64) -> Result<TransferredSeries> {
    if family.len() < 3 {
        return Err(Error::TooFewSamples { needed: 3, got: family.len() });
    }
    let times = family[0].times.clone();
    if family.iter().any(|s| s.times.len() != times.len()) {
        return Err(Error::Invalid("series in the family have different lengths".into()));
    }
    let gammas: Vec<f64> = family.iter().map(|s| s.gamma).collect();
    if gammas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Invalid("gamma grid must be increasing".into()));
    }
    let mut log_t = Vec::with_capacity(times.len());
    let mut coverage_ok = true;
    for k in 0..times.len() {
        let mut acc = LogSum::new();
        let terms: Vec<f64> = family
            .iter()
            .map(|s| 2f64.ln() + s.log_h[k] - sigma * (2.0 * s.gamma / sigma).exp())
            .collect();
        for j in 0..terms.len() {
            let lo = if j > 0 { gammas[j] - gammas[j - 1] } else { 0.0 };
            let hi = if j + 1 < terms.len() { gammas[j + 1] - gammas[j] } else { 0.0 };
            acc.add_weighted(terms[j], 0.5 * (lo + hi));
        }
        let total = acc.value();
        let last = terms.len() - 1;
        let edge = terms[last] + (0.5 * (gammas[last] - gammas[last - 1])).ln();
        if edge - total > tolerances::TRANSFER_COVERAGE.ln() {
            coverage_ok = false;
        }
        log_t.push(total);
    }
    if !coverage_ok {
        log::warn!("gamma grid stops before the transfer kernel has decayed");
    }
    let series = WeightedNormSeries {
        times: times.clone(),
        log_h: log_t.clone(),
        gamma: f64::NAN,
    };
    let verdict = convexity_report(&series, 0.0, 0.0, 0.0)?;
    Ok(TransferredSeries {
        times,
        log_t,
        sigma,
        coverage_ok,
        verdict,
    })
}
