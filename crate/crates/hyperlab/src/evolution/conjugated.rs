use num_complex::Complex64;

use super::grid::{adjointness_defect, laplacian_operator, PolarGrid, StencilOp};
use crate::error::Result;

/// A real weight phi(rho, theta, t) with its first two time derivatives.
pub trait WeightField: Sync {
    fn phi(&self, rho: f64, theta: f64, t: f64) -> f64;
    fn phi_t(&self, rho: f64, theta: f64, t: f64) -> f64;
    fn phi_tt(&self, rho: f64, theta: f64, t: f64) -> f64;
    fn label(&self) -> String {
        "weight".into()
    }
}

/// phi = c(t) rho^2 + beta(t) with c and beta quadratic polynomials in t
/// (coefficients in increasing degree).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticWeight {
    pub c: [f64; 3],
    pub beta: [f64; 3],
}

impl QuadraticWeight {
    pub fn stationary(gamma: f64) -> Self {
        QuadraticWeight {
            c: [gamma, 0.0, 0.0],
            beta: [0.0; 3],
        }
    }

    pub fn c(&self, t: f64) -> f64 {
        self.c[0] + t * (self.c[1] + t * self.c[2])
    }
    pub fn c_t(&self, t: f64) -> f64 {
        self.c[1] + 2.0 * t * self.c[2]
    }
    pub fn c_tt(&self) -> f64 {
        2.0 * self.c[2]
    }
    fn beta_t(&self, t: f64) -> f64 {
        self.beta[1] + 2.0 * t * self.beta[2]
    }
}

impl WeightField for QuadraticWeight {
    fn phi(&self, rho: f64, _: f64, t: f64) -> f64 {
        self.c(t) * rho * rho + self.beta[0] + t * (self.beta[1] + t * self.beta[2])
    }
    fn phi_t(&self, rho: f64, _: f64, t: f64) -> f64 {
        self.c_t(t) * rho * rho + self.beta_t(t)
    }
    fn phi_tt(&self, rho: f64, _: f64, _: f64) -> f64 {
        self.c_tt() * rho * rho + 2.0 * self.beta[2]
    }
    fn label(&self) -> String {
        format!("quadratic(c={:?}, beta={:?})", self.c, self.beta)
    }
}

/// Symmetric and antisymmetric parts of the conjugated generator
/// e^phi (a + ib) Delta e^-phi + phi_t, together with d/dt of the symmetric part.
#[derive(Debug, Clone)]
pub struct DiscreteOperatorPair {
    pub s: StencilOp,
    pub a: StencilOp,
    pub s_t: StencilOp,
    pub weights: Vec<f64>,
    pub phi: Vec<f64>,
    pub time: f64,
    pub label: String,
}

impl DiscreteOperatorPair {
    pub fn symmetry_defect(&self) -> f64 {
        adjointness_defect(&self.s, &self.weights, 1.0)
    }

    pub fn antisymmetry_defect(&self) -> f64 {
        adjointness_defect(&self.a, &self.weights, -1.0)
    }

    pub fn form(&self, op: &StencilOp, f: &[Complex64]) -> Complex64 {
        let g = op.apply(f);
        g.iter().zip(f).zip(&self.weights).map(|((x, y), w)| x * y.conj() * w).sum()
    }

    /// <(S_t + S A - A S) f, f> in the grid inner product.
    pub fn commutator_form(&self, f: &[Complex64]) -> Complex64 {
        let sa = self.s.apply(&self.a.apply(f));
        let as_ = self.a.apply(&self.s.apply(f));
        let st = self.s_t.apply(f);
        st.iter()
            .zip(&sa)
            .zip(&as_)
            .zip(f)
            .zip(&self.weights)
            .map(|((((x, y), z), u), w)| (x + y - z) * u.conj() * w)
            .sum()
    }

    /// (S + A) f, the full conjugated generator.
    pub fn apply_generator(&self, f: &[Complex64]) -> Vec<Complex64> {
        let s = self.s.apply(f);
        let a = self.a.apply(f);
        s.iter().zip(&a).map(|(x, y)| x + y).collect()
    }
}

/// Conjugates the grid Laplacian exactly: with delta_km = phi_k - phi_m the
/// entries of e^phi L e^-phi are L_km (cosh delta_km + sinh delta_km). The
/// cosh part is W-symmetric and the sinh part W-antisymmetric, so
/// S = a C + ib Sh + phi_t and A = ib C + a Sh.
pub fn assemble_conjugated(
    grid: &PolarGrid,
    weight: &dyn WeightField,
    a: f64,
    b: f64,
    t: f64,
    ell: usize,
) -> Result<DiscreteOperatorPair> {
    let lap = laplacian_operator(grid, ell)?;
    let mut phi = Vec::with_capacity(grid.len());
    let mut phi_t = Vec::with_capacity(grid.len());
    let mut phi_tt = Vec::with_capacity(grid.len());
    for k in 0..grid.len() {
        let (r, th) = (grid.rho(k), grid.theta(k % grid.ntheta));
        phi.push(weight.phi(r, th, t));
        phi_t.push(weight.phi_t(r, th, t));
        phi_tt.push(weight.phi_tt(r, th, t));
    }
    let ib = Complex64::new(0.0, b);
    let ar = Complex64::new(a, 0.0);
    let s = lap.map(|c, k, m| {
        let d = phi[k] - phi[m];
        c * (ar * d.cosh() + ib * d.sinh())
    });
    let anti = lap.map(|c, k, m| {
        let d = phi[k] - phi[m];
        c * (ib * d.cosh() + ar * d.sinh())
    });
    let s_t = lap.map(|c, k, m| {
        let d = phi[k] - phi[m];
        let dt = phi_t[k] - phi_t[m];
        c * dt * (ar * d.sinh() + ib * d.cosh())
    });
    let mut s = s;
    s.add_diagonal(&phi_t.iter().map(|v| Complex64::new(*v, 0.0)).collect::<Vec<_>>());
    let mut s_t = s_t;
    s_t.add_diagonal(&phi_tt.iter().map(|v| Complex64::new(*v, 0.0)).collect::<Vec<_>>());
    Ok(DiscreteOperatorPair {
        s,
        a: anti,
        s_t,
        weights: grid.weights(),
        phi,
        time: t,
        label: weight.label(),
    })
}
