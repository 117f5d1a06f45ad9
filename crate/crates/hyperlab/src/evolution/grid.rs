use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{sphere_area, RadialGrid};
use crate::numerics::csch2;

/// Radial cells times either one angular mode (`ntheta == 1`, any n) or an
/// equispaced periodic angle (`ntheta > 1`, n = 2 only). Values are stored
/// radius-major: index = i * ntheta + j.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarGrid {
    pub radial: RadialGrid,
    pub ntheta: usize,
}

impl PolarGrid {
    pub fn mode(radial: RadialGrid) -> Self {
        PolarGrid { radial, ntheta: 1 }
    }

    pub fn plane(radial: RadialGrid, ntheta: usize) -> Result<Self> {
        if radial.n() != 2 {
            return Err(Error::Invalid("angular grids are only supported for n = 2".into()));
        }
        if ntheta < 4 {
            return Err(Error::GridTooSmall(format!("ntheta = {ntheta}, need >= 4")));
        }
        Ok(PolarGrid { radial, ntheta })
    }

    pub fn n(&self) -> usize {
        self.radial.n()
    }
    pub fn nr(&self) -> usize {
        self.radial.len()
    }
    pub fn len(&self) -> usize {
        self.radial.len() * self.ntheta
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    pub fn is_mode(&self) -> bool {
        self.ntheta == 1
    }
    pub fn dtheta(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.ntheta as f64
    }
    pub fn theta(&self, j: usize) -> f64 {
        j as f64 * self.dtheta()
    }
    pub fn rho(&self, k: usize) -> f64 {
        self.radial.nodes()[k / self.ntheta]
    }

    /// Volume weights. Mode grids carry the full sphere area so that a radial
    /// state is the function itself (the angular factor has mean square 1).
    pub fn weights(&self) -> Vec<f64> {
        let ang = if self.is_mode() {
            sphere_area(self.n())
        } else {
            self.dtheta()
        };
        let mut w = Vec::with_capacity(self.len());
        for v in self.radial.quad_weights() {
            for _ in 0..self.ntheta {
                w.push(v * ang);
            }
        }
        w
    }

    /// Samples f(rho, theta) at the nodes (theta = 0 on mode grids).
    pub fn sample<F: Fn(f64, f64) -> Complex64>(&self, f: F) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.len());
        for &r in self.radial.nodes() {
            for j in 0..self.ntheta {
                out.push(f(r, self.theta(j)));
            }
        }
        out
    }

    /// Weighted inner product sum w_k u_k conj(v_k).
    pub fn inner(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        let w = self.weights();
        u.iter().zip(v).zip(&w).map(|((a, b), w)| a * b.conj() * w).sum()
    }

    pub fn norm2(&self, u: &[Complex64]) -> f64 {
        let w = self.weights();
        u.iter().zip(&w).map(|(a, w)| a.norm_sqr() * w).sum()
    }
}

/// Five-point operator on a PolarGrid: centre, radial neighbours and (on
/// angular grids) periodic angular neighbours.
#[derive(Debug, Clone, PartialEq)]
pub struct StencilOp {
    pub nr: usize,
    pub ntheta: usize,
    pub center: Vec<Complex64>,
    /// Coefficient of u_{i+1, j}; zero in the last ring.
    pub out: Vec<Complex64>,
    /// Coefficient of u_{i-1, j}; zero in the first ring.
    pub inw: Vec<Complex64>,
    /// Coefficients of u_{i, j+1} and u_{i, j-1}.
    pub next: Vec<Complex64>,
    pub prev: Vec<Complex64>,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

impl StencilOp {
    pub fn zeros(nr: usize, ntheta: usize) -> Self {
        let len = nr * ntheta;
        StencilOp {
            nr,
            ntheta,
            center: vec![ZERO; len],
            out: vec![ZERO; len],
            inw: vec![ZERO; len],
            next: vec![ZERO; len],
            prev: vec![ZERO; len],
        }
    }

    pub fn len(&self) -> usize {
        self.nr * self.ntheta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    fn nbr(&self, k: usize) -> [(usize, Complex64); 4] {
        let (i, j) = (k / self.ntheta, k % self.ntheta);
        let nt = self.ntheta;
        let jn = (j + 1) % nt;
        let jp = (j + nt - 1) % nt;
        [
            (if i + 1 < self.nr { k + nt } else { k }, self.out[k]),
            (if i > 0 { k - nt } else { k }, self.inw[k]),
            (i * nt + jn, self.next[k]),
            (i * nt + jp, self.prev[k]),
        ]
    }

    pub fn apply(&self, u: &[Complex64]) -> Vec<Complex64> {
        (0..self.len())
            .map(|k| {
                let mut s = self.center[k] * u[k];
                for (m, c) in self.nbr(k) {
                    if c != ZERO {
                        s += c * u[m];
                    }
                }
                s
            })
            .collect()
    }

    /// Entry-wise map over (coefficient, row, column).
    pub fn map<F: Fn(Complex64, usize, usize) -> Complex64>(&self, f: F) -> Self {
        let mut o = self.clone();
        for k in 0..self.len() {
            o.center[k] = f(self.center[k], k, k);
            let nb = self.nbr(k);
            o.out[k] = f(nb[0].1, k, nb[0].0);
            o.inw[k] = f(nb[1].1, k, nb[1].0);
            o.next[k] = f(nb[2].1, k, nb[2].0);
            o.prev[k] = f(nb[3].1, k, nb[3].0);
        }
        o
    }

    pub fn add(&self, other: &Self) -> Self {
        let z = |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        StencilOp {
            nr: self.nr,
            ntheta: self.ntheta,
            center: z(&self.center, &other.center),
            out: z(&self.out, &other.out),
            inw: z(&self.inw, &other.inw),
            next: z(&self.next, &other.next),
            prev: z(&self.prev, &other.prev),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|c, _, _| c * s)
    }

    pub fn add_diagonal(&mut self, d: &[Complex64]) {
        for (c, v) in self.center.iter_mut().zip(d) {
            *c += v;
        }
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<Complex64> {
        let n = self.len();
        let mut m = nalgebra::DMatrix::zeros(n, n);
        for k in 0..n {
            m[(k, k)] += self.center[k];
            for (j, c) in self.nbr(k) {
                if c != ZERO {
                    m[(k, j)] += c;
                }
            }
        }
        m
    }
}

/// Laplace-Beltrami operator by finite volumes: zero flux through the
/// origin, u = 0 on the outer edge, and -l(l+n-2) csch^2 rho for mode l
/// (mode grids) or csch^2 rho times the periodic second difference in theta
/// (angular grids). Self-adjoint for the grid weights.
pub fn laplacian_operator(grid: &PolarGrid, ell: usize) -> Result<StencilOp> {
    let nr = grid.nr();
    if nr < 5 {
        return Err(Error::GridTooSmall(format!("{nr} radial cells, need >= 5")));
    }
    let n = grid.n();
    let r = grid.radial.nodes();
    let e = grid.radial.edges();
    let v = grid.radial.quad_weights();
    let nt = grid.ntheta;
    let area = |x: f64| x.sinh().powi(n as i32 - 1);
    let face: Vec<f64> = (0..=nr)
        .map(|f| match f {
            0 => 0.0,
            f if f == nr => area(e[nr]) / (e[nr] - r[nr - 1]),
            f => area(e[f]) / (r[f] - r[f - 1]),
        })
        .collect();
    let mut op = StencilOp::zeros(nr, nt);
    let dth2 = grid.dtheta().powi(2);
    let ang = (ell * (ell + n - 2)) as f64;
    for i in 0..nr {
        let cs = csch2(r[i]);
        for j in 0..nt {
            let k = i * nt + j;
            let mut c = -(face[i] + face[i + 1]) / v[i];
            if i + 1 < nr {
                op.out[k] = Complex64::new(face[i + 1] / v[i], 0.0);
            }
            if i > 0 {
                op.inw[k] = Complex64::new(face[i] / v[i], 0.0);
            }
            if nt > 1 {
                op.next[k] = Complex64::new(cs / dth2, 0.0);
                op.prev[k] = Complex64::new(cs / dth2, 0.0);
                c -= 2.0 * cs / dth2;
            } else {
                c -= ang * cs;
            }
            op.center[k] = Complex64::new(c, 0.0);
        }
    }
    Ok(op)
}

/// Largest relative defect of W-self-adjointness (sign = 1) or
/// W-skew-adjointness (sign = -1): |w_k M_km - sign conj(w_m M_mk)|.
pub fn adjointness_defect(op: &StencilOp, weights: &[f64], sign: f64) -> f64 {
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    let nt = op.ntheta;
    let entry = |k: usize, m: usize| -> Complex64 {
        let (i, j) = (k / nt, k % nt);
        let (im, jm) = (m / nt, m % nt);
        let mut s = ZERO;
        if k == m {
            s += op.center[k];
        }
        if im == i + 1 && jm == j {
            s += op.out[k];
        }
        if i == im + 1 && jm == j {
            s += op.inw[k];
        }
        if nt > 1 && im == i {
            if jm == (j + 1) % nt {
                s += op.next[k];
            }
            if jm == (j + nt - 1) % nt {
                s += op.prev[k];
            }
        }
        s
    };
    for k in 0..op.len() {
        let (i, j) = (k / nt, k % nt);
        let mut cols = vec![k];
        if i + 1 < op.nr {
            cols.push(k + nt);
        }
        if nt > 1 {
            cols.push(i * nt + (j + 1) % nt);
        }
        for m in cols {
            let a = entry(k, m) * weights[k];
            let b = entry(m, k).conj() * weights[m] * sign;
            worst = worst.max((a - b).norm());
            scale = scale.max(a.norm());
        }
    }
    worst / scale.max(1e-300)
}
