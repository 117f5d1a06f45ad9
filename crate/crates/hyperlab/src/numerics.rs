//! Small numerical kernels: quadrature rules, log-space sums, finite
//! differences, least squares slopes and a complex tridiagonal solver.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite Gauss-Legendre rule on [a, b] with `panels` equal panels.
pub fn composite_gauss(a: f64, b: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut x = Vec::with_capacity(panels * order);
    let mut w = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for (xi, wi) in gx.iter().zip(&gw) {
            x.push(lo + 0.5 * h * (xi + 1.0));
            w.push(0.5 * h * wi);
        }
    }
    (x, w)
}

/// log(sum(exp(v))) without overflow. Returns -inf for empty or all -inf input.
pub fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    if m == f64::INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Streaming log-sum-exp accumulator.
#[derive(Debug, Clone, Copy)]
pub struct LogSum {
    max: f64,
    scaled: f64,
}

impl Default for LogSum {
    fn default() -> Self {
        LogSum {
            max: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }
}

impl LogSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, log_term: f64) {
        if log_term == f64::NEG_INFINITY {
            return;
        }
        if log_term <= self.max {
            self.scaled += (log_term - self.max).exp();
        } else {
            self.scaled = self.scaled * (self.max - log_term).exp() + 1.0;
            self.max = log_term;
        }
    }

    /// Adds w * exp(log_term) for w >= 0.
    pub fn add_weighted(&mut self, log_term: f64, w: f64) {
        if w > 0.0 {
            self.add(log_term + w.ln());
        }
    }

    pub fn merge(&mut self, other: &LogSum) {
        if other.max == f64::NEG_INFINITY {
            return;
        }
        self.add(other.value());
    }

    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.ln()
        }
    }
}

/// arccosh(1 + z) for z >= 0, accurate for small z.
pub fn acosh1p(z: f64) -> f64 {
    (z + (z * (z + 2.0)).sqrt()).ln_1p()
}

/// coth(x), switching to the Laurent series near 0.
pub fn coth(x: f64) -> f64 {
    if x.abs() < crate::tolerances::SMALL_RHO_SERIES {
        let x2 = x * x;
        1.0 / x + x / 3.0 - x * x2 / 45.0
    } else {
        1.0 / x.tanh()
    }
}

/// csch(x)^2, switching to the Laurent series near 0.
pub fn csch2(x: f64) -> f64 {
    if x.abs() < crate::tolerances::SMALL_RHO_SERIES {
        let x2 = x * x;
        1.0 / x2 - 1.0 / 3.0 + x2 / 15.0
    } else {
        let s = x.sinh();
        1.0 / (s * s)
    }
}

/// x / sinh(x), finite at 0.
pub fn x_over_sinh(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x / x.sinh()
    }
}

/// Five-point first derivative.
pub fn d1<F: FnMut(f64) -> f64>(mut f: F, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// Five-point second derivative.
pub fn d2<F: FnMut(f64) -> f64>(mut f: F, x: f64, h: f64) -> f64 {
    (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2.0 * h))
        / (12.0 * h * h)
}

/// Central difference with one Richardson step (error O(h^4)).
pub fn richardson_d1<F: FnMut(f64) -> f64>(mut f: F, x: f64, h: f64) -> f64 {
    let mut c = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * c(h / 2.0) - c(h)) / 3.0
}

/// Least squares slope and intercept of y against x.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Slope of log(y) against log(x).
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly).0
}

/// Solves a tridiagonal system with sub-diagonal `lower` (lower[0] unused),
/// diagonal `diag` and super-diagonal `upper` (upper[n-1] unused).
pub fn solve_tridiagonal(
    lower: &[Complex64],
    diag: &[Complex64],
    upper: &[Complex64],
    rhs: &[Complex64],
) -> Result<Vec<Complex64>> {
    let n = diag.len();
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    let mut piv = diag[0];
    if piv.norm() < 1e-300 {
        return Err(Error::Solver("zero pivot in row 0".into()));
    }
    c[0] = upper[0] / piv;
    d[0] = rhs[0] / piv;
    for i in 1..n {
        piv = diag[i] - lower[i] * c[i - 1];
        if piv.norm() < 1e-300 || !piv.is_finite() {
            return Err(Error::Solver(format!("zero pivot in row {i}")));
        }
        if i + 1 < n {
            c[i] = upper[i] / piv;
        }
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / piv;
    }
    for i in (0..n - 1).rev() {
        let next = d[i + 1];
        d[i] -= c[i] * next;
    }
    Ok(d)
}

/// Adaptive Gauss-Kronrod (7-15) integration of f on [a, b].
/// Returns (value, error estimate).
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
        const XK: [f64; 8] = [
            0.991455371120812639206854697526329,
            0.949107912342758524526189684047851,
            0.864864423359769072789712788640926,
            0.741531185599394439863864773280788,
            0.586087235467691130294144845693013,
            0.405845151377397166906606412076961,
            0.207784955007898467600689403773245,
            0.000000000000000000000000000000000,
        ];
        const WK: [f64; 8] = [
            0.022935322010529224963732008058970,
            0.063092092629978553290700663189204,
            0.104790010322250183839876322541518,
            0.140653259715525918745189590510238,
            0.169004726639267902826583426598550,
            0.190350578064785409913256402421014,
            0.204432940075298892414161999234649,
            0.209482141084727828012999174891714,
        ];
        const WG: [f64; 4] = [
            0.129484966168869693270611432679082,
            0.279705391489276667901467771423780,
            0.381830050505118944950369775488975,
            0.417959183673469387755102040816327,
        ];
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let fc = f(c);
        let mut k = WK[7] * fc;
        let mut g = WG[3] * fc;
        for j in 0..7 {
            let dx = h * XK[j];
            let s = f(c - dx) + f(c + dx);
            k += WK[j] * s;
            if j % 2 == 1 {
                g += WG[j / 2] * s;
            }
        }
        (k * h, ((k - g) * h).abs())
    }
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> (f64, f64) {
        let (v, e) = gk15(f, a, b);
        // Roundoff floor: below it subdivision cannot make progress.
        if e <= tol || e <= 50.0 * f64::EPSILON * v.abs() || depth >= 40 {
            return (v, e);
        }
        let m = 0.5 * (a + b);
        let (v1, e1) = rec(f, a, m, 0.5 * tol, depth + 1);
        let (v2, e2) = rec(f, m, b, 0.5 * tol, depth + 1);
        (v1 + v2, e1 + e2)
    }
    rec(f, a, b, tol, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(6);
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(10)).sum();
        assert!((v - 2.0 / 11.0).abs() < 1e-14);
        let (x, w) = composite_gauss(0.0, 2.0, 3, 5);
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.exp()).sum();
        assert!((v - (2f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn log_sum_matches_direct() {
        let v = [0.1, -3.0, 2.5, 1.0];
        let direct = v.iter().map(|x: &f64| x.exp()).sum::<f64>().ln();
        assert!((log_sum_exp(&v) - direct).abs() < 1e-14);
        let mut acc = LogSum::new();
        for x in v {
            acc.add(x);
        }
        assert!((acc.value() - direct).abs() < 1e-14);
        assert_eq!(LogSum::new().value(), f64::NEG_INFINITY);
        assert!((log_sum_exp(&[1000.0, 1000.0]) - (1000.0 + 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn tridiagonal_solves_poisson() {
        let n = 7;
        let one = Complex64::new(1.0, 0.0);
        let lower = vec![-one; n];
        let upper = vec![-one; n];
        let diag = vec![one * 2.0; n];
        let x: Vec<Complex64> = (0..n).map(|i| Complex64::new(i as f64, 1.0 - i as f64)).collect();
        let mut b = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            b[i] = diag[i] * x[i];
            if i > 0 {
                b[i] += lower[i] * x[i - 1];
            }
            if i + 1 < n {
                b[i] += upper[i] * x[i + 1];
            }
        }
        let y = solve_tridiagonal(&lower, &diag, &upper, &b).unwrap();
        for i in 0..n {
            assert!((y[i] - x[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn adaptive_quadrature() {
        let (v, _) = integrate_adaptive(&|x: f64| (-x * x).exp(), -10.0, 10.0, 1e-13);
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn series_branches_are_continuous() {
        let x = crate::tolerances::SMALL_RHO_SERIES;
        assert!((coth(x * 0.999_999) - 1.0 / (x * 1.000_001).tanh()).abs() / coth(x) < 1e-5);
        assert!((csch2(x * 0.999_999) - csch2(x * 1.000_001)).abs() / csch2(x) < 1e-5);
        assert!((acosh1p(1e-6) - (1.0f64 + 1e-6).acosh()).abs() < 1e-9);
    }

    #[test]
    fn fit_recovers_slope() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-2.0)).collect();
        assert!((loglog_slope(&x, &y) + 2.0).abs() < 1e-12);
    }
}
