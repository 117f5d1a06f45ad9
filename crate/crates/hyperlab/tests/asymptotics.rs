use hyperlab::asymptotics::*;
use hyperlab::numerics::composite_gauss;
use proptest::prelude::*;

/// log I by brute force in the saddle variable u: Gauss panels of width well
/// under the saddle scale, doubled until two passes agree.
fn oracle_log_i(sigma: f64, rho: f64, gamma0: f64) -> f64 {
    let lambda = sigma * rho;
    let scale = 1.0 / lambda.sqrt();
    let u0 = gamma0 / sigma - rho.ln();
    let hi = 40.0 * scale;
    let eval = |panels: usize| {
        let (x, w) = composite_gauss(u0, hi, panels, 20);
        let s: f64 = x
            .iter()
            .zip(&w)
            .map(|(&u, &w)| w * (-lambda * (u.exp() - 1.0 - u)).exp())
            .sum();
        sigma * rho * rho * rho.ln() - sigma * rho + (sigma * s).ln()
    };
    let mut panels = 64;
    let mut prev = eval(panels);
    loop {
        panels *= 2;
        let next = eval(panels);
        if (next - prev).abs() <= 1e-13 * next.abs() || panels > 1 << 16 {
            return next;
        }
        prev = next;
    }
}

#[test]
fn ratio_close_to_one_at_rho_fifty() {
    let r = asymptotic_ratio(1.0, 50.0, default_gamma0(1.0)).unwrap();
    assert!((r - 1.0).abs() <= 0.05, "{r}");
}

#[test]
fn ratio_approaches_one() {
    let d: Vec<f64> = [25.0, 50.0, 100.0]
        .iter()
        .map(|&rho| (asymptotic_ratio(1.0, rho, 0.5).unwrap() - 1.0).abs())
        .collect();
    assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
}

#[test]
fn lower_limit_is_irrelevant() {
    let a = laplace_integral_log(1.0, 50.0, 0.5).unwrap();
    let b = laplace_integral_log(1.0, 50.0, 0.25).unwrap();
    assert!((a - b).abs() < 1e-8);
}

#[test]
fn matches_direct_quadrature() {
    let got = laplace_integral_log(2.0, 30.0, 1.0).unwrap();
    let want = oracle_log_i(2.0, 30.0, 1.0);
    assert!(((got - want) / want).abs() < 1e-6, "{got} {want}");
}

#[test]
fn large_exponents_stay_finite() {
    let v = laplace_integral_log(3.0, 80.0, 1.5).unwrap();
    assert!(v.is_finite() && v > 1e4);
}

#[test]
fn q_tends_to_zero() {
    let (q, _) = q_exponent(2, 50f64.exp()).unwrap();
    assert!(q.abs() <= 0.1);
    let (q1, _) = q_exponent(1, 50f64.exp()).unwrap();
    let (q3, _) = q_exponent(1, 200f64.exp()).unwrap();
    assert!(q3 < q1);
}

proptest! {
    #[test]
    fn log_i_increases_with_rho(sigma in 0.5f64..3.0, rho in 10.0f64..60.0) {
        let g = 0.5 * sigma;
        let a = laplace_integral_log(sigma, rho, g).unwrap();
        let b = laplace_integral_log(sigma, rho + 1.0, g).unwrap();
        prop_assert!(b > a);
    }

    #[test]
    fn q_identity_holds(ell in 1u32..6, k in 2.0f64..10.0) {
        let r = k.exp();
        prop_assume!(r.ln() > ell as f64 * 0.5);
        let (_, res) = q_exponent(ell, r).unwrap();
        prop_assert!(res <= 1e-12);
    }
}
