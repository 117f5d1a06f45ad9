use hyperlab::curvature::*;
use hyperlab::geometry::bilaplacian_rho_squared;
use proptest::prelude::*;

fn point(n: usize, rho: f64, seed: f64) -> Vec<f64> {
    let mut x = vec![rho];
    for k in 0..n - 1 {
        x.push(0.4 + ((seed * (k as f64 + 1.3)).sin().abs()) * 2.2);
    }
    x
}

#[test]
fn closed_forms_match_difference_oracle() {
    for n in 2..=4 {
        for spec in [WarpedMetricSpec::conformal_cos(n, 0.1, 2.0), WarpedMetricSpec::mixed(n, 0.1, 2.0)] {
            for (i, rho) in [0.6, 2.2, 4.5].into_iter().enumerate() {
                let x = point(n, rho, i as f64 + 0.5);
                let o = curvature_fd(&|y: &[f64]| full_metric(&spec, y), &x, OracleSteps::default()).unwrap();
                let r = riemann_closed(&spec, x[0], &x[1..]).unwrap();
                let c = christoffel_closed(&spec, x[0], &x[1..]).unwrap();
                let rs = ricci_scalar_closed(&spec, x[0], &x[1..]).unwrap();
                for (a, b) in r.entries().iter().zip(o.riemann.entries()) {
                    assert!(rel_err(*a, *b) < 1e-4, "riemann n={n} x={x:?}");
                }
                for a in 0..n {
                    for b in 0..n {
                        for d in 0..n {
                            assert!(rel_err(c.get(a, b, d), o.christoffel.get(a, b, d)) < 1e-5);
                        }
                        assert!(rel_err(rs.ricci[(a, b)], o.ricci[(a, b)]) < 1e-4);
                    }
                }
                assert!(rel_err(rs.scalar, o.scalar) < 1e-4);
            }
        }
    }
}

#[test]
fn riccati_bochner_and_mean_curvature() {
    for n in 2..=4 {
        let spec = WarpedMetricSpec::mixed(n, 0.1, 2.0);
        for rho in [0.8, 3.0, 7.0] {
            let x = point(n, rho, rho);
            assert!(riccati_residual(&spec, rho, &x[1..]).unwrap() < 1e-4);
            assert!(riccati_trace_residual(&spec, rho, &x[1..]).unwrap() < 1e-6);
            assert!(bochner_residual(&spec, rho, &x[1..]).unwrap() < 1e-5);
            assert!(mean_curvature_gap(&spec, rho, &x[1..]).unwrap() < 1e-4);
        }
    }
}

#[test]
fn assembled_bilaplacian_matches_coordinate_laplacian() {
    for n in 2..=4 {
        let spec = WarpedMetricSpec::mixed(n, 0.1, 2.0);
        for rho in [0.7, 2.0, 6.0] {
            let x = point(n, rho, 2.0 * rho);
            let a = bilaplacian_perturbed(&spec, rho, &x[1..], 0.5).unwrap();
            let d = bilaplacian_direct(&spec, rho, &x[1..]).unwrap();
            assert!(rel_err(a, d) < 1e-6, "n={n} rho={rho}: {a} vs {d}");
        }
    }
}

#[test]
fn perturbed_bilaplacian_approaches_hyperbolic_value() {
    let spec = WarpedMetricSpec::conformal_cos(3, 0.1, 2.0);
    let th = [0.8, 1.1];
    let mut prev = f64::INFINITY;
    for rho in [5.0, 10.0, 20.0, 40.0] {
        let gap = (bilaplacian_perturbed(&spec, rho, &th, 1.0).unwrap() - bilaplacian_rho_squared(3, rho).unwrap()).abs();
        assert!(gap < prev && gap * rho * rho < 0.1);
        prev = gap;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn riemann_is_antisymmetric(n in 2usize..=4, rho in 0.2f64..8.0, seed in 0.0f64..10.0, eps in -0.3f64..0.3) {
        let spec = WarpedMetricSpec::mixed(n, eps, 2.0);
        let x = point(n, rho, seed);
        let rep = curvature_report(&spec, rho, &x[1..]).unwrap();
        prop_assert!(rep.riemann.antisymmetry_defect() < 1e-9 * rep.riemann.entries().iter().fold(1.0f64, |m, v| m.max(v.abs())));
        let tr = scalar_from_ricci(&rep.metric, &rep.ricci).unwrap();
        prop_assert!((tr - rep.scalar).abs() < 1e-9 * rep.scalar.abs().max(1.0));
    }

    #[test]
    fn trace_decomposition_is_an_identity(n in 2usize..=4, rho in 0.3f64..10.0, seed in 0.0f64..10.0, eps in -0.3f64..0.3) {
        let spec = WarpedMetricSpec::conformal_cos(n, eps, 2.0);
        let x = point(n, rho, seed);
        let t = trace_decomposition_check(&spec, rho, &x[1..]).unwrap();
        prop_assert!(t.residual <= 1e-8 * t.direct.abs().max(1.0));
    }
}
