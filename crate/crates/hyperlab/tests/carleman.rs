use hyperlab::carleman::*;
use hyperlab::evolution::{PolarGrid, WeightField};
use hyperlab::geometry::{hyperbolic_distance, HyperboloidPoint, MovingCenter, RadialGrid};
use hyperlab::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn reference_bump() -> TestBump {
    TestBump::gaussian(2.0, 0.0, 0.5, 0.5, 0.1)
}

fn plane(rho_max: f64, cells: usize) -> PolarGrid {
    PolarGrid::plane(RadialGrid::uniform(2, rho_max, cells).unwrap(), 64).unwrap()
}

#[test]
fn moving_weight_at_time_zero_is_quadratic_distance() {
    let spec = WeightSpec::schrodinger(1.3, 0.7, 12.0);
    let x = HyperboloidPoint::polar2(1.7, 0.4);
    let v = weight_eval(&spec, &x, 0.0).unwrap();
    assert!((v - 1.3 * 1.7 * 1.7).abs() < 1e-12);
}

#[test]
fn heat_weight_offset_at_quarter() {
    let r = 12.0;
    let x = HyperboloidPoint::polar2(0.9, 2.0);
    let s = weight_eval(&WeightSpec::schrodinger(1.0, 1.0, r), &x, 0.25).unwrap();
    let h = weight_eval(&WeightSpec::heat(1.0, 1.0, r), &x, 0.25).unwrap();
    assert!((h - s - r * r / 64.0).abs() < 1e-12);
}

#[test]
fn grid_weight_matches_point_weight() {
    for spec in [
        WeightSpec::schrodinger(1.0, 1.0, 12.0),
        WeightSpec::heat(0.5, 2.0, 9.0),
        WeightSpec::static_quadratic(0.3),
    ] {
        for (rho, th, t) in [(0.5, 0.1, 0.2), (2.0, 3.0, 0.5), (4.0, 5.0, 0.9)] {
            let a = spec.phi(rho, th, t);
            let b = weight_eval(&spec, &HyperboloidPoint::polar2(rho, th), t).unwrap();
            assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0), "{a} {b}");
        }
    }
}

#[test]
fn weight_time_derivatives_match_differences() {
    let h = 1e-4;
    for spec in [WeightSpec::schrodinger(1.0, 1.0, 12.0), WeightSpec::heat(0.8, 0.5, 10.0)] {
        for (rho, th, t) in [(0.7, 0.3, 0.2), (2.5, 2.8, 0.55), (1.2, 4.0, 0.85)] {
            let f = |t: f64| spec.phi(rho, th, t);
            let d1 = (f(t + h) - f(t - h)) / (2.0 * h);
            let d2 = (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
            let (a1, a2) = (spec.phi_t(rho, th, t), spec.phi_tt(rho, th, t));
            assert!((a1 - d1).abs() < 1e-5 * a1.abs().max(1.0), "{a1} {d1}");
            assert!((a2 - d2).abs() < 1e-3 * a2.abs().max(1.0), "{a2} {d2}");
        }
    }
}

proptest! {
    #[test]
    fn moving_center_returns_symmetrically(k in 0u32..=1024, rho in 0.0f64..6.0, th in 0.0f64..6.28, r in 1.0f64..40.0) {
        let t = k as f64 / 1024.0;
        let mc = MovingCenter::new(2, r);
        let x = HyperboloidPoint::polar2(rho, th);
        let a = hyperbolic_distance(&x, &mc.point(t)).unwrap();
        let b = hyperbolic_distance(&x, &mc.point(1.0 - t)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn hypothesis_is_the_stated_threshold(mu in 0.1f64..3.0, eps in 0.05f64..2.0, r in 0.5f64..60.0) {
        let spec = WeightSpec::schrodinger(mu, eps, r);
        let th = 4.0 * mu / eps.sqrt() * 8.0 / 3.0;
        prop_assert_eq!(spec.hypothesis_ok(), r > th);
    }
}

#[test]
fn zero_bump_is_vacuous() {
    let b = TestBump { amplitude: 0.0, ..reference_bump() };
    let v = carleman_ratio(
        &WeightSpec::schrodinger(1.0, 1.0, 12.0),
        &b,
        CarlemanOperator::Schrodinger,
        &BumpQuadrature::default(),
    )
    .unwrap();
    assert!(v.pass && v.ratio.is_infinite());
}

#[test]
fn reference_bump_satisfies_both_estimates() {
    let quad = BumpQuadrature::default();
    let b = reference_bump();
    let s = carleman_ratio(&WeightSpec::schrodinger(1.0, 1.0, 12.0), &b, CarlemanOperator::Schrodinger, &quad).unwrap();
    assert!(s.pass && s.ratio >= 1.0, "{s:?}");
    assert!((s.constant - 3.0).abs() < 1e-15);
    let h = carleman_ratio(&WeightSpec::heat(1.0, 1.0, 12.0), &b, CarlemanOperator::Heat, &quad).unwrap();
    assert!(h.pass && h.ratio >= 1.0, "{h:?}");

    let fine = carleman_ratio(
        &WeightSpec::schrodinger(1.0, 1.0, 12.0),
        &b,
        CarlemanOperator::Schrodinger,
        &quad.refined(),
    )
    .unwrap();
    assert!((fine.ratio / s.ratio - 1.0).abs() < 1e-6);

    let doubled = carleman_ratio(&WeightSpec::schrodinger(1.0, 1.0, 24.0), &b, CarlemanOperator::Schrodinger, &quad).unwrap();
    assert!((doubled.constant / s.constant - 2.0).abs() < 1e-15);
    assert!(doubled.ratio >= 1.0);
}

#[test]
fn hypothesis_violation_is_rejected() {
    let err = carleman_ratio(
        &WeightSpec::schrodinger(1.0, 1.0, 10.0),
        &reference_bump(),
        CarlemanOperator::Schrodinger,
        &BumpQuadrature::default(),
    );
    assert!(matches!(err, Err(Error::Hypothesis(_))));
    let err = carleman_ratio(
        &WeightSpec::static_quadratic(0.1),
        &reference_bump(),
        CarlemanOperator::Schrodinger,
        &BumpQuadrature::default(),
    );
    assert!(err.is_err());
}

#[test]
fn bump_time_support_must_fit() {
    let b = TestBump { t_c: 0.1, ..reference_bump() };
    assert!(matches!(b.validate(), Err(Error::Support(_))));
}

#[test]
fn quadratic_log_instance_at_threshold() {
    let spec = WeightSpec::quadratic_log_at_threshold(2, 20.0, 1.0).unwrap();
    assert!(spec.hypothesis_ok());
    let b = TestBump::gaussian(3.0, 0.0, 0.5, 0.5, 0.05);
    let v = carleman_ratio_qlog(&spec, &b, &BumpQuadrature::default()).unwrap();
    assert!(v.pass && v.ratio >= 1.0, "{v:?}");

    let below = WeightSpec { mu: 0.5 * spec.mu, ..spec };
    assert!(matches!(
        carleman_ratio_qlog(&below, &b, &BumpQuadrature::default()),
        Err(Error::Hypothesis(_))
    ));
    let inner = TestBump::gaussian(1.5, 0.0, 0.5, 0.5, 0.05);
    assert!(matches!(
        carleman_ratio_qlog(&spec, &inner, &BumpQuadrature::default()),
        Err(Error::Support(_))
    ));
    let early = TestBump::gaussian(3.0, 0.0, 0.3, 0.5, 0.05);
    assert!(matches!(
        carleman_ratio_qlog(&spec, &early, &BumpQuadrature::default()),
        Err(Error::Support(_))
    ));
}

#[test]
fn virial_bound_on_random_bumps() {
    let grid = plane(7.0, 120);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let zero = vec![num_complex::Complex64::new(0.0, 0.0); grid.len()];
    let spec = WeightSpec::schrodinger(1.0, 1.0, 12.0);
    assert_eq!(virial_lower_bound_check(&spec, &zero, &grid, 0.5).unwrap().gap, 0.0);
    for _ in 0..10 {
        let b = TestBump {
            tilt: rng.gen_range(-2.0..2.0),
            ..TestBump::gaussian(rng.gen_range(0.0..3.5), rng.gen_range(0.0..6.28), 0.5, rng.gen_range(0.3..0.8), 0.1)
        };
        assert!(b.fits_grid(&grid, 5));
        let f = b.sample(&grid, None);
        let t = rng.gen_range(0.05..0.95);
        for spec in [WeightSpec::schrodinger(1.0, 1.0, 12.0), WeightSpec::heat(1.0, 1.0, 12.0)] {
            let v = virial_lower_bound_check(&spec, &f, &grid, t).unwrap();
            assert!(v.pass && v.gap >= -1e-3, "{v:?}");
        }
    }
}

#[test]
fn virial_rejects_fields_at_the_rim() {
    let grid = plane(4.0, 60);
    let f = grid.sample(|r, _| num_complex::Complex64::new((-r).exp(), 0.0));
    let v = virial_lower_bound_check(&WeightSpec::heat(1.0, 1.0, 12.0), &f, &grid, 0.5);
    assert!(matches!(v, Err(Error::Support(_))));
}

#[test]
fn virial_coefficients() {
    let s = virial_coefficient(&WeightSpec::schrodinger(1.0, 1.0, 12.0)).unwrap();
    assert!((s - (18.0 - 8.0 / 3.0)).abs() < 1e-12);
    let h = virial_coefficient(&WeightSpec::heat(1.0, 1.0, 12.0)).unwrap();
    assert!((h - 9.0).abs() < 1e-12);
}

#[test]
fn frontier_passes_where_the_hypothesis_holds() {
    let lattice = FrontierLattice {
        mus: vec![1.0],
        epss: vec![1.0],
        rs: vec![1.1, 6.0, 12.0, 24.0],
    };
    let bumps = [reference_bump(), TestBump::gaussian(0.5, 1.0, 0.4, 0.4, 0.08)];
    let quad = BumpQuadrature { r_panels: 4, t_panels: 4, npsi: 96, ..Default::default() };
    let rows = feasibility_frontier(WeightKind::SchrodingerMoving, &lattice, &bumps, &quad).unwrap();
    assert_eq!(rows.len(), 4);
    for row in &rows {
        if row.hypothesis_ok {
            assert!(row.pass, "{row:?}");
        }
    }
    assert!(rows.windows(2).all(|w| !w[0].pass || w[1].pass));
    assert!(feasibility_frontier(WeightKind::SchrodingerMoving, &lattice, &[], &quad).is_err());
}

#[test]
fn mystery_margins_grow() {
    let rs: Vec<f64> = (3..=12).map(|k| (k as f64).exp()).collect();
    let m = mystery_inequality_check(1, &rs, 1.0).unwrap();
    assert!(m[0].margin > 0.0);
    assert!(m.windows(2).all(|w| w[1].margin > w[0].margin));
}
