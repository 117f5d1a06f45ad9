use hyperlab::evolution::*;
use hyperlab::functionals::*;
use hyperlab::geometry::{shell_volume, sphere_area, RadialGrid};
use hyperlab::numerics::integrate_adaptive;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn mode_grid(n: usize, rho_max: f64, cells: usize) -> PolarGrid {
    PolarGrid::mode(RadialGrid::uniform(n, rho_max, cells).unwrap())
}

fn bump(grid: &PolarGrid, center: f64, width: f64, tilt: f64) -> Vec<Complex64> {
    grid.sample(|r, _| {
        let x = (r - center) / width;
        Complex64::new(0.0, tilt * r).exp() * (-x * x).exp()
    })
}

#[test]
fn weighted_norm_oracles() {
    let grid = mode_grid(3, 6.0, 4000);
    let zero = FieldState::zeros(grid.len(), 0);
    assert_eq!(weighted_norm(&zero, &grid, 1.0).unwrap(), f64::NEG_INFINITY);
    assert!(weighted_norm(&FieldState::zeros(0, 0), &grid, 1.0).is_err());
    let one = FieldState::new(vec![c(1.0); grid.len()], 0.0, 0);
    let plain = weighted_norm(&one, &grid, 0.0).unwrap();
    let exact = (4.0 * std::f64::consts::PI * shell_volume(3, 0.0, 6.0)).ln();
    assert!((plain - exact).abs() < 1e-12);
    let u = FieldState::new(grid.sample(|r, _| c((-2.0 * r * r).exp())), 0.0, 0);
    let got = weighted_norm(&u, &grid, 1.0).unwrap();
    let f = |r: f64| (-2.0 * r * r).exp() * r.sinh().powi(2) * sphere_area(3);
    let (want, _) = integrate_adaptive(&f, 0.0, 6.0, 1e-14);
    assert!((got - want.ln()).abs() < 1e-6, "{got} vs {}", want.ln());
    // No overflow for gamma rho_max^2 = 1e4.
    let far = mode_grid(2, 100.0, 200);
    let v = FieldState::new(vec![c(1e-3); 200], 0.0, 0);
    assert!(weighted_norm(&v, &far, 1.0).unwrap().is_finite());
}

fn schrodinger_series(cells: usize, dt: f64, gamma: f64) -> WeightedNormSeries {
    let grid = mode_grid(3, 25.0, cells);
    let u0 = FieldState::new(grid.sample(|r, _| c((-r * r).exp())), 0.0, 0);
    let params = EvolutionParams::free(0.0, 1.0, grid.len(), dt, 1.0);
    let traj = evolve(&u0, &grid, &params, &[], 1).unwrap();
    WeightedNormSeries::from_states(&traj.states, &grid, gamma).unwrap()
}

#[test]
fn free_schrodinger_is_log_convex() {
    let s = schrodinger_series(500, 1e-2, 0.02);
    let v = convexity_report(&s, 0.02 * 8.0, 0.0, 0.0).unwrap();
    assert!(v.pass, "{v:?}");
    let fine = schrodinger_series(1000, 5e-3, 0.02);
    let w = convexity_report(&fine, 0.02 * 8.0, 0.0, 0.0).unwrap();
    assert!(w.pass);
    assert!(v.n_hat == w.n_hat || (v.n_hat - w.n_hat).abs() <= 0.2 * v.n_hat.max(w.n_hat));
}

#[test]
fn heat_decay_bound_holds() {
    for (n, gamma) in [(2, 0.3), (3, 0.1)] {
        let grid = mode_grid(n, 12.0, 240);
        let u0 = FieldState::new(grid.sample(|r, _| c((-r * r).exp())), 0.0, 0);
        let params = EvolutionParams::free(1.0, 0.0, grid.len(), 1e-2, 1.0);
        let traj = evolve(&u0, &grid, &params, &[], 1).unwrap();
        let m = gaussian_decay_check(&traj, &grid, &params, gamma).unwrap();
        assert!(m.iter().all(|v| *v >= 0.0), "n={n} {m:?}");
        assert!(gaussian_decay_check(&traj, &grid, &EvolutionParams::free(0.0, 1.0, grid.len(), 1e-2, 1.0), gamma)
            .is_err());
    }
}

fn commutator_gap(cells: usize) -> f64 {
    let grid = mode_grid(3, 8.0, cells);
    let w = QuadraticWeight::stationary(0.3);
    let pair = assemble_conjugated(&grid, &w, 0.0, 1.0, 0.0, 0).unwrap();
    let f = bump(&grid, 2.5, 0.7, 0.8);
    commutator_check(&pair, &f, &w, &grid, 0.0, 1.0, 0).unwrap().gap
}

#[test]
fn commutator_identity_converges() {
    let g: Vec<f64> = [200, 400, 800].iter().map(|&n| commutator_gap(n)).collect();
    eprintln!("gaps {g:?}");
    assert!(g[0] <= 1e-3);
    for w in g.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((order - 2.0).abs() <= 0.3, "order {order}");
    }
}

#[test]
fn commutator_with_moving_weight_and_modes() {
    for (a, b, ell) in [(1.0, 0.0, 0), (0.5, -1.0, 1), (0.3, 2.0, 2)] {
        let grid = mode_grid(2, 8.0, 800);
        let w = QuadraticWeight { c: [0.2, 0.1, -0.05], beta: [0.0, 0.3, 0.2] };
        let pair = assemble_conjugated(&grid, &w, a, b, 0.4, ell).unwrap();
        let f = bump(&grid, 2.0, 0.6, -0.5);
        let r = commutator_check(&pair, &f, &w, &grid, a, b, ell).unwrap();
        eprintln!("a={a} b={b} l={ell} {r:?}");
        assert!(r.gap <= 1e-3);
    }
    let grid = mode_grid(3, 5.0, 100);
    let w = QuadraticWeight::stationary(0.0);
    let pair = assemble_conjugated(&grid, &w, 0.0, 1.0, 0.0, 0).unwrap();
    let r = commutator_check(&pair, &bump(&grid, 2.0, 0.4, 0.0), &w, &grid, 0.0, 1.0, 0).unwrap();
    assert!(r.lhs.abs() < 1e-12 && r.rhs.abs() < 1e-12);
    assert!(commutator_check(&pair, &bump(&grid, 4.9, 0.4, 0.0), &w, &grid, 0.0, 1.0, 0).is_err());
}

#[test]
fn commutator_lower_bound_on_random_bumps() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [2, 3] {
        let grid = mode_grid(n, 10.0, 400);
        for gamma in [0.1, 0.5, 1.0] {
            let w = QuadraticWeight::stationary(gamma);
            let (a, b) = (0.0, 1.0);
            let pair = assemble_conjugated(&grid, &w, a, b, 0.0, 0).unwrap();
            for _ in 0..50 {
                let mut f = bump(&grid, rng.gen_range(0.0..5.0), rng.gen_range(0.3..0.8), rng.gen_range(-2.0..2.0));
                let s = grid.norm2(&f).sqrt();
                f.iter_mut().for_each(|v| *v /= s);
                let r = commutator_check(&pair, &f, &w, &grid, a, b, 0).unwrap();
                assert!(r.lhs >= commutator_lower_bound(n, gamma, a, b, r.norm2) - 1e-3, "{r:?}");
            }
        }
    }
}

#[test]
fn space_time_estimate_for_ginzburg_landau() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let grid = mode_grid(3, 15.0, 300);
    let u0 = FieldState::new(grid.sample(|r, _| c((-r * r).exp())), 0.0, 0);
    let params = EvolutionParams::free(s, s, grid.len(), 1e-2, 1.0);
    let traj = evolve(&u0, &grid, &params, &[], 1).unwrap();
    let st = space_time_estimate_check(&traj, &grid, &params, 0.2).unwrap();
    eprintln!("{st:?}");
    assert!(st.margin >= 0.0);
    let zero = evolve(&FieldState::zeros(grid.len(), 0), &grid, &params, &[], 1).unwrap();
    assert!(space_time_estimate_check(&zero, &grid, &params, 0.2).unwrap().margin >= 0.0);
}

#[test]
fn transfer_kernel_and_series() {
    let rhos: Vec<f64> = (0..=28).map(|k| 2.0 + k as f64).collect();
    let bound = transfer_kernel_bound(1.0, 0.5, &rhos);
    assert!(bound.is_finite() && bound < 5.0, "{bound}");
    let grid = mode_grid(2, 12.0, 240);
    let u0 = FieldState::new(grid.sample(|r, _| c((-r * r).exp())), 0.0, 0);
    let params = EvolutionParams::free(1.0, 0.0, grid.len(), 1e-2, 1.0);
    let traj = evolve(&u0, &grid, &params, &[], 5).unwrap();
    let family: Vec<WeightedNormSeries> = (0..40)
        .map(|k| WeightedNormSeries::from_states(&traj.states, &grid, 0.01 + 0.005 * k as f64).unwrap())
        .collect();
    let tr = log_weight_transfer(&family, 0.02).unwrap();
    assert!(tr.coverage_ok && tr.verdict.pass, "{:?}", tr.verdict);
    // Data inside rho <= 1 sees a weight close to 1: the transfer is the plain
    // norm times the kernel mass.
    let small = FieldState::new(grid.sample(|r, _| c(if r < 1.0 { 1.0 - r } else { 0.0 })), 0.0, 0);
    let states = vec![small.clone(); 5];
    let fam: Vec<WeightedNormSeries> = (0..40)
        .map(|k| WeightedNormSeries::from_states(&states, &grid, 0.01 + 0.005 * k as f64).unwrap())
        .collect();
    let unit: Vec<WeightedNormSeries> = fam
        .iter()
        .map(|s| WeightedNormSeries { log_h: vec![0.0; 5], ..s.clone() })
        .collect();
    let t = log_weight_transfer(&fam, 0.02).unwrap();
    let k = log_weight_transfer(&unit, 0.02).unwrap();
    let plain = weighted_norm(&small, &grid, 0.0).unwrap();
    assert!((t.log_t[0] - k.log_t[0] - plain).abs() < 0.05);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn weighted_norm_is_monotone(seed in 0u64..10_000, gamma in 0.0f64..3.0) {
        let grid = mode_grid(3, 8.0, 64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let big: Vec<Complex64> = (0..64).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let small: Vec<Complex64> = big.iter().map(|v| v * rng.gen_range(0.0..1.0)).collect();
        let a = weighted_norm(&FieldState::new(big, 0.0, 0), &grid, gamma).unwrap();
        let b = weighted_norm(&FieldState::new(small, 0.0, 0), &grid, gamma).unwrap();
        prop_assert!(b <= a + 1e-12);
    }
}
