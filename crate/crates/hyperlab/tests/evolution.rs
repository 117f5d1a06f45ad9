use hyperlab::evolution::*;
use hyperlab::geometry::RadialGrid;
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

fn gaussian(grid: &PolarGrid, width: f64) -> Vec<Complex64> {
    grid.sample(|r, _| c((-r * r / (width * width)).exp()))
}

/// Largest pointwise error at t_final of the sin(k rho)/sinh(rho) eigenfunction.
fn eigen_error(cells: usize, dt: f64) -> f64 {
    let rho_max = 8.0;
    let k = 4.0 * std::f64::consts::PI / rho_max;
    let grid = mode_grid(3, rho_max, cells);
    let u0 = grid.sample(|r, _| c((k * r).sin() / r.sinh()));
    let params = EvolutionParams::free(0.0, 1.0, grid.len(), dt, 0.1);
    let traj = evolve(&FieldState::new(u0.clone(), 0.0, 0), &grid, &params, &[], 0).unwrap();
    let phase = Complex64::new(0.0, -(1.0 + k * k) * 0.1).exp();
    let last = traj.states.last().unwrap();
    last.values
        .iter()
        .zip(&u0)
        .map(|(u, v)| (u - v * phase).norm())
        .fold(0.0, f64::max)
}

#[test]
fn eigenfunction_phase_and_order() {
    let e0 = eigen_error(400, 1e-3);
    assert!(e0 <= 1e-4, "error {e0}");
    let coarse = [eigen_error(100, 4e-3), eigen_error(200, 2e-3), eigen_error(400, 1e-3)];
    for w in coarse.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((order - 2.0).abs() <= 0.3, "order {order} from {coarse:?}");
    }
}

#[test]
fn laplacian_of_eigenfunction_and_constants() {
    let grid = mode_grid(3, 8.0, 800);
    let k = 1.3;
    let u = FieldState::new(grid.sample(|r, _| c((k * r).sin() / r.sinh())), 0.0, 0);
    let lu = laplacian_mode(&u, &grid).unwrap();
    for (i, (a, b)) in lu.values.iter().zip(&u.values).enumerate().take(700) {
        assert!((a + (1.0 + k * k) * b).norm() < 1e-3, "cell {i}");
    }
    let one = FieldState::new(vec![c(1.0); grid.len()], 0.0, 0);
    let l1 = laplacian_mode(&one, &grid).unwrap();
    assert!(l1.values[..790].iter().all(|v| v.norm() < 1e-8));
}

#[test]
fn mode_two_matches_plane_grid() {
    let radial = RadialGrid::uniform(2, 6.0, 120).unwrap();
    let mode = PolarGrid::mode(radial.clone());
    let plane = PolarGrid::plane(radial, 512).unwrap();
    let prof = |r: f64| r * r * (-r * r).exp();
    let um = FieldState::new(mode.sample(|r, _| c(prof(r))), 0.0, 2);
    let up = FieldState::new(plane.sample(|r, th| c(prof(r) * (2.0 * th).cos())), 0.0, 0);
    let lm = laplacian_mode(&um, &mode).unwrap();
    let lp = laplacian_mode(&up, &plane).unwrap();
    let scale = lm.values.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    for i in 0..mode.nr() {
        let proj: Complex64 = (0..512)
            .map(|j| lp.values[i * 512 + j] * (2.0 * plane.theta(j)).cos())
            .sum::<Complex64>()
            / 256.0;
        assert!((proj - lm.values[i]).norm() <= 1e-4 * scale, "ring {i}");
    }
}

#[test]
fn crank_nicolson_is_unitary_and_dissipative() {
    let grid = mode_grid(3, 10.0, 200);
    let u0 = FieldState::new(gaussian(&grid, 1.5), 0.0, 1);
    let n0 = grid.norm2(&u0.values);
    let sch = step(&u0, &grid, &EvolutionParams::free(0.0, 1.0, grid.len(), 1e-2, 1.0)).unwrap();
    assert!((grid.norm2(&sch.values) - n0).abs() <= 1e-10 * n0);
    let heat = step(&u0, &grid, &EvolutionParams::free(1.0, 0.0, grid.len(), 1e-2, 1.0)).unwrap();
    assert!(grid.norm2(&heat.values) <= n0);
}

#[test]
fn trajectories_record_hooks() {
    let grid = mode_grid(2, 8.0, 160);
    let params = EvolutionParams::free(0.0, 1.0, grid.len(), 5e-3, 0.5);
    let zero = FieldState::zeros(grid.len(), 0);
    let mass = |s: &FieldState| grid.norm2(&s.values);
    let hooks: [Hook; 1] = [("mass", &mass)];
    let t = evolve(&zero, &grid, &params, &hooks, 10).unwrap();
    assert!(t.states.iter().all(|s| s.values.iter().all(|v| *v == c(0.0))));
    let u0 = FieldState::new(gaussian(&grid, 1.0), 0.0, 0);
    let t = evolve(&u0, &grid, &params, &hooks, 0).unwrap();
    let m = t.series("mass").unwrap();
    assert_eq!(m.len(), 101);
    assert!((t.times[100] - 0.5).abs() < 1e-15);
    assert!(m.iter().all(|v| (v - m[0]).abs() <= 1e-9 * m[0]));
}

#[test]
fn truncation_is_invisible_for_concentrated_data() {
    let run = |rho_max: f64, cells: usize| {
        let grid = mode_grid(3, rho_max, cells);
        let u0 = FieldState::new(gaussian(&grid, 0.8), 0.0, 0);
        let params = EvolutionParams::free(1.0, 1.0, grid.len(), 1e-2, 0.3);
        let h = |s: &FieldState| grid.norm2(&s.values);
        let hooks: [Hook; 1] = [("mass", &h)];
        evolve(&u0, &grid, &params, &hooks, 0).unwrap().series("mass").unwrap().to_vec()
    };
    let a = run(10.0, 200);
    let b = run(20.0, 400);
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-6, "{x} vs {y}");
    }
}

#[test]
fn forcing_and_potential_enter_the_step() {
    let grid = mode_grid(2, 6.0, 60);
    let mut params = EvolutionParams::free(1.0, 0.0, grid.len(), 1e-2, 0.1);
    params.forcing = Some(std::sync::Arc::new(move |_t| vec![c(1.0); 60]));
    let s = step(&FieldState::zeros(60, 0), &grid, &params).unwrap();
    assert!(s.values[10].re > 0.0);
    params.potential = vec![c(f64::INFINITY); 60];
    assert!(step(&FieldState::zeros(60, 0), &grid, &params).is_err());
    assert!(PolarGrid::plane(RadialGrid::uniform(3, 6.0, 60).unwrap(), 8).is_err());
    assert!(laplacian_operator(&mode_grid(2, 1.0, 3), 0).is_err());
}

#[test]
fn conjugation_matches_explicit_product() {
    let grid = mode_grid(3, 4.0, 60);
    let w = QuadraticWeight::stationary(0.5);
    let pair = assemble_conjugated(&grid, &w, 1.0, 0.0, 0.0, 0).unwrap();
    let lap = laplacian_operator(&grid, 0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let f: Vec<Complex64> = (0..grid.len())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let inner: Vec<Complex64> = f.iter().zip(&pair.phi).map(|(v, p)| v * (-p).exp()).collect();
        let direct: Vec<Complex64> = lap.apply(&inner).iter().zip(&pair.phi).map(|(v, p)| v * p.exp()).collect();
        let got = pair.apply_generator(&f);
        let scale = direct.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        for (a, b) in got.iter().zip(&direct) {
            assert!((a - b).norm() <= 1e-6 * scale);
        }
    }
    assert!(pair.symmetry_defect() <= 1e-8 && pair.antisymmetry_defect() <= 1e-8);
}

#[test]
fn unweighted_pair_is_pure_dispersion() {
    let grid = mode_grid(2, 5.0, 50);
    let pair = assemble_conjugated(&grid, &QuadraticWeight::stationary(0.0), 0.0, 1.0, 0.3, 1).unwrap();
    assert!(pair.s.to_dense().iter().all(|v| v.norm() == 0.0));
    let lap = laplacian_operator(&grid, 1).unwrap().to_dense();
    let diff = pair.a.to_dense() - lap * Complex64::new(0.0, 1.0);
    assert!(diff.iter().all(|v| v.norm() < 1e-14));
    assert!(pair.antisymmetry_defect() <= 1e-8);
}

#[test]
fn conjugated_flow_tracks_weighted_solution() {
    // v = e^phi u along a Crank-Nicolson run satisfies the midpoint rule for S + A.
    let grid = mode_grid(3, 8.0, 160);
    let w = QuadraticWeight::stationary(0.2);
    let pair = assemble_conjugated(&grid, &w, 0.5, 1.0, 0.0, 0).unwrap();
    let dt = 1e-3;
    let params = EvolutionParams::free(0.5, 1.0, grid.len(), dt, 0.02);
    let u0 = FieldState::new(gaussian(&grid, 1.0), 0.0, 0);
    let traj = evolve(&u0, &grid, &params, &[], 1).unwrap();
    let v = |s: &FieldState| -> Vec<Complex64> { s.values.iter().zip(&pair.phi).map(|(u, p)| u * p.exp()).collect() };
    let mut worst: f64 = 0.0;
    for p in traj.states.windows(2) {
        let (v0, v1) = (v(&p[0]), v(&p[1]));
        let mid: Vec<Complex64> = v0.iter().zip(&v1).map(|(a, b)| 0.5 * (a + b)).collect();
        let g = pair.apply_generator(&mid);
        for ((a, b), gv) in v0.iter().zip(&v1).zip(&g) {
            worst = worst.max(((b - a) / dt - gv).norm() / (1.0 + gv.norm()));
        }
    }
    assert!(worst <= 1e-4, "residual {worst}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn schrodinger_steps_preserve_norm(b in 0.2f64..2.0, ell in 0usize..4, seed in 0u64..1000) {
        let grid = mode_grid(3, 8.0, 80);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u: Vec<Complex64> = (0..80).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let s0 = FieldState::new(u, 0.0, ell);
        let n0 = grid.norm2(&s0.values);
        let s1 = step(&s0, &grid, &EvolutionParams::free(0.0, b, 80, 0.05, 1.0)).unwrap();
        prop_assert!((grid.norm2(&s1.values) - n0).abs() <= 1e-10 * n0);
    }

    #[test]
    fn pair_forms_are_real_and_imaginary(gamma in 0.0f64..1.0, a in 0.0f64..2.0, b in -2.0f64..2.0, seed in 0u64..1000) {
        let grid = PolarGrid::plane(RadialGrid::uniform(2, 4.0, 20).unwrap(), 8).unwrap();
        let pair = assemble_conjugated(&grid, &QuadraticWeight { c: [gamma, 0.3, 0.1], beta: [0.0, 1.0, 0.0] }, a, b, 0.4, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f: Vec<Complex64> = (0..grid.len()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let s = pair.form(&pair.s, &f);
        let an = pair.form(&pair.a, &f);
        prop_assert!(s.im.abs() <= 1e-8 * s.norm().max(1.0));
        prop_assert!(an.re.abs() <= 1e-8 * an.norm().max(1.0));
        prop_assert!(pair.symmetry_defect() <= 1e-8 && pair.antisymmetry_defect() <= 1e-8);
    }
}
