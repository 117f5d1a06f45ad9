//! The check suites. Each suite is a list of named sections; a section is a
//! pure function of the configuration.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use super::config::{ExperimentConfig, Suite};
use super::corpus::{self, radial_corpus, stream, BumpCorpusSpec};
use super::report::{Check, Failure, Section, Table};
use crate::asymptotics::{default_gamma0, laplace_probe, q_exponent};
use crate::carleman::{
    carleman_ratio, carleman_ratio_qlog, feasibility_frontier, mystery_inequality_check, virial_lower_bound_check,
    BumpQuadrature, CarlemanOperator, FrontierLattice, TestBump, WeightKind, WeightSpec,
};
use crate::curvature::{
    bilaplacian_perturbed, bochner_residual, coordinate_planes, curvature_fd, curvature_report, full_metric,
    rel_err, riccati_residual, sectional_scan, OracleSteps, WarpedMetricSpec,
};
use crate::error::Result;
use crate::evolution::{
    assemble_conjugated, evolve, step, EvolutionParams, FieldState, PolarGrid, QuadraticWeight, Trajectory,
};
use crate::functionals::{
    alpha_ode_residual, commutator_check, commutator_lower_bound, convexity_report_tol, gaussian_decay_check, m3,
    space_time_estimate_check, WeightedNormSeries,
};
use crate::geometry::{
    bilaplacian_interval, bilaplacian_rho_squared, capped_square, frak_c, gradient_structure, hyperbolic_distance,
    moving_center_kinematics, mollify_exp, GeometryConstants, HyperboloidPoint, MovingCenter, RadialGrid,
};
use crate::numerics::{d2, loglog_slope, richardson_d1};

pub type SectionFn = fn(&ExperimentConfig) -> Result<Section>;

pub fn plan(suite: Suite) -> Vec<(&'static str, SectionFn)> {
    match suite {
        Suite::Bilaplacian => vec![("interval", bilaplacian_sweep), ("constants", constants)],
        Suite::Curvature => vec![
            ("hyperbolic_exact", hyperbolic_exact),
            ("oracle", curvature_oracle),
            ("riccati_bochner", riccati_bochner),
            ("sectional_decay", sectional_decay),
            ("perturbed_bilaplacian", perturbed_bilaplacian),
        ],
        Suite::Kinematics => vec![
            ("moving_center", moving_center),
            ("triangle", triangle),
            ("symmetry", center_symmetry),
        ],
        Suite::Evolution => vec![("eigenfunction", eigenfunction), ("unitarity", unitarity)],
        Suite::Commutator => vec![("identity", commutator_identity), ("lower_bound", commutator_bound)],
        Suite::GaussianDecay => vec![("decay", gaussian_decay), ("alpha_ode", alpha_ode)],
        Suite::Convexity => vec![("log_convexity", log_convexity), ("space_time", space_time)],
        Suite::Mollifier => vec![("upper_bound", mollifier_upper), ("gradient_structure", mollifier_gradient)],
        Suite::Carleman | Suite::CarlemanHeat => vec![
            ("ratio", carleman_ratios),
            ("refinement", carleman_refinement),
            ("virial", virial),
            ("frontier", frontier),
        ],
        Suite::CarlemanQlog => vec![("exponent", qlog_exponent), ("mystery", mystery), ("ratio", qlog_ratios)],
        Suite::Asymptotics => vec![("laplace", laplace)],
    }
}

fn log_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count)
        .map(|k| lo * (hi / lo).powf(k as f64 / (count - 1) as f64))
        .collect()
}

fn dims(cfg: &ExperimentConfig, default: &[usize]) -> Vec<usize> {
    cfg.n.map(|n| vec![n]).unwrap_or_else(|| default.to_vec())
}

fn mode_grid(n: usize, rho_max: f64, cells: usize) -> Result<PolarGrid> {
    Ok(PolarGrid::mode(RadialGrid::uniform(n, rho_max, cells)?))
}

fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn gaussian_data(grid: &PolarGrid) -> FieldState {
    FieldState::new(grid.sample(|r, _| real((-r * r).exp())), 0.0, 0)
}

/// Free flow with the configured constant potential and forcing amplitude.
fn flow_params(cfg: &ExperimentConfig, grid: &PolarGrid, a: f64, b: f64, dt: f64) -> EvolutionParams {
    let mut p = EvolutionParams::free(a, b, grid.len(), dt, 1.0);
    if let Some([re, im]) = cfg.physics.potential {
        p.potential = vec![Complex64::new(re, im); grid.len()];
    }
    if let Some(amp) = cfg.physics.forcing.filter(|f| *f != 0.0) {
        let f = grid.sample(|r, _| real(amp * (-r * r).exp()));
        p.forcing = Some(Arc::new(move |_| f.clone()));
    }
    p
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn min_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(f64::INFINITY, f64::min)
}

fn random_angles(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n - 1).map(|_| rng.gen_range(0.3..PI - 0.3)).collect()
}

// ---------------------------------------------------------------- bilaplacian

fn bilaplacian_sweep(cfg: &ExperimentConfig) -> Result<Section> {
    let slack = cfg.tolerances.bilaplacian_interval;
    let mut s = Section::new("interval");
    let mut t = Table::new("bilaplacian", &["n", "rho", "value", "lower", "upper"]).plotted();
    let rhos = log_space(1e-2, 50.0, 1000);
    let mut worst: f64 = 0.0;
    for n in dims(cfg, &[2, 3, 4, 5, 6]) {
        let (lo, hi, _, _) = bilaplacian_interval(n);
        let mut dev3: f64 = 0.0;
        for &rho in &rhos {
            let v = bilaplacian_rho_squared(n, rho)?;
            worst = worst.max(lo - v).max(v - hi);
            if n == 3 {
                dev3 = dev3.max((v - 8.0).abs());
            }
            t.push(vec![n.into(), rho.into(), v.into(), lo.into(), hi.into()]);
        }
        if n == 3 {
            s.check(Check::at_most("n3_deviation_from_8", dev3, 1e-12));
        }
    }
    s.check(Check::at_most("max_interval_violation", worst, slack));
    s.table(t);
    Ok(s)
}

fn constants(cfg: &ExperimentConfig) -> Result<Section> {
    let mut s = Section::new("constants");
    let mut t = Table::new("geometry_constants", &["n", "frak_c", "frak_d", "frak_f"]);
    let mut largest: f64 = 0.0;
    for n in dims(cfg, &[2, 3, 4, 5, 6]) {
        let c = GeometryConstants::hyperbolic(n);
        largest = largest.max(c.frak_d_n);
        t.push(vec![n.into(), c.frak_c_n.into(), c.frak_d_n.into(), c.frak_f_n.into()]);
    }
    s.check(Check::at_most("max_frak_d", largest, f64::MAX));
    s.table(t);
    Ok(s)
}

// ------------------------------------------------------------------ curvature

fn hyperbolic_exact(cfg: &ExperimentConfig) -> Result<Section> {
    let tol = cfg.tolerances.curvature_exact;
    let mut s = Section::new("hyperbolic_exact");
    let (mut k_dev, mut ric_dev, mut scal_dev): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for n in dims(cfg, &[2, 3, 4]) {
        let spec = WarpedMetricSpec::hyperbolic(n);
        let nf = n as f64;
        for i in 0..20 {
            let mut rng = stream(cfg.seed, 1000 * n + i);
            let rho = rng.gen_range(0.2..6.0);
            let theta = random_angles(&mut rng, n);
            let rep = curvature_report(&spec, rho, &theta)?;
            k_dev = max_of(
                rep.sectional_radial
                    .iter()
                    .chain(&rep.sectional_tangential)
                    .map(|k| (k + 1.0).abs())
                    .chain([k_dev]),
            );
            for a in 0..n {
                for b in 0..n {
                    ric_dev = ric_dev.max(rel_err(rep.ricci[(a, b)], -(nf - 1.0) * rep.metric[(a, b)]));
                }
            }
            scal_dev = scal_dev.max(rel_err(rep.scalar, -nf * (nf - 1.0)));
        }
    }
    s.check(Check::at_most("sectional_plus_one", k_dev, tol));
    s.check(Check::at_most("ricci_rel_err", ric_dev, tol));
    s.check(Check::at_most("scalar_rel_err", scal_dev, tol));
    Ok(s)
}

/// One compared component: name, closed form, oracle.
type Component = (String, f64, f64);

fn oracle_components(spec: &WarpedMetricSpec, rho: f64, theta: &[f64]) -> Result<Vec<Component>> {
    let n = spec.n;
    let mut x = vec![rho];
    x.extend_from_slice(theta);
    let rep = curvature_report(spec, rho, theta)?;
    let fd = curvature_fd(&|y: &[f64]| full_metric(spec, y), &x, OracleSteps::default())?;
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                out.push((
                    format!("christoffel[{a}][{b}{c}]"),
                    rep.christoffels.get(a, b, c),
                    fd.christoffel.get(a, b, c),
                ));
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    out.push((
                        format!("riemann[{a}][{b}{c}{d}]"),
                        rep.riemann.get(a, b, c, d),
                        fd.riemann.get(a, b, c, d),
                    ));
                }
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            out.push((format!("ricci[{a}{b}]"), rep.ricci[(a, b)], fd.ricci[(a, b)]));
        }
    }
    out.push(("scalar".into(), rep.scalar, fd.scalar));
    Ok(out)
}

fn curvature_oracle(cfg: &ExperimentConfig) -> Result<Section> {
    let tol = cfg.tolerances.curvature_oracle;
    let mut s = Section::new("oracle");
    let mut t = Table::new(
        "curvature_oracle",
        &["n", "point", "rho", "theta", "component", "closed_form", "oracle", "rel_err"],
    );
    let families = ["christoffel", "riemann", "ricci", "scalar"];
    let mut worst = [0.0f64; 4];
    for n in dims(cfg, &[2, 3, 4]) {
        let spec = WarpedMetricSpec::conformal_cos(n, 0.1, 2.0);
        let points: Vec<(f64, Vec<f64>, Vec<Component>)> = (0..100)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream(cfg.seed, 10_000 * n + i);
                let rho = rng.gen_range(0.3..5.0);
                let theta = random_angles(&mut rng, n);
                let comps = oracle_components(&spec, rho, &theta)?;
                Ok((rho, theta, comps))
            })
            .collect::<Result<_>>()?;
        for (i, (rho, theta, comps)) in points.into_iter().enumerate() {
            let angles = theta.iter().map(|v| format!("{v:.17e}")).collect::<Vec<_>>().join(" ");
            let mut bad = Vec::new();
            for (name, closed, oracle) in comps {
                let e = rel_err(closed, oracle);
                let fam = families.iter().position(|f| name.starts_with(f)).expect("known family");
                worst[fam] = worst[fam].max(e);
                if !(e <= tol) {
                    bad.push(format!("{name}: {e:e}"));
                }
                t.push(vec![
                    n.into(),
                    i.into(),
                    rho.into(),
                    angles.clone().into(),
                    name.into(),
                    closed.into(),
                    oracle.into(),
                    e.into(),
                ]);
            }
            if !bad.is_empty() {
                s.fail(Failure {
                    seed: cfg.seed,
                    index: 10_000 * n + i,
                    detail: format!("n={n} rho={rho} theta=[{angles}] {}", bad.join(", ")),
                });
            }
        }
    }
    for (name, v) in families.iter().zip(worst) {
        s.check(Check::at_most(format!("{name}_rel_err"), v, tol));
    }
    s.table(t);
    Ok(s)
}

fn riccati_bochner(cfg: &ExperimentConfig) -> Result<Section> {
    let tol = cfg.tolerances.riccati_bochner;
    let mut s = Section::new("riccati_bochner");
    let mut t = Table::new("riccati_bochner", &["n", "metric", "max_riccati", "max_bochner"]);
    let (mut ric, mut boch): (f64, f64) = (0.0, 0.0);
    for n in dims(cfg, &[2, 3, 4]) {
        let mut specs = vec![
            ("hyperbolic", WarpedMetricSpec::hyperbolic(n)),
            ("conformal_cos", WarpedMetricSpec::conformal_cos(n, 0.1, 2.0)),
        ];
        if n >= 3 {
            specs.push(("mixed", WarpedMetricSpec::mixed(n, 0.1, 2.0)));
        }
        for (k, (label, spec)) in specs.into_iter().enumerate() {
            let (mut r_max, mut b_max): (f64, f64) = (0.0, 0.0);
            for i in 0..20 {
                let mut rng = stream(cfg.seed, 100_000 + 1000 * n + 100 * k + i);
                let rho = rng.gen_range(0.3..8.0);
                let theta = random_angles(&mut rng, n);
                r_max = r_max.max(riccati_residual(&spec, rho, &theta)?);
                b_max = b_max.max(bochner_residual(&spec, rho, &theta)?);
            }
            ric = ric.max(r_max);
            boch = boch.max(b_max);
            t.push(vec![n.into(), (k as u32).into(), r_max.into(), b_max.into()]);
            s.note(format!("metric {k} = {label}"));
        }
    }
    s.notes.dedup();
    s.check(Check::at_most("riccati_residual", ric, tol));
    s.check(Check::at_most("bochner_residual", boch, tol));
    s.table(t);
    Ok(s)
}

const DECAY_M: f64 = 2.0;

fn decay_metric(cfg: &ExperimentConfig) -> (WarpedMetricSpec, Vec<f64>) {
    let n = cfg.n.unwrap_or(3);
    let theta = (0..n - 1).map(|k| 0.8 + 0.3 * k as f64).collect();
    (WarpedMetricSpec::conformal_cos(n, 0.1, DECAY_M), theta)
}

fn sectional_decay(cfg: &ExperimentConfig) -> Result<Section> {
    let mut s = Section::new("sectional_decay");
    let (spec, theta) = decay_metric(cfg);
    let rhos = log_space(5.0, 50.0, 20);
    let scan = sectional_scan(&spec, &theta, &coordinate_planes(spec.n), &rhos)?;
    let dev: Vec<f64> = scan.iter().map(|row| max_of(row.iter().map(|k| (k + 1.0).abs()))).collect();
    let exponent = -loglog_slope(&rhos, &dev);
    let mut t = Table::new("sectional_decay", &["rho", "max_abs_k_plus_1"]).plotted();
    for (r, d) in rhos.iter().zip(&dev) {
        t.push(vec![(*r).into(), (*d).into()]);
    }
    s.check(Check::at_least("decay_exponent", exponent, DECAY_M - cfg.tolerances.order_slack));
    s.table(t);
    Ok(s)
}

fn perturbed_bilaplacian(cfg: &ExperimentConfig) -> Result<Section> {
    let mut s = Section::new("perturbed_bilaplacian");
    let (spec, theta) = decay_metric(cfg);
    let rhos = log_space(5.0, 50.0, 40);
    let mut gaps = Vec::with_capacity(rhos.len());
    let mut t = Table::new("perturbed_bilaplacian", &["rho", "gap", "gap_times_rho2"]).plotted();
    for &rho in &rhos {
        let g = (bilaplacian_perturbed(&spec, rho, &theta, 1.0)? - bilaplacian_rho_squared(spec.n, rho)?).abs();
        t.push(vec![rho.into(), g.into(), (g * rho * rho).into()]);
        gaps.push(g);
    }
    let c = max_of(gaps.iter().zip(&rhos).map(|(g, r)| g * r * r));
    let slope = loglog_slope(&rhos, &gaps);
    s.check(Check::at_most("constant_c", c, f64::MAX));
    s.check(Check::at_most("slope_deviation_from_minus_2", (slope + 2.0).abs(), cfg.tolerances.order_slack));
    s.note(format!("fitted slope {slope:.4} for decay order m = {DECAY_M}"));
    s.table(t);
    Ok(s)
}

// ----------------------------------------------------------------- kinematics

/// Smallest admitted distance between x and P(t) in the difference check.
const KINEMATICS_CLEARANCE: f64 = 0.25;

fn moving_center(cfg: &ExperimentConfig) -> Result<Section> {
    let tol = cfg.tolerances.kinematics;
    let mut s = Section::new("moving_center");
    let mut t = Table::new("kinematics", &["rho", "theta", "r", "t", "err_rho_t", "err_rho_tt"]);
    let (mut e1, mut e2): (f64, f64) = (0.0, 0.0);
    for i in 0..1000 {
        let mut rng = stream(cfg.seed, i);
        let (x, r, time) = loop {
            let x = HyperboloidPoint::polar2(rng.gen_range(0.0..4.0), rng.gen_range(0.0..TAU));
            let r = rng.gen_range(0.5..10.0);
            let time = rng.gen_range(0.05..0.95);
            let p = MovingCenter::new(2, r).point(time);
            if hyperbolic_distance(&x, &p)? > KINEMATICS_CLEARANCE {
                break (x, r, time);
            }
        };
        let k = moving_center_kinematics(&x, r, time)?;
        let mc = MovingCenter::new(2, r);
        let f = |tt: f64| hyperbolic_distance(&x, &mc.point(tt)).unwrap_or(f64::NAN);
        let fd_t = richardson_d1(f, time, 1e-3);
        let h = 1e-3;
        let fd_tt = (4.0 * d2(f, time, h / 2.0) - d2(f, time, h)) / 3.0;
        let a = (k.rho_t - fd_t).abs() / fd_t.abs().max(1.0);
        let b = (k.rho_tt - fd_tt).abs() / fd_tt.abs().max(1.0);
        if !(a <= tol && b <= tol) {
            s.fail(Failure {
                seed: cfg.seed,
                index: i,
                detail: format!("x={:?} R={r} t={time} errors ({a:e}, {b:e})", x.coords()),
            });
        }
        e1 = e1.max(a);
        e2 = e2.max(b);
        let c = x.coords();
        t.push(vec![
            c[0].acosh().into(),
            c[2].atan2(c[1]).into(),
            r.into(),
            time.into(),
            a.into(),
            b.into(),
        ]);
    }
    s.check(Check::at_most("rho_t_rel_err", e1, tol));
    s.check(Check::at_most("rho_tt_rel_err", e2, tol));
    s.table(t);
    Ok(s)
}

fn triangle(cfg: &ExperimentConfig) -> Result<Section> {
    let mut s = Section::new("triangle");
    let mut worst = f64::NEG_INFINITY;
    for n in [2usize, 3] {
        for i in 0..500 {
            let mut rng = stream(cfg.seed, 10_000 * n + i);
            let mut point = || {
                let dir: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let len = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-3);
                let dir: Vec<f64> = dir.iter().map(|v| v / len).collect();
                HyperboloidPoint::from_polar(rng.gen_range(0.0..8.0), &dir)
            };
            let (x, y, z) = (point(), point(), point());
            let lhs = hyperbolic_distance(&x, &z)?;
            let rhs = hyperbolic_distance(&x, &y)? + hyperbolic_distance(&y, &z)?;
            worst = worst.max(lhs - rhs);
        }
    }
    s.check(Check::at_most("max_triangle_excess", worst, 1e-10));
    Ok(s)
}

fn center_symmetry(cfg: &ExperimentConfig) -> Result<Section> {
    let mut s = Section::new("symmetry");
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let mut rng = stream(cfg.seed, i);
        let mc = MovingCenter::new(2, rng.gen_range(0.5..10.0));
        let t = rng.gen_range(0..=1024u32) as f64 / 1024.0;
        let (p, q) = (mc.point(t), mc.point(1.0 - t));
        worst = max_of(p.coords().iter().zip(q.coords()).map(|(a, b)| (a - b).abs()).chain([worst]));
    }
    s.check(Check::at_most("max_reflection_defect", worst, 0.0));
    Ok(s)
}

// ------------------------------------------------------------------ evolution

/// Largest pointwise error at t = 0.1 of the sin(k rho)/sinh(rho) eigenfunction
/// of the Laplacian on H^3 under free Schrödinger flow.
fn eigen_error(rho_max: f64, cells: usize, dt: f64) -> Result<f64> {
    let k = 4.0 * PI / rho_max;
    let grid = mode_grid(3, rho_max, cells)?;
    let u0 = grid.sample(|r, _| real((k * r).sin() / r.sinh()));
    let params = EvolutionParams::free(0.0, 1.0, grid.len(), dt, 0.1);
    let traj = evolve(&FieldState::new(u0.clone(), 0.0, 0), &grid, &params, &[], 0)?;
    let phase = Complex64::new(0.0, -(1.0 + k * k) * 0.1).exp();
    let last = traj.states.last().expect("trajectory has an endpoint");
    Ok(max_of(last.values.iter().zip(&u0).map(|(u, v)| (u - v * phase).norm())))
}

fn eigenfunction(cfg: &ExperimentConfig) -> Result<Section> {
    let mut s = Section::new("eigenfunction");
    let rho_max = cfg.grid.rho_max.unwrap_or(8.0);
    let base = cfg.grid.cells.unwrap_or(400);
    let levels = [(base / 4, 4e-3), (base / 2, 2e-3), (base, 1e-3)];
    let mut t = Table::new("eigenfunction_convergence", &["cells", "dt", "max_error"]).plotted();
    let mut errs = Vec::new();
    for (cells, dt) in levels {
        let e = eigen_error(rho_max, cells, dt)?;
        t.push(vec![cells.into(), dt.into(), e.into()]);
        errs.push(e);
    }
    s.check(Check::at_most("phase_error", errs[2], cfg.tolerances.phase_error));
    let dev = max_of(errs.windows(2).map(|w| ((w[0] / w[1]).log2() - 2.0).abs()));
    s.check(Check::at_most("order_deviation", dev, cfg.tolerances.order_slack));
    s.table(t);
    Ok(s)
}

fn unitarity(cfg: &ExperimentConfig) -> Result<Section> {
    let mut s = Section::new("unitarity");
    let n = cfg.n.unwrap_or(3);
    let grid = mode_grid(n, 10.0, 200)?;
    let mut u = FieldState::new(grid.sample(|r, _| real((-r * r / 2.25).exp())), 0.0, 1);
    let n0 = grid.norm2(&u.values);
    let sch = EvolutionParams::free(0.0, 1.0, grid.len(), 1e-2, 1.0);
    for _ in 0..100 {
        u = step(&u, &grid, &sch)?;
    }
    s.check(Check::at_most("norm_drift", (grid.norm2(&u.values) - n0).abs() / n0, cfg.tolerances.norm_drift));
    let heat = step(
        &FieldState::new(u.values.clone(), 0.0, 1),
        &grid,
        &EvolutionParams::free(1.0, 0.0, grid.len(), 1e-2, 1.0),
    )?;
    s.check(Check::at_most("heat_norm_growth", grid.norm2(&heat.values) - grid.norm2(&u.values), 0.0));
    Ok(s)
}

// ----------------------------------------------------------------- commutator

fn commutator_identity(cfg: &ExperimentConfig) -> Result<Section> {
    let mut s = Section::new("identity");
    let n = cfg.n.unwrap_or(3);
    let gamma = cfg.physics.gamma.unwrap_or(0.3);
    let (a, b) = (cfg.physics.a.unwrap_or(0.0), cfg.physics.b.unwrap_or(1.0));
    let rho_max = cfg.grid.rho_max.unwrap_or(8.0);
    let cells = cfg.grid.cells.unwrap_or(400);
    let size = cfg.corpus.size.unwrap_or(50);
    let bumps = radial_corpus(cfg.seed, size, (1.5, 3.5), (0.5, 0.8), (-1.0, 1.0));
    let w = QuadraticWeight::stationary(gamma);
    let coarse = mode_grid(n, rho_max, cells)?;
    let fine = mode_grid(n, rho_max, 2 * cells)?;
    let pc = assemble_conjugated(&coarse, &w, a, b, 0.0, 0)?;
    let pf = assemble_conjugated(&fine, &w, a, b, 0.0, 0)?;
    let mut t = Table::new("commutator_gaps", &["index", "center", "width", "tilt", "gap", "gap_refined"]).plotted();
    let (mut worst_gap, mut worst_reduction): (f64, f64) = (0.0, f64::INFINITY);
    for (i, bump) in bumps.iter().enumerate() {
        let g0 = commutator_check(&pc, &bump.sample(&coarse), &w, &coarse, a, b, 0)?.gap;
        let g1 = commutator_check(&pf, &bump.sample(&fine), &w, &fine, a, b, 0)?.gap;
        let reduction = g0 / g1;
        if !(g0 <= cfg.tolerances.commutator_gap) || !(reduction >= reduction_floor(cfg)) {
            s.fail(Failure {
                seed: cfg.seed,
                index: i,
                detail: serde_json::to_string(bump).unwrap_or_default(),
            });
        }
        worst_gap = worst_gap.max(g0);
        worst_reduction = worst_reduction.min(reduction);
        t.push(vec![
            i.into(),
            bump.center.into(),
            bump.width.into(),
            bump.tilt.into(),
            g0.into(),
            g1.into(),
        ]);
    }
    if bumps.is_empty() {
        s.note("empty corpus: vacuous pass");
        worst_reduction = 4.0;
    }
    s.check(Check::at_most("max_gap", worst_gap, cfg.tolerances.commutator_gap));
    s.check(Check::at_least("min_gap_reduction", worst_reduction, reduction_floor(cfg)));
    s.table(t);
    Ok(s)
}

/// A halved spacing must cut a second-order error by 2^(2 - slack).
fn reduction_floor(cfg: &ExperimentConfig) -> f64 {
    2f64.powf(2.0 - cfg.tolerances.order_slack)
}

fn commutator_bound(cfg: &ExperimentConfig) -> Result<Section> {
    let mut s = Section::new("lower_bound");
    let rho_max = cfg.grid.rho_max.map(|r| r.max(10.0)).unwrap_or(10.0);
    let cells = cfg.grid.cells.unwrap_or(400);
    let size = cfg.corpus.size.unwrap_or(50);
    let bumps = radial_corpus(cfg.seed ^ 1, size, (0.0, 5.0), (0.3, 0.8), (-2.0, 2.0));
    let gammas = cfg.physics.gamma.map(|g| vec![g]).unwrap_or_else(|| vec![0.1, 0.5, 1.0]);
    let flows = match (cfg.physics.a, cfg.physics.b) {
        (None, None) => vec![(0.0, 1.0), (1.0, 0.0), (1.0, 1.0)],
        (a, b) => vec![(a.unwrap_or(0.0), b.unwrap_or(1.0))],
    };
    let mut t = Table::new("commutator_lower_bound", &["n", "gamma", "a", "b", "min_margin"]);
    let mut worst = f64::INFINITY;
    for n in dims(cfg, &[2, 3]) {
        let grid = mode_grid(n, rho_max, cells)?;
        let samples: Vec<Vec<Complex64>> = bumps
            .iter()
            .map(|bump| {
                let f = bump.sample(&grid);
                let norm = grid.norm2(&f).sqrt();
                f.into_iter().map(|v| v / norm).collect()
            })
            .collect();
        for &gamma in &gammas {
            let w = QuadraticWeight::stationary(gamma);
            for &(a, b) in &flows {
                let pair = assemble_conjugated(&grid, &w, a, b, 0.0, 0)?;
                let mut row_min = f64::INFINITY;
                for (i, f) in samples.iter().enumerate() {
                    let lhs = pair.commutator_form(f).re;
                    let margin = lhs - commutator_lower_bound(n, gamma, a, b, grid.norm2(f));
                    if !(margin >= -cfg.tolerances.commutator_bound) {
                        s.fail(Failure {
                            seed: cfg.seed ^ 1,
                            index: i,
                            detail: format!("n={n} gamma={gamma} a={a} b={b} margin={margin:e}"),
                        });
                    }
                    row_min = row_min.min(margin);
                }
                worst = worst.min(row_min);
                t.push(vec![n.into(), gamma.into(), a.into(), b.into(), row_min.into()]);
            }
        }
    }
    if bumps.is_empty() {
        s.note("empty corpus: vacuous pass");
        worst = 0.0;
    }
    s.check(Check::at_least("min_margin", worst, -cfg.tolerances.commutator_bound));
    s.table(t);
    Ok(s)
}

// ------------------------------------------------------------- gaussian decay

fn gaussian_decay(cfg: &ExperimentConfig) -> Result<Section> {
    let mut s = Section::new("decay");
    let rho_max = cfg.grid.rho_max.unwrap_or(12.0);
    let cells = cfg.grid.cells.unwrap_or(240);
    let gammas = cfg.physics.gamma.map(|g| vec![g]).unwrap_or_else(|| vec![0.1, 0.3]);
    let gl = (cfg.physics.a.unwrap_or(0.5), cfg.physics.b.unwrap_or(1.0));
    let mut t = Table::new("gaussian_decay", &["n", "gamma", "a", "b", "min_margin"]);
    let mut worst = f64::INFINITY;
    for n in dims(cfg, &[2, 3]) {
        let grid = mode_grid(n, rho_max, cells)?;
        for (a, b) in [(1.0, 0.0), gl] {
            let params = flow_params(cfg, &grid, a, b, 1e-2);
            let traj = evolve(&gaussian_data(&grid), &grid, &params, &[], 1)?;
            for &gamma in &gammas {
                let m = min_of(gaussian_decay_check(&traj, &grid, &params, gamma)?);
                worst = worst.min(m);
                t.push(vec![n.into(), gamma.into(), a.into(), b.into(), m.into()]);
            }
        }
    }
    s.check(Check::at_least("min_margin", worst, 0.0));
    s.table(t);
    Ok(s)
}

fn alpha_ode(cfg: &ExperimentConfig) -> Result<Section> {
    let mut s = Section::new("alpha_ode");
    let times: Vec<f64> = (1..100).map(|k| k as f64 / 100.0).collect();
    let mut worst: f64 = 0.0;
    for gamma in [0.1, 0.3, 1.0] {
        for (a, b) in [(1.0, 0.0), (1.0, 1.0), (0.5, 2.0)] {
            worst = worst.max(alpha_ode_residual(gamma, a, b, &times));
        }
    }
    s.check(Check::at_most("max_residual", worst, cfg.tolerances.alpha_ode));
    Ok(s)
}

// ------------------------------------------------------------------ convexity

fn log_h_series(cfg: &ExperimentConfig, a: f64, b: f64, cells: usize, dt: f64, gamma: f64) -> Result<WeightedNormSeries> {
    let grid = mode_grid(cfg.n.unwrap_or(3), cfg.grid.rho_max.unwrap_or(25.0), cells)?;
    let params = flow_params(cfg, &grid, a, b, dt);
    let traj = evolve(&gaussian_data(&grid), &grid, &params, &[], 1)?;
    WeightedNormSeries::from_states(&traj.states, &grid, gamma)
}

fn log_convexity(cfg: &ExperimentConfig) -> Result<Section> {
    let mut s = Section::new("log_convexity");
    let tol = cfg.tolerances.convexity;
    let gamma = cfg.physics.gamma.unwrap_or(0.02);
    let n = cfg.n.unwrap_or(3);
    let cells = cfg.grid.cells.unwrap_or(500);
    let gl = (cfg.physics.a.unwrap_or(1.0), cfg.physics.b.unwrap_or(1.0));
    let mut t = Table::new("log_convexity", &["a", "b", "cells", "dt", "min_second_difference", "n_hat"]);
    let mut plot = Table::new("log_h", &["a", "b", "t", "log_h"]).plotted();
    for (label, (a, b)) in [("schrodinger", (0.0, 1.0)), ("ginzburg_landau", gl)] {
        let m0 = gamma * frak_c(n) * (a * a + b * b);
        let m1 = cfg.physics.potential.map(|[re, im]| re.hypot(im)).unwrap_or(0.0);
        let m2 = cfg.physics.forcing.unwrap_or(0.0).abs();
        let mut verdicts = Vec::new();
        for (k, (c, dt)) in [(cells, 1e-2), (2 * cells, 5e-3)].into_iter().enumerate() {
            let series = log_h_series(cfg, a, b, c, dt, gamma)?;
            let v = convexity_report_tol(&series, m0, m1, m2, tol)?;
            t.push(vec![
                a.into(),
                b.into(),
                c.into(),
                dt.into(),
                v.min_second_difference.into(),
                v.n_hat.into(),
            ]);
            if k == 0 {
                for (tt, y) in series.times.iter().zip(&series.log_h) {
                    plot.push(vec![a.into(), b.into(), (*tt).into(), (*y).into()]);
                }
            }
            verdicts.push(v);
        }
        let min_dd = min_of(verdicts.iter().map(|v| v.min_second_difference));
        s.check(Check::at_least(format!("{label}_min_second_difference"), min_dd, -tol));
        let (c, f) = (verdicts[0].n_hat, verdicts[1].n_hat);
        let change = if c == f { 0.0 } else { (c - f).abs() / c.max(f) };
        s.check(Check::at_most(format!("{label}_n_hat_change"), change, cfg.tolerances.n_hat_stability));
    }
    s.table(t);
    s.table(plot);
    Ok(s)
}

fn space_time(cfg: &ExperimentConfig) -> Result<Section> {
    let mut s = Section::new("space_time");
    let n = cfg.n.unwrap_or(3);
    let gamma = cfg.physics.gamma.unwrap_or(0.2);
    let (a, b) = (
        cfg.physics.a.unwrap_or(FRAC_1_SQRT_2),
        cfg.physics.b.unwrap_or(FRAC_1_SQRT_2),
    );
    let grid = mode_grid(n, 15.0, 300)?;
    let params = flow_params(cfg, &grid, a, b, 1e-2);
    let traj: Trajectory = evolve(&gaussian_data(&grid), &grid, &params, &[], 1)?;
    let st = space_time_estimate_check(&traj, &grid, &params, gamma)?;
    s.check(Check::at_least("margin", st.margin, 0.0));
    s.check(Check::at_most("m3_spot_value_error", (m3(0.0, 1.0, 0.0, 3) - 115.0 / 6.0).abs(), 1e-12));
    s.note(format!("log lhs {:.6}, log rhs {:.6}", st.log_lhs, st.log_rhs));
    Ok(s)
}

// ------------------------------------------------------------------ mollifier

const MOLLIFIER_EPS: [f64; 4] = [0.2, 0.1, 0.05, 0.025];
const MOLLIFIER_SAMPLES: usize = 24;
/// Balls that straddle the cap at rho = R need a finer rule to converge.
const MOLLIFIER_UPPER_SAMPLES: usize = 48;

fn mollifier_upper(cfg: &ExperimentConfig) -> Result<Section> {
    let mut s = Section::new("upper_bound");
    let r = cfg.weight.r.unwrap_or(2.0);
    let mut worst = f64::NEG_INFINITY;
    let mut t = Table::new("mollifier_upper", &["eps", "max_excess_over_bound"]);
    let points: Vec<HyperboloidPoint> = (0..100)
        .map(|i| {
            let mut rng = stream(cfg.seed, i);
            HyperboloidPoint::polar2(rng.gen_range(0.0..1.5 * r), rng.gen_range(0.0..TAU))
        })
        .collect();
    for eps in MOLLIFIER_EPS {
        let vals = points
            .par_iter()
            .map(|x| {
                let phi = mollify_exp(&|y: &HyperboloidPoint| capped_square(y, r), eps, x, MOLLIFIER_UPPER_SAMPLES)?;
                Ok(phi.value - capped_square(x, r) - 2.0 * r * eps)
            })
            .collect::<Result<Vec<f64>>>()?;
        let m = max_of(vals);
        worst = worst.max(m);
        t.push(vec![eps.into(), m.into()]);
    }
    s.check(Check::at_most("max_excess_over_bound", worst, 0.0));
    s.table(t);
    Ok(s)
}

fn mollifier_gradient(cfg: &ExperimentConfig) -> Result<Section> {
    let mut s = Section::new("gradient_structure");
    let r = cfg.weight.r.unwrap_or(2.0);
    let points: Vec<HyperboloidPoint> = (0..100)
        .map(|i| {
            let mut rng = stream(cfg.seed ^ 1, i);
            HyperboloidPoint::polar2(rng.gen_range(0.05..r - 0.25), rng.gen_range(0.0..TAU))
        })
        .collect();
    let mut t = Table::new("mollifier_scaling", &["eps", "max_abs_excess", "sup_excess"]).plotted();
    let (mut max_abs, mut c_emp) = (Vec::new(), f64::NEG_INFINITY);
    for eps in MOLLIFIER_EPS {
        let ex = points
            .par_iter()
            .map(|x| Ok(gradient_structure(x, r, eps, MOLLIFIER_SAMPLES, 0.2 * eps)?.excess))
            .collect::<Result<Vec<f64>>>()?;
        let m = max_of(ex.iter().map(|v| v.abs()));
        let sup = max_of(ex.iter().copied());
        c_emp = c_emp.max(sup / (eps * eps));
        t.push(vec![eps.into(), m.into(), sup.into()]);
        max_abs.push(m);
    }
    let slope = loglog_slope(&MOLLIFIER_EPS, &max_abs);
    s.check(Check::at_most("slope_deviation_from_2", (slope - 2.0).abs(), cfg.tolerances.mollifier_slope));
    s.check(Check::at_most("sup_excess_over_eps2", c_emp, f64::MAX));
    s.note(format!("fitted slope {slope:.4}"));
    s.table(t);
    Ok(s)
}

// ------------------------------------------------------------------- carleman

fn moving_kind(cfg: &ExperimentConfig) -> WeightKind {
    match cfg.check {
        Some(Suite::CarlemanHeat) => WeightKind::HeatMoving,
        _ => WeightKind::SchrodingerMoving,
    }
}

fn moving_spec(cfg: &ExperimentConfig) -> WeightSpec {
    let w = &cfg.weight;
    WeightSpec {
        kind: moving_kind(cfg),
        ..WeightSpec::schrodinger(w.mu.unwrap_or(1.0), w.eps.unwrap_or(1.0), w.r.unwrap_or(12.0))
    }
}

fn virial_grid(cfg: &ExperimentConfig) -> Result<PolarGrid> {
    let radial = RadialGrid::uniform(
        2,
        cfg.grid.rho_max.unwrap_or(7.0),
        cfg.grid.cells.unwrap_or(120),
    )?;
    PolarGrid::plane(radial, cfg.grid.ntheta.unwrap_or(64))
}

fn moving_corpus(cfg: &ExperimentConfig) -> Result<Vec<TestBump>> {
    let grid = virial_grid(cfg)?;
    Ok(corpus::corpus(
        cfg.seed,
        &BumpCorpusSpec::moving(cfg.corpus.size.unwrap_or(100), &grid),
    ))
}

fn quadrature(cfg: &ExperimentConfig) -> BumpQuadrature {
    cfg.quadrature.unwrap_or_default()
}

fn carleman_ratios(cfg: &ExperimentConfig) -> Result<Section> {
    let mut s = Section::new("ratio");
    let spec = moving_spec(cfg);
    spec.require_hypothesis()?;
    let op = CarlemanOperator::for_kind(spec.kind).expect("moving weight");
    let bumps = moving_corpus(cfg)?;
    let quad = quadrature(cfg);
    let floor = 1.0 - cfg.tolerances.carleman;
    let ratios = bumps
        .par_iter()
        .map(|b| carleman_ratio(&spec, b, op, &quad))
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(
        "carleman_ratios",
        &["index", "rho_c", "theta_c", "t_c", "width", "t_width", "tilt", "log_lhs", "log_rhs", "ratio"],
    )
    .plotted();
    for (i, (b, r)) in bumps.iter().zip(&ratios).enumerate() {
        if !(r.ratio >= floor) {
            s.fail(Failure {
                seed: cfg.seed,
                index: i,
                detail: serde_json::to_string(b).unwrap_or_default(),
            });
        }
        t.push(vec![
            i.into(),
            b.rho_c.into(),
            b.theta_c.into(),
            b.t_c.into(),
            b.width.into(),
            b.t_width.into(),
            b.tilt.into(),
            r.log_lhs.into(),
            r.log_rhs.into(),
            r.ratio.into(),
        ]);
    }
    let min = if bumps.is_empty() {
        s.note("empty corpus: vacuous pass");
        log::warn!("empty Carleman corpus");
        floor
    } else {
        min_of(ratios.iter().map(|r| r.ratio))
    };
    s.check(Check::at_least("min_ratio", min, floor));
    s.note(format!(
        "mu={} eps={} R={} threshold={} constant={}",
        spec.mu,
        spec.eps,
        spec.r,
        spec.threshold()?,
        spec.carleman_constant()
    ));
    s.table(t);
    Ok(s)
}

fn carleman_refinement(cfg: &ExperimentConfig) -> Result<Section> {
    let mut s = Section::new("refinement");
    let spec = moving_spec(cfg);
    let op = CarlemanOperator::for_kind(spec.kind).expect("moving weight");
    let bumps = moving_corpus(cfg)?;
    let quad = quadrature(cfg);
    let Some(b) = bumps.first() else {
        s.note("empty corpus: vacuous pass");
        return Ok(s);
    };
    let base = carleman_ratio(&spec, b, op, &quad)?.ratio;
    let fine = carleman_ratio(&spec, b, op, &quad.refined())?.ratio;
    s.check(Check::at_most("ratio_change_under_refinement", (fine / base - 1.0).abs(), cfg.tolerances.carleman));
    Ok(s)
}

fn virial(cfg: &ExperimentConfig) -> Result<Section> {
    let mut s = Section::new("virial");
    let spec = moving_spec(cfg);
    let grid = virial_grid(cfg)?;
    let bumps = moving_corpus(cfg)?;
    let tol = cfg.tolerances.virial;
    let checks = bumps
        .par_iter()
        .map(|b| {
            [b.t_c - 0.5 * b.t_support, b.t_c, b.t_c + 0.5 * b.t_support]
                .into_iter()
                .map(|t| virial_lower_bound_check(&spec, &b.sample(&grid, Some(t)), &grid, t))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new("virial", &["index", "time", "lhs", "rhs", "gap"]);
    let mut worst = f64::INFINITY;
    for (i, (b, slices)) in bumps.iter().zip(&checks).enumerate() {
        for v in slices {
            worst = worst.min(v.gap);
            t.push(vec![i.into(), v.time.into(), v.lhs.into(), v.rhs.into(), v.gap.into()]);
        }
        if slices.iter().any(|v| !(v.gap >= -tol)) {
            s.fail(Failure {
                seed: cfg.seed,
                index: i,
                detail: serde_json::to_string(b).unwrap_or_default(),
            });
        }
    }
    if bumps.is_empty() {
        s.note("empty corpus: vacuous pass");
        worst = 0.0;
    }
    s.check(Check::at_least("min_gap", worst, -tol));
    s.table(t);
    Ok(s)
}

fn frontier(cfg: &ExperimentConfig) -> Result<Section> {
    let mut s = Section::new("frontier");
    let kind = moving_kind(cfg);
    let bumps: Vec<TestBump> = moving_corpus(cfg)?.into_iter().take(5).collect();
    if bumps.is_empty() {
        s.note("empty corpus: vacuous pass");
        return Ok(s);
    }
    let lattice = FrontierLattice {
        mus: vec![0.5, 1.0],
        epss: vec![0.5, 1.0],
        rs: vec![2.0, 4.0, 8.0, 12.0, 16.0, 24.0, 32.0],
    };
    let quad = BumpQuadrature {
        r_panels: 4,
        r_order: 8,
        npsi: 96,
        t_panels: 4,
        t_order: 8,
    };
    let rows = feasibility_frontier(kind, &lattice, &bumps, &quad)?;
    let mut t = Table::new(
        "frontier",
        &["mu", "eps", "R", "threshold", "hypothesis_ok", "min_ratio", "pass"],
    )
    .plotted();
    let (mut admissible, mut passed, mut monotone_breaks) = (0usize, 0usize, 0usize);
    for chunk in rows.chunks(lattice.rs.len()) {
        let mut seen_pass = false;
        for row in chunk {
            if row.hypothesis_ok {
                admissible += 1;
                passed += row.pass as usize;
            }
            if seen_pass && !row.pass {
                monotone_breaks += 1;
            }
            seen_pass |= row.pass;
        }
    }
    for row in &rows {
        t.push(vec![
            row.mu.into(),
            row.eps.into(),
            row.r.into(),
            row.threshold.into(),
            row.hypothesis_ok.into(),
            row.min_ratio.into(),
            row.pass.into(),
        ]);
    }
    let rate = if admissible == 0 { 1.0 } else { passed as f64 / admissible as f64 };
    s.check(Check::at_least("pass_rate_under_hypothesis", rate, 1.0));
    s.check(Check::at_most("monotonicity_breaks", monotone_breaks as f64, 0.0));
    s.table(t);
    Ok(s)
}

// -------------------------------------------------------------- quadratic log

fn qlog_exponent(cfg: &ExperimentConfig) -> Result<Section> {
    let mut s = Section::new("exponent");
    let mut worst: f64 = 0.0;
    let mut t = Table::new("q_exponent", &["ell", "log_r", "q", "residual"]);
    for ell in [1u32, 2, 5] {
        for k in 0..=32 {
            let log_r = 2.0 + 0.25 * k as f64;
            let (q, res) = q_exponent(ell, log_r.exp())?;
            worst = worst.max(res);
            t.push(vec![ell.into(), log_r.into(), q.into(), res.into()]);
        }
    }
    s.check(Check::at_most("identity_residual", worst, cfg.tolerances.q_identity));
    let (q2, _) = q_exponent(2, 50f64.exp())?;
    let (q1, _) = q_exponent(1, 50f64.exp())?;
    s.check(Check::at_most("abs_q_at_e50_ell2", q2.abs(), 0.1));
    s.note(format!("Q(1, e^50) = {q1:.6}"));
    s.table(t);
    Ok(s)
}

fn mystery(cfg: &ExperimentConfig) -> Result<Section> {
    let mut s = Section::new("mystery");
    let ell = cfg.weight.ell.unwrap_or(1);
    let c_cal = cfg.weight.c_cal.unwrap_or(1.0);
    let rs: Vec<f64> = (3..=30).map(|k| (k as f64).exp()).collect();
    let margins = mystery_inequality_check(ell, &rs, c_cal)?;
    let mut t = Table::new("mystery_margins", &["log_r", "log_f", "margin"]).plotted();
    for m in &margins {
        t.push(vec![m.r.ln().into(), m.log_f.into(), m.margin.into()]);
    }
    s.check(Check::at_least("min_margin", min_of(margins.iter().map(|m| m.margin)), 0.0));
    s.table(t);
    Ok(s)
}

fn qlog_ratios(cfg: &ExperimentConfig) -> Result<Section> {
    let mut s = Section::new("ratio");
    let w = &cfg.weight;
    let (ell, r, rho0) = (w.ell.unwrap_or(2), w.r.unwrap_or(20.0), w.rho0.unwrap_or(1.0));
    let spec = match w.mu {
        Some(mu) => WeightSpec::quadratic_log(ell, r, mu, rho0),
        None => WeightSpec::quadratic_log_at_threshold(ell, r, rho0)?,
    };
    let bumps = corpus::corpus(
        cfg.seed,
        &BumpCorpusSpec::quadratic_log(cfg.corpus.size.unwrap_or(20), rho0),
    );
    let quad = quadrature(cfg);
    let floor = 1.0 - cfg.tolerances.carleman;
    let ratios = bumps
        .par_iter()
        .map(|b| carleman_ratio_qlog(&spec, b, &quad))
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new("qlog_ratios", &["index", "rho_c", "t_c", "width", "lhs", "rhs", "ratio"]);
    for (i, (b, q)) in bumps.iter().zip(&ratios).enumerate() {
        if !(q.ratio >= floor) {
            s.fail(Failure {
                seed: cfg.seed,
                index: i,
                detail: serde_json::to_string(b).unwrap_or_default(),
            });
        }
        t.push(vec![
            i.into(),
            b.rho_c.into(),
            b.t_c.into(),
            b.width.into(),
            q.lhs.into(),
            q.rhs.into(),
            q.ratio.into(),
        ]);
    }
    let min = if bumps.is_empty() {
        s.note("empty corpus: vacuous pass");
        floor
    } else {
        min_of(ratios.iter().map(|q| q.ratio))
    };
    s.check(Check::at_least("min_ratio", min, floor));
    if let Some(q) = ratios.first() {
        s.note(format!("mu={} Q={} threshold={}", q.mu, q.q, q.mu_threshold));
    }
    s.table(t);
    Ok(s)
}

// ---------------------------------------------------------------- asymptotics

fn laplace(cfg: &ExperimentConfig) -> Result<Section> {
    let mut s = Section::new("laplace");
    let sigma = cfg.weight.sigma.unwrap_or(1.0);
    let g0 = default_gamma0(sigma);
    let mut t = Table::new("laplace", &["sigma", "rho", "ratio"]).plotted();
    let reference = [25.0, 50.0, 100.0];
    let mut devs = Vec::new();
    let mut shift: f64 = 0.0;
    for &rho in &reference {
        let p = laplace_probe(sigma, rho, g0)?;
        let half = laplace_probe(sigma, rho, g0 / 2.0)?;
        shift = shift.max((p.log_i - half.log_i).abs());
        devs.push((p.ratio() - 1.0).abs());
    }
    s.check(Check::at_most("abs_ratio_minus_1_at_50", devs[1], cfg.tolerances.laplace_ratio));
    let breaks = devs.windows(2).filter(|w| !(w[1] < w[0])).count();
    s.check(Check::at_most("non_decreasing_steps", breaks as f64, 0.0));
    s.check(Check::at_most("lower_limit_sensitivity", shift, cfg.tolerances.laplace_lower_limit));
    let rhos: Vec<f64> = (0..=18).map(|k| 10.0 + 5.0 * k as f64).collect();
    let mut prev = f64::NEG_INFINITY;
    let mut drops = 0;
    for &rho in &rhos {
        let p = laplace_probe(sigma, rho, g0)?;
        if !(p.log_i > prev) {
            drops += 1;
        }
        prev = p.log_i;
        t.push(vec![sigma.into(), rho.into(), p.ratio().into()]);
    }
    s.check(Check::at_most("log_i_decreases", drops as f64, 0.0));
    s.table(t);
    Ok(s)
}
