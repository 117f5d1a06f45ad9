use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::grid::{laplacian_operator, PolarGrid, StencilOp};
use crate::error::{Error, Result};
use crate::numerics::solve_tridiagonal;

/// Complex samples on a PolarGrid at one time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldState {
    pub values: Vec<Complex64>,
    pub time: f64,
    /// Angular mode on mode grids (0 = radial); ignored on angular grids.
    pub mode_ell: usize,
}

impl FieldState {
    pub fn new(values: Vec<Complex64>, time: f64, mode_ell: usize) -> Self {
        FieldState {
            values,
            time,
            mode_ell,
        }
    }

    pub fn zeros(len: usize, mode_ell: usize) -> Self {
        FieldState::new(vec![Complex64::new(0.0, 0.0); len], 0.0, mode_ell)
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite {
                time: self.time,
                detail: "field has non-finite entries".into(),
            })
        }
    }
}

/// Forcing F(t) sampled on the grid.
pub type ForcingFn = Arc<dyn Fn(f64) -> Vec<Complex64> + Send + Sync>;

/// Parameters of d_t u = (a + ib)(Delta u + V u + F).
#[derive(Clone)]
pub struct EvolutionParams {
    pub a: f64,
    pub b: f64,
    pub potential: Vec<Complex64>,
    pub forcing: Option<ForcingFn>,
    pub dt: f64,
    pub t_final: f64,
}

impl std::fmt::Debug for EvolutionParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EvolutionParams")
            .field("a", &self.a)
            .field("b", &self.b)
            .field("m1", &self.m1())
            .field("forced", &self.forcing.is_some())
            .field("dt", &self.dt)
            .field("t_final", &self.t_final)
            .finish()
    }
}

impl EvolutionParams {
    pub fn free(a: f64, b: f64, len: usize, dt: f64, t_final: f64) -> Self {
        EvolutionParams {
            a,
            b,
            potential: vec![Complex64::new(0.0, 0.0); len],
            forcing: None,
            dt,
            t_final,
        }
    }

    pub fn validate(&self, len: usize) -> Result<()> {
        if !(self.a >= 0.0) || (self.a == 0.0 && self.b == 0.0) || !self.b.is_finite() {
            return Err(Error::Invalid(format!("need a >= 0 and (a, b) != 0, got ({}, {})", self.a, self.b)));
        }
        if !(self.dt > 0.0) || !(self.t_final >= 0.0) {
            return Err(Error::Invalid("dt must be positive and t_final non-negative".into()));
        }
        if self.potential.len() != len {
            return Err(Error::Invalid(format!(
                "potential has {} samples, grid has {len}",
                self.potential.len()
            )));
        }
        if !self.m1().is_finite() {
            return Err(Error::Invalid("potential is not bounded".into()));
        }
        Ok(())
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.a, self.b)
    }

    /// sup |V|.
    pub fn m1(&self) -> f64 {
        self.potential.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    fn forcing_at(&self, t: f64, len: usize) -> Result<Option<Vec<Complex64>>> {
        match &self.forcing {
            None => Ok(None),
            Some(f) => {
                let v = f(t);
                if v.len() != len {
                    return Err(Error::Invalid(format!("forcing has {} samples, grid has {len}", v.len())));
                }
                Ok(Some(v))
            }
        }
    }
}

/// Applies the mode Laplacian (or the full angular one on angular grids).
pub fn laplacian_mode(state: &FieldState, grid: &PolarGrid) -> Result<FieldState> {
    if state.values.len() != grid.len() {
        return Err(Error::Invalid("state does not match grid".into()));
    }
    resolution_check(state, grid);
    let op = laplacian_operator(grid, state.mode_ell)?;
    Ok(FieldState::new(op.apply(&state.values), state.time, state.mode_ell))
}

/// Warns when the real part oscillates with fewer than 8 cells per period.
pub fn resolution_check(state: &FieldState, grid: &PolarGrid) -> bool {
    let nt = grid.ntheta;
    let re: Vec<f64> = (0..grid.nr()).map(|i| state.values[i * nt].re).collect();
    let crossings = re.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
    let ok = crossings == 0 || (2 * grid.nr()) as f64 / crossings as f64 >= 8.0;
    if !ok {
        log::warn!(
            "field oscillates with {:.1} cells per period; results may be under-resolved",
            (2 * grid.nr()) as f64 / crossings as f64
        );
    }
    ok
}

/// Crank-Nicolson stepper for a fixed grid, mode and parameters.
pub struct Stepper {
    grid: PolarGrid,
    params: EvolutionParams,
    /// Radial operator per angular Fourier mode (one entry on mode grids).
    mode_ops: Vec<StencilOp>,
    full_op: StencilOp,
    mode_ell: usize,
}

impl Stepper {
    pub fn new(grid: &PolarGrid, params: &EvolutionParams, mode_ell: usize) -> Result<Self> {
        params.validate(grid.len())?;
        let full_op = laplacian_operator(grid, mode_ell)?;
        let mode_ops = if grid.is_mode() {
            vec![full_op.clone()]
        } else {
            let nt = grid.ntheta;
            if (0..grid.nr()).any(|i| {
                (1..nt).any(|j| (params.potential[i * nt + j] - params.potential[i * nt]).norm() > 0.0)
            }) {
                return Err(Error::Invalid(
                    "angular grids require a potential independent of theta".into(),
                ));
            }
            let radial = PolarGrid::mode(grid.radial.clone());
            let base = laplacian_operator(&radial, 0)?;
            let dth = grid.dtheta();
            (0..nt)
                .map(|k| {
                    // Eigenvalue of the periodic second difference for Fourier mode k.
                    let lam = (2.0 - 2.0 * (k as f64 * dth).cos()) / (dth * dth);
                    let mut op = base.clone();
                    let d: Vec<Complex64> = radial
                        .radial
                        .nodes()
                        .iter()
                        .map(|&r| Complex64::new(-lam * crate::numerics::csch2(r), 0.0))
                        .collect();
                    op.add_diagonal(&d);
                    op
                })
                .collect()
        };
        Ok(Stepper {
            grid: grid.clone(),
            params: params.clone(),
            mode_ops,
            full_op,
            mode_ell,
        })
    }

    pub fn params(&self) -> &EvolutionParams {
        &self.params
    }

    pub fn grid(&self) -> &PolarGrid {
        &self.grid
    }

    /// (Delta + V) u.
    pub fn generator(&self, u: &[Complex64]) -> Vec<Complex64> {
        let mut out = self.full_op.apply(u);
        for (o, (v, x)) in out.iter_mut().zip(self.params.potential.iter().zip(u)) {
            *o += v * x;
        }
        out
    }

    pub fn step(&self, state: &FieldState) -> Result<FieldState> {
        let p = &self.params;
        let z = p.z();
        let h = 0.5 * p.dt * z;
        let len = self.grid.len();
        let mut rhs = self.generator(&state.values);
        for (r, u) in rhs.iter_mut().zip(&state.values) {
            *r = u + h * *r;
        }
        if let Some(f) = p.forcing_at(state.time + 0.5 * p.dt, len)? {
            for (r, fv) in rhs.iter_mut().zip(&f) {
                *r += p.dt * z * fv;
            }
        }
        let values = if self.grid.is_mode() {
            self.solve_radial(&self.mode_ops[0], &rhs, 1, 0)?
        } else {
            self.solve_angular(&rhs)?
        };
        let out = FieldState::new(values, state.time + p.dt, self.mode_ell);
        out.check_finite()?;
        Ok(out)
    }

    /// Solves (I - h(L + V)) x = rhs along one ring-column of stride `nt`.
    fn solve_radial(&self, op: &StencilOp, rhs: &[Complex64], nt: usize, col: usize) -> Result<Vec<Complex64>> {
        let h = 0.5 * self.params.dt * self.params.z();
        let nr = op.nr;
        let one = Complex64::new(1.0, 0.0);
        let mut lower = vec![Complex64::new(0.0, 0.0); nr];
        let mut diag = vec![Complex64::new(0.0, 0.0); nr];
        let mut upper = vec![Complex64::new(0.0, 0.0); nr];
        let mut b = vec![Complex64::new(0.0, 0.0); nr];
        for i in 0..nr {
            let k = i * op.ntheta;
            lower[i] = -h * op.inw[k];
            upper[i] = -h * op.out[k];
            diag[i] = one - h * (op.center[k] + self.params.potential[i * nt + col]);
            b[i] = rhs[i * nt + col];
        }
        solve_tridiagonal(&lower, &diag, &upper, &b)
    }

    fn solve_angular(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        let nt = self.grid.ntheta;
        let nr = self.grid.nr();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(nt);
        let inv = planner.plan_fft_inverse(nt);
        let mut spec = rhs.to_vec();
        for ring in spec.chunks_mut(nt) {
            fwd.process(ring);
        }
        let mut out = vec![Complex64::new(0.0, 0.0); nr * nt];
        for k in 0..nt {
            let col = self.solve_radial(&self.mode_ops[k], &spec, nt, k)?;
            for i in 0..nr {
                out[i * nt + k] = col[i];
            }
        }
        let scale = 1.0 / nt as f64;
        for ring in out.chunks_mut(nt) {
            inv.process(ring);
            for v in ring.iter_mut() {
                *v *= scale;
            }
        }
        Ok(out)
    }
}

/// One Crank-Nicolson step.
pub fn step(state: &FieldState, grid: &PolarGrid, params: &EvolutionParams) -> Result<FieldState> {
    Stepper::new(grid, params, state.mode_ell)?.step(state)
}

/// A functional recorded along a trajectory.
pub type Hook<'a> = (&'a str, &'a (dyn Fn(&FieldState) -> f64 + Sync));

/// Recorded evolution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// series[h][k] = hook h at times[k].
    pub names: Vec<String>,
    pub series: Vec<Vec<f64>>,
    /// States every `stride` steps (always including the first and last).
    pub states: Vec<FieldState>,
}

impl Trajectory {
    pub fn series(&self, name: &str) -> Option<&[f64]> {
        self.names.iter().position(|n| n == name).map(|i| self.series[i].as_slice())
    }
}

/// Iterates `step` over [0, t_final]; hooks are evaluated at every step and
/// states are kept every `stride` steps (0 keeps only the endpoints).
pub fn evolve(
    u0: &FieldState,
    grid: &PolarGrid,
    params: &EvolutionParams,
    hooks: &[Hook<'_>],
    stride: usize,
) -> Result<Trajectory> {
    let stepper = Stepper::new(grid, params, u0.mode_ell)?;
    let steps = (params.t_final / params.dt).round() as usize;
    if ((steps as f64) * params.dt - params.t_final).abs() > 1e-9 * params.t_final.max(1.0) {
        return Err(Error::Invalid("t_final must be a multiple of dt".into()));
    }
    let mut traj = Trajectory {
        times: Vec::with_capacity(steps + 1),
        names: hooks.iter().map(|h| h.0.to_string()).collect(),
        series: vec![Vec::with_capacity(steps + 1); hooks.len()],
        states: Vec::new(),
    };
    let record = |s: &FieldState, k: usize, traj: &mut Trajectory| {
        traj.times.push(s.time);
        for (h, out) in hooks.iter().zip(traj.series.iter_mut()) {
            out.push((h.1)(s));
        }
        if k == 0 || k == steps || (stride > 0 && k % stride == 0) {
            traj.states.push(s.clone());
        }
    };
    let mut state = u0.clone();
    state.check_finite()?;
    record(&state, 0, &mut traj);
    for k in 1..=steps {
        let t = state.time;
        state = stepper.step(&state).map_err(|e| Error::Step {
            time: t,
            source: Box::new(e),
        })?;
        // Avoid drift from repeated addition of dt.
        state.time = u0.time + k as f64 * params.dt;
        record(&state, k, &mut traj);
    }
    Ok(traj)
}
