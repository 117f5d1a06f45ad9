//! Crank-Nicolson evolution of d_t u = (a + ib)(Delta u + V u + F) on
//! geodesic polar grids, and the conjugated operator pair.

mod conjugated;
mod grid;
mod solver;

pub use conjugated::{assemble_conjugated, DiscreteOperatorPair, QuadraticWeight, WeightField};
pub use grid::{adjointness_defect, laplacian_operator, PolarGrid, StencilOp};
pub use solver::{
    evolve, laplacian_mode, resolution_check, step, EvolutionParams, FieldState, ForcingFn, Hook, Stepper,
    Trajectory,
};
