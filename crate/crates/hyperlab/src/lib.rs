//! Numerical checks for weighted estimates on hyperbolic space and on
//! asymptotically hyperbolic warped products.

pub mod asymptotics;
pub mod carleman;
pub mod curvature;
pub mod error;
pub mod evolution;
pub mod functionals;
pub mod geometry;
pub mod numerics;
pub mod runner;
pub mod tolerances;

pub use error::{Error, Result};
