//! Hyperbolic-space primitives.

mod grid;
mod hyperboloid;
mod kinematics;
mod mollifier;
mod radial;

pub use grid::{shell_volume, sphere_area, RadialGrid};
pub use hyperboloid::{exp_map, hyperbolic_distance, minkowski, polar2_distance, HyperboloidPoint};
pub use kinematics::{
    moving_center_kinematics, squared_distance_rates, Kinematics, MovingCenter, SquaredDistanceRates,
};
pub use mollifier::{bump_profile, capped_square, gradient_structure, mollify_exp, GradientStructure, MollifiedValue};
pub use radial::{
    bilaplacian_interval, bilaplacian_rho_power, bilaplacian_rho_power_unchecked,
    bilaplacian_rho_squared, default_delta_lattice, fd_weights, frak_c, frak_d_sweep,
    laplacian_rho_power, laplacian_rho_squared, radial_laplacian, GeometryConstants,
};
