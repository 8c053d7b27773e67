//! Nonsmooth forcing: potentials with Clarke subdifferentials, the relaxed
//! fixed point of `g ↦ S_∂F(Υ_ε(g))`, ε-sweeps and the hemivariational
//! residual check.

mod fixed_point;
mod potential;
mod residual;
mod sweep;

pub use fixed_point::{fixed_point_iterate, select_forcing, FixedPoint, FixedPointOptions, ForcingField};
pub use potential::{clarke_directional, Interval, Potential, SelectionStrategy, Tabulated};
pub use residual::hvi_residual;
pub use sweep::{check_epsilons, epsilon_sweep, sweep_entry, sweep_point, SweepRow, MIN_EPSILON};
