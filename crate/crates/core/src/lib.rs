//! Caputo-fractional evolution inclusions on a spectral Galerkin space.
//!
//! The crate evaluates Mittag-Leffler functions and the Wright density,
//! builds the operator families `S_α`, `T_α` of a diagonal generator,
//! propagates mild solutions, assembles the controllability Gramian, and
//! synthesises regularised controls for state equations forced by a Clarke
//! subgradient selection.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`). The aliases at the
//! crate root fix the scalar to `f64`.

// argument guards are written as `!(x > 0)` so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod control;
pub mod error;
pub mod evolve;
pub mod fracops;
pub mod gramian;
pub mod hvi;
pub mod linalg;
pub mod lpspace;
pub mod quadrature;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};

/// Version of this crate, stamped into experiment outputs.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use scalar::Real;

pub type Matrix = linalg::Matrix<f64>;
pub type FracOrder = fracops::FracOrder<f64>;
pub type TimeGrid = fracops::TimeGrid<f64>;
pub type GridFunction = lpspace::GridFunction<f64>;
pub type SpectralState = lpspace::SpectralState<f64>;
pub type SineBasis = lpspace::SineBasis<f64>;
pub type GalerkinDuality = lpspace::GalerkinDuality<f64>;
pub type KernelSpec = spectral::KernelSpec<f64>;
pub type SpectralModel = spectral::SpectralModel<f64>;
pub type Trajectory = evolve::Trajectory<f64>;
pub type Propagator = evolve::Propagator<f64>;
pub type GramianOperator = gramian::GramianOperator<f64>;
pub type CrossGramian = gramian::CrossGramian<f64>;
pub type ResolventOptions = control::ResolventOptions<f64>;
pub type ResolventSolve = control::ResolventSolve<f64>;
pub type ControlProblem = control::ControlProblem<f64>;
pub type ControlledRun = control::ControlledRun<f64>;
pub type Potential = hvi::Potential<f64>;
pub type ForcingField = hvi::ForcingField<f64>;
pub type FixedPointOptions = hvi::FixedPointOptions<f64>;
pub type FixedPoint = hvi::FixedPoint<f64>;
pub type SweepRow = hvi::SweepRow<f64>;
