//! Special functions and fractional-calculus primitives.

mod calculus;
mod gamma;
mod mittag_leffler;
mod wright;

pub use calculus::{caputo_derivative, rl_integral, rl_integral_all, rl_weights};
pub use gamma::{gamma, ln_gamma, rgamma};
pub use mittag_leffler::{ml_one, ml_two};
pub use wright::wright_density;

use crate::error::{domain, Result};
use crate::scalar::Real;

/// Caputo order `α ∈ (1/2, 1)` and integrability exponent `α₁ ∈ (0, α)` of the growth bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracOrder<T> {
    alpha: T,
    alpha1: T,
}

impl<T: Real> FracOrder<T> {
    pub fn new(alpha: T, alpha1: T) -> Result<Self> {
        if !(alpha > T::half() && alpha < T::one()) {
            return Err(domain(format!("alpha must lie in (1/2, 1), got {alpha}")));
        }
        if !(alpha1 > T::zero() && alpha1 < alpha) {
            return Err(domain(format!("alpha1={alpha1} outside (0, alpha={alpha})")));
        }
        Ok(Self { alpha, alpha1 })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn alpha1(&self) -> T {
        self.alpha1
    }
}

/// Uniform grid `0 = t_0 < t_1 < ... < t_steps = a`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid<T> {
    horizon: T,
    nodes: Vec<T>,
}

impl<T: Real> TimeGrid<T> {
    pub fn new(horizon: T, steps: usize) -> Result<Self> {
        if !(horizon > T::zero()) || !horizon.is_finite() {
            return Err(domain(format!("horizon {horizon} must be positive and finite")));
        }
        if steps < 2 {
            return Err(domain(format!("time grid needs at least 2 steps, got {steps}")));
        }
        let h = horizon / T::of(steps);
        let mut nodes: Vec<T> = (0..=steps).map(|k| h * T::of(k)).collect();
        nodes[steps] = horizon;
        Ok(Self { horizon, nodes })
    }

    pub fn horizon(&self) -> T {
        self.horizon
    }

    /// Number of intervals.
    pub fn steps(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Number of nodes, `steps + 1`.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> T {
        self.horizon / T::of(self.steps())
    }

    pub fn node(&self, k: usize) -> T {
        self.nodes[k]
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    /// Same horizon with `factor` times as many steps.
    pub fn refine(&self, factor: usize) -> Result<Self> {
        Self::new(self.horizon, self.steps() * factor.max(1))
    }
}
