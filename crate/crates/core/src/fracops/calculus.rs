//! Discrete Riemann-Liouville integral and Caputo derivative on a uniform grid.

use super::gamma::{gamma, rgamma};
use super::TimeGrid;
use crate::error::{domain, Error, Result};
use crate::scalar::Real;

fn check_samples<T: Real>(f: &[T], grid: &TimeGrid<T>, node: usize) -> Result<()> {
    if f.len() != grid.len() {
        return Err(Error::GridMismatch(format!(
            "{} samples on a grid with {} nodes",
            f.len(),
            grid.len()
        )));
    }
    if node >= grid.len() {
        return Err(Error::GridMismatch(format!("node {node} beyond last node {}", grid.len() - 1)));
    }
    Ok(())
}

/// Product-trapezoidal weights `w_j` with `I^α f(t_k) ≈ Σ_j w_j f_j`.
pub fn rl_weights<T: Real>(alpha: T, h: T, k: usize) -> Vec<T> {
    if k == 0 {
        return vec![T::zero()];
    }
    let a1 = alpha + T::one();
    let p = |m: usize| T::of(m).powf(a1);
    let scale = h.powf(alpha) * rgamma(alpha + T::two());
    let mut w = Vec::with_capacity(k + 1);
    let kf = T::of(k);
    w.push(scale * (p(k - 1) - (kf - a1) * kf.powf(alpha)));
    for j in 1..k {
        let m = k - j;
        w.push(scale * (p(m + 1) - T::two() * p(m) + p(m - 1)));
    }
    w.push(scale);
    w
}

/// I^α f(t_k) = (1/Γ(α)) ∫_0^{t_k} (t_k - s)^{α-1} f(s) ds for piecewise-linear `f`.
pub fn rl_integral<T: Real>(f: &[T], grid: &TimeGrid<T>, alpha: T, node: usize) -> Result<T> {
    if !(alpha > T::zero()) {
        return Err(domain(format!("integral order alpha={alpha} must be positive")));
    }
    check_samples(f, grid, node)?;
    let w = rl_weights(alpha, grid.step(), node);
    Ok(w.iter().zip(f).map(|(&w, &v)| w * v).sum())
}

/// I^α f at every node of the grid.
pub fn rl_integral_all<T: Real>(f: &[T], grid: &TimeGrid<T>, alpha: T) -> Result<Vec<T>> {
    (0..grid.len()).map(|k| rl_integral(f, grid, alpha, k)).collect()
}

/// L1-scheme approximation of the Caputo derivative of order `alpha ∈ (0, 1)` at node `node > 0`.
pub fn caputo_derivative<T: Real>(f: &[T], grid: &TimeGrid<T>, alpha: T, node: usize) -> Result<T> {
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(domain(format!("Caputo order alpha={alpha} outside (0, 1)")));
    }
    check_samples(f, grid, node)?;
    if node == 0 {
        return Err(domain("Caputo derivative is defined for t > 0 only"));
    }
    let one_m = T::one() - alpha;
    let b = |m: usize| T::of(m + 1).powf(one_m) - T::of(m).powf(one_m);
    let sum: T = (0..node).map(|j| b(node - 1 - j) * (f[j + 1] - f[j])).sum();
    Ok(sum * grid.step().powf(-alpha) / gamma(T::two() - alpha))
}
