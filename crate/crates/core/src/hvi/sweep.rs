use crate::control::ControlProblem;
use crate::error::{domain, Result};
use crate::lpspace::SpectralState;
use crate::scalar::Real;

use super::fixed_point::{fixed_point_iterate, FixedPoint, FixedPointOptions};
use super::potential::Potential;

/// Smallest regularisation accepted by a sweep.
pub const MIN_EPSILON: f64 = 1e-5;

/// One line of an ε-sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow<T> {
    pub epsilon: T,
    /// `‖q_ε(a) - z‖`.
    pub terminal_miss: T,
    /// `‖ε (εI + G J)⁻¹ d_ε‖`, equal to the miss up to the final-state identity.
    pub formula_miss: T,
    /// `‖q_ε(a) - (z - ε w)‖`, the defect of the final-state identity.
    pub identity_residual: T,
    /// `‖u_ε‖_{L²(I, U)}`.
    pub control_energy: T,
    pub iterations: usize,
    pub converged: bool,
    /// Why the entry failed, if it did.
    pub failure: Option<String>,
}

/// Runs the fixed point for one `ε` and summarises it. Failures are recorded
/// in the row rather than returned.
pub fn sweep_entry<T: Real>(
    problem: &ControlProblem<T>,
    pot: &Potential<T>,
    x0: &SpectralState<T>,
    z: &SpectralState<T>,
    epsilon: T,
    opts: &FixedPointOptions<T>,
) -> SweepRow<T> {
    sweep_point(problem, pot, x0, z, epsilon, opts).0
}

/// [`sweep_entry`] together with the fixed point it summarises, when one was reached.
pub fn sweep_point<T: Real>(
    problem: &ControlProblem<T>,
    pot: &Potential<T>,
    x0: &SpectralState<T>,
    z: &SpectralState<T>,
    epsilon: T,
    opts: &FixedPointOptions<T>,
) -> (SweepRow<T>, Option<FixedPoint<T>>) {
    let summary = || -> Result<(SweepRow<T>, FixedPoint<T>)> {
        let fp = fixed_point_iterate(problem, pot, x0, z, epsilon, opts)?;
        let w = &fp.run.synthesis.solve.result;
        let row = SweepRow {
            epsilon,
            terminal_miss: problem.terminal_miss(&fp.run, z)?,
            formula_miss: problem.state_norm(&w.scale(epsilon))?,
            identity_residual: problem.final_state_identity(&fp.run, z)?,
            control_energy: fp.run.synthesis.control_energy(problem.grid()),
            iterations: fp.iterations(),
            converged: fp.converged,
            failure: (!fp.converged).then(|| "fixed-point iteration did not converge".to_string()),
        };
        Ok((row, fp))
    };
    match summary() {
        Ok((row, fp)) => (row, Some(fp)),
        Err(e) => {
            let row = SweepRow {
                epsilon,
                terminal_miss: T::nan(),
                formula_miss: T::nan(),
                identity_residual: T::nan(),
                control_energy: T::nan(),
                iterations: 0,
                converged: false,
                failure: Some(e.to_string()),
            };
            (row, None)
        }
    }
}

/// [`sweep_entry`] for each `ε` of a strictly descending list with
/// `min ε ≥ MIN_EPSILON`.
pub fn epsilon_sweep<T: Real>(
    problem: &ControlProblem<T>,
    pot: &Potential<T>,
    x0: &SpectralState<T>,
    z: &SpectralState<T>,
    eps_list: &[T],
    opts: &FixedPointOptions<T>,
) -> Result<Vec<SweepRow<T>>> {
    check_epsilons(eps_list)?;
    Ok(eps_list.iter().map(|&e| sweep_entry(problem, pot, x0, z, e, opts)).collect())
}

/// The list must be non-empty, strictly descending and bounded below by [`MIN_EPSILON`].
pub fn check_epsilons<T: Real>(eps_list: &[T]) -> Result<()> {
    if eps_list.is_empty() {
        return Err(domain("empty epsilon list"));
    }
    if eps_list.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(domain("epsilon list must be strictly descending"));
    }
    let last = *eps_list.last().expect("non-empty");
    if !(last >= T::lit(MIN_EPSILON)) {
        return Err(domain(format!("epsilon {last} below the minimum {MIN_EPSILON}")));
    }
    Ok(())
}
