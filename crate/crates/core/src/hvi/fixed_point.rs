use crate::control::{ControlProblem, ControlledRun, ResolventOptions};
use crate::error::{check_len, domain, Result};
use crate::evolve::Trajectory;
use crate::lpspace::{conjugate, lp_norm_values, theta_nodes, SineBasis, SpectralState};
use crate::scalar::Real;

use super::potential::{Potential, SelectionStrategy};

/// Forcing `g(t_k, θ_j)` in `X*`, sampled on the θ-grid at every time node.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcingField<T> {
    values: Vec<Vec<T>>,
}

impl<T: Real> ForcingField<T> {
    pub fn new(values: Vec<Vec<T>>) -> Result<Self> {
        let n_theta = values.first().map_or(0, Vec::len);
        for v in &values {
            check_len(n_theta, v.len())?;
        }
        Ok(Self { values })
    }

    pub fn zeros(nodes: usize, n_theta: usize) -> Self {
        Self { values: vec![vec![T::zero(); n_theta]; nodes] }
    }

    pub fn nodes(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Vec<T>] {
        &self.values
    }

    /// Basis coefficients `⟨g(t_k), w_n⟩` at every node.
    pub fn coefficients(&self, basis: &SineBasis<T>) -> Result<Vec<SpectralState<T>>> {
        self.values.iter().map(|v| SpectralState::new(basis.project(v)?)).collect()
    }

    /// `max_{k,j} |g - h|`.
    pub fn sup_gap(&self, other: &Self) -> Result<T> {
        check_len(self.values.len(), other.values.len())?;
        let mut m = T::zero();
        for (a, b) in self.values.iter().zip(&other.values) {
            check_len(a.len(), b.len())?;
            for (&x, &y) in a.iter().zip(b) {
                m = m.max((x - y).abs());
            }
        }
        Ok(m)
    }

    /// `‖g(t_k)‖_{L^{p'}}` per node, for state exponent `p`.
    pub fn dual_norms(&self, p: T) -> Vec<T> {
        let q = conjugate(p);
        self.values.iter().map(|v| lp_norm_values(v, q)).collect()
    }

    fn relax(&self, target: &Self, lambda: T) -> Self {
        let values = self
            .values
            .iter()
            .zip(&target.values)
            .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| (T::one() - lambda) * x + lambda * y).collect())
            .collect();
        Self { values }
    }
}

/// Picks `g(t_k, θ_j) ∈ ∂F(t_k, θ_j, q(t_k)(θ_j))` at every sample.
pub fn select_forcing<T: Real>(
    pot: &Potential<T>,
    strategy: SelectionStrategy,
    basis: &SineBasis<T>,
    q: &Trajectory<T>,
    previous: Option<&ForcingField<T>>,
) -> Result<ForcingField<T>> {
    let theta = theta_nodes::<T>(basis.n_theta());
    if let Some(prev) = previous {
        check_len(q.states().len(), prev.nodes())?;
    }
    let mut values = Vec::with_capacity(q.states().len());
    for (k, state) in q.states().iter().enumerate() {
        let t = q.grid().node(k);
        let r = basis.expand(state.coeffs())?;
        let prev = previous.map(|p| &p.values[k]);
        let row = r
            .iter()
            .enumerate()
            .map(|(j, &rj)| {
                let interval = pot.subdifferential(t, theta[j], rj);
                strategy.select(interval, prev.map(|p| p[j]))
            })
            .collect();
        values.push(row);
    }
    Ok(ForcingField { values })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointOptions<T> {
    /// Krasnoselskii averaging weight `λ ∈ (0, 1]`.
    pub relaxation: T,
    pub max_iter: usize,
    /// Target for both the forcing residual (relative to `η`) and the
    /// relative change between successive trajectories.
    pub tol: T,
    pub strategy: SelectionStrategy,
    pub resolvent: ResolventOptions<T>,
}

impl<T: Real> Default for FixedPointOptions<T> {
    fn default() -> Self {
        Self {
            relaxation: T::half(),
            max_iter: 200,
            tol: T::lit(1e-10),
            strategy: SelectionStrategy::default(),
            resolvent: ResolventOptions::default(),
        }
    }
}

/// Result of [`fixed_point_iterate`]; on failure it holds the best iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint<T> {
    /// `g_ε`, a selection of `∂F` along the last iterate, which differs from
    /// `q_ε` by at most the tolerance.
    pub forcing: ForcingField<T>,
    /// `q_ε = Υ_ε(g_ε)` and its control.
    pub run: ControlledRun<T>,
    /// `sup |S(Υ_ε(g)) - g| / η` per iteration.
    pub residual_history: Vec<T>,
    /// Relative sup-norm change of the trajectory per iteration (0 on the first).
    pub trajectory_changes: Vec<T>,
    pub converged: bool,
}

impl<T: Real> FixedPoint<T> {
    pub fn iterations(&self) -> usize {
        self.residual_history.len()
    }
}

/// Relaxed iteration `g ← (1-λ) g + λ S_∂F(Υ_ε(g))` from `g = 0`.
pub fn fixed_point_iterate<T: Real>(
    problem: &ControlProblem<T>,
    pot: &Potential<T>,
    x0: &SpectralState<T>,
    z: &SpectralState<T>,
    epsilon: T,
    opts: &FixedPointOptions<T>,
) -> Result<FixedPoint<T>> {
    if !(opts.relaxation > T::zero() && opts.relaxation <= T::one()) {
        return Err(domain(format!("relaxation {} outside (0, 1]", opts.relaxation)));
    }
    if opts.max_iter == 0 {
        return Err(domain("fixed-point iteration needs max_iter ≥ 1"));
    }
    let basis = problem.model().basis();
    let grid = problem.grid();
    let scale = (0..grid.len())
        .map(|k| pot.bound(grid.node(k)))
        .fold(T::zero(), T::max)
        .max(T::min_positive_value());

    let run_for = |g: &ForcingField<T>| -> Result<ControlledRun<T>> {
        problem.upsilon(epsilon, z, x0, &g.coefficients(basis)?, &opts.resolvent)
    };

    let mut g = ForcingField::zeros(grid.len(), basis.n_theta());
    let mut previous: Option<Trajectory<T>> = None;
    let mut residuals = Vec::new();
    let mut changes = Vec::new();
    let mut best: Option<(T, ForcingField<T>, ControlledRun<T>)> = None;
    for _ in 0..opts.max_iter {
        let run = run_for(&g)?;
        let selected = select_forcing(pot, opts.strategy, basis, &run.trajectory, Some(&g))?;
        let res = selected.sup_gap(&g)? / scale;
        let change = match &previous {
            Some(p) => run.trajectory.max_gap(p)? / run.trajectory.sup_norm().max(T::min_positive_value()),
            None => T::zero(),
        };
        residuals.push(res);
        changes.push(change);
        if res == T::zero() || (res <= opts.tol && previous.is_some() && change <= opts.tol) {
            let run = if res == T::zero() { run } else { run_for(&selected)? };
            return Ok(FixedPoint {
                forcing: selected,
                run,
                residual_history: residuals,
                trajectory_changes: changes,
                converged: true,
            });
        }
        if best.as_ref().is_none_or(|b| res < b.0) {
            best = Some((res, g.clone(), run.clone()));
        }
        g = g.relax(&selected, opts.relaxation);
        previous = Some(run.trajectory);
    }
    let (_, forcing, run) = best.ok_or_else(|| domain("no iterate recorded"))?;
    Ok(FixedPoint { forcing, run, residual_history: residuals, trajectory_changes: changes, converged: false })
}
