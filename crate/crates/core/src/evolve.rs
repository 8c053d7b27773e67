//! Mild solutions by product integration of the weakly singular kernel
//! `(t-s)^{α-1} T_α(t-s)`, and an independent implicit L1 time stepper.

use crate::error::{check_len, domain, Error, Result};
use crate::fracops::{gamma, ml_two, TimeGrid};
use crate::lpspace::SpectralState;
use crate::quadrature::GaussLegendre;
use crate::scalar::Real;
use crate::spectral::SpectralModel;

/// Gauss-Legendre points per non-singular cell.
pub const CELL_POINTS: usize = 8;

/// States at every node of a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    grid: TimeGrid<T>,
    states: Vec<SpectralState<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn new(grid: TimeGrid<T>, states: Vec<SpectralState<T>>) -> Result<Self> {
        check_len(grid.len(), states.len())?;
        Ok(Self { grid, states })
    }

    pub fn grid(&self) -> &TimeGrid<T> {
        &self.grid
    }

    pub fn states(&self) -> &[SpectralState<T>] {
        &self.states
    }

    pub fn terminal(&self) -> &SpectralState<T> {
        self.states.last().expect("trajectory has at least three nodes")
    }

    /// `max_k ‖a_k - b_k‖₂`.
    pub fn max_gap(&self, other: &Self) -> Result<T> {
        check_len(self.states.len(), other.states.len())?;
        let mut m = T::zero();
        for (a, b) in self.states.iter().zip(&other.states) {
            m = m.max(a.sub(b)?.l2_norm());
        }
        Ok(m)
    }

    /// `max_k ‖q_k‖₂`.
    pub fn sup_norm(&self) -> T {
        self.states.iter().fold(T::zero(), |m, s| m.max(s.l2_norm()))
    }
}

/// Per-node samples must match the grid and the mode count.
pub(crate) fn check_series<T: Real>(series: &[SpectralState<T>], grid: &TimeGrid<T>, n_modes: usize) -> Result<()> {
    if series.len() != grid.len() {
        return Err(Error::GridMismatch(format!(
            "{} samples on a grid with {} nodes",
            series.len(),
            grid.len()
        )));
    }
    for s in series {
        check_len(n_modes, s.len())?;
    }
    Ok(())
}

/// Product-integration tables for one model on one uniform grid.
///
/// For each mode the kernel `κ(σ) = σ^{α-1} E_{α,α}(λ σ^α)` is integrated
/// exactly against the hat functions of the grid. The first cell uses the
/// closed-form moments `∫_0^h κ = h^α E_{α,α+1}(λh^α)` and
/// `∫_0^h (h-σ) κ = h^{α+1} E_{α,α+2}(λh^α)`; later cells use Gauss-Legendre,
/// the kernel being smooth away from `σ = 0`.
#[derive(Debug, Clone)]
pub struct Propagator<T> {
    grid: TimeGrid<T>,
    alpha: T,
    eigenvalues: Vec<T>,
    gl: GaussLegendre<T>,
    /// `s_mult[k][n] = E_α(λ_n t_k^α)`.
    s_mult: Vec<Vec<T>>,
    /// `older[n][l]`, `newer[n][l]`: weights of the two ends of a cell at offset `l`.
    older: Vec<Vec<T>>,
    newer: Vec<Vec<T>>,
    /// `e_gl[n][l][i] = E_{α,α}(λ_n σ^α)` at `σ = (l - 1 + x_i) h`, `l = 1..=K`.
    e_gl: Vec<Vec<[T; CELL_POINTS]>>,
}

impl<T: Real> Propagator<T> {
    pub fn new(model: &SpectralModel<T>, grid: &TimeGrid<T>) -> Result<Self> {
        if (grid.horizon() - model.horizon()).abs() > T::epsilon() * T::lit(16.0) * model.horizon() {
            return Err(Error::GridMismatch(format!(
                "grid horizon {} differs from model horizon {}",
                grid.horizon(),
                model.horizon()
            )));
        }
        Self::for_modes(model.alpha(), model.eigenvalues().to_vec(), grid)
    }

    /// Tables for explicit eigenvalues `λ_n ≤ 0` on `grid`.
    pub fn for_modes(alpha: T, eigenvalues: Vec<T>, grid: &TimeGrid<T>) -> Result<Self> {
        if !(alpha > T::zero() && alpha < T::one()) {
            return Err(domain(format!("order alpha={alpha} outside (0, 1)")));
        }
        let k_max = grid.steps();
        let h = grid.step();
        let gl = GaussLegendre::<T>::new(CELL_POINTS);
        let x = gl.nodes().to_vec();
        let w = gl.weights().to_vec();
        let ha = h.powf(alpha);

        let mut s_mult = vec![vec![T::zero(); eigenvalues.len()]; grid.len()];
        for (k, row) in s_mult.iter_mut().enumerate() {
            let ta = grid.node(k).powf(alpha);
            for (v, &l) in row.iter_mut().zip(&eigenvalues) {
                *v = ml_two(alpha, T::one(), l * ta)?;
            }
        }

        let mut older = Vec::with_capacity(eigenvalues.len());
        let mut newer = Vec::with_capacity(eigenvalues.len());
        let mut e_gl = Vec::with_capacity(eigenvalues.len());
        for &lambda in &eigenvalues {
            let mut e_rows = Vec::with_capacity(k_max + 1);
            e_rows.push([T::zero(); CELL_POINTS]);
            for l in 1..=k_max {
                let mut row = [T::zero(); CELL_POINTS];
                for (i, r) in row.iter_mut().enumerate() {
                    let sigma = (T::of(l - 1) + x[i]) * h;
                    *r = ml_two(alpha, alpha, lambda * sigma.powf(alpha))?;
                }
                e_rows.push(row);
            }
            let mut a = vec![T::zero(); k_max + 1];
            let mut b = vec![T::zero(); k_max + 1];
            let z = lambda * ha;
            let f1 = ha * ml_two(alpha, alpha + T::one(), z)?;
            let phi = ha * h * ml_two(alpha, alpha + T::two(), z)?;
            a[1] = (h * f1 - phi) / h;
            b[1] = phi / h;
            for l in 2..=k_max {
                let (mut sa, mut sb) = (T::zero(), T::zero());
                for i in 0..CELL_POINTS {
                    let sigma = (T::of(l - 1) + x[i]) * h;
                    let kappa = w[i] * sigma.powf(alpha - T::one()) * e_rows[l][i];
                    sa = sa + kappa * x[i];
                    sb = sb + kappa * (T::one() - x[i]);
                }
                a[l] = sa * h;
                b[l] = sb * h;
            }
            older.push(a);
            newer.push(b);
            e_gl.push(e_rows);
        }
        Ok(Self { grid: grid.clone(), alpha, eigenvalues, gl, s_mult, older, newer, e_gl })
    }

    pub fn grid(&self) -> &TimeGrid<T> {
        &self.grid
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn n_modes(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub(crate) fn gauss(&self) -> &GaussLegendre<T> {
        &self.gl
    }

    pub(crate) fn e_gl(&self, n: usize, l: usize) -> &[T; CELL_POINTS] {
        &self.e_gl[n][l]
    }

    /// `E_α(λ_n t_k^α)` for every mode.
    pub fn s_multipliers(&self, k: usize) -> &[T] {
        &self.s_mult[k]
    }

    /// Weight of sample `f_j` in `∫_0^{t_k} κ_n(t_k - s) f(s) ds`.
    pub fn weight(&self, n: usize, k: usize, j: usize) -> T {
        let mut w = T::zero();
        if j < k {
            w = w + self.older[n][k - j];
        }
        if j >= 1 && j <= k {
            w = w + self.newer[n][k - j + 1];
        }
        w
    }

    /// `S_α(t_k) x₀` at every node.
    pub fn free_response(&self, x0: &SpectralState<T>) -> Result<Vec<SpectralState<T>>> {
        check_len(self.n_modes(), x0.len())?;
        self.s_mult
            .iter()
            .map(|m| SpectralState::new(m.iter().zip(x0.coeffs()).map(|(&a, &b)| a * b).collect()))
            .collect()
    }

    /// `∫_0^{t_k} (t_k - s)^{α-1} T_α(t_k - s) f(s) ds` at every node, for
    /// piecewise-linear `f` through the samples.
    pub fn convolve(&self, f: &[SpectralState<T>]) -> Result<Vec<SpectralState<T>>> {
        check_series(f, &self.grid, self.n_modes())?;
        let nodes = self.grid.len();
        let mut out = vec![vec![T::zero(); self.n_modes()]; nodes];
        for n in 0..self.n_modes() {
            let (a, b) = (&self.older[n], &self.newer[n]);
            for k in 1..nodes {
                let mut s = T::zero();
                for j in 0..k {
                    s = s + a[k - j] * f[j].coeffs()[n] + b[k - j] * f[j + 1].coeffs()[n];
                }
                out[k][n] = s;
            }
        }
        out.into_iter().map(SpectralState::new).collect()
    }

    /// Mild solution with forcing `H g` and control `B u` sampled at the nodes.
    pub fn mild_solution(
        &self,
        x0: &SpectralState<T>,
        forcing: &[SpectralState<T>],
        control: &[SpectralState<T>],
    ) -> Result<Trajectory<T>> {
        check_series(control, &self.grid, self.n_modes())?;
        let rhs: Vec<SpectralState<T>> =
            forcing.iter().zip(control).map(|(f, u)| f.add(u)).collect::<Result<_>>()?;
        let free = self.free_response(x0)?;
        let conv = self.convolve(&rhs)?;
        let states = free.iter().zip(&conv).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Trajectory::new(self.grid.clone(), states)
    }
}

/// `q(t) = S_α(t)x₀ + ∫_0^t (t-s)^{α-1} T_α(t-s)[H g(s) + B u(s)] ds` on `grid`.
pub fn mild_solution<T: Real>(
    model: &SpectralModel<T>,
    grid: &TimeGrid<T>,
    x0: &SpectralState<T>,
    forcing: &[SpectralState<T>],
    control: &[SpectralState<T>],
) -> Result<Trajectory<T>> {
    Propagator::new(model, grid)?.mild_solution(x0, forcing, control)
}

/// Implicit L1 discretisation of `D^α q = A q + B u + H g`, mode by mode.
pub fn l1_reference<T: Real>(
    model: &SpectralModel<T>,
    grid: &TimeGrid<T>,
    x0: &SpectralState<T>,
    forcing: &[SpectralState<T>],
    control: &[SpectralState<T>],
) -> Result<Trajectory<T>> {
    l1_modes(model.alpha(), model.eigenvalues(), grid, x0, forcing, control)
}

pub(crate) fn l1_modes<T: Real>(
    alpha: T,
    eigenvalues: &[T],
    grid: &TimeGrid<T>,
    x0: &SpectralState<T>,
    forcing: &[SpectralState<T>],
    control: &[SpectralState<T>],
) -> Result<Trajectory<T>> {
    let n_modes = eigenvalues.len();
    check_len(n_modes, x0.len())?;
    check_series(forcing, grid, n_modes)?;
    check_series(control, grid, n_modes)?;
    let nodes = grid.len();
    let one_m = T::one() - alpha;
    let b: Vec<T> = (0..nodes).map(|m| T::of(m + 1).powf(one_m) - T::of(m).powf(one_m)).collect();
    let c = grid.step().powf(-alpha) / gamma(T::two() - alpha);
    let mut states = vec![vec![T::zero(); n_modes]; nodes];
    for (n, &lambda) in eigenvalues.iter().enumerate() {
        let mut y = vec![T::zero(); nodes];
        y[0] = x0.coeffs()[n];
        for k in 1..nodes {
            let rhs = forcing[k].coeffs()[n] + control[k].coeffs()[n];
            let mut history = T::zero();
            for j in 0..k - 1 {
                history = history + b[k - 1 - j] * (y[j + 1] - y[j]);
            }
            y[k] = (c * y[k - 1] - c * history + rhs) / (c - lambda);
        }
        for (k, v) in y.into_iter().enumerate() {
            states[k][n] = v;
        }
    }
    Trajectory::new(grid.clone(), states.into_iter().map(SpectralState::new).collect::<Result<_>>()?)
}
