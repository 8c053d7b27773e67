//! The regularised resolvent `(εI + G J)⁻¹`, control synthesis, the
//! controlled trajectory map `Υ_ε`, and the final-state identity.

use crate::error::{check_len, domain, Error, Result};
use crate::evolve::{check_series, Propagator, Trajectory};
use crate::fracops::{gamma, FracOrder, TimeGrid};
use crate::gramian::{CrossGramian, GramianOperator};
use crate::linalg::{norm2, Matrix};
use crate::lpspace::{GalerkinDuality, SpectralState};
use crate::scalar::Real;
use crate::spectral::SpectralModel;

/// How [`regularized_resolvent`] solves `εx + G J(x) = y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResolventMethod {
    /// LU for `p = 2`, the iterative solver otherwise.
    #[default]
    Auto,
    /// Dense LU on `εI + G`; only valid for `p = 2`.
    Direct,
    /// Damped fixed point with a Newton fallback.
    Iterative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolventOptions<T> {
    /// Relative residual target `‖εx + G J(x) - y‖ ≤ tol ‖y‖`.
    pub tol: T,
    pub max_iter: usize,
    pub method: ResolventMethod,
}

impl<T: Real> Default for ResolventOptions<T> {
    fn default() -> Self {
        Self { tol: T::lit(1e-12), max_iter: 500, method: ResolventMethod::Auto }
    }
}

/// Outcome of a converged resolvent solve.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolventSolve<T> {
    pub epsilon: T,
    pub tol: T,
    pub max_iter: usize,
    /// Initial fixed-point relaxation `ω₀ = min(1, ε/(ε + σ_max(G)))`.
    pub relaxation: T,
    pub result: SpectralState<T>,
    /// Relative residual after each iteration.
    pub residual_history: Vec<T>,
    pub newton_steps: usize,
}

impl<T: Real> ResolventSolve<T> {
    pub fn iterations(&self) -> usize {
        self.residual_history.len()
    }

    pub fn residual(&self) -> T {
        self.residual_history.last().copied().unwrap_or(T::zero())
    }
}

/// Picard iterations without sufficient progress before switching to Newton.
const STAGNATION_WINDOW: usize = 20;
const MAX_BACKTRACK: usize = 40;

/// Solves `εx + G J(x) = y`.
///
/// `G` is positive semidefinite and `J` monotone, so `εI + G J` is injective
/// and every solution obeys `‖εx‖ ≤ ‖y‖` in the state norm.
pub fn regularized_resolvent<T: Real>(
    g: &GramianOperator<T>,
    duality: &GalerkinDuality<T>,
    epsilon: T,
    y: &SpectralState<T>,
    opts: &ResolventOptions<T>,
) -> Result<ResolventSolve<T>> {
    if !(epsilon > T::zero()) || !epsilon.is_finite() {
        return Err(domain(format!("epsilon={epsilon} must be positive")));
    }
    let n = g.n_modes();
    check_len(n, y.len())?;
    check_len(n, duality.basis().n_modes())?;
    let sigma_max = g.matrix().svd().max();
    let omega0 = (epsilon / (epsilon + sigma_max)).min(T::one());
    let mut out = ResolventSolve {
        epsilon,
        tol: opts.tol,
        max_iter: opts.max_iter,
        relaxation: omega0,
        result: SpectralState::zeros(n),
        residual_history: Vec::new(),
        newton_steps: 0,
    };
    let y_norm = norm2(y.coeffs());
    if y_norm == T::zero() {
        return Ok(out);
    }
    let direct = match opts.method {
        ResolventMethod::Auto => duality.is_hilbert(),
        ResolventMethod::Direct if duality.is_hilbert() => true,
        ResolventMethod::Direct => return Err(domain("direct resolvent solve needs p = 2")),
        ResolventMethod::Iterative => false,
    };
    let residual = |x: &[T]| -> Result<Vec<T>> {
        let gj = g.matrix().matvec(&duality.apply(x)?)?;
        Ok((0..n).map(|i| epsilon * x[i] + gj[i] - y.coeffs()[i]).collect())
    };

    if direct {
        let x = g.matrix().shift(epsilon).solve(y.coeffs())?;
        out.residual_history.push(norm2(&residual(&x)?) / y_norm);
        out.result = SpectralState::new(x)?;
        return Ok(out);
    }

    // J is homogeneous but not differentiable at 0, so for p > 2 start from the linear solve
    let mut x = if duality.is_hilbert() {
        vec![T::zero(); n]
    } else {
        g.matrix().shift(epsilon).solve(y.coeffs())?
    };
    let mut r = residual(&x)?;
    let mut res = norm2(&r) / y_norm;
    let mut omega = omega0;
    let mut newton = false;
    for _ in 0..opts.max_iter {
        if res <= opts.tol {
            break;
        }
        let (x_next, r_next, res_next) = if newton {
            out.newton_steps += 1;
            newton_step(g.matrix(), duality, epsilon, &x, &r, res, y_norm, &residual)?
        } else {
            // x ← (1-ω)x + ω(y - G J(x))/ε, i.e. x - (ω/ε) r
            let trial: Vec<T> = x.iter().zip(&r).map(|(&a, &b)| a - omega / epsilon * b).collect();
            let rt = residual(&trial)?;
            let rn = norm2(&rt) / y_norm;
            if rn > res {
                omega = omega * T::half();
                out.residual_history.push(res);
                // a rejected step still counts towards stagnation
                newton = newton || stagnating(&out.residual_history);
                continue;
            }
            (trial, rt, rn)
        };
        x = x_next;
        r = r_next;
        res = res_next;
        out.residual_history.push(res);
        newton = newton || stagnating(&out.residual_history);
    }
    if res > opts.tol {
        return Err(Error::NonConvergence {
            iterations: out.residual_history.len(),
            last: res.as_f64(),
            residual_history: out.residual_history.iter().map(|v| v.as_f64()).collect(),
        });
    }
    out.result = SpectralState::new(x)?;
    Ok(out)
}

/// Less than a halving of the residual over the last window.
fn stagnating<T: Real>(history: &[T]) -> bool {
    let it = history.len();
    it >= STAGNATION_WINDOW && history[it - 1] > T::half() * history[it - STAGNATION_WINDOW]
}

/// One Newton step on `εx + G J(x) - y` with backtracking on the residual norm.
#[allow(clippy::too_many_arguments)]
fn newton_step<T: Real>(
    g: &Matrix<T>,
    duality: &GalerkinDuality<T>,
    epsilon: T,
    x: &[T],
    r: &[T],
    res: T,
    y_norm: T,
    residual: &impl Fn(&[T]) -> Result<Vec<T>>,
) -> Result<(Vec<T>, Vec<T>, T)> {
    let jac = g.matmul(&duality.jacobian(x)?)?.shift(epsilon);
    let step = jac.solve(r)?;
    let mut t = T::one();
    for _ in 0..MAX_BACKTRACK {
        let trial: Vec<T> = x.iter().zip(&step).map(|(&a, &d)| a - t * d).collect();
        let rt = residual(&trial)?;
        let rn = norm2(&rt) / y_norm;
        if rn < res {
            return Ok((trial, rt, rn));
        }
        t = t * T::half();
    }
    // no descent at roundoff level; keep the iterate
    Ok((x.to_vec(), r.to_vec(), res))
}

/// Control synthesised for one `ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSynthesis<T> {
    pub epsilon: T,
    /// `d = z - S_α(a)x₀ - ∫_0^a (a-s)^{α-1} T_α(a-s) H g(s) ds`.
    pub deficiency: SpectralState<T>,
    /// `w = (εI + G J)⁻¹ d`.
    pub solve: ResolventSolve<T>,
    /// `J(w)`.
    pub dual: SpectralState<T>,
    /// `u(t_k) = B* T_α*(a - t_k) J(w)` in control coordinates.
    pub control: Vec<SpectralState<T>>,
}

impl<T: Real> ControlSynthesis<T> {
    /// `‖u‖_{L²(I, U)}` by the trapezoidal rule over the nodes.
    pub fn control_energy(&self, grid: &TimeGrid<T>) -> T {
        let sq: Vec<T> = self.control.iter().map(|u| u.l2_norm().powi(2)).collect();
        let h = grid.step();
        let inner: T = sq[1..sq.len() - 1].iter().copied().sum();
        ((inner + T::half() * (sq[0] + sq[sq.len() - 1])) * h).sqrt()
    }
}

/// A controlled trajectory `q_ε = Υ_ε(g)` with its control.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlledRun<T> {
    pub trajectory: Trajectory<T>,
    pub synthesis: ControlSynthesis<T>,
}

/// Regularised control problem for one model on one uniform grid.
///
/// The Gramian is assembled on the trajectory grid, and the control's effect
/// on the state is evaluated through the cross-Gramian rather than by
/// product integration of sampled `u`. Both use the same cell rule, so
/// `q_ε(a) = z - ε w` holds up to roundoff.
#[derive(Debug, Clone)]
pub struct ControlProblem<T> {
    model: SpectralModel<T>,
    prop: Propagator<T>,
    cross: CrossGramian<T>,
    gramian: GramianOperator<T>,
    /// `t_star[k][n] = E_{α,α}(λ_n (a - t_k)^α)`.
    t_star: Vec<Vec<T>>,
}

impl<T: Real> ControlProblem<T> {
    pub fn new(model: &SpectralModel<T>, steps: usize) -> Result<Self> {
        let grid = TimeGrid::new(model.horizon(), steps)?;
        let prop = Propagator::new(model, &grid)?;
        let cross = CrossGramian::new(model, &prop)?;
        let gramian = cross.gramian();
        let a = model.horizon();
        let t_star = grid
            .nodes()
            .iter()
            .map(|&t| model.t_multipliers((a - t).max(T::zero())))
            .collect::<Result<_>>()?;
        Ok(Self { model: model.clone(), prop, cross, gramian, t_star })
    }

    pub fn model(&self) -> &SpectralModel<T> {
        &self.model
    }

    pub fn grid(&self) -> &TimeGrid<T> {
        self.prop.grid()
    }

    pub fn propagator(&self) -> &Propagator<T> {
        &self.prop
    }

    pub fn gramian(&self) -> &GramianOperator<T> {
        &self.gramian
    }

    pub fn cross_gramian(&self) -> &CrossGramian<T> {
        &self.cross
    }

    /// `S_α(t_k)x₀ + ∫_0^{t_k} (t_k-s)^{α-1} T_α(t_k-s) H g(s) ds` at every node.
    pub fn uncontrolled(&self, x0: &SpectralState<T>, g: &[SpectralState<T>]) -> Result<Vec<SpectralState<T>>> {
        check_series(g, self.grid(), self.model.n_modes())?;
        let hg = g.iter().map(|v| self.model.apply_h(v)).collect::<Result<Vec<_>>>()?;
        let free = self.prop.free_response(x0)?;
        let conv = self.prop.convolve(&hg)?;
        free.iter().zip(&conv).map(|(a, b)| a.add(b)).collect()
    }

    pub fn deficiency(&self, z: &SpectralState<T>, x0: &SpectralState<T>, g: &[SpectralState<T>]) -> Result<SpectralState<T>> {
        let open = self.uncontrolled(x0, g)?;
        z.sub(open.last().expect("grid has nodes"))
    }

    pub fn synthesize_control(
        &self,
        epsilon: T,
        z: &SpectralState<T>,
        x0: &SpectralState<T>,
        g: &[SpectralState<T>],
        opts: &ResolventOptions<T>,
    ) -> Result<ControlSynthesis<T>> {
        let d = self.deficiency(z, x0, g)?;
        self.control_from_deficiency(epsilon, d, opts)
    }

    fn control_from_deficiency(
        &self,
        epsilon: T,
        d: SpectralState<T>,
        opts: &ResolventOptions<T>,
    ) -> Result<ControlSynthesis<T>> {
        let duality = self.model.duality();
        let solve = regularized_resolvent(&self.gramian, duality, epsilon, &d, opts)?;
        let dual = SpectralState::new(duality.apply(solve.result.coeffs())?)?;
        let control = self
            .t_star
            .iter()
            .map(|m| {
                let tj = SpectralState::new(m.iter().zip(dual.coeffs()).map(|(&a, &b)| a * b).collect())?;
                self.model.apply_b_star(&tj)
            })
            .collect::<Result<_>>()?;
        Ok(ControlSynthesis { epsilon, deficiency: d, solve, dual, control })
    }

    /// `Υ_ε(g)`: the trajectory driven by `x₀`, the forcing `H g` and the synthesised control.
    pub fn upsilon(
        &self,
        epsilon: T,
        z: &SpectralState<T>,
        x0: &SpectralState<T>,
        g: &[SpectralState<T>],
        opts: &ResolventOptions<T>,
    ) -> Result<ControlledRun<T>> {
        let open = self.uncontrolled(x0, g)?;
        let d = z.sub(open.last().expect("grid has nodes"))?;
        let synthesis = self.control_from_deficiency(epsilon, d, opts)?;
        let response = self.cross.response(&synthesis.dual)?;
        let states = open.iter().zip(&response).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Ok(ControlledRun { trajectory: Trajectory::new(self.grid().clone(), states)?, synthesis })
    }

    /// `‖q_ε(a) - (z - ε w)‖` in the state norm.
    pub fn final_state_identity(&self, run: &ControlledRun<T>, z: &SpectralState<T>) -> Result<T> {
        let w = &run.synthesis.solve.result;
        let predicted = z.sub(&w.scale(run.synthesis.epsilon))?;
        self.state_norm(&run.trajectory.terminal().sub(&predicted)?)
    }

    /// `‖q_ε(a) - z‖` in the state norm.
    pub fn terminal_miss(&self, run: &ControlledRun<T>, z: &SpectralState<T>) -> Result<T> {
        self.state_norm(&run.trajectory.terminal().sub(z)?)
    }

    /// `‖x‖_X` of a coefficient vector.
    pub fn state_norm(&self, x: &SpectralState<T>) -> Result<T> {
        self.model.duality().norm(x.coeffs())
    }
}

/// `Θ = (a^{β(α-1)+1} / (β(α-1)+1))^{1-α₁} ‖η‖_{L^{1/α₁}}` with `β = 1/(1-α₁)`.
pub fn theta_bound<T: Real>(order: FracOrder<T>, a: T, eta_norm: T) -> T {
    let alpha = order.alpha();
    let alpha1 = order.alpha1();
    let beta = T::one() / (T::one() - alpha1);
    let e = beta * (alpha - T::one()) + T::one();
    (a.powf(e) / e).powf(T::one() - alpha1) * eta_norm
}

/// Constants of the a-priori estimates, in the Hilbert (`p = 2`) geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AprioriBounds<T> {
    /// `N₀`, bounding `sup_t ‖q_ε(t)‖`.
    pub trajectory: T,
    /// Bound on `‖u_ε‖_{L²(I, U)}`.
    pub control_energy: T,
}

/// `N₀ = M‖x₀‖ + (M/Γ(α))‖H‖Θ + (1/ε)(M²‖B‖²/Γ(α)²)(a^α/α)[‖z‖ + M‖x₀‖ + (M/Γ(α))‖H‖Θ]`
/// and the matching control bound `(1/ε)(M/Γ(α))‖B‖[‖z‖ + M‖x₀‖ + (M/Γ(α))‖H‖Θ]√a`.
///
/// The operator norms are spectral norms of the coefficient matrices, so the
/// bounds apply for `p = 2` only.
pub fn a_priori_bounds<T: Real>(model: &SpectralModel<T>, epsilon: T, z_norm: T, x0_norm: T, theta: T) -> Result<AprioriBounds<T>> {
    if !model.duality().is_hilbert() {
        return Err(domain("a-priori bounds are stated in the p = 2 geometry"));
    }
    let m = model.semigroup_bound();
    let alpha = model.alpha();
    let a = model.horizon();
    let ga = gamma(alpha);
    let b = model.b_norm();
    let forcing = m / ga * model.h_norm() * theta;
    let reach = z_norm + m * x0_norm + forcing;
    let gram = m * m * b * b / (ga * ga) * a.powf(alpha) / alpha;
    Ok(AprioriBounds {
        trajectory: m * x0_norm + forcing + gram * reach / epsilon,
        control_energy: m / ga * b * reach / epsilon * a.sqrt(),
    })
}
