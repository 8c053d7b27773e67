//! The controllability Gramian
//! `R_α(t) = ∫_0^t (t-s)^{α-1} T_α(t-s) B B* T_α*(a-s) ds` in basis coordinates.
//!
//! All assembly goes through one cell rule on a uniform grid: Gauss-Legendre
//! on cells away from the singularity, and on the first cell the substitution
//! `σ = h u^{1/α}`, which absorbs the weight `σ^{α-1}`. The cross-Gramian at
//! the last node is the Gramian itself, which makes the final-state identity
//! of the regularised control exact up to roundoff.

use crate::error::{check_len, Error, Result};
use crate::evolve::{Propagator, CELL_POINTS};
use crate::fracops::{ml_two, TimeGrid};
use crate::linalg::{dot, symmetric_eigen, Matrix};
use crate::lpspace::SpectralState;
use crate::quadrature::GaussLegendre;
use crate::scalar::Real;
use crate::spectral::SpectralModel;

/// Smallest accepted assembly resolution.
pub const MIN_QUAD_STEPS: usize = 16;

/// Assembled Gramian `R_α(a)` acting on dual coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct GramianOperator<T> {
    matrix: Matrix<T>,
    a: T,
    quad_steps: usize,
}

impl<T: Real> GramianOperator<T> {
    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn horizon(&self) -> T {
        self.a
    }

    pub fn quad_steps(&self) -> usize {
        self.quad_steps
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.rows()
    }

    pub fn apply(&self, x: &SpectralState<T>) -> Result<SpectralState<T>> {
        SpectralState::new(self.matrix.matvec(x.coeffs())?)
    }

    /// `⟨x, G x⟩`.
    pub fn quadratic_form(&self, x: &SpectralState<T>) -> Result<T> {
        Ok(dot(x.coeffs(), self.apply(x)?.coeffs()))
    }
}

/// Cell tables shared by the Gramian and the cross-Gramian.
struct Cells<T> {
    h: T,
    /// First-cell factor `h^α / α` times the Gauss weights.
    w_sing: [T; CELL_POINTS],
    /// `w_reg[l][i] = h w_i σ_i^{α-1}` on cell `l ≥ 2`.
    w_reg: Vec<[T; CELL_POINTS]>,
}

impl<T: Real> Cells<T> {
    fn new(alpha: T, grid: &TimeGrid<T>, gl: &GaussLegendre<T>) -> Self {
        let h = grid.step();
        let scale = h.powf(alpha) / alpha;
        let w_sing = std::array::from_fn(|i| scale * gl.weights()[i]);
        let mut w_reg = vec![[T::zero(); CELL_POINTS]; grid.steps() + 1];
        for (l, row) in w_reg.iter_mut().enumerate().skip(2) {
            for (i, w) in row.iter_mut().enumerate() {
                let sigma = (T::of(l - 1) + gl.nodes()[i]) * h;
                *w = h * gl.weights()[i] * sigma.powf(alpha - T::one());
            }
        }
        Self { h, w_sing, w_reg }
    }
}

/// `E_{α,α}(λ σ^α)` at `σ = h (m' + u_i^{1/α})`, the first-cell abscissae shifted by `m'` cells.
fn singular_row<T: Real>(alpha: T, lambda: T, h: T, shift: usize, gl: &GaussLegendre<T>) -> Result<[T; CELL_POINTS]> {
    let mut row = [T::zero(); CELL_POINTS];
    for (i, r) in row.iter_mut().enumerate() {
        let sigma = h * (T::of(shift) + gl.nodes()[i].powf(T::one() / alpha));
        *r = ml_two(alpha, alpha, lambda * sigma.powf(alpha))?;
    }
    Ok(row)
}

/// `C = B B*`, symmetric by construction.
fn control_kernel<T: Real>(model: &SpectralModel<T>) -> Matrix<T> {
    let b = model.bmat();
    let n = b.rows();
    Matrix::from_fn(n, n, |m, k| dot(b.row(m), b.row(k)))
}

/// Assembles `R_α(a)` on a uniform grid of `quad_steps` cells.
pub fn assemble_gramian<T: Real>(model: &SpectralModel<T>, quad_steps: usize) -> Result<GramianOperator<T>> {
    if quad_steps < MIN_QUAD_STEPS {
        return Err(Error::Resolution(format!(
            "Gramian quadrature needs at least {MIN_QUAD_STEPS} steps, got {quad_steps}"
        )));
    }
    let grid = TimeGrid::new(model.horizon(), quad_steps)?;
    let prop = Propagator::for_modes(model.alpha(), model.eigenvalues().to_vec(), &grid)?;
    let tables = CellTables::new(model, &prop, 0..1)?;
    Ok(GramianOperator { matrix: tables.matrix_at(grid.steps()), a: model.horizon(), quad_steps })
}

/// Cell rule data for `R(t_k)` with the shifts `m' = K - k` that were requested.
struct CellTables<T> {
    steps: usize,
    kernel: Matrix<T>,
    w_reg: Vec<[T; CELL_POINTS]>,
    w_sing: [T; CELL_POINTS],
    /// `e_cells[n][l][i]` over the propagator's cells.
    e_cells: Vec<Vec<[T; CELL_POINTS]>>,
    /// `e_sing[n][m'][i]`.
    e_sing: Vec<Vec<Option<[T; CELL_POINTS]>>>,
}

impl<T: Real> CellTables<T> {
    fn new(model: &SpectralModel<T>, prop: &Propagator<T>, shifts: std::ops::Range<usize>) -> Result<Self> {
        check_len(model.n_modes(), prop.n_modes())?;
        let grid = prop.grid();
        let alpha = prop.alpha();
        let gl = prop.gauss();
        let cells = Cells::new(alpha, grid, gl);
        let steps = grid.steps();
        let mut e_cells = Vec::with_capacity(prop.n_modes());
        let mut e_sing = Vec::with_capacity(prop.n_modes());
        for (n, &lambda) in prop.eigenvalues().iter().enumerate() {
            e_cells.push((0..=steps).map(|l| *prop.e_gl(n, l)).collect());
            let mut rows = vec![None; steps];
            for m in shifts.clone() {
                rows[m] = Some(singular_row(alpha, lambda, cells.h, m, gl)?);
            }
            e_sing.push(rows);
        }
        Ok(Self { steps, kernel: control_kernel(model), w_reg: cells.w_reg, w_sing: cells.w_sing, e_cells, e_sing })
    }

    /// `R(t_k)`, `1 ≤ k ≤ K`, for a node whose shift was built.
    fn matrix_at(&self, k: usize) -> Matrix<T> {
        let shift = self.steps - k;
        let n = self.kernel.rows();
        let mut out = Matrix::zeros(n, n);
        for m in 0..n {
            let near = self.e_sing[m][0].expect("unshifted first-cell row is always built");
            for j in 0..n {
                let far = self.e_sing[j][shift].expect("shift requested at construction");
                let mut s = T::zero();
                for i in 0..CELL_POINTS {
                    s = s + self.w_sing[i] * (near[i] * far[i]);
                }
                for l in 2..=k {
                    let (a, b, w) = (&self.e_cells[m][l], &self.e_cells[j][l + shift], &self.w_reg[l]);
                    for i in 0..CELL_POINTS {
                        s = s + w[i] * (a[i] * b[i]);
                    }
                }
                out[(m, j)] = self.kernel[(m, j)] * s;
            }
        }
        out
    }
}

/// `R(t_k) = ∫_0^{t_k} (t_k-s)^{α-1} T_α(t_k-s) B B* T_α*(a-s) ds` at every node.
///
/// Applied to `J(w)` this is the response of the mild solution to the control
/// `u(s) = B* T_α*(a-s) J(w)`, integrated without interpolating `u`.
#[derive(Debug, Clone)]
pub struct CrossGramian<T> {
    grid: TimeGrid<T>,
    r: Vec<Matrix<T>>,
}

impl<T: Real> CrossGramian<T> {
    /// Tabulates `R(t_k)` for every node of the propagator's grid.
    pub fn new(model: &SpectralModel<T>, prop: &Propagator<T>) -> Result<Self> {
        let steps = prop.grid().steps();
        let tables = CellTables::new(model, prop, 0..steps)?;
        let n = model.n_modes();
        let r = std::iter::once(Matrix::zeros(n, n)).chain((1..=steps).map(|k| tables.matrix_at(k))).collect();
        Ok(Self { grid: prop.grid().clone(), r })
    }

    pub fn grid(&self) -> &TimeGrid<T> {
        &self.grid
    }

    /// `R(t_k)`; `R(t_0) = 0`.
    pub fn at(&self, k: usize) -> &Matrix<T> {
        &self.r[k]
    }

    /// The Gramian `R(t_K)` on this grid.
    pub fn gramian(&self) -> GramianOperator<T> {
        GramianOperator {
            matrix: self.r[self.grid.steps()].clone(),
            a: self.grid.horizon(),
            quad_steps: self.grid.steps(),
        }
    }

    /// `R(t_k) v` at every node.
    pub fn response(&self, v: &SpectralState<T>) -> Result<Vec<SpectralState<T>>> {
        self.r.iter().map(|m| SpectralState::new(m.matvec(v.coeffs())?)).collect()
    }
}

/// Outcome of [`verify_gramian`].
#[derive(Debug, Clone, PartialEq)]
pub struct GramianReport<T> {
    /// `max |G - Gᵀ|`.
    pub symmetry_defect: T,
    pub min_eigenvalue: T,
    /// Worst relative gap between `⟨x, G x⟩` and the direct integral over the
    /// supplied directions.
    pub quadratic_form_error: T,
    /// Spectral norm of `G`.
    pub norm: T,
    /// `M² ‖B‖² a^α / (Γ(α)² α)`.
    pub norm_bound: T,
}

impl<T: Real> GramianReport<T> {
    /// `norm_bound - norm`; negative means the bound is violated.
    pub fn bound_slack(&self) -> T {
        self.norm_bound - self.norm
    }
}

/// Geometric panels in `u = (σ/a)^α` for the direct quadratic-form integral.
const VERIFY_PANELS: i32 = 24;
const VERIFY_POINTS: usize = 20;

/// Checks symmetry, positivity, the norm bound, and the identity
/// `⟨x, G x⟩ = ∫_0^a σ^{α-1} ‖B* T_α*(σ) x‖² dσ` on each direction.
///
/// The integral is evaluated independently of the assembly rule, through
/// `u = (σ/a)^α` and composite Gauss-Legendre on geometrically graded panels.
pub fn verify_gramian<T: Real>(
    g: &GramianOperator<T>,
    model: &SpectralModel<T>,
    directions: &[SpectralState<T>],
) -> Result<GramianReport<T>> {
    let n = model.n_modes();
    check_len(n, g.n_modes())?;
    let alpha = model.alpha();
    let a = g.horizon();
    let aa = a.powf(alpha);

    let gl = GaussLegendre::<T>::new(VERIFY_POINTS);
    let mut breaks = vec![T::zero()];
    breaks.extend((0..VERIFY_PANELS).rev().map(|j| T::two().powi(-j)));
    let mut nodes = Vec::new();
    for p in breaks.windows(2) {
        for (&x, &w) in gl.nodes().iter().zip(gl.weights()) {
            nodes.push((p[0] + (p[1] - p[0]) * x, w * (p[1] - p[0])));
        }
    }
    let mut e = Vec::with_capacity(nodes.len());
    for &(u, _) in &nodes {
        let row = model
            .eigenvalues()
            .iter()
            .map(|&l| ml_two(alpha, alpha, l * aa * u))
            .collect::<Result<Vec<T>>>()?;
        e.push(row);
    }

    let mut worst = T::zero();
    for x in directions {
        check_len(n, x.len())?;
        let mut direct = T::zero();
        for (row, &(_, w)) in e.iter().zip(&nodes) {
            let tx: Vec<T> = row.iter().zip(x.coeffs()).map(|(&a, &b)| a * b).collect();
            let v = model.bmat().tr_matvec(&tx)?;
            direct = direct + w * dot(&v, &v);
        }
        direct = direct * aa / alpha;
        let assembled = g.quadratic_form(x)?;
        let scale = direct.abs().max(T::min_positive_value());
        worst = worst.max((assembled - direct).abs() / scale);
    }

    let (eig, _) = symmetric_eigen(g.matrix())?;
    let m = model.semigroup_bound();
    let b = model.b_norm();
    let gamma = crate::fracops::gamma(alpha);
    Ok(GramianReport {
        symmetry_defect: g.matrix().asymmetry(),
        min_eigenvalue: eig[0],
        quadratic_form_error: worst,
        norm: g.matrix().svd().max(),
        norm_bound: m * m * b * b * aa / (gamma * gamma * alpha),
    })
}

/// Smallest singular value of the assembled Gramian.
pub fn gramian_min_singular<T: Real>(g: &GramianOperator<T>) -> T {
    g.matrix().svd().min()
}
