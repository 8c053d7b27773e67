//! Diagonal heat model on `[0, π]` in sine coordinates: the generator
//! `A w_n = -n² w_n`, the solution families `S_α`, `T_α`, and the kernel
//! operators `B` and `H`.

use crate::error::{check_len, domain, Error, Result};
use crate::fracops::{ml_two, FracOrder};
use crate::linalg::Matrix;
use crate::lpspace::{theta_nodes, GalerkinDuality, SineBasis, SpectralState};
use crate::quadrature::GaussLegendre;
use crate::scalar::Real;

/// Default θ-grid resolution.
pub const DEFAULT_N_THETA: usize = 256;

/// Integral kernel on `[0, π]²`.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec<T> {
    /// `K(θ, ω) = ω (π - θ)` for `ω ≤ θ`, extended symmetrically.
    Green,
    /// `K(θ, ω) = min(θ, ω)`.
    Min,
    /// Row-major samples `K(θ_i, θ_j)` on the model's midpoint θ-grid.
    Table { n: usize, values: Vec<T> },
}

impl<T: Real> KernelSpec<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Green => "green",
            Self::Min => "min",
            Self::Table { .. } => "table",
        }
    }

    fn eval(&self, theta: T, omega: T) -> T {
        match self {
            Self::Green => {
                let (lo, hi) = if omega <= theta { (omega, theta) } else { (theta, omega) };
                lo * (T::PI() - hi)
            }
            Self::Min => theta.min(omega),
            Self::Table { .. } => unreachable!("tabulated kernels are assembled from samples"),
        }
    }

    /// Basis matrix `[⟨K w_n, w_m⟩]_{mn}`.
    fn assemble(&self, basis: &SineBasis<T>) -> Result<Matrix<T>> {
        let n_theta = basis.n_theta();
        match self {
            Self::Table { n, values } => {
                if *n != n_theta {
                    return Err(Error::GridMismatch(format!(
                        "kernel table on {n} points, model θ-grid has {n_theta}"
                    )));
                }
                let k = Matrix::from_row_major(*n, *n, values.clone())?;
                let scale = k.max_abs().max(T::min_positive_value());
                let defect = k.asymmetry();
                if defect > T::lit(1e-12) * scale {
                    return Err(Error::AsymmetricKernel { defect: (defect / scale).as_f64() });
                }
                let h = basis.step();
                let w = basis.samples();
                Ok(w.matmul(&k)?.matmul(&w.transpose())?.scale(h * h))
            }
            _ => {
                self.check_symmetry(n_theta)?;
                Ok(self.assemble_smooth(basis.n_modes()))
            }
        }
    }

    fn check_symmetry(&self, n_theta: usize) -> Result<()> {
        let theta = theta_nodes::<T>(n_theta.min(64));
        let mut defect = T::zero();
        for &a in &theta {
            for &b in &theta {
                defect = defect.max((self.eval(a, b) - self.eval(b, a)).abs());
            }
        }
        if defect > T::epsilon() * T::lit(100.0) {
            return Err(Error::AsymmetricKernel { defect: defect.as_f64() });
        }
        Ok(())
    }

    /// Composite Gauss-Legendre in both variables, splitting the inner
    /// integral at the kink `ω = θ`.
    fn assemble_smooth(&self, n_modes: usize) -> Matrix<T> {
        let gl = GaussLegendre::<T>::new(16);
        let pi = T::PI();
        let panels = (2 * n_modes).max(8);
        let width = pi / T::of(panels);
        let c = (T::two() / pi).sqrt();
        let w = |n: usize, x: T| c * (T::of(n + 1) * x).sin();

        let mut outer = Vec::with_capacity(panels * gl.len());
        for k in 0..panels {
            let a = width * T::of(k);
            for (&x, &wt) in gl.nodes().iter().zip(gl.weights()) {
                outer.push((a + width * x, wt * width));
            }
        }
        let mut bmat = Matrix::zeros(n_modes, n_modes);
        let mut inner = vec![T::zero(); n_modes];
        for &(theta, wt) in &outer {
            inner.iter_mut().for_each(|v| *v = T::zero());
            for (lo, hi) in [(T::zero(), theta), (theta, pi)] {
                let len = hi - lo;
                let pieces = ((len / width).ceil().to_usize().unwrap_or(1)).max(1);
                let step = len / T::of(pieces);
                for q in 0..pieces {
                    let a = lo + step * T::of(q);
                    for (&x, &iw) in gl.nodes().iter().zip(gl.weights()) {
                        let omega = a + step * x;
                        let kw = self.eval(theta, omega) * iw * step;
                        for (n, v) in inner.iter_mut().enumerate() {
                            *v = *v + kw * w(n, omega);
                        }
                    }
                }
            }
            for m in 0..n_modes {
                let wm = w(m, theta) * wt;
                for n in 0..n_modes {
                    bmat[(m, n)] = bmat[(m, n)] + wm * inner[n];
                }
            }
        }
        bmat
    }
}

/// Truncated spectral model of the controlled fractional heat equation.
#[derive(Debug, Clone)]
pub struct SpectralModel<T> {
    order: FracOrder<T>,
    horizon: T,
    eigenvalues: Vec<T>,
    bmat: Matrix<T>,
    hmat: Matrix<T>,
    duality: GalerkinDuality<T>,
    kernel_b: &'static str,
    kernel_h: &'static str,
}

/// Semigroup bound `sup ‖T(t)‖`; every `e^{-n² t}` is at most one.
pub const SEMIGROUP_BOUND: f64 = 1.0;

impl<T: Real> SpectralModel<T> {
    /// Heat model with `λ_n = -n²`, `n = 1..n_modes`. `kernel_h` defaults to `kernel_b`.
    pub fn build(
        n_modes: usize,
        order: FracOrder<T>,
        horizon: T,
        kernel_b: &KernelSpec<T>,
        kernel_h: Option<&KernelSpec<T>>,
        p: T,
        n_theta: usize,
    ) -> Result<Self> {
        if n_modes == 0 {
            return Err(domain("model needs at least one mode"));
        }
        if !(horizon > T::zero()) || !horizon.is_finite() {
            return Err(domain(format!("horizon {horizon} must be positive and finite")));
        }
        let basis = SineBasis::new(n_modes, n_theta)?;
        let bmat = kernel_b.assemble(&basis)?;
        let kernel_h = kernel_h.unwrap_or(kernel_b);
        let hmat = if kernel_h == kernel_b { bmat.clone() } else { kernel_h.assemble(&basis)? };
        let eigenvalues = (1..=n_modes).map(|n| -T::of(n * n)).collect();
        Ok(Self {
            order,
            horizon,
            eigenvalues,
            bmat,
            hmat,
            duality: GalerkinDuality::new(basis, p)?,
            kernel_b: kernel_b.name(),
            kernel_h: kernel_h.name(),
        })
    }

    /// Model from explicit eigenvalues and operator matrices, for synthetic studies.
    pub fn from_parts(
        eigenvalues: Vec<T>,
        order: FracOrder<T>,
        horizon: T,
        bmat: Matrix<T>,
        hmat: Matrix<T>,
        p: T,
        n_theta: usize,
    ) -> Result<Self> {
        let n = eigenvalues.len();
        if n == 0 {
            return Err(domain("model needs at least one mode"));
        }
        if eigenvalues.iter().any(|&l| !(l <= T::zero())) {
            return Err(domain("eigenvalues must be non-positive"));
        }
        for m in [&bmat, &hmat] {
            check_len(n, m.rows())?;
            check_len(n, m.cols())?;
        }
        Ok(Self {
            order,
            horizon,
            eigenvalues,
            bmat,
            hmat,
            duality: GalerkinDuality::new(SineBasis::new(n, n_theta)?, p)?,
            kernel_b: "table",
            kernel_h: "table",
        })
    }

    pub fn n_modes(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn order(&self) -> FracOrder<T> {
        self.order
    }

    pub fn alpha(&self) -> T {
        self.order.alpha()
    }

    pub fn horizon(&self) -> T {
        self.horizon
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn semigroup_bound(&self) -> T {
        T::lit(SEMIGROUP_BOUND)
    }

    pub fn p(&self) -> T {
        self.duality.p()
    }

    pub fn duality(&self) -> &GalerkinDuality<T> {
        &self.duality
    }

    pub fn basis(&self) -> &SineBasis<T> {
        self.duality.basis()
    }

    pub fn bmat(&self) -> &Matrix<T> {
        &self.bmat
    }

    pub fn hmat(&self) -> &Matrix<T> {
        &self.hmat
    }

    pub fn kernel_names(&self) -> (&'static str, &'static str) {
        (self.kernel_b, self.kernel_h)
    }

    /// Spectral norm of `B` in the coefficient (`L²`) geometry.
    pub fn b_norm(&self) -> T {
        self.bmat.svd().max()
    }

    pub fn h_norm(&self) -> T {
        self.hmat.svd().max()
    }

    fn check_time(&self, t: T) -> Result<()> {
        if !(t >= T::zero() && t <= self.horizon) {
            return Err(domain(format!("time {t} outside [0, {}]", self.horizon)));
        }
        Ok(())
    }

    /// `E_α(λ_n t^α)`, the diagonal of `S_α(t)`.
    pub fn s_multipliers(&self, t: T) -> Result<Vec<T>> {
        self.check_time(t)?;
        self.multipliers(T::one(), t)
    }

    /// `E_{α,α}(λ_n t^α)`, the diagonal of `T_α(t)`.
    pub fn t_multipliers(&self, t: T) -> Result<Vec<T>> {
        self.check_time(t)?;
        self.multipliers(self.alpha(), t)
    }

    pub(crate) fn multipliers(&self, beta: T, t: T) -> Result<Vec<T>> {
        let alpha = self.alpha();
        let ta = t.powf(alpha);
        self.eigenvalues.iter().map(|&l| ml_two(alpha, beta, l * ta)).collect()
    }

    pub fn apply_s_alpha(&self, t: T, x: &SpectralState<T>) -> Result<SpectralState<T>> {
        check_len(self.n_modes(), x.len())?;
        let m = self.s_multipliers(t)?;
        SpectralState::new(m.iter().zip(x.coeffs()).map(|(&a, &b)| a * b).collect())
    }

    pub fn apply_t_alpha(&self, t: T, x: &SpectralState<T>) -> Result<SpectralState<T>> {
        check_len(self.n_modes(), x.len())?;
        let m = self.t_multipliers(t)?;
        SpectralState::new(m.iter().zip(x.coeffs()).map(|(&a, &b)| a * b).collect())
    }

    /// `T_α(t)* = T_α(t)`: the diagonal family is self-adjoint.
    pub fn apply_t_alpha_star(&self, t: T, x: &SpectralState<T>) -> Result<SpectralState<T>> {
        self.apply_t_alpha(t, x)
    }

    pub fn apply_b(&self, u: &SpectralState<T>) -> Result<SpectralState<T>> {
        SpectralState::new(self.bmat.matvec(u.coeffs())?)
    }

    pub fn apply_b_star(&self, v: &SpectralState<T>) -> Result<SpectralState<T>> {
        SpectralState::new(self.bmat.tr_matvec(v.coeffs())?)
    }

    pub fn apply_h(&self, g: &SpectralState<T>) -> Result<SpectralState<T>> {
        SpectralState::new(self.hmat.matvec(g.coeffs())?)
    }

    pub fn apply_h_star(&self, v: &SpectralState<T>) -> Result<SpectralState<T>> {
        SpectralState::new(self.hmat.tr_matvec(v.coeffs())?)
    }

    /// Smallest singular values of `B` and, if given, of the Gramian, with the
    /// truncated approximate-controllability verdict.
    pub fn injectivity_diagnostic(&self, gramian: Option<&Matrix<T>>, rel_threshold: T) -> InjectivityReport<T> {
        let svd_b = self.bmat.svd();
        let b_ok = svd_b.min() > rel_threshold * svd_b.max();
        let (sigma_g, g_ok) = match gramian {
            Some(g) => {
                let s = g.svd();
                (Some(s.min()), s.min() > rel_threshold * s.max())
            }
            None => (None, true),
        };
        InjectivityReport {
            sigma_min_b: svd_b.min(),
            sigma_min_gramian: sigma_g,
            threshold: rel_threshold,
            controllable: b_ok && g_ok,
        }
    }
}

/// Result of [`SpectralModel::injectivity_diagnostic`].
#[derive(Debug, Clone, PartialEq)]
pub struct InjectivityReport<T> {
    pub sigma_min_b: T,
    pub sigma_min_gramian: Option<T>,
    /// Singular values must exceed this fraction of the largest one.
    pub threshold: T,
    pub controllable: bool,
}

impl<T: Real> InjectivityReport<T> {
    pub fn verdict(&self) -> &'static str {
        if self.controllable {
            "approximately controllable (truncated)"
        } else {
            "not approximately controllable (truncated)"
        }
    }
}

/// Default relative threshold for the injectivity verdict.
pub const INJECTIVITY_THRESHOLD: f64 = 1e-10;

#[cfg(test)]
mod tests {
    use super::*;

    fn model(kernel: KernelSpec<f64>, n: usize) -> SpectralModel<f64> {
        let order = FracOrder::new(0.75, 0.5).unwrap();
        SpectralModel::build(n, order, 1.0, &kernel, None, 2.0, 64).unwrap()
    }

    #[test]
    fn green_kernel_is_diagonal() {
        let m = model(KernelSpec::Green, 6);
        for i in 0..6 {
            for j in 0..6 {
                let expect = if i == j { std::f64::consts::PI / ((i + 1) * (i + 1)) as f64 } else { 0.0 };
                assert!((m.bmat()[(i, j)] - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn min_kernel_closed_form() {
        let m = model(KernelSpec::Min, 5);
        for i in 1..=5 {
            for j in 1..=5 {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                let diag = if i == j { 1.0 / (i * i) as f64 } else { 0.0 };
                let expect = diag + 2.0 * sign / (i * j) as f64;
                assert!((m.bmat()[(i - 1, j - 1)] - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn asymmetric_table_rejected() {
        let n = 16;
        let values: Vec<f64> = (0..n * n).map(|k| (k / n) as f64).collect();
        let order = FracOrder::new(0.75, 0.5).unwrap();
        let err = SpectralModel::build(2, order, 1.0, &KernelSpec::Table { n, values }, None, 2.0, n).unwrap_err();
        assert!(matches!(err, Error::AsymmetricKernel { .. }));
    }

    #[test]
    fn time_guard() {
        let m = model(KernelSpec::Green, 2);
        assert!(m.s_multipliers(1.5).is_err());
        assert!(m.t_multipliers(-0.1).is_err());
        let x = SpectralState::new(vec![1.0, 2.0]).unwrap();
        assert_eq!(m.apply_s_alpha(0.0, &x).unwrap(), x);
    }
}
