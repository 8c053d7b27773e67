//! Discrete `L^p([0, π])`: midpoint-grid functions, norms, the duality
//! pairing, the duality map `J`, and the orthonormal sine basis.

use crate::error::{check_len, domain, Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

/// Smallest admissible θ-grid.
pub const MIN_THETA: usize = 8;

/// Midpoints `θ_j = (j + 1/2) π / n` of a uniform partition of `[0, π]`.
pub fn theta_nodes<T: Real>(n: usize) -> Vec<T> {
    let h = T::PI() / T::of(n);
    (0..n).map(|j| (T::of(j) + T::half()) * h).collect()
}

/// Conjugate exponent `p / (p - 1)`.
pub fn conjugate<T: Real>(p: T) -> T {
    p / (p - T::one())
}

/// Samples of a function on the midpoint θ-grid together with its Lebesgue exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<T> {
    values: Vec<T>,
    p: T,
}

impl<T: Real> GridFunction<T> {
    pub fn new(values: Vec<T>, p: T) -> Result<Self> {
        if values.len() < MIN_THETA {
            return Err(Error::Resolution(format!(
                "θ-grid has {} points, need at least {MIN_THETA}",
                values.len()
            )));
        }
        if !(p > T::one()) || !p.is_finite() {
            return Err(domain(format!("Lebesgue exponent p={p} must lie in (1, ∞)")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(domain("grid function has non-finite samples"));
        }
        Ok(Self { values, p })
    }

    pub fn from_fn(n_theta: usize, p: T, f: impl Fn(T) -> T) -> Result<Self> {
        Self::new(theta_nodes(n_theta).into_iter().map(f).collect(), p)
    }

    pub fn zeros(n_theta: usize, p: T) -> Result<Self> {
        Self::new(vec![T::zero(); n_theta], p)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Quadrature weight `π / N_θ`.
    pub fn step(&self) -> T {
        T::PI() / T::of(self.values.len())
    }

    pub fn norm(&self) -> T {
        lp_norm(self)
    }

    pub fn scaled(&self, s: T) -> Self {
        Self { values: self.values.iter().map(|&v| v * s).collect(), p: self.p }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        same_grid(self, other)?;
        Ok(Self { values: self.values.iter().zip(&other.values).map(|(&a, &b)| a - b).collect(), p: self.p })
    }
}

fn same_grid<T: Real>(a: &GridFunction<T>, b: &GridFunction<T>) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::GridMismatch(format!("θ-grids of size {} and {}", a.len(), b.len())));
    }
    Ok(())
}

/// `(Σ_j h |f_j|^p)^{1/p}`, the midpoint rule for `‖f‖_p`.
pub fn lp_norm<T: Real>(f: &GridFunction<T>) -> T {
    lp_norm_values(f.values(), f.p())
}

pub(crate) fn lp_norm_values<T: Real>(values: &[T], p: T) -> T {
    let h = T::PI() / T::of(values.len());
    // scale by the largest sample to keep |f|^p in range
    let m = values.iter().fold(T::zero(), |m, &v| m.max(v.abs()));
    if m == T::zero() {
        return T::zero();
    }
    let s: T = values.iter().map(|&v| (v.abs() / m).powf(p)).sum();
    m * (h * s).powf(T::one() / p)
}

/// `⟨v, v*⟩ = ∫ v v* dθ` by the midpoint rule.
///
/// The exponents must be conjugate; the Hilbert case pairs two `p = 2` functions.
pub fn pairing<T: Real>(v: &GridFunction<T>, vstar: &GridFunction<T>) -> Result<T> {
    same_grid(v, vstar)?;
    let defect = T::one() / v.p() + T::one() / vstar.p() - T::one();
    if defect.abs() > T::lit(1e3) * T::epsilon() {
        return Err(domain(format!("exponents {} and {} are not conjugate", v.p(), vstar.p())));
    }
    Ok(v.step() * v.values().iter().zip(vstar.values()).map(|(&a, &b)| a * b).sum::<T>())
}

/// `J(f) = ‖f‖_p^{2-p} |f|^{p-1} sgn f`, an element of `L^{p'}`.
pub fn duality_map<T: Real>(f: &GridFunction<T>) -> GridFunction<T> {
    GridFunction { values: duality_values(f.values(), f.p()), p: conjugate(f.p()) }
}

pub(crate) fn duality_values<T: Real>(values: &[T], p: T) -> Vec<T> {
    if p == T::two() {
        return values.to_vec();
    }
    let norm = lp_norm_values(values, p);
    if norm == T::zero() {
        return vec![T::zero(); values.len()];
    }
    let pm1 = p - T::one();
    // ‖f‖^{2-p}|f|^{p-1} = ‖f‖ (|f|/‖f‖)^{p-1}
    values.iter().map(|&v| norm * (v.abs() / norm).powf(pm1) * v.signum()).collect()
}

/// Coefficients against the basis `w_n(θ) = √(2/π) sin(nθ)`, `n = 1..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralState<T> {
    coeffs: Vec<T>,
}

impl<T: Real> SpectralState<T> {
    pub fn new(coeffs: Vec<T>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(domain("spectral state needs at least one mode"));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(domain("spectral state has non-finite coefficients"));
        }
        Ok(Self { coeffs })
    }

    pub fn zeros(n: usize) -> Self {
        Self { coeffs: vec![T::zero(); n.max(1)] }
    }

    /// The `n`-th basis vector (1-based mode index).
    pub fn mode(n_modes: usize, n: usize) -> Self {
        let mut s = Self::zeros(n_modes);
        s.coeffs[n - 1] = T::one();
        s
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Euclidean norm of the coefficients, equal to the `L²` norm of the expansion.
    pub fn l2_norm(&self) -> T {
        crate::linalg::norm2(&self.coeffs)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_len(self.len(), other.len())?;
        Ok(Self { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| a + b).collect() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_len(self.len(), other.len())?;
        Ok(Self { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| a - b).collect() })
    }

    pub fn scale(&self, s: T) -> Self {
        Self { coeffs: self.coeffs.iter().map(|&c| c * s).collect() }
    }

    pub(crate) fn from_raw(coeffs: Vec<T>) -> Self {
        Self { coeffs }
    }
}

/// Sampled sine basis: row `n-1` holds `w_n(θ_j)`.
#[derive(Debug, Clone)]
pub struct SineBasis<T> {
    samples: Matrix<T>,
}

impl<T: Real> SineBasis<T> {
    /// Requires `1 ≤ n_modes ≤ n_theta / 2` so the discrete basis stays orthonormal.
    pub fn new(n_modes: usize, n_theta: usize) -> Result<Self> {
        if n_theta < MIN_THETA {
            return Err(Error::Resolution(format!("θ-grid of {n_theta} points, need at least {MIN_THETA}")));
        }
        if n_modes == 0 || 2 * n_modes > n_theta {
            return Err(Error::Resolution(format!(
                "{n_modes} modes need N_θ ≥ {} (got {n_theta})",
                2 * n_modes.max(1)
            )));
        }
        let theta = theta_nodes::<T>(n_theta);
        let c = (T::two() / T::PI()).sqrt();
        let samples = Matrix::from_fn(n_modes, n_theta, |n, j| c * (T::of(n + 1) * theta[j]).sin());
        Ok(Self { samples })
    }

    pub fn n_modes(&self) -> usize {
        self.samples.rows()
    }

    pub fn n_theta(&self) -> usize {
        self.samples.cols()
    }

    pub fn step(&self) -> T {
        T::PI() / T::of(self.n_theta())
    }

    /// `w_n` as a grid function (1-based `n`).
    pub fn mode(&self, n: usize, p: T) -> Result<GridFunction<T>> {
        GridFunction::new(self.samples.row(n - 1).to_vec(), p)
    }

    pub fn samples(&self) -> &Matrix<T> {
        &self.samples
    }

    /// `c_n = ⟨f, w_n⟩`.
    pub fn to_basis(&self, f: &GridFunction<T>) -> Result<SpectralState<T>> {
        Ok(SpectralState::from_raw(self.project(f.values())?))
    }

    pub(crate) fn project(&self, values: &[T]) -> Result<Vec<T>> {
        if values.len() != self.n_theta() {
            return Err(Error::GridMismatch(format!(
                "grid function on {} points, basis sampled on {}",
                values.len(),
                self.n_theta()
            )));
        }
        let h = self.step();
        Ok(self.samples.matvec(values)?.into_iter().map(|c| c * h).collect())
    }

    /// `Σ c_n w_n` sampled on the grid, tagged with exponent `p`.
    pub fn from_basis(&self, s: &SpectralState<T>, p: T) -> Result<GridFunction<T>> {
        GridFunction::new(self.expand(s.coeffs())?, p)
    }

    pub(crate) fn expand(&self, coeffs: &[T]) -> Result<Vec<T>> {
        self.samples.tr_matvec(coeffs)
    }
}

/// `c_n = ⟨f, w_n⟩` for `n = 1..n_modes`.
pub fn to_basis<T: Real>(f: &GridFunction<T>, n_modes: usize) -> Result<SpectralState<T>> {
    SineBasis::new(n_modes, f.len())?.to_basis(f)
}

/// `Σ c_n w_n` on a grid of `n_theta` midpoints.
pub fn from_basis<T: Real>(s: &SpectralState<T>, n_theta: usize, p: T) -> Result<GridFunction<T>> {
    SineBasis::new(s.len(), n_theta)?.from_basis(s, p)
}

/// The duality map seen through the Galerkin space: `x ↦ P J(E x)`, where `E`
/// expands coefficients on the θ-grid and `P` projects back onto the basis.
///
/// It is the gradient of `x ↦ ½‖E x‖_p²`, hence monotone with a symmetric
/// positive semidefinite Jacobian. For `p = 2` it is the identity.
#[derive(Debug, Clone)]
pub struct GalerkinDuality<T> {
    basis: SineBasis<T>,
    p: T,
}

impl<T: Real> GalerkinDuality<T> {
    pub fn new(basis: SineBasis<T>, p: T) -> Result<Self> {
        if !(p >= T::two()) || !p.is_finite() {
            return Err(domain(format!("state exponent p={p} must be at least 2")));
        }
        Ok(Self { basis, p })
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn basis(&self) -> &SineBasis<T> {
        &self.basis
    }

    pub fn is_hilbert(&self) -> bool {
        self.p == T::two()
    }

    /// `‖E x‖_p`, the state-space norm of a coefficient vector.
    pub fn norm(&self, x: &[T]) -> Result<T> {
        if self.is_hilbert() {
            check_len(self.basis.n_modes(), x.len())?;
            return Ok(crate::linalg::norm2(x));
        }
        Ok(lp_norm_values(&self.basis.expand(x)?, self.p))
    }

    /// `‖E x*‖_{p'}`, the dual norm of a coefficient vector.
    pub fn dual_norm(&self, x: &[T]) -> Result<T> {
        if self.is_hilbert() {
            check_len(self.basis.n_modes(), x.len())?;
            return Ok(crate::linalg::norm2(x));
        }
        Ok(lp_norm_values(&self.basis.expand(x)?, conjugate(self.p)))
    }

    pub fn apply(&self, x: &[T]) -> Result<Vec<T>> {
        if self.is_hilbert() {
            check_len(self.basis.n_modes(), x.len())?;
            return Ok(x.to_vec());
        }
        let f = self.basis.expand(x)?;
        self.basis.project(&duality_values(&f, self.p))
    }

    /// Jacobian of [`apply`](Self::apply) at `x` (zero at `x = 0` for `p > 2`).
    pub fn jacobian(&self, x: &[T]) -> Result<Matrix<T>> {
        let n = self.basis.n_modes();
        check_len(n, x.len())?;
        if self.is_hilbert() {
            return Ok(Matrix::identity(n));
        }
        let f = self.basis.expand(x)?;
        let norm = lp_norm_values(&f, self.p);
        if norm == T::zero() {
            return Ok(Matrix::zeros(n, n));
        }
        let p = self.p;
        let h = self.basis.step();
        let w = self.basis.samples();
        // J'(f) = (p-1)‖f‖^{2-p} diag(|f|^{p-2}) + (2-p)‖f‖^{2-2p} h v vᵀ with v = |f|^{p-1} sgn f;
        // written in r = f/‖f‖ the norm factors cancel
        let r: Vec<T> = f.iter().map(|&v| v / norm).collect();
        let d: Vec<T> = r.iter().map(|&v| (p - T::one()) * v.abs().powf(p - T::two())).collect();
        let v: Vec<T> = r.iter().map(|&v| v.abs().powf(p - T::one()) * v.signum()).collect();
        let wv = w.matvec(&v)?;
        let rank_one = (T::two() - p) * h;
        let nt = self.basis.n_theta();
        let mut jac = Matrix::zeros(n, n);
        for a in 0..n {
            for b in 0..=a {
                let mut s = T::zero();
                for j in 0..nt {
                    s = s + w[(a, j)] * d[j] * w[(b, j)];
                }
                let val = h * (s + rank_one * wv[a] * wv[b]);
                jac[(a, b)] = val;
                jac[(b, a)] = val;
            }
        }
        Ok(jac)
    }
}
