//! Quadrature rules used by the special functions and operator assembly.
//!
//! Gauss-Legendre for smooth panels; double-exponential (tanh-sinh and
//! exp-sinh) rules for integrands with endpoint singularities or infinite
//! range.

use crate::scalar::Real;

/// Gauss-Legendre rule on `[0, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// Builds an `m`-point rule by Newton iteration on the Legendre recurrence.
    pub fn new(m: usize) -> Self {
        assert!(m >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0f64; m];
        let mut weights = vec![0.0f64; m];
        let mf = m as f64;
        for i in 0..m.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(m, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(m, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // map [-1, 1] onto [0, 1]
            nodes[i] = 0.5 * (1.0 - x);
            nodes[m - 1 - i] = 0.5 * (1.0 + x);
            weights[i] = 0.5 * w;
            weights[m - 1 - i] = 0.5 * w;
        }
        Self {
            nodes: nodes.into_iter().map(T::lit).collect(),
            weights: weights.into_iter().map(T::lit).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes in `[0, 1]`, ascending.
    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate(&self, a: T, b: T, mut f: impl FnMut(T) -> T) -> T {
        let w = b - a;
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &wt)| wt * f(a + w * x))
            .fold(T::zero(), |acc, v| acc + v)
            * w
    }

    /// Composite rule over consecutive breakpoints.
    pub fn integrate_panels(&self, breaks: &[T], mut f: impl FnMut(T) -> T) -> T {
        breaks
            .windows(2)
            .map(|p| self.integrate(p[0], p[1], &mut f))
            .fold(T::zero(), |a, b| a + b)
    }
}

fn legendre(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if m == 0 {
        return (1.0, 0.0);
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

const MIN_LEVEL: usize = 2;
/// Deepest refinement level with precomputed abscissae (step 2^-11).
pub const MAX_DE_LEVEL: usize = 10;

/// Abscissa `t`, and for both signs `±t` the transformed node and weight factor.
#[derive(Debug, Clone, Copy)]
struct DeNode {
    t: f64,
    x: [f64; 2],
    w: [f64; 2],
}

/// Nodes of a double-exponential rule, grouped by the level that introduces them.
struct DeTable {
    center: (f64, f64),
    levels: Vec<Vec<DeNode>>,
}

impl DeTable {
    fn build(t_max: f64, node: impl Fn(f64) -> DeNode) -> Self {
        let mut levels = Vec::with_capacity(MAX_DE_LEVEL + 1);
        for level in 0..=MAX_DE_LEVEL {
            let h = 0.5 / (1u64 << level) as f64;
            let stride = if level == 0 { 1 } else { 2 };
            let mut nodes = Vec::new();
            let mut k = 1u64;
            while (k as f64) * h <= t_max {
                nodes.push(node(k as f64 * h));
                k += stride;
            }
            levels.push(nodes);
        }
        let c = node(0.0);
        Self { center: (c.x[0], c.w[0]), levels }
    }
}

/// tanh-sinh on `[0, 1]`: `x` is the distance to the nearer endpoint (left for
/// negative `t`), `w` the weight factor `½ sech²(π/2 sinh t) π/2 cosh t`.
fn tanh_sinh_table() -> &'static DeTable {
    static TABLE: std::sync::OnceLock<DeTable> = std::sync::OnceLock::new();
    TABLE.get_or_init(|| {
        // beyond this the endpoint distance underflows in f64
        let t_max = (-f64::MIN_POSITIVE.ln() / std::f64::consts::PI).asinh();
        DeTable::build(t_max, |t| {
            let u = std::f64::consts::FRAC_PI_2 * t.sinh();
            let e = (-2.0 * u).exp();
            let near = e / (1.0 + e);
            let w = 0.5 * 4.0 * e / ((1.0 + e) * (1.0 + e)) * std::f64::consts::FRAC_PI_2 * t.cosh();
            DeNode { t, x: [near, near], w: [w, w] }
        })
    })
}

/// exp-sinh on `[0, ∞)`: `x = exp(π/2 sinh(±t))`, `w = x π/2 cosh t`.
fn exp_sinh_table() -> &'static DeTable {
    static TABLE: std::sync::OnceLock<DeTable> = std::sync::OnceLock::new();
    TABLE.get_or_init(|| {
        let t_max = (-f64::MIN_POSITIVE.ln() / std::f64::consts::FRAC_PI_2).asinh();
        DeTable::build(t_max, |t| {
            let c = std::f64::consts::FRAC_PI_2 * t.cosh();
            let up = (std::f64::consts::FRAC_PI_2 * t.sinh()).exp();
            let down = 1.0 / up;
            // growing nodes past the f64 range carry no weight
            let (up, wu) = if up.is_finite() && up * c < f64::MAX { (up, up * c) } else { (f64::INFINITY, 0.0) };
            DeNode { t, x: [up, down], w: [wu, down * c] }
        })
    })
}

/// Trapezoidal sums over a [`DeTable`], halving the step until successive
/// estimates agree.
///
/// On the first level each side is walked outward until terms drop below
/// roundoff relative to the running sum; later levels stop at the same
/// abscissa since the transformed integrand decays double-exponentially.
/// The error roughly squares with each halving, so refinement stops once the
/// change is below `√rel_tol`.
fn refine_de<T: Real>(
    table: &DeTable,
    rel_tol: T,
    max_level: usize,
    mut eval: impl FnMut(T, T, usize) -> T,
) -> T {
    let tiny = T::epsilon() * T::lit(1e-3);
    let stop = rel_tol.sqrt();
    let mut term = |x: f64, w: f64, side: usize| -> T {
        if w == 0.0 || x == 0.0 || !x.is_finite() {
            return T::zero();
        }
        let v = eval(T::lit(x), T::lit(w), side);
        if v.is_finite() {
            v
        } else {
            T::zero()
        }
    };
    let mut h = T::half();
    let mut sum = term(table.center.0, table.center.1, 0);
    let mut reach = [0.0f64; 2];
    for side in 0..2 {
        let mut quiet = 0;
        for node in &table.levels[0] {
            let v = term(node.x[side], node.w[side], side);
            sum = sum + v;
            reach[side] = node.t;
            quiet = if v.abs() <= tiny * sum.abs() { quiet + 1 } else { 0 };
            if quiet >= 2 {
                break;
            }
        }
    }
    let mut estimate = sum * h;
    for level in 1..=max_level.min(MAX_DE_LEVEL) {
        h = h * T::half();
        for node in &table.levels[level] {
            for side in 0..2 {
                if node.t <= reach[side] {
                    sum = sum + term(node.x[side], node.w[side], side);
                }
            }
            if node.t > reach[0] && node.t > reach[1] {
                break;
            }
        }
        let next = sum * h;
        let delta = (next - estimate).abs();
        estimate = next;
        if level >= MIN_LEVEL.min(max_level) && delta <= stop * estimate.abs() {
            break;
        }
    }
    estimate
}

/// Adaptive tanh-sinh quadrature on the finite interval `[a, b]`.
///
/// Abscissae are generated through their distance to the nearer endpoint so
/// that integrable endpoint singularities are sampled without cancellation.
/// The callback receives `(x, distance_to_a, distance_to_b)`.
pub fn tanh_sinh<T: Real>(a: T, b: T, rel_tol: T, max_level: usize, mut f: impl FnMut(T, T, T) -> T) -> T {
    if b <= a {
        return T::zero();
    }
    let width = b - a;
    // side 0 is t >= 0, nearer to b; side 1 mirrors it towards a
    refine_de(tanh_sinh_table(), rel_tol, max_level, |near, w, side| {
        let near_d = width * near;
        let far_d = width - near_d;
        let (da, db) = if side == 0 { (far_d, near_d) } else { (near_d, far_d) };
        if da <= T::zero() || db <= T::zero() {
            return T::zero();
        }
        width * w * f(a + da, da, db)
    })
}

/// Adaptive exp-sinh quadrature on `[a, ∞)`.
///
/// The callback receives `(x, x - a)`; the offset is passed separately so
/// that singularities at `a` are resolved without cancellation.
pub fn exp_sinh<T: Real>(a: T, rel_tol: T, max_level: usize, mut f: impl FnMut(T, T) -> T) -> T {
    refine_de(exp_sinh_table(), rel_tol, max_level, |d, w, _| w * f(a + d, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let gl = GaussLegendre::<f64>::new(8);
        // degree 15 is the exactness limit
        let v = gl.integrate(0.0, 2.0, |x| x.powi(15));
        assert!((v - 2f64.powi(16) / 16.0).abs() < 1e-9);
        let s: f64 = gl.weights().iter().sum();
        assert!((s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let v = tanh_sinh(0.0f64, 1.0, 1e-14, 10, |_, da, _| da.powf(-0.5));
        assert!((v - 2.0).abs() < 1e-12, "{v}");
        // ∫_0^1 ln(1 - x) dx = -1, singular at the right end
        let v = tanh_sinh(0.0f64, 1.0, 1e-14, 10, |_, _, db| db.ln());
        assert!((v + 1.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn exp_sinh_integrates_decaying_tails() {
        let v = exp_sinh(0.0f64, 1e-14, 10, |x, _| (-x).exp());
        assert!((v - 1.0).abs() < 1e-13, "{v}");
        let v = exp_sinh(0.0f64, 1e-14, 10, |x, _| x.powf(-0.3) * (-x * x).exp());
        let exact = 0.5 * statrs_gamma(0.35);
        assert!((v - exact).abs() < 1e-12, "{v} vs {exact}");
    }

    fn statrs_gamma(x: f64) -> f64 {
        crate::fracops::gamma(x)
    }
}
