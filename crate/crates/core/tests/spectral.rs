use std::f64::consts::PI;

use fracctl::fracops::{gamma, ml_one, wright_density, FracOrder};
use fracctl::linalg::dot;
use fracctl::lpspace::SpectralState;
use fracctl::quadrature::exp_sinh;
use fracctl::spectral::{KernelSpec, SpectralModel, INJECTIVITY_THRESHOLD};
use fracctl::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn model(n: usize, alpha: f64, kernel: KernelSpec<f64>) -> SpectralModel<f64> {
    let order = FracOrder::new(alpha, alpha / 2.0).unwrap();
    SpectralModel::build(n, order, 1.0, &kernel, None, 2.0, 256).unwrap()
}

fn green(t: f64, s: f64) -> f64 {
    if s <= t { s * (PI - t) } else { (PI - s) * t }
}

/// Composite Simpson with `m` (even) panels.
fn simpson(a: f64, b: f64, m: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for i in 1..m {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// `⟨K w_n, w_m⟩` by nested Simpson, the inner integral split at the kink.
fn brute_force_entry(m: usize, n: usize) -> f64 {
    let w = |k: usize, x: f64| (2.0 / PI).sqrt() * (k as f64 * x).sin();
    simpson(0.0, PI, 600, |t| {
        let inner = simpson(0.0, t, 300, |s| green(t, s) * w(n, s)) + simpson(t, PI, 300, |s| green(t, s) * w(n, s));
        w(m, t) * inner
    })
}

#[test]
fn green_kernel_is_diagonal_with_pi_over_n_squared() {
    let md = model(6, 0.75, KernelSpec::Green);
    let b = md.bmat();
    for m in 0..6 {
        for n in 0..6 {
            let expect = if m == n { PI / ((n + 1) * (n + 1)) as f64 } else { 0.0 };
            assert!((b[(m, n)] - expect).abs() < 1e-8, "({m},{n}) {}", b[(m, n)]);
        }
    }
    for (m, n) in [(1, 1), (3, 3), (1, 2), (2, 4)] {
        let bf = brute_force_entry(m, n);
        assert!((b[(m - 1, n - 1)] - bf).abs() < 1e-8, "({m},{n}) {} vs {bf}", b[(m - 1, n - 1)]);
    }
}

#[test]
fn min_kernel_matches_closed_form() {
    // u = K w_n solves u'' = -w_n, u(0) = 0, u'(π) = 0, giving δ_mn/n² + 2(-1)^{m+n}/(mn)
    let md = model(5, 0.75, KernelSpec::Min);
    for m in 1..=5 {
        for n in 1..=5 {
            let (mf, nf) = (m as f64, n as f64);
            let sign = if (m + n) % 2 == 0 { 1.0 } else { -1.0 };
            let expect = if m == n { 1.0 / (nf * nf) } else { 0.0 } + 2.0 * sign / (mf * nf);
            let got = md.bmat()[(m - 1, n - 1)];
            assert!((got - expect).abs() < 1e-8, "({m},{n}) {got} vs {expect}");
        }
    }
}

#[test]
fn single_mode_model() {
    let md = model(1, 0.75, KernelSpec::Min);
    assert_eq!(md.bmat().rows(), 1);
    assert_eq!(md.bmat().asymmetry(), 0.0);
}

#[test]
fn asymmetric_table_is_rejected() {
    let n = 16;
    let values: Vec<f64> = (0..n * n).map(|k| (k / n) as f64 * 0.1 + (k % n) as f64 * 0.3).collect();
    let order = FracOrder::new(0.75, 0.3).unwrap();
    let r = SpectralModel::build(2, order, 1.0, &KernelSpec::Table { n, values }, None, 2.0, n);
    assert!(matches!(r, Err(Error::AsymmetricKernel { .. })));
}

#[test]
fn s_alpha_multipliers() {
    let md = model(3, 0.75, KernelSpec::Green);
    let x = SpectralState::new(vec![1.0, -2.0, 0.5]).unwrap();
    assert_eq!(md.apply_s_alpha(0.0, &x).unwrap(), x);
    let w1 = SpectralState::mode(3, 1);
    let y = md.apply_s_alpha(1.0, &w1).unwrap();
    assert!((y.coeffs()[0] - ml_one(0.75, -1.0).unwrap()).abs() < 1e-14);
    assert!(md.apply_s_alpha(1.5, &x).is_err());
    assert!(md.apply_s_alpha(-0.1, &x).is_err());
}

#[test]
fn t_alpha_at_zero_and_subordination() {
    let alpha = 0.75;
    let md = model(3, alpha, KernelSpec::Green);
    let x = SpectralState::new(vec![1.0, -2.0, 0.5]).unwrap();
    let y = md.apply_t_alpha(0.0, &x).unwrap();
    for (a, b) in y.coeffs().iter().zip(x.coeffs()) {
        assert!((a - b / gamma(alpha)).abs() < 1e-14);
    }
    // α ∫_0^∞ τ ξ_α(τ) e^{-4 · 0.5^α τ} dτ
    let rate = 4.0 * 0.5f64.powf(alpha);
    let oracle = alpha * exp_sinh(0.0, 1e-12, 9, |tau, _| tau * wright_density(alpha, tau).unwrap() * (-rate * tau).exp());
    let got = md.t_multipliers(0.5).unwrap()[1];
    assert!((got - oracle).abs() < 1e-6, "{got} vs {oracle}");
}

#[test]
fn multipliers_agree_with_subordination_integrals() {
    for &alpha in &[0.6, 0.75, 0.9] {
        let md = model(4, alpha, KernelSpec::Green);
        for &t in &[0.05, 0.3, 1.0] {
            let s = md.s_multipliers(t).unwrap();
            let tm = md.t_multipliers(t).unwrap();
            for (n, &lambda) in md.eigenvalues().iter().enumerate() {
                let rate = -lambda * t.powf(alpha);
                let xi = |tau: f64| wright_density(alpha, tau).unwrap() * (-rate * tau).exp();
                let s_oracle = exp_sinh(0.0, 1e-12, 9, |tau, _| xi(tau));
                let t_oracle = alpha * exp_sinh(0.0, 1e-12, 9, |tau, _| tau * xi(tau));
                assert!((s[n] - s_oracle).abs() < 1e-6, "α={alpha} t={t} n={n}");
                assert!((tm[n] - t_oracle).abs() < 1e-6, "α={alpha} t={t} n={n}");
            }
        }
    }
}

#[test]
fn multipliers_are_continuous_in_time() {
    let md = model(8, 0.75, KernelSpec::Green);
    let t = 0.4;
    let base = md.s_multipliers(t).unwrap();
    let mut prev = f64::INFINITY;
    for k in 1..8 {
        let dt = 0.1 / 4f64.powi(k);
        let near = md.s_multipliers(t + dt).unwrap();
        let gap = base.iter().zip(&near).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(gap < prev);
        prev = gap;
    }
    assert!(prev < 1e-5);
}

#[test]
fn b_applied_to_a_mode() {
    let md = model(5, 0.75, KernelSpec::Green);
    let y = md.apply_b(&SpectralState::mode(5, 3)).unwrap();
    for (i, &c) in y.coeffs().iter().enumerate() {
        let expect = if i == 2 { PI / 9.0 } else { 0.0 };
        assert!((c - expect).abs() < 1e-8);
    }
    let z = md.apply_b(&SpectralState::zeros(5)).unwrap();
    assert!(z.coeffs().iter().all(|&v| v == 0.0));
    assert!(matches!(md.apply_b(&SpectralState::zeros(4)), Err(Error::Dimension { .. })));
}

#[test]
fn injectivity_diagnostic_verdicts() {
    let md = model(8, 0.75, KernelSpec::Green);
    let r = md.injectivity_diagnostic(None, INJECTIVITY_THRESHOLD);
    assert!((r.sigma_min_b - PI / 64.0).abs() < 1e-8);
    assert!(r.controllable);

    let one = model(1, 0.75, KernelSpec::Green);
    let r = one.injectivity_diagnostic(None, INJECTIVITY_THRESHOLD);
    assert!((r.sigma_min_b - PI).abs() < 1e-8 && r.controllable);

    let mut b = md.bmat().clone();
    for k in 0..8 {
        b[(3, k)] = 0.0;
        b[(k, 3)] = 0.0;
    }
    let order = FracOrder::new(0.75, 0.3).unwrap();
    let broken = SpectralModel::from_parts(md.eigenvalues().to_vec(), order, 1.0, b.clone(), b, 2.0, 64).unwrap();
    let r = broken.injectivity_diagnostic(None, INJECTIVITY_THRESHOLD);
    assert!(!r.controllable);
    assert_eq!(r.verdict(), "not approximately controllable (truncated)");
}

#[test]
fn operator_bounds_on_random_samples() {
    let alpha = 0.75;
    let md = model(16, alpha, KernelSpec::Green);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = gamma(alpha);
    for _ in 0..1000 {
        let t = rng.random_range(0.0..=1.0);
        let x = SpectralState::new((0..16).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
        let nx = x.l2_norm();
        assert!(md.apply_s_alpha(t, &x).unwrap().l2_norm() <= md.semigroup_bound() * nx * (1.0 + 1e-14));
        assert!(md.apply_t_alpha(t, &x).unwrap().l2_norm() <= md.semigroup_bound() / g * nx * (1.0 + 1e-14));
    }
}

proptest! {
    #[test]
    fn adjoint_identity(u in prop::collection::vec(-1.0f64..1.0, 6), v in prop::collection::vec(-1.0f64..1.0, 6)) {
        let md = model(6, 0.75, KernelSpec::Min);
        let u = SpectralState::new(u).unwrap();
        let v = SpectralState::new(v).unwrap();
        let lhs = dot(md.apply_b(&u).unwrap().coeffs(), v.coeffs());
        let rhs = dot(u.coeffs(), md.apply_b_star(&v).unwrap().coeffs());
        prop_assert!((lhs - rhs).abs() <= 1e-10);
    }

    #[test]
    fn multiplier_ranges(t in 0.0f64..=1.0, alpha in 0.51f64..0.99) {
        let md = model(8, alpha, KernelSpec::Green);
        for s in md.s_multipliers(t).unwrap() {
            prop_assert!(s > 0.0 && s <= 1.0);
        }
        for m in md.t_multipliers(t).unwrap() {
            prop_assert!(m > 0.0 && m <= 1.0 / gamma(alpha) * (1.0 + 1e-14));
        }
    }
}
