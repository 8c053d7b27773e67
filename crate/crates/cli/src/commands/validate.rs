use fracctl::control::regularized_resolvent;
use fracctl::fracops::{gamma, ml_one, ml_two, rl_integral, wright_density, TimeGrid};
use fracctl::gramian::{assemble_gramian, verify_gramian};
use fracctl::linalg::dot;
use fracctl::lpspace::{duality_map, lp_norm, pairing, SpectralState};
use fracctl::quadrature::{exp_sinh, tanh_sinh};
use fracctl::spectral::{SpectralModel, INJECTIVITY_THRESHOLD};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};

/// Outcome of one invariant check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn bound(name: &'static str, value: f64, limit: f64) -> Self {
        Self { name, passed: value <= limit, detail: format!("{value:.3e} (limit {limit:.0e})") }
    }
}

/// Runs the invariant suite on the configured model.
pub fn validate(cfg: &ExperimentConfig) -> Result<Vec<Check>> {
    let model = cfg.build_model()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.solver.seed);
    let mut checks = special_functions(&model)?;
    checks.push(operator_bounds(&model, &mut rng)?);
    let inj = model.injectivity_diagnostic(None, INJECTIVITY_THRESHOLD);
    checks.push(Check {
        name: "truncated injectivity of B*",
        passed: inj.controllable,
        detail: format!("sigma_min(B) = {:.3e}: {}", inj.sigma_min_b, inj.verdict()),
    });
    checks.extend(duality(&model, &mut rng)?);
    checks.extend(gramian_and_resolvent(cfg, &model, &mut rng)?);
    Ok(checks)
}

/// Prints one line per check; fails if any check does.
pub fn run(cfg: &ExperimentConfig) -> Result<()> {
    let checks = validate(cfg)?;
    for c in &checks {
        println!("{} {:<40} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    match checks.iter().filter(|c| !c.passed).count() {
        0 => Ok(()),
        n => Err(CliError::Validation(n)),
    }
}

/// `∫_0^∞ ξ_α(τ) φ(τ) dτ`, split at `τ = 1`.
fn against_density(alpha: f64, phi: impl Fn(f64) -> f64) -> f64 {
    let f = |t: f64| wright_density(alpha, t).map_or(f64::NAN, |d| d * phi(t));
    tanh_sinh(0.0, 1.0, 1e-14, 10, |t, _, _| f(t)) + exp_sinh(1.0, 1e-14, 10, |t, _| f(t))
}

fn special_functions(model: &SpectralModel<f64>) -> Result<Vec<Check>> {
    let alpha = model.alpha();
    let a = model.horizon();
    let mut exp_err: f64 = 0.0;
    for i in 0..=120 {
        let z = -5.0 + 0.05 * i as f64;
        exp_err = exp_err.max((ml_one(1.0, z)? - z.exp()).abs() / z.exp());
    }
    let mass = against_density(alpha, |_| 1.0);
    let mut sub_err: f64 = 0.0;
    for &lambda in model.eigenvalues().iter().take(3) {
        let z = lambda * a.powf(alpha);
        let s = against_density(alpha, |t| (z * t).exp());
        let t = alpha * against_density(alpha, |t| t * (z * t).exp());
        sub_err = sub_err.max((s - ml_one(alpha, z)?).abs()).max((t - ml_two(alpha, alpha, z)?).abs());
    }
    let grid = TimeGrid::new(a, 512)?;
    let ones = vec![1.0; grid.len()];
    let rl = rl_integral(&ones, &grid, alpha, grid.steps())?;
    Ok(vec![
        Check::bound("E_1(z) = exp(z) on [-5, 1]", exp_err, 1e-10),
        Check::bound("Wright density mass", (mass - 1.0).abs(), 1e-6),
        Check::bound("subordination identities", sub_err, 1e-6),
        Check::bound("I^a(1) = t^a / Gamma(a+1)", (rl - a.powf(alpha) / gamma(alpha + 1.0)).abs(), 1e-10),
    ])
}

fn random_state(rng: &mut ChaCha8Rng, n: usize) -> Result<SpectralState<f64>> {
    Ok(SpectralState::new((0..n).map(|_| rng.random_range(-1.0..1.0)).collect())?)
}

fn operator_bounds(model: &SpectralModel<f64>, rng: &mut ChaCha8Rng) -> Result<Check> {
    let m = model.semigroup_bound();
    let g = gamma(model.alpha());
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let t = rng.random_range(0.0..=model.horizon());
        let x = random_state(rng, model.n_modes())?;
        let nx = x.l2_norm();
        worst = worst
            .max(model.apply_s_alpha(t, &x)?.l2_norm() / (m * nx))
            .max(model.apply_t_alpha(t, &x)?.l2_norm() / (m / g * nx));
    }
    Ok(Check {
        name: "|S(t)x| <= M|x|, |T(t)x| <= M|x|/Gamma",
        passed: worst <= 1.0 + 1e-14,
        detail: format!("largest ratio to the bound {worst:.6}"),
    })
}

fn duality(model: &SpectralModel<f64>, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let basis = model.basis();
    let d = model.duality();
    let (mut grid_err, mut galerkin_err): (f64, f64) = (0.0, 0.0);
    for _ in 0..20 {
        let x = random_state(rng, model.n_modes())?;
        let f = basis.from_basis(&x, model.p())?;
        let jf = duality_map(&f);
        let n2 = lp_norm(&f).powi(2);
        grid_err = grid_err
            .max((pairing(&f, &jf)? - n2).abs() / n2)
            .max((lp_norm(&jf).powi(2) - n2).abs() / n2);
        let nx = d.norm(x.coeffs())?.powi(2);
        galerkin_err = galerkin_err.max((dot(x.coeffs(), &d.apply(x.coeffs())?) - nx).abs() / nx);
    }
    Ok(vec![
        Check::bound("<f, Jf> = |f|^2 = |Jf|^2", grid_err, 1e-10),
        Check::bound("<x, J_N x> = |x|^2", galerkin_err, 1e-10),
    ])
}

fn gramian_and_resolvent(cfg: &ExperimentConfig, model: &SpectralModel<f64>, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let g = assemble_gramian(model, cfg.solver.quad_steps)?;
    let dirs = (0..8).map(|_| random_state(rng, model.n_modes())).collect::<Result<Vec<_>>>()?;
    let r = verify_gramian(&g, model, &dirs)?;
    let mut checks = vec![
        Check::bound("Gramian symmetry defect", r.symmetry_defect, 1e-10),
        Check {
            name: "Gramian min eigenvalue",
            passed: r.min_eigenvalue >= -1e-10,
            detail: format!("{:.3e} (limit -1e-10)", r.min_eigenvalue),
        },
        Check::bound("Gramian quadratic-form identity", r.quadratic_form_error, 1e-8),
        Check {
            name: "Gramian norm bound",
            passed: r.bound_slack() >= 0.0,
            detail: format!("|G| = {:.4e} <= {:.4e}", r.norm, r.norm_bound),
        },
    ];
    let d = model.duality();
    let opts = cfg.resolvent_options();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let y = random_state(rng, model.n_modes())?;
        let ny = d.norm(y.coeffs())?;
        for &eps in &cfg.sweep.epsilons {
            let s = regularized_resolvent(&g, d, eps, &y, &opts)?;
            worst = worst.max(d.norm(s.result.scale(eps).coeffs())? / ny);
        }
    }
    checks.push(Check {
        name: "|e(eI + GJ)^-1 y| <= |y|",
        passed: worst <= 1.0 + 1e-8,
        detail: format!("largest ratio {worst:.6}"),
    });
    Ok(checks)
}
