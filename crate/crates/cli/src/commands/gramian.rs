use std::fmt::Write as _;

use fracctl::gramian::{assemble_gramian, gramian_min_singular, verify_gramian, GramianReport};
use fracctl::lpspace::SpectralState;
use fracctl::spectral::INJECTIVITY_THRESHOLD;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::output;

/// Assembles and audits the Gramian at `solver.quad_steps`.
pub fn gramian(cfg: &ExperimentConfig) -> Result<(GramianReport<f64>, bool)> {
    let model = cfg.build_model()?;
    let g = assemble_gramian(&model, cfg.solver.quad_steps)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.solver.seed);
    let n = model.n_modes();
    let dirs = (0..8)
        .map(|_| SpectralState::new((0..n).map(|_| rng.random_range(-1.0..1.0)).collect()))
        .collect::<fracctl::Result<Vec<_>>>()?;
    let report = verify_gramian(&g, &model, &dirs)?;
    let inj = model.injectivity_diagnostic(Some(g.matrix()), INJECTIVITY_THRESHOLD);
    let passed = report.symmetry_defect <= 1e-10
        && report.min_eigenvalue >= -1e-10
        && report.quadratic_form_error <= 1e-8
        && report.bound_slack() >= 0.0;

    output::ensure_dir(&cfg.output.directory)?;
    let mut csv = output::header(cfg);
    csv.push_str(&(1..=n).map(|k| format!("g_{k}")).collect::<Vec<_>>().join(","));
    csv.push('\n');
    for m in 0..n {
        let row: Vec<String> = (0..n).map(|k| format!("{:e}", g.matrix()[(m, k)])).collect();
        let _ = writeln!(csv, "{}", row.join(","));
    }
    output::write(&output::path_in(cfg, "gramian.csv"), &csv)?;
    let summary = json!({
        "fracctl_version": fracctl::VERSION,
        "config_sha256": cfg.hash(),
        "quad_steps": cfg.solver.quad_steps,
        "symmetry_defect": report.symmetry_defect,
        "min_eigenvalue": report.min_eigenvalue,
        "min_singular_value": gramian_min_singular(&g),
        "quadratic_form_error": report.quadratic_form_error,
        "norm": report.norm,
        "norm_bound": report.norm_bound,
        "sigma_min_b": inj.sigma_min_b,
        "verdict": inj.verdict(),
        "passed": passed,
    });
    output::write(&output::path_in(cfg, "gramian.json"), &serde_json::to_string_pretty(&summary)?)?;
    Ok((report, passed))
}

pub fn run(cfg: &ExperimentConfig) -> Result<()> {
    let (r, passed) = gramian(cfg)?;
    println!("symmetry defect        {:.3e}", r.symmetry_defect);
    println!("min eigenvalue         {:.3e}", r.min_eigenvalue);
    println!("quadratic-form error   {:.3e}", r.quadratic_form_error);
    println!("norm / bound           {:.4e} / {:.4e}", r.norm, r.norm_bound);
    if passed {
        Ok(())
    } else {
        Err(CliError::Validation(1))
    }
}
