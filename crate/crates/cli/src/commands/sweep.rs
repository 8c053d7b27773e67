use std::fmt::Write as _;
use std::time::Instant;

use fracctl::control::ControlProblem;
use fracctl::hvi::{sweep_point, FixedPoint, SweepRow};
use fracctl::lpspace::SpectralState;
use rayon::prelude::*;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::output;

/// One ε of a sweep with its wall-clock cost.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub row: SweepRow<f64>,
    pub fixed_point: Option<FixedPoint<f64>>,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct SweepSummary {
    /// `‖z - S_α(a) x₀‖`.
    pub free_miss: f64,
    pub results: Vec<SweepResult>,
}

impl SweepSummary {
    pub fn monotone(&self) -> bool {
        self.results.windows(2).all(|w| w[1].row.terminal_miss < w[0].row.terminal_miss)
    }

    pub fn all_converged(&self) -> bool {
        self.results.iter().all(|r| r.row.converged)
    }
}

/// Solves every ε of the sweep; rows are independent and run on `sweep.workers` threads.
pub fn sweep(cfg: &ExperimentConfig) -> Result<SweepSummary> {
    let model = cfg.build_model()?;
    let problem = ControlProblem::new(&model, cfg.solver.steps)?;
    let x0 = cfg.problem.x0.state(&model)?;
    let z = cfg.problem.target.state(&model)?;
    let pot = cfg.problem.potential.potential()?;
    let opts = cfg.fixed_point_options();
    let free = model.apply_s_alpha(model.horizon(), &x0)?;
    let free_miss = problem.state_norm(&z.sub(&free)?)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.sweep.workers)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {} workers: {e}", cfg.sweep.workers)))?;
    let results = pool.install(|| {
        cfg.sweep
            .epsilons
            .par_iter()
            .map(|&eps| {
                let start = Instant::now();
                let (row, fixed_point) = sweep_point(&problem, &pot, &x0, &z, eps, &opts);
                SweepResult { row, fixed_point, seconds: start.elapsed().as_secs_f64() }
            })
            .collect()
    });
    Ok(SweepSummary { free_miss, results })
}

fn sweep_csv(cfg: &ExperimentConfig, s: &SweepSummary) -> String {
    let mut out = output::header(cfg);
    out.push_str(
        "epsilon,terminal_miss,relative_miss,formula_miss,identity_residual,control_energy,iterations,converged,failure\n",
    );
    for r in &s.results {
        let row = &r.row;
        let _ = writeln!(
            out,
            "{:e},{:e},{:e},{:e},{:e},{:e},{},{},{}",
            row.epsilon,
            row.terminal_miss,
            row.terminal_miss / s.free_miss,
            row.formula_miss,
            row.identity_residual,
            row.control_energy,
            row.iterations,
            row.converged,
            row.failure.as_deref().unwrap_or("")
        );
    }
    out
}

/// Writes the sweep CSV, per-ε trajectory and control CSVs, and the JSON summary.
pub fn write_outputs(cfg: &ExperimentConfig, s: &SweepSummary) -> Result<()> {
    output::ensure_dir(&cfg.output.directory)?;
    output::write(&output::path_in(cfg, "sweep.csv"), &sweep_csv(cfg, s))?;
    for (i, r) in s.results.iter().enumerate() {
        let Some(fp) = &r.fixed_point else { continue };
        let tag = format!("{:02}_eps{:e}", i + 1, r.row.epsilon);
        let grid = fp.run.trajectory.grid();
        if cfg.output.trajectories {
            let csv = output::series_csv(cfg, grid, "q", fp.run.trajectory.states(), &[]);
            output::write(&output::path_in(cfg, &format!("trajectory_{tag}.csv")), &csv)?;
        }
        if cfg.output.controls {
            let csv = output::series_csv(cfg, grid, "u", &fp.run.synthesis.control, &[]);
            output::write(&output::path_in(cfg, &format!("control_{tag}.csv")), &csv)?;
        }
    }
    let rows: Vec<_> = s
        .results
        .iter()
        .map(|r| {
            json!({
                "epsilon": r.row.epsilon,
                "terminal_miss": finite(r.row.terminal_miss),
                "relative_miss": finite(r.row.terminal_miss / s.free_miss),
                "formula_miss": finite(r.row.formula_miss),
                "identity_residual": finite(r.row.identity_residual),
                "control_energy": finite(r.row.control_energy),
                "iterations": r.row.iterations,
                "converged": r.row.converged,
                "failure": r.row.failure,
                "runtime_seconds": r.seconds,
            })
        })
        .collect();
    let summary = json!({
        "fracctl_version": fracctl::VERSION,
        "config_sha256": cfg.hash(),
        "free_miss": s.free_miss,
        "monotone": s.monotone(),
        "all_converged": s.all_converged(),
        "rows": rows,
    });
    output::write(&output::path_in(cfg, "summary.json"), &serde_json::to_string_pretty(&summary)?)
}

/// JSON has no NaN; failed rows report `null`.
fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

pub fn run(cfg: &ExperimentConfig) -> Result<()> {
    let s = sweep(cfg)?;
    write_outputs(cfg, &s)?;
    println!("free miss |z - S(a)x0| = {:.6e}", s.free_miss);
    println!("{:>10} {:>14} {:>10} {:>6} {:>9}", "epsilon", "miss", "relative", "iters", "converged");
    for r in &s.results {
        println!(
            "{:>10.1e} {:>14.6e} {:>9.3}% {:>6} {:>9}",
            r.row.epsilon,
            r.row.terminal_miss,
            100.0 * r.row.terminal_miss / s.free_miss,
            r.row.iterations,
            r.row.converged
        );
    }
    println!("outputs in {}", cfg.output.directory.display());
    if s.all_converged() {
        Ok(())
    } else {
        let failed: Vec<String> = s.results.iter().filter(|r| !r.row.converged).map(|r| format!("{:e}", r.row.epsilon)).collect();
        Err(CliError::NonConvergence(format!("no fixed point for epsilon {}", failed.join(", "))))
    }
}

/// `‖z - S_α(a) x₀‖` alone, for reports that do not need a sweep.
pub fn free_miss(cfg: &ExperimentConfig) -> Result<f64> {
    let model = cfg.build_model()?;
    let x0 = cfg.problem.x0.state(&model)?;
    let z: SpectralState<f64> = cfg.problem.target.state(&model)?;
    let free = model.apply_s_alpha(model.horizon(), &x0)?;
    Ok(model.duality().norm(z.sub(&free)?.coeffs())?)
}
