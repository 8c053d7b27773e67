use std::path::PathBuf;

use fracctl::evolve::{l1_reference, mild_solution};
use fracctl::fracops::TimeGrid;
use fracctl::linalg::{norm2, sub};
use fracctl::lpspace::SpectralState;

use crate::config::{ExperimentConfig, StateConfig};
use crate::error::Result;
use crate::output;

/// Constant-in-time forcing `g` (through `H`) and control `u` (through `B`).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Inputs {
    pub forcing: Vec<(usize, f64)>,
    pub control: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateReport {
    pub path: PathBuf,
    /// `max_k |q(t_k) - q_L1(t_k)| / sup_k |q(t_k)|`.
    pub max_gap: f64,
}

pub fn simulate(cfg: &ExperimentConfig, inputs: &Inputs) -> Result<SimulateReport> {
    let model = cfg.build_model()?;
    let grid = TimeGrid::new(model.horizon(), cfg.solver.steps)?;
    let x0 = cfg.problem.x0.state(&model)?;
    let g = StateConfig::Modes { coefficients: inputs.forcing.clone() }.state(&model)?;
    let u = StateConfig::Modes { coefficients: inputs.control.clone() }.state(&model)?;
    let hg = vec![model.apply_h(&g)?; grid.len()];
    let bu = vec![model.apply_b(&u)?; grid.len()];

    let q = mild_solution(&model, &grid, &x0, &hg, &bu)?;
    let reference = l1_reference(&model, &grid, &x0, &hg, &bu)?;
    let scale = q.states().iter().map(SpectralState::l2_norm).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let gaps: Vec<f64> = q
        .states()
        .iter()
        .zip(reference.states())
        .map(|(a, b)| norm2(&sub(a.coeffs(), b.coeffs())) / scale)
        .collect();
    let max_gap = gaps.iter().copied().fold(0.0, f64::max);

    output::ensure_dir(&cfg.output.directory)?;
    let path = output::path_in(cfg, "simulate.csv");
    output::write(&path, &output::series_csv(cfg, &grid, "q", q.states(), &[("l1_gap", gaps)]))?;
    Ok(SimulateReport { path, max_gap })
}

pub fn run(cfg: &ExperimentConfig, inputs: &Inputs) -> Result<()> {
    let r = simulate(cfg, inputs)?;
    println!("trajectory written to {}", r.path.display());
    println!("max relative gap to the L1 reference: {:.3e}", r.max_gap);
    Ok(())
}
