use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use fracctl::fracops::TimeGrid;
use fracctl::lpspace::SpectralState;

use crate::config::ExperimentConfig;
use crate::error::{io_err, Result};

/// First line of every CSV: tool and library versions plus the config hash.
pub fn header(cfg: &ExperimentConfig) -> String {
    format!(
        "# fracctl-cli {} fracctl {} config_sha256={}\n",
        env!("CARGO_PKG_VERSION"),
        fracctl::VERSION,
        cfg.hash()
    )
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))
}

pub fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(io_err(path))
}

/// `t, <prefix>_1, ..., <prefix>_N` and optional extra columns, one row per node.
pub fn series_csv(
    cfg: &ExperimentConfig,
    grid: &TimeGrid<f64>,
    prefix: &str,
    series: &[SpectralState<f64>],
    extra: &[(&str, Vec<f64>)],
) -> String {
    let n = series.first().map_or(0, |s| s.len());
    let mut out = header(cfg);
    out.push('t');
    for k in 1..=n {
        let _ = write!(out, ",{prefix}_{k}");
    }
    for (name, _) in extra {
        let _ = write!(out, ",{name}");
    }
    out.push('\n');
    for (k, s) in series.iter().enumerate() {
        let _ = write!(out, "{:e}", grid.node(k));
        for v in s.coeffs() {
            let _ = write!(out, ",{v:e}");
        }
        for (_, col) in extra {
            let _ = write!(out, ",{:e}", col[k]);
        }
        out.push('\n');
    }
    out
}

pub fn path_in(cfg: &ExperimentConfig, name: &str) -> PathBuf {
    cfg.output.directory.join(name)
}
