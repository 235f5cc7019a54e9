use std::path::Path;

use multirate_core::aliasing::FoldedSpectrum;
use multirate_core::process::simulate as draw_path;
use multirate_core::spectrum::standard_grid;
use multirate_core::Spectrum;
use serde::{Deserialize, Serialize};

use super::{check_grid_size, prepare};
use crate::error::{CliError, CliResult};
use crate::formats::{fmt_f64, write_series, write_text, Csv, SpectrumSpec};
use crate::svg::Plot;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub spectrum: SpectrumSpec,
    /// Length of the simulated path on the base grid.
    pub n: usize,
    pub stride: usize,
    pub offset: usize,
    pub base_step: f64,
    pub seed: u64,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            spectrum: SpectrumSpec::white_noise(1.0),
            n: 256,
            stride: 1,
            offset: 0,
            base_step: 1.0,
            seed: 0,
        }
    }
}

/// Writes `series.csv` (`index,value`) and its `series.json` sidecar.
pub fn simulate(cfg: &SimulateConfig, out: &Path) -> CliResult<()> {
    if cfg.n == 0 {
        return Err(CliError::input("n must be at least 1"));
    }
    if cfg.stride == 0 || cfg.offset >= cfg.n {
        return Err(CliError::input("stride must be at least 1 and offset inside the path"));
    }
    if !(cfg.base_step > 0.0) {
        return Err(CliError::input("base_step must be positive"));
    }
    let source = cfg.spectrum.build()?;
    prepare(out, "simulate", cfg)?;
    let path = draw_path(&source, cfg.n, cfg.seed)?;
    let values = path.into_values();
    let series = multirate_core::SampledSeries::new(values, 1, 0, cfg.base_step)
        .and_then(|s| s.subsample(cfg.stride, cfg.offset))
        .map_err(super::bad_config)?;
    write_series(&out.join("series.csv"), &series)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumConfig {
    pub spectrum: SpectrumSpec,
    /// Sampling stride; the density is folded for δ > 1.
    pub delta: usize,
    pub grid_size: usize,
    pub seed: u64,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            spectrum: SpectrumSpec::white_noise(1.0),
            delta: 1,
            grid_size: 201,
            seed: 0,
        }
    }
}

/// Writes `spectrum.csv` (`omega,density,log_density`) and `spectrum.svg`.
/// ω is in units of the subsampled series' own rate.
pub fn spectrum(cfg: &SpectrumConfig, out: &Path) -> CliResult<()> {
    if cfg.delta == 0 {
        return Err(CliError::input("delta must be at least 1"));
    }
    check_grid_size(cfg.grid_size, 2)?;
    let source = cfg.spectrum.build()?;
    prepare(out, "spectrum", cfg)?;
    let folded = FoldedSpectrum::new(&source, cfg.delta)?;
    let grid = standard_grid(cfg.grid_size);
    let mut t = Csv::new(["omega", "density", "log_density"]);
    let mut logs = Vec::with_capacity(grid.len());
    for &w in &grid {
        let f = folded.density(w);
        if !(f > 0.0 && f.is_finite()) {
            return Err(CliError::Numerical(format!("density {f} at omega {w}")));
        }
        logs.push(f.ln());
        t.push(vec![fmt_f64(w), fmt_f64(f), fmt_f64(f.ln())]);
    }
    t.write(&out.join("spectrum.csv"))?;
    let title = if cfg.delta == 1 {
        "Spectral density".to_string()
    } else {
        format!("Folded spectral density, stride {}", cfg.delta)
    };
    let plot = Plot::new(title, "omega", "log f").line("", &grid, &logs);
    write_text(&out.join("spectrum.svg"), &plot.render(640.0, 420.0))
}
