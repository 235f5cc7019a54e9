use std::path::Path;

use multirate_core::likelihood::{
    default_omega_grid, mc_average_surface, ExperimentDesign, McSurface, DEFAULT_GRID_SIZE,
};
use serde::{Deserialize, Serialize};

use super::{bad_config, one_or_many, prepare};
use crate::error::{CliError, CliResult};
use crate::formats::{fmt_f64, fmt_opt, write_text, Csv};
use crate::svg::Plot;

/// `n_low` and `n_high` accept a scalar or a list; a list sweeps that
/// parameter with one curve per value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SurfaceConfig {
    #[serde(deserialize_with = "one_or_many")]
    pub n_low: Vec<usize>,
    #[serde(deserialize_with = "one_or_many")]
    pub n_high: Vec<usize>,
    pub delta_low: usize,
    pub replicates: usize,
    pub omega_true: f64,
    pub modulus: f64,
    pub grid_size: usize,
    /// Explicit ω₀ grid; overrides `grid_size`.
    pub grid: Option<Vec<f64>>,
    pub seed: u64,
}

impl Default for SurfaceConfig {
    fn default() -> Self {
        Self {
            n_low: vec![128],
            n_high: vec![20],
            delta_low: 2,
            replicates: 200,
            omega_true: 1.0 / 12.0,
            modulus: 0.9,
            grid_size: DEFAULT_GRID_SIZE,
            grid: None,
            seed: 0,
        }
    }
}

impl SurfaceConfig {
    fn grid(&self) -> Vec<f64> {
        self.grid
            .clone()
            .unwrap_or_else(|| default_omega_grid(self.grid_size))
    }

    /// `(label, file stem, design)` per curve.
    fn designs(&self) -> CliResult<Vec<(String, String, ExperimentDesign)>> {
        if self.n_low.is_empty() || self.n_high.is_empty() {
            return Err(CliError::input("n_low and n_high need at least one value"));
        }
        if self.n_low.len() > 1 && self.n_high.len() > 1 {
            return Err(CliError::input("sweep either n_low or n_high, not both"));
        }
        let grid = self.grid();
        if grid.is_empty() {
            return Err(CliError::input("omega grid is empty"));
        }
        let single = self.n_low.len() == 1 && self.n_high.len() == 1;
        let mut out = Vec::new();
        for &n_low in &self.n_low {
            for &n_high in &self.n_high {
                let design = ExperimentDesign {
                    n_low,
                    n_high,
                    delta_low: self.delta_low,
                    replicates: self.replicates,
                    omega_true: self.omega_true,
                    modulus: self.modulus,
                    grid: grid.clone(),
                    seed: self.seed,
                };
                design.validate().map_err(bad_config)?;
                let (label, stem) = if single {
                    (format!("n_low={n_low}, n_high={n_high}"), "surface".to_string())
                } else if self.n_low.len() > 1 {
                    (format!("n_low={n_low}"), format!("surface_n_low_{n_low}"))
                } else {
                    (format!("n_high={n_high}"), format!("surface_n_high_{n_high}"))
                };
                out.push((label, stem, design));
            }
        }
        Ok(out)
    }
}

/// `omega,loglik,stderr` for a max-aligned surface.
pub fn surface_csv(s: &McSurface) -> Csv {
    let mut t = Csv::new(["omega", "loglik", "stderr"]);
    for ((w, v), e) in s.surface.omegas.iter().zip(&s.surface.loglik).zip(&s.stderr) {
        t.push(vec![fmt_f64(*w), fmt_opt(*v), fmt_opt(*e)]);
    }
    t
}

/// Writes one surface CSV per curve and `surface.svg`.
pub fn loglik_surface(cfg: &SurfaceConfig, out: &Path) -> CliResult<()> {
    let designs = cfg.designs()?;
    prepare(out, "loglik-surface", cfg)?;
    let mut plot = Plot::new(
        format!("Average log-likelihood, stride {} block then unit-stride block", cfg.delta_low),
        "omega0",
        "aligned log-likelihood",
    );
    for (label, stem, design) in &designs {
        let s = mc_average_surface(design)?;
        surface_csv(&s).write(&out.join(format!("{stem}.csv")))?;
        let ys: Vec<f64> = s.surface.loglik.iter().map(|v| v.unwrap_or(f64::NAN)).collect();
        plot = plot.line(label.clone(), &s.surface.omegas, &ys);
    }
    plot = plot.marker(cfg.omega_true, "true");
    write_text(&out.join("surface.svg"), &plot.render(720.0, 460.0))
}
