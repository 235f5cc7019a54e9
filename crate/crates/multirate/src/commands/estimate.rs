use std::path::{Path, PathBuf};

use multirate_core::blm::{
    forecast_moments, log_periodogram_labelled, sequential_adjust, spectrum_summary, BeliefState,
    DataLayout, SpectrumSummary, DEFAULT_LEVELS, DEFAULT_MC_SAMPLES,
};
use multirate_core::spectrum::standard_grid;
use serde::{Deserialize, Serialize};

use super::{check_grid_size, prepare, resolve};
use crate::error::{CliError, CliResult};
use crate::formats::{read_series, summary_csv, write_json, write_text, BeliefJson, PriorJson};
use crate::svg::{render_grid, Plot};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesInput {
    pub csv: PathBuf,
    /// Defaults to the CSV path with a `.json` extension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sidecar: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimateConfig {
    pub series: Vec<SeriesInput>,
    pub prior: PriorJson,
    pub mc_samples: usize,
    pub grid_size: usize,
    /// One-based positions in `series`, in adjustment order. Defaults to
    /// the listed order.
    pub order: Option<Vec<usize>>,
    pub seed: u64,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        Self {
            series: Vec::new(),
            prior: PriorJson::default(),
            mc_samples: DEFAULT_MC_SAMPLES,
            grid_size: 128,
            order: None,
            seed: 0,
        }
    }
}

impl EstimateConfig {
    /// Makes series paths relative to `base` absolute-or-cwd relative.
    pub fn resolve_paths(&mut self, base: &Path) {
        for s in &mut self.series {
            s.csv = resolve(base, &s.csv);
            if let Some(p) = &mut s.sidecar {
                *p = resolve(base, p);
            }
        }
    }

    fn stage_order(&self) -> CliResult<Vec<usize>> {
        let k = self.series.len();
        match &self.order {
            None => Ok((0..k).collect()),
            Some(o) => o
                .iter()
                .map(|&i| {
                    if i == 0 || i > k {
                        Err(CliError::input(format!("order entry {i} is outside 1..={k}")))
                    } else {
                        Ok(i - 1)
                    }
                })
                .collect(),
        }
    }
}

/// Adjusts the prior by each series' log-periodogram in turn. Writes
/// `stage_{s}.json` and `stage_{s}_summary.csv` per stage, the final
/// `belief.json`, `summary.csv` and `bands.svg`.
pub fn estimate(cfg: &EstimateConfig, out: &Path) -> CliResult<()> {
    if cfg.series.is_empty() {
        return Err(CliError::input("no input series"));
    }
    check_grid_size(cfg.grid_size, 2)?;
    let prior = cfg.prior.build()?.belief()?;
    let order = cfg.stage_order()?;
    let mut data = Vec::with_capacity(cfg.series.len());
    for (k, s) in cfg.series.iter().enumerate() {
        let series = read_series(&s.csv, s.sidecar.as_deref())?;
        let lp = log_periodogram_labelled(&series, format!("series {}", k + 1))
            .map_err(|e| CliError::input(format!("{}: {e}", s.csv.display())))?;
        data.push(lp);
    }
    prepare(out, "estimate", cfg)?;

    let layouts: Vec<DataLayout> = data.iter().map(DataLayout::from).collect();
    let moments = forecast_moments(&prior, &layouts, cfg.mc_samples, cfg.seed)?;
    let observed: Vec<Vec<f64>> = data.iter().map(|d| d.log_values.clone()).collect();
    let result = sequential_adjust(&prior, &moments, &observed, &order)?;

    let grid = standard_grid(cfg.grid_size);
    let mut panels = vec![bands_plot("Prior", &summarise(&prior, &grid)?)];
    for (s, state) in result.stages.iter().enumerate() {
        let stage = s + 1;
        let summary = summarise(state, &grid)?;
        write_json(&out.join(format!("stage_{stage}.json")), &BeliefJson::from(state))?;
        summary_csv(&summary)?.write(&out.join(format!("stage_{stage}_summary.csv")))?;
        let k = order[s];
        let title = format!(
            "After stage {stage}: series {} (stride {})",
            k + 1,
            data[k].stride
        );
        panels.push(bands_plot(&title, &summary));
    }
    let last = result.final_state();
    let summary = summarise(last, &grid)?;
    write_json(&out.join("belief.json"), &BeliefJson::from(last))?;
    summary_csv(&summary)?.write(&out.join("summary.csv"))?;
    let cols = panels.len().min(3);
    write_text(&out.join("bands.svg"), &render_grid(&panels, cols, 480.0, 340.0))
}

fn summarise(state: &BeliefState, grid: &[f64]) -> CliResult<SpectrumSummary> {
    Ok(spectrum_summary(state, grid, &DEFAULT_LEVELS)?)
}

fn bands_plot(title: &str, s: &SpectrumSummary) -> Plot {
    let mut p = Plot::new(title, "omega", "log f");
    for (level, opacity) in [(0.9, 0.15), (0.5, 0.3)] {
        if let Some(b) = s.band(level) {
            p = p.band(&s.omegas, &b.lower, &b.upper, opacity);
        }
    }
    p.line("mean", &s.omegas, &s.mean)
}
