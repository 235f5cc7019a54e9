use std::path::{Path, PathBuf};

use multirate_core::blm::difference_grid;
use multirate_core::spectrum::{standard_grid, DEFAULT_QUAD_POINTS, MIN_QUAD_POINTS};
use multirate_core::uncertainty::{
    kolmogorov_variance, pc_fan as fan_curves, propagate_with, sparse_grid, PcDecomposition,
    DEFAULT_PROPAGATION_DIMENSION, DEFAULT_PROPAGATION_LEVEL, MAX_GRID_DIMENSION, MAX_GRID_LEVEL,
};
use serde::{Deserialize, Serialize};

use super::{check_grid_size, prepare, resolve};
use crate::error::{CliError, CliResult};
use crate::formats::{fmt_f64, read_belief, write_json, write_text, Csv, SpectrumSpec};
use crate::svg::{render_grid, Plot};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PcFanConfig {
    pub belief: Option<PathBuf>,
    /// One-based: 1 is the leading component.
    pub components: Vec<usize>,
    pub grid_size: usize,
    pub seed: u64,
}

impl Default for PcFanConfig {
    fn default() -> Self {
        Self {
            belief: None,
            components: vec![1, 2, 3],
            grid_size: 128,
            seed: 0,
        }
    }
}

impl PcFanConfig {
    pub fn resolve_paths(&mut self, base: &Path) {
        if let Some(p) = &mut self.belief {
            *p = resolve(base, p);
        }
    }
}

fn required(p: &Option<PathBuf>, what: &str) -> CliResult<PathBuf> {
    p.clone()
        .ok_or_else(|| CliError::input(format!("missing field `{what}`")))
}

/// Writes `fan_pc{k}.csv` (`omega,q1,...,q9`, spectra at the nine deciles
/// along component k) and `fan.svg`.
pub fn pc_fan(cfg: &PcFanConfig, out: &Path) -> CliResult<()> {
    let state = read_belief(&required(&cfg.belief, "belief")?)?;
    check_grid_size(cfg.grid_size, 2)?;
    if cfg.components.is_empty() {
        return Err(CliError::input("no components requested"));
    }
    if let Some(&k) = cfg.components.iter().find(|&&k| k == 0 || k > state.dim()) {
        return Err(CliError::input(format!(
            "component {k} is outside 1..={}",
            state.dim()
        )));
    }
    prepare(out, "pc-fan", cfg)?;
    let pcs = PcDecomposition::new(&state)?;
    let grid = standard_grid(cfg.grid_size);
    let mut panels = Vec::new();
    for &k in &cfg.components {
        let fan = fan_curves(&pcs, k - 1, &grid)?;
        let mut t = Csv::new(std::iter::once("omega".to_string()).chain((1..=9).map(|i| format!("q{i}"))));
        for (j, &w) in grid.iter().enumerate() {
            t.push(
                std::iter::once(fmt_f64(w))
                    .chain(fan.curves.iter().map(|c| fmt_f64(c[j])))
                    .collect(),
            );
        }
        t.write(&out.join(format!("fan_pc{k}.csv")))?;
        let mut p = Plot::new(
            format!("Component {k}, eigenvalue {:.3e}", fan.eigenvalue),
            "omega",
            "log f",
        );
        for (i, c) in fan.curves.iter().enumerate() {
            let logs: Vec<f64> = c.iter().map(|v| v.ln()).collect();
            let label = if i == 0 || i == 4 || i == 8 {
                format!("q{}", i + 1)
            } else {
                String::new()
            };
            p = if i == 4 {
                p.line(label, &grid, &logs)
            } else {
                p.dashed(label, &grid, &logs)
            };
        }
        panels.push(p);
    }
    let cols = panels.len().min(3);
    write_text(&out.join("fan.svg"), &render_grid(&panels, cols, 420.0, 320.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureConfig {
    pub dimension: usize,
    pub level: usize,
    /// When given, Kolmogorov's variance is propagated through this belief.
    pub belief: Option<PathBuf>,
    pub quad_points: usize,
    pub seed: u64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            dimension: DEFAULT_PROPAGATION_DIMENSION,
            level: DEFAULT_PROPAGATION_LEVEL,
            belief: None,
            quad_points: DEFAULT_QUAD_POINTS,
            seed: 0,
        }
    }
}

impl QuadratureConfig {
    pub fn resolve_paths(&mut self, base: &Path) {
        if let Some(p) = &mut self.belief {
            *p = resolve(base, p);
        }
    }
}

fn check_quad_points(n: usize) -> CliResult<()> {
    if n < MIN_QUAD_POINTS {
        return Err(CliError::input(format!(
            "quad_points must be at least {MIN_QUAD_POINTS}, got {n}"
        )));
    }
    Ok(())
}

/// Writes `quadrature.csv` (`w,x1,...,xd`). With a belief, also writes
/// `propagation.csv` and prints the expected Kolmogorov variance.
pub fn quadrature(cfg: &QuadratureConfig, out: &Path) -> CliResult<()> {
    if !(1..=MAX_GRID_DIMENSION).contains(&cfg.dimension) || !(1..=MAX_GRID_LEVEL).contains(&cfg.level) {
        return Err(CliError::input(format!(
            "dimension must lie in 1..={MAX_GRID_DIMENSION} and level in 1..={MAX_GRID_LEVEL}"
        )));
    }
    check_quad_points(cfg.quad_points)?;
    let state = match &cfg.belief {
        Some(p) => Some(read_belief(p)?),
        None => None,
    };
    prepare(out, "quadrature", cfg)?;
    let grid = sparse_grid(cfg.dimension, cfg.level)?;
    let mut t = Csv::new(std::iter::once("w".to_string()).chain((1..=cfg.dimension).map(|i| format!("x{i}"))));
    for (x, w) in grid.nodes.iter().zip(&grid.weights) {
        t.push(std::iter::once(*w).chain(x.iter().copied()).map(fmt_f64).collect());
    }
    t.write(&out.join("quadrature.csv"))?;

    if let Some(state) = state {
        let pcs = PcDecomposition::new(&state)?;
        let q = cfg.quad_points;
        let expected = propagate_with(&pcs, cfg.dimension, cfg.level, |s| kolmogorov_variance(s, q))?;
        let plug_in = kolmogorov_variance(&state.mean_log_spectrum(), q)?;
        let mut p = Csv::new(["quantity", "value"]);
        p.push(vec!["expected_kolmogorov_variance".into(), fmt_f64(expected)]);
        p.push(vec!["kolmogorov_variance_at_mean".into(), fmt_f64(plug_in)]);
        p.push(vec!["nodes".into(), grid.len().to_string()]);
        p.write(&out.join("propagation.csv"))?;
        println!("{}", fmt_f64(expected));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KolmogorovConfig {
    /// A model or log-spectrum; ignored when `belief` is given.
    pub spectrum: Option<SpectrumSpec>,
    /// Evaluates the mean log-spectrum of this belief.
    pub belief: Option<PathBuf>,
    pub quad_points: usize,
    pub seed: u64,
}

impl Default for KolmogorovConfig {
    fn default() -> Self {
        Self {
            spectrum: None,
            belief: None,
            quad_points: DEFAULT_QUAD_POINTS,
            seed: 0,
        }
    }
}

impl KolmogorovConfig {
    pub fn resolve_paths(&mut self, base: &Path) {
        if let Some(p) = &mut self.belief {
            *p = resolve(base, p);
        }
    }
}

#[derive(Serialize)]
struct KolmogorovOut {
    kolmogorov_variance: f64,
    quad_points: usize,
}

/// Prints Kolmogorov's one-step prediction variance and writes it to
/// `kolmogorov.csv` and `kolmogorov.json`.
pub fn kolmogorov(cfg: &KolmogorovConfig, out: &Path) -> CliResult<()> {
    check_quad_points(cfg.quad_points)?;
    let value = match (&cfg.spectrum, &cfg.belief) {
        (None, Some(p)) => {
            let state = read_belief(p)?;
            prepare(out, "kolmogorov", cfg)?;
            kolmogorov_variance(&state.mean_log_spectrum(), cfg.quad_points)?
        }
        (Some(s), None) => {
            let source = s.build()?;
            prepare(out, "kolmogorov", cfg)?;
            kolmogorov_variance(&source, cfg.quad_points)?
        }
        _ => return Err(CliError::input("give exactly one of `spectrum` or `belief`")),
    };
    let mut t = Csv::new(["kolmogorov_variance"]);
    t.push(vec![fmt_f64(value)]);
    t.write(&out.join("kolmogorov.csv"))?;
    write_json(
        &out.join("kolmogorov.json"),
        &KolmogorovOut {
            kolmogorov_variance: value,
            quad_points: cfg.quad_points,
        },
    )?;
    println!("{}", fmt_f64(value));
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiffGridConfig {
    pub beliefs: Vec<PathBuf>,
    pub grid_size: usize,
    pub seed: u64,
}

impl Default for DiffGridConfig {
    fn default() -> Self {
        Self {
            beliefs: Vec::new(),
            grid_size: 128,
            seed: 0,
        }
    }
}

impl DiffGridConfig {
    pub fn resolve_paths(&mut self, base: &Path) {
        for p in &mut self.beliefs {
            *p = resolve(base, p);
        }
    }
}

/// Writes `diff_grid.csv` (`row,col,omega,value`, one-based belief
/// positions) and a k×k `diff_grid.svg`: mean log-spectra on the diagonal,
/// differences `mean_row − mean_col` elsewhere.
pub fn diff_grid(cfg: &DiffGridConfig, out: &Path) -> CliResult<()> {
    if cfg.beliefs.len() < 2 {
        return Err(CliError::input("diff-grid needs at least two beliefs"));
    }
    check_grid_size(cfg.grid_size, 2)?;
    let states = cfg
        .beliefs
        .iter()
        .map(|p| read_belief(p))
        .collect::<CliResult<Vec<_>>>()?;
    if states.iter().any(|s| s.dim() != states[0].dim()) {
        return Err(CliError::input("beliefs have different basis sizes"));
    }
    prepare(out, "diff-grid", cfg)?;
    let grid = standard_grid(cfg.grid_size);
    let cells = difference_grid(&states, &grid)?;
    let mut t = Csv::new(["row", "col", "omega", "value"]);
    let mut panels = Vec::new();
    for (i, row) in cells.iter().enumerate() {
        for (j, curve) in row.iter().enumerate() {
            for (w, v) in grid.iter().zip(curve) {
                t.push(vec![(i + 1).to_string(), (j + 1).to_string(), fmt_f64(*w), fmt_f64(*v)]);
            }
            let title = if i == j {
                format!("Belief {}: mean log f", i + 1)
            } else {
                format!("Belief {} minus belief {}", i + 1, j + 1)
            };
            let mut p = Plot::new(title, "omega", "log f").line("", &grid, curve);
            if i != j {
                p = p.dashed("", &[0.0, 0.5], &[0.0, 0.0]);
            }
            panels.push(p);
        }
    }
    t.write(&out.join("diff_grid.csv"))?;
    write_text(&out.join("diff_grid.svg"), &render_grid(&panels, states.len(), 360.0, 280.0))
}
