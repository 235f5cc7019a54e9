//! Argument parsing. Flags override the matching config fields.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::commands::{self, load_config};
use crate::error::CliResult;

#[derive(Debug, Parser)]
#[command(name = "multirate", version, about = "Spectral inference for mixed-rate time series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a Gaussian series, optionally subsampled.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        stride: Option<usize>,
        #[arg(long)]
        offset: Option<usize>,
    },
    /// Evaluate a spectral density, folded for a sampling stride.
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        delta: Option<usize>,
        #[arg(long)]
        grid_size: Option<usize>,
    },
    /// Monte Carlo average log-likelihood surface of the AR(2) peak frequency.
    LoglikSurface {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        n_low: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        n_high: Option<Vec<usize>>,
        #[arg(long)]
        replicates: Option<usize>,
        #[arg(long)]
        grid_size: Option<usize>,
    },
    /// Bayes linear estimate of the log-spectrum from one or more series.
    Estimate {
        #[command(flatten)]
        common: Common,
        /// Series CSV; repeat for several series. Replaces the config list.
        #[arg(long)]
        series: Vec<PathBuf>,
        #[arg(long)]
        mc_samples: Option<usize>,
        #[arg(long)]
        grid_size: Option<usize>,
    },
    /// Expected discrepancy for a table of two-dataset designs.
    Bench {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        replicates: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        deltas: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
    },
    /// Raw mixed-rate data versus interpolate-then-estimate.
    CompareInterp {
        #[command(flatten)]
        common: Common,
    },
    /// Spectra along principal components of a belief.
    PcFan {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        belief: Option<PathBuf>,
        /// One-based component indices.
        #[arg(long, value_delimiter = ',')]
        components: Option<Vec<usize>>,
    },
    /// Sparse Gauss–Hermite grid, optionally propagating Kolmogorov's variance.
    Quadrature {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        dimension: Option<usize>,
        #[arg(long)]
        level: Option<usize>,
        #[arg(long)]
        belief: Option<PathBuf>,
    },
    /// Kolmogorov's one-step prediction variance.
    Kolmogorov {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        belief: Option<PathBuf>,
        #[arg(long)]
        quad_points: Option<usize>,
    },
    /// Pairwise differences of mean log-spectra.
    DiffGrid {
        #[command(flatten)]
        common: Common,
        /// Belief JSON; repeat for each belief. Replaces the config list.
        #[arg(long)]
        belief: Vec<PathBuf>,
        #[arg(long)]
        grid_size: Option<usize>,
    },
}

fn set<T>(field: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *field = v;
    }
}

fn config_of<T: serde::de::DeserializeOwned + Default>(c: &Common) -> CliResult<(T, PathBuf)> {
    load_config(c.config.as_deref())
}

fn out_dir(c: &Common) -> &Path {
    &c.out
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate { common, n, stride, offset } => {
            let (mut cfg, _): (commands::SimulateConfig, _) = config_of(&common)?;
            set(&mut cfg.seed, common.seed);
            set(&mut cfg.n, n);
            set(&mut cfg.stride, stride);
            set(&mut cfg.offset, offset);
            commands::simulate(&cfg, out_dir(&common))
        }
        Command::Spectrum { common, delta, grid_size } => {
            let (mut cfg, _): (commands::SpectrumConfig, _) = config_of(&common)?;
            set(&mut cfg.seed, common.seed);
            set(&mut cfg.delta, delta);
            set(&mut cfg.grid_size, grid_size);
            commands::spectrum(&cfg, out_dir(&common))
        }
        Command::LoglikSurface { common, n_low, n_high, replicates, grid_size } => {
            let (mut cfg, _): (commands::SurfaceConfig, _) = config_of(&common)?;
            set(&mut cfg.seed, common.seed);
            set(&mut cfg.n_low, n_low);
            set(&mut cfg.n_high, n_high);
            set(&mut cfg.replicates, replicates);
            if let Some(g) = grid_size {
                cfg.grid_size = g;
                cfg.grid = None;
            }
            commands::loglik_surface(&cfg, out_dir(&common))
        }
        Command::Estimate { common, series, mc_samples, grid_size } => {
            let (mut cfg, base): (commands::EstimateConfig, _) = config_of(&common)?;
            cfg.resolve_paths(&base);
            set(&mut cfg.seed, common.seed);
            if !series.is_empty() {
                cfg.series = series
                    .into_iter()
                    .map(|csv| commands::SeriesInput { csv, sidecar: None })
                    .collect();
                cfg.order = None;
            }
            set(&mut cfg.mc_samples, mc_samples);
            set(&mut cfg.grid_size, grid_size);
            commands::estimate(&cfg, out_dir(&common))
        }
        Command::Bench { common, replicates, deltas, sizes } => {
            let (mut cfg, _): (commands::BenchConfig, _) = config_of(&common)?;
            set(&mut cfg.seed, common.seed);
            set(&mut cfg.replicates, replicates);
            set(&mut cfg.deltas, deltas);
            set(&mut cfg.sizes, sizes);
            commands::bench(&cfg, out_dir(&common))
        }
        Command::CompareInterp { common } => {
            let (mut cfg, _): (commands::CompareInterpConfig, _) = config_of(&common)?;
            set(&mut cfg.seed, common.seed);
            commands::compare_interp(&cfg, out_dir(&common))
        }
        Command::PcFan { common, belief, components } => {
            let (mut cfg, base): (commands::PcFanConfig, _) = config_of(&common)?;
            cfg.resolve_paths(&base);
            set(&mut cfg.seed, common.seed);
            set(&mut cfg.belief, belief.map(Some));
            set(&mut cfg.components, components);
            commands::pc_fan(&cfg, out_dir(&common))
        }
        Command::Quadrature { common, dimension, level, belief } => {
            let (mut cfg, base): (commands::QuadratureConfig, _) = config_of(&common)?;
            cfg.resolve_paths(&base);
            set(&mut cfg.seed, common.seed);
            set(&mut cfg.dimension, dimension);
            set(&mut cfg.level, level);
            set(&mut cfg.belief, belief.map(Some));
            commands::quadrature(&cfg, out_dir(&common))
        }
        Command::Kolmogorov { common, belief, quad_points } => {
            let (mut cfg, base): (commands::KolmogorovConfig, _) = config_of(&common)?;
            cfg.resolve_paths(&base);
            set(&mut cfg.seed, common.seed);
            if belief.is_some() {
                cfg.belief = belief;
                cfg.spectrum = None;
            }
            set(&mut cfg.quad_points, quad_points);
            commands::kolmogorov(&cfg, out_dir(&common))
        }
        Command::DiffGrid { common, belief, grid_size } => {
            let (mut cfg, base): (commands::DiffGridConfig, _) = config_of(&common)?;
            cfg.resolve_paths(&base);
            set(&mut cfg.seed, common.seed);
            if !belief.is_empty() {
                cfg.beliefs = belief;
            }
            set(&mut cfg.grid_size, grid_size);
            commands::diff_grid(&cfg, out_dir(&common))
        }
    }
}
