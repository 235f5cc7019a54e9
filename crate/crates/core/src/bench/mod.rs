//! Monte Carlo scoring of the log-spectrum estimator on randomly drawn
//! processes, plus the interpolation baselines it is compared against.

mod baseline;
mod interp;

pub use baseline::{
    baseline_spectra, daniell_span, power_fraction_below, smoothed_periodogram, spline_interpolate,
    yule_walker_aic, ArFit, BaselineSpectra, MIN_BASELINE_LENGTH,
};
pub use interp::{InterpolationComparison, InterpolationScenario, InterpolationStudy};

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::blm::{
    forecast_moments, log_periodogram, Adjuster, DataLayout, PriorSpec, DEFAULT_MC_SAMPLES,
};
use crate::error::{invalid, Error, Result};
use crate::process::{autocovariance, LogSpectrum, SampledSeries, ToeplitzSampler};
use crate::spectrum::{quad_points_for_lag, standard_grid};
use crate::stats::{derive_seed, map_indexed, mean_and_stderr, rng_from_seed, standard_normals};

const PROCESS_STREAM: u64 = 1;
const PATH_STREAM: u64 = 2;
const MOMENT_STREAM: u64 = 3;

/// Default number of grid frequencies for scoring.
pub const DEFAULT_SCORE_GRID: usize = 128;

/// `N_ω⁻¹ Σ_j (log f(ω_j) − log f̂(ω_j))²` over a shared grid.
pub fn discrepancy(truth: &[f64], estimate: &[f64]) -> Result<f64> {
    if truth.len() != estimate.len() {
        return Err(Error::LengthMismatch {
            expected: truth.len(),
            found: estimate.len(),
        });
    }
    if truth.is_empty() {
        return Err(invalid("discrepancy needs a non-empty grid"));
    }
    let ss: f64 = truth
        .iter()
        .zip(estimate)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(ss / truth.len() as f64)
}

/// Draws a log-spectrum from the prior: `β_m = E(β_m) + √v_m z_m`.
pub fn random_process(prior: &PriorSpec, seed: u64) -> Result<LogSpectrum> {
    prior.validate()?;
    let mut rng = rng_from_seed(seed);
    let z = standard_normals(&mut rng, prior.basis_size);
    let beta = prior
        .mean()
        .iter()
        .zip(prior.variances())
        .zip(z)
        .map(|((m, v), z)| m + v.sqrt() * z)
        .collect();
    LogSpectrum::new(beta)
}

/// One cell of the benchmark: adjust by `(δ₁, N₁)` data then `(δ₂, N₂)`
/// data drawn from the same path, the second block immediately following
/// the first.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchDesign {
    pub delta1: usize,
    pub n1: usize,
    pub delta2: usize,
    pub n2: usize,
    pub replicates: usize,
    pub score_grid: usize,
    pub seed: u64,
    pub prior: PriorSpec,
    pub mc_samples: usize,
}

impl BenchDesign {
    pub fn new(d1: (usize, usize), d2: (usize, usize), replicates: usize, seed: u64) -> Self {
        Self {
            delta1: d1.0,
            n1: d1.1,
            delta2: d2.0,
            n2: d2.1,
            replicates,
            score_grid: DEFAULT_SCORE_GRID,
            seed,
            prior: PriorSpec::default(),
            mc_samples: DEFAULT_MC_SAMPLES,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.delta1 == 0 || self.delta2 == 0 {
            return Err(invalid("strides must be at least 1"));
        }
        if self.replicates == 0 {
            return Err(invalid("replicates must be at least 1"));
        }
        if self.score_grid < 2 {
            return Err(invalid("score grid needs at least 2 points"));
        }
        self.prior.validate()?;
        DataLayout::fourier(self.delta1, self.n1)?;
        DataLayout::fourier(self.delta2, self.n2)?;
        Ok(())
    }

    pub fn path_len(&self) -> usize {
        self.delta1 * self.n1 + self.delta2 * self.n2
    }
}

/// Outcome of one benchmark cell.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub mean: f64,
    pub stderr: f64,
    pub successes: usize,
    pub failures: usize,
    /// Per-replicate scores in replicate order; `None` for failures.
    pub scores: Vec<Option<f64>>,
}

/// Expected discrepancy of the adjusted mean log-spectrum, estimated over
/// `replicates` processes drawn from the prior. The adjustment gain depends
/// only on the prior and the data layout, so it is computed once.
///
/// Replicate `r` uses a process and path seeded from `(seed, r)` only, so
/// cells sharing a seed share their random processes and paths.
pub fn run_bench(design: &BenchDesign) -> Result<BenchResult> {
    design.validate()?;
    let prior = design.prior.belief()?;
    let layouts = [
        DataLayout::fourier(design.delta1, design.n1)?,
        DataLayout::fourier(design.delta2, design.n2)?,
    ];
    let moments = forecast_moments(
        &prior,
        &layouts,
        design.mc_samples,
        derive_seed(design.seed, MOMENT_STREAM, 0),
    )?;
    let adjuster = Adjuster::new(&prior, &moments)?;
    let grid = standard_grid(design.score_grid);
    let scores = map_indexed(design.replicates, |r| {
        score_replicate(design, &adjuster, &grid, r as u64).ok()
    });
    let ok: Vec<f64> = scores.iter().flatten().copied().collect();
    let (mean, stderr) = mean_and_stderr(&ok);
    Ok(BenchResult {
        mean,
        stderr,
        successes: ok.len(),
        failures: scores.len() - ok.len(),
        scores,
    })
}

fn score_replicate(design: &BenchDesign, adjuster: &Adjuster, grid: &[f64], r: u64) -> Result<f64> {
    let truth = random_process(&design.prior, derive_seed(design.seed, PROCESS_STREAM, r))?;
    let len = design.path_len();
    let gamma = autocovariance(&truth, len - 1, quad_points_for_lag(len))?;
    let sampler = ToeplitzSampler::new(&gamma)?;
    let mut rng = rng_from_seed(derive_seed(design.seed, PATH_STREAM, r));
    let path = sampler.sample(len, &mut rng);
    let split = design.delta1 * design.n1;
    let first = SampledSeries::dense(path[..split].to_vec())?.subsample(design.delta1, 0)?;
    let second = SampledSeries::dense(path[split..].to_vec())?.subsample(design.delta2, 0)?;
    let mut observed = log_periodogram(&first)?.log_values;
    observed.extend(log_periodogram(&second)?.log_values);
    let mean = adjuster.adjusted_mean(&observed)?;
    let estimate = LogSpectrum::new(mean)?;
    discrepancy(&truth.log_curve(grid), &estimate.log_curve(grid))
}

/// A table of benchmark cells: rows are first datasets `(δ₁, N₁)`, columns
/// second datasets `(δ₂, N₂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchTable {
    pub rows: Vec<(usize, usize)>,
    pub cols: Vec<(usize, usize)>,
    /// `cells[i][j]`; `None` if the cell could not be set up at all.
    pub cells: Vec<Vec<Option<BenchResult>>>,
}

/// All `(δ, N)` pairs, δ-major.
pub fn design_product(deltas: &[usize], sizes: &[usize]) -> Vec<(usize, usize)> {
    deltas
        .iter()
        .flat_map(|&d| sizes.iter().map(move |&n| (d, n)))
        .collect()
}

/// Runs [`run_bench`] for every `(row, col)` pair with a shared seed.
/// `template` supplies the replicate count, seed, prior and sampling
/// settings.
pub fn table_sweep(
    rows: &[(usize, usize)],
    cols: &[(usize, usize)],
    template: &BenchDesign,
) -> Result<BenchTable> {
    if rows.is_empty() || cols.is_empty() {
        return Err(invalid("table sweep needs at least one row and one column"));
    }
    let cells = rows
        .iter()
        .map(|&d1| {
            cols.iter()
                .map(|&d2| {
                    let design = BenchDesign {
                        delta1: d1.0,
                        n1: d1.1,
                        delta2: d2.0,
                        n2: d2.1,
                        ..template.clone()
                    };
                    run_bench(&design).ok()
                })
                .collect()
        })
        .collect();
    Ok(BenchTable {
        rows: rows.to_vec(),
        cols: cols.to_vec(),
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn discrepancy_hand_cases() {
        let f = [0.1, -0.4, 2.0];
        assert_eq!(discrepancy(&f, &f).unwrap(), 0.0);
        let shifted: Vec<f64> = f.iter().map(|v| v + 0.5).collect();
        assert!((discrepancy(&f, &shifted).unwrap() - 0.25).abs() < 1e-12);
        assert!((discrepancy(&[1.0, -2.0, 0.0], &[0.0; 3]).unwrap() - 5.0 / 3.0).abs() < 1e-12);
        assert!(discrepancy(&f, &[0.0]).is_err());
    }

    #[test]
    fn random_process_is_seeded() {
        let p = PriorSpec::default();
        assert_eq!(random_process(&p, 3).unwrap(), random_process(&p, 3).unwrap());
        assert_ne!(random_process(&p, 3).unwrap(), random_process(&p, 4).unwrap());
    }

    #[test]
    fn single_replicate_bench() {
        let mut d = BenchDesign::new((1, 16), (2, 16), 1, 5);
        d.mc_samples = 500;
        let r = run_bench(&d).unwrap();
        assert_eq!(r.successes + r.failures, 1);
        if r.successes == 1 {
            assert_eq!(Some(r.mean), r.scores[0]);
        }
        let t = table_sweep(&[(1, 16)], &[(2, 16)], &d).unwrap();
        assert_eq!(t.cells[0][0].as_ref().unwrap().scores, r.scores);
        assert_eq!(design_product(&[1, 2], &[16, 32]), vec![(1, 16), (1, 32), (2, 16), (2, 32)]);
    }
}
