//! Exact Gaussian log-likelihoods for arbitrarily subsampled data and Monte
//! Carlo averaged likelihood surfaces for the peak frequency ω₀ of an AR(2)
//! process (`φ₁ = 2ρ cos 2πω₀`, `φ₂ = -ρ²`).
//!
//! With only even-index data the covariance involves even lags only, and
//! `γ(2h)` is unchanged by `ω₀ → 1/2 - ω₀`; the surface is then exactly
//! symmetric about 1/4. High-rate data break the tie.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::linalg::{Cholesky, Matrix};
use crate::process::{ar2_model, autocovariance, SpectralModel, ToeplitzSampler};
use crate::spectrum::quad_points_for_lag;
use crate::stats::{map_indexed, rng_from_seed};

/// Cholesky factor of the covariance of a zero-mean stationary process
/// observed at a fixed set of base-grid indices. Reusable across datasets
/// that share the observation pattern.
#[derive(Debug, Clone)]
pub struct PatternCovariance {
    indices: Vec<usize>,
    factor: Cholesky,
    log_det: f64,
}

impl PatternCovariance {
    /// `gamma` must cover lags up to `max(indices) - min(indices)`.
    pub fn new(gamma: &[f64], indices: &[usize]) -> Result<Self> {
        check_indices(indices)?;
        let n = indices.len();
        let span = span(indices);
        if gamma.len() <= span {
            return Err(Error::LengthMismatch {
                expected: span + 1,
                found: gamma.len(),
            });
        }
        let mut sigma = Matrix::zeros(n, n);
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate().take(a + 1) {
                let v = gamma[i.abs_diff(j)];
                sigma[(a, b)] = v;
                sigma[(b, a)] = v;
            }
        }
        let factor = Cholesky::new(&sigma)?;
        let log_det = factor.log_det();
        Ok(Self {
            indices: indices.to_vec(),
            factor,
            log_det,
        })
    }

    pub fn for_model(model: &SpectralModel, indices: &[usize]) -> Result<Self> {
        check_indices(indices)?;
        let lag = span(indices);
        let gamma = autocovariance(model, lag, quad_points_for_lag(lag))?;
        Self::new(&gamma, indices)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Log density of `values` (ordered as `indices`).
    pub fn log_density(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.indices.len() {
            return Err(Error::LengthMismatch {
                expected: self.indices.len(),
                found: values.len(),
            });
        }
        let n = values.len() as f64;
        let quad = self.factor.inverse_quadratic_form(values);
        Ok(-0.5 * (n * (2.0 * PI).ln() + self.log_det + quad))
    }
}

fn span(indices: &[usize]) -> usize {
    let lo = indices.iter().min().copied().unwrap_or(0);
    let hi = indices.iter().max().copied().unwrap_or(0);
    hi - lo
}

fn check_indices(indices: &[usize]) -> Result<()> {
    if indices.is_empty() {
        return Err(invalid("no observations"));
    }
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(invalid(format!("duplicate observation index {}", w[0])));
    }
    Ok(())
}

/// Zero-mean multivariate normal log density of `(base index, value)`
/// observations under `model`.
pub fn exact_loglik(model: &SpectralModel, observations: &[(usize, f64)]) -> Result<f64> {
    let (indices, values): (Vec<usize>, Vec<f64>) = observations.iter().copied().unzip();
    PatternCovariance::for_model(model, &indices)?.log_density(&values)
}

/// Log-likelihood values over a grid of candidate ω₀.
#[derive(Debug, Clone, PartialEq)]
pub struct LikelihoodSurface {
    pub omegas: Vec<f64>,
    /// `None` marks a grid point whose covariance failed to factorise.
    pub loglik: Vec<Option<f64>>,
    pub aligned: bool,
}

impl LikelihoodSurface {
    pub fn max(&self) -> Option<(usize, f64)> {
        self.loglik
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (i, v)))
            .fold(None, |best, (i, v)| match best {
                Some((_, b)) if b >= v => best,
                _ => Some((i, v)),
            })
    }

    /// Subtracts the maximum so that it becomes exactly zero.
    pub fn align(&self) -> LikelihoodSurface {
        let shift = self.max().map_or(0.0, |(_, m)| m);
        LikelihoodSurface {
            omegas: self.omegas.clone(),
            loglik: self.loglik.iter().map(|v| v.map(|x| x - shift)).collect(),
            aligned: true,
        }
    }

    fn window(&self, lo: f64, hi: f64) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.omegas
            .iter()
            .zip(&self.loglik)
            .enumerate()
            .filter(move |(_, (w, _))| **w >= lo && **w <= hi)
            .filter_map(|(i, (_, v))| v.map(|v| (i, v)))
    }

    /// Largest value with ω in `[lo, hi]`.
    pub fn max_in(&self, lo: f64, hi: f64) -> Option<(usize, f64)> {
        self.window(lo, hi).fold(None, |best, (i, v)| match best {
            Some((_, b)) if b >= v => best,
            _ => Some((i, v)),
        })
    }

    /// Smallest value with ω in `[lo, hi]`.
    pub fn min_in(&self, lo: f64, hi: f64) -> Option<(usize, f64)> {
        self.window(lo, hi).fold(None, |best, (i, v)| match best {
            Some((_, b)) if b <= v => best,
            _ => Some((i, v)),
        })
    }
}

/// `n` equally spaced ω₀ values on `[1/(2n), (n-1)/(2n)]`; symmetric about
/// 1/4 and clear of the degenerate endpoints. The default uses `n = 201`.
pub fn default_omega_grid(n: usize) -> Vec<f64> {
    let nf = n as f64;
    let lo = 0.5 / nf;
    let hi = 0.5 * (nf - 1.0) / nf;
    if n == 1 {
        return alloc::vec![0.25];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (nf - 1.0))
        .collect()
}

pub const DEFAULT_GRID_SIZE: usize = 201;

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(invalid("omega grid is empty"));
    }
    if let Some(&w) = grid.iter().find(|&&w| !(w > 0.0 && w < 0.5)) {
        return Err(Error::Domain {
            name: "grid omega",
            value: w,
            expected: "(0, 1/2)",
        });
    }
    if grid.windows(2).any(|p| p[1] <= p[0]) {
        return Err(invalid("omega grid must be strictly increasing"));
    }
    Ok(())
}

fn grid_factors(
    grid: &[f64],
    indices: &[usize],
    modulus: f64,
    sigma2: f64,
) -> Result<Vec<Option<PatternCovariance>>> {
    check_grid(grid)?;
    check_indices(indices)?;
    let models = grid
        .iter()
        .map(|&w| ar2_model(w, modulus, sigma2))
        .collect::<Result<Vec<_>>>()?;
    Ok(map_indexed(models.len(), |i| {
        PatternCovariance::for_model(&models[i], indices).ok()
    }))
}

/// Log-likelihood of the data at every grid ω₀ (AR(2) with the given
/// modulus and innovation variance). Grid points whose covariance fails to
/// factorise are recorded as `None`.
pub fn omega_surface(
    data: &[(usize, f64)],
    grid: &[f64],
    modulus: f64,
    sigma2: f64,
) -> Result<LikelihoodSurface> {
    if data.is_empty() {
        return Err(invalid("no observations"));
    }
    let (indices, values): (Vec<usize>, Vec<f64>) = data.iter().copied().unzip();
    let factors = grid_factors(grid, &indices, modulus, sigma2)?;
    let loglik = factors
        .iter()
        .map(|f| f.as_ref().and_then(|f| f.log_density(&values).ok()))
        .collect();
    Ok(LikelihoodSurface {
        omegas: grid.to_vec(),
        loglik,
        aligned: false,
    })
}

/// A Monte Carlo likelihood-surface experiment: `n_low` observations at
/// stride `delta_low`, immediately followed by `n_high` consecutive
/// observations.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentDesign {
    pub n_low: usize,
    pub n_high: usize,
    pub delta_low: usize,
    pub replicates: usize,
    pub omega_true: f64,
    pub modulus: f64,
    pub grid: Vec<f64>,
    pub seed: u64,
}

impl ExperimentDesign {
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(invalid("replicates must be at least 1"));
        }
        if self.n_low == 0 && self.n_high == 0 {
            return Err(invalid("n_low and n_high cannot both be zero"));
        }
        if self.delta_low == 0 {
            return Err(invalid("delta_low must be at least 1"));
        }
        check_grid(&self.grid)?;
        crate::process::ar2_from_omega(self.omega_true, self.modulus)?;
        Ok(())
    }

    /// Base-grid indices of the low-rate block followed by the high-rate block.
    pub fn indices(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.n_low).map(|k| k * self.delta_low).collect();
        let start = if self.n_low > 0 {
            (self.n_low - 1) * self.delta_low + 1
        } else {
            0
        };
        idx.extend(start..start + self.n_high);
        idx
    }

    /// Seed for replicate `r`.
    pub fn replicate_seed(&self, r: usize) -> u64 {
        self.seed ^ r as u64
    }
}

/// Averaged, max-aligned surface with a per-point standard error of the
/// aligned height.
#[derive(Debug, Clone, PartialEq)]
pub struct McSurface {
    pub surface: LikelihoodSurface,
    /// Standard error across replicates of `ℓ_r(ω) - ℓ_r(ω*)`, with ω* the
    /// argmax of the averaged surface.
    pub stderr: Vec<Option<f64>>,
    pub replicates: usize,
}

/// Simulates `design.replicates` datasets from the true AR(2), evaluates the
/// ω₀ surface of each, averages log-likelihoods in replicate order and
/// subtracts the maximum.
pub fn mc_average_surface(design: &ExperimentDesign) -> Result<McSurface> {
    design.validate()?;
    let indices = design.indices();
    let span = *indices.last().expect("validated non-empty");
    let factors = grid_factors(&design.grid, &indices, design.modulus, 1.0)?;

    let truth = ar2_model(design.omega_true, design.modulus, 1.0)?;
    let gamma = autocovariance(&truth, span, quad_points_for_lag(span))?;
    let sampler = ToeplitzSampler::new(&gamma)?;

    let rows: Vec<Vec<Option<f64>>> = map_indexed(design.replicates, |r| {
        let mut rng = rng_from_seed(design.replicate_seed(r));
        let path = sampler.sample(span + 1, &mut rng);
        let values: Vec<f64> = indices.iter().map(|&i| path[i]).collect();
        factors
            .iter()
            .map(|f| f.as_ref().and_then(|f| f.log_density(&values).ok()))
            .collect()
    });

    let g = design.grid.len();
    let mut sums = alloc::vec![0.0; g];
    let mut counts = alloc::vec![0usize; g];
    for row in &rows {
        for (j, v) in row.iter().enumerate() {
            if let Some(v) = v {
                sums[j] += v;
                counts[j] += 1;
            }
        }
    }
    let mean: Vec<Option<f64>> = sums
        .iter()
        .zip(&counts)
        .map(|(&s, &c)| (c > 0).then(|| s / c as f64))
        .collect();
    let raw = LikelihoodSurface {
        omegas: design.grid.clone(),
        loglik: mean,
        aligned: false,
    };
    let surface = raw.align();

    let stderr = match raw.max() {
        None => alloc::vec![None; g],
        Some((star, _)) => (0..g)
            .map(|j| {
                let diffs: Vec<f64> = rows
                    .iter()
                    .filter_map(|row| Some(row[j]? - row[star]?))
                    .collect();
                if diffs.len() < 2 {
                    return None;
                }
                Some(crate::stats::mean_and_stderr(&diffs).1)
            })
            .collect(),
    };

    Ok(McSurface {
        surface,
        stderr,
        replicates: design.replicates,
    })
}
