use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

#[allow(unused_imports)]
use num_traits::Float;

use super::belief::BeliefState;
use super::periodogram::{fourier_frequencies, PeriodogramData, MIN_PERIODOGRAM_LENGTH};
use crate::error::{invalid, Result};
use crate::linalg::{dot, symmetric_sqrt, Cholesky, Matrix};
use crate::process::CosineBasis;
use crate::stats::{
    derive_seed, map_indexed, rng_from_seed, standard_normals, EULER_GAMMA,
    LOG_EXPONENTIAL_VARIANCE,
};

pub const DEFAULT_MC_SAMPLES: usize = 2000;
pub const MIN_MC_SAMPLES: usize = 500;

const MOMENT_STREAM: u64 = 0x6d6f_6d65_6e74;

/// Where a dataset's log-periodogram lives: its stride and its coarse-rate
/// Fourier frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct DataLayout {
    pub stride: usize,
    pub frequencies: Vec<f64>,
}

impl DataLayout {
    /// Layout of a length-`n` series at the given stride.
    pub fn fourier(stride: usize, n: usize) -> Result<Self> {
        if stride == 0 {
            return Err(invalid("stride must be at least 1"));
        }
        if n < MIN_PERIODOGRAM_LENGTH {
            return Err(invalid(alloc::format!(
                "series length {n} is below the periodogram minimum {MIN_PERIODOGRAM_LENGTH}"
            )));
        }
        Ok(Self {
            stride,
            frequencies: fourier_frequencies(n),
        })
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }
}

impl From<&PeriodogramData> for DataLayout {
    fn from(p: &PeriodogramData) -> Self {
        Self {
            stride: p.stride,
            frequencies: p.frequencies.clone(),
        }
    }
}

/// Second-order forecast of the stacked log-periodogram vector `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastMoments {
    /// `E(D)`.
    pub expectation: Vec<f64>,
    /// `Var(D)`, including the log-exponential noise variance on the diagonal.
    pub variance: Matrix,
    /// `Cov(β, D)`, one row per coefficient.
    pub covariance: Matrix,
    /// Index range of each dataset inside the stacked vector.
    pub blocks: Vec<Range<usize>>,
}

impl ForecastMoments {
    pub fn data_len(&self) -> usize {
        self.expectation.len()
    }
}

/// Evaluates the noise-free forecast of each log-periodogram ordinate,
/// `log f_δ(ν_j) - γ_EM`, for coefficient vectors.
#[derive(Debug, Clone)]
pub struct FoldedLogForecaster {
    /// Per layout: stride and the design matrix over the δ branch
    /// frequencies `(ν_j + k)/δ` of every ordinate, ordinate-major.
    designs: Vec<(usize, Matrix)>,
    blocks: Vec<Range<usize>>,
    basis_size: usize,
}

impl FoldedLogForecaster {
    pub fn new(basis_size: usize, layouts: &[DataLayout]) -> Result<Self> {
        if layouts.is_empty() {
            return Err(invalid("need at least one dataset layout"));
        }
        let basis = CosineBasis::new(basis_size);
        let mut designs = Vec::with_capacity(layouts.len());
        let mut blocks = Vec::with_capacity(layouts.len());
        let mut start = 0;
        for layout in layouts {
            if layout.stride == 0 {
                return Err(invalid("stride must be at least 1"));
            }
            let d = layout.stride as f64;
            let points: Vec<f64> = layout
                .frequencies
                .iter()
                .flat_map(|&nu| (0..layout.stride).map(move |k| (nu + k as f64) / d))
                .collect();
            designs.push((layout.stride, basis.design(&points)));
            blocks.push(start..start + layout.len());
            start += layout.len();
        }
        Ok(Self {
            designs,
            blocks,
            basis_size,
        })
    }

    pub fn data_len(&self) -> usize {
        self.blocks.last().map_or(0, |b| b.end)
    }

    pub fn blocks(&self) -> &[Range<usize>] {
        &self.blocks
    }

    /// `μ_j(β) = log[(1/δ) Σ_k exp(ψ((ν_j+k)/δ)ᵀβ)] - γ_EM`, stacked over datasets.
    pub fn forecast_into(&self, beta: &[f64], out: &mut [f64]) {
        debug_assert_eq!(beta.len(), self.basis_size);
        let mut pos = 0;
        for (stride, design) in &self.designs {
            let log_delta = (*stride as f64).ln();
            let mut branch = vec![0.0; *stride];
            for row0 in (0..design.rows()).step_by(*stride) {
                for (k, b) in branch.iter_mut().enumerate() {
                    *b = dot(design.row(row0 + k), beta);
                }
                let top = branch.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
                let s: f64 = branch.iter().map(|&v| (v - top).exp()).sum();
                out[pos] = top + s.ln() - log_delta - EULER_GAMMA;
                pos += 1;
            }
        }
    }

    pub fn forecast(&self, beta: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.data_len()];
        self.forecast_into(beta, &mut out);
        out
    }
}

/// Centres the draws and maps them through `L⁻¹`, `LLᵀ` being their sample
/// covariance, so the sample mean is zero and the sample covariance is the
/// identity. `L` keeps the even/odd block structure of reflection pairs, so
/// pairs stay pairs.
fn whiten(z: &mut [Vec<f64>]) -> Result<()> {
    let m = z[0].len();
    let s = z.len() as f64;
    let mut bar = vec![0.0; m];
    for row in z.iter() {
        for (b, v) in bar.iter_mut().zip(row) {
            *b += v;
        }
    }
    bar.iter_mut().for_each(|b| *b /= s);
    let mut cov = Matrix::zeros(m, m);
    for row in z.iter_mut() {
        for (v, b) in row.iter_mut().zip(&bar) {
            *v -= b;
        }
        for a in 0..m {
            for c in 0..=a {
                cov[(a, c)] += row[a] * row[c];
            }
        }
    }
    for a in 0..m {
        for c in 0..=a {
            let v = cov[(a, c)] / (s - 1.0);
            cov[(a, c)] = v;
            cov[(c, a)] = v;
        }
    }
    let chol = Cholesky::new(&cov)?;
    for row in z.iter_mut() {
        chol.solve_lower_in_place(row);
    }
    Ok(())
}

/// Monte Carlo estimate of `E(D)`, `Var(D)` and `Cov(β, D)` under the prior.
///
/// Coefficients are drawn as `μ + A z` and `μ + A S z` in pairs, where `A`
/// is the symmetric square root of the prior variance and
/// `S = diag((-1)^m)` reflects the log-spectrum about ω = 1/4. Both members
/// are exact prior draws; the pairing makes the sample moments inherit the
/// reflection symmetry of even-stride folds exactly. The normals are then
/// whitened, so the coefficient draws reproduce the prior mean and variance
/// exactly and the adjusted variance stays positive semi-definite. An odd
/// `mc_samples` is rounded up. The log-periodogram
/// noise (mean `-γ_EM`, variance `π²/6`, independent) enters analytically.
pub fn forecast_moments(
    prior: &BeliefState,
    layouts: &[DataLayout],
    mc_samples: usize,
    seed: u64,
) -> Result<ForecastMoments> {
    if mc_samples < MIN_MC_SAMPLES {
        return Err(invalid(alloc::format!(
            "mc_samples must be at least {MIN_MC_SAMPLES}, got {mc_samples}"
        )));
    }
    let m = prior.dim();
    let forecaster = FoldedLogForecaster::new(m, layouts)?;
    let j = forecaster.data_len();
    let root = symmetric_sqrt(prior.variance(), super::belief::PSD_TOLERANCE)?;
    let mean = prior.mean();

    let pairs = mc_samples.div_ceil(2);
    let n_samples = 2 * pairs;
    let mut normals: Vec<Vec<f64>> = Vec::with_capacity(n_samples);
    for p in 0..pairs {
        let mut rng = rng_from_seed(derive_seed(seed, MOMENT_STREAM, p as u64));
        let z = standard_normals(&mut rng, m);
        let reflected: Vec<f64> = z
            .iter()
            .enumerate()
            .map(|(i, &v)| if i % 2 == 1 { -v } else { v })
            .collect();
        normals.push(z);
        normals.push(reflected);
    }
    whiten(&mut normals)?;
    let drawn: Vec<(Vec<f64>, Vec<f64>)> = map_indexed(n_samples, |k| {
        let beta: Vec<f64> = root
            .mul_vec(&normals[k])
            .iter()
            .zip(mean)
            .map(|(a, b)| a + b)
            .collect();
        let mu = forecaster.forecast(&beta);
        (beta, mu)
    });
    let samples: Vec<&(Vec<f64>, Vec<f64>)> = drawn.iter().collect();
    let s = samples.len() as f64;

    let mut beta_bar = vec![0.0; m];
    let mut mu_bar = vec![0.0; j];
    for (beta, mu) in &samples {
        for (acc, v) in beta_bar.iter_mut().zip(beta) {
            *acc += v;
        }
        for (acc, v) in mu_bar.iter_mut().zip(mu) {
            *acc += v;
        }
    }
    beta_bar.iter_mut().for_each(|v| *v /= s);
    mu_bar.iter_mut().for_each(|v| *v /= s);

    // centred columns, variable-major, for contiguous dot products
    let mut beta_cols = vec![vec![0.0; samples.len()]; m];
    let mut mu_cols = vec![vec![0.0; samples.len()]; j];
    for (idx, (beta, mu)) in samples.iter().enumerate() {
        for (a, col) in beta_cols.iter_mut().enumerate() {
            col[idx] = beta[a] - beta_bar[a];
        }
        for (a, col) in mu_cols.iter_mut().enumerate() {
            col[idx] = mu[a] - mu_bar[a];
        }
    }
    let denom = (s - 1.0).max(1.0);

    let var_rows: Vec<Vec<f64>> = map_indexed(j, |a| {
        (0..=a).map(|b| dot(&mu_cols[a], &mu_cols[b]) / denom).collect()
    });
    let mut variance = Matrix::zeros(j, j);
    for (a, row) in var_rows.iter().enumerate() {
        for (b, &v) in row.iter().enumerate() {
            variance[(a, b)] = v;
            variance[(b, a)] = v;
        }
        variance[(a, a)] += LOG_EXPONENTIAL_VARIANCE;
    }
    let mut covariance = Matrix::zeros(m, j);
    for a in 0..m {
        for b in 0..j {
            covariance[(a, b)] = dot(&beta_cols[a], &mu_cols[b]) / denom;
        }
    }

    Ok(ForecastMoments {
        expectation: mu_bar,
        variance,
        covariance,
        blocks: forecaster.blocks().to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aliasing::fold;
    use crate::blm::PriorSpec;
    use crate::process::LogSpectrum;
    use approx::assert_relative_eq;

    #[test]
    fn forecaster_matches_fold() {
        let ls = LogSpectrum::new(vec![0.2, 0.9, -0.4, 0.3, 0.1]).unwrap();
        let layouts = [
            DataLayout::fourier(1, 16).unwrap(),
            DataLayout::fourier(3, 12).unwrap(),
        ];
        let fc = FoldedLogForecaster::new(5, &layouts).unwrap();
        let out = fc.forecast(ls.coefficients());
        let mut expected = Vec::new();
        for l in &layouts {
            for v in fold(&ls, l.stride, &l.frequencies).unwrap() {
                expected.push(v.ln() - EULER_GAMMA);
            }
        }
        assert_eq!(out.len(), expected.len());
        for (a, b) in out.iter().zip(&expected) {
            assert_relative_eq!(*a, *b, epsilon = 1e-12);
        }
    }

    #[test]
    fn degenerate_prior_gives_exact_moments() {
        let mean = vec![0.5, -0.3, 0.2];
        let prior = BeliefState::new(mean.clone(), Matrix::zeros(3, 3)).unwrap();
        let layouts = [DataLayout::fourier(2, 20).unwrap()];
        let mom = forecast_moments(&prior, &layouts, 500, 1).unwrap();
        let ls = LogSpectrum::new(mean).unwrap();
        let f = fold(&ls, 2, &layouts[0].frequencies).unwrap();
        for (e, v) in mom.expectation.iter().zip(&f) {
            assert_relative_eq!(*e, v.ln() - EULER_GAMMA, epsilon = 1e-12);
        }
        for a in 0..mom.data_len() {
            for b in 0..mom.data_len() {
                let want = if a == b { LOG_EXPONENTIAL_VARIANCE } else { 0.0 };
                assert_relative_eq!(mom.variance[(a, b)], want, epsilon = 1e-12);
            }
        }
        assert!(mom.covariance.as_slice().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn intercept_only_covariance_equals_prior_variance() {
        let var = 0.7;
        let prior = BeliefState::new(vec![0.0], Matrix::from_diagonal(&[var])).unwrap();
        let layouts = [DataLayout::fourier(1, 32).unwrap()];
        let n = 2000;
        let mom = forecast_moments(&prior, &layouts, n, 3).unwrap();
        // D_j - noise = β₀ - γ_EM exactly, so the MC covariance is the MC
        // variance of β₀; its standard error is var·√(2/(n-1)).
        let se = var * (2.0 / (n as f64 - 1.0)).sqrt();
        for b in 0..mom.data_len() {
            assert!((mom.covariance[(0, b)] - var).abs() < 3.0 * se);
        }
    }

    #[test]
    fn reflection_pairing_zeroes_odd_rows_for_even_strides() {
        let prior = PriorSpec {
            basis_size: 8,
            ..PriorSpec::default()
        }
        .belief()
        .unwrap();
        let layouts = [DataLayout::fourier(2, 24).unwrap()];
        let mom = forecast_moments(&prior, &layouts, 600, 9).unwrap();
        for m in (1..8).step_by(2) {
            for b in 0..mom.data_len() {
                assert!(mom.covariance[(m, b)].abs() < 1e-12);
            }
        }
        // even rows carry real signal
        assert!(mom.covariance[(0, 0)] > 0.1);
    }

    #[test]
    fn deterministic_and_validated() {
        let prior = PriorSpec {
            basis_size: 6,
            ..PriorSpec::default()
        }
        .belief()
        .unwrap();
        let layouts = [DataLayout::fourier(3, 16).unwrap()];
        let a = forecast_moments(&prior, &layouts, 500, 4).unwrap();
        let b = forecast_moments(&prior, &layouts, 500, 4).unwrap();
        assert_eq!(a, b);
        assert!(forecast_moments(&prior, &layouts, 499, 4).is_err());
        assert!(DataLayout::fourier(2, 7).is_err());
    }
}
