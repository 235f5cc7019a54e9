use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::acov::autocovariance;
use super::series::SampledSeries;
use crate::error::{invalid, Error, Result};
use crate::spectrum::{quad_points_for_lag, Spectrum};
use crate::stats::{rng_from_seed, standard_normal, SeededRng};

/// Exact sampler for a zero-mean Gaussian vector with Toeplitz covariance
/// `Toeplitz(γ(0..n))`.
///
/// Uses the Durbin–Levinson innovations form
/// `x_t = Σ_{j=1}^{t} φ_{t,j} x_{t-j} + √v_t z_t`, which is the Cholesky
/// factorisation of the Toeplitz matrix written as a recursion: `v_t` are the
/// squared Cholesky pivots. Paths are prefix-consistent: for a fixed stream
/// of normals, the first `m` values do not depend on the requested length.
#[derive(Debug, Clone)]
pub struct ToeplitzSampler {
    /// Row `t` holds `φ_{t,1..=t}`, stored contiguously.
    coefficients: Vec<f64>,
    innovation_sd: Vec<f64>,
}

impl ToeplitzSampler {
    pub fn new(gamma: &[f64]) -> Result<Self> {
        let n = gamma.len();
        if n == 0 {
            return Err(invalid("need at least one autocovariance"));
        }
        let mut coefficients = Vec::with_capacity(n * (n - 1) / 2);
        let mut innovation_sd = Vec::with_capacity(n);
        let mut v = gamma[0];
        check_pivot(0, v)?;
        innovation_sd.push(v.sqrt());
        let mut prev: Vec<f64> = Vec::new();
        for t in 1..n {
            let acc: f64 = (1..t).map(|j| prev[j - 1] * gamma[t - j]).sum();
            let kappa = (gamma[t] - acc) / v;
            let mut row = vec![0.0; t];
            for j in 1..t {
                row[j - 1] = prev[j - 1] - kappa * prev[t - j - 1];
            }
            row[t - 1] = kappa;
            v *= 1.0 - kappa * kappa;
            check_pivot(t, v)?;
            innovation_sd.push(v.sqrt());
            coefficients.extend_from_slice(&row);
            prev = row;
        }
        Ok(Self {
            coefficients,
            innovation_sd,
        })
    }

    pub fn max_len(&self) -> usize {
        self.innovation_sd.len()
    }

    /// Prediction-error variances `v_t` (squared Cholesky pivots).
    pub fn pivots(&self) -> impl Iterator<Item = f64> + '_ {
        self.innovation_sd.iter().map(|s| s * s)
    }

    /// Transforms standard normals `z` into a correlated path of the same length.
    pub fn colour(&self, z: &[f64]) -> Vec<f64> {
        let n = z.len().min(self.max_len());
        let mut x = Vec::with_capacity(n);
        for t in 0..n {
            let start = t * (t.max(1) - 1) / 2;
            let row = &self.coefficients[start..start + t];
            let pred: f64 = row.iter().enumerate().map(|(j, &phi)| phi * x[t - 1 - j]).sum();
            x.push(pred + self.innovation_sd[t] * z[t]);
        }
        x
    }

    pub fn sample(&self, n: usize, rng: &mut SeededRng) -> Vec<f64> {
        let z: Vec<f64> = (0..n.min(self.max_len())).map(|_| standard_normal(rng)).collect();
        self.colour(&z)
    }
}

fn check_pivot(index: usize, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::NotPositiveDefinite { index, pivot: v })
    }
}

/// Draws a zero-mean Gaussian path of length `n` from any spectrum.
/// Deterministic given `seed`.
pub fn simulate<S: Spectrum + ?Sized>(spectrum: &S, n: usize, seed: u64) -> Result<SampledSeries> {
    if n == 0 {
        return Err(invalid("simulation length must be at least 1"));
    }
    let gamma = autocovariance(spectrum, n - 1, quad_points_for_lag(n))?;
    let sampler = ToeplitzSampler::new(&gamma)?;
    let mut rng = rng_from_seed(seed);
    SampledSeries::dense(sampler.sample(n, &mut rng))
}
