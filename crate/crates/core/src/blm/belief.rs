use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::linalg::{clip_psd, Matrix};
use crate::process::LogSpectrum;

/// Tolerance (relative to the trace) below which negative eigenvalues of a
/// supplied variance matrix are clipped to zero.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// Expectation vector and variance matrix of the log-spectrum basis
/// coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefState {
    mean: Vec<f64>,
    variance: Matrix,
}

impl BeliefState {
    /// Validates shape, symmetry and positive semi-definiteness. Eigenvalues
    /// in `[-1e-10·trace, 0)` are clipped to zero.
    pub fn new(mean: Vec<f64>, variance: Matrix) -> Result<Self> {
        Self::with_tolerance(mean, variance, PSD_TOLERANCE)
    }

    pub(crate) fn with_tolerance(mean: Vec<f64>, variance: Matrix, tol: f64) -> Result<Self> {
        if mean.is_empty() {
            return Err(invalid("belief state needs at least one coefficient"));
        }
        if variance.rows() != mean.len() || variance.cols() != mean.len() {
            return Err(Error::LengthMismatch {
                expected: mean.len(),
                found: variance.rows().max(variance.cols()),
            });
        }
        if mean.iter().chain(variance.as_slice()).any(|v| !v.is_finite()) {
            return Err(invalid("belief state contains non-finite values"));
        }
        let scale = variance
            .as_slice()
            .iter()
            .fold(0.0_f64, |m, v| m.max(v.abs()));
        if variance.asymmetry() > 1e-9 * scale.max(1e-300) {
            return Err(invalid("variance matrix is not symmetric"));
        }
        let variance = clip_psd(&variance, tol)?;
        Ok(Self { mean, variance })
    }

    /// For variances already known to be valid.
    pub(crate) fn from_parts_unchecked(mean: Vec<f64>, variance: Matrix) -> Self {
        debug_assert_eq!(mean.len(), variance.rows());
        Self { mean, variance }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn variance(&self) -> &Matrix {
        &self.variance
    }

    /// The log-spectrum whose coefficients are the expectation.
    pub fn mean_log_spectrum(&self) -> LogSpectrum {
        LogSpectrum::new(self.mean.clone()).expect("belief mean is finite and non-empty")
    }

    pub fn trace(&self) -> f64 {
        self.variance.trace()
    }
}

/// Diagonal smoothness prior on cosine-basis coefficients:
/// `Var(β_m) = c / (1 + (m/m₀)^{2r})`, independent, with
/// `E(β₀) = intercept_mean` and all other means zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorSpec {
    pub basis_size: usize,
    pub intercept_mean: f64,
    pub scale: f64,
    pub smoothness: f64,
    pub cutoff: f64,
}

impl Default for PriorSpec {
    fn default() -> Self {
        Self {
            basis_size: 32,
            intercept_mean: 0.0,
            scale: 1.0,
            smoothness: 2.0,
            cutoff: 4.0,
        }
    }
}

impl PriorSpec {
    pub fn validate(&self) -> Result<()> {
        if self.basis_size == 0 {
            return Err(invalid("basis_size must be at least 1"));
        }
        for (name, v) in [
            ("scale", self.scale),
            ("smoothness", self.smoothness),
            ("cutoff", self.cutoff),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain {
                    name,
                    value: v,
                    expected: "positive reals",
                });
            }
        }
        if !self.intercept_mean.is_finite() {
            return Err(Error::Domain {
                name: "intercept_mean",
                value: self.intercept_mean,
                expected: "finite reals",
            });
        }
        Ok(())
    }

    /// Prior variances `v_m`, strictly decreasing in `m`.
    pub fn variances(&self) -> Vec<f64> {
        (0..self.basis_size)
            .map(|m| {
                let ratio = m as f64 / self.cutoff;
                self.scale / (1.0 + ratio.powf(2.0 * self.smoothness))
            })
            .collect()
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut mean = vec![0.0; self.basis_size];
        if let Some(first) = mean.first_mut() {
            *first = self.intercept_mean;
        }
        mean
    }

    pub fn belief(&self) -> Result<BeliefState> {
        self.validate()?;
        BeliefState::new(self.mean(), Matrix::from_diagonal(&self.variances()))
    }
}
