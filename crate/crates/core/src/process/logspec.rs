use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::spectrum::Spectrum;

/// Cosine basis on `[0, 1/2]`: `ψ₀ = 1`, `ψ_m(ω) = cos(2πmω)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CosineBasis {
    pub size: usize,
}

impl CosineBasis {
    pub fn new(size: usize) -> Self {
        Self { size }
    }

    /// Fills `out[m] = ψ_m(ω)` by the Chebyshev recurrence.
    pub fn eval_into(&self, omega: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.size);
        if self.size == 0 {
            return;
        }
        out[0] = 1.0;
        if self.size == 1 {
            return;
        }
        let c1 = (2.0 * PI * omega).cos();
        out[1] = c1;
        for m in 2..self.size {
            out[m] = 2.0 * c1 * out[m - 1] - out[m - 2];
        }
    }

    pub fn eval(&self, omega: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.size];
        self.eval_into(omega, &mut out);
        out
    }

    /// Design matrix with one row per frequency.
    pub fn design(&self, omegas: &[f64]) -> Matrix {
        let mut m = Matrix::zeros(omegas.len(), self.size);
        for (i, &w) in omegas.iter().enumerate() {
            self.eval_into(w, m.row_mut(i));
        }
        m
    }
}

/// Log-spectral density `log f(ω) = Σ β_m ψ_m(ω)` in the cosine basis.
///
/// The expansion is even and 1-periodic, so it can be evaluated at any real
/// frequency without reduction.
#[derive(Debug, Clone, PartialEq)]
pub struct LogSpectrum {
    coefficients: Vec<f64>,
}

impl LogSpectrum {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(crate::error::invalid("log-spectrum needs at least one coefficient"));
        }
        if let Some(pos) = coefficients.iter().position(|c| !c.is_finite()) {
            return Err(Error::Domain {
                name: "coefficient",
                value: coefficients[pos],
                expected: "finite reals",
            });
        }
        Ok(Self { coefficients })
    }

    /// Flat spectrum `f ≡ σ²`.
    pub fn flat(variance: f64, basis_size: usize) -> Result<Self> {
        if !(variance > 0.0) {
            return Err(Error::InnovationVariance(variance));
        }
        let mut c = vec![0.0; basis_size.max(1)];
        c[0] = variance.ln();
        Self::new(c)
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn basis(&self) -> CosineBasis {
        CosineBasis::new(self.coefficients.len())
    }

    pub fn eval_log(&self, omega: f64) -> f64 {
        // Clenshaw summation of Σ β_m cos(2πmω)
        let x = (2.0 * PI * omega).cos();
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coefficients.iter().skip(1).rev() {
            let b0 = c + 2.0 * x * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coefficients[0] + x * b1 - b2
    }

    pub fn log_curve(&self, omegas: &[f64]) -> Vec<f64> {
        omegas.iter().map(|&w| self.eval_log(w)).collect()
    }
}

impl Spectrum for LogSpectrum {
    fn density(&self, omega: f64) -> f64 {
        self.eval_log(omega).exp()
    }

    fn log_density(&self, omega: f64) -> f64 {
        self.eval_log(omega)
    }
}
