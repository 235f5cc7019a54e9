use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::spectrum::Spectrum;

/// Seasonal ARMA model
/// `φ(B) Φ(Bˢ) x_t = θ(B) Θ(Bˢ) e_t`, `e_t ~ N(0, σ²)`, with
/// `φ(B) = 1 - Σ φ_i Bⁱ` and `θ(B) = 1 + Σ θ_i Bⁱ`.
///
/// Seasonal factors are multiplied out at construction so every evaluation
/// goes through a single pair of operator polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralModel {
    ar: Vec<f64>,
    ma: Vec<f64>,
    seasonal_ar: Vec<f64>,
    seasonal_ma: Vec<f64>,
    season_period: usize,
    innovation_variance: f64,
    ar_operator: Vec<f64>,
    ma_operator: Vec<f64>,
}

impl SpectralModel {
    pub fn new(
        ar: Vec<f64>,
        ma: Vec<f64>,
        seasonal_ar: Vec<f64>,
        seasonal_ma: Vec<f64>,
        season_period: usize,
        innovation_variance: f64,
    ) -> Result<Self> {
        if !(innovation_variance > 0.0) || !innovation_variance.is_finite() {
            return Err(Error::InnovationVariance(innovation_variance));
        }
        if season_period == 0 {
            return Err(Error::Domain {
                name: "season_period",
                value: 0.0,
                expected: "positive integers",
            });
        }
        if ar
            .iter()
            .chain(&ma)
            .chain(&seasonal_ar)
            .chain(&seasonal_ma)
            .any(|c| !c.is_finite())
        {
            return Err(crate::error::invalid("model coefficients must be finite"));
        }
        let ar_operator = multiply(
            &operator(&ar, 1, -1.0),
            &operator(&seasonal_ar, season_period, -1.0),
        );
        let ma_operator = multiply(
            &operator(&ma, 1, 1.0),
            &operator(&seasonal_ma, season_period, 1.0),
        );
        if !roots_outside_unit_circle(&ar_operator) {
            return Err(Error::NonCausal);
        }
        if !roots_outside_unit_circle(&ma_operator) {
            return Err(Error::NonInvertible);
        }
        Ok(Self {
            ar,
            ma,
            seasonal_ar,
            seasonal_ma,
            season_period,
            innovation_variance,
            ar_operator,
            ma_operator,
        })
    }

    pub fn white_noise(variance: f64) -> Result<Self> {
        Self::new(vec![], vec![], vec![], vec![], 1, variance)
    }

    pub fn arma(ar: Vec<f64>, ma: Vec<f64>, variance: f64) -> Result<Self> {
        Self::new(ar, ma, vec![], vec![], 1, variance)
    }

    pub fn ar(&self) -> &[f64] {
        &self.ar
    }

    pub fn ma(&self) -> &[f64] {
        &self.ma
    }

    pub fn seasonal_ar(&self) -> &[f64] {
        &self.seasonal_ar
    }

    pub fn seasonal_ma(&self) -> &[f64] {
        &self.seasonal_ma
    }

    pub fn season_period(&self) -> usize {
        self.season_period
    }

    pub fn innovation_variance(&self) -> f64 {
        self.innovation_variance
    }

    /// Full autoregressive operator `1 - Σ a_k Bᵏ` as coefficients `[1, -a_1, …]`.
    pub fn ar_operator(&self) -> &[f64] {
        &self.ar_operator
    }

    /// Full moving-average operator `1 + Σ b_k Bᵏ` as coefficients `[1, b_1, …]`.
    pub fn ma_operator(&self) -> &[f64] {
        &self.ma_operator
    }

    /// Expanded (non-seasonal) AR coefficients `a_k` with `x_t = Σ a_k x_{t-k} + …`.
    pub fn expanded_ar(&self) -> Vec<f64> {
        self.ar_operator[1..].iter().map(|c| -c).collect()
    }

    /// Evaluates the density on a vector of frequencies in `[0, 1/2]`.
    pub fn spectral_density(&self, omegas: &[f64]) -> Result<Vec<f64>> {
        omegas
            .iter()
            .map(|&w| {
                if !(0.0..=0.5).contains(&w) {
                    return Err(Error::Domain {
                        name: "omega",
                        value: w,
                        expected: "[0, 1/2]",
                    });
                }
                Ok(self.density(w))
            })
            .collect()
    }
}

impl Spectrum for SpectralModel {
    fn density(&self, omega: f64) -> f64 {
        let theta = 2.0 * PI * omega;
        self.innovation_variance * transfer_power(&self.ma_operator, theta)
            / transfer_power(&self.ar_operator, theta)
    }
}

/// Coefficients of the causal AR(2) whose characteristic root has argument
/// `2π ω₀` and the given modulus: `φ₁ = 2ρ cos(2πω₀)`, `φ₂ = -ρ²`.
pub fn ar2_from_omega(omega0: f64, modulus: f64) -> Result<(f64, f64)> {
    if !(omega0 > 0.0 && omega0 < 0.5) {
        return Err(Error::Domain {
            name: "omega0",
            value: omega0,
            expected: "(0, 1/2)",
        });
    }
    if !(modulus > 0.0 && modulus < 1.0) {
        return Err(Error::Domain {
            name: "modulus",
            value: modulus,
            expected: "(0, 1)",
        });
    }
    Ok((2.0 * modulus * (2.0 * PI * omega0).cos(), -modulus * modulus))
}

/// The AR(2) model built from `ar2_from_omega` with the given innovation variance.
pub fn ar2_model(omega0: f64, modulus: f64, innovation_variance: f64) -> Result<SpectralModel> {
    let (phi1, phi2) = ar2_from_omega(omega0, modulus)?;
    SpectralModel::arma(vec![phi1, phi2], vec![], innovation_variance)
}

/// `1 + sign Σ c_i B^{i·period}`.
fn operator(coefs: &[f64], period: usize, sign: f64) -> Vec<f64> {
    let mut out = vec![0.0; coefs.len() * period + 1];
    out[0] = 1.0;
    for (i, &c) in coefs.iter().enumerate() {
        out[(i + 1) * period] = sign * c;
    }
    out
}

fn multiply(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `|P(e^{-iθ})|²` for `P(z) = Σ c_k zᵏ`.
pub(crate) fn transfer_power(coefs: &[f64], theta: f64) -> f64 {
    let (s1, c1) = theta.sin_cos();
    let (mut c, mut s) = (1.0_f64, 0.0_f64);
    let (mut re, mut im) = (0.0, 0.0);
    for (k, &a) in coefs.iter().enumerate() {
        if k > 0 {
            let next_c = c * c1 - s * s1;
            s = s * c1 + c * s1;
            c = next_c;
        }
        re += a * c;
        im -= a * s;
    }
    re * re + im * im
}

/// Schur–Cohn step-down test: true when every root of
/// `1 + c_1 z + … + c_p zᵖ` lies strictly outside the unit circle.
pub(crate) fn roots_outside_unit_circle(poly: &[f64]) -> bool {
    let mut a: Vec<f64> = poly.to_vec();
    while a.len() > 1 && a[a.len() - 1] == 0.0 {
        a.pop();
    }
    while a.len() > 1 {
        let p = a.len() - 1;
        let k = a[p] / a[0];
        if !(k.abs() < 1.0 - 1e-12) {
            return false;
        }
        let denom = 1.0 - k * k;
        let next: Vec<f64> = (0..p).map(|i| (a[i] - k * a[p - i]) / denom).collect();
        a = next;
    }
    true
}
