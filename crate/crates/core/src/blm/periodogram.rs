use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Result};
use crate::process::SampledSeries;

/// Minimum series length accepted by [`log_periodogram`].
pub const MIN_PERIODOGRAM_LENGTH: usize = 8;

/// Log-periodogram of one series at its interior Fourier frequencies
/// `ν_j = j/N`, `j = 1..=⌊(N-1)/2⌋`, in units of the series' own sampling rate.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodogramData {
    pub label: String,
    pub stride: usize,
    pub length: usize,
    pub frequencies: Vec<f64>,
    pub log_values: Vec<f64>,
}

/// Interior Fourier frequencies `j/n`, `j = 1..=⌊(n-1)/2⌋`.
pub fn fourier_frequencies(n: usize) -> Vec<f64> {
    (1..=(n.saturating_sub(1)) / 2)
        .map(|j| j as f64 / n as f64)
        .collect()
}

/// Periodogram ordinates `I_j = |Σ_t (x_t - x̄) e^{-i2πjt/N}|² / N` for the
/// requested Fourier indices. Under the crate's convention `E[I_j] ≈ f(j/N)`.
pub fn periodogram_at(x: &[f64], fourier_indices: impl Iterator<Item = usize>) -> Vec<f64> {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let centred: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let twiddle: Vec<(f64, f64)> = (0..n)
        .map(|k| (2.0 * PI * k as f64 / n as f64).sin_cos())
        .collect();
    fourier_indices
        .map(|j| {
            let (mut re, mut im) = (0.0, 0.0);
            let mut k = 0usize;
            for &v in &centred {
                let (s, c) = twiddle[k];
                re += v * c;
                im -= v * s;
                k += j;
                if k >= n {
                    k %= n;
                }
            }
            (re * re + im * im) / n as f64
        })
        .collect()
}

/// Log-periodogram of a series (any stride); the data are mean-centred and
/// the frequencies 0 and 1/2 are excluded.
pub fn log_periodogram(series: &SampledSeries) -> Result<PeriodogramData> {
    log_periodogram_labelled(series, String::new())
}

pub fn log_periodogram_labelled(series: &SampledSeries, label: String) -> Result<PeriodogramData> {
    let n = series.len();
    if n < MIN_PERIODOGRAM_LENGTH {
        return Err(invalid(alloc::format!(
            "periodogram needs at least {MIN_PERIODOGRAM_LENGTH} observations, got {n}"
        )));
    }
    let frequencies = fourier_frequencies(n);
    let ordinates = periodogram_at(series.values(), 1..=frequencies.len());
    let log_values = ordinates.iter().map(|v| v.ln()).collect();
    Ok(PeriodogramData {
        label,
        stride: series.stride(),
        length: n,
        frequencies,
        log_values,
    })
}
