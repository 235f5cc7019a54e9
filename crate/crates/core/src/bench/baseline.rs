use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::blm::periodogram_at;
use crate::error::{invalid, Error, Result};
use crate::process::SampledSeries;

/// Natural cubic spline through the observations at their base indices,
/// evaluated at every base index from the first to the last observation.
/// The result is a unit-stride series; observed points are reproduced.
pub fn spline_interpolate(series: &SampledSeries) -> Result<SampledSeries> {
    let n = series.len();
    if n < 4 {
        return Err(invalid(alloc::format!(
            "spline interpolation needs at least 4 points, got {n}"
        )));
    }
    let delta = series.stride();
    if delta == 1 {
        return SampledSeries::new(series.values().to_vec(), 1, 0, series.base_step());
    }
    let y = series.values();
    let h = delta as f64;
    // second derivatives: M_{i-1} + 4 M_i + M_{i+1} = 6 (y_{i+1} - 2y_i + y_{i-1}) / h²,
    // natural ends M_0 = M_{n-1} = 0; Thomas algorithm on the interior
    let interior = n - 2;
    let mut rhs: Vec<f64> = (1..n - 1)
        .map(|i| 6.0 * (y[i + 1] - 2.0 * y[i] + y[i - 1]) / (h * h))
        .collect();
    let mut diag = vec![4.0; interior];
    for i in 1..interior {
        let w = 1.0 / diag[i - 1];
        diag[i] -= w;
        rhs[i] -= w * rhs[i - 1];
    }
    let mut m = vec![0.0; n];
    m[interior] = rhs[interior - 1] / diag[interior - 1];
    for i in (0..interior - 1).rev() {
        m[i + 1] = (rhs[i] - m[i + 2]) / diag[i];
    }
    let total = (n - 1) * delta + 1;
    let mut out = Vec::with_capacity(total);
    for t in 0..total {
        let seg = (t / delta).min(n - 2);
        let a = (t - seg * delta) as f64;
        let b = h - a;
        let v = m[seg] * b * b * b / (6.0 * h)
            + m[seg + 1] * a * a * a / (6.0 * h)
            + (y[seg] / h - m[seg] * h / 6.0) * b
            + (y[seg + 1] / h - m[seg + 1] * h / 6.0) * a;
        out.push(v);
    }
    for (k, &v) in y.iter().enumerate() {
        out[k * delta] = v;
    }
    SampledSeries::new(out, 1, 0, series.base_step())
}

/// Yule–Walker AR fit with its selected order.
#[derive(Debug, Clone, PartialEq)]
pub struct ArFit {
    pub order: usize,
    pub coefficients: Vec<f64>,
    pub innovation_variance: f64,
    pub aic: Vec<f64>,
}

impl ArFit {
    pub fn log_density(&self, omega: f64) -> f64 {
        let (mut re, mut im) = (1.0, 0.0);
        for (k, &phi) in self.coefficients.iter().enumerate() {
            let (s, c) = (2.0 * PI * omega * (k + 1) as f64).sin_cos();
            re -= phi * c;
            im += phi * s;
        }
        self.innovation_variance.ln() - (re * re + im * im).ln()
    }
}

fn centred_acov(x: &[f64], max_lag: usize) -> Vec<f64> {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let c: Vec<f64> = x.iter().map(|v| v - mean).collect();
    (0..=max_lag)
        .map(|h| c[..n - h].iter().zip(&c[h..]).map(|(a, b)| a * b).sum::<f64>() / n as f64)
        .collect()
}

/// Fits AR(p) by Yule–Walker for `p = 0..=max_order` and keeps the order
/// minimizing `N log σ̂²_p + 2p` (ties go to the smaller order).
pub fn yule_walker_aic(x: &[f64], max_order: usize) -> Result<ArFit> {
    let n = x.len();
    if max_order >= n {
        return Err(invalid("AR order must be below the series length"));
    }
    let gamma = centred_acov(x, max_order);
    if !(gamma[0] > 0.0) {
        return Err(invalid("series is constant"));
    }
    let mut phi: Vec<f64> = Vec::new();
    let mut v = gamma[0];
    let mut fits = vec![(Vec::new(), v)];
    for p in 1..=max_order {
        let acc: f64 = phi.iter().enumerate().map(|(j, a)| a * gamma[p - 1 - j]).sum();
        let kappa = (gamma[p] - acc) / v;
        let mut next: Vec<f64> = (0..p - 1).map(|j| phi[j] - kappa * phi[p - 2 - j]).collect();
        next.push(kappa);
        phi = next;
        v *= 1.0 - kappa * kappa;
        if !(v > 0.0) {
            break;
        }
        fits.push((phi.clone(), v));
    }
    let aic: Vec<f64> = fits
        .iter()
        .enumerate()
        .map(|(p, (_, v))| n as f64 * v.ln() + 2.0 * p as f64)
        .collect();
    let mut order = 0;
    for p in 1..aic.len() {
        if aic[p] < aic[order] {
            order = p;
        }
    }
    let (coefficients, innovation_variance) = fits.swap_remove(order);
    Ok(ArFit {
        order,
        coefficients,
        innovation_variance,
        aic,
    })
}

/// Modified Daniell span used for a series of length `n`: `⌈√n⌉`, made odd,
/// at least 3.
pub fn daniell_span(n: usize) -> usize {
    let mut m = (n as f64).sqrt().ceil() as usize;
    if m % 2 == 0 {
        m += 1;
    }
    m.max(3)
}

/// Periodogram over the full circle `j/N`, `j = 0..N-1`, with the zero
/// frequency replaced by the mean of its neighbours and circularly smoothed
/// by a modified Daniell kernel.
pub fn smoothed_periodogram(x: &[f64], span: usize) -> Result<Vec<f64>> {
    let n = x.len();
    if span % 2 == 0 || span < 3 {
        return Err(invalid("Daniell span must be odd and at least 3"));
    }
    let mut pg = periodogram_at(x, 0..n);
    pg[0] = 0.5 * (pg[1] + pg[n - 1]);
    let half = span / 2;
    let inner = 1.0 / (span - 1) as f64;
    let mut out = vec![0.0; n];
    for (j, o) in out.iter_mut().enumerate() {
        let mut s = 0.0;
        for k in 0..span {
            let w = if k == 0 || k == span - 1 { 0.5 * inner } else { inner };
            let idx = (j + n * half + k - half) % n;
            s += w * pg[idx];
        }
        *o = s;
    }
    Ok(out)
}

/// The two classical reference estimates on a frequency grid, as
/// log-spectra.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineSpectra {
    pub ar: ArFit,
    pub ar_log: Vec<f64>,
    pub smoothed_log: Vec<f64>,
}

pub const MIN_BASELINE_LENGTH: usize = 32;

/// Yule–Walker/AIC AR spectrum (orders up to `min(20, N/4)`) and modified
/// Daniell smoothed periodogram, both evaluated on `grid`. The smoothed
/// periodogram is interpolated linearly between Fourier frequencies.
pub fn baseline_spectra(series: &SampledSeries, grid: &[f64]) -> Result<BaselineSpectra> {
    if series.stride() != 1 {
        return Err(invalid("baseline spectra need a unit-stride series"));
    }
    let x = series.values();
    let n = x.len();
    if n < MIN_BASELINE_LENGTH {
        return Err(invalid(alloc::format!(
            "baseline spectra need at least {MIN_BASELINE_LENGTH} observations, got {n}"
        )));
    }
    let ar = yule_walker_aic(x, (n / 4).min(20))?;
    let ar_log = grid.iter().map(|&w| ar.log_density(w)).collect();
    let smooth = smoothed_periodogram(x, daniell_span(n))?;
    let mut smoothed_log = Vec::with_capacity(grid.len());
    for &w in grid {
        let pos = w * n as f64;
        let j = pos.floor();
        let frac = pos - j;
        let j = j as usize % n;
        let v = (1.0 - frac) * smooth[j] + frac * smooth[(j + 1) % n];
        if !(v > 0.0) {
            return Err(Error::NonPositiveSpectrum { omega: w, value: v });
        }
        smoothed_log.push(v.ln());
    }
    Ok(BaselineSpectra {
        ar,
        ar_log,
        smoothed_log,
    })
}

/// Share of spectral power below `cutoff` for a log-spectrum sampled on an
/// equally spaced grid over `[0, 1/2]` (trapezoid rule).
pub fn power_fraction_below(grid: &[f64], log_curve: &[f64], cutoff: f64) -> Result<f64> {
    if grid.len() != log_curve.len() || grid.len() < 2 {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            found: log_curve.len(),
        });
    }
    let (mut below, mut total) = (0.0, 0.0);
    for k in 1..grid.len() {
        let (a, b) = (grid[k - 1], grid[k]);
        let (fa, fb) = (log_curve[k - 1].exp(), log_curve[k].exp());
        let area = 0.5 * (fa + fb) * (b - a);
        total += area;
        if b <= cutoff {
            below += area;
        } else if a < cutoff {
            // linear interpolation of f on the straddling interval
            let t = (cutoff - a) / (b - a);
            let fc = fa + t * (fb - fa);
            below += 0.5 * (fa + fc) * (cutoff - a);
        }
    }
    Ok(below / total)
}
