use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::spectrum::{SimpsonRule, Spectrum, MIN_QUAD_POINTS};

/// `γ(h) = 2 ∫₀^{1/2} f(ω) cos(2πωh) dω` for `h = 0..=max_lag`, by composite
/// Simpson quadrature on `quad_points` panels.
///
/// Every node must carry a strictly positive, finite density.
pub fn autocovariance<S: Spectrum + ?Sized>(
    spectrum: &S,
    max_lag: usize,
    quad_points: usize,
) -> Result<Vec<f64>> {
    if quad_points < MIN_QUAD_POINTS {
        return Err(invalid(alloc::format!(
            "quad_points must be at least {MIN_QUAD_POINTS}, got {quad_points}"
        )));
    }
    let rule = SimpsonRule::half_interval(quad_points)?;
    let mut gamma = vec![0.0; max_lag + 1];
    for (&w, &weight) in rule.nodes.iter().zip(&rule.weights) {
        let f = spectrum.density(w);
        if !(f > 0.0) || !f.is_finite() {
            return Err(Error::NonPositiveSpectrum { omega: w, value: f });
        }
        let a = 2.0 * weight * f;
        // cos(2πωh) by the Chebyshev recurrence in h
        let c1 = (2.0 * PI * w).cos();
        let (mut prev, mut cur) = (c1, 1.0);
        for g in gamma.iter_mut() {
            *g += a * cur;
            let next = 2.0 * c1 * cur - prev;
            prev = cur;
            cur = next;
        }
    }
    Ok(gamma)
}
