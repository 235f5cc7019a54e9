//! The spectral-density abstraction shared by every module, plus the
//! composite Simpson rule on `[0, 1/2]`.
//!
//! Convention: `f` lives on `[0, 1/2]` (cycles per base time step) and the
//! process variance is `2 ∫₀^{1/2} f(ω) dω`. White noise of variance `σ²`
//! therefore has `f ≡ σ²`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Result};

/// A spectral density evaluator on `[0, 1/2]`.
pub trait Spectrum {
    fn density(&self, omega: f64) -> f64;

    fn log_density(&self, omega: f64) -> f64 {
        self.density(omega).ln()
    }
}

/// Adapts a closure `ω ↦ f(ω)` to [`Spectrum`].
#[derive(Debug, Clone, Copy)]
pub struct FnSpectrum<F>(pub F);

impl<F: Fn(f64) -> f64> Spectrum for FnSpectrum<F> {
    fn density(&self, omega: f64) -> f64 {
        (self.0)(omega)
    }
}

impl<S: Spectrum + ?Sized> Spectrum for &S {
    fn density(&self, omega: f64) -> f64 {
        (**self).density(omega)
    }

    fn log_density(&self, omega: f64) -> f64 {
        (**self).log_density(omega)
    }
}

/// Maps any real frequency into `[0, 1/2]` through the even, period-1
/// extension.
pub fn reduce_frequency(omega: f64) -> f64 {
    let r = omega - omega.floor();
    if r > 0.5 {
        1.0 - r
    } else {
        r
    }
}

/// Nodes and weights of composite Simpson's rule with `panels` panels on
/// `[0, 1/2]`. `panels` must be even and at least 2.
#[derive(Debug, Clone)]
pub struct SimpsonRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl SimpsonRule {
    pub fn half_interval(panels: usize) -> Result<Self> {
        if panels < 2 || panels % 2 != 0 {
            return Err(invalid(alloc::format!(
                "Simpson rule needs an even panel count >= 2, got {panels}"
            )));
        }
        let h = 0.5 / panels as f64;
        let nodes = (0..=panels).map(|i| i as f64 * h).collect();
        let weights = (0..=panels)
            .map(|i| {
                let c = if i == 0 || i == panels {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                c * h / 3.0
            })
            .collect();
        Ok(Self { nodes, weights })
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Smallest admissible quadrature panel count for the autocovariance-based
/// routines.
pub const MIN_QUAD_POINTS: usize = 256;

/// Default panel count for autocovariances up to moderate lags.
pub const DEFAULT_QUAD_POINTS: usize = 4096;

/// Panel count that resolves `cos(2πωh)` for lags up to `max_lag`.
pub fn quad_points_for_lag(max_lag: usize) -> usize {
    let want = DEFAULT_QUAD_POINTS.max(4 * max_lag);
    want + want % 2
}

/// `ω_j = j / (2 (n - 1))`, `j = 0..n`: equally spaced on `[0, 1/2]`.
pub fn standard_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![0.0],
        _ => (0..n).map(|j| j as f64 / (2.0 * (n - 1) as f64)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reduction_is_even_and_periodic() {
        assert_relative_eq!(reduce_frequency(0.3), 0.3);
        assert_relative_eq!(reduce_frequency(0.7), 0.3, epsilon = 1e-15);
        assert_relative_eq!(reduce_frequency(-0.2), 0.2, epsilon = 1e-15);
        assert_relative_eq!(reduce_frequency(1.2), 0.2, epsilon = 1e-15);
        assert_eq!(reduce_frequency(0.5), 0.5);
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        let rule = SimpsonRule::half_interval(8).unwrap();
        let v = rule.integrate(|x| 3.0 * x * x * x - x + 2.0);
        let exact = 3.0 / 4.0 * 0.0625 - 0.125 + 1.0;
        assert_relative_eq!(v, exact, epsilon = 1e-14);
        assert!(SimpsonRule::half_interval(7).is_err());
    }

    #[test]
    fn standard_grid_endpoints() {
        let g = standard_grid(128);
        assert_eq!(g[0], 0.0);
        assert_relative_eq!(g[127], 0.5);
        assert_relative_eq!(g[1], 1.0 / 254.0);
    }
}
