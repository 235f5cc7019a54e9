use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::belief::BeliefState;
use crate::error::{invalid, Error, Result};
use crate::linalg::dot;
use crate::process::CosineBasis;
use crate::stats::central_quantile;

/// Pointwise credible band `m ± z·s` at one level.
#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    pub level: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Pointwise summary of a belief about the log-spectrum on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSummary {
    pub omegas: Vec<f64>,
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
    pub bands: Vec<Band>,
}

impl SpectrumSummary {
    /// The same summary on the spectrum scale: every curve exponentiated.
    /// `sd` is left on the log scale.
    pub fn exponentiated(&self) -> SpectrumSummary {
        let exp = |v: &[f64]| v.iter().map(|x| x.exp()).collect::<Vec<_>>();
        SpectrumSummary {
            omegas: self.omegas.clone(),
            mean: exp(&self.mean),
            sd: self.sd.clone(),
            bands: self
                .bands
                .iter()
                .map(|b| Band {
                    level: b.level,
                    lower: exp(&b.lower),
                    upper: exp(&b.upper),
                })
                .collect(),
        }
    }

    pub fn band(&self, level: f64) -> Option<&Band> {
        self.bands.iter().find(|b| b.level == level)
    }
}

/// Default band levels.
pub const DEFAULT_LEVELS: [f64; 2] = [0.5, 0.9];

/// Mean `Ψ(ω)ᵀE(β)`, standard deviation `√(Ψᵀ Var(β) Ψ)` and log-scale bands.
pub fn spectrum_summary(state: &BeliefState, grid: &[f64], levels: &[f64]) -> Result<SpectrumSummary> {
    for &l in levels {
        if !(l > 0.0 && l < 1.0) {
            return Err(Error::Domain {
                name: "level",
                value: l,
                expected: "(0, 1)",
            });
        }
    }
    let basis = CosineBasis::new(state.dim());
    let mut psi = alloc::vec![0.0; state.dim()];
    let mut mean = Vec::with_capacity(grid.len());
    let mut sd = Vec::with_capacity(grid.len());
    for &w in grid {
        basis.eval_into(w, &mut psi);
        mean.push(dot(&psi, state.mean()));
        sd.push(state.variance().quadratic_form(&psi).max(0.0).sqrt());
    }
    let bands = levels
        .iter()
        .map(|&level| {
            let z = central_quantile(level);
            Band {
                level,
                lower: mean.iter().zip(&sd).map(|(m, s)| m - z * s).collect(),
                upper: mean.iter().zip(&sd).map(|(m, s)| m + z * s).collect(),
            }
        })
        .collect();
    Ok(SpectrumSummary {
        omegas: grid.to_vec(),
        mean,
        sd,
        bands,
    })
}

/// `k × k` grid of curves: the diagonal holds each state's mean log-spectrum,
/// entry `(i, j)` holds `mean_i − mean_j`.
pub fn difference_grid(states: &[BeliefState], grid: &[f64]) -> Result<Vec<Vec<Vec<f64>>>> {
    let Some(first) = states.first() else {
        return Err(invalid("difference grid needs at least one state"));
    };
    if let Some(bad) = states.iter().find(|s| s.dim() != first.dim()) {
        return Err(Error::LengthMismatch {
            expected: first.dim(),
            found: bad.dim(),
        });
    }
    let curves: Vec<Vec<f64>> = states
        .iter()
        .map(|s| s.mean_log_spectrum().log_curve(grid))
        .collect();
    Ok((0..states.len())
        .map(|i| {
            (0..states.len())
                .map(|j| {
                    if i == j {
                        curves[i].clone()
                    } else {
                        curves[i].iter().zip(&curves[j]).map(|(a, b)| a - b).collect()
                    }
                })
                .collect()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::spectrum::standard_grid;
    use alloc::vec;

    #[test]
    fn zero_variance_collapses_bands() {
        let s = BeliefState::new(vec![0.2, -0.5, 0.1], Matrix::zeros(3, 3)).unwrap();
        let sum = spectrum_summary(&s, &standard_grid(9), &DEFAULT_LEVELS).unwrap();
        for b in &sum.bands {
            assert_eq!(b.lower, sum.mean);
            assert_eq!(b.upper, sum.mean);
        }
    }

    #[test]
    fn intercept_only_band_width() {
        let s = BeliefState::new(vec![0.7], Matrix::identity(1)).unwrap();
        let sum = spectrum_summary(&s, &standard_grid(5), &[0.9]).unwrap();
        for (i, m) in sum.mean.iter().enumerate() {
            assert!((sum.bands[0].upper[i] - m - 1.6448536269514722).abs() < 1e-9);
            assert!((m - sum.bands[0].lower[i] - 1.6448536269514722).abs() < 1e-9);
        }
        let e = sum.exponentiated();
        assert!((e.mean[0] - 0.7_f64.exp()).abs() < 1e-15);
        assert!(spectrum_summary(&s, &[0.1], &[1.0]).is_err());
    }

    #[test]
    fn difference_grid_antisymmetric() {
        let a = BeliefState::new(vec![0.2, 0.3], Matrix::identity(2)).unwrap();
        let b = BeliefState::new(vec![-0.1, 0.5], Matrix::identity(2)).unwrap();
        let g = difference_grid(&[a.clone(), b, a.clone()], &standard_grid(7)).unwrap();
        for k in 0..7 {
            assert_eq!(g[0][1][k], -g[1][0][k]);
            assert_eq!(g[0][2][k], 0.0);
        }
        let c = BeliefState::new(vec![0.0], Matrix::identity(1)).unwrap();
        assert!(difference_grid(&[a, c], &[0.1]).is_err());
    }
}
