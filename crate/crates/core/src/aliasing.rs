//! Aliasing of a spectrum under stride-δ subsampling.
//!
//! Sampling every δ-th value of a process with density `f` yields a process
//! whose density, in units of the coarse sampling rate, is
//!
//! `f_δ(ν) = (1/δ) Σ_{k=0}^{δ-1} f_ext((ν + k) / δ)`
//!
//! where `f_ext` is the even, 1-periodic extension of `f`. Equivalently
//! `γ_δ(h) = γ(δh)`. For δ = 2 the map is invariant under reflecting `f`
//! about ω = 1/4, which is the whole aliasing ambiguity.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::spectrum::{reduce_frequency, Spectrum};

/// Lazily evaluated folded spectrum.
#[derive(Debug, Clone)]
pub struct FoldedSpectrum<S> {
    source: S,
    stride: usize,
}

impl<S: Spectrum> FoldedSpectrum<S> {
    pub fn new(source: S, stride: usize) -> Result<Self> {
        if stride == 0 {
            return Err(invalid("stride must be at least 1"));
        }
        Ok(Self { source, stride })
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn source(&self) -> &S {
        &self.source
    }
}

impl<S: Spectrum> Spectrum for FoldedSpectrum<S> {
    fn density(&self, nu: f64) -> f64 {
        let nu = reduce_frequency(nu);
        if self.stride == 1 {
            return self.source.density(nu);
        }
        let d = self.stride as f64;
        let total: f64 = (0..self.stride)
            .map(|k| self.source.density(reduce_frequency((nu + k as f64) / d)))
            .sum();
        total / d
    }
}

/// Folded density `f_δ(ν)` at each coarse-rate frequency `ν ∈ [0, 1/2]`.
pub fn fold<S: Spectrum + ?Sized>(spectrum: &S, delta: usize, nus: &[f64]) -> Result<Vec<f64>> {
    let folded = FoldedSpectrum::new(spectrum, delta)?;
    nus.iter()
        .map(|&nu| {
            check_frequency(nu)?;
            Ok(folded.density(nu))
        })
        .collect()
}

/// All base-rate frequencies in `[0, 1/2]` that stride-δ sampling cannot
/// tell apart from `omega`, ascending, duplicates (within 1e-12) removed.
pub fn aliased_partners(omega: f64, delta: usize) -> Result<Vec<f64>> {
    check_frequency(omega)?;
    if delta == 0 {
        return Err(invalid("stride must be at least 1"));
    }
    let d = delta as f64;
    let nu = reduce_frequency(d * omega);
    let mut out: Vec<f64> = Vec::with_capacity(2 * delta + 2);
    for k in 0..=delta {
        for cand in [(nu + k as f64) / d, (k as f64 - nu) / d] {
            if (-1e-12..=0.5 + 1e-12).contains(&cand) {
                out.push(cand.clamp(0.0, 0.5));
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    Ok(out)
}

fn check_frequency(w: f64) -> Result<()> {
    if (0.0..=0.5).contains(&w) {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "frequency",
            value: w,
            expected: "[0, 1/2]",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::{ar2_model, autocovariance, LogSpectrum, SpectralModel};
    use approx::assert_relative_eq;
    use alloc::vec;

    #[test]
    fn identity_and_white_noise() {
        let m = ar2_model(0.1, 0.8, 1.0).unwrap();
        let nus: Vec<f64> = (0..=20).map(|i| i as f64 / 40.0).collect();
        let f1 = fold(&m, 1, &nus).unwrap();
        for (a, &nu) in f1.iter().zip(&nus) {
            assert_eq!(*a, m.density(nu));
        }
        let flat = SpectralModel::white_noise(3.0).unwrap();
        for d in 1..=6 {
            for v in fold(&flat, d, &nus).unwrap() {
                assert_relative_eq!(v, 3.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn folded_autocovariance_is_subsampled_autocovariance() {
        let m = ar2_model(1.0 / 12.0, 0.9, 1.0).unwrap();
        let g = autocovariance(&m, 20, 4096).unwrap();
        let folded = FoldedSpectrum::new(&m, 2).unwrap();
        let g2 = autocovariance(&folded, 10, 4096).unwrap();
        for h in 0..=10 {
            assert_relative_eq!(g2[h], g[2 * h], epsilon = 1e-6);
        }
    }

    #[test]
    fn partner_examples() {
        let p = aliased_partners(0.125, 2).unwrap();
        assert_eq!(p.len(), 2);
        assert_relative_eq!(p[0], 0.125, epsilon = 1e-15);
        assert_relative_eq!(p[1], 0.375, epsilon = 1e-15);
        let p = aliased_partners(1.0 / 12.0, 2).unwrap();
        assert_relative_eq!(p[0], 1.0 / 12.0, epsilon = 1e-15);
        assert_relative_eq!(p[1], 5.0 / 12.0, epsilon = 1e-15);
        assert_eq!(aliased_partners(0.3, 1).unwrap(), vec![0.3]);
        assert_eq!(aliased_partners(0.25, 2).unwrap(), vec![0.25]);
        assert_eq!(aliased_partners(0.0, 2).unwrap(), vec![0.0, 0.5]);
        for d in 1..=6 {
            for i in 0..=50 {
                let w = i as f64 / 100.0;
                assert!(aliased_partners(w, d).unwrap().len() <= d);
            }
        }
    }

    #[test]
    fn partners_share_folded_density() {
        let ls = LogSpectrum::new(vec![0.0, 0.8, -0.5, 0.3, 0.2]).unwrap();
        for d in 2..=5 {
            let w = 0.071;
            let nu = reduce_frequency(d as f64 * w);
            // each partner ω' contributes f(ω') to f_δ(ν): it reduces to ν
            for p in aliased_partners(w, d).unwrap() {
                assert_relative_eq!(reduce_frequency(d as f64 * p), nu, epsilon = 1e-12);
            }
            assert!(fold(&ls, d, &[nu]).unwrap()[0] > 0.0);
        }
    }

    #[test]
    fn rejects_out_of_range() {
        let m = SpectralModel::white_noise(1.0).unwrap();
        assert!(fold(&m, 2, &[0.6]).is_err());
        assert!(fold(&m, 0, &[0.1]).is_err());
        assert!(aliased_partners(-0.1, 2).is_err());
    }
}
