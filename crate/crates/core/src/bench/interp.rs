use alloc::vec::Vec;

use super::baseline::{baseline_spectra, spline_interpolate, BaselineSpectra};
use crate::blm::{
    forecast_moments, log_periodogram, spectrum_summary, Adjuster, BeliefState, DataLayout,
    PriorSpec, SpectrumSummary, DEFAULT_LEVELS, DEFAULT_MC_SAMPLES,
};
use crate::error::{invalid, Result};
use crate::process::{ar2_model, autocovariance, SampledSeries, SpectralModel, ToeplitzSampler};
use crate::spectrum::{quad_points_for_lag, standard_grid, Spectrum};
use crate::stats::{derive_seed, rng_from_seed};

const MOMENT_STREAM: u64 = 11;

/// A long AR(2) path whose early part (the history) is only kept at a
/// coarse stride while the most recent part is kept at every step.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationScenario {
    pub omega0: f64,
    pub modulus: f64,
    pub innovation_variance: f64,
    pub total_len: usize,
    pub history_len: usize,
    pub history_stride: usize,
    pub score_grid: usize,
    pub prior: PriorSpec,
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for InterpolationScenario {
    fn default() -> Self {
        Self {
            omega0: 0.35,
            modulus: 0.9,
            innovation_variance: 1.0,
            total_len: 1152,
            history_len: 960,
            history_stride: 2,
            score_grid: 128,
            prior: PriorSpec::default(),
            mc_samples: DEFAULT_MC_SAMPLES,
            seed: 0,
        }
    }
}

impl InterpolationScenario {
    pub fn validate(&self) -> Result<()> {
        if self.history_stride < 2 {
            return Err(invalid("history stride must be at least 2"));
        }
        if self.history_len % self.history_stride != 0 || self.history_len >= self.total_len {
            return Err(invalid(
                "history length must be a multiple of the stride and shorter than the path",
            ));
        }
        Ok(())
    }

    fn history_obs(&self) -> usize {
        self.history_len / self.history_stride
    }

    fn trail_len(&self) -> usize {
        self.total_len - self.history_len
    }

    /// Interpolated history (from the first retained point) plus the trail.
    fn interpolated_len(&self) -> usize {
        self.total_len - (self.history_stride - 1)
    }
}

/// Moments and gains for a scenario, shared by every seed.
#[derive(Debug, Clone)]
pub struct InterpolationStudy {
    pub scenario: InterpolationScenario,
    pub model: SpectralModel,
    sampler: ToeplitzSampler,
    raw: Adjuster,
    history: Adjuster,
    interpolated: Adjuster,
    prior: BeliefState,
}

/// Every curve of one comparison, on the scoring grid.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationComparison {
    pub omegas: Vec<f64>,
    pub truth: Vec<f64>,
    /// Adjusted by the coarse history and the dense trail.
    pub blm_raw: SpectrumSummary,
    /// Adjusted by the coarse history alone.
    pub blm_history: SpectrumSummary,
    /// Adjusted by the interpolated history joined to the trail.
    pub blm_interpolated: SpectrumSummary,
    pub baselines: BaselineSpectra,
    /// `|m(ω₀) − m(1/2 − ω₀)|` of the history-only belief.
    pub honesty_gap: f64,
    /// `2 max(s(ω₀), s(1/2 − ω₀))` of the history-only belief.
    pub honesty_bound: f64,
}

impl InterpolationStudy {
    pub fn new(scenario: InterpolationScenario) -> Result<Self> {
        scenario.validate()?;
        let model = ar2_model(scenario.omega0, scenario.modulus, scenario.innovation_variance)?;
        let n = scenario.total_len;
        let gamma = autocovariance(&model, n - 1, quad_points_for_lag(n))?;
        let sampler = ToeplitzSampler::new(&gamma)?;
        let prior = scenario.prior.belief()?;
        let coarse = DataLayout::fourier(scenario.history_stride, scenario.history_obs())?;
        let trail = DataLayout::fourier(1, scenario.trail_len())?;
        let dense = DataLayout::fourier(1, scenario.interpolated_len())?;
        let adjuster = |layouts: &[DataLayout], k: u64| -> Result<Adjuster> {
            let m = forecast_moments(
                &prior,
                layouts,
                scenario.mc_samples,
                derive_seed(scenario.seed, MOMENT_STREAM, k),
            )?;
            Adjuster::new(&prior, &m)
        };
        let raw = adjuster(&[coarse.clone(), trail], 0)?;
        let history = adjuster(&[coarse], 1)?;
        let interpolated = adjuster(&[dense], 2)?;
        Ok(Self {
            scenario,
            model,
            sampler,
            raw,
            history,
            interpolated,
            prior,
        })
    }

    pub fn prior(&self) -> &BeliefState {
        &self.prior
    }

    /// Simulates one path and builds every estimate from it.
    pub fn run(&self, seed: u64) -> Result<InterpolationComparison> {
        let sc = &self.scenario;
        let mut rng = rng_from_seed(seed);
        let path = self.sampler.sample(sc.total_len, &mut rng);
        // the last retained history point abuts the trail
        let history = SampledSeries::dense(path[..sc.history_len].to_vec())?
            .subsample(sc.history_stride, sc.history_stride - 1)?;
        let trail = SampledSeries::dense(path[sc.history_len..].to_vec())?;

        let grid = standard_grid(sc.score_grid);
        let coarse_lp = log_periodogram(&history)?.log_values;
        let trail_lp = log_periodogram(&trail)?.log_values;

        let mut raw_obs = coarse_lp.clone();
        raw_obs.extend_from_slice(&trail_lp);
        let raw_state = self.raw.adjust(&raw_obs)?;
        let history_state = self.history.adjust(&coarse_lp)?;

        let mut joined = spline_interpolate(&history)?.into_values();
        joined.extend_from_slice(trail.values());
        let joined = SampledSeries::dense(joined)?;
        let interp_state = self.interpolated.adjust(&log_periodogram(&joined)?.log_values)?;
        let baselines = baseline_spectra(&joined, &grid)?;

        let pair = [sc.omega0, 0.5 - sc.omega0];
        let at_pair = spectrum_summary(&history_state, &pair, &[])?;
        let honesty_gap = (at_pair.mean[0] - at_pair.mean[1]).abs();
        let honesty_bound = 2.0 * at_pair.sd[0].max(at_pair.sd[1]);

        Ok(InterpolationComparison {
            truth: grid.iter().map(|&w| self.model.log_density(w)).collect(),
            blm_raw: spectrum_summary(&raw_state, &grid, &DEFAULT_LEVELS)?,
            blm_history: spectrum_summary(&history_state, &grid, &DEFAULT_LEVELS)?,
            blm_interpolated: spectrum_summary(&interp_state, &grid, &DEFAULT_LEVELS)?,
            omegas: grid,
            baselines,
            honesty_gap,
            honesty_bound,
        })
    }
}
