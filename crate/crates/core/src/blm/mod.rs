//! Bayes linear adjustment of cosine-basis log-spectrum coefficients by
//! log-periodograms observed at one or more strides.

mod adjust;
mod belief;
mod moments;
mod periodogram;
mod summary;

pub use adjust::{adjust, sequential_adjust, Adjuster, SequentialAdjustment, ADJUSTED_PSD_TOLERANCE, RIDGE};
pub use belief::{BeliefState, PriorSpec, PSD_TOLERANCE};
pub use moments::{
    forecast_moments, DataLayout, FoldedLogForecaster, ForecastMoments, DEFAULT_MC_SAMPLES,
    MIN_MC_SAMPLES,
};
pub use periodogram::{
    fourier_frequencies, log_periodogram, log_periodogram_labelled, periodogram_at,
    PeriodogramData, MIN_PERIODOGRAM_LENGTH,
};
pub use summary::{difference_grid, spectrum_summary, Band, SpectrumSummary, DEFAULT_LEVELS};
