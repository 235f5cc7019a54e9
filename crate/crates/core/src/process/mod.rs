//! Stationary process models: SARMA spectra, the cosine log-spectrum,
//! autocovariances by quadrature, exact Gaussian simulation and
//! subsampling.

mod acov;
mod logspec;
mod model;
mod series;
mod simulate;

pub use acov::autocovariance;
pub use logspec::{CosineBasis, LogSpectrum};
pub use model::{ar2_from_omega, ar2_model, SpectralModel};
pub use series::{subsample, SampledSeries};
pub use simulate::{simulate, ToeplitzSampler};
