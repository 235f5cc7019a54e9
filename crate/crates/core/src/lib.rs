//! Spectral inference for stationary time series observed at mixed
//! sampling rates.
//!
//! The crate is `no_std` (it needs `alloc`) and holds every algorithm:
//!
//! * [`process`]: SARMA models, the cosine log-spectrum, autocovariances,
//!   exact Gaussian simulation and subsampling.
//! * [`aliasing`]: the folded spectrum of a subsampled process.
//! * [`likelihood`]: exact Gaussian log-likelihoods for arbitrary
//!   observation patterns and Monte Carlo likelihood surfaces for the
//!   AR(2) peak frequency.
//! * [`blm`]: Bayes linear adjustment of log-spectrum coefficients from
//!   log-periodograms of series sampled at different strides.
//! * [`bench`]: the discrepancy score, Monte Carlo benchmarking and the
//!   interpolate-then-estimate baselines.
//! * [`uncertainty`]: principal-component fans, sparse Gauss–Hermite
//!   quadrature and Kolmogorov's prediction variance.
//!
//! All spectra share one convention: `f` is defined on `[0, 1/2]` and the
//! process variance equals `2 ∫₀^{1/2} f(ω) dω`.
//!
//! Enable the `parallel` feature to run replicate loops on rayon. Results
//! are bit-identical either way because reductions run in replicate order.
#![no_std]
// NaN-rejecting `!(x > 0.0)` checks are intentional.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::manual_is_multiple_of)]

extern crate alloc;
#[cfg(any(test, feature = "parallel"))]
extern crate std;

pub mod aliasing;
pub mod bench;
pub mod blm;
mod error;
pub mod likelihood;
pub mod linalg;
pub mod process;
pub mod spectrum;
pub mod stats;
pub mod uncertainty;

pub use error::{Error, Result};
pub use process::{LogSpectrum, SampledSeries, SpectralModel};
pub use spectrum::{FnSpectrum, Spectrum};
