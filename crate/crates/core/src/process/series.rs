use alloc::format;
use alloc::vec::Vec;

use crate::error::{invalid, Result};

/// Real observations on a regular sub-grid of a base time grid: observation
/// `k` sits at base index `offset + k * stride`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSeries {
    values: Vec<f64>,
    stride: usize,
    offset: usize,
    base_step: f64,
}

impl SampledSeries {
    pub fn new(values: Vec<f64>, stride: usize, offset: usize, base_step: f64) -> Result<Self> {
        if stride == 0 {
            return Err(invalid("stride must be at least 1"));
        }
        if offset >= stride {
            return Err(invalid(format!(
                "offset {offset} must be smaller than stride {stride}"
            )));
        }
        if !(base_step > 0.0) || !base_step.is_finite() {
            return Err(invalid(format!("base_step must be positive, got {base_step}")));
        }
        Ok(Self {
            values,
            stride,
            offset,
            base_step,
        })
    }

    /// Unit-stride series on a unit base step.
    pub fn dense(values: Vec<f64>) -> Result<Self> {
        Self::new(values, 1, 0, 1.0)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn base_step(&self) -> f64 {
        self.base_step
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn base_index(&self, k: usize) -> usize {
        self.offset + k * self.stride
    }

    /// `(base index, value)` pairs.
    pub fn observations(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(k, &v)| (self.base_index(k), v))
    }

    /// Keeps indices `offset, offset + δ, offset + 2δ, …` of a unit-stride series.
    pub fn subsample(&self, stride: usize, offset: usize) -> Result<SampledSeries> {
        if self.stride != 1 {
            return Err(invalid(format!(
                "subsample expects a unit-stride series, got stride {}",
                self.stride
            )));
        }
        if stride == 0 {
            return Err(invalid("stride must be at least 1"));
        }
        if offset >= stride {
            return Err(invalid(format!(
                "offset {offset} must be smaller than stride {stride}"
            )));
        }
        let values = self.values.iter().skip(offset).step_by(stride).copied().collect();
        SampledSeries::new(values, stride, offset, self.base_step)
    }
}

/// Free-function form of [`SampledSeries::subsample`].
pub fn subsample(series: &SampledSeries, stride: usize, offset: usize) -> Result<SampledSeries> {
    series.subsample(stride, offset)
}
