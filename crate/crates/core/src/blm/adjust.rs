use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::belief::BeliefState;
use super::moments::ForecastMoments;
use crate::error::{invalid, Error, Result};
use crate::linalg::{clip_psd, dot, Cholesky, Matrix};

/// Relative ridge added to the diagonal of a data variance whose Cholesky
/// pivots fall below it.
pub const RIDGE: f64 = 1e-10;

/// Tolerance on negative eigenvalues of an adjusted variance.
pub const ADJUSTED_PSD_TOLERANCE: f64 = 1e-8;

/// Cholesky factor of a data variance. Well-conditioned input is factorised
/// as is, so exact identities survive; near-singular input gets the ridge.
fn ridged_factor(var: &Matrix) -> Option<Cholesky> {
    let n = var.rows();
    let ridge = RIDGE * var.trace() / n.max(1) as f64;
    if let Ok(c) = Cholesky::new(var) {
        let l = c.factor();
        if (0..n).all(|i| l[(i, i)] * l[(i, i)] > ridge) {
            return Some(c);
        }
    }
    let mut v = var.clone();
    for i in 0..n {
        v[(i, i)] += ridge;
    }
    Cholesky::new(&v).ok()
}

/// Identifies which dataset block makes `var` singular.
fn offending_dataset(var: &Matrix, blocks: &[core::ops::Range<usize>]) -> usize {
    for (k, b) in blocks.iter().enumerate() {
        let idx: Vec<usize> = b.clone().collect();
        if ridged_factor(&var.select(&idx, &idx)).is_none() {
            return k;
        }
    }
    blocks.len().saturating_sub(1)
}

/// Precomputed Bayes linear adjustment of the coefficients by the full
/// stacked data vector. The adjusted variance does not depend on the
/// observed values, so it is computed once and reused.
#[derive(Debug, Clone)]
pub struct Adjuster {
    prior_mean: Vec<f64>,
    expectation: Vec<f64>,
    /// `Cov(β,D) Var(D)⁻¹`, one row per coefficient.
    gain: Matrix,
    adjusted: BeliefState,
}

impl Adjuster {
    pub fn new(prior: &BeliefState, moments: &ForecastMoments) -> Result<Self> {
        let m = prior.dim();
        let j = moments.data_len();
        if moments.covariance.rows() != m || moments.covariance.cols() != j {
            return Err(Error::LengthMismatch {
                expected: m,
                found: moments.covariance.rows(),
            });
        }
        let factor = ridged_factor(&moments.variance).ok_or_else(|| Error::SingularDataVariance {
            dataset: offending_dataset(&moments.variance, &moments.blocks),
        })?;
        let mut gain = Matrix::zeros(m, j);
        // W = L⁻¹ Cov(D,β): adjusted variance is Var(β) - WᵀW
        let mut w_cols: Vec<Vec<f64>> = Vec::with_capacity(m);
        for a in 0..m {
            let c = moments.covariance.row(a).to_vec();
            let mut w = c.clone();
            factor.solve_lower_in_place(&mut w);
            let mut g = w.clone();
            factor.solve_upper_in_place(&mut g);
            gain.row_mut(a).copy_from_slice(&g);
            w_cols.push(w);
        }
        let mut var = prior.variance().clone();
        for a in 0..m {
            for b in 0..=a {
                let reduction = dot(&w_cols[a], &w_cols[b]);
                var[(a, b)] -= reduction;
                if a != b {
                    var[(b, a)] -= reduction;
                }
            }
        }
        var.symmetrize();
        let var = clip_psd(&var, ADJUSTED_PSD_TOLERANCE)?;
        let mean = prior.mean().to_vec();
        let adjusted = BeliefState::with_tolerance(mean.clone(), var, ADJUSTED_PSD_TOLERANCE)?;
        Ok(Self {
            prior_mean: mean,
            expectation: moments.expectation.clone(),
            gain,
            adjusted,
        })
    }

    /// `E_D(β) = E(β) + Cov(β,D) Var(D)⁻¹ (d - E(D))`.
    pub fn adjusted_mean(&self, observed: &[f64]) -> Result<Vec<f64>> {
        if observed.len() != self.expectation.len() {
            return Err(Error::LengthMismatch {
                expected: self.expectation.len(),
                found: observed.len(),
            });
        }
        let innovation: Vec<f64> = observed
            .iter()
            .zip(&self.expectation)
            .map(|(d, e)| d - e)
            .collect();
        Ok(self
            .prior_mean
            .iter()
            .enumerate()
            .map(|(a, &mu)| mu + dot(self.gain.row(a), &innovation))
            .collect())
    }

    pub fn adjusted_variance(&self) -> &Matrix {
        self.adjusted.variance()
    }

    pub fn adjust(&self, observed: &[f64]) -> Result<BeliefState> {
        let mean = self.adjusted_mean(observed)?;
        Ok(BeliefState::from_parts_unchecked(mean, self.adjusted.variance().clone()))
    }
}

/// Bayes linear adjustment of `prior` by the stacked observation vector.
pub fn adjust(prior: &BeliefState, moments: &ForecastMoments, observed: &[f64]) -> Result<BeliefState> {
    Adjuster::new(prior, moments)?.adjust(observed)
}

/// Result of adjusting by datasets one at a time.
#[derive(Debug, Clone)]
pub struct SequentialAdjustment {
    /// Belief after each stage, in stage order.
    pub stages: Vec<BeliefState>,
}

impl SequentialAdjustment {
    pub fn final_state(&self) -> &BeliefState {
        self.stages.last().expect("at least one stage")
    }
}

/// Adjusts by one dataset block at a time, in the given `order` of block
/// indices. Joint moments of `(β, D)` come from one prior forecast; each
/// stage updates the joint belief, so later blocks are forecast given the
/// earlier ones. The final stage equals the single-shot adjustment.
pub fn sequential_adjust(
    prior: &BeliefState,
    moments: &ForecastMoments,
    observed: &[Vec<f64>],
    order: &[usize],
) -> Result<SequentialAdjustment> {
    let m = prior.dim();
    let j = moments.data_len();
    if observed.len() != moments.blocks.len() {
        return Err(Error::LengthMismatch {
            expected: moments.blocks.len(),
            found: observed.len(),
        });
    }
    for (b, d) in moments.blocks.iter().zip(observed) {
        if b.len() != d.len() {
            return Err(Error::LengthMismatch {
                expected: b.len(),
                found: d.len(),
            });
        }
    }
    let mut seen = alloc::vec![false; observed.len()];
    for &k in order {
        if k >= observed.len() || core::mem::replace(&mut seen[k], true) {
            return Err(invalid("stage order must list distinct dataset indices"));
        }
    }
    if order.is_empty() {
        return Err(invalid("stage order is empty"));
    }

    // joint belief over (β, D)
    let n = m + j;
    let mut mean: Vec<f64> = prior.mean().to_vec();
    mean.extend_from_slice(&moments.expectation);
    let mut var = Matrix::zeros(n, n);
    for a in 0..m {
        for b in 0..m {
            var[(a, b)] = prior.variance()[(a, b)];
        }
        for b in 0..j {
            var[(a, m + b)] = moments.covariance[(a, b)];
            var[(m + b, a)] = moments.covariance[(a, b)];
        }
    }
    for a in 0..j {
        for b in 0..j {
            var[(m + a, m + b)] = moments.variance[(a, b)];
        }
    }

    let mut stages = Vec::with_capacity(order.len());
    for &k in order {
        let block = &moments.blocks[k];
        let obs_idx: Vec<usize> = block.clone().map(|i| m + i).collect();
        let v_dd = var.select(&obs_idx, &obs_idx);
        let factor = ridged_factor(&v_dd).ok_or(Error::SingularDataVariance { dataset: k })?;
        let innovation: Vec<f64> = observed[k]
            .iter()
            .zip(&obs_idx)
            .map(|(d, &i)| d - mean[i])
            .collect();
        let weights = factor.solve(&innovation);
        // W = L⁻¹ Cov(D_k, ·), columns indexed by every joint variable
        let all: Vec<usize> = (0..n).collect();
        let cross = var.select(&all, &obs_idx);
        let w: Vec<Vec<f64>> = (0..n)
            .map(|a| {
                let mut c = cross.row(a).to_vec();
                factor.solve_lower_in_place(&mut c);
                c
            })
            .collect();
        for a in 0..n {
            mean[a] += dot(cross.row(a), &weights);
        }
        for a in 0..n {
            for b in 0..=a {
                let r = dot(&w[a], &w[b]);
                var[(a, b)] -= r;
                if a != b {
                    var[(b, a)] -= r;
                }
            }
        }
        let idx: Vec<usize> = (0..m).collect();
        let beta_var = clip_psd(&var.select(&idx, &idx), ADJUSTED_PSD_TOLERANCE)?;
        stages.push(BeliefState::with_tolerance(
            mean[..m].to_vec(),
            beta_var,
            ADJUSTED_PSD_TOLERANCE,
        )?);
    }
    Ok(SequentialAdjustment { stages })
}
