//! Principal-component views of an adjusted belief, sparse Gauss–Hermite
//! propagation through spectrum functionals, and Kolmogorov's one-step
//! prediction variance.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::blm::BeliefState;
use crate::error::{invalid, Error, Result};
use crate::linalg::{dot, Matrix, SymmetricEigen};
use crate::process::{CosineBasis, LogSpectrum};
use crate::spectrum::{SimpsonRule, Spectrum, MIN_QUAD_POINTS};
use crate::stats::{map_indexed, normal_quantile};

/// Eigenvalues below this fraction of the leading one count as null.
pub const NULL_COMPONENT_RATIO: f64 = 1e-14;

/// Eigen-decomposition of an adjusted coefficient variance.
#[derive(Debug, Clone)]
pub struct PcDecomposition {
    /// Descending, clipped at zero.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns.
    pub eigenvectors: Matrix,
    pub base: BeliefState,
}

impl PcDecomposition {
    pub fn new(state: &BeliefState) -> Result<Self> {
        let eig = SymmetricEigen::new(state.variance())?;
        Ok(Self {
            eigenvalues: eig.values.iter().map(|&v| v.max(0.0)).collect(),
            eigenvectors: eig.vectors,
            base: state.clone(),
        })
    }

    pub fn leading(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    /// Number of components above the null threshold.
    pub fn rank(&self) -> usize {
        let lead = self.leading();
        self.eigenvalues
            .iter()
            .take_while(|&&v| v > 0.0 && v >= NULL_COMPONENT_RATIO * lead)
            .count()
    }

    /// `u_k`, zero-based.
    pub fn component(&self, k: usize) -> Vec<f64> {
        (0..self.eigenvectors.rows())
            .map(|i| self.eigenvectors[(i, k)])
            .collect()
    }

    /// `√λ_k · u_k`.
    pub fn loading(&self, k: usize) -> Vec<f64> {
        let s = self.eigenvalues[k].sqrt();
        self.component(k).into_iter().map(|u| s * u).collect()
    }

    /// `U diag(λ) Uᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        SymmetricEigen {
            values: self.eigenvalues.clone(),
            vectors: self.eigenvectors.clone(),
        }
        .reconstruct()
    }

    fn check_component(&self, k: usize) -> Result<()> {
        if k >= self.eigenvalues.len() {
            return Err(invalid(alloc::format!(
                "component {k} out of range for {} coefficients",
                self.eigenvalues.len()
            )));
        }
        let lead = self.leading();
        let lam = self.eigenvalues[k];
        if lam < NULL_COMPONENT_RATIO * lead {
            return Err(Error::NullComponent {
                component: k,
                eigenvalue: lam,
                leading: lead,
            });
        }
        Ok(())
    }
}

/// The deciles `Φ⁻¹(i/10)`, `i = 1..9`.
pub fn decile_quantiles() -> [f64; 9] {
    let mut q = [0.0; 9];
    for (i, v) in q.iter_mut().enumerate() {
        *v = normal_quantile((i + 1) as f64 / 10.0);
    }
    q
}

/// Nine spectrum curves along one principal direction.
#[derive(Debug, Clone, PartialEq)]
pub struct PcFan {
    pub component: usize,
    pub eigenvalue: f64,
    pub omegas: Vec<f64>,
    pub quantiles: [f64; 9],
    /// `curves[i][j] = exp(Ψ(ω_j)ᵀ(E(β) + q_i √λ_k u_k))`.
    pub curves: Vec<Vec<f64>>,
}

/// Curves `exp(Ψᵀ(E(β) + q √λ_k u_k))` for the nine deciles `q`.
/// `component` is zero-based.
pub fn pc_fan(pcs: &PcDecomposition, component: usize, grid: &[f64]) -> Result<PcFan> {
    pcs.check_component(component)?;
    let quantiles = decile_quantiles();
    let basis = CosineBasis::new(pcs.base.dim());
    let loading = pcs.loading(component);
    let mut psi = vec![0.0; pcs.base.dim()];
    let mut mean = Vec::with_capacity(grid.len());
    let mut shift = Vec::with_capacity(grid.len());
    for &w in grid {
        basis.eval_into(w, &mut psi);
        mean.push(dot(&psi, pcs.base.mean()));
        shift.push(dot(&psi, &loading));
    }
    let curves = quantiles
        .iter()
        .map(|&q| {
            if q == 0.0 {
                mean.iter().map(|m| m.exp()).collect()
            } else {
                mean.iter().zip(&shift).map(|(m, s)| (m + q * s).exp()).collect()
            }
        })
        .collect();
    Ok(PcFan {
        component,
        eigenvalue: pcs.eigenvalues[component],
        omegas: grid.to_vec(),
        quantiles,
        curves,
    })
}

pub const MAX_GRID_DIMENSION: usize = 10;
pub const MAX_GRID_LEVEL: usize = 5;
pub const DEFAULT_PROPAGATION_DIMENSION: usize = 4;
pub const DEFAULT_PROPAGATION_LEVEL: usize = 3;

/// Weighted node set for integrating against the `d`-dimensional standard
/// normal measure. Weights sum to one and may be negative.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    pub dimension: usize,
    pub level: usize,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl QuadratureGrid {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn integrate(&self, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(x))
            .sum()
    }
}

/// `n`-point Gauss–Hermite rule for the standard normal density
/// (probabilists' Hermite polynomials), `1 ≤ n ≤ 5`. Exact to degree `2n-1`.
pub fn gauss_hermite(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let s6 = 6.0_f64.sqrt();
    let s10 = 10.0_f64.sqrt();
    let positive: Vec<f64> = match n {
        1 => vec![0.0],
        2 => vec![1.0],
        3 => vec![0.0, 3.0_f64.sqrt()],
        4 => vec![(3.0 - s6).sqrt(), (3.0 + s6).sqrt()],
        5 => vec![0.0, (5.0 - s10).sqrt(), (5.0 + s10).sqrt()],
        _ => return Err(invalid(alloc::format!("no Gauss–Hermite rule with {n} points"))),
    };
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    // w = n! / (n² He_{n-1}(x)²)
    let weight = |x: f64| {
        let (mut prev, mut cur) = (1.0, x);
        if n == 1 {
            return 1.0;
        }
        for k in 1..n - 1 {
            let next = x * cur - k as f64 * prev;
            prev = cur;
            cur = next;
        }
        factorial / ((n * n) as f64 * cur * cur)
    };
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for &x in positive.iter().rev() {
        if x != 0.0 {
            nodes.push(-x);
            weights.push(weight(x));
        }
    }
    for &x in &positive {
        nodes.push(x);
        weights.push(weight(x));
    }
    Ok((nodes, weights))
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Multi-indices `i ∈ {1..}^d` with `|i| = total`.
fn compositions(d: usize, total: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if prefix.len() == d - 1 {
        let used: usize = prefix.iter().sum();
        if total > used {
            let mut idx = prefix.clone();
            idx.push(total - used);
            out.push(idx);
        }
        return;
    }
    let used: usize = prefix.iter().sum();
    let remaining_slots = d - prefix.len() - 1;
    let mut first = 1;
    while used + first + remaining_slots <= total {
        prefix.push(first);
        compositions(d, total, prefix, out);
        prefix.pop();
        first += 1;
    }
}

fn node_key(x: &[f64]) -> Vec<u64> {
    x.iter().map(|&v| if v == 0.0 { 0 } else { v.to_bits() }).collect()
}

/// Smolyak combination of one-dimensional Gauss–Hermite rules (rule `i`
/// has `i` points). Integrates every polynomial of total degree
/// `≤ 2·level − 1` exactly. Coinciding nodes are merged.
pub fn sparse_grid(dimension: usize, level: usize) -> Result<QuadratureGrid> {
    if !(1..=MAX_GRID_DIMENSION).contains(&dimension) {
        return Err(Error::Domain {
            name: "dimension",
            value: dimension as f64,
            expected: "1..=10",
        });
    }
    if !(1..=MAX_GRID_LEVEL).contains(&level) {
        return Err(Error::Domain {
            name: "level",
            value: level as f64,
            expected: "1..=5",
        });
    }
    let rules: Vec<(Vec<f64>, Vec<f64>)> = (1..=level).map(gauss_hermite).collect::<Result<_>>()?;
    let d = dimension;
    let q = d + level - 1;
    let mut acc: BTreeMap<Vec<u64>, (Vec<f64>, f64)> = BTreeMap::new();
    for total in d.max(q + 1 - d)..=q {
        let coef = binomial(d - 1, q - total) * if (q - total) % 2 == 0 { 1.0 } else { -1.0 };
        if coef == 0.0 {
            continue;
        }
        let mut indices = Vec::new();
        compositions(d, total, &mut Vec::new(), &mut indices);
        for idx in indices {
            // tensor product of rules idx[0] × ... × idx[d-1]
            let sizes: Vec<usize> = idx.to_vec();
            let mut counter = vec![0usize; d];
            loop {
                let mut x = Vec::with_capacity(d);
                let mut w = coef;
                for k in 0..d {
                    let (nodes, weights) = &rules[idx[k] - 1];
                    x.push(nodes[counter[k]]);
                    w *= weights[counter[k]];
                }
                acc.entry(node_key(&x))
                    .and_modify(|e| e.1 += w)
                    .or_insert((x, w));
                let mut k = 0;
                while k < d {
                    counter[k] += 1;
                    if counter[k] < sizes[k] {
                        break;
                    }
                    counter[k] = 0;
                    k += 1;
                }
                if k == d {
                    break;
                }
            }
        }
    }
    let (nodes, weights) = acc.into_values().filter(|(_, w)| *w != 0.0).unzip();
    Ok(QuadratureGrid {
        dimension,
        level,
        nodes,
        weights,
    })
}

/// Approximates `E[h(f)]` over the belief, truncated to the leading
/// `dimension` principal components, with a Smolyak grid of `level`.
/// Node evaluations may run in parallel; the weighted sum is taken in node
/// order.
pub fn propagate<H>(state: &BeliefState, dimension: usize, level: usize, functional: H) -> Result<f64>
where
    H: Fn(&LogSpectrum) -> Result<f64> + Sync + Send,
{
    let pcs = PcDecomposition::new(state)?;
    propagate_with(&pcs, dimension, level, functional)
}

pub fn propagate_with<H>(pcs: &PcDecomposition, dimension: usize, level: usize, functional: H) -> Result<f64>
where
    H: Fn(&LogSpectrum) -> Result<f64> + Sync + Send,
{
    let grid = sparse_grid(dimension, level)?;
    let rank = pcs.rank();
    let leading_is_zero = pcs.leading() == 0.0;
    if dimension > rank && !leading_is_zero {
        return Err(invalid(alloc::format!(
            "truncation dimension {dimension} exceeds the variance rank {rank}"
        )));
    }
    let loadings: Vec<Vec<f64>> = (0..dimension.min(pcs.eigenvalues.len()))
        .map(|k| pcs.loading(k))
        .collect();
    let mean = pcs.base.mean();
    let values = map_indexed(grid.len(), |i| {
        let mut beta = mean.to_vec();
        for (x, l) in grid.nodes[i].iter().zip(&loadings) {
            for (b, lk) in beta.iter_mut().zip(l) {
                *b += x * lk;
            }
        }
        let value = LogSpectrum::new(beta).and_then(|s| functional(&s));
        match value {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(Error::FunctionalFailure { node: i }),
        }
    });
    let mut total = 0.0;
    for (v, w) in values.into_iter().zip(&grid.weights) {
        total += w * v?;
    }
    Ok(total)
}

/// Kolmogorov's one-step prediction variance `exp(2 ∫₀^{1/2} log f)`, by
/// composite Simpson with `quad_points` panels.
pub fn kolmogorov_variance<S: Spectrum + ?Sized>(spectrum: &S, quad_points: usize) -> Result<f64> {
    if quad_points < MIN_QUAD_POINTS {
        return Err(Error::Domain {
            name: "quad_points",
            value: quad_points as f64,
            expected: ">= 256",
        });
    }
    let rule = SimpsonRule::half_interval(quad_points)?;
    // integrate log f - log f(0) so a flat spectrum gives exactly exp(log σ²)
    let mut reference = None;
    let mut integral = 0.0;
    for (&w, &q) in rule.nodes.iter().zip(&rule.weights) {
        let v = spectrum.log_density(w);
        if !v.is_finite() {
            return Err(Error::NonFiniteLogSpectrum { omega: w });
        }
        let r = *reference.get_or_insert(v);
        integral += q * (v - r);
    }
    Ok((reference.unwrap_or(0.0) + 2.0 * integral).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::SpectralModel;
    use approx::assert_relative_eq;

    fn normal_moment(p: usize) -> f64 {
        if p % 2 == 1 {
            0.0
        } else {
            (1..p).step_by(2).map(|k| k as f64).product()
        }
    }

    #[test]
    fn one_dimensional_rules_exact() {
        for n in 1..=5 {
            let (x, w) = gauss_hermite(n).unwrap();
            assert_eq!(x.len(), n);
            for p in 0..2 * n {
                let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p as i32)).sum();
                assert!((s - normal_moment(p)).abs() < 1e-12 * normal_moment(p).max(1.0), "n={n} p={p}");
            }
        }
        assert!(gauss_hermite(6).is_err());
    }

    #[test]
    fn level_one_is_origin() {
        for d in 1..=10 {
            let g = sparse_grid(d, 1).unwrap();
            assert_eq!(g.len(), 1);
            assert_eq!(g.weights[0], 1.0);
            assert!(g.nodes[0].iter().all(|&x| x == 0.0));
        }
        assert!(sparse_grid(0, 1).is_err());
        assert!(sparse_grid(11, 1).is_err());
        assert!(sparse_grid(2, 6).is_err());
    }

    #[test]
    fn smaller_than_tensor_rule() {
        let g = sparse_grid(4, 3).unwrap();
        assert!(g.len() < 81);
        assert_relative_eq!(g.weights.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn kolmogorov_flat_and_ar() {
        let flat = SpectralModel::white_noise(2.5).unwrap();
        assert_relative_eq!(kolmogorov_variance(&flat, 4096).unwrap(), 2.5, epsilon = 1e-12);
        let ar = SpectralModel::arma(vec![0.6], vec![], 1.0).unwrap();
        assert!((kolmogorov_variance(&ar, 4096).unwrap() - 1.0).abs() < 1e-6);
        assert!(kolmogorov_variance(&ar, 128).is_err());
        let logspec = LogSpectrum::new(vec![0.4, 1.0, -0.3]).unwrap();
        assert_relative_eq!(kolmogorov_variance(&logspec, 256).unwrap(), 0.4_f64.exp(), epsilon = 1e-12);
    }

    #[test]
    fn zero_variance_fan_and_propagate() {
        let s = BeliefState::new(vec![0.1, 0.2], Matrix::zeros(2, 2)).unwrap();
        let pcs = PcDecomposition::new(&s).unwrap();
        let grid = [0.0, 0.1, 0.3];
        let fan = pc_fan(&pcs, 0, &grid).unwrap();
        for c in &fan.curves {
            assert_eq!(c, &fan.curves[4]);
        }
        let v = propagate(&s, 1, 3, |f| Ok(f.eval_log(0.2))).unwrap();
        assert_relative_eq!(v, s.mean_log_spectrum().eval_log(0.2), epsilon = 1e-14);
    }

    #[test]
    fn null_component_rejected() {
        let s = BeliefState::new(vec![0.0, 0.0], Matrix::from_diagonal(&[1.0, 0.0])).unwrap();
        let pcs = PcDecomposition::new(&s).unwrap();
        assert_eq!(pcs.rank(), 1);
        assert!(matches!(pc_fan(&pcs, 1, &[0.1]), Err(Error::NullComponent { component: 1, .. })));
        assert!(propagate(&s, 2, 2, |_| Ok(1.0)).is_err());
    }

    #[test]
    fn functional_failure_reports_node() {
        let s = BeliefState::new(vec![0.0], Matrix::identity(1)).unwrap();
        let err = propagate(&s, 1, 3, |f| {
            if f.coefficients()[0] > 1.0 {
                Ok(f64::NAN)
            } else {
                Ok(1.0)
            }
        })
        .unwrap_err();
        assert!(matches!(err, Error::FunctionalFailure { .. }));
    }
}
