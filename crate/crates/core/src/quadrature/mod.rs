//! Gaussian rules for the Gegenbauer weight `w_m(t) = (1 - t²)^{(m-2)/2}`
//! and tensor-product Fourier analysis on `[-1, 1]²`.

mod grid;

pub use grid::{to_check_mode, to_hat_mode, CoefficientGrid, Mode, Provenance};

use core::f64::consts::PI;

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::linalg::tridiagonal_eigen;
use crate::special::{gegenbauer_upto, ortho, surface_area, SphereDim};

/// Extra nodes beyond the highest analysed degree in [`default_node_count`].
pub const NODE_MARGIN: usize = 16;

/// Node count used by [`analyze`] when none is given: `max(K, L) + 16`.
pub fn default_node_count(k_max: usize, l_max: usize) -> usize {
    k_max.max(l_max) + NODE_MARGIN
}

/// An `n`-point Gaussian rule for `w_m`: exact for polynomials of degree `2n - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    dim: u32,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn dim(&self) -> SphereDim {
        SphereDim::Finite(self.dim)
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Strictly increasing nodes in `(-1, 1)`.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Σ w_i f(t_i)`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }
}

/// Gaussian rule for `w_m` with `n_nodes` points.
///
/// For `m >= 2` the nodes and weights come from the eigen-decomposition of the
/// symmetric Jacobi matrix with `α = β = (m - 2) / 2`; the circle uses the
/// closed-form Gauss-Chebyshev rule.
pub fn gauss_rule(m: SphereDim, n_nodes: usize) -> Result<QuadratureRule> {
    let m = m.require_finite()?;
    if n_nodes == 0 {
        return Err(invalid("a quadrature rule needs at least one node"));
    }
    let n = n_nodes;
    if m == 1 {
        // ascending order: i = n..1
        let nodes = (1..=n)
            .rev()
            .map(|i| libm::cos((2 * i - 1) as f64 * PI / (2 * n) as f64))
            .collect();
        return Ok(symmetrized(m, nodes, alloc::vec![PI / n as f64; n]));
    }

    let lambda = 0.5 * (m as f64 - 1.0);
    let off: Vec<f64> = (1..n)
        .map(|j| {
            let j = j as f64;
            libm::sqrt(j * (j + 2.0 * lambda - 1.0) / (4.0 * (j + lambda) * (j + lambda - 1.0)))
        })
        .collect();
    let (values, first) = tridiagonal_eigen(&alloc::vec![0.0; n], &off)?;
    let mass = surface_area(m + 1) / surface_area(m);
    let mut pairs: Vec<(f64, f64)> = values
        .into_iter()
        .zip(first)
        .map(|(x, z)| (x, mass * z * z))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (nodes, weights) = pairs.into_iter().unzip();
    let rule = symmetrized(m, nodes, weights);
    if rule
        .nodes
        .windows(2)
        .any(|w| w[0].partial_cmp(&w[1]) != Some(core::cmp::Ordering::Less))
        || rule.nodes.iter().any(|t| t.is_nan() || t.abs() >= 1.0)
        || rule.weights.iter().any(|w| w.is_nan() || *w <= 0.0)
    {
        return Err(Error::NoConvergence);
    }
    Ok(rule)
}

fn symmetrized(dim: u32, mut nodes: Vec<f64>, mut weights: Vec<f64>) -> QuadratureRule {
    let n = nodes.len();
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        let w = 0.5 * (weights[i] + weights[j]);
        nodes[i] = -x;
        nodes[j] = x;
        weights[i] = w;
        weights[j] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    QuadratureRule {
        dim,
        nodes,
        weights,
    }
}

/// Tensor-product quadrature `Σ_i Σ_j w_i v_j f(t_i, s_j)`.
pub fn integrate_2d<F>(f: F, rule_t: &QuadratureRule, rule_s: &QuadratureRule) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
{
    let mut total = 0.0;
    for (&t, &wt) in rule_t.nodes.iter().zip(&rule_t.weights) {
        for (&s, &ws) in rule_s.nodes.iter().zip(&rule_s.weights) {
            let v = f(t, s);
            if !v.is_finite() {
                return Err(Error::Evaluation { t, s });
            }
            total += wt * ws * v;
        }
    }
    Ok(total)
}

/// HAT-mode Fourier coefficients `f̂_{k,l}`, `k <= K`, `l <= L`.
///
/// `n_nodes` defaults to [`default_node_count`]. The integrand must be bounded.
pub fn analyze<F>(
    f: F,
    dim_t: SphereDim,
    dim_s: SphereDim,
    k_max: usize,
    l_max: usize,
    n_nodes: Option<usize>,
) -> Result<CoefficientGrid>
where
    F: Fn(f64, f64) -> f64,
{
    let n = n_nodes.unwrap_or_else(|| default_node_count(k_max, l_max));
    let rule_t = gauss_rule(dim_t, n)?;
    let rule_s = if dim_s == dim_t {
        rule_t.clone()
    } else {
        gauss_rule(dim_s, n)?
    };
    analyze_with(f, &rule_t, &rule_s, k_max, l_max)
}

/// [`analyze`] with caller-supplied rules.
pub fn analyze_with<F>(
    f: F,
    rule_t: &QuadratureRule,
    rule_s: &QuadratureRule,
    k_max: usize,
    l_max: usize,
) -> Result<CoefficientGrid>
where
    F: Fn(f64, f64) -> f64,
{
    let (nt, ns) = (rule_t.n_nodes(), rule_s.n_nodes());
    // weighted samples w_i v_j f(t_i, s_j)
    let mut samples = Vec::with_capacity(nt * ns);
    for (&t, &wt) in rule_t.nodes.iter().zip(&rule_t.weights) {
        for (&s, &ws) in rule_s.nodes.iter().zip(&rule_s.weights) {
            let v = f(t, s);
            if !v.is_finite() {
                return Err(Error::Evaluation { t, s });
            }
            samples.push(wt * ws * v);
        }
    }
    let basis_t: Vec<Vec<f64>> = rule_t
        .nodes
        .iter()
        .map(|&t| gegenbauer_upto(k_max, rule_t.dim, t))
        .collect();
    let basis_s: Vec<Vec<f64>> = rule_s
        .nodes
        .iter()
        .map(|&s| gegenbauer_upto(l_max, rule_s.dim, s))
        .collect();

    // contract the s axis first: partial[i][l] = Σ_j samples[i][j] P_l(s_j)
    let mut partial = alloc::vec![0.0; nt * (l_max + 1)];
    for i in 0..nt {
        for (j, ps) in basis_s.iter().enumerate() {
            let v = samples[i * ns + j];
            for l in 0..=l_max {
                partial[i * (l_max + 1) + l] += v * ps[l];
            }
        }
    }
    let mut grid = CoefficientGrid::zeros(rule_t.dim(), rule_s.dim(), k_max, l_max, Mode::Hat)?
        .with_provenance(Provenance::Quadrature);
    for k in 0..=k_max {
        let norm_k = ortho(k, rule_t.dim);
        for l in 0..=l_max {
            let sum: f64 = basis_t
                .iter()
                .enumerate()
                .map(|(i, b)| b[k] * partial[i * (l_max + 1) + l])
                .sum();
            grid.set(k, l, sum / (norm_k * ortho(l, rule_s.dim)));
        }
    }
    Ok(grid)
}
