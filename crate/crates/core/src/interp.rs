//! Scattered-data interpolation on `S^m × S^M`:
//! `s(x, z) = Σ_j λ_j f(x·x_j, z·z_j)` with `s(x_i, z_i) = h_i`.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::constructions::{IsotropicKernel, KernelStatus};
use crate::error::{invalid, Error, Result};
use crate::linalg::min_symmetric_eigenvalue;
use crate::oracle::{gram, unit_dot, Distinctness, ProductPointSet, DISTINCT_TOL};

/// Ridge values tried in turn when the unregularized factorization fails.
pub const REGULARIZATION_LADDER: [f64; 3] = [1e-12, 1e-10, 1e-8];
/// Allowed deviation from unit norm for evaluation points.
pub const EVAL_NORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct InterpolationProblem {
    nodes: ProductPointSet,
    targets: Vec<f64>,
    kernel: IsotropicKernel,
}

impl InterpolationProblem {
    pub fn new(nodes: ProductPointSet, targets: Vec<f64>, kernel: IsotropicKernel) -> Result<Self> {
        if nodes.is_empty() {
            return Err(invalid("interpolation needs at least one node"));
        }
        if targets.len() != nodes.len() {
            return Err(invalid(format!(
                "{} targets for {} nodes",
                targets.len(),
                nodes.len()
            )));
        }
        if targets.iter().any(|v| !v.is_finite()) {
            return Err(invalid("targets must be finite"));
        }
        if kernel.status() < KernelStatus::Pd {
            return Err(invalid(
                "interpolation kernel must be at least positive definite",
            ));
        }
        if !nodes.is_distinct(Distinctness::Pairs, DISTINCT_TOL) {
            return Err(invalid("interpolation nodes are not pairwise distinct"));
        }
        Ok(InterpolationProblem {
            nodes,
            targets,
            kernel,
        })
    }

    pub fn nodes(&self) -> &ProductPointSet {
        &self.nodes
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn kernel(&self) -> &IsotropicKernel {
        &self.kernel
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    fn without(&self, i: usize) -> InterpolationProblem {
        let keep = |v: &[Vec<f64>]| {
            v.iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, x)| x.clone())
                .collect::<Vec<_>>()
        };
        let nodes = ProductPointSet::new(
            self.nodes.dim_t(),
            self.nodes.dim_s(),
            keep(self.nodes.xs()),
            keep(self.nodes.zs()),
        )
        .expect("subset of a valid point set");
        let mut targets = self.targets.clone();
        targets.remove(i);
        InterpolationProblem {
            nodes,
            targets,
            kernel: self.kernel.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Interpolant {
    coefficients: Vec<f64>,
    nodes: ProductPointSet,
    kernel: IsotropicKernel,
    condition_estimate: f64,
    regularization: f64,
}

impl Interpolant {
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn nodes(&self) -> &ProductPointSet {
        &self.nodes
    }

    pub fn kernel(&self) -> &IsotropicKernel {
        &self.kernel
    }

    /// `(max L_ii / min L_ii)²` from the Cholesky factor.
    pub fn condition_estimate(&self) -> f64 {
        self.condition_estimate
    }

    /// Ridge actually added to the Gram diagonal.
    pub fn regularization(&self) -> f64 {
        self.regularization
    }

    /// `Σ_j λ_j f(x·x_j, z·z_j)`.
    pub fn evaluate(&self, x: &[f64], z: &[f64]) -> Result<f64> {
        check_point(x, self.nodes.dim_t().get())?;
        check_point(z, self.nodes.dim_s().get())?;
        Ok(self
            .coefficients
            .iter()
            .zip(self.nodes.xs().iter().zip(self.nodes.zs()))
            .map(|(l, (xj, zj))| l * self.kernel.eval(unit_dot(x, xj), unit_dot(z, zj)))
            .sum())
    }
}

fn check_point(x: &[f64], dim: Option<u32>) -> Result<()> {
    let want = dim.map(|m| m as usize + 1);
    if Some(x.len()) != want {
        return Err(invalid(format!(
            "point has {} coordinates, expected {want:?}",
            x.len()
        )));
    }
    let norm = libm::sqrt(x.iter().map(|v| v * v).sum::<f64>());
    if norm.is_nan() || (norm - 1.0).abs() > EVAL_NORM_TOL {
        return Err(invalid(format!("point norm {norm} is not 1")));
    }
    Ok(())
}

/// Solves `(G + reg·I) λ = targets` by Cholesky.
///
/// If the factorization fails, the ridge is raised through
/// [`REGULARIZATION_LADDER`] (values above `reg` only).
pub fn solve(p: &InterpolationProblem, reg: f64) -> Result<Interpolant> {
    if !(reg.is_finite() && reg >= 0.0) {
        return Err(invalid("regularization must be nonnegative"));
    }
    let g = gram(p.kernel.as_fn(), &p.nodes)?;
    let rhs = DVector::from_column_slice(&p.targets);
    let ladder =
        core::iter::once(reg).chain(REGULARIZATION_LADDER.iter().copied().filter(|&r| r > reg));
    let mut last = reg;
    for r in ladder {
        last = r;
        let mut a = g.clone();
        for i in 0..a.nrows() {
            a[(i, i)] += r;
        }
        if let Some(chol) = Cholesky::new(a) {
            let diag = chol.l_dirty().diagonal();
            let ratio = diag.max() / diag.min();
            let lambda = chol.solve(&rhs);
            if lambda.iter().all(|v| v.is_finite()) {
                return Ok(Interpolant {
                    coefficients: lambda.iter().copied().collect(),
                    nodes: p.nodes.clone(),
                    kernel: p.kernel.clone(),
                    condition_estimate: ratio * ratio,
                    regularization: r,
                });
            }
        }
    }
    Err(Error::Singular {
        min_eigenvalue: min_symmetric_eigenvalue(&g)?,
        regularization: last,
    })
}

/// `‖G λ − targets‖∞` with the unregularized Gram matrix of `p`.
pub fn residual(p: &InterpolationProblem, s: &Interpolant) -> Result<f64> {
    let g = gram(p.kernel.as_fn(), &p.nodes)?;
    let lambda = DVector::from_column_slice(&s.coefficients);
    let r = g * lambda - DVector::from_column_slice(&p.targets);
    Ok(r.amax())
}

/// `max_i |s_{−i}(x_i, z_i) − h_i|`, each `s_{−i}` fitted without node `i`.
pub fn loo_error(p: &InterpolationProblem) -> Result<f64> {
    if p.len() < 2 {
        return Err(invalid("leave-one-out needs at least two nodes"));
    }
    if p.kernel.status() < KernelStatus::StrictPd {
        return Err(invalid(
            "leave-one-out needs a strictly positive definite kernel",
        ));
    }
    let mut worst: f64 = 0.0;
    for i in 0..p.len() {
        let s = solve(&p.without(i), 0.0)?;
        let v = s.evaluate(&p.nodes.xs()[i], &p.nodes.zs()[i])?;
        worst = worst.max((v - p.targets[i]).abs());
    }
    Ok(worst)
}

/// Dense `n × n` Gram matrix of the problem, for diagnostics.
pub fn problem_gram(p: &InterpolationProblem) -> Result<DMatrix<f64>> {
    gram(p.kernel.as_fn(), &p.nodes)
}
