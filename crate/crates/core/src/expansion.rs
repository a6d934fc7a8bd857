//! Schoenberg expansions `f(t, s) = Σ f̌_{k,l} R_k^m(t) R_l^M(s)`.
//!
//! Expansions are stored in CHECK (normalized) form so that finite and
//! infinite dimensions share one representation: on `S^∞` the normalized
//! Gegenbauer basis is replaced by monomials.

use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::quadrature::{analyze, to_check_mode, to_hat_mode, CoefficientGrid, Mode, Provenance};
use crate::special::{normalized_sequence, SphereDim};

/// A truncated expansion; the grid is always held in [`Mode::Check`].
#[derive(Debug, Clone, PartialEq)]
pub struct SchoenbergExpansion {
    grid: CoefficientGrid,
}

impl SchoenbergExpansion {
    /// Wraps a grid, converting HAT coefficients to CHECK form.
    pub fn new(grid: CoefficientGrid) -> Result<Self> {
        let grid = to_check_mode(&grid)?;
        Ok(SchoenbergExpansion { grid })
    }

    pub fn grid(&self) -> &CoefficientGrid {
        &self.grid
    }

    pub fn into_grid(self) -> CoefficientGrid {
        self.grid
    }

    /// HAT view of the coefficients; finite dimensions only.
    pub fn hat_grid(&self) -> Result<CoefficientGrid> {
        to_hat_mode(&self.grid)
    }

    pub fn dim_t(&self) -> SphereDim {
        self.grid.dim_t()
    }

    pub fn dim_s(&self) -> SphereDim {
        self.grid.dim_s()
    }

    /// `alpha * self + beta * other`.
    pub fn linear_combination(
        &self,
        alpha: f64,
        other: &SchoenbergExpansion,
        beta: f64,
    ) -> Result<Self> {
        Ok(SchoenbergExpansion {
            grid: self.grid.linear_combination(alpha, &other.grid, beta)?,
        })
    }
}

/// Evaluates the truncated expansion at `(t, s)`.
pub fn synthesize(e: &SchoenbergExpansion, t: f64, s: f64) -> Result<f64> {
    let g = &e.grid;
    let bt = normalized_sequence(g.k_max(), g.dim_t(), t)?;
    let bs = normalized_sequence(g.l_max(), g.dim_s(), s)?;
    let cols = g.l_max() + 1;
    let total = g
        .values()
        .chunks(cols)
        .zip(&bt)
        .map(|(row, &b)| b * row.iter().zip(&bs).map(|(c, v)| c * v).sum::<f64>())
        .sum();
    Ok(total)
}

/// `Σ f̌_{k,l}`, the value of the truncated expansion at `(1, 1)`.
pub fn coefficient_sum(e: &SchoenbergExpansion) -> f64 {
    e.grid.values().iter().sum()
}

/// Outcome of checking coefficient signs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Certification {
    /// Every coefficient is at least `-tol`; `clamped` entries lay in `[-tol, 0)`.
    PdCertified { clamped: usize },
    /// An exact grid has a coefficient below `-tol`; `(k, l)` is the most negative.
    NotPd { k: usize, l: usize, value: f64 },
    /// A quadrature grid has a coefficient below `-tol`, which numerical error may explain.
    Inconclusive { k: usize, l: usize, value: f64 },
}

impl Certification {
    pub fn label(&self) -> &'static str {
        match self {
            Certification::PdCertified { .. } => "PD_CERTIFIED",
            Certification::NotPd { .. } => "NOT_PD",
            Certification::Inconclusive { .. } => "INCONCLUSIVE",
        }
    }
}

/// Sign test on the coefficients. A negative `cert_tol` is treated as zero.
pub fn certify_pd(e: &SchoenbergExpansion, cert_tol: f64) -> Certification {
    let tol = cert_tol.max(0.0);
    let mut worst: Option<(usize, usize, f64)> = None;
    let mut clamped = 0;
    for (k, l, v) in e.grid.entries() {
        if v < -tol || v.is_nan() {
            if worst.is_none_or(|(_, _, w)| v < w || v.is_nan()) {
                worst = Some((k, l, v));
            }
        } else if v < 0.0 {
            clamped += 1;
        }
    }
    match (worst, e.grid.provenance()) {
        (None, _) => Certification::PdCertified { clamped },
        (Some((k, l, value)), Provenance::Exact) => Certification::NotPd { k, l, value },
        (Some((k, l, value)), Provenance::Quadrature) => {
            Certification::Inconclusive { k, l, value }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    First,
    Second,
}

/// Coefficients at `(m + 2, M)` from those at `(m, M)`:
///
/// `f̌^{m+2}_{k,l} = (k+m-1)(k+m) / (m(2k+m-1)) f̌^m_{k,l} - (k+1)(k+2) / (m(2k+m+3)) f̌^m_{k+2,l}`.
///
/// The first-axis truncation drops from `K` to `K - 2`. The result is a
/// computation, not a certificate: it may have negative entries.
pub fn dimension_walk(e: &SchoenbergExpansion) -> Result<SchoenbergExpansion> {
    let g = &e.grid;
    let m = g.dim_t().require_finite()?;
    if g.k_max() < 2 {
        return Err(invalid("dimension walk needs truncation degree K >= 2"));
    }
    let k_out = g.k_max() - 2;
    let mf = m as f64;
    let mut out = CoefficientGrid::zeros(
        SphereDim::Finite(m + 2),
        g.dim_s(),
        k_out,
        g.l_max(),
        Mode::Check,
    )?
    .with_provenance(g.provenance());
    for k in 0..=k_out {
        let kf = k as f64;
        // On the circle the k = 0 norm is doubled (π rather than π/2), which
        // turns the 0/0 in the first factor into 1.
        let keep = if m == 1 && k == 0 {
            1.0
        } else {
            (kf + mf - 1.0) * (kf + mf) / (mf * (2.0 * kf + mf - 1.0))
        };
        let shift = (kf + 1.0) * (kf + 2.0) / (mf * (2.0 * kf + mf + 3.0));
        for l in 0..=g.l_max() {
            out.set(k, l, keep * g.get(k, l) - shift * g.get(k + 2, l));
        }
    }
    Ok(SchoenbergExpansion { grid: out })
}

/// [`dimension_walk`] along either axis.
pub fn dimension_walk_along(e: &SchoenbergExpansion, axis: Axis) -> Result<SchoenbergExpansion> {
    match axis {
        Axis::First => dimension_walk(e),
        Axis::Second => {
            let flipped = SchoenbergExpansion {
                grid: e.grid.transposed(),
            };
            Ok(SchoenbergExpansion {
                grid: dimension_walk(&flipped)?.grid.transposed(),
            })
        }
    }
}

/// Settings for [`infinite_limit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitOptions {
    /// Quadrature nodes per axis; `None` uses the analysis default.
    pub n_nodes: Option<usize>,
    /// `exceeded` is raised when the largest last increment is above this.
    pub warn_threshold: f64,
}

impl Default for LimitOptions {
    fn default() -> Self {
        LimitOptions {
            n_nodes: None,
            warn_threshold: 1e-3,
        }
    }
}

/// Estimated coefficients on `S^∞ × S^M`.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitEstimate {
    /// CHECK grid with `m = ∞`: the coefficients at the last dimension in the sequence.
    pub grid: CoefficientGrid,
    /// Per-entry `|f̌^{m_last} - f̌^{m_prev}|`, row-major; infinite if the sequence has one element.
    pub increments: Vec<f64>,
    /// Largest increment at each step of the sequence (length `len - 1`).
    pub step_increments: Vec<f64>,
    pub max_increment: f64,
    pub exceeded: bool,
}

/// Normalized coefficients of `f` as the first sphere dimension grows along
/// even `m_sequence`, reporting the last value as the `S^∞` estimate.
///
/// When `dim_s` is infinite too, both axes walk the sequence together and the
/// result is the monomial expansion on `S^∞ × S^∞`.
pub fn infinite_limit<F>(
    f: F,
    dim_s: SphereDim,
    k_max: usize,
    l_max: usize,
    m_sequence: &[u32],
    options: LimitOptions,
) -> Result<LimitEstimate>
where
    F: Fn(f64, f64) -> f64,
{
    if m_sequence.is_empty() {
        return Err(invalid("dimension sequence is empty"));
    }
    if m_sequence.iter().any(|&m| m == 0 || m % 2 == 1)
        || m_sequence.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(invalid(
            "dimension sequence must be increasing even integers",
        ));
    }
    let mut previous: Option<CoefficientGrid> = None;
    let mut step_increments = Vec::with_capacity(m_sequence.len().saturating_sub(1));
    let mut increments = alloc::vec![f64::INFINITY; (k_max + 1) * (l_max + 1)];
    for &m in m_sequence {
        let second = match dim_s {
            SphereDim::Infinite => SphereDim::Finite(m),
            finite => finite,
        };
        let hat = analyze(
            &f,
            SphereDim::Finite(m),
            second,
            k_max,
            l_max,
            options.n_nodes,
        )?;
        let check = to_check_mode(&hat)?;
        if let Some(prev) = &previous {
            for (inc, (a, b)) in increments
                .iter_mut()
                .zip(check.values().iter().zip(prev.values()))
            {
                *inc = (a - b).abs();
            }
            step_increments.push(increments.iter().copied().fold(0.0, f64::max));
        }
        previous = Some(check);
    }
    let last = previous.expect("sequence is nonempty");
    let grid = last.relabel(SphereDim::Infinite, dim_s);
    let max_increment = increments.iter().copied().fold(0.0, f64::max);
    Ok(LimitEstimate {
        grid,
        increments,
        step_increments,
        max_increment,
        exceeded: max_increment.is_nan() || max_increment > options.warn_threshold,
    })
}

/// `max_{k <= kmax} |R_k^m(t) - t^k|`, the distance to the monomial limit.
pub fn monomial_gap(m: u32, kmax: usize, t: f64) -> Result<f64> {
    let r = normalized_sequence(kmax, SphereDim::finite(m)?, t)?;
    let mut tk = 1.0;
    let mut worst: f64 = 0.0;
    for rk in r {
        worst = worst.max((rk - tk).abs());
        tk *= t;
    }
    Ok(worst)
}
