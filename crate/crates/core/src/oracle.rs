//! Empirical positive-definiteness tests on sampled points of `S^m × S^M`.
//!
//! These are falsifiers: a Gram matrix with a negative eigenvalue disproves
//! positive definiteness, a passing matrix only fails to disprove it.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::expansion::Axis;
use crate::linalg::{min_symmetric_eigenvalue, symmetry_residual};
use crate::special::SphereDim;

/// Allowed deviation of a point's norm from one.
pub const NORM_TOL: f64 = 1e-12;
/// Geodesic gap enforced by the sampler between points that must differ.
pub const SAMPLING_SEPARATION: f64 = 1e-6;
/// Geodesic gap below which two stored points count as equal.
pub const DISTINCT_TOL: f64 = 1e-9;
/// Default absolute tolerance on the smallest Gram eigenvalue.
pub const DEFAULT_TOL: f64 = 1e-8;

const MAX_RESAMPLE_ROUNDS: usize = 100;

/// Which points of a product set must be distinct.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distinctness {
    /// The pairs `(x_i, z_i)` are pairwise distinct.
    Pairs,
    /// All `x_i` are distinct and all `z_i` are distinct.
    Componentwise,
}

/// `n` points `(x_i, z_i)` with `x_i ∈ S^m ⊂ R^{m+1}` and `z_i ∈ S^M ⊂ R^{M+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductPointSet {
    m: u32,
    big_m: u32,
    xs: Vec<Vec<f64>>,
    zs: Vec<Vec<f64>>,
}

impl ProductPointSet {
    pub fn new(
        m: SphereDim,
        big_m: SphereDim,
        xs: Vec<Vec<f64>>,
        zs: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let (m, big_m) = (m.require_finite()?, big_m.require_finite()?);
        if xs.len() != zs.len() {
            return Err(invalid("point set components differ in length"));
        }
        for (x, z) in xs.iter().zip(&zs) {
            check_unit(x, m)?;
            check_unit(z, big_m)?;
        }
        Ok(ProductPointSet { m, big_m, xs, zs })
    }

    pub fn dim_t(&self) -> SphereDim {
        SphereDim::Finite(self.m)
    }

    pub fn dim_s(&self) -> SphereDim {
        SphereDim::Finite(self.big_m)
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn xs(&self) -> &[Vec<f64>] {
        &self.xs
    }

    pub fn zs(&self) -> &[Vec<f64>] {
        &self.zs
    }

    /// Whether the set satisfies `mode` with geodesic tolerance `tol`.
    pub fn is_distinct(&self, mode: Distinctness, tol: f64) -> bool {
        (0..self.len()).all(|j| (0..j).all(|i| self.separated(i, j, mode, tol)))
    }

    /// The same points seen in `S^{m + extra_t} × S^{M + extra_s}` by zero padding.
    pub fn embed(&self, extra_t: u32, extra_s: u32) -> ProductPointSet {
        let pad = |v: &Vec<f64>, extra: u32| {
            let mut w = v.clone();
            w.resize(v.len() + extra as usize, 0.0);
            w
        };
        ProductPointSet {
            m: self.m + extra_t,
            big_m: self.big_m + extra_s,
            xs: self.xs.iter().map(|x| pad(x, extra_t)).collect(),
            zs: self.zs.iter().map(|z| pad(z, extra_s)).collect(),
        }
    }

    fn separated(&self, i: usize, j: usize, mode: Distinctness, tol: f64) -> bool {
        let dx = geodesic_distance(&self.xs[i], &self.xs[j]);
        let dz = geodesic_distance(&self.zs[i], &self.zs[j]);
        match mode {
            Distinctness::Pairs => dx > tol || dz > tol,
            Distinctness::Componentwise => dx > tol && dz > tol,
        }
    }
}

fn check_unit(v: &[f64], m: u32) -> Result<()> {
    if v.len() != m as usize + 1 {
        return Err(invalid("point has the wrong number of coordinates"));
    }
    let norm = libm::sqrt(v.iter().map(|c| c * c).sum());
    if norm.is_nan() || (norm - 1.0).abs() > NORM_TOL {
        return Err(invalid("point is not on the unit sphere"));
    }
    Ok(())
}

/// Inner product of unit vectors, clamped to `[-1, 1]`.
///
/// Near `±1` it is taken from the chord `1 - |a - b|²/2` (or `|a + b|²/2 - 1`),
/// so identical points give exactly 1.
pub fn unit_dot(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let t = if dot > 0.5 {
        1.0 - 0.5 * a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>()
    } else if dot < -0.5 {
        0.5 * a.iter().zip(b).map(|(x, y)| (x + y) * (x + y)).sum::<f64>() - 1.0
    } else {
        dot
    };
    t.clamp(-1.0, 1.0)
}

/// Great-circle distance `2 asin(|a - b| / 2)`, accurate for nearby points.
pub fn geodesic_distance(a: &[f64], b: &[f64]) -> f64 {
    let chord = libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum());
    2.0 * libm::asin((0.5 * chord).min(1.0))
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let norm = libm::sqrt(v.iter().map(|c| c * c).sum());
        if norm > 1e-8 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

/// Uniform random points on `S^m × S^M`, deterministic in `seed`.
///
/// Points violating `mode` at [`SAMPLING_SEPARATION`] are redrawn, for at most
/// 100 rounds.
pub fn sample_points(
    m: SphereDim,
    big_m: SphereDim,
    n: usize,
    seed: u64,
    mode: Distinctness,
) -> Result<ProductPointSet> {
    let (m, big_m) = (m.require_finite()?, big_m.require_finite()?);
    if n == 0 {
        return Err(invalid("need at least one point"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut set = ProductPointSet {
        m,
        big_m,
        xs: Vec::with_capacity(n),
        zs: Vec::with_capacity(n),
    };
    for _ in 0..n {
        set.xs.push(random_unit(&mut rng, m as usize + 1));
        set.zs.push(random_unit(&mut rng, big_m as usize + 1));
    }
    for _ in 0..MAX_RESAMPLE_ROUNDS {
        let mut clean = true;
        for j in 1..n {
            if (0..j).any(|i| !set.separated(i, j, mode, SAMPLING_SEPARATION)) {
                clean = false;
                set.xs[j] = random_unit(&mut rng, m as usize + 1);
                set.zs[j] = random_unit(&mut rng, big_m as usize + 1);
            }
        }
        if clean {
            return Ok(set);
        }
    }
    Err(Error::Sampling {
        n,
        rounds: MAX_RESAMPLE_ROUNDS,
    })
}

/// `n` uniform points on a single sphere `S^m`, pairwise separated.
pub fn sample_sphere(m: SphereDim, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    Ok(sample_points(m, m, n, seed, Distinctness::Componentwise)?.xs)
}

/// Gram matrix `G_{μν} = f(x_μ·x_ν, z_μ·z_ν)`, every entry evaluated.
///
/// Diagonal inner products are taken as exactly 1.
pub fn gram<F>(f: F, p: &ProductPointSet) -> Result<DMatrix<f64>>
where
    F: Fn(f64, f64) -> f64,
{
    let n = p.len();
    let mut g = DMatrix::zeros(n, n);
    for row in 0..n {
        for col in 0..n {
            let v = if row == col {
                f(1.0, 1.0)
            } else {
                f(
                    unit_dot(&p.xs[row], &p.xs[col]),
                    unit_dot(&p.zs[row], &p.zs[col]),
                )
            };
            if !v.is_finite() {
                return Err(Error::GramEntry { row, col });
            }
            g[(row, col)] = v;
        }
    }
    Ok(g)
}

/// Gram matrix `g(x_μ·x_ν)` of a univariate isotropic part on one sphere.
pub fn gram_single<G>(g: G, xs: &[Vec<f64>]) -> Result<DMatrix<f64>>
where
    G: Fn(f64) -> f64,
{
    let n = xs.len();
    let mut out = DMatrix::zeros(n, n);
    for row in 0..n {
        for col in 0..n {
            let v = if row == col {
                g(1.0)
            } else {
                g(unit_dot(&xs[row], &xs[col]))
            };
            if !v.is_finite() {
                return Err(Error::GramEntry { row, col });
            }
            out[(row, col)] = v;
        }
    }
    Ok(out)
}

/// Threshold on the smallest eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    Absolute(f64),
    /// `tol · n · max |G_{μν}|`.
    Scaled(f64),
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::Absolute(DEFAULT_TOL)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GramVerdict {
    NonnegDefinite,
    Indefinite,
}

impl GramVerdict {
    pub fn label(self) -> &'static str {
        match self {
            GramVerdict::NonnegDefinite => "NONNEG_DEFINITE",
            GramVerdict::Indefinite => "INDEFINITE",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GramReport {
    pub n: usize,
    pub min_eigenvalue: f64,
    /// Effective absolute tolerance after scaling.
    pub tolerance: f64,
    pub verdict: GramVerdict,
    pub symmetry_residual: f64,
}

/// Eigenvalue verdict for an assembled symmetric matrix.
pub fn gram_report(matrix: &DMatrix<f64>, tol: Tolerance) -> Result<GramReport> {
    let n = matrix.nrows();
    let tolerance = match tol {
        Tolerance::Absolute(t) => t,
        Tolerance::Scaled(t) => t * n as f64 * matrix.amax(),
    };
    let min_eigenvalue = min_symmetric_eigenvalue(matrix)?;
    let verdict = if min_eigenvalue >= -tolerance {
        GramVerdict::NonnegDefinite
    } else {
        GramVerdict::Indefinite
    };
    Ok(GramReport {
        n,
        min_eigenvalue,
        tolerance,
        verdict,
        symmetry_residual: symmetry_residual(matrix),
    })
}

/// Nonnegative-definiteness of the Gram matrix of `f` at `p`.
pub fn test_pd<F>(f: F, p: &ProductPointSet, tol: Tolerance) -> Result<GramReport>
where
    F: Fn(f64, f64) -> f64,
{
    gram_report(&gram(f, p)?, tol)
}

/// Single-sphere analogue of [`test_pd`].
pub fn test_pd_single<G>(g: G, xs: &[Vec<f64>], tol: Tolerance) -> Result<GramReport>
where
    G: Fn(f64) -> f64,
{
    gram_report(&gram_single(g, xs)?, tol)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StrictOutcome {
    /// Every trial had smallest eigenvalue above `tol`; the lowest one seen.
    Pass { min_eigenvalue: f64 },
    /// A point set with smallest eigenvalue `<= tol`; `seed` reproduces it
    /// (absent when the points were supplied by the caller).
    Fail {
        seed: Option<u64>,
        min_eigenvalue: f64,
    },
}

impl StrictOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, StrictOutcome::Pass { .. })
    }
}

/// Parameters shared by [`test_strict`] and [`test_dc_strict`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrictConfig {
    pub dim_t: SphereDim,
    pub dim_s: SphereDim,
    /// Order `n`: points per trial.
    pub n: usize,
    pub trials: usize,
    /// Trial `i` samples with seed `seed + i`.
    pub seed: u64,
    pub tol: f64,
}

fn strict_trials<F>(f: F, cfg: &StrictConfig, mode: Distinctness) -> Result<StrictOutcome>
where
    F: Fn(f64, f64) -> f64,
{
    if cfg.n == 0 || cfg.trials == 0 {
        return Err(invalid("strictness test needs n >= 1 and trials >= 1"));
    }
    let mut lowest = f64::INFINITY;
    for trial in 0..cfg.trials {
        let seed = cfg.seed.wrapping_add(trial as u64);
        let p = sample_points(cfg.dim_t, cfg.dim_s, cfg.n, seed, mode)?;
        let min_eigenvalue = min_symmetric_eigenvalue(&gram(&f, &p)?)?;
        if min_eigenvalue.is_nan() || min_eigenvalue <= cfg.tol {
            return Ok(StrictOutcome::Fail {
                seed: Some(seed),
                min_eigenvalue,
            });
        }
        lowest = lowest.min(min_eigenvalue);
    }
    Ok(StrictOutcome::Pass {
        min_eigenvalue: lowest,
    })
}

/// Randomized falsifier for strict positive definiteness of order `n`
/// over pair-distinct point sets.
pub fn test_strict<F>(f: F, cfg: &StrictConfig) -> Result<StrictOutcome>
where
    F: Fn(f64, f64) -> f64,
{
    strict_trials(f, cfg, Distinctness::Pairs)
}

/// Randomized falsifier for DC-strict positive definiteness of order `n`
/// over componentwise-distinct point sets.
pub fn test_dc_strict<F>(f: F, cfg: &StrictConfig) -> Result<StrictOutcome>
where
    F: Fn(f64, f64) -> f64,
{
    strict_trials(f, cfg, Distinctness::Componentwise)
}

/// Strictness check on a caller-supplied point set, which must satisfy `mode`.
pub fn strict_on_points<F>(
    f: F,
    p: &ProductPointSet,
    mode: Distinctness,
    tol: f64,
) -> Result<StrictOutcome>
where
    F: Fn(f64, f64) -> f64,
{
    if !p.is_distinct(mode, DISTINCT_TOL) {
        return Err(invalid(
            "point set does not satisfy the requested distinctness",
        ));
    }
    let min_eigenvalue = min_symmetric_eigenvalue(&gram(f, p)?)?;
    if min_eigenvalue > tol {
        Ok(StrictOutcome::Pass { min_eigenvalue })
    } else {
        Ok(StrictOutcome::Fail {
            seed: None,
            min_eigenvalue,
        })
    }
}

/// `t ↦ f(t, t)`, a candidate isotropic part on `S^{min(m, M)}`.
pub fn diagonal_restriction<F>(f: F) -> impl Fn(f64) -> f64
where
    F: Fn(f64, f64) -> f64,
{
    move |t| f(t, t)
}

/// `t ↦ f(t, value)` (first axis) or `s ↦ f(value, s)` (second axis).
///
/// With `value = 1` this is the isotropic part of a kernel on the corresponding single sphere.
pub fn slice_restriction<F>(f: F, axis: Axis, value: f64) -> impl Fn(f64) -> f64
where
    F: Fn(f64, f64) -> f64,
{
    move |x| match axis {
        Axis::First => f(x, value),
        Axis::Second => f(value, x),
    }
}
