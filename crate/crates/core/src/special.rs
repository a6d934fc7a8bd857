//! Gegenbauer polynomials in the sphere-dimension parametrisation.
//!
//! `P_k^m` is the ultraspherical polynomial `C_k^λ` with `λ = (m - 1) / 2`,
//! orthogonal on `[-1, 1]` against `(1 - t²)^{(m - 2) / 2}`. The circle
//! (`m = 1`, `λ = 0`) uses Chebyshev polynomials of the first kind.

use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};

/// Inputs with `|t| <= 1 + DOMAIN_SLACK` are clamped into `[-1, 1]`.
pub const DOMAIN_SLACK: f64 = 1e-12;

/// Above this value of `k + m` the value at one is computed in log space.
const LOG_SPACE_THRESHOLD: usize = 60;

/// Dimension `m` of the sphere `S^m`, or the Hilbert sphere `S^∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SphereDim {
    Finite(u32),
    Infinite,
}

impl SphereDim {
    pub fn finite(m: u32) -> Result<Self> {
        if m == 0 {
            return Err(invalid("sphere dimension must be at least 1"));
        }
        Ok(SphereDim::Finite(m))
    }

    pub fn get(self) -> Option<u32> {
        match self {
            SphereDim::Finite(m) => Some(m),
            SphereDim::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, SphereDim::Finite(_))
    }

    pub(crate) fn require_finite(self) -> Result<u32> {
        match self {
            SphereDim::Finite(0) => Err(invalid("sphere dimension must be at least 1")),
            SphereDim::Finite(m) => Ok(m),
            SphereDim::Infinite => Err(Error::InfiniteDimension),
        }
    }
}

impl fmt::Display for SphereDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SphereDim::Finite(m) => write!(f, "{m}"),
            SphereDim::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for SphereDim {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") {
            return Ok(SphereDim::Infinite);
        }
        let m = s
            .parse::<u32>()
            .map_err(|_| invalid("sphere dimension must be a positive integer or `inf`"))?;
        SphereDim::finite(m)
    }
}

/// Clamps `t` into `[-1, 1]`, tolerating rounding excursions up to [`DOMAIN_SLACK`].
pub fn clamp_unit(t: f64) -> Result<f64> {
    if t.is_nan() || t.abs() > 1.0 + DOMAIN_SLACK {
        return Err(Error::Domain(t));
    }
    Ok(t.clamp(-1.0, 1.0))
}

/// `P_k^m(t)` by forward three-term recurrence in `k`.
pub fn gegenbauer(k: usize, m: SphereDim, t: f64) -> Result<f64> {
    let m = m.require_finite()?;
    let t = clamp_unit(t)?;
    Ok(gegenbauer_upto(k, m, t)[k])
}

/// `P_0^m(t), ..., P_kmax^m(t)`.
pub fn gegenbauer_sequence(kmax: usize, m: SphereDim, t: f64) -> Result<Vec<f64>> {
    let m = m.require_finite()?;
    let t = clamp_unit(t)?;
    Ok(gegenbauer_upto(kmax, m, t))
}

pub(crate) fn gegenbauer_upto(kmax: usize, m: u32, t: f64) -> Vec<f64> {
    let mut p = vec![0.0; kmax + 1];
    p[0] = 1.0;
    if kmax == 0 {
        return p;
    }
    if m == 1 {
        p[1] = t;
        for k in 1..kmax {
            p[k + 1] = 2.0 * t * p[k] - p[k - 1];
        }
        return p;
    }
    let lambda = 0.5 * (m as f64 - 1.0);
    p[1] = 2.0 * lambda * t;
    for k in 1..kmax {
        let kf = k as f64;
        p[k + 1] =
            (2.0 * (kf + lambda) * t * p[k] - (kf + 2.0 * lambda - 1.0) * p[k - 1]) / (kf + 1.0);
    }
    p
}

/// `P_k^m(1)`, the binomial coefficient `C(k + m - 2, k)`; equal to 1 on the circle.
pub fn gegenbauer_at_one(k: usize, m: SphereDim) -> Result<f64> {
    let m = m.require_finite()?;
    Ok(at_one(k, m))
}

pub(crate) fn at_one(k: usize, m: u32) -> f64 {
    if m <= 2 || k == 0 {
        return 1.0;
    }
    let shift = m as f64 - 2.0;
    if k + m as usize > LOG_SPACE_THRESHOLD {
        let ln = libm::lgamma(k as f64 + shift + 1.0)
            - libm::lgamma(shift + 1.0)
            - libm::lgamma(k as f64 + 1.0);
        return libm::exp(ln);
    }
    (1..=k).fold(1.0, |acc, j| acc * (j as f64 + shift) / j as f64)
}

/// `R_k^m(t) = P_k^m(t) / P_k^m(1)`, or `t^k` on the Hilbert sphere.
pub fn normalized_gegenbauer(k: usize, m: SphereDim, t: f64) -> Result<f64> {
    Ok(normalized_sequence(k, m, t)?[k])
}

/// `R_0^m(t), ..., R_kmax^m(t)`.
///
/// Uses the recurrence for the normalized family directly,
/// `(k + 2λ) R_{k+1} = 2(k + λ) t R_k - k R_{k-1}`, which never forms the
/// (possibly huge) values at one.
pub fn normalized_sequence(kmax: usize, m: SphereDim, t: f64) -> Result<Vec<f64>> {
    let t = clamp_unit(t)?;
    let mut r = vec![0.0; kmax + 1];
    r[0] = 1.0;
    match m {
        SphereDim::Infinite => {
            for k in 1..=kmax {
                r[k] = r[k - 1] * t;
            }
        }
        SphereDim::Finite(_) => {
            let m = m.require_finite()?;
            let lambda = 0.5 * (m as f64 - 1.0);
            if kmax >= 1 {
                r[1] = t;
            }
            for k in 1..kmax {
                let kf = k as f64;
                r[k + 1] = (2.0 * (kf + lambda) * t * r[k] - kf * r[k - 1]) / (kf + 2.0 * lambda);
            }
        }
    }
    Ok(r)
}

/// Surface area of the unit sphere in `R^d`, `2 π^{d/2} / Γ(d/2)`.
///
/// With `d = m + 1` this is the area of `S^m`.
pub fn surface_area(d: u32) -> f64 {
    let half = 0.5 * d as f64;
    2.0 * libm::pow(PI, half) / libm::tgamma(half)
}

/// Total mass `∫ (1 - t²)^{(m-2)/2} dt` of the Gegenbauer weight.
pub fn weight_mass(m: SphereDim) -> Result<f64> {
    let m = m.require_finite()?;
    Ok(surface_area(m + 1) / surface_area(m))
}

/// Squared weighted norm `τ_k^m = ∫ P_k^m(t)² (1 - t²)^{(m-2)/2} dt`.
///
/// On the circle this is `π` for `k = 0` and `π / 2` otherwise.
pub fn ortho_constant(k: usize, m: SphereDim) -> Result<f64> {
    let m = m.require_finite()?;
    Ok(ortho(k, m))
}

pub(crate) fn ortho(k: usize, m: u32) -> f64 {
    if m == 1 {
        return if k == 0 { PI } else { 0.5 * PI };
    }
    let mf = m as f64;
    surface_area(m + 1) / surface_area(m) * (mf - 1.0) / (2.0 * k as f64 + mf - 1.0) * at_one(k, m)
}
