//! Closed-form isotropic kernels on `S^m × S^M` with a known positive-definiteness status.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{invalid, Result};
use crate::special::{gegenbauer_upto, SphereDim};

pub type BivariateFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type UnivariateFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Claimed positive-definiteness status, ordered from weakest to strongest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum KernelStatus {
    Unknown,
    Pd,
    /// Strict on point sets whose first components are distinct and whose second components are distinct.
    DcStrictPd,
    /// Strict on every set of distinct pairs.
    StrictPd,
}

impl KernelStatus {
    pub fn label(self) -> &'static str {
        match self {
            KernelStatus::Unknown => "UNKNOWN",
            KernelStatus::Pd => "PD",
            KernelStatus::DcStrictPd => "DC_STRICT_PD",
            KernelStatus::StrictPd => "STRICT_PD",
        }
    }
}

/// How a kernel was built.
#[derive(Debug, Clone, PartialEq)]
pub enum Recipe {
    Constant(f64),
    Product,
    CmExponential {
        a: f64,
        b: f64,
    },
    CmInversePower {
        alpha: f64,
        beta: f64,
    },
    Gegenbauer {
        k: usize,
        m: u32,
        l: usize,
        big_m: u32,
    },
    Sum {
        weights: Vec<f64>,
    },
    Pointwise {
        factors: usize,
    },
    Custom,
}

/// An isotropic part `f` on `[-1, 1]²` with its label and claimed status.
#[derive(Clone)]
pub struct IsotropicKernel {
    evaluator: BivariateFn,
    label: String,
    status: KernelStatus,
    recipe: Recipe,
}

impl fmt::Debug for IsotropicKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IsotropicKernel")
            .field("label", &self.label)
            .field("status", &self.status)
            .field("recipe", &self.recipe)
            .finish_non_exhaustive()
    }
}

impl IsotropicKernel {
    /// A kernel from an arbitrary evaluator; the caller vouches for `status`.
    pub fn custom<F>(label: impl Into<String>, status: KernelStatus, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        IsotropicKernel {
            evaluator: Arc::new(f),
            label: label.into(),
            status,
            recipe: Recipe::Custom,
        }
    }

    /// `f(t, s)` with arguments clamped to `[-1, 1]`.
    pub fn eval(&self, t: f64, s: f64) -> f64 {
        (self.evaluator)(t.clamp(-1.0, 1.0), s.clamp(-1.0, 1.0))
    }

    /// Borrowing closure view, for the generic numerical routines.
    pub fn as_fn(&self) -> impl Fn(f64, f64) -> f64 + '_ {
        move |t, s| self.eval(t, s)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn status(&self) -> KernelStatus {
        self.status
    }

    pub fn recipe(&self) -> &Recipe {
        &self.recipe
    }
}

/// A univariate isotropic part on a single sphere, for [`product_kernel`].
#[derive(Clone)]
pub struct Univariate {
    func: UnivariateFn,
    label: String,
    strict: bool,
}

impl fmt::Debug for Univariate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Univariate")
            .field("label", &self.label)
            .field("strict", &self.strict)
            .finish_non_exhaustive()
    }
}

impl Univariate {
    /// `strict` asserts that `func` is the isotropic part of a strictly
    /// positive definite kernel on its sphere.
    pub fn new<F>(label: impl Into<String>, strict: bool, func: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Univariate {
            func: Arc::new(func),
            label: label.into(),
            strict,
        }
    }

    pub fn constant(c: f64) -> Self {
        Univariate::new(format!("{c}"), false, move |_| c)
    }

    /// `t ↦ t`.
    pub fn identity() -> Self {
        Univariate::new("lin", false, |t| t)
    }

    /// `t ↦ (1 + t) / 2`.
    pub fn affine() -> Self {
        Univariate::new("affine", false, |t| 0.5 * (1.0 + t))
    }

    /// `t ↦ exp(-a arccos t)`; strict for `a > 0`.
    pub fn geodesic_exp(a: f64) -> Result<Self> {
        if !(a.is_finite() && a >= 0.0) {
            return Err(invalid("decay rate must be nonnegative"));
        }
        Ok(Univariate::new(format!("exp({a})"), a > 0.0, move |t| {
            libm::exp(-a * acos_clamped(t))
        }))
    }

    /// `t ↦ (1 + arccos t)^{-alpha}`; strict for `alpha > 0`.
    pub fn geodesic_pow(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(invalid("exponent must be nonnegative"));
        }
        Ok(Univariate::new(
            format!("pow({alpha})"),
            alpha > 0.0,
            move |t| libm::pow(1.0 + acos_clamped(t), -alpha),
        ))
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.func)(t.clamp(-1.0, 1.0))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }
}

fn acos_clamped(t: f64) -> f64 {
    libm::acos(t.clamp(-1.0, 1.0))
}

/// The constant kernel `c`; positive definite when `c >= 0`.
pub fn constant(c: f64) -> IsotropicKernel {
    IsotropicKernel {
        evaluator: Arc::new(move |_, _| c),
        label: format!("const:c={c}"),
        status: if c >= 0.0 {
            KernelStatus::Pd
        } else {
            KernelStatus::Unknown
        },
        recipe: Recipe::Constant(c),
    }
}

/// `h(t, s) = f(t) g(s)`.
///
/// Positive definite by the Schur product theorem. When both parts are
/// strict the kernel is strict; when one is strict and the other is positive
/// at one, the Gram matrices are only guaranteed nonsingular on
/// componentwise-distinct point sets, so the claim is DC-strict.
pub fn product_kernel(first: Univariate, second: Univariate) -> IsotropicKernel {
    let status = if first.strict && second.strict {
        KernelStatus::StrictPd
    } else if (first.strict && second.eval(1.0) > 0.0) || (second.strict && first.eval(1.0) > 0.0) {
        KernelStatus::DcStrictPd
    } else {
        KernelStatus::Pd
    };
    let label = format!("prod:f={},g={}", first.label, second.label);
    let (f, g) = (first.func, second.func);
    IsotropicKernel {
        evaluator: Arc::new(move |t, s| f(t) * g(s)),
        label,
        status,
        recipe: Recipe::Product,
    }
}

/// `exp(-a arccos t - b arccos s)`, strictly positive definite for `a, b > 0`.
pub fn cm_exponential(a: f64, b: f64) -> Result<IsotropicKernel> {
    if !(a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0) {
        return Err(invalid(
            "cm_exp needs a > 0 and b > 0; use a constant kernel for a = b = 0",
        ));
    }
    Ok(IsotropicKernel {
        evaluator: Arc::new(move |t, s| libm::exp(-a * acos_clamped(t) - b * acos_clamped(s))),
        label: format!("cm_exp:a={a},b={b}"),
        status: KernelStatus::StrictPd,
        recipe: Recipe::CmExponential { a, b },
    })
}

/// `(1 + arccos t)^{-alpha} (1 + arccos s)^{-beta}`.
///
/// Strict when both exponents are positive. With one exponent zero the kernel
/// ignores a sphere, so repeated points there give singular Gram matrices:
/// the claim drops to DC-strict.
pub fn cm_inverse_power(alpha: f64, beta: f64) -> Result<IsotropicKernel> {
    if !(alpha.is_finite() && beta.is_finite() && alpha >= 0.0 && beta >= 0.0) {
        return Err(invalid("cm_pow needs alpha >= 0 and beta >= 0"));
    }
    let status = match (alpha > 0.0, beta > 0.0) {
        (true, true) => KernelStatus::StrictPd,
        (false, false) => KernelStatus::Pd,
        _ => KernelStatus::DcStrictPd,
    };
    Ok(IsotropicKernel {
        evaluator: Arc::new(move |t, s| {
            libm::pow(1.0 + acos_clamped(t), -alpha) * libm::pow(1.0 + acos_clamped(s), -beta)
        }),
        label: format!("cm_pow:alpha={alpha},beta={beta}"),
        status,
        recipe: Recipe::CmInversePower { alpha, beta },
    })
}

/// `P_k^m(t) P_l^M(s)`, positive definite on `S^m × S^M` (and on lower-dimensional spheres).
pub fn gegenbauer_tensor(
    k: usize,
    m: SphereDim,
    l: usize,
    big_m: SphereDim,
) -> Result<IsotropicKernel> {
    let (m, big_m) = (m.require_finite()?, big_m.require_finite()?);
    Ok(IsotropicKernel {
        evaluator: Arc::new(move |t, s| {
            gegenbauer_upto(k, m, t)[k] * gegenbauer_upto(l, big_m, s)[l]
        }),
        label: format!("geg:k={k},m={m},l={l},M={big_m}"),
        status: KernelStatus::Pd,
        recipe: Recipe::Gegenbauer { k, m, l, big_m },
    })
}

/// Pointwise combination rule for [`combine`].
#[derive(Debug, Clone, PartialEq)]
pub enum Combination {
    /// Weighted sum with positive weights, one per kernel.
    Sum(Vec<f64>),
    Product,
}

/// Pointwise weighted sum or product of kernels.
///
/// Sum: positive definite if every part is; as strict as its strictest part.
/// Product: as strict as its weakest part (Schur products of positive
/// definite matrices are positive definite).
pub fn combine(kernels: &[IsotropicKernel], op: Combination) -> Result<IsotropicKernel> {
    if kernels.is_empty() {
        return Err(invalid("cannot combine an empty list of kernels"));
    }
    let weakest = kernels.iter().map(|k| k.status).min().expect("nonempty");
    let strongest = kernels.iter().map(|k| k.status).max().expect("nonempty");
    let parts: Vec<BivariateFn> = kernels.iter().map(|k| k.evaluator.clone()).collect();
    match op {
        Combination::Sum(weights) => {
            if weights.len() != kernels.len() {
                return Err(invalid("need one weight per kernel"));
            }
            if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
                return Err(invalid("sum weights must be positive"));
            }
            let status = if weakest == KernelStatus::Unknown {
                KernelStatus::Unknown
            } else {
                strongest
            };
            let label = kernels
                .iter()
                .zip(&weights)
                .map(|(k, w)| format!("{w}*{}", k.label))
                .collect::<Vec<_>>()
                .join(" + ");
            let ws = weights.clone();
            Ok(IsotropicKernel {
                evaluator: Arc::new(move |t, s| {
                    parts.iter().zip(&ws).map(|(f, w)| w * f(t, s)).sum()
                }),
                label: format!("sum({label})"),
                status,
                recipe: Recipe::Sum { weights },
            })
        }
        Combination::Product => {
            let label = kernels
                .iter()
                .map(|k| k.label.as_str())
                .collect::<Vec<_>>()
                .join(" * ");
            let factors = parts.len();
            Ok(IsotropicKernel {
                evaluator: Arc::new(move |t, s| parts.iter().map(|f| f(t, s)).product()),
                label: format!("product({label})"),
                status: weakest,
                recipe: Recipe::Pointwise { factors },
            })
        }
    }
}
