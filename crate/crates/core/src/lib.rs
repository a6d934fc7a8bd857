//! Isotropic positive definite kernels on products of spheres `S^m × S^M`.
//!
//! A continuous kernel `K((x, z), (y, w)) = f(x·y, z·w)` is positive definite
//! exactly when its isotropic part expands as
//! `f(t, s) = Σ f̂_{k,l} P_k^m(t) P_l^M(s)` with nonnegative, summable
//! coefficients. This crate computes those expansions numerically and
//! builds tooling around them:
//!
//! - [`special`]: Gegenbauer polynomials, values at one, norms, sphere areas.
//! - [`quadrature`]: Gaussian rules for the Gegenbauer weight and coefficient analysis.
//! - [`expansion`]: synthesis, certification, the dimension walk and the `S^∞` limit.
//! - [`oracle`]: Gram-matrix tests for (strict) positive definiteness on sampled points.
//! - [`constructions`]: closed-form kernel families with known status.
//! - [`interp`]: scattered-data interpolation on `S^m × S^M`.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod constructions;
pub mod error;
pub mod expansion;
pub mod interp;
pub mod linalg;
pub mod oracle;
pub mod quadrature;
pub mod special;

pub use error::{Error, Result};
pub use special::SphereDim;
