//! Spectral data of transfer operators with holomorphic data.
//!
//! Transfer operators `ℒf = Σ Wᵢ·(f∘Φᵢ)` acting on bounded holomorphic functions
//! on an elliptic domain are discretised by Lagrange–Chebyshev collocation;
//! operators of expanding circle maps acting on annuli are discretised by
//! interpolation at the `2n` roots of `−1`. In both cases the collocation
//! matrix `M_{kl} = e_k*(ℒ e_l)` has the same non-zero spectrum as the
//! projected operator, and its right/left eigenvectors give eigenfunctions and
//! eigenfunctionals. Approximations converge exponentially in `n` at a rate
//! set by the contraction ratio `r/R` of confocal ellipses (or annuli).
//!
//! The modules build on each other bottom-up:
//!
//! * [`polybasis`] — Chebyshev and Laurent nodes, coefficient transforms, evaluation.
//! * [`geometry`] — ellipses, the Joukowski map, elliptic radius, contraction search.
//! * [`projection`] — interpolation projections and their closed-form error bounds.
//! * [`transferop`] — map-weight systems and assembly of collocation matrices.
//! * [`spectral`] — dense eigendecomposition, eigenfunctions, eigenfunctionals.
//! * [`apps`] — correlation decay, Blaschke benchmark, Lyapunov exponents, IFS integrals.

pub mod apps;
pub mod error;
pub mod geometry;
pub mod polybasis;
pub mod projection;
pub mod spectral;
pub mod transferop;

use std::sync::Arc;

pub use num_complex::Complex64;

pub use error::{Error, Result};

/// A shareable complex function of one complex variable.
pub type ComplexFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// Wrap a closure as a [`ComplexFn`].
pub fn cfn<F>(f: F) -> ComplexFn
where
    F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
{
    Arc::new(f)
}

/// Shorthand for a complex number.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
