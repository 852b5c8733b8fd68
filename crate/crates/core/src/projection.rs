//! Interpolation projections `P_{γ,n}` and `Q_{2n}` as sample-then-transform
//! operators, and the closed-form error and stability bounds.

use num_complex::Complex64;

use crate::error::{check_finite, Error, Result};
use crate::geometry::Foci;
use crate::polybasis::{cheb_nodes, cheb_transform, equi_nodes, laurent_transform, ChebCoeffs, LaurentCoeffs};

/// Coefficients (in standard coordinates) of the degree `n − 1` interpolant of
/// `f` at the mapped Chebyshev points `α_γ(x_k)`.
pub fn project_cheb(f: impl Fn(Complex64) -> Complex64, foci: &Foci, n: usize) -> Result<ChebCoeffs> {
    let grid = cheb_nodes(n)?;
    let values = grid
        .nodes()
        .iter()
        .map(|&x| {
            let p = foci.from_standard(Complex64::new(x, 0.0));
            check_finite(|| "interpolated function".into(), p, f(p))
        })
        .collect::<Result<Vec<_>>>()?;
    cheb_transform(&grid, &values)
}

/// Laurent interpolant with degrees `−n..n−1` of `f` at the `2n`-th roots of `−1`.
pub fn project_equi(f: impl Fn(Complex64) -> Complex64, n: usize) -> Result<LaurentCoeffs> {
    let grid = equi_nodes(n)?;
    let values = grid
        .nodes()
        .iter()
        .map(|&z| check_finite(|| "interpolated function".into(), z, f(z)))
        .collect::<Result<Vec<_>>>()?;
    laurent_transform(&grid, &values)
}

fn check_radii(r: f64, big_r: f64, n: usize) -> Result<()> {
    if !(r > 1.0 && r < big_r && big_r.is_finite()) {
        return Err(Error::InvalidParameter(format!("need 1 < r < R, got r={r}, R={big_r}")));
    }
    if n == 0 {
        return Err(Error::EmptyBasis);
    }
    Ok(())
}

/// `c_{r,R} = sinh(log R) / (cosh(log R) − cosh(log r))`.
fn bound_constant(r: f64, big_r: f64) -> f64 {
    let (a, b) = (r.ln(), big_r.ln());
    b.sinh() / (b.cosh() - a.cosh())
}

/// `c_{r,R} · cosh(n log r) / sinh(n log R)`: operator-norm bound for the
/// interpolation error from `E_R` (or `A_R`) measured on `E_r` (or `A_r`).
pub fn embedding_error_bound(r: f64, big_r: f64, n: usize) -> Result<f64> {
    check_radii(r, big_r, n)?;
    let (a, b) = (n as f64 * r.ln(), n as f64 * big_r.ln());
    // cosh(a)/sinh(b) rewritten to stay finite for large n
    let ratio = (a - b).exp() * (1.0 + (-2.0 * a).exp()) / (1.0 - (-2.0 * b).exp());
    Ok(bound_constant(r, big_r) * ratio)
}

/// `c_{r,R} · (cosh(n log R) + cosh(n log r)) / sinh(n log R)`: norm bound for
/// the interpolation projection itself.
pub fn projection_norm_bound(r: f64, big_r: f64, n: usize) -> Result<f64> {
    check_radii(r, big_r, n)?;
    let (a, b) = (n as f64 * r.ln(), n as f64 * big_r.ln());
    let e2b = (-2.0 * b).exp();
    let ratio = (1.0 + e2b + (a - b).exp() + (-a - b).exp()) / (1.0 - e2b);
    Ok(bound_constant(r, big_r) * ratio)
}
