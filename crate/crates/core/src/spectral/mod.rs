//! Eigendecomposition of collocation matrices, eigenfunctions,
//! eigenfunctionals and convergence tables.
//!
//! A right eigenvector `x` of `M` gives the eigenfunction `h = Σ x_l e_l`; a
//! left eigenvector (`Mᵀx = λx`) gives the eigenfunctional `h* = Σ x_l e_l*`.

mod schur;

use std::cmp::Ordering;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{check_finite, Error, Result};
use crate::geometry::Foci;
use crate::polybasis::{cheb_nodes, cheb_transform, equi_nodes, laurent_transform, ChebCoeffs, LaurentCoeffs};
use crate::transferop::{Basis, CollocationMatrix};

/// Relative modulus gap below which two eigenvalues are ordered by real and
/// then imaginary part instead of modulus.
const TIE_TOLERANCE: f64 = 1e-9;

/// Eigenvalues in descending modulus with unit-normalised right and left
/// eigenvectors stored column-wise in the same order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    basis: Basis,
    foci: Foci,
    eigenvalues: Vec<Complex64>,
    right: DMatrix<Complex64>,
    left: DMatrix<Complex64>,
    residual: f64,
    left_residual: f64,
}

impl SpectralData {
    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn foci(&self) -> Foci {
        self.foci
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn eigenvalue(&self, index: usize) -> Result<Complex64> {
        self.eigenvalues.get(index).copied().ok_or(Error::InvalidIndex {
            index,
            len: self.eigenvalues.len(),
        })
    }

    /// Right eigenvectors `v_i` as columns.
    pub fn right_vectors(&self) -> &DMatrix<Complex64> {
        &self.right
    }

    /// Left eigenvectors `u_i` (with `Mᵀu_i = λ_i u_i`) as columns.
    pub fn left_vectors(&self) -> &DMatrix<Complex64> {
        &self.left
    }

    /// `max_i ‖M v_i − λ_i v_i‖∞ / ‖M‖∞`.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// `max_i ‖Mᵀ u_i − λ_i u_i‖∞ / ‖M‖∞`.
    pub fn left_residual(&self) -> f64 {
        self.left_residual
    }
}

/// Full eigendecomposition of a collocation matrix.
///
/// Graded Laurent matrices are decomposed after the similarity
/// `S = D⁻¹ M D`, `D = diag(ρ^{−|l|})`, and their eigenvectors mapped back.
pub fn eigendecompose(matrix: &CollocationMatrix) -> Result<SpectralData> {
    let m = matrix.entries();
    let size = m.nrows();
    let scaling: Option<Vec<f64>> = matrix.grading().map(|rho| {
        let half = (size / 2) as i32;
        (0..size as i32).map(|i| rho.powi(-(i - half).abs())).collect()
    });
    let work = match &scaling {
        Some(d) => DMatrix::from_fn(size, size, |i, j| m[(i, j)] * (d[j] / d[i])),
        None => m.clone(),
    };
    let s = schur::schur(&work)?;
    let mut right = &s.z * schur::triangular_right_vectors(&s.t);
    let mut left = s.z.conjugate() * schur::triangular_left_vectors(&s.t);
    if let Some(d) = &scaling {
        for i in 0..size {
            for j in 0..size {
                right[(i, j)] *= d[i];
                left[(i, j)] /= d[i];
            }
        }
    }
    let values: Vec<Complex64> = (0..size).map(|i| s.t[(i, i)]).collect();
    let order = descending_order(&values);

    let eigenvalues: Vec<Complex64> = order.iter().map(|&i| values[i]).collect();
    let right = DMatrix::from_fn(size, size, |r, c| right[(r, order[c])]);
    let left = DMatrix::from_fn(size, size, |r, c| left[(r, order[c])]);
    let right = normalize_columns(right);
    let left = normalize_columns(left);

    let norm = infinity_norm(m);
    let residual_of = |a: &DMatrix<Complex64>, vectors: &DMatrix<Complex64>| -> f64 {
        if norm == 0.0 {
            return 0.0;
        }
        let product = a * vectors;
        let mut worst: f64 = 0.0;
        for (c, lambda) in eigenvalues.iter().enumerate() {
            for r in 0..size {
                worst = worst.max((product[(r, c)] - lambda * vectors[(r, c)]).norm());
            }
        }
        worst / norm
    };
    let residual = residual_of(m, &right);
    let left_residual = residual_of(&m.transpose(), &left);
    Ok(SpectralData {
        basis: matrix.basis(),
        foci: matrix.foci(),
        eigenvalues,
        right,
        left,
        residual,
        left_residual,
    })
}

fn infinity_norm(m: &DMatrix<Complex64>) -> f64 {
    m.row_iter()
        .map(|row| row.iter().map(|c| c.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Scale each column so that its entry of largest modulus is exactly 1.
fn normalize_columns(mut m: DMatrix<Complex64>) -> DMatrix<Complex64> {
    for mut col in m.column_iter_mut() {
        let mut best = 0;
        for (i, c) in col.iter().enumerate() {
            if c.norm() > col[best].norm() {
                best = i;
            }
        }
        let pivot = col[best];
        if pivot != Complex64::new(0.0, 0.0) {
            for c in col.iter_mut() {
                *c /= pivot;
            }
            col[best] = Complex64::new(1.0, 0.0);
        }
    }
    m
}

/// Indices sorting `values` by descending modulus; values whose moduli agree
/// to a relative `TIE_TOLERANCE` are ordered by descending real part (with the
/// same tolerance) and then descending imaginary part.
fn descending_order(values: &[Complex64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].norm().total_cmp(&values[a].norm()).then(a.cmp(&b)));
    let mut out = Vec::with_capacity(idx.len());
    let mut start = 0;
    while start < idx.len() {
        let lead = values[idx[start]].norm();
        let tol = TIE_TOLERANCE * lead;
        let mut end = start + 1;
        while end < idx.len() && lead - values[idx[end]].norm() <= tol {
            end += 1;
        }
        let mut group = idx[start..end].to_vec();
        group.sort_by(|&a, &b| values[b].re.total_cmp(&values[a].re));
        let mut g = 0;
        while g < group.len() {
            let re = values[group[g]].re;
            let mut h = g + 1;
            while h < group.len() && re - values[group[h]].re <= tol {
                h += 1;
            }
            group[g..h].sort_by(|&a, &b| values[b].im.total_cmp(&values[a].im));
            g = h;
        }
        out.extend(group);
        start = end;
    }
    out
}

/// Expansion coefficients of an eigenfunction in the matrix's basis.
#[derive(Debug, Clone, PartialEq)]
pub enum Eigenfunction {
    Chebyshev(ChebCoeffs),
    Laurent(LaurentCoeffs),
}

impl Eigenfunction {
    /// Value at a point of the domain (for Chebyshev, in the ellipse's own coordinates).
    pub fn eval(&self, foci: &Foci, p: Complex64) -> Result<Complex64> {
        match self {
            Eigenfunction::Chebyshev(d) => Ok(d.eval(foci.to_standard(p))),
            Eigenfunction::Laurent(c) => c.eval(p),
        }
    }
}

/// `h = Σ x_l e_l` from the right eigenvector at `index`.
pub fn eigenfunction(data: &SpectralData, index: usize) -> Result<Eigenfunction> {
    data.eigenvalue(index)?;
    let x: Vec<Complex64> = data.right.column(index).iter().copied().collect();
    Ok(match data.basis {
        Basis::Chebyshev => {
            let mut d = x;
            d[0] *= 2.0;
            Eigenfunction::Chebyshev(ChebCoeffs::new(d))
        }
        Basis::Laurent => {
            let scale = x.len() as f64;
            Eigenfunction::Laurent(LaurentCoeffs::new(x.into_iter().map(|c| c * scale).collect())?)
        }
    })
}

/// A linear functional `h* = Σ x_l e_l*` normalised to `h*(𝟏) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenFunctional {
    basis: Basis,
    foci: Foci,
    weights: Vec<Complex64>,
}

impl EigenFunctional {
    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    /// `h*(f)` from samples of `f` at the collocation nodes (mapped Chebyshev
    /// points `α_γ(x_k)`, or the `2n` roots of `−1`).
    pub fn apply_samples(&self, values: &[Complex64]) -> Result<Complex64> {
        let x = &self.weights;
        match self.basis {
            Basis::Chebyshev => {
                let d = cheb_transform(&cheb_nodes(x.len())?, values)?;
                let d = d.as_slice();
                Ok(x[0] * d[0] * 0.5 + x.iter().zip(d).skip(1).map(|(a, b)| a * b).sum::<Complex64>())
            }
            Basis::Laurent => {
                let c = laurent_transform(&equi_nodes(x.len() / 2)?, values)?;
                let scale = 1.0 / x.len() as f64;
                Ok(x.iter().zip(c.as_slice()).map(|(a, b)| a * b).sum::<Complex64>() * scale)
            }
        }
    }

    /// The collocation nodes at which [`EigenFunctional::apply_samples`] expects values.
    pub fn sample_points(&self) -> Result<Vec<Complex64>> {
        Ok(match self.basis {
            Basis::Chebyshev => cheb_nodes(self.weights.len())?
                .nodes()
                .iter()
                .map(|&x| self.foci.from_standard(Complex64::new(x, 0.0)))
                .collect(),
            Basis::Laurent => equi_nodes(self.weights.len() / 2)?.nodes().to_vec(),
        })
    }

    /// `h*(f)` for a function evaluated at the collocation nodes.
    pub fn apply(&self, f: impl Fn(Complex64) -> Complex64) -> Result<Complex64> {
        let values = self
            .sample_points()?
            .into_iter()
            .map(|p| check_finite(|| "functional argument".into(), p, f(p)))
            .collect::<Result<Vec<_>>>()?;
        self.apply_samples(&values)
    }
}

/// The normalised eigenfunctional of the left eigenvector at `index`.
pub fn eigenfunctional(data: &SpectralData, index: usize) -> Result<EigenFunctional> {
    let lambda = data.eigenvalue(index)?;
    if lambda == Complex64::new(0.0, 0.0) {
        return Err(Error::InvalidParameter("eigenfunctional of a zero eigenvalue".into()));
    }
    let x: Vec<Complex64> = data.left.column(index).iter().copied().collect();
    // e_l*(𝟏) vanishes except for the constant mode
    let constant_mode = match data.basis {
        Basis::Chebyshev => 0,
        Basis::Laurent => x.len() / 2,
    };
    let at_one = x[constant_mode];
    if at_one.norm() <= 1e-14 {
        return Err(Error::Normalization(at_one));
    }
    Ok(EigenFunctional {
        basis: data.basis,
        foci: data.foci,
        weights: x.into_iter().map(|c| c / at_one).collect(),
    })
}

/// One row of a convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub eigenvalue: Complex64,
    /// `|λ_n − λ_{n_prev}|`, absent in the first row.
    pub difference: Option<f64>,
    /// `(r/R)^n` when both radii are known.
    pub bound: Option<f64>,
}

/// Track one eigenvalue across basis sizes.
///
/// The eigenvalue at `index` (descending modulus) for the largest `n` seeds
/// the table; walking down in `n`, each run contributes the eigenvalue
/// nearest to the one matched at the next larger `n`.
pub fn convergence_table<F>(
    assemble: F,
    n_list: &[usize],
    index: usize,
    radii: Option<(f64, f64)>,
) -> Result<Vec<ConvergenceRow>>
where
    F: Fn(usize) -> Result<CollocationMatrix> + Sync,
{
    if n_list.is_empty() || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("basis sizes must be nonempty and strictly increasing".into()));
    }
    let spectra: Vec<Vec<Complex64>> = n_list
        .par_iter()
        .map(|&n| Ok(eigendecompose(&assemble(n)?)?.eigenvalues))
        .collect::<Result<_>>()?;
    let last = spectra.len() - 1;
    let seed = *spectra[last].get(index).ok_or(Error::InvalidIndex {
        index,
        len: spectra[last].len(),
    })?;
    let mut matched = vec![seed; spectra.len()];
    for i in (0..last).rev() {
        matched[i] = nearest(&spectra[i], matched[i + 1], n_list[i])?;
    }
    Ok(n_list
        .iter()
        .enumerate()
        .map(|(i, &n)| ConvergenceRow {
            n,
            eigenvalue: matched[i],
            difference: (i > 0).then(|| (matched[i] - matched[i - 1]).norm()),
            bound: radii.map(|(r, big_r)| (r / big_r).powi(n as i32)),
        })
        .collect())
}

fn nearest(candidates: &[Complex64], target: Complex64, n: usize) -> Result<Complex64> {
    let mut sorted: Vec<(f64, Complex64)> = candidates.iter().map(|&c| ((c - target).norm(), c)).collect();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
    let (d0, first) = sorted[0];
    let tol = 1e-12 * (1.0 + target.norm());
    for &(d, other) in &sorted[1..] {
        if d - d0 > tol {
            break;
        }
        if (other - first).norm() > tol {
            return Err(Error::AmbiguousMatch { n, first, second: other });
        }
    }
    Ok(first)
}

/// Indices (in `data`'s order) of eigenvalues that reappear in `reference`,
/// typically the same operator at a neighbouring truncation, to within
/// `tol · max(1, |λ|)`.
///
/// Eigenvalues of a truncated operator that move with `n` approximate
/// nothing in the spectrum of the operator; this drops them.
pub fn persistent_indices(data: &SpectralData, reference: &SpectralData, tol: f64) -> Result<Vec<usize>> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter(format!("persistence tolerance must be positive, got {tol}")));
    }
    Ok(data
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| {
            let scale = tol * l.norm().max(1.0);
            reference.eigenvalues.iter().any(|&m| (m - l).norm() <= scale)
        })
        .map(|(i, _)| i)
        .collect())
}
