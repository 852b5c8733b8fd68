//! Map-weight systems and the assembly of collocation matrices
//! `M_{kl} = e_k*(ℒ e_l)`.
//!
//! On an ellipse `E_{γ,R}` the operator is `ℒf = Σ Wᵢ·(f∘Φᵢ)` and the basis is
//! `e_l = T_l∘α_γ⁻¹` with coefficient functionals `e_0* = d₀/2`, `e_l* = d_l`.
//! On an annulus the operator is given by inverse branches,
//! `ℒf = ω Σ kᵢ·(f∘φᵢ)` with branch factors `kᵢ`, the basis is `e_l = z^l`
//! for `l = −n..n−1`, and `e_l* = c_l/2n`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{check_finite, Error, Result};
use crate::geometry::{elliptic_radius, image_radius, EllipticDomain, Foci, DEFAULT_BOUNDARY_SAMPLES};
use crate::polybasis::{cheb_nodes, chebyshev_values, equi_nodes, laurent_transform};
use crate::ComplexFn;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// One term `W·(f∘Φ)` of a transfer operator.
#[derive(Clone)]
pub struct Branch {
    pub map: ComplexFn,
    pub weight: ComplexFn,
}

impl Branch {
    pub fn new(map: ComplexFn, weight: ComplexFn) -> Self {
        Self { map, weight }
    }
}

impl std::fmt::Debug for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("Branch { .. }")
    }
}

/// A finite holomorphic map-weight system on `E_{γ,R}`, optionally with a
/// declared image ellipse `E_{γ,r}` that every branch must map into.
#[derive(Debug, Clone)]
pub struct MapWeightSystem {
    branches: Vec<Branch>,
    foci: Foci,
    outer: f64,
    inner: Option<f64>,
}

impl MapWeightSystem {
    pub fn new(branches: Vec<Branch>, foci: Foci, outer: f64, inner: Option<f64>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::InvalidParameter("a map-weight system needs at least one branch".into()));
        }
        EllipticDomain::new(foci, outer)?;
        if let Some(r) = inner {
            if !(r > 1.0 && r < outer) {
                return Err(Error::InvalidParameter(format!(
                    "image ellipse parameter must satisfy 1 < r < R = {outer}, got {r}"
                )));
            }
        }
        Ok(Self {
            branches,
            foci,
            outer,
            inner,
        })
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn foci(&self) -> Foci {
        self.foci
    }

    /// The declared domain parameter `R`.
    pub fn outer(&self) -> f64 {
        self.outer
    }

    /// The declared image parameter `r`, if any.
    pub fn inner(&self) -> Option<f64> {
        self.inner
    }

    pub fn maps(&self) -> Vec<ComplexFn> {
        self.branches.iter().map(|b| b.map.clone()).collect()
    }

    /// Check that every branch maps sampled points of `∂E_{γ,R}` into `E_{γ,r}`.
    pub fn check_image_ellipse(&self, samples: usize) -> Result<()> {
        let Some(r) = self.inner else { return Ok(()) };
        let domain = EllipticDomain::new(self.foci, self.outer)?;
        let radius = image_radius(&self.maps(), &domain, samples)?;
        if radius > r {
            // locate a witness for the report
            for b in domain.boundary_points(samples) {
                for map in self.maps() {
                    let v = map(b);
                    if elliptic_radius(self.foci.to_standard(v)) > r {
                        return Err(Error::OutsideImageEllipse {
                            point: v,
                            radius: elliptic_radius(self.foci.to_standard(v)),
                            declared: r,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// An inverse branch `φ` of a circle map together with its derivative.
#[derive(Clone)]
pub struct InverseBranch {
    pub map: ComplexFn,
    pub deriv: ComplexFn,
}

impl InverseBranch {
    pub fn new(map: ComplexFn, deriv: ComplexFn) -> Self {
        Self { map, deriv }
    }
}

impl std::fmt::Debug for InverseBranch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("InverseBranch { .. }")
    }
}

/// How the per-branch factor `kᵢ` of a circle operator is formed.
#[derive(Clone)]
pub enum CircleWeight {
    /// `kᵢ = (w∘φᵢ)·φᵢ′` for a potential `w`.
    Potential(ComplexFn),
    /// `kᵢ = (φᵢ′)²`.
    DerivativeSquared,
    /// `kᵢ = c` for every branch.
    Constant(Complex64),
}

impl std::fmt::Debug for CircleWeight {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CircleWeight::Potential(_) => f.write_str("Potential(..)"),
            CircleWeight::DerivativeSquared => f.write_str("DerivativeSquared"),
            CircleWeight::Constant(c) => write!(f, "Constant({c})"),
        }
    }
}

/// Orientation sign `ω` of a circle map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Preserving,
    Reversing,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Preserving => 1.0,
            Orientation::Reversing => -1.0,
        }
    }
}

/// A transfer operator of a circle map given through its inverse branches.
#[derive(Debug, Clone)]
pub struct CircleSystem {
    branches: Vec<InverseBranch>,
    weight: CircleWeight,
    orientation: Orientation,
}

impl CircleSystem {
    pub fn new(branches: Vec<InverseBranch>, weight: CircleWeight, orientation: Orientation) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::InvalidParameter("a circle system needs at least one inverse branch".into()));
        }
        Ok(Self {
            branches,
            weight,
            orientation,
        })
    }

    pub fn branches(&self) -> &[InverseBranch] {
        &self.branches
    }

    pub fn weight(&self) -> &CircleWeight {
        &self.weight
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Branch images and factors `(φᵢ(z), ω·kᵢ(z))` at `z`, validated.
    fn branch_data(&self, z: Complex64) -> Result<Vec<(Complex64, Complex64)>> {
        let sign = self.orientation.sign();
        let mut out: Vec<(Complex64, Complex64)> = Vec::with_capacity(self.branches.len());
        for (i, b) in self.branches.iter().enumerate() {
            let phi = check_finite(|| format!("inverse branch {i}"), z, (b.map)(z))?;
            if phi == ZERO {
                return Err(Error::BranchViolation(format!("inverse branch {i} vanishes at {z}")));
            }
            if out.iter().any(|(p, _)| (p - phi).norm() <= 1e-12 * (1.0 + phi.norm())) {
                return Err(Error::BranchViolation(format!("inverse branch {i} duplicates another at {z}")));
            }
            let factor = match &self.weight {
                CircleWeight::Potential(w) => w(phi) * (b.deriv)(z),
                CircleWeight::DerivativeSquared => {
                    let d = (b.deriv)(z);
                    d * d
                }
                CircleWeight::Constant(c) => *c,
            };
            let factor = check_finite(|| format!("weight of inverse branch {i}"), z, factor * sign)?;
            out.push((phi, factor));
        }
        Ok(out)
    }

    /// `(ℒ e_j)(z)` for `j = −n..n−1`.
    fn basis_images(&self, z: Complex64, n: usize) -> Result<Vec<Complex64>> {
        let data = self.branch_data(z)?;
        let mut out = vec![ZERO; 2 * n];
        for (phi, factor) in data {
            // φ^{-n}, then successive multiplication by φ
            let mut power = phi.powi(-(n as i32));
            for slot in out.iter_mut() {
                *slot += factor * power;
                power *= phi;
            }
        }
        Ok(out)
    }
}

/// Which basis a collocation matrix is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// `T_l∘α_γ⁻¹`, `l = 0..n−1`.
    Chebyshev,
    /// `z^l`, `l = −n..n−1`, stored in index order `l + n`.
    Laurent,
}

/// A square collocation matrix with its basis tag.
///
/// `grading`, when set to `ρ`, records that the matrix is best handled after
/// the diagonal similarity `ρ^{|l|} M_{lj} ρ^{−|j|}` (Laurent basis only): the
/// entries were computed with absolute error proportional to `ρ^{−|l|}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollocationMatrix {
    basis: Basis,
    foci: Foci,
    entries: DMatrix<Complex64>,
    grading: Option<f64>,
}

impl CollocationMatrix {
    /// Wrap a dense matrix. Laurent matrices must have even size.
    pub fn new(basis: Basis, foci: Foci, entries: DMatrix<Complex64>) -> Result<Self> {
        let size = entries.nrows();
        if size == 0 {
            return Err(Error::EmptyBasis);
        }
        if entries.ncols() != size {
            return Err(Error::LengthMismatch {
                expected: size,
                got: entries.ncols(),
            });
        }
        if basis == Basis::Laurent && !size.is_multiple_of(2) {
            return Err(Error::InvalidParameter("Laurent matrices have even size".into()));
        }
        for (idx, v) in entries.iter().enumerate() {
            check_finite(|| format!("matrix entry {}", idx), ZERO, *v)?;
        }
        Ok(Self {
            basis,
            foci,
            entries,
            grading: None,
        })
    }

    fn with_grading(mut self, rho: f64) -> Self {
        self.grading = Some(rho);
        self
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    /// Foci of the underlying ellipse (standard foci for the Laurent basis).
    pub fn foci(&self) -> Foci {
        self.foci
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn grading(&self) -> Option<f64> {
        self.grading
    }
}

/// Branch images pulled back to standard coordinates and weights at `α_γ(x)`.
fn images_at(system: &MapWeightSystem, x: f64) -> Result<Vec<(Complex64, Complex64)>> {
    let foci = system.foci;
    let p = foci.from_standard(Complex64::new(x, 0.0));
    let domain = system.inner.map(|r| EllipticDomain::new(foci, r)).transpose()?;
    system
        .branches
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let image = check_finite(|| format!("map {i}"), p, (b.map)(p))?;
            let weight = check_finite(|| format!("weight {i}"), p, (b.weight)(p))?;
            if let Some(d) = &domain {
                if !d.contains(image, 0.0) {
                    return Err(Error::OutsideImageEllipse {
                        point: image,
                        radius: elliptic_radius(foci.to_standard(image)),
                        declared: d.rho(),
                    });
                }
            }
            Ok((foci.to_standard(image), weight))
        })
        .collect()
}

/// Collocation matrix of a map-weight system in the Chebyshev basis, as the
/// product `M = A·B` with `A_{km} = ((2 − δ_{0k})/n) T_k(x_m)` and
/// `B_{ml} = (ℒ e_l)(α_γ(x_m))`.
pub fn assemble_cheb(system: &MapWeightSystem, n: usize) -> Result<CollocationMatrix> {
    let grid = cheb_nodes(n)?;
    system.check_image_ellipse(DEFAULT_BOUNDARY_SAMPLES)?;
    let rows: Vec<Vec<Complex64>> = grid
        .nodes()
        .par_iter()
        .map(|&x| {
            let images = images_at(system, x)?;
            let mut row = vec![ZERO; n];
            for (y, w) in images {
                for (slot, t) in row.iter_mut().zip(chebyshev_values(y, n)) {
                    *slot += w * t;
                }
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let b = DMatrix::from_fn(n, n, |m, l| rows[m][l]);
    let a = DMatrix::from_fn(n, n, |k, m| {
        let scale = if k == 0 { 1.0 } else { 2.0 } / n as f64;
        Complex64::new(scale * grid.t_at_node(k, m), 0.0)
    });
    CollocationMatrix::new(Basis::Chebyshev, system.foci, a * b)
}

/// The same matrix as [`assemble_cheb`] by the unfactored triple sum
/// `M_{kl} = ((2 − δ_{0k})/n) Σ_m T_k(x_m) Σ_j W_j T_l(Φ_j)`.
pub fn assemble_cheb_direct(system: &MapWeightSystem, n: usize) -> Result<CollocationMatrix> {
    let grid = cheb_nodes(n)?;
    let per_node: Vec<(Vec<Complex64>, Vec<(Vec<Complex64>, Complex64)>)> = grid
        .nodes()
        .iter()
        .map(|&x| {
            let t_node = chebyshev_values(Complex64::new(x, 0.0), n);
            let images = images_at(system, x)?
                .into_iter()
                .map(|(y, w)| (chebyshev_values(y, n), w))
                .collect();
            Ok((t_node, images))
        })
        .collect::<Result<_>>()?;
    let mut m = DMatrix::from_element(n, n, ZERO);
    for k in 0..n {
        let scale = if k == 0 { 1.0 } else { 2.0 } / n as f64;
        for l in 0..n {
            let mut total = ZERO;
            for (t_node, images) in &per_node {
                let inner: Complex64 = images.iter().map(|(t, w)| w * t[l]).sum();
                total += t_node[k] * inner;
            }
            m[(k, l)] = total * scale;
        }
    }
    CollocationMatrix::new(Basis::Chebyshev, system.foci, m)
}

/// Collocation matrix of a circle operator in the Laurent basis from samples
/// at the `2n` nodes: `M_{lj} = (1/2n) Σ_k (ℒe_j)(z_k) z_k^{−l}`.
pub fn assemble_circle(system: &CircleSystem, n: usize) -> Result<CollocationMatrix> {
    let grid = equi_nodes(n)?;
    let size = 2 * n;
    let samples: Vec<Vec<Complex64>> = grid
        .nodes()
        .par_iter()
        .map(|&z| system.basis_images(z, n))
        .collect::<Result<_>>()?;
    let scale = 1.0 / size as f64;
    let mut m = DMatrix::from_element(size, size, ZERO);
    for j in 0..size {
        let column: Vec<Complex64> = samples.iter().map(|s| s[j]).collect();
        let coeffs = laurent_transform(&grid, &column)?;
        for (l, c) in coeffs.as_slice().iter().enumerate() {
            m[(l, j)] = c * scale;
        }
    }
    CollocationMatrix::new(Basis::Laurent, Foci::standard(), m)
}

/// Number of aliasing images kept on each side in [`assemble_circle_graded`].
const ALIAS_TERMS: usize = 2;

/// The matrix of [`assemble_circle`], computed from Laurent coefficients of
/// `ℒe_j` sampled on `|z| = ρ` (degrees ≥ 0) and `|z| = 1/ρ` (degrees < 0).
///
/// Node interpolation aliases degree `m` onto `m mod 2n` with sign `(−1)^p`
/// for `m = l + 2np`, so `M_{lj} = Σ_p (−1)^p ĉ_{l+2np}(ℒe_j)`. Each `ĉ_m` is
/// then accurate relative to `ρ^{−|m|}`, and the returned matrix is tagged
/// with grading `ρ` for the eigensolver. The inverse branches must be
/// holomorphic on a neighbourhood of the closed annulus `A_ρ`.
pub fn assemble_circle_graded(system: &CircleSystem, n: usize, rho: f64) -> Result<CollocationMatrix> {
    if n == 0 {
        return Err(Error::EmptyBasis);
    }
    if !(rho.is_finite() && rho > 1.0) {
        return Err(Error::InvalidParameter(format!("grading radius must be > 1, got {rho}")));
    }
    let size = 2 * n;
    // degrees up to |l + 2np| < 2n(ALIAS_TERMS + 1) are read off without wrap-around
    let fine = 8 * n * (ALIAS_TERMS + 1);
    let points = |radius: f64| -> Vec<Complex64> {
        (0..fine)
            .map(|q| Complex64::from_polar(radius, 2.0 * PI * q as f64 / fine as f64))
            .collect()
    };
    let evaluate = |pts: Vec<Complex64>| -> Result<Vec<Vec<Complex64>>> {
        pts.par_iter().map(|&z| system.basis_images(z, n)).collect()
    };
    let outer = evaluate(points(rho))?;
    let inner = evaluate(points(rho.recip()))?;

    let fft = FftPlanner::new().plan_fft_forward(fine);
    let spectrum = |samples: &[Vec<Complex64>], j: usize| -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = samples.iter().map(|s| s[j]).collect();
        fft.process(&mut buf);
        buf
    };
    let n_i = n as isize;
    let mut m = DMatrix::from_element(size, size, ZERO);
    for j in 0..size {
        let out_spec = spectrum(&outer, j);
        let in_spec = spectrum(&inner, j);
        let coefficient = |deg: isize| -> Complex64 {
            let bin = deg.rem_euclid(fine as isize) as usize;
            if deg >= 0 {
                out_spec[bin] * rho.powi(-(deg as i32)) / fine as f64
            } else {
                in_spec[bin] * rho.powi(deg as i32) / fine as f64
            }
        };
        for (row, l) in (-n_i..n_i).enumerate() {
            let mut total = ZERO;
            for p in -(ALIAS_TERMS as isize)..=ALIAS_TERMS as isize {
                let c = coefficient(l + 2 * n_i * p);
                total += if p % 2 == 0 { c } else { -c };
            }
            m[(row, j)] = total;
        }
    }
    Ok(CollocationMatrix::new(Basis::Laurent, Foci::standard(), m)?.with_grading(rho))
}

/// Values of `ℒf = Σ Wᵢ·(f∘Φᵢ)` at the given points.
pub fn apply_operator(
    system: &MapWeightSystem,
    f: impl Fn(Complex64) -> Complex64,
    points: &[Complex64],
) -> Result<Vec<Complex64>> {
    points
        .iter()
        .map(|&p| {
            let mut total = ZERO;
            for (i, b) in system.branches.iter().enumerate() {
                let image = check_finite(|| format!("map {i}"), p, (b.map)(p))?;
                let weight = check_finite(|| format!("weight {i}"), p, (b.weight)(p))?;
                total += weight * check_finite(|| "observable".into(), image, f(image))?;
            }
            Ok(total)
        })
        .collect()
}
