//! Turnkey drivers: correlation decay of an expanding interval map, the
//! Blaschke-product benchmark, Lyapunov exponents of random products of
//! positive 2×2 matrices, and integrals against stationary measures of
//! iterated function systems.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{check_finite, Error, Result};
use crate::geometry::{
    contraction_search, linspace, ContractionReport, EllipticDomain, Foci, DEFAULT_BOUNDARY_SAMPLES,
};
use crate::polybasis::cheb_nodes;
use crate::spectral::{eigendecompose, eigenfunctional, SpectralData};
use crate::transferop::{
    assemble_cheb, assemble_circle_graded, Branch, CircleSystem, CircleWeight, InverseBranch, MapWeightSystem,
    Orientation,
};
use crate::{cfn, ComplexFn};

/// Grid searched for a working ellipse when none is pinned.
pub const DEFAULT_SEARCH_RANGE: (f64, f64) = (1.05, 40.0);
pub const DEFAULT_SEARCH_POINTS: usize = 500;

/// Grading radius used by [`blaschke_benchmark`].
pub const BLASCHKE_GRADING: f64 = 1.5;

/// Tolerance on the leading eigenvalue of an annealed (stochastic) operator.
const UNIT_EIGENVALUE_TOLERANCE: f64 = 1e-10;

/// The interval map with branches `Φ₀(x) = x/(11+x)` and `Φᵢ(x) = (x+i)/12`,
/// `i = 1..11`, weighted by `Wᵢ = Φᵢ′` (its Perron–Frobenius operator), on
/// foci `γ = (0, 1)` with the working ellipse `R = 16.99`, `r = 3.83`.
pub fn twelve_branch_system() -> Result<MapWeightSystem> {
    let mut branches = vec![Branch::new(
        cfn(|x| x / (x + 11.0)),
        cfn(|x| {
            let q = x + 11.0;
            Complex64::new(11.0, 0.0) / (q * q)
        }),
    )];
    for i in 1..12 {
        let shift = i as f64;
        branches.push(Branch::new(
            cfn(move |x| (x + shift) / 12.0),
            cfn(|_| Complex64::new(1.0 / 12.0, 0.0)),
        ));
    }
    MapWeightSystem::new(branches, Foci::unit_interval(), 16.99, Some(3.83))
}

/// Subleading eigenvalue `λ₂,ₙ` of the Chebyshev collocation matrix: the
/// exponential rate of correlation decay.
pub fn correlation_decay(system: &MapWeightSystem, n: usize) -> Result<Complex64> {
    eigendecompose(&assemble_cheb(system, n)?)?.eigenvalue(1)
}

/// `√z` with the argument taken in `[0, 2π)`.
fn half_angle_root(z: Complex64) -> Complex64 {
    Complex64::from_polar(z.norm().sqrt(), z.arg().rem_euclid(2.0 * PI) / 2.0)
}

/// Inverse branches `φ±(z) = (±√z + μ)/(1 + μ̄(±√z))` of the degree-two
/// Blaschke product `τ(z) = ((z − μ)/(1 − μ̄z))²`.
pub fn blaschke_branches(mu: Complex64) -> Result<Vec<InverseBranch>> {
    if !(mu.norm() < 1.0 / 3.0) {
        return Err(Error::InvalidParameter(format!("Blaschke parameter needs |μ| < 1/3, got |μ| = {}", mu.norm())));
    }
    Ok([1.0, -1.0]
        .into_iter()
        .map(|sign| {
            InverseBranch::new(
                cfn(move |z| {
                    let u = half_angle_root(z) * sign;
                    (u + mu) / (mu.conj() * u + 1.0)
                }),
                cfn(move |z| {
                    let root = half_angle_root(z);
                    let q = mu.conj() * root * sign + 1.0;
                    (1.0 - mu.norm_sqr()) / (q * q) * sign / (root * 2.0)
                }),
            )
        })
        .collect())
}

/// The Blaschke transfer operator with unit branch factors, `ℒf = f∘φ₊ + f∘φ₋`.
pub fn blaschke_system(mu: Complex64) -> Result<CircleSystem> {
    CircleSystem::new(
        blaschke_branches(mu)?,
        CircleWeight::Constant(Complex64::new(1.0, 0.0)),
        Orientation::Preserving,
    )
}

/// Spectral data of the `2n × 2n` Laurent collocation matrix of the Blaschke system.
pub fn blaschke_benchmark(mu: Complex64, n: usize) -> Result<SpectralData> {
    let system = blaschke_system(mu)?;
    eigendecompose(&assemble_circle_graded(&system, n, BLASCHKE_GRADING)?)
}

/// A real 2×2 matrix `[[a, b], [c, d]]`.
pub type Matrix2 = [[f64; 2]; 2];

/// `w_A(z) = (a + c − b − d) z + b + d`.
fn mobius_denominator(m: &Matrix2) -> impl Fn(Complex64) -> Complex64 + Send + Sync + 'static {
    let [[a, b], [c, d]] = *m;
    move |z| z * (a + c - b - d) + (b + d)
}

/// `φ_A(z) = ((a − b) z + b) / w_A(z)`, the projective action of `Aᵀ` in the
/// coordinate `z ↦ (z, 1 − z)`.
pub fn mobius_from_matrix(m: &Matrix2) -> ComplexFn {
    let [[a, b], _] = *m;
    let w = mobius_denominator(m);
    cfn(move |z| (z * (a - b) + b) / w(z))
}

fn check_probabilities(probs: &[f64], count: usize) -> Result<()> {
    if probs.len() != count {
        return Err(Error::LengthMismatch {
            expected: count,
            got: probs.len(),
        });
    }
    if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::InvalidParameter("probabilities must be nonnegative".into()));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("probabilities sum to {total}, not 1")));
    }
    Ok(())
}

/// Random products of positive invertible 2×2 matrices chosen i.i.d. with
/// probabilities `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomMatrixProblem {
    matrices: Vec<Matrix2>,
    probs: Vec<f64>,
    foci: Foci,
    outer: f64,
    contraction: Option<ContractionReport>,
}

impl RandomMatrixProblem {
    /// Validate the data. Without a pinned `R` the working ellipse is the best
    /// contraction over [`DEFAULT_SEARCH_RANGE`] among those `R` where every
    /// `Re(w_A) > 0` on the sampled boundary.
    pub fn new(matrices: Vec<Matrix2>, probs: Vec<f64>, foci: Foci, outer: Option<f64>) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::InvalidParameter("at least one matrix is required".into()));
        }
        for m in &matrices {
            if m.iter().flatten().any(|e| !(e.is_finite() && *e > 0.0)) {
                return Err(Error::InvalidParameter(format!("matrix {m:?} must have positive entries")));
            }
            if m[0][0] * m[1][1] - m[0][1] * m[1][0] == 0.0 {
                return Err(Error::InvalidParameter(format!("matrix {m:?} is singular")));
            }
        }
        check_probabilities(&probs, matrices.len())?;
        let mut problem = Self {
            matrices,
            probs,
            foci,
            outer: 2.0,
            contraction: None,
        };
        match outer {
            Some(r) => {
                problem.check_boundary(r)?;
                problem.outer = r;
            }
            None => {
                let (lo, hi) = DEFAULT_SEARCH_RANGE;
                let grid = linspace(lo, hi, DEFAULT_SEARCH_POINTS);
                let report = problem.admissible_contraction_search(&grid, DEFAULT_BOUNDARY_SAMPLES)?;
                problem.outer = report.outer;
                problem.contraction = Some(report);
            }
        }
        Ok(problem)
    }

    pub fn matrices(&self) -> &[Matrix2] {
        &self.matrices
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn foci(&self) -> Foci {
        self.foci
    }

    pub fn outer(&self) -> f64 {
        self.outer
    }

    /// The search that chose `R`, when it was not pinned.
    pub fn contraction(&self) -> Option<ContractionReport> {
        self.contraction
    }

    pub fn maps(&self) -> Vec<ComplexFn> {
        self.matrices.iter().map(mobius_from_matrix).collect()
    }

    /// First point of `∂E_{γ,R}` where some `Re(w_A) ≤ 0`, if any.
    fn boundary_violation(&self, outer: f64) -> Result<Option<(usize, Complex64)>> {
        let domain = EllipticDomain::new(self.foci, outer)?;
        let ws: Vec<_> = self.matrices.iter().map(mobius_denominator).collect();
        for p in domain.boundary_points(DEFAULT_BOUNDARY_SAMPLES) {
            for (i, w) in ws.iter().enumerate() {
                if !(w(p).re > 0.0) {
                    return Ok(Some((i, p)));
                }
            }
        }
        Ok(None)
    }

    fn check_boundary(&self, outer: f64) -> Result<()> {
        match self.boundary_violation(outer)? {
            Some((i, p)) => Err(Error::BranchViolation(format!("Re(w) ≤ 0 for matrix {i} at {p} on the R = {outer} ellipse"))),
            None => Ok(()),
        }
    }

    /// Contraction search restricted to those `R` in `radii` where every
    /// `Re(w_A) > 0` on the sampled boundary of `E_{γ,R}`.
    pub fn admissible_contraction_search(&self, radii: &[f64], samples: usize) -> Result<ContractionReport> {
        let mut grid = Vec::new();
        for &r in radii {
            if self.boundary_violation(r)?.is_none() {
                grid.push(r);
            }
        }
        if grid.is_empty() {
            return Err(Error::NoContraction);
        }
        contraction_search(&self.maps(), self.foci, &grid, samples)
    }

    /// The annealed operator `𝓛₀f = Σ pᵢ f∘φ_{Aᵢ}`.
    pub fn annealed_system(&self) -> Result<MapWeightSystem> {
        let branches = self
            .maps()
            .into_iter()
            .zip(&self.probs)
            .map(|(map, &p)| Branch::new(map, cfn(move |_| Complex64::new(p, 0.0))))
            .collect();
        MapWeightSystem::new(branches, self.foci, self.outer, None)
    }
}

/// `Λₙ` with the imaginary part of the functional value kept as a diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovEstimate {
    pub value: f64,
    pub imaginary: f64,
}

fn stationary_functional(system: &MapWeightSystem, n: usize) -> Result<crate::spectral::EigenFunctional> {
    let data = eigendecompose(&assemble_cheb(system, n)?)?;
    let lead = data.eigenvalue(0)?;
    if (lead - 1.0).norm() > UNIT_EIGENVALUE_TOLERANCE {
        return Err(Error::LeadingEigenvalue { found: lead });
    }
    eigenfunctional(&data, 0)
}

/// Lyapunov exponent `Λₙ = h*ₙ(Σ pᵢ log w_{Aᵢ})`, with `h*ₙ` the normalised
/// eigenvalue-1 functional of the annealed operator.
pub fn lyapunov_matrices(problem: &RandomMatrixProblem, n: usize) -> Result<LyapunovEstimate> {
    let ws: Vec<_> = problem.matrices.iter().map(mobius_denominator).collect();
    for &x in cheb_nodes(n)?.nodes() {
        let p = problem.foci.from_standard(Complex64::new(x, 0.0));
        for (i, w) in ws.iter().enumerate() {
            if !(w(p).re > 0.0) {
                return Err(Error::BranchViolation(format!("Re(w) ≤ 0 for matrix {i} at node {p}")));
            }
        }
    }
    let h = stationary_functional(&problem.annealed_system()?, n)?;
    let probs = problem.probs.clone();
    let value = h.apply(|z| ws.iter().zip(&probs).map(|(w, &p)| w(z).ln() * p).sum())?;
    Ok(LyapunovEstimate {
        value: value.re,
        imaginary: value.im,
    })
}

/// An iterated function system `{Φᵢ}` with probabilities `pᵢ`.
#[derive(Clone)]
pub struct IfsProblem {
    maps: Vec<ComplexFn>,
    derivs: Vec<ComplexFn>,
    probs: Vec<f64>,
    foci: Foci,
    outer: f64,
    contraction: Option<ContractionReport>,
}

impl std::fmt::Debug for IfsProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IfsProblem")
            .field("branches", &self.maps.len())
            .field("probs", &self.probs)
            .field("foci", &self.foci)
            .field("outer", &self.outer)
            .finish()
    }
}

impl IfsProblem {
    /// Without a pinned `R` the working ellipse is the best contraction over
    /// [`DEFAULT_SEARCH_RANGE`].
    pub fn new(
        maps: Vec<ComplexFn>,
        derivs: Vec<ComplexFn>,
        probs: Vec<f64>,
        foci: Foci,
        outer: Option<f64>,
    ) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::InvalidParameter("at least one map is required".into()));
        }
        if derivs.len() != maps.len() {
            return Err(Error::LengthMismatch {
                expected: maps.len(),
                got: derivs.len(),
            });
        }
        check_probabilities(&probs, maps.len())?;
        let (outer, contraction) = match outer {
            Some(r) => {
                EllipticDomain::new(foci, r)?;
                (r, None)
            }
            None => {
                let (lo, hi) = DEFAULT_SEARCH_RANGE;
                let grid = linspace(lo, hi, DEFAULT_SEARCH_POINTS);
                let report = contraction_search(&maps, foci, &grid, DEFAULT_BOUNDARY_SAMPLES)?;
                (report.outer, Some(report))
            }
        };
        Ok(Self {
            maps,
            derivs,
            probs,
            foci,
            outer,
            contraction,
        })
    }

    pub fn maps(&self) -> &[ComplexFn] {
        &self.maps
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn foci(&self) -> Foci {
        self.foci
    }

    pub fn outer(&self) -> f64 {
        self.outer
    }

    /// The search that chose `R`, when it was not pinned.
    pub fn contraction(&self) -> Option<ContractionReport> {
        self.contraction
    }

    /// The annealed operator `𝓛f = Σ pᵢ f∘Φᵢ`.
    pub fn annealed_system(&self) -> Result<MapWeightSystem> {
        let branches = self
            .maps
            .iter()
            .zip(&self.probs)
            .map(|(map, &p)| Branch::new(map.clone(), cfn(move |_| Complex64::new(p, 0.0))))
            .collect();
        MapWeightSystem::new(branches, self.foci, self.outer, None)
    }
}

/// `∫ g dν ≈ h*ₙ(g)` for the stationary measure `ν` of the IFS.
pub fn ifs_integral(problem: &IfsProblem, observable: impl Fn(Complex64) -> Complex64, n: usize) -> Result<Complex64> {
    stationary_functional(&problem.annealed_system()?, n)?.apply(observable)
}

/// `Λ = −∫ Σ pᵢ log|Φᵢ′| dν`, with the logarithm continued holomorphically
/// from the segment (principal branch of `log Φᵢ′`).
pub fn ifs_lyapunov(problem: &IfsProblem, n: usize) -> Result<LyapunovEstimate> {
    for &x in cheb_nodes(n)?.nodes() {
        let p = problem.foci.from_standard(Complex64::new(x, 0.0));
        for (i, d) in problem.derivs.iter().enumerate() {
            let v = check_finite(|| format!("derivative {i}"), p, d(p))?;
            if !(v.re > 0.0) {
                return Err(Error::BranchViolation(format!("derivative of map {i} is {v} at node {p}")));
            }
        }
    }
    let h = stationary_functional(&problem.annealed_system()?, n)?;
    let value = h.apply(|z| {
        problem
            .derivs
            .iter()
            .zip(&problem.probs)
            .map(|(d, &p)| d(z).ln() * p)
            .sum::<Complex64>()
    })?;
    Ok(LyapunovEstimate {
        value: -value.re,
        imaginary: -value.im,
    })
}
