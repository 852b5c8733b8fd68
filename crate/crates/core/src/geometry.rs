//! Elliptic and annular domains.
//!
//! `E_ρ = σ(A_ρ)` is the standard ellipse with foci `±1` obtained from the
//! annulus `A_ρ = {ρ⁻¹ < |z| < ρ}` by the Joukowski map `σ(z) = (z + 1/z)/2`.
//! A general ellipse `E_{γ,ρ} = α_γ(E_ρ)` is its image under the affine map
//! with `α_γ(1) = γ₊` and `α_γ(-1) = γ₋`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ComplexFn;

/// Boundary samples per curve used when none is given explicitly.
pub const DEFAULT_BOUNDARY_SAMPLES: usize = 1024;

/// Minimum number of boundary samples accepted by [`image_radius`].
pub const MIN_BOUNDARY_SAMPLES: usize = 64;

/// An ordered pair of distinct foci `(γ₊, γ₋)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Foci {
    plus: Complex64,
    minus: Complex64,
}

impl Foci {
    pub fn new(plus: Complex64, minus: Complex64) -> Result<Self> {
        if plus == minus || !(plus.is_finite() && minus.is_finite()) {
            return Err(Error::DegenerateFoci);
        }
        Ok(Self { plus, minus })
    }

    /// Foci `(1, -1)`: the identity focal map.
    pub fn standard() -> Self {
        Self {
            plus: Complex64::new(1.0, 0.0),
            minus: Complex64::new(-1.0, 0.0),
        }
    }

    /// Foci `(0, 1)`, mapping `[-1, 1]` onto `[0, 1]` with orientation reversed.
    pub fn unit_interval() -> Self {
        Self {
            plus: Complex64::new(0.0, 0.0),
            minus: Complex64::new(1.0, 0.0),
        }
    }

    pub fn plus(&self) -> Complex64 {
        self.plus
    }

    pub fn minus(&self) -> Complex64 {
        self.minus
    }

    fn half_difference(&self) -> Complex64 {
        (self.plus - self.minus) * 0.5
    }

    fn midpoint(&self) -> Complex64 {
        (self.plus + self.minus) * 0.5
    }

    /// `α_γ(z) = ((γ₊ − γ₋)/2) z + (γ₊ + γ₋)/2`.
    #[inline]
    pub fn from_standard(&self, z: Complex64) -> Complex64 {
        self.half_difference() * z + self.midpoint()
    }

    /// `α_γ⁻¹(w)`.
    #[inline]
    pub fn to_standard(&self, w: Complex64) -> Complex64 {
        (w - self.midpoint()) / self.half_difference()
    }

    /// `(α_γ⁻¹)′`, the constant derivative of the pull-back to standard coordinates.
    pub fn to_standard_scale(&self) -> Complex64 {
        self.half_difference().inv()
    }
}

/// `α_γ(z)`; see [`Foci::from_standard`].
pub fn focal_affine(foci: &Foci, z: Complex64) -> Complex64 {
    foci.from_standard(z)
}

/// `α_γ⁻¹(w)`; see [`Foci::to_standard`].
pub fn focal_affine_inv(foci: &Foci, w: Complex64) -> Complex64 {
    foci.to_standard(w)
}

/// `E_{γ,ρ}`: the open domain bounded by the confocal ellipse with parameter `ρ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticDomain {
    foci: Foci,
    rho: f64,
}

impl EllipticDomain {
    pub fn new(foci: Foci, rho: f64) -> Result<Self> {
        if !(rho.is_finite() && rho > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "ellipse parameter must be finite and > 1, got {rho}"
            )));
        }
        Ok(Self { foci, rho })
    }

    pub fn foci(&self) -> Foci {
        self.foci
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Semi-axes `(cosh log ρ, sinh log ρ)` of the standard-coordinates ellipse.
    pub fn semi_axes(&self) -> (f64, f64) {
        let t = self.rho.ln();
        (t.cosh(), t.sinh())
    }

    /// `α_γ(σ(ρ e^{2πij/samples}))` for `j = 0..samples`.
    pub fn boundary_points(&self, samples: usize) -> Vec<Complex64> {
        (0..samples)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / samples as f64;
                let z = Complex64::from_polar(self.rho, t);
                self.foci.from_standard((z + z.inv()) * 0.5)
            })
            .collect()
    }

    pub fn contains(&self, point: Complex64, margin: f64) -> bool {
        contains(self, point, margin)
    }
}

/// `A_ρ = {ρ⁻¹ < |z| < ρ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnularDomain {
    rho: f64,
}

impl AnnularDomain {
    pub fn new(rho: f64) -> Result<Self> {
        if !(rho.is_finite() && rho > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "annulus radius must be finite and > 1, got {rho}"
            )));
        }
        Ok(Self { rho })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let m = z.norm();
        m > self.rho.recip() && m < self.rho
    }

    /// Samples on `|z| = ρ` followed by samples on `|z| = 1/ρ`.
    pub fn boundary_points(&self, samples: usize) -> Vec<Complex64> {
        let circle = |radius: f64| {
            (0..samples).map(move |j| Complex64::from_polar(radius, 2.0 * PI * j as f64 / samples as f64))
        };
        circle(self.rho).chain(circle(self.rho.recip())).collect()
    }
}

/// Outcome of [`contraction_search`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractionReport {
    /// Outer parameter `R` with the best ratio.
    pub outer: f64,
    /// Sampled image parameter `r` at that `R`.
    pub inner: f64,
    /// `r / R`.
    pub ratio: f64,
    pub samples_per_boundary: usize,
}

/// The Joukowski map `σ(z) = (z + 1/z)/2`.
pub fn joukowski(z: Complex64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroArgument("Joukowski map"));
    }
    Ok((z + z.inv()) * 0.5)
}

/// Smallest `ρ ≥ 1` with `w` in the closure of the standard ellipse `E_ρ`.
///
/// The two roots `w ± √(w²−1)` of `σ(z) = w` have reciprocal moduli, so the
/// larger one is the radius regardless of the square-root branch.
pub fn elliptic_radius(w: Complex64) -> f64 {
    if w.im == 0.0 && w.re.abs() <= 1.0 {
        return 1.0;
    }
    let s = (w * w - 1.0).sqrt();
    (w + s).norm().max((w - s).norm()).max(1.0)
}

pub fn contains(domain: &EllipticDomain, point: Complex64, margin: f64) -> bool {
    elliptic_radius(domain.foci.to_standard(point)) <= domain.rho - margin
}

/// Largest elliptic radius (in the domain's focal coordinates) of the images
/// of sampled boundary points of `domain` under every map.
pub fn image_radius(maps: &[ComplexFn], domain: &EllipticDomain, samples: usize) -> Result<f64> {
    if samples < MIN_BOUNDARY_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "at least {MIN_BOUNDARY_SAMPLES} boundary samples required, got {samples}"
        )));
    }
    let foci = domain.foci;
    let mut radius: f64 = 1.0;
    for b in domain.boundary_points(samples) {
        for (i, map) in maps.iter().enumerate() {
            let v = map(b);
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    what: format!("map {i}"),
                    at: b,
                });
            }
            radius = radius.max(elliptic_radius(foci.to_standard(v)));
        }
    }
    Ok(radius)
}

/// Grid search over confocal ellipses for the best contraction ratio `r/R`.
///
/// Grid points are evaluated in parallel; the minimum is taken in grid order,
/// so ties resolve to the first occurrence.
pub fn contraction_search(
    maps: &[ComplexFn],
    foci: Foci,
    radii: &[f64],
    samples: usize,
) -> Result<ContractionReport> {
    if radii.is_empty() {
        return Err(Error::InvalidParameter("empty radius grid".into()));
    }
    let evaluated: Vec<Result<(f64, f64)>> = radii
        .par_iter()
        .map(|&big_r| {
            let domain = EllipticDomain::new(foci, big_r)?;
            Ok((big_r, image_radius(maps, &domain, samples)?))
        })
        .collect();

    let mut best: Option<ContractionReport> = None;
    for item in evaluated {
        let (outer, inner) = item?;
        if inner >= outer {
            continue;
        }
        let ratio = inner / outer;
        if best.is_none_or(|b| ratio < b.ratio) {
            best = Some(ContractionReport {
                outer,
                inner,
                ratio,
                samples_per_boundary: samples,
            });
        }
    }
    best.ok_or(Error::NoContraction)
}

/// `count` equally spaced points from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (end - start) / (count - 1) as f64;
            (0..count).map(|i| start + step * i as f64).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{c64, cfn};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn joukowski_examples() {
        assert_eq!(joukowski(c64(1.0, 0.0)).unwrap(), c64(1.0, 0.0));
        assert!(joukowski(c64(0.0, 1.0)).unwrap().norm() < 1e-16);
        assert!((joukowski(c64(2.0, 0.0)).unwrap() - 1.25).norm() < 1e-16);
        assert!(joukowski(c64(0.0, 0.0)).is_err());
    }

    #[test]
    fn focal_affine_examples() {
        let std = Foci::standard();
        assert_eq!(std.from_standard(c64(0.3, 0.0)), c64(0.3, 0.0));
        let unit = Foci::new(c64(0.0, 0.0), c64(1.0, 0.0)).unwrap();
        assert!((unit.from_standard(c64(-1.0, 0.0)) - 1.0).norm() < 1e-16);
        assert!(unit.from_standard(c64(1.0, 0.0)).norm() < 1e-16);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let z = c64(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
            assert!((unit.to_standard(unit.from_standard(z)) - z).norm() < 1e-14);
        }
        assert_eq!(Foci::new(c64(1.0, 1.0), c64(1.0, 1.0)), Err(Error::DegenerateFoci));
    }

    #[test]
    fn elliptic_radius_examples() {
        assert_eq!(elliptic_radius(c64(1.0, 0.0)), 1.0);
        assert_eq!(elliptic_radius(c64(0.0, 0.0)), 1.0);
        assert!((elliptic_radius(c64(1.25, 0.0)) - 2.0).abs() < 1e-15);
        for x in [-1.0, -0.5, 0.0, 0.3, 1.0] {
            assert_eq!(elliptic_radius(c64(x, 0.0)), 1.0);
        }
    }

    #[test]
    fn elliptic_radius_inverts_joukowski() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            let rho = rng.random_range(1.0..30.0);
            let theta = rng.random_range(0.0..2.0 * PI);
            let w = joukowski(Complex64::from_polar(rho, theta)).unwrap();
            assert!((elliptic_radius(w) - rho).abs() < 1e-10 * rho.max(1.0), "rho={rho}");
        }
    }

    #[test]
    fn elliptic_radius_symmetries() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let w = c64(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
            let r = elliptic_radius(w);
            assert!((elliptic_radius(-w) - r).abs() < 1e-12 * r);
            assert!((elliptic_radius(w.conj()) - r).abs() < 1e-12 * r);
        }
    }

    #[test]
    fn contains_examples() {
        let e = EllipticDomain::new(Foci::standard(), 2.0).unwrap();
        assert!(contains(&e, c64(0.0, 0.0), 0.0));
        assert!(contains(&e, c64(1.25, 0.0), 0.0));
        assert!(!contains(&e, c64(1.25, 0.0), 1e-3));
        let u = EllipticDomain::new(Foci::unit_interval(), 2.0).unwrap();
        assert!(elliptic_radius(u.foci().to_standard(c64(10.0, 0.0))) > 2.0);
        assert!(!contains(&u, c64(10.0, 0.0), 0.0));
        assert!(EllipticDomain::new(Foci::standard(), 1.0).is_err());
    }

    fn inside_polygon(vertices: &[Complex64], p: Complex64) -> bool {
        let mut inside = false;
        let m = vertices.len();
        for i in 0..m {
            let (a, b) = (vertices[i], vertices[(i + 1) % m]);
            if (a.im > p.im) != (b.im > p.im) {
                let x = a.re + (p.im - a.im) * (b.re - a.re) / (b.im - a.im);
                if p.re < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    #[test]
    fn contains_agrees_with_polygon_test() {
        let foci = Foci::new(c64(0.2, -0.3), c64(1.5, 0.7)).unwrap();
        let e = EllipticDomain::new(foci, 1.8).unwrap();
        let polygon = e.boundary_points(1000);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let p = c64(rng.random_range(-1.5..3.0), rng.random_range(-1.5..2.0));
            assert_eq!(contains(&e, p, 0.0), inside_polygon(&polygon, p), "p={p}");
        }
    }

    #[test]
    fn image_radius_examples() {
        let e = EllipticDomain::new(Foci::standard(), 2.0).unwrap();
        let half = [cfn(|z| z * 0.5)];
        let coarse = image_radius(&half, &e, 256).unwrap();
        let fine = image_radius(&half, &e, 10_000).unwrap();
        assert!((coarse - fine).abs() < 1e-3);
        assert!(coarse < 2.0);

        let constant = [cfn(|_| c64(0.2, 0.0))];
        assert_eq!(image_radius(&constant, &e, 128).unwrap(), 1.0);

        assert!(image_radius(&half, &e, 10).is_err());
        let blowup = [cfn(|z| z.inv() * 0.0 + (z - 1.25).inv())];
        assert!(matches!(image_radius(&blowup, &e, 64), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn image_radius_is_monotone_in_outer_radius() {
        let maps = [cfn(|z| z / (z + 11.0)), cfn(|z| (z + 3.0) / 12.0)];
        let mut last = 0.0;
        for big_r in linspace(1.05, 15.0, 40) {
            let e = EllipticDomain::new(Foci::unit_interval(), big_r).unwrap();
            let r = image_radius(&maps, &e, 512).unwrap();
            assert!(r >= last - 1e-12, "R={big_r}");
            last = r;
        }
    }

    #[test]
    fn contraction_search_requires_a_contraction() {
        let id = [cfn(|z| z)];
        assert_eq!(
            contraction_search(&id, Foci::standard(), &[1.5, 2.0], 64),
            Err(Error::NoContraction)
        );
        assert!(contraction_search(&id, Foci::standard(), &[], 64).is_err());
    }

    #[test]
    fn contraction_search_affine_halving() {
        // z ↦ z/2 on standard foci: image of E_R has radius at most ... strictly less than R
        let half = [cfn(|z| z * 0.5)];
        let grid = linspace(1.1, 6.0, 50);
        let rep = contraction_search(&half, Foci::standard(), &grid, 256).unwrap();
        assert!(rep.ratio < 1.0 && rep.inner < rep.outer);
        assert!((rep.ratio - rep.inner / rep.outer).abs() < 1e-15);
    }

    #[test]
    fn annulus_basics() {
        let a = AnnularDomain::new(2.0).unwrap();
        assert!(a.contains(c64(1.0, 0.0)));
        assert!(!a.contains(c64(0.4, 0.0)));
        assert!(!a.contains(c64(0.0, 2.5)));
        assert_eq!(a.boundary_points(8).len(), 16);
        assert!(AnnularDomain::new(0.5).is_err());
    }

    #[test]
    fn semi_axes_match_joukowski_image() {
        let e = EllipticDomain::new(Foci::standard(), 3.0).unwrap();
        let (a, b) = e.semi_axes();
        assert!((a - joukowski(c64(3.0, 0.0)).unwrap().re).abs() < 1e-14);
        assert!((b - joukowski(c64(0.0, 3.0)).unwrap().im).abs() < 1e-14);
    }
}
