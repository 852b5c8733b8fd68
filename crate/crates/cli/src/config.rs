//! Problem files: a JSON document describing one transfer-operator problem,
//! built from a closed vocabulary of map and weight descriptors.

use std::fmt;

use lagcheb::apps::{blaschke_branches, mobius_from_matrix, IfsProblem, Matrix2, RandomMatrixProblem};
use lagcheb::geometry::Foci;
use lagcheb::transferop::{Branch, CircleSystem, CircleWeight, InverseBranch, MapWeightSystem, Orientation};
use lagcheb::{cfn, ComplexFn};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{config_error, CliError};
use crate::tasks::Task;

/// A complex number written either as a plain number or as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub Complex64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.im == 0.0 {
            self.0.re.serialize(s)
        } else {
            [self.0.re, self.0.im].serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Real(f64),
            Pair([f64; 2]),
        }
        Ok(match Repr::deserialize(d)? {
            Repr::Real(re) => Num(Complex64::new(re, 0.0)),
            Repr::Pair([re, im]) => Num(Complex64::new(re, im)),
        })
    }
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    EllipseSystem,
    CircleSystem,
    RandomMatrices,
    Ifs,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::EllipseSystem => "ellipse_system",
            Kind::CircleSystem => "circle_system",
            Kind::RandomMatrices => "random_matrices",
            Kind::Ifs => "ifs",
        })
    }
}

/// Map descriptors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec {
    /// `a·x + b`
    Affine { a: Num, b: Num },
    /// `(a·x + b)/(c·x + d)`
    Moebius { a: Num, b: Num, c: Num, d: Num },
    /// Projective action of a positive 2×2 matrix on `[0, 1]`.
    MobiusFromMatrix { matrix: Matrix2 },
    /// `a·sin(ω·x) + b`
    SineAffine { a: Num, omega: Num, b: Num },
    /// `x/(a + x)`
    #[serde(rename = "rational_1branch")]
    Rational1Branch { a: Num },
    /// The two inverse branches of `((z − μ)/(1 − μ̄z))²`; circle systems only.
    Blaschke { mu: Num },
}

/// A map with its derivative.
#[derive(Clone)]
pub struct MapPair {
    pub map: ComplexFn,
    pub deriv: ComplexFn,
}

impl MapSpec {
    /// The maps this descriptor stands for (two for `blaschke`, else one).
    pub fn build(&self) -> Result<Vec<MapPair>, CliError> {
        let one = |map: ComplexFn, deriv: ComplexFn| Ok(vec![MapPair { map, deriv }]);
        match *self {
            MapSpec::Affine { a: Num(a), b: Num(b) } => one(cfn(move |x| a * x + b), cfn(move |_| a)),
            MapSpec::Moebius {
                a: Num(a),
                b: Num(b),
                c: Num(c),
                d: Num(d),
            } => {
                let det = a * d - b * c;
                if det == Complex64::new(0.0, 0.0) {
                    return Err(config_error("moebius map has zero determinant"));
                }
                one(
                    cfn(move |x| (a * x + b) / (c * x + d)),
                    cfn(move |x| det / ((c * x + d) * (c * x + d))),
                )
            }
            MapSpec::MobiusFromMatrix { matrix } => {
                let [[a, b], [c, d]] = matrix;
                let det = a * d - b * c;
                let w = move |z: Complex64| z * (a + c - b - d) + (b + d);
                one(mobius_from_matrix(&matrix), cfn(move |z| det / (w(z) * w(z))))
            }
            MapSpec::SineAffine {
                a: Num(a),
                omega: Num(w),
                b: Num(b),
            } => one(cfn(move |x| a * (w * x).sin() + b), cfn(move |x| a * w * (w * x).cos())),
            MapSpec::Rational1Branch { a: Num(a) } => {
                one(cfn(move |x| x / (a + x)), cfn(move |x| a / ((a + x) * (a + x))))
            }
            MapSpec::Blaschke { mu: Num(mu) } => Ok(blaschke_branches(mu)?
                .into_iter()
                .map(|b| MapPair {
                    map: b.map,
                    deriv: b.deriv,
                })
                .collect()),
        }
    }

    fn is_blaschke(&self) -> bool {
        matches!(self, MapSpec::Blaschke { .. })
    }
}

/// Weight descriptors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightSpec {
    /// The derivative of the branch map.
    Deriv,
    /// The squared derivative.
    DerivSquared,
    /// A constant.
    Const(Num),
    /// A probability: a real constant in `[0, 1]`.
    Prob(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchSpec {
    pub map: MapSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<WeightSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrientationSpec {
    Preserving,
    Reversing,
}

/// Grid of outer parameters `R` for the ellipse search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

/// Task parameters; command-line flags take precedence.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<Task>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigen_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    /// `[γ₋, γ₊]`; defaults to `[0, 1]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub foci: Option<[Num; 2]>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub outer: Option<f64>,
    #[serde(rename = "r", default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub branches: Vec<BranchSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub matrices: Vec<Matrix2>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub probs: Vec<f64>,
    /// Branch factor of a circle system (`const(c)`, `deriv`, `deriv_squared`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<WeightSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation: Option<OrientationSpec>,
    /// Grading radius for circle-system assembly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grading: Option<f64>,
    /// Circle systems: count only eigenvalues that reappear at `n + 1`
    /// within this relative tolerance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub persistence: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observable: Option<MapSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run: Option<RunSpec>,
    /// Present in emitted mirrors; ignored on input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub results: Option<serde_json::Value>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: Config = serde_json::from_str(text).map_err(|e| config_error(format!("config: {e}")))?;
        config.check_shape()?;
        Ok(config)
    }

    /// Structural checks that do not need any numerics.
    fn check_shape(&self) -> Result<(), CliError> {
        let need = |ok: bool, msg: &str| if ok { Ok(()) } else { Err(config_error(format!("{}: {msg}", self.kind))) };
        match self.kind {
            Kind::EllipseSystem => {
                need(!self.branches.is_empty(), "`branches` must be nonempty")?;
                need(self.matrices.is_empty(), "`matrices` is not used")?;
                for b in &self.branches {
                    need(!b.map.is_blaschke(), "`blaschke` maps need a circle_system")?;
                    need(b.weight.is_some(), "every branch needs a `weight`")?;
                }
            }
            Kind::CircleSystem => {
                need(!self.branches.is_empty(), "`branches` must be nonempty")?;
                need(self.branches.iter().all(|b| b.weight.is_none()), "set the branch factor with top-level `weight`")?;
                need(!matches!(self.weight, Some(WeightSpec::Prob(_))), "`prob` is not a circle weight")?;
            }
            Kind::RandomMatrices => {
                need(!self.matrices.is_empty(), "`matrices` must be nonempty")?;
                need(self.branches.is_empty(), "`branches` is not used")?;
            }
            Kind::Ifs => {
                need(!self.branches.is_empty(), "`branches` must be nonempty")?;
                for b in &self.branches {
                    need(!b.map.is_blaschke(), "`blaschke` maps need a circle_system")?;
                    need(b.weight.is_none(), "IFS branches are weighted by `probs`")?;
                }
            }
        }
        if matches!(self.observable, Some(MapSpec::Blaschke { .. })) {
            return Err(config_error("`blaschke` cannot be an observable"));
        }
        Ok(())
    }

    pub fn foci(&self) -> Result<Foci, CliError> {
        match self.foci {
            None => Ok(Foci::unit_interval()),
            Some([Num(minus), Num(plus)]) => Ok(Foci::new(plus, minus)?),
        }
    }

    fn require_outer(&self) -> Result<f64, CliError> {
        self.outer
            .ok_or_else(|| config_error(format!("{}: `R` is required for this task", self.kind)))
    }

    /// Branch maps without weights (used by the ellipse search).
    pub fn maps(&self) -> Result<Vec<ComplexFn>, CliError> {
        match self.kind {
            Kind::RandomMatrices => Ok(self.matrices.iter().map(mobius_from_matrix).collect()),
            _ => Ok(self.map_pairs()?.into_iter().map(|p| p.map).collect()),
        }
    }

    fn map_pairs(&self) -> Result<Vec<MapPair>, CliError> {
        let mut out = Vec::new();
        for b in &self.branches {
            out.extend(b.map.build()?);
        }
        Ok(out)
    }

    pub fn ellipse_system(&self) -> Result<MapWeightSystem, CliError> {
        let mut branches = Vec::with_capacity(self.branches.len());
        for spec in &self.branches {
            let pair = spec.map.build()?.remove(0);
            let weight = match spec.weight.expect("checked in check_shape") {
                WeightSpec::Deriv => pair.deriv.clone(),
                WeightSpec::DerivSquared => {
                    let d = pair.deriv.clone();
                    cfn(move |x| d(x) * d(x))
                }
                WeightSpec::Const(Num(c)) => cfn(move |_| c),
                WeightSpec::Prob(p) => {
                    if !(0.0..=1.0).contains(&p) {
                        return Err(config_error(format!("prob weight {p} is outside [0, 1]")));
                    }
                    cfn(move |_| Complex64::new(p, 0.0))
                }
            };
            branches.push(Branch::new(pair.map, weight));
        }
        Ok(MapWeightSystem::new(branches, self.foci()?, self.require_outer()?, self.inner)?)
    }

    pub fn circle_system(&self) -> Result<CircleSystem, CliError> {
        let branches = self
            .map_pairs()?
            .into_iter()
            .map(|p| InverseBranch::new(p.map, p.deriv))
            .collect();
        let weight = match self.weight.unwrap_or(WeightSpec::Const(Num(Complex64::new(1.0, 0.0)))) {
            WeightSpec::Const(Num(c)) => CircleWeight::Constant(c),
            WeightSpec::Deriv => CircleWeight::Potential(cfn(|_| Complex64::new(1.0, 0.0))),
            WeightSpec::DerivSquared => CircleWeight::DerivativeSquared,
            WeightSpec::Prob(_) => unreachable!("rejected in check_shape"),
        };
        let orientation = match self.orientation.unwrap_or(OrientationSpec::Preserving) {
            OrientationSpec::Preserving => Orientation::Preserving,
            OrientationSpec::Reversing => Orientation::Reversing,
        };
        Ok(CircleSystem::new(branches, weight, orientation)?)
    }

    pub fn random_matrices(&self) -> Result<RandomMatrixProblem, CliError> {
        Ok(RandomMatrixProblem::new(
            self.matrices.clone(),
            self.probs.clone(),
            self.foci()?,
            self.outer,
        )?)
    }

    pub fn ifs(&self) -> Result<IfsProblem, CliError> {
        let (maps, derivs) = self.map_pairs()?.into_iter().map(|p| (p.map, p.deriv)).unzip();
        Ok(IfsProblem::new(maps, derivs, self.probs.clone(), self.foci()?, self.outer)?)
    }

    pub fn observable(&self) -> Result<ComplexFn, CliError> {
        let spec = self
            .observable
            .as_ref()
            .ok_or_else(|| config_error("this task needs an `observable`"))?;
        Ok(spec.build()?.remove(0).map)
    }
}
