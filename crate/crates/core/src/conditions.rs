//! Contractive inequalities between `d(Tx, Ty)` and a bound built from the
//! maps, checked exactly over sampled pairs.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::control::ControlFunction;
use crate::domain::SampleSet;
use crate::error::ConditionError;
use crate::piecewise::{MapFamily, PiecewiseMap};
use crate::scalar::{distance, half, serde_scalar, serde_scalar_vec, Scalar};

/// One contractive inequality family with its coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum Condition {
    /// `d(Tx,Ty) ≤ r d(fx,fy)`
    Jungck {
        #[serde(with = "serde_scalar")]
        r: Scalar,
    },
    /// `a[d(Tx,fx)+d(Ty,fy)] + b[d(Tx,fy)+d(Ty,fx)] + c d(fx,fy)`
    Singh {
        #[serde(with = "serde_scalar")]
        a: Scalar,
        #[serde(with = "serde_scalar")]
        b: Scalar,
        #[serde(with = "serde_scalar")]
        c: Scalar,
    },
    /// `r max{d(fx,fy), d(Tx,fx), d(Ty,fy), ½[d(Tx,fy)+d(Ty,fx)]}`
    BabuMax {
        #[serde(with = "serde_scalar")]
        r: Scalar,
    },
    /// `d(T_i x, T_j y) ≤ a1 d(T_i x,fx) + a2 d(T_j y,fy) + a3 d(T_i x,fy) + a4 d(T_j y,fx) + a5 d(fx,fy)`
    Som {
        #[serde(with = "serde_scalar_vec")]
        a: Vec<Scalar>,
        #[serde(default = "default_pair")]
        pair_indices: (usize, usize),
    },
    /// `c1 max{d(Tx,fy), d(Ty,fx), d(fx,fy)}`
    BabuTriple {
        #[serde(with = "serde_scalar")]
        c1: Scalar,
    },
    /// `φ(d(fx,gy))`
    BoydWong { phi: ControlFunction },
    /// `r max{d(Tx,fx), d(Ty,gy), ½[d(Tx,gy)+d(Ty,fx)], d(fx,gy)}`
    SongGen {
        #[serde(with = "serde_scalar")]
        r: Scalar,
    },
    /// `φ(min{d(fx,gy), d(fy,gx)})`
    MinBoydWong { phi: ControlFunction },
    /// `r min{A(x,y), B(x,y)}` with the blocks of [`Condition::Main`].
    MinSong {
        #[serde(with = "serde_scalar")]
        r: Scalar,
    },
    /// `ψ(min{A(x,y), B(x,y)})` where
    /// `A = max{d(fx,gy), d(Tx,fx), d(Ty,gy), ½[d(Tx,gy)+d(Ty,fx)]}` and
    /// `B = max{d(fy,gx), d(Tx,gx), d(Ty,fy), ½[d(Tx,fy)+d(Ty,gx)]}`.
    Main { psi: ControlFunction },
    /// `φ(max{d(fx,fy), d(Tx,fx), d(Ty,fy), ½[d(Tx,fy)+d(Ty,fx)]})`
    TwoMapMax { phi: ControlFunction },
    /// [`Condition::TwoMapMax`] with `T^m` in place of `T`.
    IteratedTwoMap { phi: ControlFunction, m: usize },
    /// [`Condition::TwoMapMax`] with `T_1 x` and `T_j y`.
    FamilyTwoMap { phi: ControlFunction, j: usize },
}

fn default_pair() -> (usize, usize) {
    (1, 1)
}

fn unit_interval(name: &str, v: &Scalar) -> Result<(), ConditionError> {
    if v.is_negative() || v >= &Scalar::one() {
        return Err(ConditionError::InvalidCoefficients(format!(
            "{name} = {v} is outside [0, 1)"
        )));
    }
    Ok(())
}

impl Condition {
    pub fn name(&self) -> &'static str {
        match self {
            Condition::Jungck { .. } => "jungck",
            Condition::Singh { .. } => "singh",
            Condition::BabuMax { .. } => "babu_max",
            Condition::Som { .. } => "som",
            Condition::BabuTriple { .. } => "babu_triple",
            Condition::BoydWong { .. } => "boyd_wong",
            Condition::SongGen { .. } => "song_gen",
            Condition::MinBoydWong { .. } => "min_boyd_wong",
            Condition::MinSong { .. } => "min_song",
            Condition::Main { .. } => "main",
            Condition::TwoMapMax { .. } => "two_map_max",
            Condition::IteratedTwoMap { .. } => "iterated_two_map",
            Condition::FamilyTwoMap { .. } => "family_two_map",
        }
    }

    /// The control function of the variants that carry one.
    pub fn control(&self) -> Option<&ControlFunction> {
        match self {
            Condition::Main { psi } => Some(psi),
            Condition::BoydWong { phi }
            | Condition::MinBoydWong { phi }
            | Condition::TwoMapMax { phi }
            | Condition::IteratedTwoMap { phi, .. }
            | Condition::FamilyTwoMap { phi, .. } => Some(phi),
            _ => None,
        }
    }

    /// Enforces the coefficient constraints of each family.
    pub fn validate(&self) -> Result<(), ConditionError> {
        match self {
            Condition::Jungck { r }
            | Condition::BabuMax { r }
            | Condition::SongGen { r }
            | Condition::MinSong { r } => unit_interval("r", r),
            Condition::BabuTriple { c1 } => unit_interval("c1", c1),
            Condition::Singh { a, b, c } => {
                if a.is_negative() || b.is_negative() || c.is_negative() {
                    return Err(ConditionError::InvalidCoefficients(
                        "a, b, c must be nonnegative".into(),
                    ));
                }
                let s = (a + b) * Scalar::from_integer(2.into()) + c;
                if !s.is_positive() || s >= Scalar::one() {
                    return Err(ConditionError::InvalidCoefficients(format!(
                        "2a + 2b + c = {s} is outside (0, 1)"
                    )));
                }
                Ok(())
            }
            Condition::Som { a, pair_indices } => {
                if a.len() != 5 {
                    return Err(ConditionError::InvalidCoefficients(format!(
                        "expected 5 coefficients, got {}",
                        a.len()
                    )));
                }
                if a.iter().any(Signed::is_negative) {
                    return Err(ConditionError::InvalidCoefficients(
                        "coefficients must be nonnegative".into(),
                    ));
                }
                let s: Scalar = a.iter().sum();
                if s >= Scalar::one() {
                    return Err(ConditionError::InvalidCoefficients(format!(
                        "a1 + ... + a5 = {s} is not below 1"
                    )));
                }
                if pair_indices.0 == 0 || pair_indices.1 == 0 {
                    return Err(ConditionError::InvalidCoefficients("family indices start at 1".into()));
                }
                Ok(())
            }
            Condition::IteratedTwoMap { m, .. } if *m == 0 => {
                Err(ConditionError::InvalidCoefficients("m must be positive".into()))
            }
            Condition::FamilyTwoMap { j, .. } if *j == 0 => {
                Err(ConditionError::InvalidCoefficients("j must be positive".into()))
            }
            _ => Ok(()),
        }
    }

    /// Same family with the scalar coefficient replaced by `r`, or `φ`
    /// replaced by `t ↦ r t`.
    pub fn with_coefficient(&self, r: Scalar) -> Result<Condition, ConditionError> {
        let lin = || ControlFunction::linear(r.clone());
        Ok(match self {
            Condition::Jungck { .. } => Condition::Jungck { r },
            Condition::BabuMax { .. } => Condition::BabuMax { r },
            Condition::SongGen { .. } => Condition::SongGen { r },
            Condition::MinSong { .. } => Condition::MinSong { r },
            Condition::BabuTriple { .. } => Condition::BabuTriple { c1: r },
            Condition::BoydWong { .. } => Condition::BoydWong { phi: lin() },
            Condition::MinBoydWong { .. } => Condition::MinBoydWong { phi: lin() },
            Condition::Main { .. } => Condition::Main { psi: lin() },
            Condition::TwoMapMax { .. } => Condition::TwoMapMax { phi: lin() },
            Condition::IteratedTwoMap { m, .. } => Condition::IteratedTwoMap { phi: lin(), m: *m },
            Condition::FamilyTwoMap { j, .. } => Condition::FamilyTwoMap { phi: lin(), j: *j },
            Condition::Som { .. } | Condition::Singh { .. } => {
                return Err(ConditionError::NotCoefficientScaled(self.name()))
            }
        })
    }

    /// Interpretation notes that accompany any report for this variant.
    pub fn notes(&self) -> Vec<String> {
        match self {
            Condition::MinSong { .. } => vec![
                "min_song: the averaged term of the first block is read as ½[d(Tx,gy) + d(Ty,fx)], \
                 and the second block uses d(Ty,fy) so that the bound is symmetric in (x, y)"
                    .into(),
            ],
            _ => Vec::new(),
        }
    }

    /// The bound's coefficient when it has the form `r · kernel`.
    fn scale(&self) -> Option<Scalar> {
        match self {
            Condition::Jungck { r }
            | Condition::BabuMax { r }
            | Condition::SongGen { r }
            | Condition::MinSong { r } => Some(r.clone()),
            Condition::BabuTriple { c1 } => Some(c1.clone()),
            Condition::Som { a, .. } => {
                let s: Scalar = a.iter().sum();
                (!s.is_zero()).then_some(s)
            }
            Condition::Singh { .. } => None,
            Condition::BoydWong { phi }
            | Condition::MinBoydWong { phi }
            | Condition::TwoMapMax { phi }
            | Condition::IteratedTwoMap { phi, .. }
            | Condition::FamilyTwoMap { phi, .. } => phi.as_linear(),
            Condition::Main { psi } => psi.as_linear(),
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Jungck { r }
            | Condition::BabuMax { r }
            | Condition::SongGen { r }
            | Condition::MinSong { r } => {
                write!(f, "{}(r = {r})", self.name())
            }
            Condition::BabuTriple { c1 } => write!(f, "babu_triple(c1 = {c1})"),
            Condition::Singh { a, b, c } => write!(f, "singh(a = {a}, b = {b}, c = {c})"),
            Condition::Som { a, pair_indices } => {
                let parts: Vec<String> = a.iter().map(ToString::to_string).collect();
                write!(
                    f,
                    "som(a = [{}], i = {}, j = {})",
                    parts.join(", "),
                    pair_indices.0,
                    pair_indices.1
                )
            }
            Condition::BoydWong { phi } | Condition::MinBoydWong { phi } | Condition::TwoMapMax { phi } => {
                write!(f, "{}(φ = {phi})", self.name())
            }
            Condition::Main { psi } => write!(f, "main(ψ = {psi})"),
            Condition::IteratedTwoMap { phi, m } => write!(f, "iterated_two_map(φ = {phi}, m = {m})"),
            Condition::FamilyTwoMap { phi, j } => write!(f, "family_two_map(φ = {phi}, j = {j})"),
        }
    }
}

/// The maps a condition is evaluated on. Two-map variants ignore `g`.
#[derive(Debug, Clone, Copy)]
pub struct Maps<'a> {
    pub t: &'a PiecewiseMap,
    pub f: &'a PiecewiseMap,
    pub g: &'a PiecewiseMap,
    pub family: Option<&'a MapFamily>,
}

impl<'a> Maps<'a> {
    pub fn three(t: &'a PiecewiseMap, f: &'a PiecewiseMap, g: &'a PiecewiseMap) -> Self {
        Maps { t, f, g, family: None }
    }

    pub fn two(t: &'a PiecewiseMap, f: &'a PiecewiseMap) -> Self {
        Maps {
            t,
            f,
            g: f,
            family: None,
        }
    }

    pub fn with_family(self, family: &'a MapFamily) -> Self {
        Maps {
            family: Some(family),
            ..self
        }
    }
}

/// Left side, bound kernel (argument of φ, or the quantity multiplied by
/// the coefficient) and right side at one pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairEval {
    pub lhs: Scalar,
    pub kernel: Option<Scalar>,
    pub rhs: Scalar,
}

/// A condition bound to concrete maps, with iterates and family members
/// materialised once.
pub struct Prepared<'a> {
    cond: &'a Condition,
    left: Arc<PiecewiseMap>,
    right: Arc<PiecewiseMap>,
    f: &'a PiecewiseMap,
    g: &'a PiecewiseMap,
}

fn family_member(maps: &Maps<'_>, n: usize, cond: &Condition) -> Result<Arc<PiecewiseMap>, ConditionError> {
    match maps.family {
        Some(fam) => Ok(fam.member(n)?),
        None if n == 1 => Ok(Arc::new(maps.t.clone())),
        None => Err(ConditionError::Inapplicable(format!(
            "{} needs a map family",
            cond.name()
        ))),
    }
}

impl<'a> Prepared<'a> {
    pub fn new(cond: &'a Condition, maps: Maps<'a>) -> Result<Self, ConditionError> {
        cond.validate()?;
        let t = Arc::new(maps.t.clone());
        let (left, right) = match cond {
            Condition::IteratedTwoMap { m, .. } => {
                let tm = Arc::new(maps.t.iterate(*m)?);
                (tm.clone(), tm)
            }
            Condition::FamilyTwoMap { j, .. } => (family_member(&maps, 1, cond)?, family_member(&maps, *j, cond)?),
            Condition::Som {
                pair_indices: (i, j), ..
            } if maps.family.is_some() => (family_member(&maps, *i, cond)?, family_member(&maps, *j, cond)?),
            _ => (t.clone(), t),
        };
        let g = match cond {
            Condition::BoydWong { .. }
            | Condition::SongGen { .. }
            | Condition::MinBoydWong { .. }
            | Condition::MinSong { .. }
            | Condition::Main { .. } => maps.g,
            _ => maps.f,
        };
        Ok(Prepared {
            cond,
            left,
            right,
            f: maps.f,
            g,
        })
    }

    pub fn eval(&self, x: &Scalar, y: &Scalar) -> Result<PairEval, ConditionError> {
        let tx = self.left.evaluate(x)?;
        let ty = self.right.evaluate(y)?;
        let fx = self.f.evaluate(x)?;
        let fy = self.f.evaluate(y)?;
        let gx = self.g.evaluate(x)?;
        let gy = self.g.evaluate(y)?;
        let d = distance;
        let lhs = d(&tx, &ty);
        let avg = |p: Scalar, q: Scalar| (p + q) * half();
        let max = |v: Vec<Scalar>| v.into_iter().max().expect("nonempty");
        let block_a = || {
            max(vec![
                d(&fx, &gy),
                d(&tx, &fx),
                d(&ty, &gy),
                avg(d(&tx, &gy), d(&ty, &fx)),
            ])
        };
        let block_b = || {
            max(vec![
                d(&fy, &gx),
                d(&tx, &gx),
                d(&ty, &fy),
                avg(d(&tx, &fy), d(&ty, &gx)),
            ])
        };
        let two_map = || {
            max(vec![
                d(&fx, &fy),
                d(&tx, &fx),
                d(&ty, &fy),
                avg(d(&tx, &fy), d(&ty, &fx)),
            ])
        };
        let scaled = |r: &Scalar, k: Scalar| PairEval {
            rhs: r * &k,
            kernel: Some(k),
            lhs: lhs.clone(),
        };
        let via = |phi: &ControlFunction, k: Scalar| -> Result<PairEval, ConditionError> {
            Ok(PairEval {
                rhs: phi.evaluate(&k)?,
                kernel: Some(k),
                lhs: lhs.clone(),
            })
        };
        Ok(match self.cond {
            Condition::Jungck { r } => scaled(r, d(&fx, &fy)),
            Condition::Singh { a, b, c } => PairEval {
                rhs: a * (d(&tx, &fx) + d(&ty, &fy)) + b * (d(&tx, &fy) + d(&ty, &fx)) + c * d(&fx, &fy),
                kernel: None,
                lhs,
            },
            Condition::BabuMax { r } => scaled(r, two_map()),
            Condition::Som { a, .. } => {
                let terms = [d(&tx, &fx), d(&ty, &fy), d(&tx, &fy), d(&ty, &fx), d(&fx, &fy)];
                let rhs: Scalar = a.iter().zip(&terms).map(|(ai, ti)| ai * ti).sum();
                let s: Scalar = a.iter().sum();
                PairEval {
                    kernel: (!s.is_zero()).then(|| &rhs / &s),
                    rhs,
                    lhs,
                }
            }
            Condition::BabuTriple { c1 } => scaled(c1, max(vec![d(&tx, &fy), d(&ty, &fx), d(&fx, &fy)])),
            Condition::BoydWong { phi } => via(phi, d(&fx, &gy))?,
            Condition::SongGen { r } => scaled(
                r,
                max(vec![
                    d(&tx, &fx),
                    d(&ty, &gy),
                    avg(d(&tx, &gy), d(&ty, &fx)),
                    d(&fx, &gy),
                ]),
            ),
            Condition::MinBoydWong { phi } => via(phi, d(&fx, &gy).min(d(&fy, &gx)))?,
            Condition::MinSong { r } => scaled(r, block_a().min(block_b())),
            Condition::Main { psi } => via(psi, block_a().min(block_b()))?,
            Condition::TwoMapMax { phi }
            | Condition::IteratedTwoMap { phi, .. }
            | Condition::FamilyTwoMap { phi, .. } => via(phi, two_map())?,
        })
    }
}

/// Exact right-hand side of `cond` at `(x, y)`.
pub fn rhs_bound(cond: &Condition, x: &Scalar, y: &Scalar, maps: Maps<'_>) -> Result<Scalar, ConditionError> {
    Ok(Prepared::new(cond, maps)?.eval(x, y)?.rhs)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    #[serde(with = "serde_scalar")]
    pub x: Scalar,
    #[serde(with = "serde_scalar")]
    pub y: Scalar,
    #[serde(with = "serde_scalar")]
    pub lhs: Scalar,
    #[serde(with = "serde_scalar")]
    pub rhs: Scalar,
    #[serde(with = "crate::scalar::serde_scalar_opt")]
    pub kernel: Option<Scalar>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub condition: String,
    pub holds: bool,
    pub pairs_checked: usize,
    pub violation_witness: Option<Violation>,
    pub violations: Vec<Violation>,
    #[serde(with = "serde_scalar")]
    pub min_margin: Scalar,
    #[serde(with = "serde_scalar_vec")]
    pub distance_set: Vec<Scalar>,
    pub notes: Vec<String>,
}

#[derive(Default)]
struct Partial {
    pairs: usize,
    violations: Vec<Violation>,
    min_margin: Option<Scalar>,
    kernels: Vec<Scalar>,
}

impl Partial {
    fn push(&mut self, x: &Scalar, y: &Scalar, e: PairEval) {
        self.pairs += 1;
        let margin = &e.rhs - &e.lhs;
        if margin.is_negative() {
            self.violations.push(Violation {
                x: x.clone(),
                y: y.clone(),
                lhs: e.lhs,
                rhs: e.rhs,
                kernel: e.kernel.clone(),
            });
        }
        if self.min_margin.as_ref().is_none_or(|m| &margin < m) {
            self.min_margin = Some(margin);
        }
        if let Some(k) = e.kernel {
            self.kernels.push(k);
        }
    }

    fn merge(mut self, other: Partial) -> Partial {
        self.pairs += other.pairs;
        self.violations.extend(other.violations);
        self.min_margin = match (self.min_margin, other.min_margin) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.kernels.extend(other.kernels);
        self
    }
}

/// Checks `lhs ≤ rhs` over every ordered pair of `samples`. `priority`
/// pairs are evaluated first, so a violation among them is reported as the
/// witness.
pub fn check_condition_with_priority(
    cond: &Condition,
    maps: Maps<'_>,
    samples: &SampleSet,
    priority: &[(Scalar, Scalar)],
) -> Result<CheckReport, ConditionError> {
    let prepared = Prepared::new(cond, maps)?;
    let mut head = Partial::default();
    for (x, y) in priority {
        head.push(x, y, prepared.eval(x, y)?);
    }
    let pts = samples.points();
    let rows: Vec<Partial> = pts
        .par_iter()
        .map(|x| {
            let mut row = Partial::default();
            for y in pts {
                row.push(x, y, prepared.eval(x, y)?);
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, ConditionError>>()?;
    let total = rows.into_iter().fold(head, Partial::merge);
    let mut distance_set = total.kernels;
    distance_set.sort();
    distance_set.dedup();
    Ok(CheckReport {
        condition: cond.to_string(),
        holds: total.violations.is_empty(),
        pairs_checked: total.pairs,
        violation_witness: total.violations.first().cloned(),
        violations: total.violations,
        min_margin: total.min_margin.unwrap_or_else(Scalar::zero),
        distance_set,
        notes: cond.notes(),
    })
}

pub fn check_condition(cond: &Condition, maps: Maps<'_>, samples: &SampleSet) -> Result<CheckReport, ConditionError> {
    check_condition_with_priority(cond, maps, samples, &[])
}

/// Checks a family condition for every `j` in `indices` and merges the
/// reports in index order.
pub fn check_condition_over_family(
    cond: &Condition,
    maps: Maps<'_>,
    samples: &SampleSet,
    indices: &[usize],
) -> Result<CheckReport, ConditionError> {
    let Condition::FamilyTwoMap { phi, .. } = cond else {
        return check_condition(cond, maps, samples);
    };
    let mut merged: Option<CheckReport> = None;
    for &j in indices {
        let cj = Condition::FamilyTwoMap { phi: phi.clone(), j };
        let r = check_condition(&cj, maps, samples)?;
        merged = Some(match merged {
            None => r,
            Some(mut acc) => {
                acc.pairs_checked += r.pairs_checked;
                acc.violations.extend(r.violations);
                acc.holds = acc.violations.is_empty();
                acc.violation_witness = acc.violations.first().cloned();
                acc.min_margin = acc.min_margin.min(r.min_margin);
                acc.distance_set.extend(r.distance_set);
                acc.distance_set.sort();
                acc.distance_set.dedup();
                acc
            }
        });
    }
    let mut out = merged.ok_or_else(|| ConditionError::Inapplicable("empty index list".into()))?;
    out.condition = format!("family_two_map(φ = {phi}, j ∈ {indices:?})");
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WorstRatio {
    #[serde(with = "serde_scalar")]
    pub sup_ratio: Scalar,
    #[serde(with = "serde_scalar")]
    pub x: Scalar,
    #[serde(with = "serde_scalar")]
    pub y: Scalar,
    /// Pairs with zero kernel and positive left side.
    pub infinite_ratio: Vec<(String, String)>,
    pub pairs_checked: usize,
}

impl WorstRatio {
    /// No admissible coefficient below 1 exists for the sampled pairs.
    pub fn excludes_all_coefficients(&self) -> bool {
        self.sup_ratio >= Scalar::one() || !self.infinite_ratio.is_empty()
    }
}

/// Largest `lhs / kernel` over sampled pairs with positive kernel. Ties go
/// to the lexicographically greatest pair.
pub fn worst_ratio(cond: &Condition, maps: Maps<'_>, samples: &SampleSet) -> Result<WorstRatio, ConditionError> {
    if cond.scale().is_none() {
        return Err(ConditionError::NotCoefficientScaled(cond.name()));
    }
    // any admissible coefficient gives the same kernel
    let probe = match cond {
        Condition::Som { .. } => cond.clone(),
        _ => cond.with_coefficient(Scalar::zero())?,
    };
    let prepared = Prepared::new(&probe, maps)?;
    let pts = samples.points();
    type Row = (Option<(Scalar, Scalar, Scalar)>, Vec<(Scalar, Scalar)>);
    let rows: Vec<Row> = pts
        .par_iter()
        .map(|x| {
            let mut best: Option<(Scalar, Scalar, Scalar)> = None;
            let mut inf = Vec::new();
            for y in pts {
                let e = prepared.eval(x, y)?;
                let k = e.kernel.expect("coefficient-scaled variants have a kernel");
                if k.is_zero() {
                    if e.lhs.is_positive() {
                        inf.push((x.clone(), y.clone()));
                    }
                    continue;
                }
                let ratio = e.lhs / k;
                if best.as_ref().is_none_or(|(r, _, _)| &ratio >= r) {
                    best = Some((ratio, x.clone(), y.clone()));
                }
            }
            Ok((best, inf))
        })
        .collect::<Result<Vec<_>, ConditionError>>()?;
    let mut best: Option<(Scalar, Scalar, Scalar)> = None;
    let mut infinite = Vec::new();
    for (b, inf) in rows {
        if let Some(b) = b {
            if best.as_ref().is_none_or(|cur| b.0 >= cur.0) {
                best = Some(b);
            }
        }
        infinite.extend(inf);
    }
    match best {
        Some((sup_ratio, x, y)) => Ok(WorstRatio {
            sup_ratio,
            x,
            y,
            infinite_ratio: infinite.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            pairs_checked: pts.len() * pts.len(),
        }),
        None if infinite.is_empty() => Err(ConditionError::AllKernelsZero),
        None => {
            let (x, y) = infinite[0].clone();
            Ok(WorstRatio {
                sup_ratio: Scalar::zero(),
                x,
                y,
                infinite_ratio: infinite.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
                pairs_checked: pts.len() * pts.len(),
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImplicationReport {
    pub holds: bool,
    pub pairs_checked: usize,
    /// Pairs at which the strong condition held.
    pub strong_held: usize,
    pub counterexample: Option<Violation>,
}

/// Checks, pair by pair, that the weak inequality holds wherever the strong
/// one does.
pub fn implication_probe(
    strong: &Condition,
    weak: &Condition,
    maps: Maps<'_>,
    samples: &SampleSet,
) -> Result<ImplicationReport, ConditionError> {
    let s = Prepared::new(strong, maps)?;
    let w = Prepared::new(weak, maps)?;
    let mut report = ImplicationReport {
        holds: true,
        pairs_checked: 0,
        strong_held: 0,
        counterexample: None,
    };
    for x in samples.iter() {
        for y in samples.iter() {
            report.pairs_checked += 1;
            let es = s.eval(x, y)?;
            if es.lhs > es.rhs {
                continue;
            }
            report.strong_held += 1;
            let ew = w.eval(x, y)?;
            if ew.lhs > ew.rhs && report.counterexample.is_none() {
                report.holds = false;
                report.counterexample = Some(Violation {
                    x: x.clone(),
                    y: y.clone(),
                    lhs: ew.lhs,
                    rhs: ew.rhs,
                    kernel: ew.kernel,
                });
            }
        }
    }
    Ok(report)
}
