//! Compatibility, weak compatibility and reciprocal continuity of map pairs,
//! probed along explicit witness sequences with exact limits.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::domain::Interval;
use crate::error::{CompatError, MapError};
use crate::piecewise::PiecewiseMap;
use crate::roots::{QuadraticRoot, RootSet};
use crate::scalar::{distance, int, serde_scalar, serde_scalar_opt, serde_scalar_vec, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum SequenceKind {
    /// `x_n = (a/n + b) / (c/n + d)`
    #[serde(rename = "mobius_in_inv_n")]
    MobiusInInverseN {
        #[serde(with = "serde_scalar")]
        a: Scalar,
        #[serde(with = "serde_scalar")]
        b: Scalar,
        #[serde(with = "serde_scalar")]
        c: Scalar,
        #[serde(with = "serde_scalar")]
        d: Scalar,
    },
    ExplicitList {
        #[serde(with = "serde_scalar_vec")]
        points: Vec<Scalar>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessSequence {
    #[serde(flatten)]
    pub kind: SequenceKind,
    #[serde(default = "one_index")]
    pub start_index: usize,
}

fn one_index() -> usize {
    1
}

/// Terms checked for domain membership before trusting the eventual piece.
const REALIZED_TERMS: usize = 32;

impl WitnessSequence {
    /// `x_n = t + 1/n` for `n ≥ start`.
    pub fn shifted_harmonic(t: Scalar, start: usize) -> Self {
        WitnessSequence {
            kind: SequenceKind::MobiusInInverseN {
                a: Scalar::one(),
                b: t,
                c: Scalar::zero(),
                d: Scalar::one(),
            },
            start_index: start,
        }
    }

    pub fn constant(z: Scalar) -> Self {
        WitnessSequence {
            kind: SequenceKind::MobiusInInverseN {
                a: Scalar::zero(),
                b: z,
                c: Scalar::zero(),
                d: Scalar::one(),
            },
            start_index: 1,
        }
    }

    pub fn term(&self, n: usize) -> Result<Scalar, CompatError> {
        match &self.kind {
            SequenceKind::MobiusInInverseN { a, b, c, d } => {
                let n = int(n as i64);
                let den = c + d * &n;
                if den.is_zero() {
                    return Err(CompatError::BadSequence(format!("term {n} has a zero denominator")));
                }
                Ok((a + b * &n) / den)
            }
            SequenceKind::ExplicitList { points } => points
                .get(n.wrapping_sub(self.start_index))
                .cloned()
                .ok_or_else(|| CompatError::BadSequence(format!("index {n} outside the list"))),
        }
    }

    fn check_realized(&self, maps: &[&PiecewiseMap]) -> Result<(), CompatError> {
        let count = match &self.kind {
            SequenceKind::MobiusInInverseN { .. } => REALIZED_TERMS,
            SequenceKind::ExplicitList { points } => points.len(),
        };
        for n in self.start_index..self.start_index + count {
            let x = self.term(n)?;
            for m in maps {
                if !m.domain().contains(&x) {
                    return Err(CompatError::BadSequence(format!("x_{n} = {x} is outside the domain")));
                }
            }
        }
        Ok(())
    }
}

/// A limit value with the side from which the sequence eventually
/// approaches it: `-1` from below, `1` from above, `0` eventually equal.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Approach {
    value: Scalar,
    side: i8,
}

fn approach_of(kind: &SequenceKind) -> Result<Approach, CompatError> {
    let SequenceKind::MobiusInInverseN { a, b, c, d } = kind else {
        unreachable!("explicit lists have no symbolic approach")
    };
    if d.is_zero() {
        return Err(CompatError::BadSequence(
            "d = 0: the sequence has no finite limit".into(),
        ));
    }
    // x_n - b/d = (ad - bc) / (d (c + d n)), and c + d n has the sign of d
    let det = a * d - b * c;
    let side = if det.is_zero() {
        0
    } else if det.is_positive() {
        1
    } else {
        -1
    };
    Ok(Approach { value: b / d, side })
}

fn push_through(map: &PiecewiseMap, label: &str, a: &Approach) -> Result<Approach, CompatError> {
    if a.side == 0 {
        return Ok(Approach {
            value: map.evaluate(&a.value)?,
            side: 0,
        });
    }
    let piece = map
        .pieces()
        .iter()
        .find(|p| {
            if a.side > 0 {
                p.guard.contains_right_of(&a.value)
            } else {
                p.guard.contains_left_of(&a.value)
            }
        })
        .ok_or_else(|| CompatError::PieceOscillation {
            map: label.to_string(),
            near: a.value.clone(),
        })?;
    let value = piece
        .form
        .eval(&a.value)
        .ok_or_else(|| CompatError::Map(MapError::OutOfDomain { x: a.value.clone() }))?;
    let side = a.side * piece.form.monotonicity();
    Ok(Approach { value, side })
}

/// Limit of a scalar list by eventual constancy (last three equal) or a
/// geometric tail (constant ratio of the last three differences).
pub fn tail_limit(values: &[Scalar]) -> Option<Scalar> {
    let n = values.len();
    if n < 3 {
        return None;
    }
    let last = &values[n - 1];
    if values[n - 3..].iter().all(|v| v == last) {
        return Some(last.clone());
    }
    if n < 4 {
        return None;
    }
    let d: Vec<Scalar> = values[n - 4..].windows(2).map(|w| &w[1] - &w[0]).collect();
    if d.iter().any(Zero::is_zero) {
        return None;
    }
    let q = &d[1] / &d[0];
    if &d[2] / &d[1] != q || q.abs() >= Scalar::one() {
        return None;
    }
    Some(last + &d[2] * &q / (Scalar::one() - &q))
}

/// `lim T x_n`, `lim f x_n`, `lim T f x_n`, `lim f T x_n`; `None` when an
/// explicit list has no recognisable tail.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SequenceLimits {
    #[serde(with = "serde_scalar_opt")]
    pub lim_t: Option<Scalar>,
    #[serde(with = "serde_scalar_opt")]
    pub lim_f: Option<Scalar>,
    #[serde(with = "serde_scalar_opt")]
    pub lim_tf: Option<Scalar>,
    #[serde(with = "serde_scalar_opt")]
    pub lim_ft: Option<Scalar>,
}

pub fn sequence_limits(t: &PiecewiseMap, f: &PiecewiseMap, w: &WitnessSequence) -> Result<SequenceLimits, CompatError> {
    w.check_realized(&[t, f])?;
    match &w.kind {
        SequenceKind::MobiusInInverseN { .. } => {
            let x = approach_of(&w.kind)?;
            let tx = push_through(t, "T", &x)?;
            let fx = push_through(f, "f", &x)?;
            let tfx = push_through(t, "T", &fx)?;
            let ftx = push_through(f, "f", &tx)?;
            Ok(SequenceLimits {
                lim_t: Some(tx.value),
                lim_f: Some(fx.value),
                lim_tf: Some(tfx.value),
                lim_ft: Some(ftx.value),
            })
        }
        SequenceKind::ExplicitList { points } => {
            let eval = |m: &PiecewiseMap, xs: &[Scalar]| -> Result<Vec<Scalar>, CompatError> {
                xs.iter().map(|x| Ok(m.evaluate(x)?)).collect()
            };
            let tx = eval(t, points)?;
            let fx = eval(f, points)?;
            let tfx = eval(t, &fx)?;
            let ftx = eval(f, &tx)?;
            Ok(SequenceLimits {
                lim_t: tail_limit(&tx),
                lim_f: tail_limit(&fx),
                lim_tf: tail_limit(&tfx),
                lim_ft: tail_limit(&ftx),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Falsified,
    NotFalsified,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub quantity: String,
    #[serde(with = "serde_scalar")]
    pub observed: Scalar,
    #[serde(with = "serde_scalar")]
    pub expected: Scalar,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeVerdict {
    pub outcome: Outcome,
    #[serde(with = "serde_scalar")]
    pub gap: Scalar,
    pub discrepancies: Vec<Discrepancy>,
}

impl ProbeVerdict {
    pub fn is_falsified(&self) -> bool {
        self.outcome == Outcome::Falsified
    }
}

fn determined(v: &Option<Scalar>, what: &str) -> Result<Scalar, CompatError> {
    v.clone()
        .ok_or_else(|| CompatError::BadSequence(format!("limit of {what} is undetermined")))
}

/// Falsified when `lim T f x_n ≠ lim f T x_n` although `T x_n` and `f x_n`
/// share a limit.
pub fn is_compatible_on(t: &PiecewiseMap, f: &PiecewiseMap, w: &WitnessSequence) -> Result<ProbeVerdict, CompatError> {
    let l = sequence_limits(t, f, w)?;
    let lt = determined(&l.lim_t, "T x_n")?;
    let lf = determined(&l.lim_f, "f x_n")?;
    if lt != lf {
        return Err(CompatError::InapplicableProbe { lim_t: lt, lim_f: lf });
    }
    let tf = determined(&l.lim_tf, "T f x_n")?;
    let ft = determined(&l.lim_ft, "f T x_n")?;
    let gap = distance(&tf, &ft);
    Ok(ProbeVerdict {
        outcome: if gap.is_zero() {
            Outcome::NotFalsified
        } else {
            Outcome::Falsified
        },
        discrepancies: if gap.is_zero() {
            Vec::new()
        } else {
            vec![Discrepancy {
                quantity: "lim T f x_n vs lim f T x_n".into(),
                observed: tf,
                expected: ft,
            }]
        },
        gap,
    })
}

/// Falsified when `lim T f x_n ≠ T(t)` or `lim f T x_n ≠ f(t)`.
pub fn is_reciprocal_continuous_on(
    t_map: &PiecewiseMap,
    f: &PiecewiseMap,
    w: &WitnessSequence,
    t: &Scalar,
) -> Result<ProbeVerdict, CompatError> {
    let l = sequence_limits(t_map, f, w)?;
    let lt = determined(&l.lim_t, "T x_n")?;
    let lf = determined(&l.lim_f, "f x_n")?;
    if &lt != t || &lf != t {
        return Err(CompatError::InapplicableProbe { lim_t: lt, lim_f: lf });
    }
    let checks = [
        (
            "lim T f x_n vs T(t)",
            determined(&l.lim_tf, "T f x_n")?,
            t_map.evaluate(t)?,
        ),
        ("lim f T x_n vs f(t)", determined(&l.lim_ft, "f T x_n")?, f.evaluate(t)?),
    ];
    let mut gap = Scalar::zero();
    let mut discrepancies = Vec::new();
    for (q, observed, expected) in checks {
        let d = distance(&observed, &expected);
        if !d.is_zero() {
            gap = gap.max(d);
            discrepancies.push(Discrepancy {
                quantity: q.into(),
                observed,
                expected,
            });
        }
    }
    Ok(ProbeVerdict {
        outcome: if discrepancies.is_empty() {
            Outcome::NotFalsified
        } else {
            Outcome::Falsified
        },
        gap,
        discrepancies,
    })
}

/// Commutator check at one point of a coincidence or fixed set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommuteEvidence {
    /// The point, exact or as an isolating interval for irrational roots.
    pub point: String,
    #[serde(with = "serde_scalar_opt")]
    pub tf: Option<Scalar>,
    #[serde(with = "serde_scalar_opt")]
    pub ft: Option<Scalar>,
    #[serde(with = "serde_scalar_opt")]
    pub gap: Option<Scalar>,
    pub commutes: bool,
    /// Checked on a continuum component at probe points only.
    pub probed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommuteReport {
    pub holds: bool,
    /// Every continuum component sits inside single pieces of `T∘f` and
    /// `f∘T`, so three agreeing probes certify the whole component.
    pub certified: bool,
    pub evidence: Vec<CommuteEvidence>,
}

impl CommuteReport {
    pub fn first_failure(&self) -> Option<&CommuteEvidence> {
        self.evidence.iter().find(|e| !e.commutes)
    }
}

fn point_evidence(t: &PiecewiseMap, f: &PiecewiseMap, x: &Scalar, probed: bool) -> Result<CommuteEvidence, MapError> {
    let tf = t.evaluate(&f.evaluate(x)?)?;
    let ft = f.evaluate(&t.evaluate(x)?)?;
    let gap = distance(&tf, &ft);
    Ok(CommuteEvidence {
        point: x.to_string(),
        commutes: gap.is_zero(),
        tf: Some(tf),
        ft: Some(ft),
        gap: Some(gap),
        probed,
    })
}

fn piece_at_root<'a>(m: &'a PiecewiseMap, r: &QuadraticRoot) -> Option<&'a crate::mobius::Form> {
    m.pieces().iter().find(|p| r.in_interval(&p.guard)).map(|p| &p.form)
}

/// Two forms agree at an irrational quadratic root iff their difference
/// polynomial vanishes or is a multiple of the root's minimal polynomial.
fn root_evidence(tf: &PiecewiseMap, ft: &PiecewiseMap, r: &QuadraticRoot) -> CommuteEvidence {
    let commutes = match (piece_at_root(tf, r), piece_at_root(ft, r)) {
        (Some(a), Some(b)) => {
            let [u2, u1, u0] = a.difference_polynomial(b);
            let (p, q) = r.polynomial();
            (u2.is_zero() && u1.is_zero() && u0.is_zero()) || (!u2.is_zero() && u1 == &u2 * p && u0 == &u2 * q)
        }
        _ => false,
    };
    CommuteEvidence {
        point: r.to_string(),
        tf: None,
        ft: None,
        gap: None,
        commutes,
        probed: false,
    }
}

fn in_single_piece(m: &PiecewiseMap, i: &Interval) -> bool {
    m.pieces().iter().any(|p| {
        let c = i.closure();
        let inner = Interval::new(c.lo().clone(), c.hi().clone(), i.lo_closed(), i.hi_closed()).expect("valid");
        inner.intersect(&p.guard).as_ref() == Some(&inner)
    })
}

/// Checks `T(f(x)) = f(T(x))` on `s`: exactly at isolated points and
/// irrational roots, at probe points on continuum components.
pub fn commutes_on_set(t: &PiecewiseMap, f: &PiecewiseMap, s: &RootSet) -> Result<CommuteReport, CompatError> {
    let exact = s.exact();
    let mut evidence = Vec::new();
    for x in exact.isolated_points() {
        evidence.push(point_evidence(t, f, x, false)?);
    }
    let continuum = !exact.intervals().is_empty() || !exact.sequences().is_empty();
    let mut certified = true;
    let composites = if continuum || !s.inexact().is_empty() {
        Some((PiecewiseMap::compose(t, f)?, PiecewiseMap::compose(f, t)?))
    } else {
        None
    };
    if continuum {
        let (tf, ft) = composites.as_ref().expect("built above");
        for i in exact.intervals() {
            certified &= in_single_piece(tf, i) && in_single_piece(ft, i);
        }
        certified &= exact.sequences().is_empty();
        let component_only = RootSet::from_set(crate::domain::DomainSet::from_components(
            exact
                .components()
                .into_iter()
                .filter(|c| !matches!(c, crate::domain::Component::Points(_)))
                .collect(),
        ));
        for x in component_only.probe_points() {
            evidence.push(point_evidence(t, f, &x, true)?);
        }
    }
    if let Some((tf, ft)) = &composites {
        for r in s.inexact() {
            evidence.push(root_evidence(tf, ft, r));
        }
    }
    Ok(CommuteReport {
        holds: evidence.iter().all(|e| e.commutes),
        certified,
        evidence,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeakCompatReport {
    pub holds: bool,
    pub coincidence_set: String,
    pub report: CommuteReport,
}

/// Whether `T` and `f` commute at every coincidence point.
pub fn is_weakly_compatible(t: &PiecewiseMap, f: &PiecewiseMap) -> Result<WeakCompatReport, CompatError> {
    let c = PiecewiseMap::coincidence_points(t, f);
    let report = commutes_on_set(t, f, &c)?;
    Ok(WeakCompatReport {
        holds: report.holds,
        coincidence_set: c.to_string(),
        report,
    })
}

/// `F(m_1) ∩ ... ∩ F(m_k)`.
pub fn fixed_set_intersection(maps: &[&PiecewiseMap]) -> RootSet {
    let mut it = maps.iter();
    let Some(first) = it.next() else {
        return RootSet::empty();
    };
    it.fold(first.fixed_points(), |acc, m| acc.intersect(&m.fixed_points()))
}

/// Limits along a witness sequence together with every single-sequence
/// verdict for the pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairRegularityReport {
    pub limits: SequenceLimits,
    pub compatible: Option<ProbeVerdict>,
    pub reciprocal_continuous: Option<ProbeVerdict>,
    pub weakly_compatible: WeakCompatReport,
    pub notes: Vec<String>,
}

pub fn pair_regularity(
    t: &PiecewiseMap,
    f: &PiecewiseMap,
    w: &WitnessSequence,
) -> Result<PairRegularityReport, CompatError> {
    let limits = sequence_limits(t, f, w)?;
    let mut notes = Vec::new();
    let compatible = match is_compatible_on(t, f, w) {
        Ok(v) => Some(v),
        Err(e @ (CompatError::InapplicableProbe { .. } | CompatError::BadSequence(_))) => {
            notes.push(format!("compatibility probe: {e}"));
            None
        }
        Err(e) => return Err(e),
    };
    let reciprocal_continuous = match &limits.lim_t {
        Some(lt) => match is_reciprocal_continuous_on(t, f, w, lt) {
            Ok(v) => Some(v),
            Err(e @ (CompatError::InapplicableProbe { .. } | CompatError::BadSequence(_))) => {
                notes.push(format!("reciprocal continuity probe: {e}"));
                None
            }
            Err(e) => return Err(e),
        },
        None => None,
    };
    Ok(PairRegularityReport {
        limits,
        compatible,
        reciprocal_continuous,
        weakly_compatible: is_weakly_compatible(t, f)?,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainSet;
    use crate::mobius::Form;
    use crate::piecewise::MapPiece;
    use crate::scalar::rat;

    fn piece(lo: Scalar, hi: Scalar, lc: bool, hc: bool, form: Form) -> MapPiece {
        MapPiece::new(Interval::new(lo, hi, lc, hc).unwrap(), form)
    }

    fn maps34() -> (PiecewiseMap, PiecewiseMap) {
        let k = DomainSet::interval(Interval::open(rat(1, 3), rat(1, 1)).unwrap());
        let t = PiecewiseMap::new(
            k.clone(),
            vec![
                piece(rat(1, 3), rat(2, 3), false, false, Form::constant(rat(1, 2))),
                piece(rat(2, 3), rat(1, 1), true, false, Form::affine(rat(-1, 2), rat(1, 1))),
            ],
        )
        .unwrap();
        let f = PiecewiseMap::new(
            k,
            vec![
                piece(rat(1, 3), rat(2, 3), false, false, Form::constant(rat(5, 6))),
                piece(rat(2, 3), rat(1, 1), true, false, Form::affine(rat(-1, 1), rat(4, 3))),
            ],
        )
        .unwrap();
        (t, f)
    }

    #[test]
    fn witness_limits() {
        let (t, f) = maps34();
        let w = WitnessSequence::shifted_harmonic(rat(2, 3), 5);
        let l = sequence_limits(&t, &f, &w).unwrap();
        assert_eq!(l.lim_t, Some(rat(2, 3)));
        assert_eq!(l.lim_f, Some(rat(2, 3)));
        assert_eq!(l.lim_tf, Some(rat(1, 2)));
        assert_eq!(l.lim_ft, Some(rat(5, 6)));
        let c = is_compatible_on(&t, &f, &w).unwrap();
        assert!(c.is_falsified());
        assert_eq!(c.gap, rat(1, 3));
        let r = is_reciprocal_continuous_on(&t, &f, &w, &rat(2, 3)).unwrap();
        assert_eq!(r.discrepancies.len(), 2);
        assert_eq!(r.discrepancies[0].observed, rat(1, 2));
        assert_eq!(r.discrepancies[1].observed, rat(5, 6));
    }

    #[test]
    fn explicit_list_matches_symbolic() {
        let (t, f) = maps34();
        let pts: Vec<Scalar> = (0..12).map(|k| rat(2, 3) + rat(1, 1 << (k + 3))).collect();
        let w = WitnessSequence {
            kind: SequenceKind::ExplicitList { points: pts },
            start_index: 1,
        };
        let l = sequence_limits(&t, &f, &w).unwrap();
        assert_eq!(l.lim_t, Some(rat(2, 3)));
        assert_eq!(l.lim_tf, Some(rat(1, 2)));
        assert_eq!(l.lim_ft, Some(rat(5, 6)));
    }

    #[test]
    fn harmonic_list_is_undetermined() {
        let (t, f) = maps34();
        let pts: Vec<Scalar> = (5..20).map(|n| rat(2, 3) + rat(1, n)).collect();
        let w = WitnessSequence {
            kind: SequenceKind::ExplicitList { points: pts },
            start_index: 5,
        };
        let l = sequence_limits(&t, &f, &w).unwrap();
        assert_eq!(l.lim_t, None);
        assert_eq!(l.lim_tf, Some(rat(1, 2)));
    }

    #[test]
    fn constant_sequence_equals_pointwise() {
        let (t, f) = maps34();
        for z in [rat(2, 3), rat(1, 2), rat(3, 4)] {
            let l = sequence_limits(&t, &f, &WitnessSequence::constant(z.clone())).unwrap();
            assert_eq!(l.lim_t, Some(t.evaluate(&z).unwrap()));
            assert_eq!(l.lim_ft, Some(f.evaluate(&t.evaluate(&z).unwrap()).unwrap()));
        }
    }

    #[test]
    fn inapplicable_probe() {
        let (t, f) = maps34();
        let w = WitnessSequence::shifted_harmonic(rat(1, 2), 10);
        assert!(matches!(
            is_compatible_on(&t, &f, &w),
            Err(CompatError::InapplicableProbe { .. })
        ));
    }

    #[test]
    fn sequence_leaving_domain_is_rejected() {
        let (t, f) = maps34();
        let w = WitnessSequence::shifted_harmonic(rat(2, 3), 1);
        assert!(matches!(sequence_limits(&t, &f, &w), Err(CompatError::BadSequence(_))));
    }

    #[test]
    fn weak_compatibility_at_two_thirds() {
        let (t, f) = maps34();
        let r = is_weakly_compatible(&t, &f).unwrap();
        assert!(r.holds);
        assert_eq!(r.report.evidence.len(), 1);
        assert_eq!(r.report.evidence[0].point, "2/3");
    }

    #[test]
    fn weak_compatibility_mutant() {
        // T and f agree at 0 with value 1, but T(1) = 0 while f(1) = 1/2
        let k = DomainSet::points([rat(0, 1), rat(1, 2), rat(1, 1)]);
        let t = PiecewiseMap::new(
            k.clone(),
            vec![
                piece(rat(0, 1), rat(0, 1), true, true, Form::constant(rat(1, 1))),
                piece(rat(1, 2), rat(1, 1), true, true, Form::constant(rat(0, 1))),
            ],
        )
        .unwrap();
        let f = PiecewiseMap::new(
            k,
            vec![
                piece(rat(0, 1), rat(0, 1), true, true, Form::constant(rat(1, 1))),
                piece(rat(1, 2), rat(1, 1), true, true, Form::constant(rat(1, 2))),
            ],
        )
        .unwrap();
        let r = is_weakly_compatible(&t, &f).unwrap();
        assert!(!r.holds);
        let bad = r.report.first_failure().unwrap();
        assert_eq!(bad.gap, Some(rat(1, 2)));
        let c = is_compatible_on(&t, &f, &WitnessSequence::constant(rat(0, 1))).unwrap();
        assert!(c.is_falsified());
    }

    #[test]
    fn identity_pair() {
        let k = DomainSet::interval(Interval::closed(rat(0, 1), rat(1, 1)).unwrap());
        let id = PiecewiseMap::identity(k).unwrap();
        let w = WitnessSequence::shifted_harmonic(rat(1, 2), 3);
        assert_eq!(is_compatible_on(&id, &id, &w).unwrap().outcome, Outcome::NotFalsified);
        assert_eq!(
            is_reciprocal_continuous_on(&id, &id, &w, &rat(1, 2)).unwrap().outcome,
            Outcome::NotFalsified
        );
        let wc = is_weakly_compatible(&id, &id).unwrap();
        assert!(wc.holds && wc.report.certified);
        assert_eq!(fixed_set_intersection(&[&id]).exact(), id.domain());
    }

    #[test]
    fn tail_limit_cases() {
        assert_eq!(
            tail_limit(&[rat(1, 1), rat(2, 1), rat(2, 1), rat(2, 1)]),
            Some(rat(2, 1))
        );
        let geo: Vec<Scalar> = (0..6).map(|k| rat(1, 1) + rat(1, 1 << k)).collect();
        assert_eq!(tail_limit(&geo), Some(rat(1, 1)));
        assert_eq!(tail_limit(&[rat(1, 1), rat(2, 1)]), None);
    }

    #[test]
    fn commuting_on_empty_set() {
        let (t, f) = maps34();
        let r = commutes_on_set(&t, &f, &RootSet::empty()).unwrap();
        assert!(r.holds && r.evidence.is_empty());
    }

    #[test]
    fn witness_serde() {
        let w: WitnessSequence =
            serde_json::from_str(r#"{"kind":"mobius_in_inv_n","a":"1","b":"2/3","c":"0","d":"1","start_index":5}"#)
                .unwrap();
        assert_eq!(w, WitnessSequence::shifted_harmonic(rat(2, 3), 5));
    }
}
