//! Control functions on the nonnegative ray, regularity certificates and
//! synthesis of a monotone continuous dominating ψ from an upper
//! semicontinuous φ.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::domain::SampleSet;
use crate::error::ControlError;
use crate::mobius::Form;
use crate::scalar::{self, int, rat, serde_scalar, serde_scalar_opt, Scalar};

/// Interval on `[0, ∞)`; `hi = None` means unbounded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RayGuard {
    #[serde(with = "serde_scalar")]
    pub lo: Scalar,
    #[serde(with = "serde_scalar_opt", default)]
    pub hi: Option<Scalar>,
    pub lo_closed: bool,
    #[serde(default)]
    pub hi_closed: bool,
}

impl RayGuard {
    pub fn new(lo: Scalar, hi: Option<Scalar>, lo_closed: bool, hi_closed: bool) -> Self {
        RayGuard {
            lo,
            hi_closed: hi_closed && hi.is_some(),
            hi,
            lo_closed,
        }
    }

    pub fn from(lo: Scalar, lo_closed: bool) -> Self {
        Self::new(lo, None, lo_closed, false)
    }

    pub fn contains(&self, t: &Scalar) -> bool {
        let above = match t.cmp(&self.lo) {
            Ordering::Greater => true,
            Ordering::Equal => self.lo_closed,
            Ordering::Less => false,
        };
        let below = match &self.hi {
            None => true,
            Some(h) => match t.cmp(h) {
                Ordering::Less => true,
                Ordering::Equal => self.hi_closed,
                Ordering::Greater => false,
            },
        };
        above && below
    }

    fn closure_contains(&self, t: &Scalar) -> bool {
        t >= &self.lo && self.hi.as_ref().is_none_or(|h| t <= h)
    }

    fn left_of(&self, b: &Scalar) -> bool {
        &self.lo < b && self.hi.as_ref().is_none_or(|h| b <= h)
    }

    fn right_of(&self, b: &Scalar) -> bool {
        &self.lo <= b && self.hi.as_ref().is_none_or(|h| b < h)
    }

    fn is_degenerate(&self) -> bool {
        self.hi.as_ref() == Some(&self.lo)
    }
}

impl fmt::Display for RayGuard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_closed { '[' } else { '(' };
        match &self.hi {
            Some(h) if h == &self.lo => write!(f, "{{{h}}}"),
            Some(h) => write!(f, "{l}{}, {h}{}", self.lo, if self.hi_closed { ']' } else { ')' }),
            None => write!(f, "{l}{}, inf)", self.lo),
        }
    }
}

/// Piecewise-linear interpolation through strictly increasing knots. Outside
/// the knot range the end values are held constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearTable {
    knots: Vec<(Scalar, Scalar)>,
}

impl LinearTable {
    pub fn new(knots: Vec<(Scalar, Scalar)>) -> Result<Self, ControlError> {
        if knots.is_empty() {
            return Err(ControlError::BadTable("no knots".into()));
        }
        if knots.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(ControlError::BadTable("knot abscissae must increase strictly".into()));
        }
        Ok(LinearTable { knots })
    }

    pub fn knots(&self) -> &[(Scalar, Scalar)] {
        &self.knots
    }

    pub fn first_t(&self) -> &Scalar {
        &self.knots[0].0
    }

    pub fn last_t(&self) -> &Scalar {
        &self.knots[self.knots.len() - 1].0
    }

    pub fn eval(&self, t: &Scalar) -> Scalar {
        let k = &self.knots;
        if t <= &k[0].0 {
            return k[0].1.clone();
        }
        if t >= &k[k.len() - 1].0 {
            return k[k.len() - 1].1.clone();
        }
        let idx = k.partition_point(|(kt, _)| kt <= t);
        let (t0, v0) = &k[idx - 1];
        let (t1, v1) = &k[idx];
        if t == t0 {
            return v0.clone();
        }
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    /// Slope of the last segment, or 0 for a single knot.
    pub fn last_slope(&self) -> Scalar {
        let n = self.knots.len();
        if n < 2 {
            return Scalar::zero();
        }
        let (t0, v0) = &self.knots[n - 2];
        let (t1, v1) = &self.knots[n - 1];
        (v1 - v0) / (t1 - t0)
    }
}

impl Serialize for LinearTable {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[String; 2]> = self.knots.iter().map(|(t, v)| [t.to_string(), v.to_string()]).collect();
        pairs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LinearTable {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let pairs = Vec::<[String; 2]>::deserialize(deserializer)?;
        let knots = pairs
            .iter()
            .map(|[t, v]| {
                Ok((
                    scalar::parse_scalar(t).map_err(D::Error::custom)?,
                    scalar::parse_scalar(v).map_err(D::Error::custom)?,
                ))
            })
            .collect::<Result<Vec<_>, D::Error>>()?;
        LinearTable::new(knots).map_err(D::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CfForm {
    Constant {
        #[serde(with = "serde_scalar")]
        c: Scalar,
    },
    Mobius {
        #[serde(with = "serde_scalar")]
        a: Scalar,
        #[serde(with = "serde_scalar")]
        b: Scalar,
        #[serde(with = "serde_scalar")]
        c: Scalar,
        #[serde(with = "serde_scalar")]
        d: Scalar,
    },
    LinearTable {
        knots: LinearTable,
    },
}

impl CfForm {
    pub fn linear(slope: Scalar) -> CfForm {
        Self::affine(slope, Scalar::zero())
    }

    pub fn affine(slope: Scalar, intercept: Scalar) -> CfForm {
        if slope.is_zero() {
            return CfForm::Constant { c: intercept };
        }
        CfForm::Mobius {
            a: slope,
            b: intercept,
            c: Scalar::zero(),
            d: Scalar::one(),
        }
    }

    fn as_form(&self) -> Option<Form> {
        match self {
            CfForm::Constant { c } => Some(Form::constant(c.clone())),
            CfForm::Mobius { a, b, c, d } => Form::mobius(a.clone(), b.clone(), c.clone(), d.clone()).ok(),
            CfForm::LinearTable { .. } => None,
        }
    }

    /// Value of the form's continuous extension at `t`.
    fn eval(&self, t: &Scalar) -> Scalar {
        match self {
            CfForm::LinearTable { knots } => knots.eval(t),
            other => other
                .as_form()
                .and_then(|f| f.eval(t))
                .expect("poles are excluded from control guards"),
        }
    }
}

impl fmt::Display for CfForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CfForm::LinearTable { knots } => write!(f, "linear table ({} knots)", knots.knots().len()),
            other => match other.as_form() {
                Some(form) => write!(f, "{form}"),
                None => f.write_str("invalid"),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CfPiece {
    pub guard: RayGuard,
    pub form: CfForm,
}

/// Regularity the author of a control function claims for it. The engine
/// never trusts these; [`check_regularity`] verifies them.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeclaredFlags {
    #[serde(default)]
    pub monotone_increasing: bool,
    #[serde(default)]
    pub continuous: bool,
    #[serde(default)]
    pub upper_semicontinuous: bool,
}

/// A function `[0, ∞) -> [0, ∞)` given by guarded pieces, vanishing at 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ControlRepr")]
pub struct ControlFunction {
    pieces: Vec<CfPiece>,
    #[serde(default)]
    flags: DeclaredFlags,
}

#[derive(Deserialize)]
struct ControlRepr {
    pieces: Vec<CfPiece>,
    #[serde(default)]
    flags: DeclaredFlags,
}

impl TryFrom<ControlRepr> for ControlFunction {
    type Error = ControlError;
    fn try_from(r: ControlRepr) -> Result<Self, ControlError> {
        ControlFunction::new(r.pieces, r.flags)
    }
}

impl ControlFunction {
    pub fn new(mut pieces: Vec<CfPiece>, flags: DeclaredFlags) -> Result<Self, ControlError> {
        pieces.sort_by(|a, b| {
            a.guard
                .lo
                .cmp(&b.guard.lo)
                .then(b.guard.lo_closed.cmp(&a.guard.lo_closed))
        });
        let first = pieces.first().ok_or(ControlError::Gap {
            witness: Scalar::zero(),
        })?;
        if !first.guard.contains(&Scalar::zero()) {
            return Err(ControlError::Gap {
                witness: Scalar::zero(),
            });
        }
        for w in pieces.windows(2) {
            let (p, q) = (&w[0].guard, &w[1].guard);
            let Some(h) = &p.hi else {
                return Err(ControlError::Overlap { witness: q.lo.clone() });
            };
            match q.lo.cmp(h) {
                Ordering::Greater => {
                    return Err(ControlError::Gap {
                        witness: scalar::midpoint(h, &q.lo),
                    })
                }
                Ordering::Less => return Err(ControlError::Overlap { witness: q.lo.clone() }),
                Ordering::Equal => match (p.hi_closed, q.lo_closed) {
                    (true, true) => return Err(ControlError::Overlap { witness: h.clone() }),
                    (false, false) => return Err(ControlError::Gap { witness: h.clone() }),
                    _ => {}
                },
            }
        }
        if let Some(h) = &pieces.last().expect("nonempty").guard.hi {
            return Err(ControlError::Gap {
                witness: h + Scalar::one(),
            });
        }
        for p in &pieces {
            match &p.form {
                CfForm::LinearTable { knots } => {
                    let inside =
                        &p.guard.lo >= knots.first_t() && p.guard.hi.as_ref().is_some_and(|h| h <= knots.last_t());
                    if !inside {
                        return Err(ControlError::BadTable(format!("knots do not span guard {}", p.guard)));
                    }
                }
                other => {
                    let form = other
                        .as_form()
                        .ok_or_else(|| ControlError::BadTable("zero denominator".into()))?;
                    if let Some(pole) = form.pole() {
                        if p.guard.closure_contains(&pole) {
                            return Err(ControlError::PoleInGuard { pole });
                        }
                    }
                }
            }
        }
        let cf = ControlFunction { pieces, flags };
        let at_zero = cf.pieces[0].form.eval(&Scalar::zero());
        if !at_zero.is_zero() {
            return Err(ControlError::NonzeroAtOrigin { value: at_zero });
        }
        Ok(cf)
    }

    /// `t ↦ r t`.
    pub fn linear(r: Scalar) -> Self {
        let flags = DeclaredFlags {
            monotone_increasing: !r.is_negative(),
            continuous: true,
            upper_semicontinuous: true,
        };
        ControlFunction::new(
            vec![CfPiece {
                guard: RayGuard::from(Scalar::zero(), true),
                form: CfForm::linear(r),
            }],
            flags,
        )
        .expect("linear control function is valid")
    }

    pub fn pieces(&self) -> &[CfPiece] {
        &self.pieces
    }

    pub fn flags(&self) -> &DeclaredFlags {
        &self.flags
    }

    /// The slope `r` when the function is exactly `t ↦ r t`.
    pub fn as_linear(&self) -> Option<Scalar> {
        if self.pieces.len() != 1 {
            return None;
        }
        match &self.pieces[0].form {
            CfForm::Constant { c } if c.is_zero() => Some(Scalar::zero()),
            CfForm::Mobius { a, b, c, d } if b.is_zero() && c.is_zero() => Some(a / d),
            _ => None,
        }
    }

    pub fn evaluate(&self, t: &Scalar) -> Result<Scalar, ControlError> {
        if t.is_negative() {
            return Err(ControlError::NegativeArgument { t: t.clone() });
        }
        let p = self
            .pieces
            .iter()
            .find(|p| p.guard.contains(t))
            .expect("guards cover the ray");
        Ok(p.form.eval(t))
    }

    pub fn left_limit(&self, b: &Scalar) -> Option<Scalar> {
        if !b.is_positive() {
            return None;
        }
        self.pieces.iter().find(|p| p.guard.left_of(b)).map(|p| p.form.eval(b))
    }

    pub fn right_limit(&self, b: &Scalar) -> Scalar {
        let p = self
            .pieces
            .iter()
            .find(|p| p.guard.right_of(b))
            .expect("guards cover the ray");
        p.form.eval(b)
    }

    /// Finite guard endpoints.
    pub fn breakpoints(&self) -> Vec<Scalar> {
        let mut out: Vec<Scalar> = self
            .pieces
            .iter()
            .flat_map(|p| std::iter::once(p.guard.lo.clone()).chain(p.guard.hi.clone()))
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

impl fmt::Display for ControlFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .pieces
            .iter()
            .map(|p| format!("{} on {}", p.form, p.guard))
            .collect();
        f.write_str(&parts.join("; "))
    }
}

/// Point or ordered pair at which a regularity property fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Point {
        #[serde(with = "serde_scalar")]
        t: Scalar,
    },
    Pair {
        #[serde(with = "serde_scalar")]
        t1: Scalar,
        #[serde(with = "serde_scalar")]
        t2: Scalar,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl Verdict {
    fn pass() -> Self {
        Verdict {
            holds: true,
            witness: None,
        }
    }

    fn fail(w: Witness) -> Self {
        Verdict {
            holds: false,
            witness: Some(w),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegularityReport {
    pub monotone: Verdict,
    pub continuous_at_breakpoints: Verdict,
    pub usc_at_breakpoints: Verdict,
    pub strictly_below_identity: Verdict,
}

impl RegularityReport {
    pub fn all_green(&self) -> bool {
        self.monotone.holds
            && self.continuous_at_breakpoints.holds
            && self.usc_at_breakpoints.holds
            && self.strictly_below_identity.holds
    }
}

/// Checks monotonicity, continuity, upper semicontinuity and `c(t) < t`
/// on `grid` and at every breakpoint, using exact one-sided limits.
pub fn check_regularity(c: &ControlFunction, grid: &SampleSet) -> RegularityReport {
    let positive: Vec<&Scalar> = grid.iter().filter(|t| t.is_positive()).collect();
    let breaks: Vec<Scalar> = c.breakpoints().into_iter().filter(|b| b.is_positive()).collect();
    let value = |t: &Scalar| c.evaluate(t).expect("nonnegative");

    let monotone = monotone_verdict(c, &positive, &breaks);

    let mut continuous = Verdict::pass();
    let mut usc = Verdict::pass();
    for b in &breaks {
        let v = value(b);
        let l = c.left_limit(b).expect("positive breakpoint");
        let r = c.right_limit(b);
        if continuous.holds && (l != v || r != v) {
            continuous = Verdict::fail(Witness::Point { t: b.clone() });
        }
        if usc.holds && (l > v || r > v) {
            usc = Verdict::fail(Witness::Point { t: b.clone() });
        }
    }

    let mut below = Verdict::pass();
    let mut probe: Vec<&Scalar> = positive.clone();
    probe.extend(breaks.iter());
    probe.sort();
    for t in probe {
        if &value(t) >= t {
            below = Verdict::fail(Witness::Point { t: t.clone() });
            break;
        }
    }

    RegularityReport {
        monotone,
        continuous_at_breakpoints: continuous,
        usc_at_breakpoints: usc,
        strictly_below_identity: below,
    }
}

fn monotone_verdict(c: &ControlFunction, grid: &[&Scalar], breaks: &[Scalar]) -> Verdict {
    let value = |t: &Scalar| c.evaluate(t).expect("nonnegative");
    for w in grid.windows(2) {
        if value(w[0]) > value(w[1]) {
            return Verdict::fail(Witness::Pair {
                t1: w[0].clone(),
                t2: w[1].clone(),
            });
        }
    }
    for p in &c.pieces {
        if p.guard.is_degenerate() {
            continue;
        }
        let hi = p.guard.hi.clone().unwrap_or_else(|| &p.guard.lo + int(2));
        let width = &hi - &p.guard.lo;
        match &p.form {
            CfForm::LinearTable { knots } => {
                for w in knots.knots().windows(2) {
                    let a = w[0].0.clone().max(p.guard.lo.clone());
                    let b = w[1].0.clone().min(hi.clone());
                    if a < b && w[1].1 < w[0].1 {
                        let t1 = &a + (&b - &a) / int(3);
                        let t2 = &a + (&b - &a) * rat(2, 3);
                        return Verdict::fail(Witness::Pair { t1, t2 });
                    }
                }
            }
            other => {
                if other.as_form().map(|f| f.monotonicity()) == Some(-1) {
                    let t1 = &p.guard.lo + &width / int(3);
                    let t2 = &p.guard.lo + &width * rat(2, 3);
                    return Verdict::fail(Witness::Pair { t1, t2 });
                }
            }
        }
    }
    for b in breaks {
        let v = value(b);
        let l = c.left_limit(b).expect("positive breakpoint");
        let r = c.right_limit(b);
        if l > v {
            if let Some(t1) = approach(c, b, &v, false) {
                return Verdict::fail(Witness::Pair { t1, t2: b.clone() });
            }
        }
        if v > r {
            if let Some(t2) = approach(c, b, &v, true) {
                return Verdict::fail(Witness::Pair { t1: b.clone(), t2 });
            }
        }
    }
    Verdict::pass()
}

/// A point near `b` on the given side whose value is on the wrong side of `v`.
fn approach(c: &ControlFunction, b: &Scalar, v: &Scalar, right: bool) -> Option<Scalar> {
    let mut delta = if b.is_positive() { b / int(2) } else { Scalar::one() };
    for _ in 0..200 {
        let t = if right { b + &delta } else { b - &delta };
        let ct = c.evaluate(&t).ok()?;
        if (right && &ct < v) || (!right && &ct > v) {
            return Some(t);
        }
        delta /= int(2);
    }
    None
}

/// `t ↦ φ(t) / t` on `(0, ∞)`.
#[derive(Debug, Clone, Copy)]
pub struct RatioFunction<'a> {
    phi: &'a ControlFunction,
}

impl<'a> RatioFunction<'a> {
    pub fn of(phi: &'a ControlFunction) -> Self {
        RatioFunction { phi }
    }

    pub fn value(&self, t: &Scalar) -> Scalar {
        self.phi.evaluate(t).expect("positive argument") / t
    }

    /// Value and one-sided limits at `b > 0`.
    fn values_at(&self, b: &Scalar) -> Vec<Scalar> {
        let mut out = vec![self.value(b), self.phi.right_limit(b) / b];
        if let Some(l) = self.phi.left_limit(b) {
            out.push(l / b);
        }
        out
    }

    fn jumps_at(&self, b: &Scalar) -> bool {
        let vs = self.values_at(b);
        vs.iter().any(|v| v != &vs[0])
    }

    fn breakpoints(&self) -> Vec<Scalar> {
        self.phi.breakpoints().into_iter().filter(|b| b.is_positive()).collect()
    }
}

fn positive_grid(grid: &SampleSet) -> Result<Vec<Scalar>, ControlError> {
    let pts: Vec<Scalar> = grid.iter().filter(|t| t.is_positive()).cloned().collect();
    if pts.is_empty() {
        return Err(ControlError::EmptyGrid);
    }
    Ok(pts)
}

/// Continuous β with `α ≤ β < 1` at every grid point: each knot takes the
/// largest value of α (including one-sided limits at breakpoints) over its
/// neighbouring grid span, and knots whose span contains a jump are raised
/// halfway toward 1.
pub fn dominate_ratio_by_continuous(alpha: &RatioFunction<'_>, grid: &SampleSet) -> Result<LinearTable, ControlError> {
    let ts = positive_grid(grid)?;
    let breaks = alpha.breakpoints();
    let mut knots = Vec::with_capacity(ts.len());
    for (i, t) in ts.iter().enumerate() {
        let a = alpha.value(t);
        if a >= Scalar::one() {
            return Err(ControlError::RatioReachesOne { t: t.clone(), ratio: a });
        }
        let lo = if i > 0 { &ts[i - 1] } else { t };
        let hi = ts.get(i + 1).unwrap_or(t);
        let mut m = a;
        for s in [lo, hi] {
            m = m.max(alpha.value(s));
        }
        let lo_open = if i == 0 { Scalar::zero() } else { lo.clone() };
        let mut jump = false;
        for b in breaks.iter().filter(|b| *b > &lo_open && *b <= hi) {
            for v in alpha.values_at(b) {
                m = m.max(v);
            }
            jump |= alpha.jumps_at(b);
        }
        if m >= Scalar::one() {
            return Err(ControlError::RatioReachesOne { t: t.clone(), ratio: m });
        }
        if jump {
            m = (m + Scalar::one()) / int(2);
        }
        knots.push((t.clone(), m));
    }
    LinearTable::new(knots)
}

/// Nondecreasing piecewise-linear ψ through the grid with `c ≤ ψ < id` at
/// grid points, `ψ(0) = 0`, and a slope-limited extension past the last knot.
pub fn monotone_envelope(c: &ControlFunction, grid: &SampleSet) -> Result<ControlFunction, ControlError> {
    let ts = positive_grid(grid)?;
    let values = ts
        .iter()
        .map(|t| Ok((t.clone(), c.evaluate(t)?)))
        .collect::<Result<Vec<_>, ControlError>>()?;
    envelope_from_values(&values)
}

fn envelope_from_values(values: &[(Scalar, Scalar)]) -> Result<ControlFunction, ControlError> {
    if values.is_empty() {
        return Err(ControlError::EmptyGrid);
    }
    let mut knots: Vec<(Scalar, Scalar)> = vec![(Scalar::zero(), Scalar::zero())];
    for (t, v) in values {
        if v >= t {
            return Err(ControlError::EnvelopeImpossible {
                t: t.clone(),
                value: v.clone(),
            });
        }
        let prev = knots.last().expect("origin knot").1.clone();
        let mut psi = v.clone().max(prev.clone()).max(Scalar::zero());
        if &psi >= t {
            psi = (prev + t) / int(2);
        }
        knots.push((t.clone(), psi));
    }
    let table = LinearTable::new(knots)?;
    let (last_t, last_v) = table.knots().last().cloned().expect("nonempty");
    let slope = table.last_slope().max(Scalar::zero()).min(scalar::half());
    let intercept = &last_v - &slope * &last_t;
    let pieces = vec![
        CfPiece {
            guard: RayGuard::new(Scalar::zero(), Some(last_t.clone()), true, true),
            form: CfForm::LinearTable { knots: table },
        },
        CfPiece {
            guard: RayGuard::from(last_t, false),
            form: CfForm::affine(slope, intercept),
        },
    ];
    ControlFunction::new(
        pieces,
        DeclaredFlags {
            monotone_increasing: true,
            continuous: true,
            upper_semicontinuous: true,
        },
    )
}

/// Certificate attached to a synthesised ψ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SynthesisCertificate {
    pub grid_points: usize,
    pub regularity: RegularityReport,
    /// `φ(t) ≤ ψ(t)` at every grid point.
    pub dominates: Verdict,
}

impl SynthesisCertificate {
    pub fn all_green(&self) -> bool {
        self.regularity.all_green() && self.dominates.holds
    }
}

/// Builds ψ from φ: α = φ/t, a continuous β ≥ α, `c = t β`, then the
/// monotone envelope of `c`. The certificate is re-derived from scratch.
pub fn synthesize_psi(
    phi: &ControlFunction,
    grid: &SampleSet,
) -> Result<(ControlFunction, SynthesisCertificate), ControlError> {
    let ts = positive_grid(grid)?;
    for t in &ts {
        let v = phi.evaluate(t)?;
        if &v >= t {
            return Err(ControlError::RatioReachesOne {
                t: t.clone(),
                ratio: v / t,
            });
        }
    }
    let beta = dominate_ratio_by_continuous(&RatioFunction::of(phi), grid)?;
    let scaled: Vec<(Scalar, Scalar)> = beta.knots().iter().map(|(t, b)| (t.clone(), t * b)).collect();
    let psi = envelope_from_values(&scaled)?;
    let certificate = certify(phi, &psi, grid);
    Ok((psi, certificate))
}

/// Checks `φ ≤ ψ` on the grid together with the regularity of ψ.
pub fn certify(phi: &ControlFunction, psi: &ControlFunction, grid: &SampleSet) -> SynthesisCertificate {
    let mut dominates = Verdict::pass();
    for t in grid.iter().filter(|t| !t.is_negative()) {
        if phi.evaluate(t).expect("nonnegative") > psi.evaluate(t).expect("nonnegative") {
            dominates = Verdict::fail(Witness::Point { t: t.clone() });
            break;
        }
    }
    SynthesisCertificate {
        grid_points: grid.len(),
        regularity: check_regularity(psi, grid),
        dominates,
    }
}

/// `count` evenly spaced points of `(0, upper]` plus every positive
/// breakpoint of `c` and its neighbours at distance `upper / (1000 count)`.
pub fn default_grid(c: &ControlFunction, upper: &Scalar, count: usize) -> SampleSet {
    let n = int(count as i64);
    let mut pts: Vec<Scalar> = (1..=count).map(|k| upper * int(k as i64) / &n).collect();
    let off = upper / (&n * int(1000));
    for b in c.breakpoints().into_iter().filter(|b| b.is_positive()) {
        pts.push(&b - &off);
        pts.push(&b + &off);
        pts.push(b);
    }
    pts.retain(|t| t.is_positive());
    SampleSet::from_points(pts)
}

/// [`default_grid`] joined with the distances at which a condition check
/// evaluated the control function, so ψ is certified where it is used.
pub fn grid_with_distances(c: &ControlFunction, upper: &Scalar, count: usize, distances: &[Scalar]) -> SampleSet {
    let mut pts: Vec<Scalar> = default_grid(c, upper, count).iter().cloned().collect();
    pts.extend(distances.iter().filter(|d| d.is_positive()).cloned());
    SampleSet::from_points(pts)
}
