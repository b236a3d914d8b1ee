//! The interleaved iteration `T x_{2n} = f x_{2n+1}`, `T x_{2n+1} = g x_{2n+2}`
//! and the pipeline that turns it into a certified common fixed point.

use std::fmt;
use std::fmt::Write as _;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::compat::{commutes_on_set, fixed_set_intersection, is_weakly_compatible, tail_limit, CommuteReport};
use crate::conditions::{check_condition_over_family, check_condition_with_priority, CheckReport, Condition, Maps};
use crate::control::ControlFunction;
use crate::domain::{sample_with_breakpoints, DomainSet, EdgeOffset, Interval, SampleSet, DEFAULT_RESOLUTION};
use crate::error::{IterationError, MapError};
use crate::piecewise::{MapFamily, PiecewiseMap};
use crate::scalar::{distance, int, serde_scalar, serde_scalar_opt, serde_scalar_vec, Scalar};

/// One solution component of `m(x) = target`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Preimage {
    Point {
        #[serde(with = "serde_scalar")]
        x: Scalar,
    },
    /// A whole component maps to the target; `representative` is its midpoint.
    Continuum {
        set: DomainSet,
        #[serde(with = "serde_scalar")]
        representative: Scalar,
    },
}

impl fmt::Display for Preimage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preimage::Point { x } => write!(f, "{x}"),
            Preimage::Continuum { set, .. } => write!(f, "{set}"),
        }
    }
}

/// Every solution of `m(x) = target`.
pub fn preimages(m: &PiecewiseMap, target: &Scalar) -> Result<Vec<Preimage>, IterationError> {
    let set = m.preimage_set(target);
    if set.is_empty() {
        return Err(MapError::NoPreimage { target: target.clone() }.into());
    }
    let mut out: Vec<Preimage> = set
        .isolated_points()
        .iter()
        .map(|x| Preimage::Point { x: x.clone() })
        .collect();
    for i in set.intervals() {
        out.push(Preimage::Continuum {
            set: DomainSet::interval(i.clone()),
            representative: i.midpoint(),
        });
    }
    for s in set.sequences() {
        let part = DomainSet::geometric(s.clone());
        out.push(Preimage::Continuum {
            representative: part.representative().expect("nonempty sequence"),
            set: part,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PreimagePolicy {
    /// The solution nearest to the previous iterate, ties toward the smaller.
    #[default]
    NearestToPrevious,
    /// The smallest solution.
    Smallest,
}

fn choose(set: &DomainSet, prev: &Scalar, policy: PreimagePolicy) -> Option<Scalar> {
    match policy {
        PreimagePolicy::NearestToPrevious => set.nearest_member(prev),
        PreimagePolicy::Smallest => set.nearest_member(&(set.breakpoints().first()?.clone() - int(1))),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IterationConfig {
    pub policy: PreimagePolicy,
    pub max_iter: usize,
    #[serde(with = "serde_scalar")]
    pub tol: Scalar,
}

impl Default for IterationConfig {
    fn default() -> Self {
        IterationConfig {
            policy: PreimagePolicy::NearestToPrevious,
            max_iter: 10_000,
            tol: Scalar::new(1.into(), num_bigint::BigInt::from(10u32).pow(12)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    ConstantTail,
    AlphaBelowTol,
    MaxIterations,
    PreimageFailure {
        #[serde(with = "serde_scalar")]
        target: Scalar,
        map: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PreimageChoice {
    #[serde(with = "serde_scalar")]
    pub target: Scalar,
    pub candidates: DomainSet,
    #[serde(with = "serde_scalar")]
    pub chosen: Scalar,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IterationTrace {
    #[serde(with = "serde_scalar_vec")]
    pub x_seq: Vec<Scalar>,
    #[serde(with = "serde_scalar_vec")]
    pub y_seq: Vec<Scalar>,
    #[serde(with = "serde_scalar_vec")]
    pub alpha_seq: Vec<Scalar>,
    pub terminated_by: Termination,
    pub preimage_choices: Vec<PreimageChoice>,
}

impl IterationTrace {
    /// Columns `n, x_n, y_n, alpha_n`; alpha is empty on the last row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,x_n,y_n,alpha_n\n");
        for (n, (x, y)) in self.x_seq.iter().zip(&self.y_seq).enumerate() {
            let a = self.alpha_seq.get(n).map(ToString::to_string).unwrap_or_default();
            writeln!(out, "{n},{x},{y},{a}").expect("write to string");
        }
        out
    }
}

/// Extra steps that must repeat a zero displacement before a constant tail
/// is accepted.
const TAIL_CONFIRMATION: usize = 2;

/// Builds `x_n`, `y_n = T x_n` with `f x_{2n+1} = y_{2n}` and
/// `g x_{2n+2} = y_{2n+1}`.
pub fn run_jungck(
    t: &PiecewiseMap,
    f: &PiecewiseMap,
    g: &PiecewiseMap,
    x0: &Scalar,
    config: &IterationConfig,
) -> Result<IterationTrace, IterationError> {
    if !t.domain().contains(x0) {
        return Err(IterationError::OutOfDomain { x0: x0.clone() });
    }
    let mut trace = IterationTrace {
        x_seq: vec![x0.clone()],
        y_seq: vec![t.evaluate(x0)?],
        alpha_seq: Vec::new(),
        terminated_by: Termination::MaxIterations,
        preimage_choices: Vec::new(),
    };
    let mut zero_run = 0usize;
    while trace.alpha_seq.len() < config.max_iter {
        let k = trace.x_seq.len() - 1;
        let (solver, label) = if k.is_multiple_of(2) { (f, "f") } else { (g, "g") };
        let target = trace.y_seq[k].clone();
        let candidates = solver.preimage_set(&target);
        let Some(next) = choose(&candidates, &trace.x_seq[k], config.policy) else {
            trace.terminated_by = Termination::PreimageFailure {
                target,
                map: label.into(),
            };
            return Ok(trace);
        };
        let y = t.evaluate(&next)?;
        let alpha = distance(&target, &y);
        trace.preimage_choices.push(PreimageChoice {
            target,
            candidates,
            chosen: next.clone(),
        });
        trace.x_seq.push(next);
        trace.y_seq.push(y);
        if alpha.is_zero() {
            zero_run += 1;
            trace.alpha_seq.push(alpha);
            if zero_run > TAIL_CONFIRMATION {
                trace.terminated_by = Termination::ConstantTail;
                return Ok(trace);
            }
            continue;
        }
        zero_run = 0;
        let small = alpha < config.tol;
        trace.alpha_seq.push(alpha);
        if small {
            trace.terminated_by = Termination::AlphaBelowTol;
            return Ok(trace);
        }
    }
    Ok(trace)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DescentVerdict {
    pub holds: bool,
    pub steps_checked: usize,
    pub first_violation: Option<usize>,
}

/// `α_{n+1} ≤ ψ(α_n) < α_n` at every step with `α_n > 0`.
pub fn verify_alpha_descent_slice(alphas: &[Scalar], psi: &ControlFunction) -> DescentVerdict {
    let mut steps = 0;
    for (n, w) in alphas.windows(2).enumerate() {
        if w[0].is_zero() {
            continue;
        }
        steps += 1;
        let bound = psi.evaluate(&w[0]).expect("distances are nonnegative");
        if w[1] > bound || bound >= w[0] {
            return DescentVerdict {
                holds: false,
                steps_checked: steps,
                first_violation: Some(n),
            };
        }
    }
    DescentVerdict {
        holds: true,
        steps_checked: steps,
        first_violation: None,
    }
}

pub fn verify_alpha_descent(trace: &IterationTrace, psi: &ControlFunction) -> DescentVerdict {
    verify_alpha_descent_slice(&trace.alpha_seq, psi)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CauchyReport {
    #[serde(with = "serde_scalar")]
    pub eps: Scalar,
    /// First index from which the tail of `y` has diameter below `eps`.
    pub first_index: Option<usize>,
    #[serde(with = "serde_scalar_vec")]
    pub tail_diameters: Vec<Scalar>,
}

pub fn cauchy_diagnostics(trace: &IterationTrace, eps: &Scalar) -> CauchyReport {
    let y = &trace.y_seq;
    let mut diam = vec![Scalar::zero(); y.len()];
    if let Some(last) = y.last() {
        let (mut lo, mut hi) = (last.clone(), last.clone());
        for k in (0..y.len()).rev() {
            if y[k] < lo {
                lo = y[k].clone();
            }
            if y[k] > hi {
                hi = y[k].clone();
            }
            diam[k] = &hi - &lo;
        }
    }
    CauchyReport {
        eps: eps.clone(),
        first_index: diam.iter().position(|d| d < eps),
        tail_diameters: diam,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Inclusion,
    Completeness,
    Condition,
    WeakCompatibility,
    Iteration,
    Coincidence,
    CommonFixedPoint,
    Uniqueness,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Inclusion => "inclusion",
            Stage::Completeness => "completeness",
            Stage::Condition => "condition",
            Stage::WeakCompatibility => "weak_compatibility",
            Stage::Iteration => "iteration",
            Stage::Coincidence => "coincidence",
            Stage::CommonFixedPoint => "common_fixed_point",
            Stage::Uniqueness => "uniqueness",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageReport {
    pub stage: Stage,
    /// `None` when the stage was not run.
    pub passed: Option<bool>,
    pub witness: Option<String>,
    pub detail: String,
}

impl StageReport {
    fn new(stage: Stage, passed: bool, witness: Option<String>, detail: impl Into<String>) -> Self {
        StageReport {
            stage,
            passed: Some(passed),
            witness,
            detail: detail.into(),
        }
    }

    fn skipped(stage: Stage, detail: impl Into<String>) -> Self {
        StageReport {
            stage,
            passed: None,
            witness: None,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Status {
    UniquePoint {
        #[serde(with = "serde_scalar")]
        z: Scalar,
    },
    HypothesisFailed {
        which: Stage,
        witness: Option<String>,
    },
    NoLimitInSpace {
        #[serde(with = "serde_scalar")]
        escaping_to: Scalar,
    },
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::UniquePoint { z } => write!(f, "unique common fixed point z = {z}"),
            Status::HypothesisFailed { which, witness } => match witness {
                Some(w) => write!(f, "hypothesis failed at {which} (witness {w})"),
                None => write!(f, "hypothesis failed at {which}"),
            },
            Status::NoLimitInSpace { escaping_to } => {
                write!(f, "no limit in the space; iterates escape to {escaping_to}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommonFixedPointResult {
    pub status: Status,
    #[serde(with = "serde_scalar_opt")]
    pub coincidence_u: Option<Scalar>,
    #[serde(with = "serde_scalar_opt")]
    pub coincidence_v: Option<Scalar>,
    pub diagnostics: Vec<StageReport>,
    pub condition_report: Option<CheckReport>,
    pub trace: Option<IterationTrace>,
}

impl CommonFixedPointResult {
    pub fn z(&self) -> Option<&Scalar> {
        match &self.status {
            Status::UniquePoint { z } => Some(z),
            _ => None,
        }
    }

    pub fn stage(&self, s: Stage) -> Option<&StageReport> {
        self.diagnostics.iter().find(|d| d.stage == s)
    }
}

/// `Strict` reports the first failed hypothesis even when the iteration
/// still reaches a common fixed point; `Advisory` records failures in the
/// diagnostics only.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Strict,
    Advisory,
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub x0: Option<Scalar>,
    pub iteration: IterationConfig,
    pub condition: Option<Condition>,
    pub resolution: usize,
    pub edge_offset: EdgeOffset,
    pub mode: Mode,
    /// Pairs checked first by the condition stage.
    pub priority_pairs: Vec<(Scalar, Scalar)>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            x0: None,
            iteration: IterationConfig::default(),
            condition: None,
            resolution: DEFAULT_RESOLUTION,
            edge_offset: EdgeOffset::default(),
            mode: Mode::Strict,
            priority_pairs: Vec::new(),
        }
    }
}

impl PipelineConfig {
    pub fn with_condition(mut self, c: Condition) -> Self {
        self.condition = Some(c);
        self
    }

    pub fn with_x0(mut self, x0: Scalar) -> Self {
        self.x0 = Some(x0);
        self
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }
}

/// Breakpoint-aware samples of the shared domain of `maps`.
pub fn pipeline_samples(maps: &[&PiecewiseMap], resolution: usize, offset: &EdgeOffset) -> Result<SampleSet, MapError> {
    let guards: Vec<Interval> = maps.iter().flat_map(|m| m.guards()).collect();
    Ok(sample_with_breakpoints(maps[0].domain(), resolution, offset, &guards)?)
}

/// Distance below which an inexact iterate is snapped to an exact
/// coincidence point.
fn snap_radius() -> Scalar {
    Scalar::new(1.into(), 1_000_000.into())
}

fn extract_limit(trace: &IterationTrace, t: &PiecewiseMap, f: &PiecewiseMap) -> Option<Scalar> {
    let y = &trace.y_seq;
    let last = y.last()?;
    if trace.terminated_by == Termination::ConstantTail {
        return Some(last.clone());
    }
    if let Some(z) = tail_limit(y) {
        return Some(z);
    }
    let even: Vec<Scalar> = y.iter().step_by(2).cloned().collect();
    let odd: Vec<Scalar> = y.iter().skip(1).step_by(2).cloned().collect();
    if let (Some(a), Some(b)) = (tail_limit(&even), tail_limit(&odd)) {
        if a == b {
            return Some(a);
        }
    }
    let c = PiecewiseMap::coincidence_points(t, f);
    let near = c.exact().nearest_member(last)?;
    (distance(&near, last) < snap_radius()).then_some(near)
}

/// A point `w` with `m(w) = z` and `T(w) = z`, preferring `z` itself.
fn coincidence_witness(m: &PiecewiseMap, t: &PiecewiseMap, z: &Scalar) -> Option<Scalar> {
    let both = m.preimage_set(z).intersect(&t.preimage_set(z));
    if both.contains(z) {
        return Some(z.clone());
    }
    both.nearest_member(z)
}

/// Checks the hypotheses, runs the iteration from `x0` and certifies the
/// limit as the unique common fixed point of `T`, `f` and `g`. When
/// `g == f` the two-map form of the hypotheses is used.
pub fn common_fixed_point(
    t: &PiecewiseMap,
    f: &PiecewiseMap,
    g: &PiecewiseMap,
    config: &PipelineConfig,
) -> Result<CommonFixedPointResult, IterationError> {
    let two_map = f == g;
    let mut diag = Vec::new();

    let tk = t.image_of_domain()?;
    let fk = f.image_of_domain()?;
    let gk = g.image_of_domain()?;
    let inclusion = if two_map {
        let w = tk.subset_witness(&fk);
        StageReport::new(
            Stage::Inclusion,
            w.is_none(),
            w.map(|v| v.to_string()),
            format!("T(K) = {tk}, f(K) = {fk}"),
        )
    } else {
        let closure = tk.closure();
        let w = closure.subset_witness(&fk.intersect(&gk));
        StageReport::new(
            Stage::Inclusion,
            w.is_none(),
            w.map(|v| v.to_string()),
            format!("closure(T(K)) = {closure}, f(K) = {fk}, g(K) = {gk}"),
        )
    };
    diag.push(inclusion);

    let candidates: Vec<(&str, DomainSet)> = if two_map {
        vec![("T(K)", tk.clone()), ("f(K)", fk.clone())]
    } else {
        vec![
            ("closure(T(K))", tk.closure()),
            ("f(K)", fk.clone()),
            ("g(K)", gk.clone()),
        ]
    };
    let complete = candidates.iter().find(|(_, s)| s.is_complete().complete);
    diag.push(match complete {
        Some((name, _)) => StageReport::new(Stage::Completeness, true, None, format!("{name} is complete")),
        None => {
            let w = candidates.iter().find_map(|(_, s)| s.missing_limit_point());
            StageReport::new(
                Stage::Completeness,
                false,
                w.map(|v| v.to_string()),
                "no candidate subspace is complete",
            )
        }
    });

    let mut condition_report = None;
    match &config.condition {
        Some(cond) => {
            let samples = pipeline_samples(&[t, f, g], config.resolution, &config.edge_offset)?;
            let maps = if two_map { Maps::two(t, f) } else { Maps::three(t, f, g) };
            let r = check_condition_with_priority(cond, maps, &samples, &config.priority_pairs)?;
            let w = r.violation_witness.as_ref().map(|v| format!("({}, {})", v.x, v.y));
            diag.push(StageReport::new(
                Stage::Condition,
                r.holds,
                w,
                format!(
                    "{} over {} pairs, min margin {}",
                    r.condition, r.pairs_checked, r.min_margin
                ),
            ));
            condition_report = Some(r);
        }
        None => diag.push(StageReport::skipped(Stage::Condition, "no condition configured")),
    }

    let mut wc_ok = true;
    let mut wc_witness = None;
    let mut wc_detail = Vec::new();
    let pairs: Vec<(&str, &PiecewiseMap)> = if two_map {
        vec![("f", f)]
    } else {
        vec![("f", f), ("g", g)]
    };
    for (name, m) in pairs {
        let r = is_weakly_compatible(t, m)?;
        wc_detail.push(format!("C(T,{name}) = {}", r.coincidence_set));
        if !r.holds && wc_ok {
            wc_ok = false;
            wc_witness = r.report.first_failure().map(|e| e.point.clone());
        }
    }
    diag.push(StageReport::new(
        Stage::WeakCompatibility,
        wc_ok,
        wc_witness,
        wc_detail.join("; "),
    ));

    let hypothesis_failure = diag
        .iter()
        .find(|d| d.passed == Some(false))
        .map(|d| Status::HypothesisFailed {
            which: d.stage,
            witness: d.witness.clone(),
        });

    let x0 = match &config.x0 {
        Some(x) => x.clone(),
        None => t
            .domain()
            .representative()
            .ok_or(MapError::Unrepresentable("empty domain".into()))?,
    };
    let trace = run_jungck(t, f, g, &x0, &config.iteration)?;
    let mut result = CommonFixedPointResult {
        status: Status::HypothesisFailed {
            which: Stage::Iteration,
            witness: None,
        },
        coincidence_u: None,
        coincidence_v: None,
        diagnostics: diag,
        condition_report,
        trace: None,
    };
    let z = extract_limit(&trace, t, f);
    let term = format!("{:?} after {} steps", trace.terminated_by, trace.alpha_seq.len());
    result.trace = Some(trace);
    let Some(z) = z else {
        let last = result
            .trace
            .as_ref()
            .and_then(|tr| tr.y_seq.last())
            .map(|v| v.to_string());
        result.diagnostics.push(StageReport::new(
            Stage::Iteration,
            false,
            last.clone(),
            format!("{term}; no limit identified"),
        ));
        result.status = hypothesis_failure.unwrap_or(Status::HypothesisFailed {
            which: Stage::Iteration,
            witness: last,
        });
        return Ok(result);
    };
    result.diagnostics.push(StageReport::new(
        Stage::Iteration,
        true,
        Some(z.to_string()),
        format!("{term}; limit {z}"),
    ));

    if !fk.contains(&z) || !gk.contains(&z) {
        result.diagnostics.push(StageReport::new(
            Stage::Coincidence,
            false,
            Some(z.to_string()),
            "the limit has no preimage under f or g",
        ));
        result.status = Status::NoLimitInSpace { escaping_to: z };
        return Ok(result);
    }
    if let (Mode::Strict, Some(s)) = (config.mode, &hypothesis_failure) {
        result.status = s.clone();
    }

    let u = coincidence_witness(f, t, &z);
    let v = coincidence_witness(g, t, &z);
    result.coincidence_u = u.clone();
    result.coincidence_v = v.clone();
    let coincide = u.is_some() && v.is_some();
    result.diagnostics.push(StageReport::new(
        Stage::Coincidence,
        coincide,
        (!coincide).then(|| z.to_string()),
        format!(
            "u = {}, v = {}",
            u.as_ref().map_or("none".into(), ToString::to_string),
            v.as_ref().map_or("none".into(), ToString::to_string)
        ),
    ));

    let tz = t.evaluate(&z)?;
    let fz = f.evaluate(&z)?;
    let gz = g.evaluate(&z)?;
    let fixed = tz == z && fz == z && gz == z;
    result.diagnostics.push(StageReport::new(
        Stage::CommonFixedPoint,
        fixed,
        (!fixed).then(|| z.to_string()),
        format!("T(z) = {tz}, f(z) = {fz}, g(z) = {gz}"),
    ));

    let common = fixed_set_intersection(&[t, f, g]);
    let unique = common.as_singleton() == Some(&z);
    let other = if unique {
        None
    } else {
        common
            .probe_points()
            .into_iter()
            .find(|p| p != &z)
            .map(|p| p.to_string())
            .or_else(|| common.inexact().first().map(ToString::to_string))
    };
    result.diagnostics.push(StageReport::new(
        Stage::Uniqueness,
        unique,
        other.clone(),
        format!("F(T) ∩ F(f) ∩ F(g) = {common}"),
    ));

    if matches!(
        result.status,
        Status::HypothesisFailed {
            which: Stage::Iteration,
            ..
        }
    ) {
        result.status = if !coincide {
            Status::HypothesisFailed {
                which: Stage::Coincidence,
                witness: Some(z.to_string()),
            }
        } else if !fixed {
            Status::HypothesisFailed {
                which: Stage::CommonFixedPoint,
                witness: Some(z.to_string()),
            }
        } else if !unique {
            Status::HypothesisFailed {
                which: Stage::Uniqueness,
                witness: other,
            }
        } else {
            Status::UniquePoint { z }
        };
    }
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IteratedStatus {
    CommonFixedPoint {
        #[serde(with = "serde_scalar")]
        z: Scalar,
    },
    CommuteFailure {
        #[serde(with = "serde_scalar")]
        z: Scalar,
        #[serde(with = "serde_scalar")]
        tf: Scalar,
        #[serde(with = "serde_scalar")]
        ft: Scalar,
    },
    /// `T` and `f` commute on the fixed set but `T(z) ≠ z`.
    NotFixedByT {
        #[serde(with = "serde_scalar")]
        z: Scalar,
        #[serde(with = "serde_scalar")]
        tz: Scalar,
    },
    /// The pipeline on `(T^m, f)` produced no point.
    NoPowerFixedPoint { status: Status },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IteratedResult {
    pub m: usize,
    pub status: IteratedStatus,
    pub power_result: CommonFixedPointResult,
    pub fixed_set: String,
    pub commute: Option<CommuteReport>,
}

/// The power pipeline result for `(T^m, f)`, with an iterated condition
/// rewritten for the power map.
fn power_config(config: &PipelineConfig) -> PipelineConfig {
    let mut c = config.clone();
    if let Some(Condition::IteratedTwoMap { phi, .. }) = &config.condition {
        c.condition = Some(Condition::TwoMapMax { phi: phi.clone() });
    }
    c
}

/// Common fixed point of `T^m` and `f`, then commutation of `T` and `f` on
/// `F(T^m) ∩ F(f)` and the direct check `T(z) = z`.
pub fn iterated_common_fixed_point(
    t: &PiecewiseMap,
    f: &PiecewiseMap,
    m: usize,
    config: &PipelineConfig,
) -> Result<IteratedResult, IterationError> {
    let tm = t.iterate(m)?;
    let power_result = common_fixed_point(&tm, f, f, &power_config(config))?;
    let fixed = fixed_set_intersection(&[&tm, f]);
    let fixed_set = fixed.to_string();
    let Some(z) = power_result.z().cloned() else {
        return Ok(IteratedResult {
            m,
            status: IteratedStatus::NoPowerFixedPoint {
                status: power_result.status.clone(),
            },
            power_result,
            fixed_set,
            commute: None,
        });
    };
    let commute = commutes_on_set(t, f, &fixed)?;
    let tf = t.evaluate(&f.evaluate(&z)?)?;
    let ft = f.evaluate(&t.evaluate(&z)?)?;
    let status = if !commute.holds || tf != ft {
        IteratedStatus::CommuteFailure { z, tf, ft }
    } else {
        let tz = t.evaluate(&z)?;
        if tz == z {
            IteratedStatus::CommonFixedPoint { z }
        } else {
            IteratedStatus::NotFixedByT { z, tz }
        }
    };
    Ok(IteratedResult {
        m,
        status,
        power_result,
        fixed_set,
        commute: Some(commute),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MemberCheck {
    pub j: usize,
    #[serde(with = "serde_scalar")]
    pub value: Scalar,
    pub fixed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyResult {
    #[serde(with = "serde_scalar_opt")]
    pub z: Option<Scalar>,
    pub first_member_result: CommonFixedPointResult,
    pub members: Vec<MemberCheck>,
    pub failures: Vec<usize>,
    pub family_condition: Option<CheckReport>,
}

/// Common fixed point of `T_1` and `f`, then `T_j(z) = z` for each listed
/// `j`.
pub fn family_common_fixed_point(
    family: &MapFamily,
    f: &PiecewiseMap,
    indices: &[usize],
    config: &PipelineConfig,
) -> Result<FamilyResult, IterationError> {
    let t1 = family.member(1)?;
    let mut inner = config.clone();
    let mut family_condition = None;
    if let Some(Condition::FamilyTwoMap { phi, .. }) = &config.condition {
        inner.condition = Some(Condition::TwoMapMax { phi: phi.clone() });
        let samples = pipeline_samples(&[&t1, f], config.resolution, &config.edge_offset)?;
        let maps = Maps::two(&t1, f).with_family(family);
        family_condition = Some(check_condition_over_family(
            config.condition.as_ref().expect("matched"),
            maps,
            &samples,
            indices,
        )?);
    }
    let first = common_fixed_point(&t1, f, f, &inner)?;
    let z = first.z().cloned();
    let mut members = Vec::new();
    let mut failures = Vec::new();
    if let Some(z) = &z {
        for &j in indices {
            let value = family.member(j)?.evaluate(z)?;
            let fixed = &value == z;
            if !fixed {
                failures.push(j);
            }
            members.push(MemberCheck { j, value, fixed });
        }
    }
    Ok(FamilyResult {
        z: if failures.is_empty() { z } else { None },
        first_member_result: first,
        members,
        failures,
        family_condition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::GeometricSeq;
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

    fn maps38() -> (PiecewiseMap, PiecewiseMap) {
        let x = DomainSet::geometric(GeometricSeq::new(rat(1, 1), rat(1, 2), true).unwrap());
        let t = PiecewiseMap::new(
            x.clone(),
            vec![
                piece(rat(0, 1), rat(0, 1), true, true, Form::constant(rat(1, 4))),
                piece(rat(0, 1), rat(1, 1), false, true, Form::affine(rat(1, 4), rat(0, 1))),
            ],
        )
        .unwrap();
        let f = PiecewiseMap::new(
            x,
            vec![
                piece(rat(0, 1), rat(0, 1), true, true, Form::constant(rat(1, 2))),
                piece(rat(0, 1), rat(1, 1), false, true, Form::affine(rat(1, 2), rat(0, 1))),
            ],
        )
        .unwrap();
        (t, f)
    }

    #[test]
    fn preimage_examples() {
        let (t, f) = maps34();
        assert_eq!(
            preimages(&f, &rat(2, 3)).unwrap(),
            vec![Preimage::Point { x: rat(2, 3) }]
        );
        let cont = preimages(&t, &rat(1, 2)).unwrap();
        assert!(matches!(&cont[0], Preimage::Continuum { .. }));
        assert!(preimages(&f, &rat(9, 10)).is_err());
    }

    #[test]
    fn two_map_trace_converges_geometrically() {
        let (t, f) = maps34();
        let trace = run_jungck(&t, &f, &f, &rat(1, 2), &IterationConfig::default()).unwrap();
        assert_eq!(trace.terminated_by, Termination::AlphaBelowTol);
        for (k, x) in trace.x_seq.iter().enumerate().skip(1) {
            assert_eq!(f.evaluate(x).unwrap(), trace.y_seq[k - 1]);
        }
        assert_eq!(extract_limit(&trace, &t, &f), Some(rat(2, 3)));
        assert!(verify_alpha_descent(&trace, &ControlFunction::linear(rat(1, 2))).holds);
    }

    #[test]
    fn identity_trace_is_constant() {
        let k = DomainSet::interval(Interval::closed(rat(0, 1), rat(1, 1)).unwrap());
        let id = PiecewiseMap::identity(k).unwrap();
        let trace = run_jungck(&id, &id, &id, &rat(1, 3), &IterationConfig::default()).unwrap();
        assert_eq!(trace.terminated_by, Termination::ConstantTail);
        assert!(trace.y_seq.iter().all(|y| y == &rat(1, 3)));
    }

    #[test]
    fn incomplete_space_escapes() {
        let (t, f) = maps38();
        let trace = run_jungck(&t, &f, &f, &rat(1, 1), &IterationConfig::default()).unwrap();
        assert_eq!(trace.terminated_by, Termination::AlphaBelowTol);
        for (n, x) in trace.x_seq.iter().enumerate().take(10) {
            assert_eq!(x, &rat(1, 1 << n));
            assert_eq!(trace.y_seq[n], rat(1, 1 << (n + 2)));
        }
        let c = cauchy_diagnostics(&trace, &rat(1, 100));
        assert_eq!(c.first_index, Some(5));
        let r = common_fixed_point(&t, &f, &f, &PipelineConfig::default().with_x0(rat(1, 1))).unwrap();
        assert_eq!(r.status, Status::NoLimitInSpace { escaping_to: rat(0, 1) });
        assert_eq!(r.stage(Stage::Completeness).unwrap().passed, Some(false));
    }

    #[test]
    fn two_map_pipeline() {
        let (t, f) = maps34();
        let cfg = PipelineConfig::default().with_condition(Condition::TwoMapMax {
            phi: ControlFunction::linear(rat(1, 2)),
        });
        let r = common_fixed_point(&t, &f, &f, &cfg).unwrap();
        assert_eq!(r.status, Status::UniquePoint { z: rat(2, 3) });
        assert_eq!(r.coincidence_u, Some(rat(2, 3)));
        assert!(r.diagnostics.iter().all(|d| d.passed != Some(false)));
    }

    #[test]
    fn descent_synthetic() {
        let alphas = vec![rat(1, 1), rat(3, 4), rat(9, 16), rat(27, 64)];
        assert!(verify_alpha_descent_slice(&alphas, &ControlFunction::linear(rat(3, 4))).holds);
        let bad = verify_alpha_descent_slice(&alphas, &ControlFunction::linear(rat(1, 2)));
        assert_eq!(bad.first_violation, Some(0));
        assert!(verify_alpha_descent_slice(&[rat(0, 1), rat(0, 1)], &ControlFunction::linear(rat(1, 2))).holds);
    }

    #[test]
    fn csv_export() {
        let (t, f) = maps34();
        let cfg = IterationConfig {
            max_iter: 3,
            ..IterationConfig::default()
        };
        let trace = run_jungck(&t, &f, &f, &rat(1, 2), &cfg).unwrap();
        let csv = trace.to_csv();
        assert!(csv.starts_with("n,x_n,y_n,alpha_n\n0,1/2,1/2,1/12\n"));
        assert_eq!(csv.lines().count(), 5);
    }

    #[test]
    fn family_mutant_detected() {
        let k = DomainSet::interval(Interval::closed(rat(0, 1), rat(1, 1)).unwrap());
        let kk = k.clone();
        let family = MapFamily::new(move |n| {
            if n == 2 {
                PiecewiseMap::constant(kk.clone(), rat(1, 2))
            } else {
                PiecewiseMap::new(
                    kk.clone(),
                    vec![piece(
                        rat(0, 1),
                        rat(1, 1),
                        true,
                        true,
                        Form::affine(rat(1, 2), rat(0, 1)),
                    )],
                )
            }
        });
        let f = PiecewiseMap::identity(k).unwrap();
        let r = family_common_fixed_point(&family, &f, &[1, 2, 3], &PipelineConfig::default()).unwrap();
        assert_eq!(r.failures, vec![2]);
        assert_eq!(r.members[1].value, rat(1, 2));
        assert_eq!(r.z, None);
    }
}
