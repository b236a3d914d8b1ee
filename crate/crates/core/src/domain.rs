//! Exact subsets of the real line.
//!
//! A [`DomainSet`] is a finite union of bounded intervals (open, closed or
//! half-open), isolated points, and geometric sequences `base * ratio^k`
//! accumulating at 0. Membership, inclusion, intersection and closure are all
//! decided exactly, and every negative inclusion answer comes with a witness
//! point.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::DomainError;
use crate::scalar::{self, int, rat, serde_scalar, Scalar};

/// Bounded interval with independently open or closed endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "IntervalRepr", into = "IntervalRepr")]
pub struct Interval {
    lo: Scalar,
    hi: Scalar,
    lo_closed: bool,
    hi_closed: bool,
}

#[derive(Serialize, Deserialize)]
struct IntervalRepr {
    #[serde(with = "serde_scalar")]
    lo: Scalar,
    #[serde(with = "serde_scalar")]
    hi: Scalar,
    lo_closed: bool,
    hi_closed: bool,
}

impl TryFrom<IntervalRepr> for Interval {
    type Error = DomainError;
    fn try_from(r: IntervalRepr) -> Result<Self, Self::Error> {
        Interval::new(r.lo, r.hi, r.lo_closed, r.hi_closed)
    }
}

impl From<Interval> for IntervalRepr {
    fn from(i: Interval) -> Self {
        IntervalRepr {
            lo: i.lo,
            hi: i.hi,
            lo_closed: i.lo_closed,
            hi_closed: i.hi_closed,
        }
    }
}

impl Interval {
    pub fn new(lo: Scalar, hi: Scalar, lo_closed: bool, hi_closed: bool) -> Result<Self, DomainError> {
        let ok = lo < hi || (lo == hi && lo_closed && hi_closed);
        if !ok {
            return Err(DomainError::BadInterval { lo, hi });
        }
        Ok(Interval {
            lo,
            hi,
            lo_closed,
            hi_closed,
        })
    }

    pub fn closed(lo: Scalar, hi: Scalar) -> Result<Self, DomainError> {
        Self::new(lo, hi, true, true)
    }

    pub fn open(lo: Scalar, hi: Scalar) -> Result<Self, DomainError> {
        Self::new(lo, hi, false, false)
    }

    pub fn closed_open(lo: Scalar, hi: Scalar) -> Result<Self, DomainError> {
        Self::new(lo, hi, true, false)
    }

    pub fn open_closed(lo: Scalar, hi: Scalar) -> Result<Self, DomainError> {
        Self::new(lo, hi, false, true)
    }

    pub fn point(p: Scalar) -> Self {
        Interval {
            lo: p.clone(),
            hi: p,
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn lo(&self) -> &Scalar {
        &self.lo
    }

    pub fn hi(&self) -> &Scalar {
        &self.hi
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn length(&self) -> Scalar {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Scalar {
        scalar::midpoint(&self.lo, &self.hi)
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        let above = match x.cmp(&self.lo) {
            Ordering::Greater => true,
            Ordering::Equal => self.lo_closed,
            Ordering::Less => false,
        };
        let below = match x.cmp(&self.hi) {
            Ordering::Less => true,
            Ordering::Equal => self.hi_closed,
            Ordering::Greater => false,
        };
        above && below
    }

    /// True when `(t, t + eps)` lies inside the interval for some `eps > 0`.
    pub fn contains_right_of(&self, t: &Scalar) -> bool {
        &self.lo <= t && t < &self.hi
    }

    /// True when `(t - eps, t)` lies inside the interval for some `eps > 0`.
    pub fn contains_left_of(&self, t: &Scalar) -> bool {
        &self.lo < t && t <= &self.hi
    }

    pub fn closure(&self) -> Interval {
        Interval {
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let (lo, lo_closed) = match self.lo.cmp(&other.lo) {
            Ordering::Greater => (self.lo.clone(), self.lo_closed),
            Ordering::Less => (other.lo.clone(), other.lo_closed),
            Ordering::Equal => (self.lo.clone(), self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp(&other.hi) {
            Ordering::Less => (self.hi.clone(), self.hi_closed),
            Ordering::Greater => (other.hi.clone(), other.hi_closed),
            Ordering::Equal => (self.hi.clone(), self.hi_closed && other.hi_closed),
        };
        Interval::new(lo, hi, lo_closed, hi_closed).ok()
    }

    /// Reflection through the origin.
    pub fn mirrored(&self) -> Interval {
        Interval {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
            lo_closed: self.hi_closed,
            hi_closed: self.lo_closed,
        }
    }

    /// Closest member of the interval to `x`. An open endpoint is replaced
    /// by a point `length / 1000` inside it.
    fn nearest_member(&self, x: &Scalar) -> Scalar {
        if self.contains(x) {
            return x.clone();
        }
        let inset = self.length() / int(1000);
        if x < &self.lo {
            if self.lo_closed {
                self.lo.clone()
            } else {
                &self.lo + inset
            }
        } else if self.hi_closed {
            self.hi.clone()
        } else {
            &self.hi - inset
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_degenerate() {
            return write!(f, "{{{}}}", self.lo);
        }
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

/// The countable set `{ base * ratio^k : k >= 0 }`, optionally with its
/// limit point 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeometricSeq {
    base: Scalar,
    ratio: Scalar,
    includes_limit: bool,
}

impl GeometricSeq {
    pub fn new(base: Scalar, ratio: Scalar, includes_limit: bool) -> Result<Self, DomainError> {
        if base.is_zero() {
            return Err(DomainError::ZeroBase);
        }
        if !(ratio.is_positive() && ratio < Scalar::one()) {
            return Err(DomainError::BadRatio { ratio });
        }
        Ok(GeometricSeq {
            base,
            ratio,
            includes_limit,
        })
    }

    pub fn base(&self) -> &Scalar {
        &self.base
    }

    pub fn ratio(&self) -> &Scalar {
        &self.ratio
    }

    pub fn includes_limit(&self) -> bool {
        self.includes_limit
    }

    pub fn term(&self, k: usize) -> Scalar {
        let mut t = self.base.clone();
        for _ in 0..k {
            t *= &self.ratio;
        }
        t
    }

    pub fn terms(&self) -> impl Iterator<Item = Scalar> + '_ {
        std::iter::successors(Some(self.base.clone()), move |t| Some(t * &self.ratio))
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        if x.is_zero() {
            return self.includes_limit;
        }
        if x.is_positive() != self.base.is_positive() {
            return false;
        }
        let target = x.abs();
        for t in self.terms() {
            let t = t.abs();
            match t.cmp(&target) {
                Ordering::Equal => return true,
                Ordering::Less => return false,
                Ordering::Greater => {}
            }
        }
        unreachable!("terms decrease to zero")
    }

    fn mirrored(&self) -> GeometricSeq {
        GeometricSeq {
            base: -self.base.clone(),
            ratio: self.ratio.clone(),
            includes_limit: self.includes_limit,
        }
    }

    /// Intersection with an interval: a finite point list plus possibly a
    /// geometric tail.
    fn intersect_interval(&self, j: &Interval) -> (Vec<Scalar>, Option<GeometricSeq>) {
        if self.base.is_negative() {
            let (pts, tail) = self.mirrored().intersect_interval(&j.mirrored());
            return (pts.into_iter().map(|p| -p).collect(), tail.map(|t| t.mirrored()));
        }
        let mut points = Vec::new();
        let limit_in = self.includes_limit && j.contains(&Scalar::zero());
        if j.contains_right_of(&Scalar::zero()) {
            let (k, first) = self
                .terms()
                .enumerate()
                .find(|(_, t)| j.contains(t))
                .expect("terms eventually enter a right-neighbourhood of 0");
            let tail = GeometricSeq {
                base: first,
                ratio: self.ratio.clone(),
                includes_limit: limit_in,
            };
            let _ = k;
            return (points, Some(tail));
        }
        if j.hi.is_positive() {
            for t in self.terms() {
                if t < j.lo {
                    break;
                }
                if j.contains(&t) {
                    points.push(t);
                }
            }
        }
        if limit_in {
            points.push(Scalar::zero());
        }
        (points, None)
    }

    /// The indices `k` with `self.term(k)` in `other` (the limit point
    /// aside): either nothing, a single index, or `k0, k0 + period, ...`.
    fn meet(&self, other: &GeometricSeq) -> Option<Meet> {
        if self.base.is_positive() != other.base.is_positive() {
            return None;
        }
        let values = [
            self.base.abs(),
            self.ratio.clone(),
            other.base.abs(),
            other.ratio.clone(),
        ];
        let mut raw = Vec::new();
        for v in &values {
            raw.push(v.numer().clone());
            raw.push(v.denom().clone());
        }
        let basis = coprime_base(raw);
        let [ba, ra, bb, rb] = values.map(|v| exponents(&v, &basis));
        // k * ra - j * rb = bb - ba with k, j >= 0
        let w: Vec<i64> = bb.iter().zip(&ba).map(|(x, y)| x - y).collect();
        let (u, v) = (ra, rb);
        let dim = u.len();
        for i in 0..dim {
            for l in i + 1..dim {
                let det = -(u[i] * v[l]) + v[i] * u[l];
                if det == 0 {
                    continue;
                }
                let kn = -(w[i] * v[l]) + v[i] * w[l];
                let jn = u[i] * w[l] - w[i] * u[l];
                if kn % det != 0 || jn % det != 0 {
                    return None;
                }
                let (k, j) = (kn / det, jn / det);
                if k < 0 || j < 0 || (0..dim).any(|c| k * u[c] - j * v[c] != w[c]) {
                    return None;
                }
                return Some(Meet {
                    first: k as usize,
                    period: None,
                });
            }
        }
        // parallel exponent vectors: both ratios are powers of one rational
        let g = u.iter().fold(0i64, |g, &x| gcd(g, x.abs()));
        let e: Vec<i64> = u.iter().map(|x| x / g).collect();
        let pivot = e.iter().position(|x| *x != 0)?;
        let alpha = g;
        let beta = v[pivot] / e[pivot];
        let gamma = w[pivot] / e[pivot];
        if (0..dim).any(|c| w[c] != gamma * e[c]) {
            return None;
        }
        // k * alpha - j * beta = gamma
        let h = gcd(alpha, beta);
        if gamma % h != 0 {
            return None;
        }
        let step = beta / h;
        let mut k = (0..step).find(|k| (k * alpha - gamma) % beta == 0)?;
        while k * alpha < gamma {
            k += step;
        }
        Some(Meet {
            first: k as usize,
            period: Some(step as usize),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Meet {
    first: usize,
    period: Option<usize>,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Pairwise coprime integers, each > 1, over which every input factors.
fn coprime_base(xs: Vec<BigInt>) -> Vec<BigInt> {
    let one = BigInt::one();
    let mut base: Vec<BigInt> = xs.into_iter().filter(|x| x > &one).collect();
    loop {
        base.sort();
        base.dedup();
        let mut split = None;
        'search: for i in 0..base.len() {
            for j in i + 1..base.len() {
                let g = base[i].gcd(&base[j]);
                if g > one {
                    split = Some((i, j, g));
                    break 'search;
                }
            }
        }
        let Some((i, j, g)) = split else {
            return base;
        };
        let (a, b) = (base[i].clone() / &g, base[j].clone() / &g);
        base.remove(j);
        base.remove(i);
        base.extend([a, b, g].into_iter().filter(|x| x > &one));
    }
}

fn exponents(x: &Scalar, basis: &[BigInt]) -> Vec<i64> {
    let count = |n: &BigInt, b: &BigInt| {
        let mut n = n.clone();
        let mut e = 0i64;
        while (&n % b).is_zero() {
            n /= b;
            e += 1;
        }
        e
    };
    basis
        .iter()
        .map(|b| count(x.numer(), b) - count(x.denom(), b))
        .collect()
}

impl fmt::Display for GeometricSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}*({})^k}}", self.base, self.ratio)?;
        if self.includes_limit {
            write!(f, " ∪ {{0}}")?;
        }
        Ok(())
    }
}

/// One component of a [`DomainSet`], as it appears in fixtures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Component {
    Interval(Interval),
    Points(Vec<Scalar>),
    Geometric(GeometricSeq),
}

/// Exact subset of the real line, kept normalized: intervals are sorted,
/// pairwise disjoint and non-mergeable; isolated points lie outside every
/// interval and every geometric sequence.
///
/// Equality is set equality.
#[derive(Debug, Clone, Default)]
pub struct DomainSet {
    intervals: Vec<Interval>,
    points: Vec<Scalar>,
    sequences: Vec<GeometricSeq>,
}

impl PartialEq for DomainSet {
    fn eq(&self, other: &Self) -> bool {
        self.subset_witness(other).is_none() && other.subset_witness(self).is_none()
    }
}

impl Eq for DomainSet {}

impl DomainSet {
    pub fn empty() -> Self {
        DomainSet::default()
    }

    pub fn from_components(components: Vec<Component>) -> Self {
        let mut intervals = Vec::new();
        let mut points = Vec::new();
        let mut sequences = Vec::new();
        for c in components {
            match c {
                Component::Interval(i) => intervals.push(i),
                Component::Points(p) => points.extend(p),
                Component::Geometric(g) => sequences.push(g),
            }
        }
        Self::normalized(intervals, points, sequences)
    }

    pub fn interval(i: Interval) -> Self {
        Self::normalized(vec![i], vec![], vec![])
    }

    pub fn points<I: IntoIterator<Item = Scalar>>(points: I) -> Self {
        Self::normalized(vec![], points.into_iter().collect(), vec![])
    }

    pub fn geometric(seq: GeometricSeq) -> Self {
        Self::normalized(vec![], vec![], vec![seq])
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn isolated_points(&self) -> &[Scalar] {
        &self.points
    }

    pub fn sequences(&self) -> &[GeometricSeq] {
        &self.sequences
    }

    pub fn components(&self) -> Vec<Component> {
        let mut out: Vec<Component> = self.intervals.iter().cloned().map(Component::Interval).collect();
        if !self.points.is_empty() {
            out.push(Component::Points(self.points.clone()));
        }
        out.extend(self.sequences.iter().cloned().map(Component::Geometric));
        out
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty() && self.points.is_empty() && self.sequences.is_empty()
    }

    /// True when the set has finitely many points (no interval, no sequence).
    pub fn is_finite(&self) -> bool {
        self.intervals.is_empty() && self.sequences.is_empty()
    }

    /// All members when the set is finite.
    pub fn finite_members(&self) -> Option<&[Scalar]> {
        self.is_finite().then_some(self.points.as_slice())
    }

    /// Singleton member, if the set is exactly one point.
    pub fn as_singleton(&self) -> Option<&Scalar> {
        match self.finite_members() {
            Some([p]) => Some(p),
            _ => None,
        }
    }

    fn normalized(mut intervals: Vec<Interval>, mut points: Vec<Scalar>, sequences: Vec<GeometricSeq>) -> Self {
        intervals.retain(|i| {
            if i.is_degenerate() {
                points.push(i.lo.clone());
                false
            } else {
                true
            }
        });
        loop {
            intervals = merge_intervals(intervals);
            let mut changed = false;
            let mut kept = Vec::with_capacity(points.len());
            for p in points.drain(..) {
                if intervals.iter().any(|i| i.contains(&p)) {
                    continue;
                }
                if let Some(i) = intervals.iter_mut().find(|i| i.lo == p) {
                    i.lo_closed = true;
                    changed = true;
                    continue;
                }
                if let Some(i) = intervals.iter_mut().find(|i| i.hi == p) {
                    i.hi_closed = true;
                    changed = true;
                    continue;
                }
                kept.push(p);
            }
            points = kept;
            if !changed {
                break;
            }
        }
        points.sort();
        points.dedup();

        let base = DomainSet {
            intervals,
            points,
            sequences: Vec::new(),
        };
        let mut seqs: Vec<GeometricSeq> = Vec::new();
        for s in sequences {
            if seqs.contains(&s) {
                continue;
            }
            if base.seq_subset_witness(&s).is_none() {
                continue;
            }
            seqs.push(s);
        }
        let mut out = base;
        out.points.retain(|p| !seqs.iter().any(|s| s.contains(p)));
        out.sequences = seqs;
        out
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        self.intervals.iter().any(|i| i.contains(x))
            || self.points.binary_search(x).is_ok()
            || self.sequences.iter().any(|s| s.contains(x))
    }

    pub fn union(&self, other: &DomainSet) -> DomainSet {
        let mut intervals = self.intervals.clone();
        intervals.extend(other.intervals.iter().cloned());
        let mut points = self.points.clone();
        points.extend(other.points.iter().cloned());
        let mut sequences = self.sequences.clone();
        sequences.extend(other.sequences.iter().cloned());
        Self::normalized(intervals, points, sequences)
    }

    pub fn intersect_interval(&self, j: &Interval) -> DomainSet {
        let mut intervals = Vec::new();
        let mut points = Vec::new();
        let mut sequences = Vec::new();
        for i in &self.intervals {
            if let Some(k) = i.intersect(j) {
                intervals.push(k);
            }
        }
        points.extend(self.points.iter().filter(|p| j.contains(p)).cloned());
        for s in &self.sequences {
            let (pts, tail) = s.intersect_interval(j);
            points.extend(pts);
            sequences.extend(tail);
        }
        Self::normalized(intervals, points, sequences)
    }

    pub fn intersect(&self, other: &DomainSet) -> DomainSet {
        let mut acc = DomainSet::empty();
        for j in &other.intervals {
            acc = acc.union(&self.intersect_interval(j));
        }
        let pts: Vec<Scalar> = other.points.iter().filter(|p| self.contains(p)).cloned().collect();
        acc = acc.union(&DomainSet::points(pts));
        for s in &other.sequences {
            acc = acc.union(&self.intersect_sequence(s));
        }
        acc
    }

    fn intersect_sequence(&self, s: &GeometricSeq) -> DomainSet {
        let mut acc = DomainSet::empty();
        for i in &self.intervals {
            let (pts, tail) = s.intersect_interval(i);
            acc = acc.union(&Self::normalized(vec![], pts, tail.into_iter().collect()));
        }
        let pts: Vec<Scalar> = self.points.iter().filter(|p| s.contains(p)).cloned().collect();
        acc = acc.union(&DomainSet::points(pts));
        for own in &self.sequences {
            acc = acc.union(&sequence_intersection(own, s));
        }
        acc
    }

    /// Closure in the real line: open endpoints become closed and every
    /// geometric sequence gains its limit point.
    pub fn closure(&self) -> DomainSet {
        let intervals = self.intervals.iter().map(Interval::closure).collect();
        let sequences = self
            .sequences
            .iter()
            .map(|s| GeometricSeq {
                includes_limit: true,
                ..s.clone()
            })
            .collect();
        Self::normalized(intervals, self.points.clone(), sequences)
    }

    /// A subset of the real line is complete iff it is closed. Returns
    /// `None` when complete, otherwise a limit point missing from the set.
    pub fn missing_limit_point(&self) -> Option<Scalar> {
        self.closure().subset_witness(self)
    }

    pub fn is_complete(&self) -> Completeness {
        let missing = self.missing_limit_point();
        Completeness {
            complete: missing.is_none(),
            missing_limit: missing,
        }
    }

    pub fn is_subset_of(&self, other: &DomainSet) -> bool {
        self.subset_witness(other).is_none()
    }

    /// `None` when `self ⊆ other`; otherwise a point of `self` missing
    /// from `other`.
    pub fn subset_witness(&self, other: &DomainSet) -> Option<Scalar> {
        for p in &self.points {
            if !other.contains(p) {
                return Some(p.clone());
            }
        }
        for i in &self.intervals {
            if let Some(w) = other.interval_witness(i) {
                return Some(w);
            }
        }
        for s in &self.sequences {
            if let Some(w) = other.seq_subset_witness(s) {
                return Some(w);
            }
        }
        None
    }

    /// A point of `i` outside `self`, if any.
    fn interval_witness(&self, i: &Interval) -> Option<Scalar> {
        let mut cuts = vec![i.lo.clone(), i.hi.clone()];
        for j in &self.intervals {
            for e in [&j.lo, &j.hi] {
                if &i.lo < e && e < &i.hi {
                    cuts.push(e.clone());
                }
            }
        }
        cuts.sort();
        cuts.dedup();
        for c in &cuts {
            if i.contains(c) && !self.contains(c) {
                return Some(c.clone());
            }
        }
        for w in cuts.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            let mid = scalar::midpoint(a, b);
            if self.intervals.iter().any(|j| j.contains(&mid)) {
                continue;
            }
            // the open gap (a, b) meets no interval of self, so only
            // finitely many candidates can be absorbed by points/sequences
            let width = b - a;
            for k in 2..10_000i64 {
                let c = a + &width / int(k);
                if !self.contains(&c) {
                    return Some(c);
                }
            }
        }
        None
    }

    fn seq_subset_witness(&self, s: &GeometricSeq) -> Option<Scalar> {
        if s.includes_limit && !self.contains(&Scalar::zero()) {
            return Some(Scalar::zero());
        }
        // tail covered by an interval around 0 on the sequence's side
        let positive = s.base.is_positive();
        let tail_interval = self.intervals.iter().find(|j| {
            if positive {
                j.contains_right_of(&Scalar::zero())
            } else {
                j.contains_left_of(&Scalar::zero())
            }
        });
        if let Some(j) = tail_interval {
            for t in s.terms() {
                if j.contains(&t) {
                    return None;
                }
                if !self.contains(&t) {
                    return Some(t);
                }
            }
        }
        // Past `horizon`, only periodic meets with other sequences can cover
        // terms, so one full period of the joint pattern settles the rest.
        let meets: Vec<Meet> = self.sequences.iter().filter_map(|o| s.meet(o)).collect();
        let mut horizon = meets.iter().map(|m| m.first + 1).max().unwrap_or(0);
        let floor = self
            .points
            .iter()
            .filter(|p| p.is_positive() == positive && !p.is_zero())
            .map(|p| p.abs())
            .chain(self.intervals.iter().filter_map(|j| {
                if positive && j.hi.is_positive() {
                    Some(j.lo.clone())
                } else if !positive && j.lo.is_negative() {
                    Some(-j.hi.clone())
                } else {
                    None
                }
            }))
            .min();
        if let Some(floor) = floor {
            let past = s.terms().position(|t| t.abs() < floor).unwrap_or(0);
            horizon = horizon.max(past);
        }
        let period = meets
            .iter()
            .filter_map(|m| m.period)
            .fold(1usize, |l, p| l / gcd(l as i64, p as i64) as usize * p);
        s.terms().take(horizon + period).find(|t| !self.contains(t))
    }

    /// Closest member to `x`, ties toward the smaller value. Open endpoints
    /// are approached to within `length / 1000`.
    pub fn nearest_member(&self, x: &Scalar) -> Option<Scalar> {
        let mut best: Option<Scalar> = None;
        let mut consider = |c: Scalar| {
            best = Some(match best.take() {
                None => c,
                Some(b) => {
                    let db = scalar::distance(&b, x);
                    let dc = scalar::distance(&c, x);
                    if dc < db || (dc == db && c < b) {
                        c
                    } else {
                        b
                    }
                }
            });
        };
        for i in &self.intervals {
            consider(i.nearest_member(x));
        }
        for p in &self.points {
            consider(p.clone());
        }
        for s in &self.sequences {
            if s.includes_limit {
                consider(Scalar::zero());
            }
            let mut prev: Option<Scalar> = None;
            for (k, t) in s.terms().enumerate() {
                let d = scalar::distance(&t, x);
                if let Some(p) = &prev {
                    if scalar::distance(p, x) < d || k > 4096 {
                        break;
                    }
                }
                consider(t.clone());
                prev = Some(t);
            }
        }
        best
    }

    /// Smallest member if it exists (an open left endpoint has none; the
    /// point `length / 1000` inside is returned instead).
    pub fn representative(&self) -> Option<Scalar> {
        if let Some(i) = self.intervals.first() {
            let mid = i.midpoint();
            return self.nearest_member(&mid);
        }
        if let Some(p) = self.points.first() {
            return Some(p.clone());
        }
        self.sequences.first().map(|s| s.base.clone())
    }

    /// Every finite interval endpoint and isolated point.
    pub fn breakpoints(&self) -> Vec<Scalar> {
        let mut out: Vec<Scalar> = Vec::new();
        for i in &self.intervals {
            out.push(i.lo.clone());
            out.push(i.hi.clone());
        }
        out.extend(self.points.iter().cloned());
        out.sort();
        out.dedup();
        out
    }
}

fn merge_intervals(mut intervals: Vec<Interval>) -> Vec<Interval> {
    intervals.sort_by(|a, b| a.lo.cmp(&b.lo).then(b.lo_closed.cmp(&a.lo_closed)));
    let mut out: Vec<Interval> = Vec::with_capacity(intervals.len());
    for next in intervals {
        if let Some(cur) = out.last_mut() {
            let touches = next.lo < cur.hi || (next.lo == cur.hi && (cur.hi_closed || next.lo_closed));
            if touches {
                match next.hi.cmp(&cur.hi) {
                    Ordering::Greater => {
                        cur.hi = next.hi;
                        cur.hi_closed = next.hi_closed;
                    }
                    Ordering::Equal => cur.hi_closed |= next.hi_closed,
                    Ordering::Less => {}
                }
                if next.lo == cur.lo {
                    cur.lo_closed |= next.lo_closed;
                }
                continue;
            }
        }
        out.push(next);
    }
    out
}

fn sequence_intersection(a: &GeometricSeq, b: &GeometricSeq) -> DomainSet {
    let limit = a.includes_limit && b.includes_limit;
    let mut points = Vec::new();
    if limit {
        points.push(Scalar::zero());
    }
    let mut sequences = Vec::new();
    match a.meet(b) {
        None => {}
        Some(Meet { first, period: None }) => points.push(a.term(first)),
        Some(Meet { first, period: Some(p) }) => sequences.push(GeometricSeq {
            base: a.term(first),
            ratio: num_traits::pow(a.ratio.clone(), p),
            includes_limit: limit,
        }),
    }
    DomainSet::normalized(vec![], points, sequences)
}

/// Outcome of a completeness check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Completeness {
    pub complete: bool,
    #[serde(with = "crate::scalar::serde_scalar_opt")]
    pub missing_limit: Option<Scalar>,
}

impl fmt::Display for DomainSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("∅");
        }
        let mut parts: Vec<String> = self.intervals.iter().map(|i| i.to_string()).collect();
        if !self.points.is_empty() {
            parts.push(scalar::ScalarList(&self.points).to_string());
        }
        parts.extend(self.sequences.iter().map(|s| s.to_string()));
        f.write_str(&parts.join(" ∪ "))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ComponentRepr {
    Interval {
        #[serde(with = "serde_scalar")]
        lo: Scalar,
        #[serde(with = "serde_scalar")]
        hi: Scalar,
        lo_closed: bool,
        hi_closed: bool,
    },
    Points {
        #[serde(with = "crate::scalar::serde_scalar_vec")]
        points: Vec<Scalar>,
    },
    Geometric {
        #[serde(with = "serde_scalar")]
        base: Scalar,
        #[serde(with = "serde_scalar")]
        ratio: Scalar,
        includes_limit: bool,
    },
}

impl Serialize for DomainSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let reprs: Vec<ComponentRepr> = self
            .components()
            .into_iter()
            .map(|c| match c {
                Component::Interval(i) => ComponentRepr::Interval {
                    lo: i.lo,
                    hi: i.hi,
                    lo_closed: i.lo_closed,
                    hi_closed: i.hi_closed,
                },
                Component::Points(points) => ComponentRepr::Points { points },
                Component::Geometric(g) => ComponentRepr::Geometric {
                    base: g.base,
                    ratio: g.ratio,
                    includes_limit: g.includes_limit,
                },
            })
            .collect();
        reprs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DomainSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let reprs = Vec::<ComponentRepr>::deserialize(deserializer)?;
        let mut comps = Vec::with_capacity(reprs.len());
        for r in reprs {
            comps.push(match r {
                ComponentRepr::Interval {
                    lo,
                    hi,
                    lo_closed,
                    hi_closed,
                } => Component::Interval(Interval::new(lo, hi, lo_closed, hi_closed).map_err(D::Error::custom)?),
                ComponentRepr::Points { points } => Component::Points(points),
                ComponentRepr::Geometric {
                    base,
                    ratio,
                    includes_limit,
                } => Component::Geometric(GeometricSeq::new(base, ratio, includes_limit).map_err(D::Error::custom)?),
            });
        }
        Ok(DomainSet::from_components(comps))
    }
}

/// Default number of interior grid points per interval.
pub const DEFAULT_RESOLUTION: usize = 64;

/// How far inside an open endpoint samples are placed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum EdgeOffset {
    Absolute(#[serde(with = "serde_scalar")] Scalar),
    /// Fraction of the containing interval's length.
    Relative(#[serde(with = "serde_scalar")] Scalar),
}

impl Default for EdgeOffset {
    fn default() -> Self {
        EdgeOffset::Relative(rat(1, 1000))
    }
}

impl EdgeOffset {
    fn for_interval(&self, i: &Interval) -> Scalar {
        match self {
            EdgeOffset::Absolute(v) => v.clone(),
            EdgeOffset::Relative(frac) => i.length() * frac,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SampleProvenance {
    pub grid_resolution: usize,
    pub edge_offset: EdgeOffset,
    pub breakpoints_included: bool,
}

/// Finite, sorted, deterministic sample of a [`DomainSet`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SampleSet {
    #[serde(with = "crate::scalar::serde_scalar_vec")]
    points: Vec<Scalar>,
    provenance: SampleProvenance,
}

impl SampleSet {
    /// Wraps an explicit point list (sorted and deduplicated).
    pub fn from_points(mut points: Vec<Scalar>) -> Self {
        points.sort();
        points.dedup();
        SampleSet {
            points,
            provenance: SampleProvenance {
                grid_resolution: 0,
                edge_offset: EdgeOffset::default(),
                breakpoints_included: false,
            },
        }
    }

    pub fn points(&self) -> &[Scalar] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn provenance(&self) -> &SampleProvenance {
        &self.provenance
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Scalar> {
        self.points.iter()
    }

    pub fn merged(&self, extra: &[Scalar]) -> SampleSet {
        let mut points = self.points.clone();
        points.extend(extra.iter().cloned());
        points.sort();
        points.dedup();
        SampleSet {
            points,
            provenance: self.provenance.clone(),
        }
    }
}

/// Samples `set` with `resolution` interior grid points per interval.
pub fn sample(set: &DomainSet, resolution: usize, edge_offset: &EdgeOffset) -> Result<SampleSet, DomainError> {
    sample_with_breakpoints(set, resolution, edge_offset, &[])
}

/// Like [`sample`], additionally probing every guard endpoint of the maps
/// registered on `set`: the endpoint itself and the points one edge offset
/// to either side, whichever belong to `set`.
pub fn sample_with_breakpoints(
    set: &DomainSet,
    resolution: usize,
    edge_offset: &EdgeOffset,
    guards: &[Interval],
) -> Result<SampleSet, DomainError> {
    if resolution == 0 {
        return Err(DomainError::ZeroResolution);
    }
    match edge_offset {
        EdgeOffset::Absolute(off) => {
            if !off.is_positive() {
                return Err(DomainError::NonPositiveOffset { offset: off.clone() });
            }
            if let Some(shortest) = set.intervals.iter().map(Interval::length).min() {
                let limit = shortest / int(2);
                if off >= &limit {
                    return Err(DomainError::EdgeOffsetTooLarge {
                        offset: off.clone(),
                        limit,
                    });
                }
            }
        }
        EdgeOffset::Relative(frac) => {
            if !frac.is_positive() {
                return Err(DomainError::NonPositiveOffset { offset: frac.clone() });
            }
            if frac >= &rat(1, 2) {
                return Err(DomainError::EdgeOffsetTooLarge {
                    offset: frac.clone(),
                    limit: rat(1, 2),
                });
            }
        }
    }

    let mut points: Vec<Scalar> = Vec::new();
    let steps = int(resolution as i64 + 1);
    for i in &set.intervals {
        let width = i.length();
        for k in 1..=resolution {
            points.push(&i.lo + &width * int(k as i64) / &steps);
        }
        let off = edge_offset.for_interval(i);
        points.push(if i.lo_closed { i.lo.clone() } else { &i.lo + &off });
        points.push(if i.hi_closed { i.hi.clone() } else { &i.hi - &off });
    }
    points.extend(set.points.iter().cloned());
    for s in &set.sequences {
        points.extend(s.terms().take(resolution));
        if s.includes_limit {
            points.push(Scalar::zero());
        }
    }
    for g in guards {
        for e in [&g.lo, &g.hi] {
            let off = match edge_offset {
                EdgeOffset::Absolute(v) => v.clone(),
                EdgeOffset::Relative(frac) => match set.intervals.iter().find(|i| i.closure().contains(e)) {
                    Some(i) => i.length() * frac,
                    None if !g.is_degenerate() => g.length() * frac,
                    None => continue,
                },
            };
            for c in [e.clone(), e - &off, e + &off] {
                points.push(c);
            }
        }
    }
    points.retain(|p| set.contains(p));
    points.sort();
    points.dedup();
    Ok(SampleSet {
        points,
        provenance: SampleProvenance {
            grid_resolution: resolution,
            edge_offset: edge_offset.clone(),
            breakpoints_included: !guards.is_empty(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, zero};

    fn open(a: Scalar, b: Scalar) -> Interval {
        Interval::open(a, b).unwrap()
    }

    fn ex34_f_image() -> DomainSet {
        DomainSet::from_components(vec![
            Component::Interval(Interval::open_closed(rat(1, 3), rat(2, 3)).unwrap()),
            Component::Points(vec![rat(5, 6)]),
        ])
    }

    fn halves(includes_limit: bool) -> GeometricSeq {
        GeometricSeq::new(rat(1, 1), rat(1, 2), includes_limit).unwrap()
    }

    #[test]
    fn interval_validation() {
        assert!(Interval::open(rat(1, 2), rat(1, 2)).is_err());
        assert!(Interval::closed(rat(1, 2), rat(1, 3)).is_err());
        assert!(Interval::closed(rat(1, 2), rat(1, 2)).is_ok());
    }

    #[test]
    fn contains_examples() {
        let k = DomainSet::interval(open(rat(1, 3), rat(1, 1)));
        assert!(!k.contains(&rat(1, 3)));
        assert!(ex34_f_image().contains(&rat(2, 3)));
        assert!(!DomainSet::geometric(halves(false)).contains(&zero()));
        assert!(DomainSet::geometric(halves(true)).contains(&zero()));
        assert!(DomainSet::geometric(halves(false)).contains(&rat(1, 64)));
        assert!(!DomainSet::geometric(halves(false)).contains(&rat(3, 64)));
    }

    #[test]
    fn normalization_merges_and_absorbs() {
        let s = DomainSet::from_components(vec![
            Component::Interval(Interval::closed_open(rat(0, 1), rat(1, 2)).unwrap()),
            Component::Interval(Interval::open(rat(1, 2), rat(1, 1)).unwrap()),
            Component::Points(vec![rat(1, 2), rat(1, 4), rat(3, 1)]),
        ]);
        assert_eq!(s.intervals().len(), 1);
        assert_eq!(s.intervals()[0], Interval::closed_open(rat(0, 1), rat(1, 1)).unwrap());
        assert_eq!(s.isolated_points(), &[rat(3, 1)]);
    }

    #[test]
    fn sample_open_interval_avoids_endpoints() {
        let k = DomainSet::interval(open(rat(1, 3), rat(1, 1)));
        let s = sample(&k, 3, &EdgeOffset::Absolute(rat(1, 100))).unwrap();
        assert!(s.points().contains(&(rat(1, 3) + rat(1, 100))));
        assert!(s.points().contains(&(rat(1, 1) - rat(1, 100))));
        assert!(!s.points().contains(&rat(1, 3)));
        assert!(!s.points().contains(&rat(1, 1)));
        assert!(s.iter().all(|p| k.contains(p)));
    }

    #[test]
    fn sample_closed_interval_includes_endpoints() {
        let k = DomainSet::interval(Interval::closed(rat(1, 2), rat(2, 3)).unwrap());
        let s = sample(&k, 2, &EdgeOffset::Absolute(rat(1, 100))).unwrap();
        assert!(s.points().contains(&rat(1, 2)));
        assert!(s.points().contains(&rat(2, 3)));
    }

    #[test]
    fn sample_point_set_is_exact() {
        let k = DomainSet::points(vec![rat(1, 2), rat(2, 3), rat(5, 6)]);
        let s = sample(&k, 17, &EdgeOffset::Absolute(rat(1, 7))).unwrap();
        assert_eq!(s.points(), &[rat(1, 2), rat(2, 3), rat(5, 6)]);
    }

    #[test]
    fn sample_rejects_large_offsets() {
        let k = DomainSet::interval(Interval::closed(rat(0, 1), rat(1, 10)).unwrap());
        let err = sample(&k, 4, &EdgeOffset::Absolute(rat(1, 20))).unwrap_err();
        assert!(matches!(err, DomainError::EdgeOffsetTooLarge { .. }));
    }

    #[test]
    fn closure_examples() {
        let finite = DomainSet::points(vec![rat(1, 2), rat(2, 3)]);
        assert_eq!(finite.closure(), finite);
        let half_open = DomainSet::interval(Interval::open_closed(rat(1, 3), rat(2, 3)).unwrap());
        assert_eq!(
            half_open.closure(),
            DomainSet::interval(Interval::closed(rat(1, 3), rat(2, 3)).unwrap())
        );
        assert_eq!(
            DomainSet::geometric(halves(false)).closure(),
            DomainSet::geometric(halves(true))
        );
    }

    #[test]
    fn completeness_examples() {
        assert!(DomainSet::points(vec![rat(1, 2), rat(2, 3)]).is_complete().complete);
        let c = ex34_f_image().is_complete();
        assert!(!c.complete);
        assert_eq!(c.missing_limit, Some(rat(1, 3)));
        let t_image = GeometricSeq::new(rat(1, 4), rat(1, 2), false).unwrap();
        let c = DomainSet::geometric(t_image).is_complete();
        assert_eq!(c.missing_limit, Some(zero()));
    }

    #[test]
    fn subset_examples() {
        let tk = DomainSet::points(vec![rat(1, 2), rat(2, 3)]);
        let gk = DomainSet::points(vec![rat(1, 2), rat(2, 3), rat(5, 6)]);
        assert!(tk.is_subset_of(&ex34_f_image().intersect(&gk)));
        let t34 = DomainSet::interval(Interval::closed(rat(1, 2), rat(2, 3)).unwrap());
        assert!(t34.is_subset_of(&ex34_f_image()));
        let unit = DomainSet::interval(Interval::closed(rat(0, 1), rat(1, 1)).unwrap());
        let half_open = DomainSet::interval(Interval::closed_open(rat(0, 1), rat(1, 1)).unwrap());
        assert_eq!(unit.subset_witness(&half_open), Some(rat(1, 1)));
    }

    #[test]
    fn subset_witness_inside_gap() {
        let a = DomainSet::interval(Interval::closed(rat(0, 1), rat(3, 1)).unwrap());
        let b = DomainSet::from_components(vec![
            Component::Interval(Interval::closed(rat(0, 1), rat(1, 1)).unwrap()),
            Component::Interval(Interval::closed(rat(2, 1), rat(3, 1)).unwrap()),
            Component::Points(vec![rat(3, 2)]),
        ]);
        let w = a.subset_witness(&b).unwrap();
        assert!(a.contains(&w) && !b.contains(&w));
    }

    #[test]
    fn geometric_inclusions() {
        let x = DomainSet::from_components(vec![Component::Geometric(halves(true))]);
        let quarter_tail = DomainSet::geometric(GeometricSeq::new(rat(1, 4), rat(1, 2), false).unwrap());
        assert!(quarter_tail.is_subset_of(&x));
        let fourths = DomainSet::geometric(GeometricSeq::new(rat(1, 1), rat(1, 4), false).unwrap());
        assert!(fourths.is_subset_of(&x));
        assert!(!x.is_subset_of(&fourths));
        let thirds = DomainSet::geometric(GeometricSeq::new(rat(1, 1), rat(1, 3), false).unwrap());
        assert_eq!(thirds.subset_witness(&x), Some(rat(1, 3)));
        let around_zero = DomainSet::interval(Interval::open(rat(-1, 1), rat(1, 10)).unwrap());
        let w = x.subset_witness(&around_zero).unwrap();
        assert!(w == rat(1, 1) || w == rat(1, 2) || w == rat(1, 4) || w == rat(1, 8));
    }

    #[test]
    fn geometric_interval_intersection() {
        let x = DomainSet::geometric(halves(true));
        let cut = x.intersect_interval(&Interval::open_closed(rat(0, 1), rat(1, 3)).unwrap());
        assert!(cut.contains(&rat(1, 4)));
        assert!(!cut.contains(&rat(1, 2)));
        assert!(!cut.contains(&zero()));
        let band = x.intersect_interval(&Interval::closed(rat(1, 5), rat(3, 4)).unwrap());
        assert_eq!(band, DomainSet::points(vec![rat(1, 4), rat(1, 2)]));
    }

    #[test]
    fn serde_round_trip() {
        let s = ex34_f_image().union(&DomainSet::geometric(halves(false)));
        let json = serde_json::to_string(&s).unwrap();
        let back: DomainSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        let k: DomainSet =
            serde_json::from_str(r#"[{"lo":"1/3","hi":"1","lo_closed":false,"hi_closed":false}]"#).unwrap();
        assert_eq!(k, DomainSet::interval(open(rat(1, 3), rat(1, 1))));
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(ex34_f_image().to_string(), "(1/3, 2/3] ∪ {5/6}");
        assert_eq!(DomainSet::empty().to_string(), "∅");
    }

    #[test]
    fn sequence_meets_match_a_term_scan() {
        let bases = [rat(1, 1), rat(3, 4), rat(1, 8), rat(9, 2), rat(2, 27), rat(-1, 2)];
        let ratios = [rat(1, 2), rat(1, 4), rat(1, 8), rat(1, 3), rat(4, 9), rat(2, 3)];
        for ba in &bases {
            for ra in &ratios {
                for bb in &bases {
                    for rb in &ratios {
                        let a = GeometricSeq::new(ba.clone(), ra.clone(), false).unwrap();
                        let b = GeometricSeq::new(bb.clone(), rb.clone(), false).unwrap();
                        let hits: Vec<usize> = (0..24).filter(|&k| b.contains(&a.term(k))).collect();
                        let predicted: Vec<usize> = match a.meet(&b) {
                            None => vec![],
                            Some(Meet { first, period: None }) => vec![first],
                            Some(Meet { first, period: Some(p) }) => {
                                (first..).step_by(p).take_while(|k| *k < 24).collect()
                            }
                        };
                        let predicted: Vec<usize> = predicted.into_iter().filter(|k| *k < 24).collect();
                        assert_eq!(hits, predicted, "{a} vs {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn interleaved_sequences_cover_a_finer_one() {
        let evens = GeometricSeq::new(rat(1, 1), rat(1, 4), false).unwrap();
        let odds = GeometricSeq::new(rat(1, 2), rat(1, 4), false).unwrap();
        let both = DomainSet::geometric(evens).union(&DomainSet::geometric(odds.clone()));
        let halves = DomainSet::geometric(halves(false));
        assert!(halves.is_subset_of(&both));
        assert_eq!(
            halves.intersect(&DomainSet::geometric(odds.clone())),
            DomainSet::geometric(odds)
        );
        let sixths = DomainSet::geometric(GeometricSeq::new(rat(1, 1), rat(1, 6), false).unwrap());
        assert_eq!(halves.intersect(&sixths), DomainSet::points([rat(1, 1)]));
    }
}
