//! Total piecewise self-maps of a [`DomainSet`].

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::domain::{DomainSet, Interval};
use crate::error::MapError;
use crate::mobius::Form;
use crate::roots::{solve_quadratic, RootSet, Solutions};
use crate::scalar::{serde_scalar, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapPiece {
    pub guard: Interval,
    pub form: Form,
}

impl MapPiece {
    pub fn new(guard: Interval, form: Form) -> Self {
        MapPiece { guard, form }
    }
}

impl fmt::Display for MapPiece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on {}", self.form, self.guard)
    }
}

/// A self-map of `domain` given by guarded pieces. Guards partition the
/// domain exactly and every value lands back in the domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MapRepr")]
pub struct PiecewiseMap {
    domain: DomainSet,
    pieces: Vec<MapPiece>,
}

#[derive(Deserialize)]
struct MapRepr {
    domain: DomainSet,
    pieces: Vec<MapPiece>,
}

impl TryFrom<MapRepr> for PiecewiseMap {
    type Error = MapError;
    fn try_from(r: MapRepr) -> Result<Self, MapError> {
        PiecewiseMap::new(r.domain, r.pieces)
    }
}

impl PiecewiseMap {
    /// Validates poles, totality, disjointness and the self-map property.
    pub fn new(domain: DomainSet, pieces: Vec<MapPiece>) -> Result<Self, MapError> {
        for p in &pieces {
            if let Some(pole) = p.form.pole() {
                if p.guard.closure().contains(&pole) {
                    return Err(MapError::PoleInGuard {
                        pole,
                        guard: p.guard.to_string(),
                    });
                }
            }
        }
        let cover = pieces.iter().fold(DomainSet::empty(), |acc, p| {
            acc.union(&DomainSet::interval(p.guard.clone()))
        });
        if let Some(witness) = domain.subset_witness(&cover) {
            return Err(MapError::Gap { witness });
        }
        for (i, p) in pieces.iter().enumerate() {
            for q in &pieces[i + 1..] {
                if let Some(both) = p.guard.intersect(&q.guard) {
                    let shared = domain.intersect_interval(&both);
                    if let Some(witness) = shared.representative() {
                        return Err(MapError::Overlap { witness });
                    }
                }
            }
        }
        let map = PiecewiseMap { domain, pieces };
        for (idx, p) in map.pieces.iter().enumerate() {
            let region = map.piece_region(idx);
            let img = p.form.image_set(&region)?;
            if let Some(value) = img.subset_witness(&map.domain) {
                let witness = map.preimage_within(idx, &value).unwrap_or_else(|| p.guard.midpoint());
                return Err(MapError::ImageEscapesDomain { witness, value });
            }
        }
        Ok(map)
    }

    pub fn identity(domain: DomainSet) -> Result<Self, MapError> {
        let hull = hull(&domain).ok_or_else(|| MapError::Unrepresentable("empty domain".into()))?;
        Self::new(domain, vec![MapPiece::new(hull, Form::identity())])
    }

    pub fn constant(domain: DomainSet, value: Scalar) -> Result<Self, MapError> {
        let hull = hull(&domain).ok_or_else(|| MapError::Unrepresentable("empty domain".into()))?;
        Self::new(domain, vec![MapPiece::new(hull, Form::constant(value))])
    }

    pub fn domain(&self) -> &DomainSet {
        &self.domain
    }

    pub fn pieces(&self) -> &[MapPiece] {
        &self.pieces
    }

    pub fn guards(&self) -> Vec<Interval> {
        self.pieces.iter().map(|p| p.guard.clone()).collect()
    }

    fn piece_region(&self, idx: usize) -> DomainSet {
        self.domain.intersect_interval(&self.pieces[idx].guard)
    }

    /// Index of the piece whose guard holds at `x`.
    pub fn piece_index(&self, x: &Scalar) -> Result<usize, MapError> {
        if !self.domain.contains(x) {
            return Err(MapError::OutOfDomain { x: x.clone() });
        }
        self.pieces
            .iter()
            .position(|p| p.guard.contains(x))
            .ok_or_else(|| MapError::OutOfDomain { x: x.clone() })
    }

    pub fn evaluate(&self, x: &Scalar) -> Result<Scalar, MapError> {
        let idx = self.piece_index(x)?;
        Ok(self.pieces[idx]
            .form
            .eval(x)
            .expect("poles are excluded from guards at construction"))
    }

    /// Exact image of `s ∩ domain`.
    pub fn image(&self, s: &DomainSet) -> Result<DomainSet, MapError> {
        let mut out = DomainSet::empty();
        for p in &self.pieces {
            let part = s.intersect(&self.domain).intersect_interval(&p.guard);
            out = out.union(&p.form.image_set(&part)?);
        }
        Ok(out)
    }

    pub fn image_of_domain(&self) -> Result<DomainSet, MapError> {
        self.image(&self.domain)
    }

    fn preimage_within(&self, idx: usize, target: &Scalar) -> Option<Scalar> {
        let region = self.piece_region(idx);
        match &self.pieces[idx].form {
            Form::Constant { c } => (c == target).then(|| region.representative()).flatten(),
            form => {
                let x = form.inverse()?.eval(target)?;
                region.contains(&x).then_some(x)
            }
        }
    }

    /// Every `x` in the domain with `m(x) = target`, exactly.
    pub fn preimage_set(&self, target: &Scalar) -> DomainSet {
        let mut out = DomainSet::empty();
        for (idx, p) in self.pieces.iter().enumerate() {
            match &p.form {
                Form::Constant { c } => {
                    if c == target {
                        out = out.union(&self.piece_region(idx));
                    }
                }
                form => {
                    if let Some(x) = form.inverse().and_then(|inv| inv.eval(target)) {
                        if self.domain.contains(&x) && p.guard.contains(&x) {
                            out = out.union(&DomainSet::points([x]));
                        }
                    }
                }
            }
        }
        out
    }

    /// `outer ∘ inner`, with each result guard the exact preimage of one
    /// outer guard under one inner piece.
    pub fn compose(outer: &PiecewiseMap, inner: &PiecewiseMap) -> Result<PiecewiseMap, MapError> {
        let img = inner.image_of_domain()?;
        if let Some(value) = img.subset_witness(&outer.domain) {
            let witness = inner
                .preimage_set(&value)
                .representative()
                .unwrap_or_else(|| value.clone());
            return Err(MapError::ImageEscapesDomain { witness, value });
        }
        let mut pieces = Vec::new();
        for p in &inner.pieces {
            for q in &outer.pieces {
                let Some(guard) = p.form.preimage_interval(&p.guard, &q.guard) else {
                    continue;
                };
                let Some(guard) = guard.intersect(&p.guard) else {
                    continue;
                };
                if inner.domain.intersect_interval(&guard).is_empty() {
                    continue;
                }
                pieces.push(MapPiece::new(guard, q.form.compose(&p.form)?));
            }
        }
        PiecewiseMap::new(inner.domain.clone(), merge_pieces(pieces))
    }

    /// `m` composed with itself `power` times.
    pub fn iterate(&self, power: usize) -> Result<PiecewiseMap, MapError> {
        if power == 0 {
            return Err(MapError::ZeroPower);
        }
        let mut acc = self.clone();
        for _ in 1..power {
            acc = PiecewiseMap::compose(self, &acc)?;
        }
        Ok(acc)
    }

    /// `F(m) = {x : m(x) = x}`.
    pub fn fixed_points(&self) -> RootSet {
        let id = Form::identity();
        let mut out = RootSet::empty();
        for (idx, p) in self.pieces.iter().enumerate() {
            out = out.union(&solve_equal(&p.form, &id, &self.piece_region(idx)));
        }
        out
    }

    /// `C(m1, m2) = {x : m1(x) = m2(x)}` over the shared domain.
    pub fn coincidence_points(m1: &PiecewiseMap, m2: &PiecewiseMap) -> RootSet {
        let region = m1.domain.intersect(&m2.domain);
        Self::coincidence_points_on(m1, m2, &region)
    }

    /// Coincidence points restricted to `region`.
    pub fn coincidence_points_on(m1: &PiecewiseMap, m2: &PiecewiseMap, region: &DomainSet) -> RootSet {
        let region = region.intersect(&m1.domain).intersect(&m2.domain);
        let mut out = RootSet::empty();
        for p in &m1.pieces {
            for q in &m2.pieces {
                let Some(both) = p.guard.intersect(&q.guard) else {
                    continue;
                };
                let part = region.intersect_interval(&both);
                if part.is_empty() {
                    continue;
                }
                out = out.union(&solve_equal(&p.form, &q.form, &part));
            }
        }
        out
    }

    /// Every finite guard endpoint.
    pub fn breakpoints(&self) -> Vec<Scalar> {
        let mut out: Vec<Scalar> = self
            .pieces
            .iter()
            .flat_map(|p| [p.guard.lo().clone(), p.guard.hi().clone()])
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

impl fmt::Display for PiecewiseMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pieces.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Solutions of `lhs(x) = rhs(x)` inside `region` (a subset of a pole-free
/// guard of both forms).
fn solve_equal(lhs: &Form, rhs: &Form, region: &DomainSet) -> RootSet {
    let [a, b, c] = lhs.difference_polynomial(rhs);
    match solve_quadratic(&a, &b, &c) {
        Solutions::Everything => RootSet::from_set(region.clone()),
        Solutions::Finite { rational, irrational } => {
            let pts: Vec<Scalar> = rational.into_iter().filter(|x| region.contains(x)).collect();
            let inexact = irrational
                .into_iter()
                .filter(|r| region.intervals().iter().any(|i| r.in_interval(i)))
                .collect();
            RootSet::new(DomainSet::points(pts), inexact)
        }
    }
}

fn hull(domain: &DomainSet) -> Option<Interval> {
    let pts = domain.breakpoints();
    let mut lo = pts.first().cloned();
    let mut hi = pts.last().cloned();
    for s in domain.sequences() {
        for v in [s.base().clone(), Scalar::zero()] {
            lo = Some(lo.map_or(v.clone(), |l| l.min(v.clone())));
            hi = Some(hi.map_or(v.clone(), |h| h.max(v.clone())));
        }
    }
    Interval::closed(lo?, hi?).ok()
}

/// Sorts pieces by guard and fuses neighbours that share a form and touch.
fn merge_pieces(mut pieces: Vec<MapPiece>) -> Vec<MapPiece> {
    pieces.sort_by(|a, b| {
        a.guard
            .lo()
            .cmp(b.guard.lo())
            .then(b.guard.lo_closed().cmp(&a.guard.lo_closed()))
    });
    let mut out: Vec<MapPiece> = Vec::with_capacity(pieces.len());
    for p in pieces {
        if let Some(last) = out.last_mut() {
            let touches = last.guard.hi() == p.guard.lo() && (last.guard.hi_closed() != p.guard.lo_closed());
            if touches && last.form == p.form {
                last.guard = Interval::new(
                    last.guard.lo().clone(),
                    p.guard.hi().clone(),
                    last.guard.lo_closed(),
                    p.guard.hi_closed(),
                )
                .expect("adjacent guards");
                continue;
            }
        }
        out.push(p);
    }
    out
}

/// A scalar that may depend on a positive index `n` through
/// `(a/n + b) / (c/n + d)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IndexedScalar {
    Fixed(#[serde(with = "serde_scalar")] Scalar),
    InverseN {
        #[serde(with = "serde_scalar")]
        a: Scalar,
        #[serde(with = "serde_scalar")]
        b: Scalar,
        #[serde(with = "serde_scalar")]
        c: Scalar,
        #[serde(with = "serde_scalar")]
        d: Scalar,
    },
}

impl IndexedScalar {
    pub fn at(&self, n: usize) -> Result<Scalar, MapError> {
        match self {
            IndexedScalar::Fixed(v) => Ok(v.clone()),
            IndexedScalar::InverseN { a, b, c, d } => {
                let s = Scalar::one() / Scalar::from_integer((n as i64).into());
                let den = c * &s + d;
                if den.is_zero() {
                    return Err(MapError::Unrepresentable(format!(
                        "family coefficient has a pole at n = {n}"
                    )));
                }
                Ok((a * &s + b) / den)
            }
        }
    }
}

/// Piece form whose coefficients may depend on the family index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum IndexedForm {
    Constant {
        c: IndexedScalar,
    },
    Mobius {
        a: IndexedScalar,
        b: IndexedScalar,
        c: IndexedScalar,
        d: IndexedScalar,
    },
}

impl IndexedForm {
    pub fn at(&self, n: usize) -> Result<Form, MapError> {
        match self {
            IndexedForm::Constant { c } => Ok(Form::constant(c.at(n)?)),
            IndexedForm::Mobius { a, b, c, d } => Form::mobius(a.at(n)?, b.at(n)?, c.at(n)?, d.at(n)?),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexedPiece {
    pub guard: Interval,
    pub form: IndexedForm,
}

type Generator = dyn Fn(usize) -> Result<PiecewiseMap, MapError> + Send + Sync;

/// An indexed family `{T_n}` of maps on a shared domain, materialised on
/// demand and cached.
#[derive(Clone)]
pub struct MapFamily {
    generator: Arc<Generator>,
    cache: Arc<RwLock<BTreeMap<usize, Arc<PiecewiseMap>>>>,
}

impl fmt::Debug for MapFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cached: Vec<usize> = self
            .cache
            .read()
            .map(|c| c.keys().copied().collect())
            .unwrap_or_default();
        f.debug_struct("MapFamily").field("materialized", &cached).finish()
    }
}

impl MapFamily {
    pub fn new<F>(generator: F) -> Self
    where
        F: Fn(usize) -> Result<PiecewiseMap, MapError> + Send + Sync + 'static,
    {
        MapFamily {
            generator: Arc::new(generator),
            cache: Arc::new(RwLock::new(BTreeMap::new())),
        }
    }

    /// Family whose `n`-th member instantiates indexed pieces at `n`.
    pub fn from_pieces(domain: DomainSet, pieces: Vec<IndexedPiece>) -> Self {
        MapFamily::new(move |n| {
            let concrete = pieces
                .iter()
                .map(|p| Ok(MapPiece::new(p.guard.clone(), p.form.at(n)?)))
                .collect::<Result<Vec<_>, MapError>>()?;
            PiecewiseMap::new(domain.clone(), concrete)
        })
    }

    /// The member with index `n >= 1`.
    pub fn member(&self, n: usize) -> Result<Arc<PiecewiseMap>, MapError> {
        if n == 0 {
            return Err(MapError::Unrepresentable("family indices start at 1".into()));
        }
        if let Some(m) = self.cache.read().expect("family cache poisoned").get(&n) {
            return Ok(m.clone());
        }
        let built = Arc::new((self.generator)(n)?);
        self.cache
            .write()
            .expect("family cache poisoned")
            .insert(n, built.clone());
        Ok(built)
    }
}
