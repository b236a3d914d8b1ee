//! Exact solution of polynomial equations of degree at most two, and the
//! [`RootSet`] type that holds fixed-point and coincidence sets.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::domain::{DomainSet, Interval};
use crate::scalar::{self, int, rat, Scalar};

/// An irrational root of a monic quadratic `x^2 + p x + q`, identified by
/// its branch and carried with a rational isolating interval.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadraticRoot {
    p: Scalar,
    q: Scalar,
    upper: bool,
    lo: Scalar,
    hi: Scalar,
}

/// Isolating intervals are bisected until narrower than this.
pub fn isolation_width() -> Scalar {
    rat(1, 1_000_000_000_000)
}

impl QuadraticRoot {
    fn new(p: Scalar, q: Scalar, upper: bool) -> Self {
        let vertex = -&p / int(2);
        let disc = &p * &p - int(4) * &q;
        let reach = (&disc + Scalar::one()) / int(2);
        let (mut lo, mut hi) = if upper {
            (vertex.clone(), &vertex + reach)
        } else {
            (&vertex - reach, vertex.clone())
        };
        let eval = |x: &Scalar| x * x + &p * x + &q;
        // on the chosen side of the vertex the polynomial is monotone, so the
        // sign at `lo` tells which half keeps the root
        let lo_negative = eval(&lo).is_negative();
        let width = isolation_width();
        while &hi - &lo >= width {
            let mid = scalar::midpoint(&lo, &hi);
            if eval(&mid).is_negative() == lo_negative {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        QuadraticRoot { p, q, upper, lo, hi }
    }

    /// Coefficients `(p, q)` of the monic polynomial `x^2 + p x + q`.
    pub fn polynomial(&self) -> (&Scalar, &Scalar) {
        (&self.p, &self.q)
    }

    pub fn is_upper_branch(&self) -> bool {
        self.upper
    }

    /// Rational isolating interval `[lo, hi]` containing the root.
    pub fn bounds(&self) -> (&Scalar, &Scalar) {
        (&self.lo, &self.hi)
    }

    fn eval(&self, x: &Scalar) -> Scalar {
        x * x + &self.p * x + &self.q
    }

    /// Exact comparison of the root with a rational.
    pub fn cmp_rational(&self, x: &Scalar) -> Ordering {
        if x < &self.lo {
            return Ordering::Greater;
        }
        if x > &self.hi {
            return Ordering::Less;
        }
        // the root is irrational, so it never equals x; decide the side by
        // comparing polynomial signs with the lower end
        let lo_sign = self.eval(&self.lo).is_negative();
        if self.eval(x).is_negative() == lo_sign {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }

    pub fn in_interval(&self, i: &Interval) -> bool {
        self.cmp_rational(i.lo()) == Ordering::Greater && self.cmp_rational(i.hi()) == Ordering::Less
    }

    /// Approximate value, for display only.
    pub fn approx(&self) -> f64 {
        use num_traits::ToPrimitive;
        scalar::midpoint(&self.lo, &self.hi).to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for QuadraticRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "root of x^2 + ({})x + ({}) in [{}, {}] (~{:.12})",
            self.p,
            self.q,
            self.lo,
            self.hi,
            self.approx()
        )
    }
}

impl Serialize for QuadraticRoot {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("QuadraticRoot", 4)?;
        s.serialize_field("p", &self.p.to_string())?;
        s.serialize_field("q", &self.q.to_string())?;
        s.serialize_field("upper_branch", &self.upper)?;
        s.serialize_field("bounds", &[self.lo.to_string(), self.hi.to_string()])?;
        s.end()
    }
}

/// Real solutions of `a x^2 + b x + c = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solutions {
    /// The polynomial is identically zero.
    Everything,
    Finite {
        rational: Vec<Scalar>,
        irrational: Vec<QuadraticRoot>,
    },
}

pub fn solve_quadratic(a: &Scalar, b: &Scalar, c: &Scalar) -> Solutions {
    if a.is_zero() {
        if b.is_zero() {
            return if c.is_zero() {
                Solutions::Everything
            } else {
                Solutions::Finite {
                    rational: vec![],
                    irrational: vec![],
                }
            };
        }
        return Solutions::Finite {
            rational: vec![-c / b],
            irrational: vec![],
        };
    }
    let p = b / a;
    let q = c / a;
    let disc = &p * &p - int(4) * &q;
    if disc.is_negative() {
        return Solutions::Finite {
            rational: vec![],
            irrational: vec![],
        };
    }
    match scalar::rational_sqrt(&disc) {
        Some(root) => {
            let mut rational = vec![(-&p - &root) / int(2), (-&p + &root) / int(2)];
            rational.dedup();
            Solutions::Finite {
                rational,
                irrational: vec![],
            }
        }
        None => Solutions::Finite {
            rational: vec![],
            irrational: vec![
                QuadraticRoot::new(p.clone(), q.clone(), false),
                QuadraticRoot::new(p, q, true),
            ],
        },
    }
}

/// A set of exact solutions: a [`DomainSet`] of rational points and
/// continuum components, plus isolated irrational quadratic roots.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RootSet {
    exact: DomainSet,
    inexact: Vec<QuadraticRoot>,
}

impl RootSet {
    pub fn empty() -> Self {
        RootSet::default()
    }

    pub fn from_set(exact: DomainSet) -> Self {
        RootSet {
            exact,
            inexact: Vec::new(),
        }
    }

    pub fn new(exact: DomainSet, inexact: Vec<QuadraticRoot>) -> Self {
        let mut inexact: Vec<QuadraticRoot> = inexact.into_iter().filter(|r| !Self::covers(&exact, r)).collect();
        inexact.sort_by(|a, b| a.lo.cmp(&b.lo));
        inexact.dedup();
        RootSet { exact, inexact }
    }

    fn covers(set: &DomainSet, r: &QuadraticRoot) -> bool {
        set.intervals().iter().any(|i| r.in_interval(i))
    }

    pub fn exact(&self) -> &DomainSet {
        &self.exact
    }

    pub fn inexact(&self) -> &[QuadraticRoot] {
        &self.inexact
    }

    pub fn is_empty(&self) -> bool {
        self.exact.is_empty() && self.inexact.is_empty()
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        self.exact.contains(x)
    }

    /// The single rational member, if the set is exactly one rational point.
    pub fn as_singleton(&self) -> Option<&Scalar> {
        if self.inexact.is_empty() {
            self.exact.as_singleton()
        } else {
            None
        }
    }

    pub fn union(&self, other: &RootSet) -> RootSet {
        let mut inexact = self.inexact.clone();
        inexact.extend(other.inexact.iter().cloned());
        RootSet::new(self.exact.union(&other.exact), inexact)
    }

    pub fn intersect(&self, other: &RootSet) -> RootSet {
        let exact = self.exact.intersect(&other.exact);
        let mut inexact: Vec<QuadraticRoot> = self
            .inexact
            .iter()
            .filter(|r| Self::covers(&other.exact, r) || other.inexact.contains(r))
            .cloned()
            .collect();
        inexact.extend(other.inexact.iter().filter(|r| Self::covers(&self.exact, r)).cloned());
        RootSet::new(exact, inexact)
    }

    pub fn restrict(&self, region: &DomainSet) -> RootSet {
        let inexact = self
            .inexact
            .iter()
            .filter(|r| Self::covers(region, r))
            .cloned()
            .collect();
        RootSet::new(self.exact.intersect(region), inexact)
    }

    pub fn is_subset_of(&self, other: &RootSet) -> bool {
        self.exact.is_subset_of(&other.exact)
            && self
                .inexact
                .iter()
                .all(|r| Self::covers(&other.exact, r) || other.inexact.contains(r))
    }

    /// Representative points: every isolated rational point, and for each
    /// continuum component its two ends moved inward by `length / 1000` and
    /// its midpoint.
    pub fn probe_points(&self) -> Vec<Scalar> {
        let mut out: Vec<Scalar> = self.exact.isolated_points().to_vec();
        for i in self.exact.intervals() {
            let inset = i.length() / int(1000);
            let lo = if i.lo_closed() { i.lo().clone() } else { i.lo() + &inset };
            let hi = if i.hi_closed() { i.hi().clone() } else { i.hi() - &inset };
            out.push(lo);
            out.push(i.midpoint());
            out.push(hi);
        }
        for s in self.exact.sequences() {
            out.extend(s.terms().take(3));
            if s.includes_limit() {
                out.push(Scalar::zero());
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

impl fmt::Display for RootSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inexact.is_empty() {
            return write!(f, "{}", self.exact);
        }
        if !self.exact.is_empty() {
            write!(f, "{} ∪ ", self.exact)?;
        }
        let parts: Vec<String> = self.inexact.iter().map(|r| r.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

impl Serialize for RootSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("RootSet", 3)?;
        s.serialize_field("exact", &self.exact)?;
        s.serialize_field("inexact", &self.inexact)?;
        s.serialize_field("display", &self.to_string())?;
        s.end()
    }
}
