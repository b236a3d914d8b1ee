//! Constant and Möbius piece forms.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::domain::{DomainSet, GeometricSeq, Interval};
use crate::error::MapError;
use crate::scalar::{serde_scalar, Scalar};

/// Value rule of a single piece: a constant, or `(a x + b) / (c x + d)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Form {
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
}

/// 2x2 matrix `[[a, b], [c, d]]` acting projectively.
type Matrix = [Scalar; 4];

impl Form {
    pub fn constant(c: Scalar) -> Form {
        Form::Constant { c }
    }

    /// Builds `(a x + b) / (c x + d)`, collapsing to a constant when the
    /// determinant vanishes.
    pub fn mobius(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Result<Form, MapError> {
        Self::from_matrix([a, b, c, d])
    }

    /// `slope * x + intercept`.
    pub fn affine(slope: Scalar, intercept: Scalar) -> Form {
        if slope.is_zero() {
            return Form::Constant { c: intercept };
        }
        Form::Mobius {
            a: slope,
            b: intercept,
            c: Scalar::zero(),
            d: Scalar::one(),
        }
    }

    pub fn identity() -> Form {
        Form::affine(Scalar::one(), Scalar::zero())
    }

    fn from_matrix(m: Matrix) -> Result<Form, MapError> {
        let [a, b, c, d] = m;
        if c.is_zero() && d.is_zero() {
            return Err(MapError::Unrepresentable("Möbius form with zero denominator".into()));
        }
        let det = &a * &d - &b * &c;
        if det.is_zero() {
            // rows are proportional: the value is a/c or b/d
            let value = if c.is_zero() { &b / &d } else { &a / &c };
            return Ok(Form::Constant { c: value });
        }
        let scale = if d.is_zero() { c.clone() } else { d.clone() };
        Ok(Form::Mobius {
            a: a / &scale,
            b: b / &scale,
            c: c / &scale,
            d: d / &scale,
        })
    }

    fn matrix(&self) -> Matrix {
        match self {
            Form::Constant { c } => [Scalar::zero(), c.clone(), Scalar::zero(), Scalar::one()],
            Form::Mobius { a, b, c, d } => [a.clone(), b.clone(), c.clone(), d.clone()],
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Form::Constant { .. })
    }

    pub fn is_identity(&self) -> bool {
        match self {
            Form::Mobius { a, b, c, d } => b.is_zero() && c.is_zero() && a == d,
            Form::Constant { .. } => false,
        }
    }

    pub fn pole(&self) -> Option<Scalar> {
        match self {
            Form::Mobius { c, d, .. } if !c.is_zero() => Some(-d / c),
            _ => None,
        }
    }

    /// Exact value; `None` at the pole.
    pub fn eval(&self, x: &Scalar) -> Option<Scalar> {
        match self {
            Form::Constant { c } => Some(c.clone()),
            Form::Mobius { a, b, c, d } => {
                let den = c * x + d;
                if den.is_zero() {
                    None
                } else {
                    Some((a * x + b) / den)
                }
            }
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Form) -> Result<Form, MapError> {
        let [a, b, c, d] = self.matrix();
        let [e, f, g, h] = inner.matrix();
        Self::from_matrix([
            &a * &e + &b * &g,
            &a * &f + &b * &h,
            &c * &e + &d * &g,
            &c * &f + &d * &h,
        ])
    }

    /// Inverse of a non-constant form.
    pub fn inverse(&self) -> Option<Form> {
        match self {
            Form::Constant { .. } => None,
            Form::Mobius { a, b, c, d } => Self::from_matrix([d.clone(), -b.clone(), -c.clone(), a.clone()]).ok(),
        }
    }

    /// Coefficients `(x^2, x, 1)` of the polynomial whose zeros are the
    /// solutions of `self(x) = other(x)` away from poles.
    pub fn difference_polynomial(&self, other: &Form) -> [Scalar; 3] {
        let [a1, b1, c1, d1] = self.matrix();
        let [a2, b2, c2, d2] = other.matrix();
        [
            &a1 * &c2 - &a2 * &c1,
            &a1 * &d2 + &b1 * &c2 - &a2 * &d1 - &b2 * &c1,
            &b1 * &d2 - &b2 * &d1,
        ]
    }

    /// Sign of the derivative on any pole-free interval: `1`, `-1` or `0`.
    pub fn monotonicity(&self) -> i8 {
        match self {
            Form::Constant { .. } => 0,
            Form::Mobius { a, b, c, d } => {
                let det = a * d - b * c;
                if det.is_positive() {
                    1
                } else {
                    -1
                }
            }
        }
    }

    /// Image of an interval that keeps the pole outside its closure.
    pub fn image_interval(&self, i: &Interval) -> Interval {
        match self {
            Form::Constant { c } => Interval::point(c.clone()),
            Form::Mobius { .. } => {
                let lo = self.eval(i.lo()).expect("pole outside guard");
                let hi = self.eval(i.hi()).expect("pole outside guard");
                if self.monotonicity() > 0 {
                    Interval::new(lo, hi, i.lo_closed(), i.hi_closed()).expect("monotone image")
                } else {
                    Interval::new(hi, lo, i.hi_closed(), i.lo_closed()).expect("monotone image")
                }
            }
        }
    }

    /// Image of an arbitrary subset of a pole-free guard.
    pub fn image_set(&self, s: &DomainSet) -> Result<DomainSet, MapError> {
        if s.is_empty() {
            return Ok(DomainSet::empty());
        }
        if let Form::Constant { c } = self {
            return Ok(DomainSet::points([c.clone()]));
        }
        let mut out = DomainSet::empty();
        for i in s.intervals() {
            out = out.union(&DomainSet::interval(self.image_interval(i)));
        }
        let pts: Vec<Scalar> = s.isolated_points().iter().filter_map(|p| self.eval(p)).collect();
        out = out.union(&DomainSet::points(pts));
        for seq in s.sequences() {
            let (scale, shift) = match self {
                Form::Mobius { a, b, c, d } if c.is_zero() => (a / d, b / d),
                _ => (Scalar::zero(), Scalar::one()),
            };
            if !shift.is_zero() {
                return Err(MapError::Unrepresentable(format!(
                    "image of {seq} under {self} is not a geometric sequence"
                )));
            }
            let mapped = GeometricSeq::new(seq.base() * &scale, seq.ratio().clone(), seq.includes_limit())?;
            out = out.union(&DomainSet::geometric(mapped));
        }
        Ok(out)
    }

    /// `{x in guard : self(x) in target}` as an interval, for a pole-free
    /// guard and an interval target.
    pub fn preimage_interval(&self, guard: &Interval, target: &Interval) -> Option<Interval> {
        match self {
            Form::Constant { c } => target.contains(c).then(|| guard.clone()),
            Form::Mobius { .. } => {
                let reachable = self.image_interval(guard).intersect(target)?;
                let inv = self.inverse().expect("non-constant");
                Some(inv.image_interval(&reachable))
            }
        }
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Form::Constant { c } => write!(f, "{c}"),
            Form::Mobius { a, b, c, d } => {
                if self.is_identity() {
                    return f.write_str("x");
                }
                if c.is_zero() {
                    let slope = a / d;
                    let icpt = b / d;
                    if icpt.is_zero() {
                        write!(f, "({slope})x")
                    } else {
                        write!(f, "({slope})x + ({icpt})")
                    }
                } else {
                    write!(f, "(({a})x + ({b})) / (({c})x + ({d}))")
                }
            }
        }
    }
}
