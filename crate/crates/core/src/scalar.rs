//! Exact rational scalars.
//!
//! Every point, distance and control-function value in the engine is a
//! [`Scalar`]: an arbitrary-precision rational kept in lowest terms with a
//! positive denominator. There is no floating point anywhere in the core.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serializer};

use crate::error::ParseScalarError;

/// Exact rational number.
pub type Scalar = BigRational;

/// Builds `numer/denom`. Panics on a zero denominator.
pub fn rat(numer: i64, denom: i64) -> Scalar {
    Scalar::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(value))
}

pub fn zero() -> Scalar {
    Scalar::zero()
}

pub fn one() -> Scalar {
    Scalar::one()
}

pub fn half() -> Scalar {
    rat(1, 2)
}

/// The usual metric on the real line.
pub fn distance(x: &Scalar, y: &Scalar) -> Scalar {
    (x - y).abs()
}

pub fn midpoint(a: &Scalar, b: &Scalar) -> Scalar {
    (a + b) / int(2)
}

/// Parses a decimal-free rational string: `"p/q"` or `"p"`.
///
/// Decimal points, exponents and whitespace inside the literal are
/// rejected so that no precision can be lost at the boundary.
pub fn parse_scalar(text: &str) -> Result<Scalar, ParseScalarError> {
    let trimmed = text.trim();
    let bad = || ParseScalarError {
        input: text.to_string(),
    };
    if trimmed.is_empty() {
        return Err(bad());
    }
    let (numer, denom) = match trimmed.split_once('/') {
        Some((n, d)) => (n, d),
        None => (trimmed, "1"),
    };
    let parse_int = |s: &str, allow_sign: bool| -> Option<BigInt> {
        let digits = if allow_sign {
            s.strip_prefix('-').or_else(|| s.strip_prefix('+')).unwrap_or(s)
        } else {
            s
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        s.parse::<BigInt>().ok()
    };
    let n = parse_int(numer, true).ok_or_else(bad)?;
    let d = parse_int(denom, false).ok_or_else(bad)?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Scalar::new(n, d))
}

/// Lowest-terms rendering: `"p/q"`, or `"p"` for integers.
pub fn format_scalar(value: &Scalar) -> String {
    value.to_string()
}

/// Exact square root when `value` is the square of a rational.
pub fn rational_sqrt(value: &Scalar) -> Option<Scalar> {
    if value.is_negative() {
        return None;
    }
    let n = value.numer();
    let d = value.denom();
    let rn = n.sqrt();
    let rd = d.sqrt();
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Some(Scalar::new(rn, rd))
    } else {
        None
    }
}

pub fn max_of<'a, I: IntoIterator<Item = &'a Scalar>>(values: I) -> Option<Scalar> {
    values.into_iter().max().cloned()
}

pub fn min_of<'a, I: IntoIterator<Item = &'a Scalar>>(values: I) -> Option<Scalar> {
    values.into_iter().min().cloned()
}

/// Display adapter for a list of scalars, `{a, b, c}`.
pub struct ScalarList<'a>(pub &'a [Scalar]);

impl fmt::Display for ScalarList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

/// Serde adapter: scalars travel as rational strings.
pub mod serde_scalar {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Scalar, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_scalar(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Scalar, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_scalar(&text).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<Scalar>`.
pub mod serde_scalar_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(values: &[Scalar], serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(values.len()))?;
        for v in values {
            seq.serialize_element(&format_scalar(v))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Vec<Scalar>, D::Error> {
        let texts = Vec::<String>::deserialize(deserializer)?;
        texts
            .iter()
            .map(|t| parse_scalar(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Serde adapter for `Option<Scalar>`.
pub mod serde_scalar_opt {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Option<Scalar>, serializer: S) -> Result<S::Ok, S::Error> {
        match value {
            Some(v) => serializer.serialize_some(&format_scalar(v)),
            None => serializer.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Option<Scalar>, D::Error> {
        let text = Option::<String>::deserialize(deserializer)?;
        text.map(|t| parse_scalar(&t).map_err(serde::de::Error::custom))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_examples() {
        assert_eq!(distance(&rat(2, 3), &rat(1, 2)), rat(1, 6));
        assert_eq!(distance(&rat(1, 3), &rat(5, 6)), rat(1, 2));
        assert_eq!(distance(&rat(7, 9), &rat(7, 9)), zero());
    }

    #[test]
    fn parse_accepts_rationals_and_integers() {
        assert_eq!(parse_scalar("1/3").unwrap(), rat(1, 3));
        assert_eq!(parse_scalar("-4/6").unwrap(), rat(-2, 3));
        assert_eq!(parse_scalar("7").unwrap(), int(7));
        assert_eq!(parse_scalar(" 22/12 ").unwrap(), rat(11, 6));
    }

    #[test]
    fn parse_rejects_decimals_and_garbage() {
        for bad in ["0.5", "1e3", "1/0", "", "a/b", "1/-2", "1 /2", "--1"] {
            assert!(parse_scalar(bad).is_err(), "{bad} should be rejected");
        }
    }

    #[test]
    fn format_is_lowest_terms() {
        assert_eq!(format_scalar(&rat(22, 12)), "11/6");
        assert_eq!(format_scalar(&rat(4, 2)), "2");
        assert_eq!(format_scalar(&rat(-1, 3)), "-1/3");
    }

    #[test]
    fn rational_sqrt_detects_squares() {
        assert_eq!(rational_sqrt(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(rational_sqrt(&rat(2, 1)), None);
        assert_eq!(rational_sqrt(&rat(-1, 1)), None);
        assert_eq!(rational_sqrt(&zero()), Some(zero()));
    }
}
