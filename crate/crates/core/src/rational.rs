//! Exact rationals backed by `num-rational`.
//!
//! `BigRational` already keeps values in lowest terms with a positive
//! denominator. This module adds the `"p/q"` string form used in every JSON
//! document.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Parses `"p/q"` or a bare integer `"p"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    Rational::from_str(text).map_err(|_| Error::Parse(format!("not a rational: `{text}`")))
}

/// Always renders as `"p/q"`, including integers (`"2/1"`).
pub fn format_rational(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

pub fn is_positive(value: &Rational) -> bool {
    value.is_positive()
}

pub fn is_integer(value: &Rational) -> bool {
    value.denom().is_one()
}

pub fn zero() -> Rational {
    Rational::zero()
}

/// Serde adapter storing a rational as a `"p/q"` string.
pub mod serde_str {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::Rational;

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        super::parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms_and_format() {
        let r = parse_rational("4/8").unwrap();
        assert_eq!(format_rational(&r), "1/2");
        assert_eq!(format_rational(&int(3)), "3/1");
        assert_eq!(format_rational(&parse_rational("-6/-4").unwrap()), "3/2");
        assert_eq!(parse_rational("7").unwrap(), int(7));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("0.5").is_err());
    }
}
