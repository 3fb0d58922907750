//! Exact rational scalars, vectors and matrices, plus the exact LP and cone
//! machinery built on them.
//!
//! Scalars are [`BigRational`], which is always kept in lowest terms with a
//! positive denominator. Vectors are plain `Vec<Rational>`; the helpers in
//! this module cover the handful of operations the fan pipeline needs.

pub mod cone;
pub mod lp;
pub mod matrix;

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub use cone::{cone_contains, cones_equal, interior_point, min_over, Facet, HCone, InteriorPoint};
pub use lp::{solve_lp_exact, LpConstraint, LpOutcome};
pub use matrix::{rank, Matrix};

pub type Rational = BigRational;
pub type RationalVector = Vec<Rational>;

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn ratio(numer: i64, denom: i64) -> Result<Rational> {
    if denom == 0 {
        return Err(Error::DivisionByZero);
    }
    Ok(Rational::new(BigInt::from(numer), BigInt::from(denom)))
}

pub fn ints(values: &[i64]) -> RationalVector {
    values.iter().map(|&v| int(v)).collect()
}

/// Exact division; the only fallible scalar operation.
pub fn checked_div(a: &Rational, b: &Rational) -> Result<Rational> {
    if b.is_zero() {
        Err(Error::DivisionByZero)
    } else {
        Ok(a / b)
    }
}

/// Parses `"p"` or `"p/q"`. Non-canonical input such as `"2/4"` is accepted
/// and reduced.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::Parse(format!("not a rational: {text:?}"));
    match text.split_once('/') {
        None => BigInt::from_str(text)
            .map(Rational::from_integer)
            .map_err(|_| bad()),
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(Rational::new(p, q))
        }
    }
}

pub fn parse_vector(text: &str) -> Result<RationalVector> {
    text.split(',').map(parse_rational).collect()
}

/// Canonical text form: `"p/q"` in lowest terms, or `"p"` when `q = 1`.
pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn sub(a: &[Rational], b: &[Rational]) -> RationalVector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[Rational], b: &[Rational]) -> RationalVector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[Rational], factor: &Rational) -> RationalVector {
    a.iter().map(|x| x * factor).collect()
}

pub fn zeros(dim: usize) -> RationalVector {
    vec![Rational::zero(); dim]
}

pub fn unit(dim: usize, index: usize) -> RationalVector {
    let mut v = zeros(dim);
    v[index] = Rational::one();
    v
}

/// Positive multiple of `row` with coprime integer entries. The zero vector
/// is returned unchanged.
pub fn primitive(row: &[Rational]) -> RationalVector {
    let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let numers: Vec<BigInt> = row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let gcd = numers.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if gcd.is_zero() {
        return row.to_vec();
    }
    numers
        .into_iter()
        .map(|x| Rational::from_integer(x / &gcd))
        .collect()
}

pub fn is_zero_vector(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn neg(v: &[Rational]) -> RationalVector {
    v.iter().map(|x| -x).collect()
}

pub fn abs_max(v: &[Rational]) -> Rational {
    v.iter()
        .map(Signed::abs)
        .max()
        .unwrap_or_else(Rational::zero)
}

/// Serde adapters writing rationals as canonical strings.
pub mod serde_q {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    use super::{format_rational, parse_rational, Rational};

    pub mod scalar {
        use super::*;

        pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
            s.serialize_str(&format_rational(value))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
            let text = String::deserialize(d)?;
            parse_rational(&text).map_err(D::Error::custom)
        }
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(value: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(value.iter().map(format_rational))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            let items = Vec::<String>::deserialize(d)?;
            items
                .iter()
                .map(|t| parse_rational(t).map_err(D::Error::custom))
                .collect()
        }
    }

    pub mod opt_vec {
        use super::*;

        pub fn serialize<S: Serializer>(
            value: &Option<Vec<Rational>>,
            s: S,
        ) -> Result<S::Ok, S::Error> {
            match value {
                Some(v) => s.collect_seq(v.iter().map(format_rational)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<Option<Vec<Rational>>, D::Error> {
            let items = Option::<Vec<String>>::deserialize(d)?;
            items
                .map(|items| {
                    items
                        .iter()
                        .map(|t| parse_rational(t).map_err(D::Error::custom))
                        .collect()
                })
                .transpose()
        }
    }

    pub mod mat {
        use super::*;

        pub fn serialize<S: Serializer>(value: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(
                value
                    .iter()
                    .map(|row| row.iter().map(format_rational).collect::<Vec<_>>()),
            )
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<Vec<Vec<Rational>>, D::Error> {
            let rows = Vec::<Vec<String>>::deserialize(d)?;
            rows.iter()
                .map(|row| {
                    row.iter()
                        .map(|t| parse_rational(t).map_err(D::Error::custom))
                        .collect()
                })
                .collect()
        }
    }
}
