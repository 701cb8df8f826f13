//! Exact arithmetic: rationals, Laurent polynomials, ħ-series.

pub mod linear;
pub mod matrix;
pub mod numbers;
pub mod poly;
pub mod series;
pub mod symbol;

use num_bigint::BigInt;
use thiserror::Error;

pub use linear::LinearForm;
pub use numbers::{bernoulli, bernoulli_sequence, binomial, elementary_symmetric_sigma};
pub use poly::{LaurentPolynomial, Monomial, Scalar};
pub use series::HbarSeries;
pub use symbol::Symbol;

/// Arbitrary-precision rational, always in lowest terms.
pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses "3", "-1/4" or a finite decimal such as "0.125" exactly.
pub fn parse_rational(s: &str) -> Result<Rational, AlgebraError> {
    let s = s.trim();
    let bad = || AlgebraError::Parse(s.to_string());
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d == BigInt::from(0) {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let num: BigInt = digits.parse().map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rational::new(num, den);
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

pub fn rational_to_f64_vec(v: &[Rational]) -> Vec<f64> {
    v.iter().map(poly::rational_to_f64).collect()
}

pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Serializes a rational as a "num/den" string.
pub fn serialize_rational<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("cannot invert non-monomial {0}")]
    NotInvertible(String),
    #[error("valuation violation: {0}")]
    Valuation(String),
    #[error("Bernoulli index must be even and at least 2, got {0}")]
    BernoulliIndex(i64),
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parsing() {
        assert_eq!(parse_rational("-3/8").unwrap(), rat(-3, 8));
        assert_eq!(parse_rational("0.125").unwrap(), rat(1, 8));
        assert_eq!(parse_rational("-0.5").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("7").unwrap(), rat(7, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert_eq!(format_rational(&rat(4, 2)), "2/1");
    }
}
