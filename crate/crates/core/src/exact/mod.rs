//! Exact rationals, dyadic intervals, quadratic surds, polynomials and root isolation.

pub mod dyadic;
pub mod interval;
pub mod poly;
pub mod roots;
pub mod surd;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

pub use dyadic::Dyadic;
pub use interval::{interval_op, DyadicInterval, IntervalError, IntervalOp, DEFAULT_PRECISION};
pub use poly::{Monomial, MultiPoly, Var};
pub use roots::{isolate_roots, RootIsolation, RootsError, UniPoly};
pub use surd::{QuadraticSurd, SurdError};

pub type Rational = BigRational;

/// `n / d` as an exact rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("not a decimal number: {0:?}")]
pub struct ParseDecimalError(pub String);

/// Parses `[-+]digits[.digits][e[-+]digits]` exactly.
pub fn parse_decimal(s: &str) -> Result<Rational, ParseDecimalError> {
    let err = || ParseDecimalError(s.to_string());
    let t = s.trim();
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| err())?),
        None => (t, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((a, b)) => (a, b),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{}{}", int_part, frac_part);
    let m: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| err())? };
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut q = Rational::from_integer(m);
    if scale >= 0 {
        q *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        q /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -q } else { q })
}

/// Exact rational from a finite `f64`.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_plain_and_scientific() {
        assert_eq!(parse_decimal("0.452115").unwrap(), rat(452115, 1_000_000));
        assert_eq!(parse_decimal("-1.5").unwrap(), rat(-3, 2));
        assert_eq!(parse_decimal("1e-8").unwrap(), rat(1, 100_000_000));
        assert_eq!(parse_decimal("2.5E2").unwrap(), rat(250, 1));
        assert_eq!(parse_decimal("7").unwrap(), rat(7, 1));
        assert_eq!(parse_decimal(".5").unwrap(), rat(1, 2));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "abc", "1.2.3", "-", "1e", "0x10", "."] {
            assert!(parse_decimal(s).is_err(), "{s}");
        }
    }
}
