//! Exact quadratic surds `a + b·√d` over the rationals.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::interval::DyadicInterval;
use super::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurdError {
    #[error("radicands differ: √{0} and √{1}")]
    MixedRadicand(u64, u64),
    #[error("division by zero surd")]
    DivisionByZero,
}

/// `a + b·√d` with `d` squarefree. A rational value is stored with `b = 0, d = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticSurd {
    a: Rational,
    b: Rational,
    d: u64,
}

/// Splits `d` into `k²·r` with `r` squarefree.
fn squarefree_split(mut d: u64) -> (u64, u64) {
    let mut k = 1u64;
    let mut p = 2u64;
    while p * p <= d {
        while d.is_multiple_of(p * p) {
            d /= p * p;
            k *= p;
        }
        p += 1;
    }
    (k, d)
}

impl QuadraticSurd {
    pub fn new(a: Rational, b: Rational, d: u64) -> Self {
        if d == 0 || b.is_zero() {
            return Self::rational(a);
        }
        let (k, r) = squarefree_split(d);
        let b = b * Rational::from_integer(k.into());
        if r == 1 {
            return Self::rational(a + b);
        }
        QuadraticSurd { a, b, d: r }
    }

    pub fn rational(a: Rational) -> Self {
        QuadraticSurd { a, b: Rational::zero(), d: 1 }
    }

    /// `√d`.
    pub fn sqrt(d: u64) -> Self {
        Self::new(Rational::zero(), Rational::one(), d)
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn radicand(&self) -> u64 {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    fn common_radicand(&self, other: &Self) -> Result<u64, SurdError> {
        match (self.is_rational(), other.is_rational()) {
            (true, _) => Ok(other.d),
            (_, true) => Ok(self.d),
            _ if self.d == other.d => Ok(self.d),
            _ => Err(SurdError::MixedRadicand(self.d, other.d)),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, SurdError> {
        let d = self.common_radicand(other)?;
        Ok(Self::new(&self.a + &other.a, &self.b + &other.b, d))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, SurdError> {
        self.checked_add(&other.neg())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, SurdError> {
        let d = self.common_radicand(other)?;
        let dr = Rational::from_integer(d.into());
        let a = &self.a * &other.a + &self.b * &other.b * dr;
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(Self::new(a, b, d))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, SurdError> {
        let d = self.common_radicand(other)?;
        let dr = Rational::from_integer(d.into());
        let norm = &other.a * &other.a - &other.b * &other.b * dr;
        if norm.is_zero() {
            return Err(SurdError::DivisionByZero);
        }
        let conj = QuadraticSurd { a: other.a.clone(), b: -other.b.clone(), d: other.d };
        let num = self.checked_mul(&conj)?;
        Ok(Self::new(num.a / &norm, num.b / &norm, d))
    }

    pub fn neg(&self) -> Self {
        QuadraticSurd { a: -self.a.clone(), b: -self.b.clone(), d: self.d }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Self::new(&self.a * q, &self.b * q, self.d)
    }

    pub fn add_rational(&self, q: &Rational) -> Self {
        Self::new(&self.a + q, self.b.clone(), self.d)
    }

    /// Exact sign of `a + b√d`.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&Rational::zero());
        let sb = self.b.cmp(&Rational::zero());
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * Rational::from_integer(self.d.into());
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => Ordering::Equal,
        }
    }

    /// Exact comparison; both operands must share a radicand (or be rational).
    pub fn try_cmp(&self, other: &Self) -> Result<Ordering, SurdError> {
        Ok(self.checked_sub(other)?.signum())
    }

    /// Certified enclosure of the value at `precision` mantissa bits.
    pub fn enclosure(&self, precision: u32) -> DyadicInterval {
        if self.is_rational() {
            return DyadicInterval::from_rational(&self.a, precision);
        }
        let guard = precision + 16;
        let root = DyadicInterval::from_int(self.d as i64, guard)
            .sqrt()
            .expect("radicand is positive");
        root.mul_rational(&self.b).add_rational(&self.a).with_precision(precision)
    }

    pub fn to_f64(&self) -> f64 {
        self.enclosure(64).mid_f64()
    }
}

impl fmt::Display for QuadraticSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.a);
        }
        let sign = if self.b.is_negative() { "-" } else { "+" };
        let mag = self.b.abs();
        if self.a.is_zero() {
            let lead = if self.b.is_negative() { "-" } else { "" };
            if mag.is_one() {
                write!(f, "{}√{}", lead, self.d)
            } else {
                write!(f, "{}{}·√{}", lead, mag, self.d)
            }
        } else if mag.is_one() {
            write!(f, "{} {} √{}", self.a, sign, self.d)
        } else {
            write!(f, "{} {} {}·√{}", self.a, sign, mag, self.d)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{parse_decimal, rat};

    fn s(a: (i64, i64), b: (i64, i64), d: u64) -> QuadraticSurd {
        QuadraticSurd::new(rat(a.0, a.1), rat(b.0, b.1), d)
    }

    #[test]
    fn radicand_is_normalized() {
        let x = s((0, 1), (1, 1), 12);
        assert_eq!(x.radicand(), 3);
        assert_eq!(x.b(), &rat(2, 1));
        let y = s((1, 2), (3, 1), 4);
        assert!(y.is_rational());
        assert_eq!(y.a(), &rat(13, 2));
    }

    #[test]
    fn low_root_of_first_quadratic() {
        let t = s((9, 8), (-1, 8), 33);
        let e = t.enclosure(128);
        assert!(e.lo_rational() >= parse_decimal("0.4069296").unwrap());
        assert!(e.hi_rational() <= parse_decimal("0.4069298").unwrap());
        // it is a root of 4t^2 - 9t + 3
        let four = QuadraticSurd::rational(rat(4, 1));
        let v = four
            .checked_mul(&t)
            .unwrap()
            .checked_mul(&t)
            .unwrap()
            .checked_sub(&t.scale(&rat(9, 1)))
            .unwrap()
            .add_rational(&rat(3, 1));
        assert_eq!(v, QuadraticSurd::rational(rat(0, 1)));
    }

    #[test]
    fn low_root_of_second_quadratic() {
        let t = s((45, 52), (-1, 52), 465);
        let e = t.enclosure(128);
        assert!(e.lo_rational() >= parse_decimal("0.4506949").unwrap());
        assert!(e.hi_rational() <= parse_decimal("0.4506951").unwrap());
    }

    #[test]
    fn rational_surd_is_point() {
        let x = s((3, 4), (0, 1), 33);
        let e = x.enclosure(64);
        assert!(e.is_point());
        assert_eq!(e.lo_rational(), rat(3, 4));
    }

    #[test]
    fn mixed_radicands_rejected() {
        let x = QuadraticSurd::sqrt(33);
        let y = QuadraticSurd::sqrt(465);
        assert_eq!(x.checked_add(&y), Err(SurdError::MixedRadicand(33, 465)));
        assert!(x.checked_add(&QuadraticSurd::rational(rat(1, 1))).is_ok());
    }

    #[test]
    fn division_inverts_multiplication() {
        let x = s((1, 3), (2, 5), 33);
        let y = s((-7, 2), (1, 9), 33);
        let q = x.checked_div(&y).unwrap();
        assert_eq!(q.checked_mul(&y).unwrap(), x);
        assert_eq!(x.checked_div(&QuadraticSurd::rational(rat(0, 1))), Err(SurdError::DivisionByZero));
    }

    #[test]
    fn exact_sign() {
        // 5/12 > (9 - √33)/8
        let lhs = QuadraticSurd::rational(rat(5, 12));
        let rhs = s((9, 8), (-1, 8), 33);
        assert_eq!(lhs.try_cmp(&rhs).unwrap(), Ordering::Greater);
        assert_eq!(s((-6, 1), (1, 1), 33).signum(), Ordering::Less);
        assert_eq!(s((-5, 1), (1, 1), 33).signum(), Ordering::Greater);
    }

    #[test]
    fn width_shrinks_with_precision() {
        let x = s((45, 52), (-1, 52), 465);
        assert!(x.enclosure(128).width() < x.enclosure(64).width());
        assert!(x.enclosure(64).contains(&x.enclosure(128)) || x.enclosure(64).intersect(&x.enclosure(128)).is_some());
    }
}
