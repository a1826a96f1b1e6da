//! Closed intervals with dyadic endpoints and outward rounding.

use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use super::dyadic::Dyadic;
use super::Rational;

/// Mantissa width used when no precision is requested explicitly.
pub const DEFAULT_PRECISION: u32 = 128;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntervalError {
    #[error("division by an interval containing zero")]
    DivisionByZeroInterval,
    #[error("square root of an interval with negative lower endpoint")]
    NegativeSqrtDomain,
    #[error("lower endpoint exceeds upper endpoint")]
    InvertedBounds,
    #[error("{op:?} expects {expected} argument(s), got {got}")]
    Arity { op: IntervalOp, expected: usize, got: usize },
    #[error("precision must be at least 2 bits")]
    InvalidPrecision,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalOp {
    Add,
    Sub,
    Mul,
    Div,
    Sqrt,
    Cbrt,
}

impl IntervalOp {
    fn arity(self) -> usize {
        match self {
            IntervalOp::Sqrt | IntervalOp::Cbrt => 1,
            _ => 2,
        }
    }
}

/// A certified enclosure `[lo, hi]` of a real number.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicInterval {
    lo: Dyadic,
    hi: Dyadic,
    precision: u32,
}

/// Applies `op` to `args` with endpoints rounded outward to `precision` bits.
pub fn interval_op(
    op: IntervalOp,
    args: &[DyadicInterval],
    precision: u32,
) -> Result<DyadicInterval, IntervalError> {
    if precision < 2 {
        return Err(IntervalError::InvalidPrecision);
    }
    if args.len() != op.arity() {
        return Err(IntervalError::Arity { op, expected: op.arity(), got: args.len() });
    }
    let x = args[0].with_precision(precision);
    match op {
        IntervalOp::Add => Ok(x.add(&args[1].with_precision(precision))),
        IntervalOp::Sub => Ok(x.sub(&args[1].with_precision(precision))),
        IntervalOp::Mul => Ok(x.mul(&args[1].with_precision(precision))),
        IntervalOp::Div => x.div(&args[1].with_precision(precision)),
        IntervalOp::Sqrt => x.sqrt(),
        IntervalOp::Cbrt => Ok(x.cbrt()),
    }
}

impl DyadicInterval {
    pub fn new(lo: Dyadic, hi: Dyadic, precision: u32) -> Result<Self, IntervalError> {
        if lo > hi {
            return Err(IntervalError::InvertedBounds);
        }
        Ok(DyadicInterval { lo, hi, precision })
    }

    fn from_parts(lo: Dyadic, hi: Dyadic, precision: u32) -> Self {
        debug_assert!(lo <= hi);
        DyadicInterval { lo, hi, precision }
    }

    pub fn point(d: Dyadic, precision: u32) -> Self {
        DyadicInterval { lo: d.clone(), hi: d, precision }
    }

    pub fn from_int(v: i64, precision: u32) -> Self {
        Self::from_rational(&Rational::from_integer(v.into()), precision)
    }

    /// Tightest `precision`-bit enclosure of an exact rational.
    pub fn from_rational(q: &Rational, precision: u32) -> Self {
        Self::from_parts(Dyadic::floor_of(q, precision), Dyadic::ceil_of(q, precision), precision)
    }

    /// Enclosure of `[lo, hi]` for rational endpoints.
    pub fn from_rational_bounds(
        lo: &Rational,
        hi: &Rational,
        precision: u32,
    ) -> Result<Self, IntervalError> {
        if lo > hi {
            return Err(IntervalError::InvertedBounds);
        }
        Ok(Self::from_parts(Dyadic::floor_of(lo, precision), Dyadic::ceil_of(hi, precision), precision))
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Re-rounds endpoints outward so the mantissas fit `precision` bits.
    pub fn with_precision(&self, precision: u32) -> Self {
        Self::from_parts(self.lo.round(precision, false), self.hi.round(precision, true), precision)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    pub fn midpoint(&self) -> Dyadic {
        self.lo.add(&self.hi).mul_pow2(-1)
    }

    pub fn mid_f64(&self) -> f64 {
        self.midpoint().to_f64()
    }

    pub fn width_f64(&self) -> f64 {
        self.width().to_f64()
    }

    pub fn contains_rational(&self, q: &Rational) -> bool {
        self.lo.to_rational() <= *q && *q <= self.hi.to_rational()
    }

    pub fn contains_dyadic(&self, d: &Dyadic) -> bool {
        &self.lo <= d && d <= &self.hi
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &DyadicInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Every point of `self` is strictly below every point of `other`.
    pub fn certainly_lt(&self, other: &DyadicInterval) -> bool {
        self.hi < other.lo
    }

    pub fn certainly_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn certainly_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn hull(&self, other: &DyadicInterval) -> Self {
        Self::from_parts(
            self.lo.clone().min(other.lo.clone()),
            self.hi.clone().max(other.hi.clone()),
            self.precision.max(other.precision),
        )
    }

    pub fn intersect(&self, other: &DyadicInterval) -> Option<Self> {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        if lo > hi {
            None
        } else {
            Some(Self::from_parts(lo, hi, self.precision.max(other.precision)))
        }
    }

    fn out(&self, lo: Dyadic, hi: Dyadic, precision: u32) -> Self {
        Self::from_parts(lo.round(precision, false), hi.round(precision, true), precision)
    }

    fn joint_precision(&self, other: &DyadicInterval) -> u32 {
        self.precision.max(other.precision)
    }

    pub fn neg(&self) -> Self {
        Self::from_parts(self.hi.neg(), self.lo.neg(), self.precision)
    }

    pub fn add(&self, other: &DyadicInterval) -> Self {
        let p = self.joint_precision(other);
        self.out(self.lo.add(&other.lo), self.hi.add(&other.hi), p)
    }

    pub fn sub(&self, other: &DyadicInterval) -> Self {
        let p = self.joint_precision(other);
        self.out(self.lo.sub(&other.hi), self.hi.sub(&other.lo), p)
    }

    pub fn mul(&self, other: &DyadicInterval) -> Self {
        let p = self.joint_precision(other);
        let products = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        let lo = products.iter().min().cloned().unwrap_or_else(Dyadic::zero);
        let hi = products.iter().max().cloned().unwrap_or_else(Dyadic::zero);
        self.out(lo, hi, p)
    }

    pub fn div(&self, other: &DyadicInterval) -> Result<Self, IntervalError> {
        if other.contains_zero() {
            return Err(IntervalError::DivisionByZeroInterval);
        }
        let p = self.joint_precision(other);
        let (a, b) = (self.lo.to_rational(), self.hi.to_rational());
        let (c, d) = (other.lo.to_rational(), other.hi.to_rational());
        let qs = [&a / &c, &a / &d, &b / &c, &b / &d];
        let lo = qs.iter().min().cloned().unwrap_or_else(Rational::zero);
        let hi = qs.iter().max().cloned().unwrap_or_else(Rational::zero);
        Ok(Self::from_parts(Dyadic::floor_of(&lo, p), Dyadic::ceil_of(&hi, p), p))
    }

    pub fn recip(&self) -> Result<Self, IntervalError> {
        DyadicInterval::from_int(1, self.precision).div(self)
    }

    pub fn sqrt(&self) -> Result<Self, IntervalError> {
        if self.lo.is_negative() {
            return Err(IntervalError::NegativeSqrtDomain);
        }
        let p = self.precision;
        let (lo, _) = Dyadic::root_bounds(&self.lo.to_rational(), 2, p);
        let (_, hi) = Dyadic::root_bounds(&self.hi.to_rational(), 2, p);
        Ok(Self::from_parts(lo, hi, p))
    }

    pub fn cbrt(&self) -> Self {
        let p = self.precision;
        let (lo, _) = Dyadic::root_bounds(&self.lo.to_rational(), 3, p);
        let (_, hi) = Dyadic::root_bounds(&self.hi.to_rational(), 3, p);
        Self::from_parts(lo, hi, p)
    }

    pub fn square(&self) -> Self {
        let p = self.precision;
        let a = self.lo.mul(&self.lo);
        let b = self.hi.mul(&self.hi);
        if self.contains_zero() {
            self.out(Dyadic::zero(), a.max(b), p)
        } else {
            self.out(a.clone().min(b.clone()), a.max(b), p)
        }
    }

    pub fn powi(&self, k: u32) -> Self {
        match k {
            0 => DyadicInterval::from_int(1, self.precision),
            1 => self.clone(),
            _ if k.is_multiple_of(2) => self.powi(k / 2).square(),
            _ => self.powi(k - 1).mul(self),
        }
    }

    pub fn add_rational(&self, q: &Rational) -> Self {
        self.add(&DyadicInterval::from_rational(q, self.precision))
    }

    pub fn mul_rational(&self, q: &Rational) -> Self {
        self.mul(&DyadicInterval::from_rational(q, self.precision))
    }

    /// Largest absolute value attained on the interval.
    pub fn mag(&self) -> Dyadic {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn lo_rational(&self) -> Rational {
        self.lo.to_rational()
    }

    pub fn hi_rational(&self) -> Rational {
        self.hi.to_rational()
    }
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}
