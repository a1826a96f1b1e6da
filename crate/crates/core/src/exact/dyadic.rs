//! Dyadic rationals `m * 2^e` and directed rounding to a mantissa width.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rational;

/// An exact dyadic rational `mant * 2^exp`.
///
/// The representation is canonical: the mantissa is odd (or zero, in which
/// case the exponent is zero), so structural equality is value equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

pub(crate) fn ceil_div(n: &BigInt, d: &BigInt) -> BigInt {
    -((-n).div_floor(d))
}

fn pow2(k: u64) -> BigInt {
    BigInt::one() << k
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        if mant.is_zero() {
            return Dyadic { mant, exp: 0 };
        }
        let tz = mant.trailing_zeros().unwrap_or(0);
        if tz == 0 {
            Dyadic { mant, exp }
        } else {
            Dyadic { mant: mant >> tz, exp: exp + tz as i64 }
        }
    }

    pub fn zero() -> Self {
        Dyadic { mant: BigInt::zero(), exp: 0 }
    }

    pub fn from_int(v: i64) -> Self {
        Dyadic::new(BigInt::from(v), 0)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    /// Number of significant mantissa bits.
    pub fn bits(&self) -> u64 {
        self.mant.bits()
    }

    pub fn to_rational(&self) -> Rational {
        if self.exp >= 0 {
            Rational::from_integer(&self.mant << self.exp as u64)
        } else {
            Rational::new(self.mant.clone(), pow2((-self.exp) as u64))
        }
    }

    pub fn to_f64(&self) -> f64 {
        let b = self.mant.bits();
        let (m, e) = if b > 64 {
            let k = b - 64;
            (&self.mant >> k, self.exp + k as i64)
        } else {
            (self.mant.clone(), self.exp)
        };
        let mf = m.to_f64().unwrap_or(f64::NAN);
        if e > i32::MAX as i64 {
            return mf * f64::INFINITY;
        }
        if e < -2000 {
            return 0.0;
        }
        // split the scaling so that subnormal-range exponents do not flush early
        let half = (e / 2) as i32;
        mf * 2f64.powi(half) * 2f64.powi(e as i32 - half)
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic { mant: -&self.mant, exp: self.exp }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic { mant: self.mant.abs(), exp: self.exp }
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mant * &other.mant, self.exp + other.exp)
    }

    /// Multiplies by `2^k`; exact.
    pub fn mul_pow2(&self, k: i64) -> Dyadic {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic { mant: self.mant.clone(), exp: self.exp + k }
    }

    /// Rounds to at most `prec` mantissa bits, toward +inf when `up`, toward -inf otherwise.
    pub fn round(&self, prec: u32, up: bool) -> Dyadic {
        let b = self.mant.bits();
        if b <= prec as u64 {
            return self.clone();
        }
        let k = b - prec as u64;
        let d = pow2(k);
        let m = if up { ceil_div(&self.mant, &d) } else { self.mant.div_floor(&d) };
        Dyadic::new(m, self.exp + k as i64)
    }

    /// Largest dyadic with at most `prec` mantissa bits that is `<= q`.
    pub fn floor_of(q: &Rational, prec: u32) -> Dyadic {
        Self::round_rational(q, prec, false)
    }

    /// Smallest dyadic with at most `prec` mantissa bits that is `>= q`.
    pub fn ceil_of(q: &Rational, prec: u32) -> Dyadic {
        Self::round_rational(q, prec, true)
    }

    fn round_rational(q: &Rational, prec: u32, up: bool) -> Dyadic {
        if q.is_zero() {
            return Dyadic::zero();
        }
        let num = q.numer();
        let den = q.denom();
        let shift = prec as i64 + 2 - (num.bits() as i64 - den.bits() as i64);
        let (n2, d2) = if shift >= 0 {
            (num << shift as u64, den.clone())
        } else {
            (num.clone(), den << (-shift) as u64)
        };
        let m = if up { ceil_div(&n2, &d2) } else { n2.div_floor(&d2) };
        Dyadic::new(m, -shift).round(prec, up)
    }

    /// Floor and ceiling of `x^(1/k)` (k = 2 or 3) on a `prec`-bit grid.
    /// Square roots require `x >= 0`; cube roots accept any sign.
    pub(crate) fn root_bounds(x: &Rational, k: u32, prec: u32) -> (Dyadic, Dyadic) {
        debug_assert!(k == 2 || k == 3);
        if x.is_zero() {
            return (Dyadic::zero(), Dyadic::zero());
        }
        if x.is_negative() {
            debug_assert_eq!(k, 3);
            let (lo, hi) = Self::root_bounds(&-x, k, prec);
            return (hi.neg(), lo.neg());
        }
        let num = x.numer();
        let den = x.denom();
        let log2 = num.bits() as i64 - den.bits() as i64;
        let s = prec as i64 + 3 - log2.div_euclid(k as i64);
        let ks = k as i64 * s;
        let (n2, d2) = if ks >= 0 {
            (num << ks as u64, den.clone())
        } else {
            (num.clone(), den << (-ks) as u64)
        };
        let (whole, rem) = n2.div_rem(&d2);
        let m = if k == 2 { whole.sqrt() } else { whole.cbrt() };
        let exact = rem.is_zero() && m.pow(k) == whole;
        let lo = Dyadic::new(m.clone(), -s).round(prec, false);
        let hi_m = if exact { m } else { m + 1 };
        let hi = Dyadic::new(hi_m, -s).round(prec, true);
        (lo, hi)
    }

    /// Exact decimal expansion (every dyadic has a terminating one).
    pub fn to_decimal_string(&self) -> String {
        if self.exp >= 0 {
            return (&self.mant << self.exp as u64).to_string();
        }
        let k = (-self.exp) as usize;
        let scaled = self.mant.abs() * num_traits::pow(BigInt::from(5), k);
        let mut digits = scaled.to_string();
        if digits.len() <= k {
            digits = format!("{}{}", "0".repeat(k + 1 - digits.len()), digits);
        }
        let split = digits.len() - k;
        let sign = if self.mant.is_negative() { "-" } else { "" };
        format!("{}{}.{}", sign, &digits[..split], &digits[split..])
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let sa = self.mant.sign();
        let sb = other.mant.sign();
        if sa != sb {
            return sa.cmp(&sb);
        }
        if self.is_zero() {
            return Ordering::Equal;
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn canonical_form_strips_trailing_zeros() {
        let a = Dyadic::new(BigInt::from(12), 0);
        assert_eq!(a, Dyadic::new(BigInt::from(3), 2));
        assert_eq!(Dyadic::new(BigInt::zero(), 17), Dyadic::zero());
    }

    #[test]
    fn decimal_rendering_is_exact() {
        assert_eq!(Dyadic::new(BigInt::from(3), -2).to_decimal_string(), "0.75");
        assert_eq!(Dyadic::new(BigInt::from(-1), -3).to_decimal_string(), "-0.125");
        assert_eq!(Dyadic::new(BigInt::from(5), 1).to_decimal_string(), "10");
        assert_eq!(Dyadic::new(BigInt::from(1), -10).to_decimal_string(), "0.0009765625");
    }

    #[test]
    fn directed_rounding_brackets_rational() {
        let q = rat(1, 3);
        for prec in [8u32, 53, 128] {
            let lo = Dyadic::floor_of(&q, prec);
            let hi = Dyadic::ceil_of(&q, prec);
            assert!(lo.to_rational() < q && q < hi.to_rational());
            assert!(lo.bits() <= prec as u64 && hi.bits() <= prec as u64);
        }
        let neg = rat(-7, 5);
        assert!(Dyadic::floor_of(&neg, 20).to_rational() <= neg);
        assert!(Dyadic::ceil_of(&neg, 20).to_rational() >= neg);
    }

    #[test]
    fn exact_dyadics_round_to_themselves() {
        let q = rat(3, 8);
        assert_eq!(Dyadic::floor_of(&q, 64), Dyadic::ceil_of(&q, 64));
    }

    #[test]
    fn ordering_across_exponents() {
        let a = Dyadic::new(BigInt::from(1), -1);
        let b = Dyadic::new(BigInt::from(3), -3);
        assert!(a > b);
        assert!(a.neg() < b.neg());
        assert!(Dyadic::zero() < b);
    }

    #[test]
    fn root_bounds_of_perfect_powers_are_points() {
        let (lo, hi) = Dyadic::root_bounds(&rat(9, 4), 2, 64);
        assert_eq!(lo, hi);
        assert_eq!(lo.to_rational(), rat(3, 2));
        let (lo, hi) = Dyadic::root_bounds(&rat(-27, 1), 3, 64);
        assert_eq!(lo, hi);
        assert_eq!(lo.to_rational(), rat(-3, 1));
    }
}
