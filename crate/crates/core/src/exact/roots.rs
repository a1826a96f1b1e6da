//! Univariate polynomials over the rationals and Sturm-sequence root isolation.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use super::dyadic::Dyadic;
use super::interval::DyadicInterval;
use super::poly::{MultiPoly, Var};
use super::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RootsError {
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("polynomial involves more than one variable")]
    NotUnivariate,
    #[error("root index {0} out of range")]
    NoSuchRoot(usize),
}

/// Dense univariate polynomial, ascending coefficients, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    /// Reads a polynomial in at most one variable; returns it and that variable.
    pub fn from_multi(p: &MultiPoly) -> Result<(Self, Option<Var>), RootsError> {
        let vars = p.vars();
        match vars.len() {
            0 => Ok((Self::new(vec![p.constant_value().unwrap_or_default()]), None)),
            1 => {
                let v = *vars.iter().next().expect("one variable");
                let c = p.univariate_coefficients(v).ok_or(RootsError::NotUnivariate)?;
                Ok((Self::new(c), Some(v)))
            }
            _ => Err(RootsError::NotUnivariate),
        }
    }

    pub fn to_multi(&self, v: Var) -> MultiPoly {
        MultiPoly::univariate(v, &self.coeffs)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Interval Horner evaluation; contains `p(x)` for every `x` in `x`.
    pub fn eval_interval(&self, x: &DyadicInterval) -> DyadicInterval {
        let p = x.precision();
        let mut acc = DyadicInterval::from_int(0, p);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(&DyadicInterval::from_rational(c, p));
        }
        acc
    }

    pub fn sign_at(&self, x: &Rational) -> Ordering {
        self.eval(x).cmp(&Rational::zero())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        UniPoly { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.leading();
        let mut rem = self.coeffs.clone();
        let nq = rem.len().saturating_sub(dd);
        let mut quot = vec![Rational::zero(); nq];
        for k in (0..nq).rev() {
            let c = &rem[k + dd] / &lead;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * dc;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (UniPoly::new(quot), UniPoly::new(rem))
    }

    fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.leading();
        UniPoly { coeffs: self.coeffs.iter().map(|c| c / &l).collect() }
    }

    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `p / gcd(p, p')`: same real roots, all simple.
    pub fn squarefree_part(&self) -> UniPoly {
        if self.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0
    }

    /// Sturm chain `p0 = p, p1 = p', p_{k+1} = -rem(p_{k-1}, p_k)`.
    pub fn sturm_sequence(&self) -> Vec<UniPoly> {
        let mut seq = vec![self.clone()];
        if self.degree().unwrap_or(0) == 0 {
            return seq;
        }
        seq.push(self.derivative());
        loop {
            let n = seq.len();
            let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(r.neg());
        }
        seq
    }

    /// Number of distinct real roots in `(a, b]`.
    pub fn count_roots(&self, a: &Rational, b: &Rational) -> usize {
        let seq = self.squarefree_part().sturm_sequence();
        variations(&seq, a).saturating_sub(variations(&seq, b))
    }
}

fn variations(seq: &[UniPoly], x: &Rational) -> usize {
    let mut count = 0;
    let mut last = Ordering::Equal;
    for p in seq {
        let s = p.sign_at(x);
        if s == Ordering::Equal {
            continue;
        }
        if last != Ordering::Equal && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_multi(Var::T))
    }
}

/// Intervals meeting at most in non-root endpoints, each containing exactly one real root of `polynomial`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootIsolation {
    pub polynomial: UniPoly,
    squarefree: UniPoly,
    pub intervals: Vec<DyadicInterval>,
}

impl RootIsolation {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Bisects root `index` until its enclosure is no wider than `width`.
    pub fn refine(&self, index: usize, width: &Rational) -> Result<DyadicInterval, RootsError> {
        let iv = self.intervals.get(index).ok_or(RootsError::NoSuchRoot(index))?;
        let p = iv.precision();
        let mut lo = iv.lo().clone();
        let mut hi = iv.hi().clone();
        let q = &self.squarefree;
        if q.sign_at(&lo.to_rational()) == Ordering::Equal {
            return Ok(DyadicInterval::point(lo, p));
        }
        if q.sign_at(&hi.to_rational()) == Ordering::Equal {
            return Ok(DyadicInterval::point(hi, p));
        }
        let s_lo = q.sign_at(&lo.to_rational());
        while hi.sub(&lo).to_rational() > *width {
            let mid = lo.add(&hi).mul_pow2(-1);
            match q.sign_at(&mid.to_rational()) {
                Ordering::Equal => return Ok(DyadicInterval::point(mid, p)),
                s if s == s_lo => lo = mid,
                _ => hi = mid,
            }
        }
        Ok(DyadicInterval::new(lo, hi, p).expect("bisection keeps lo <= hi"))
    }

    /// Re-checks the isolation invariants exactly.
    pub fn verify(&self) -> bool {
        let q = &self.squarefree;
        // neighbours may share an endpoint only where the polynomial is nonzero
        let disjoint = self.intervals.windows(2).all(|w| {
            w[0].hi() < w[1].lo()
                || (w[0].hi() == w[1].lo() && q.sign_at(&w[0].hi().to_rational()) != Ordering::Equal)
        });
        disjoint
            && self.intervals.iter().all(|iv| {
                let a = iv.lo().to_rational();
                let b = iv.hi().to_rational();
                let sa = q.sign_at(&a);
                let sb = q.sign_at(&b);
                if iv.is_point() {
                    return sa == Ordering::Equal;
                }
                let endpoint_root = sa == Ordering::Equal || sb == Ordering::Equal;
                let strict = sa != Ordering::Equal && sb != Ordering::Equal && sa != sb;
                let inside = q.count_roots(&a, &b) + usize::from(sa == Ordering::Equal);
                (strict || endpoint_root) && inside == 1
            })
    }
}

fn midpoint_avoiding_roots(q: &UniPoly, a: &Dyadic, b: &Dyadic) -> Dyadic {
    let w = b.sub(a);
    // candidates k/2^j of the way across, nearest the centre first
    for j in 1..=16i64 {
        let denom = 1i64 << j;
        let centre = denom / 2;
        for off in 0..centre {
            for k in [centre - off, centre + off] {
                if k <= 0 || k >= denom {
                    continue;
                }
                let m = a.add(&w.mul(&Dyadic::from_int(k)).mul_pow2(-j));
                if q.sign_at(&m.to_rational()) != Ordering::Equal {
                    return m;
                }
            }
        }
    }
    a.add(b).mul_pow2(-1)
}

/// Isolates every real root of `p` inside the closed box `bx`.
pub fn isolate_roots(p: &MultiPoly, bx: &DyadicInterval) -> Result<RootIsolation, RootsError> {
    let (u, _) = UniPoly::from_multi(p)?;
    isolate_univariate(&u, bx)
}

pub fn isolate_univariate(u: &UniPoly, bx: &DyadicInterval) -> Result<RootIsolation, RootsError> {
    if u.is_zero() {
        return Err(RootsError::ZeroPolynomial);
    }
    let q = u.squarefree_part();
    let seq = q.sturm_sequence();
    let prec = bx.precision();
    let mut out = Vec::new();
    let lo = bx.lo().clone();
    if q.sign_at(&lo.to_rational()) == Ordering::Equal {
        out.push(DyadicInterval::point(lo.clone(), prec));
    }
    let mut stack = vec![(lo, bx.hi().clone())];
    while let Some((a, b)) = stack.pop() {
        let count = variations(&seq, &a.to_rational()) - variations(&seq, &b.to_rational());
        match count {
            0 => {}
            1 if q.sign_at(&a.to_rational()) != Ordering::Equal => {
                out.push(DyadicInterval::new(a, b, prec).expect("ordered"))
            }
            _ => {
                let m = midpoint_avoiding_roots(&q, &a, &b);
                stack.push((m.clone(), b));
                stack.push((a, m));
            }
        }
    }
    out.sort_by(|x, y| x.lo().cmp(y.lo()));
    Ok(RootIsolation { polynomial: u.clone(), squarefree: q, intervals: out })
}

/// Smallest root of `u` in `bx`, refined to `width`, if any.
pub fn smallest_root(u: &UniPoly, bx: &DyadicInterval, width: &Rational) -> Result<Option<DyadicInterval>, RootsError> {
    let iso = isolate_univariate(u, bx)?;
    if iso.is_empty() {
        return Ok(None);
    }
    iso.refine(0, width).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use crate::exact::{parse_decimal, rat};

    fn one_over_pow2(k: u32) -> Rational {
        Rational::new(BigInt::one(), BigInt::one() << k)
    }

    fn bx(lo: i64, hi: i64) -> DyadicInterval {
        DyadicInterval::from_rational_bounds(&rat(lo, 1), &rat(hi, 1), 128).unwrap()
    }

    fn within(iv: &DyadicInterval, lo: &str, hi: &str) -> bool {
        iv.lo_rational() >= parse_decimal(lo).unwrap() && iv.hi_rational() <= parse_decimal(hi).unwrap()
    }

    #[test]
    fn first_proof_quadratic_has_two_roots() {
        let p = UniPoly::from_ints(&[3, -9, 4]).to_multi(Var::T);
        let iso = isolate_roots(&p, &bx(0, 2)).unwrap();
        assert_eq!(iso.len(), 2);
        assert!(iso.verify());
        let w = one_over_pow2(40);
        assert!(within(&iso.refine(0, &w).unwrap(), "0.40692", "0.40694"));
        assert!(within(&iso.refine(1, &w).unwrap(), "1.84306", "1.84308"));
    }

    #[test]
    fn double_root_is_reported_once() {
        let p = UniPoly::from_ints(&[0, 0, 1]);
        let iso = isolate_univariate(&p, &bx(-1, 1)).unwrap();
        assert_eq!(iso.len(), 1);
        let r = iso.refine(0, &one_over_pow2(20)).unwrap();
        assert!(r.contains_rational(&rat(0, 1)));
    }

    #[test]
    fn second_proof_quadratic() {
        let p = UniPoly::from_ints(&[15, -45, 26]);
        let iso = isolate_univariate(&p, &bx(0, 2)).unwrap();
        assert_eq!(iso.len(), 2);
        let w = one_over_pow2(40);
        assert!(within(&iso.refine(0, &w).unwrap(), "0.450694", "0.450696"));
        assert!(within(&iso.refine(1, &w).unwrap(), "1.280073", "1.280075"));
    }

    #[test]
    fn proof_quadratics_have_one_root_in_unit_interval() {
        for c in [[3i64, -9, 4], [15, -45, 26]] {
            let p = UniPoly::from_ints(&c);
            assert_eq!(isolate_univariate(&p, &bx(0, 1)).unwrap().len(), 1);
            assert_eq!(p.count_roots(&rat(0, 1), &rat(1, 1)), 1);
        }
    }

    #[test]
    fn rational_roots_on_endpoints_and_midpoints() {
        // (t)(t - 1)(t - 1/2)
        let p = UniPoly::new(vec![rat(0, 1), rat(1, 2), rat(-3, 2), rat(1, 1)]);
        let iso = isolate_univariate(&p, &bx(0, 1)).unwrap();
        assert_eq!(iso.len(), 3);
        assert!(iso.verify());
        assert!(iso.intervals[0].is_point());
    }

    #[test]
    fn zero_polynomial_is_an_error() {
        assert_eq!(isolate_univariate(&UniPoly::new(vec![]), &bx(0, 1)), Err(RootsError::ZeroPolynomial));
    }

    #[test]
    fn multivariate_is_rejected() {
        let p = &MultiPoly::var(Var::T) * &MultiPoly::var(Var::S);
        assert_eq!(isolate_roots(&p, &bx(0, 1)).unwrap_err(), RootsError::NotUnivariate);
    }

    #[test]
    fn division_identity() {
        let a = UniPoly::from_ints(&[1, 2, 3, 4, 5]);
        let b = UniPoly::from_ints(&[-1, 0, 2]);
        let (q, r) = a.div_rem(&b);
        let back: Vec<_> = (0..=4)
            .map(|k| {
                let x = rat(k, 3);
                q.eval(&x) * b.eval(&x) + r.eval(&x)
            })
            .collect();
        let direct: Vec<_> = (0..=4).map(|k| a.eval(&rat(k, 3))).collect();
        assert_eq!(back, direct);
    }
}
