//! Sparse multivariate polynomials with rational coefficients over a fixed alphabet.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::Rational;

/// The variables every polynomial in this crate is written over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Var {
    /// pinching parameter, `S - n = tS`
    T,
    /// squared norm of the second fundamental form
    S,
    A,
    B,
    C,
    /// `f3²`
    F3Sq,
    F4,
    F,
    /// `f3 / S`
    Y,
    N,
    /// bootstrap coefficient
    A7,
    Alpha,
    /// `Σ u_ijkl²`
    USq,
    /// `Σ h_ijkl²`
    HSq,
    /// `√465`
    W,
}

pub const NVARS: usize = 15;

impl Var {
    pub const ALL: [Var; NVARS] = [
        Var::T,
        Var::S,
        Var::A,
        Var::B,
        Var::C,
        Var::F3Sq,
        Var::F4,
        Var::F,
        Var::Y,
        Var::N,
        Var::A7,
        Var::Alpha,
        Var::USq,
        Var::HSq,
        Var::W,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::T => "t",
            Var::S => "S",
            Var::A => "A",
            Var::B => "B",
            Var::C => "C",
            Var::F3Sq => "F3SQ",
            Var::F4 => "F4",
            Var::F => "f",
            Var::Y => "y",
            Var::N => "n",
            Var::A7 => "a",
            Var::Alpha => "alpha",
            Var::USq => "USQ",
            Var::HSq => "HSQ",
            Var::W => "w",
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Exponent vector indexed by [`Var::index`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial([u16; NVARS]);

impl Monomial {
    pub fn one() -> Self {
        Monomial([0; NVARS])
    }

    pub fn var(v: Var) -> Self {
        let mut e = [0; NVARS];
        e[v.index()] = 1;
        Monomial(e)
    }

    pub fn exponent(&self, v: Var) -> u16 {
        self.0[v.index()]
    }

    pub fn with_exponent(mut self, v: Var, e: u16) -> Self {
        self.0[v.index()] = e;
        self
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a += *b;
        }
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        Var::ALL.iter().copied().filter(move |v| self.0[v.index()] > 0)
    }
}

/// A polynomial stored as a canonical map monomial → nonzero coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn int(c: i64) -> Self {
        Self::constant(Rational::from_integer(c.into()))
    }

    pub fn var(v: Var) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::var(v), Rational::one());
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    /// Univariate polynomial in `v` from ascending coefficients.
    pub fn univariate(v: Var, coeffs: &[Rational]) -> Self {
        Self::from_terms(
            coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| (Monomial::one().with_exponent(v, k as u16), c.clone())),
        )
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.vars().collect::<Vec<_>>()).collect()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u16 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        MultiPoly { terms: self.terms.iter().map(|(m, k)| (*m, k * c)).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    /// Coefficients of `self` viewed as a polynomial in `v`, ascending.
    pub fn coefficients_in(&self, v: Var) -> Vec<MultiPoly> {
        let deg = self.degree_in(v) as usize;
        let mut out = vec![MultiPoly::zero(); deg + 1];
        for (m, c) in &self.terms {
            let k = m.exponent(v) as usize;
            out[k].add_term(m.with_exponent(v, 0), c.clone());
        }
        out
    }

    /// Replaces `v` by `value` everywhere.
    pub fn substitute(&self, v: Var, value: &MultiPoly) -> Self {
        let coeffs = self.coefficients_in(v);
        // Horner in v
        let mut acc = MultiPoly::zero();
        for c in coeffs.iter().rev() {
            acc = &(&acc * value) + c;
        }
        acc
    }

    /// Reduces modulo `v² - d`, leaving `v` with degree at most one.
    pub fn reduce_radical(&self, v: Var, d: &Rational) -> Self {
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            let factor = num_traits::pow(d.clone(), (e / 2) as usize);
            out.add_term(m.with_exponent(v, e % 2), c * factor);
        }
        out
    }

    /// Exact evaluation; `None` if a variable of `self` has no value.
    pub fn eval(&self, point: &BTreeMap<Var, Rational>) -> Option<Rational> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for v in m.vars() {
                let x = point.get(&v)?;
                t *= num_traits::pow(x.clone(), m.exponent(v) as usize);
            }
            acc += t;
        }
        Some(acc)
    }

    /// Ascending coefficients when the polynomial involves only `v`.
    pub fn univariate_coefficients(&self, v: Var) -> Option<Vec<Rational>> {
        if self.vars().iter().any(|&u| u != v) {
            return None;
        }
        Some(self.coefficients_in(v).into_iter().map(|c| c.constant_value().unwrap_or_default()).collect())
    }
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly { terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect() }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $f:ident) => {
        impl $tr<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $f(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$f(&rhs)
            }
        }
        impl<'a> $tr<&'a MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $f(self, rhs: &MultiPoly) -> MultiPoly {
                (&self).$f(rhs)
            }
        }
        impl<'a> $tr<MultiPoly> for &'a MultiPoly {
            type Output = MultiPoly;
            fn $f(self, rhs: MultiPoly) -> MultiPoly {
                self.$f(&rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

fn fmt_monomial(m: &Monomial) -> String {
    m.vars()
        .map(|v| match m.exponent(v) {
            1 => v.name().to_string(),
            e => format!("{}^{}", v.name(), e),
        })
        .collect::<Vec<_>>()
        .join("*")
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        // highest total degree first
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then(b.0.cmp(a.0)));
        for (i, (m, c)) in terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let mono = fmt_monomial(m);
            if mono.is_empty() {
                write!(f, "{}", mag)?;
            } else if mag.is_one() {
                f.write_str(&mono)?;
            } else {
                write!(f, "{}*{}", mag, mono)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn t() -> MultiPoly {
        MultiPoly::var(Var::T)
    }

    #[test]
    fn cancellation_leaves_no_zero_terms() {
        let p = &t() - &t();
        assert!(p.is_zero());
        assert_eq!(p.len(), 0);
    }

    #[test]
    fn display_of_proof_quadratic() {
        let p = MultiPoly::univariate(Var::T, &[rat(15, 1), rat(-45, 1), rat(26, 1)]);
        assert_eq!(p.to_string(), "26*t^2 - 45*t + 15");
    }

    #[test]
    fn substitution_and_evaluation_agree() {
        // p(t, S) = t*S^2 - 3; substitute S := 1 - t
        let s = MultiPoly::var(Var::S);
        let p = &(&t() * &s.pow(2)) - &MultiPoly::int(3);
        let one_minus_t = &MultiPoly::one() - &t();
        let q = p.substitute(Var::S, &one_minus_t);
        let mut pt = BTreeMap::new();
        pt.insert(Var::T, rat(1, 3));
        let direct = q.eval(&pt).unwrap();
        pt.insert(Var::S, rat(2, 3));
        assert_eq!(direct, p.eval(&pt).unwrap());
    }

    #[test]
    fn radical_reduction() {
        let w = MultiPoly::var(Var::W);
        let p = &w.pow(3) + &MultiPoly::int(1);
        let r = p.reduce_radical(Var::W, &rat(465, 1));
        assert_eq!(r, &w.scale(&rat(465, 1)) + &MultiPoly::int(1));
    }

    #[test]
    fn missing_variable_gives_none() {
        let p = &t() + &MultiPoly::var(Var::S);
        let mut pt = BTreeMap::new();
        pt.insert(Var::T, rat(1, 2));
        assert!(p.eval(&pt).is_none());
    }
}
