//! Rational functions whose denominators are products of the positive atoms `t`, `1-t`, `S`, `n`.

use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exact::{Monomial, MultiPoly, Rational, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RatFnError {
    #[error("cannot substitute {0}: the value {1} is not a product of positive atoms")]
    NonAtomDenominator(Var, String),
    #[error("{0} does not occur linearly with an atom coefficient")]
    NotLinear(Var),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    T,
    OneMinusT,
    S,
    N,
}

impl Atom {
    pub const ALL: [Atom; 4] = [Atom::T, Atom::OneMinusT, Atom::S, Atom::N];

    pub fn poly(self) -> MultiPoly {
        match self {
            Atom::T => MultiPoly::var(Var::T),
            Atom::OneMinusT => &MultiPoly::one() - &MultiPoly::var(Var::T),
            Atom::S => MultiPoly::var(Var::S),
            Atom::N => MultiPoly::var(Var::N),
        }
    }

    fn var(self) -> Var {
        match self {
            Atom::T | Atom::OneMinusT => Var::T,
            Atom::S => Var::S,
            Atom::N => Var::N,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Atom::T => "t",
            Atom::OneMinusT => "(1-t)",
            Atom::S => "S",
            Atom::N => "n",
        }
    }
}

/// Exponents of the atoms in a denominator, indexed like [`Atom::ALL`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct AtomPower(pub [u32; 4]);

impl AtomPower {
    pub fn of(a: Atom, k: u32) -> Self {
        let mut e = [0; 4];
        e[a as usize] = k;
        AtomPower(e)
    }

    pub fn is_one(&self) -> bool {
        self.0 == [0; 4]
    }

    pub fn exponent(&self, a: Atom) -> u32 {
        self.0[a as usize]
    }

    fn lcm(&self, o: &AtomPower) -> AtomPower {
        let mut e = self.0;
        for (x, y) in e.iter_mut().zip(o.0) {
            *x = (*x).max(y);
        }
        AtomPower(e)
    }

    fn mul(&self, o: &AtomPower) -> AtomPower {
        let mut e = self.0;
        for (x, y) in e.iter_mut().zip(o.0) {
            *x += y;
        }
        AtomPower(e)
    }

    /// `self / o`; requires `o` to divide `self`.
    fn quotient(&self, o: &AtomPower) -> AtomPower {
        let mut e = self.0;
        for (x, y) in e.iter_mut().zip(o.0) {
            debug_assert!(*x >= y);
            *x -= y;
        }
        AtomPower(e)
    }

    fn pow(&self, k: u32) -> AtomPower {
        AtomPower(self.0.map(|e| e * k))
    }

    pub fn poly(&self) -> MultiPoly {
        let mut p = MultiPoly::one();
        for a in Atom::ALL {
            let k = self.exponent(a);
            if k > 0 {
                p = &p * &a.poly().pow(k);
            }
        }
        p
    }

    fn mentions(&self, v: Var) -> bool {
        Atom::ALL.iter().any(|&a| a.var() == v && self.exponent(a) > 0)
    }
}

impl fmt::Display for AtomPower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = Atom::ALL
            .iter()
            .filter(|&&a| self.exponent(a) > 0)
            .map(|&a| match self.exponent(a) {
                1 => a.name().to_string(),
                k => format!("{}^{}", a.name(), k),
            })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

/// `num / den` with `den` a product of atoms; positive on the domain `0 < t < 1, S, n > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RatFn {
    num: MultiPoly,
    den: AtomPower,
}

impl From<MultiPoly> for RatFn {
    fn from(num: MultiPoly) -> Self {
        RatFn { num, den: AtomPower::default() }
    }
}

impl RatFn {
    pub fn new(num: MultiPoly, den: AtomPower) -> Self {
        RatFn { num, den }.normalized()
    }

    pub fn zero() -> Self {
        MultiPoly::zero().into()
    }

    pub fn one() -> Self {
        MultiPoly::one().into()
    }

    pub fn constant(c: Rational) -> Self {
        MultiPoly::constant(c).into()
    }

    pub fn var(v: Var) -> Self {
        MultiPoly::var(v).into()
    }

    pub fn num(&self) -> &MultiPoly {
        &self.num
    }

    pub fn den(&self) -> &AtomPower {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// `self / atom^k`.
    pub fn over(&self, a: Atom, k: u32) -> Self {
        RatFn { num: self.num.clone(), den: self.den.mul(&AtomPower::of(a, k)) }.normalized()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        RatFn { num: self.num.scale(c), den: self.den }.normalized()
    }

    pub fn neg(&self) -> Self {
        RatFn { num: -&self.num, den: self.den }
    }

    fn lift(&self, to: &AtomPower) -> MultiPoly {
        &self.num * &to.quotient(&self.den).poly()
    }

    pub fn add(&self, o: &RatFn) -> RatFn {
        let l = self.den.lcm(&o.den);
        RatFn { num: &self.lift(&l) + &o.lift(&l), den: l }.normalized()
    }

    pub fn sub(&self, o: &RatFn) -> RatFn {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RatFn) -> RatFn {
        RatFn { num: &self.num * &o.num, den: self.den.mul(&o.den) }.normalized()
    }

    pub fn pow(&self, k: u32) -> RatFn {
        RatFn { num: self.num.pow(k), den: self.den.pow(k) }.normalized()
    }

    pub fn vars(&self) -> std::collections::BTreeSet<Var> {
        self.num.vars()
    }

    /// Cancels the monomial atoms `t`, `S`, `n` and any `(1-t)` factors shared with the numerator.
    fn normalized(mut self) -> Self {
        if self.num.is_zero() {
            self.den = AtomPower::default();
            return self;
        }
        for a in [Atom::T, Atom::S, Atom::N] {
            let k = self.den.exponent(a);
            if k == 0 {
                continue;
            }
            let v = a.var();
            let common = self.num.terms().map(|(m, _)| m.exponent(v) as u32).min().unwrap_or(0).min(k);
            if common > 0 {
                self.num = MultiPoly::from_terms(self.num.terms().map(|(m, c)| {
                    (m.with_exponent(v, m.exponent(v) - common as u16), c.clone())
                }));
                self.den.0[a as usize] -= common;
            }
        }
        while self.den.exponent(Atom::OneMinusT) > 0 {
            match exact_div_by_one_minus_t(&self.num) {
                Some(q) => {
                    self.num = q;
                    self.den.0[Atom::OneMinusT as usize] -= 1;
                }
                None => break,
            }
        }
        self
    }

    /// Writes `self` as `c · Π atoms^k` when possible.
    pub fn as_atom_monomial(&self) -> Option<(Rational, AtomPower, AtomPower)> {
        if self.num.is_zero() {
            return None;
        }
        let mut rest = self.num.clone();
        let mut up = AtomPower::default();
        for a in [Atom::T, Atom::S, Atom::N] {
            let v = a.var();
            let k = rest.terms().map(|(m, _)| m.exponent(v)).min().unwrap_or(0);
            if k > 0 {
                rest = MultiPoly::from_terms(rest.terms().map(|(m, c)| (m.with_exponent(v, m.exponent(v) - k), c.clone())));
                up.0[a as usize] = k as u32;
            }
        }
        while let Some(q) = exact_div_by_one_minus_t(&rest) {
            rest = q;
            up.0[Atom::OneMinusT as usize] += 1;
        }
        let c = rest.constant_value()?;
        if c.is_zero() {
            return None;
        }
        Some((c, up, self.den))
    }

    /// Replaces `v` by `value`. Atom variables may only be replaced by atom monomials.
    pub fn substitute(&self, v: Var, value: &RatFn) -> Result<RatFn, RatFnError> {
        if value.den.mentions(v) {
            return Err(RatFnError::NonAtomDenominator(v, value.to_string()));
        }
        let coeffs = self.num.coefficients_in(v);
        let k = (coeffs.len() - 1) as u32;
        // Σ c_j e^j d^(k-j) / d^k
        let d = value.den.poly();
        let mut num = MultiPoly::zero();
        for (j, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            num = &num + &(&(c * &value.num.pow(j as u32)) * &d.pow(k - j as u32));
        }
        let mut out = RatFn { num, den: self.den.mul(&value.den.pow(k)) };
        if self.den.mentions(v) {
            // atoms in v must map to atom monomials
            let (c, up, down) =
                value.as_atom_monomial().ok_or_else(|| RatFnError::NonAtomDenominator(v, value.to_string()))?;
            let mut den = out.den;
            let mut extra_num = MultiPoly::one();
            for a in Atom::ALL {
                let e = self.den.exponent(a);
                if e == 0 || a.var() != v {
                    continue;
                }
                if a != Atom::N && a != Atom::S {
                    return Err(RatFnError::NonAtomDenominator(v, value.to_string()));
                }
                den.0[a as usize] -= e;
                den = den.mul(&up.pow(e));
                extra_num = &extra_num * &down.poly().pow(e);
                extra_num = extra_num.scale(&num_traits::pow(c.clone().recip(), e as usize));
            }
            out = RatFn { num: &out.num * &extra_num, den };
        }
        Ok(out.normalized())
    }

    /// Solves `self = 0` for `v`, which must occur linearly with an atom-monomial coefficient.
    pub fn solve_linear(&self, v: Var) -> Result<RatFn, RatFnError> {
        let coeffs = self.num.coefficients_in(v);
        if coeffs.len() != 2 {
            return Err(RatFnError::NotLinear(v));
        }
        let lead = RatFn::from(coeffs[1].clone());
        let (c, up, _) = lead.as_atom_monomial().ok_or(RatFnError::NotLinear(v))?;
        Ok(RatFn { num: (-&coeffs[0]).scale(&c.recip()), den: up }.normalized())
    }

    pub fn reduce_radical(&self, v: Var, d: &Rational) -> RatFn {
        RatFn { num: self.num.reduce_radical(v, d), den: self.den }.normalized()
    }

    /// Exact value at a point, if every variable is assigned and the denominator is nonzero.
    pub fn eval(&self, point: &std::collections::BTreeMap<Var, Rational>) -> Option<Rational> {
        let n = self.num.eval(point)?;
        let d = self.den.poly().eval(point)?;
        if d.is_zero() {
            return None;
        }
        Some(n / d)
    }
}

/// `p / (1 - t)` when it is a polynomial.
fn exact_div_by_one_minus_t(p: &MultiPoly) -> Option<MultiPoly> {
    if p.is_zero() || p.degree_in(Var::T) == 0 {
        return None;
    }
    // synthetic division by (t - 1) in t, coefficientwise over the other variables
    let coeffs = p.coefficients_in(Var::T);
    let k = coeffs.len() - 1;
    let mut q = vec![MultiPoly::zero(); k];
    let mut carry = MultiPoly::zero();
    for j in (1..=k).rev() {
        carry = &coeffs[j] + &carry;
        q[j - 1] = carry.clone();
    }
    if !(&coeffs[0] + &carry).is_zero() {
        return None;
    }
    // p = (t - 1)·Σ q_j t^j, so p/(1-t) = -Σ q_j t^j
    let mut out = MultiPoly::zero();
    for (j, c) in q.iter().enumerate() {
        let tj = MultiPoly::from_terms([(Monomial::one().with_exponent(Var::T, j as u16), Rational::one())]);
        out = &out - &(c * &tj);
    }
    Some(out)
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use std::collections::BTreeMap;

    fn v(x: Var) -> RatFn {
        RatFn::var(x)
    }

    fn pt() -> BTreeMap<Var, Rational> {
        [(Var::T, rat(2, 7)), (Var::S, rat(9, 2)), (Var::N, rat(11, 3)), (Var::A, rat(5, 4)), (Var::F, rat(-3, 5))]
            .into_iter()
            .collect()
    }

    #[test]
    fn addition_over_common_denominator() {
        let a = v(Var::A).over(Atom::S, 1);
        let b = v(Var::T).over(Atom::OneMinusT, 1);
        let s = a.add(&b);
        let p = pt();
        assert_eq!(s.eval(&p).unwrap(), a.eval(&p).unwrap() + b.eval(&p).unwrap());
    }

    #[test]
    fn normalization_cancels_atoms() {
        let one_minus_t = RatFn::from(Atom::OneMinusT.poly());
        let x = one_minus_t.mul(&v(Var::S)).over(Atom::OneMinusT, 1).over(Atom::S, 2);
        assert_eq!(x, RatFn::one().over(Atom::S, 1));
        assert!(x.sub(&RatFn::one().over(Atom::S, 1)).is_zero());
    }

    #[test]
    fn substitution_into_atom_denominator() {
        // S^2 / n with n := (1-t) S gives S / (1-t)
        let e = v(Var::S).pow(2).over(Atom::N, 1);
        let n_val = RatFn::from(&Atom::OneMinusT.poly() * &MultiPoly::var(Var::S));
        let r = e.substitute(Var::N, &n_val).unwrap();
        assert_eq!(r, v(Var::S).over(Atom::OneMinusT, 1));
    }

    #[test]
    fn substitution_agrees_with_evaluation() {
        let e = v(Var::F).pow(2).add(&v(Var::A).over(Atom::T, 1));
        let val = v(Var::A).over(Atom::S, 1).sub(&v(Var::T));
        let r = e.substitute(Var::F, &val).unwrap();
        let mut p = pt();
        let fv = val.eval(&p).unwrap();
        p.insert(Var::F, fv);
        assert_eq!(r.eval(&p).unwrap(), e.eval(&p).unwrap());
    }

    #[test]
    fn solving_a_linear_relation() {
        // S f + t S^2/(1-t) - A = 0  =>  f = A/S - tS/(1-t)
        let rel = v(Var::S).mul(&v(Var::F)).add(&v(Var::T).mul(&v(Var::S).pow(2)).over(Atom::OneMinusT, 1)).sub(&v(Var::A));
        let f = rel.solve_linear(Var::F).unwrap();
        let expect = v(Var::A).over(Atom::S, 1).sub(&v(Var::T).mul(&v(Var::S)).over(Atom::OneMinusT, 1));
        assert!(f.sub(&expect).is_zero());
        assert!(matches!(v(Var::F).pow(2).solve_linear(Var::F), Err(RatFnError::NotLinear(_))));
        // coefficient A is not an atom
        assert!(v(Var::A).mul(&v(Var::F)).solve_linear(Var::F).is_err());
    }
}
