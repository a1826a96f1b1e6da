//! Nonnegativity of polynomials on boxes by exact interval evaluation and subdivision.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::exact::{rat, MultiPoly, Rational, Var};

/// Maximal number of bisections along any root-to-leaf path.
pub const MAX_DEPTH: u32 = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Range {
    Closed(Rational, Rational),
    AtLeast(Rational),
}

/// Ranges for the variables a residual may depend on.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BoxDomain {
    ranges: BTreeMap<Var, Range>,
}

impl BoxDomain {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn closed(mut self, v: Var, lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "empty range for {v}");
        self.ranges.insert(v, Range::Closed(lo, hi));
        self
    }

    pub fn at_least(mut self, v: Var, lo: Rational) -> Self {
        self.ranges.insert(v, Range::AtLeast(lo));
        self
    }

    pub fn range(&self, v: Var) -> Option<&Range> {
        self.ranges.get(&v)
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.ranges.keys().copied()
    }
}

impl fmt::Display for BoxDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .ranges
            .iter()
            .map(|(v, r)| match r {
                Range::Closed(a, b) => format!("{} in [{}, {}]", v, a, b),
                Range::AtLeast(a) => format!("{} >= {}", v, a),
            })
            .collect();
        f.write_str(&parts.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoxOutcome {
    Certified,
    /// A point of the domain where the polynomial violates the claim, with the value there.
    Counterexample(BTreeMap<Var, Rational>, Rational),
    /// Subdivision exhausted without a proof or a counterexample; carries the unresolved cell.
    Undecided(String),
    /// The polynomial involves a variable the domain does not bound.
    NotBoxVariable(Var),
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Iv {
    lo: Rational,
    hi: Rational,
}

impl Iv {
    fn point(x: Rational) -> Self {
        Iv { lo: x.clone(), hi: x }
    }

    fn add(&self, o: &Iv) -> Iv {
        Iv { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    fn mul(&self, o: &Iv) -> Iv {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().expect("four products").clone();
        let hi = c.iter().max().expect("four products").clone();
        Iv { lo, hi }
    }

    fn pow(&self, k: u16) -> Iv {
        if k == 0 {
            return Iv::point(Rational::one());
        }
        let a = num_traits::pow(self.lo.clone(), k as usize);
        let b = num_traits::pow(self.hi.clone(), k as usize);
        if k % 2 == 1 {
            Iv { lo: a, hi: b }
        } else if self.lo.is_negative() && self.hi.is_positive() {
            Iv { lo: Rational::zero(), hi: a.max(b) }
        } else {
            Iv { lo: a.clone().min(b.clone()), hi: a.max(b) }
        }
    }

    fn scale(&self, c: &Rational) -> Iv {
        let a = &self.lo * c;
        let b = &self.hi * c;
        if c.is_negative() {
            Iv { lo: b, hi: a }
        } else {
            Iv { lo: a, hi: b }
        }
    }

    fn mid(&self) -> Rational {
        (&self.lo + &self.hi) / rat(2, 1)
    }
}

fn eval_box(p: &MultiPoly, cell: &BTreeMap<Var, Iv>) -> Iv {
    let mut acc = Iv::point(Rational::zero());
    for (m, c) in p.terms() {
        let mut t = Iv::point(Rational::one());
        for v in m.vars() {
            t = t.mul(&cell[&v].pow(m.exponent(v)));
        }
        acc = acc.add(&t.scale(c));
    }
    acc
}

fn cell_text(cell: &BTreeMap<Var, Iv>) -> String {
    cell.iter().map(|(v, i)| format!("{} in [{}, {}]", v, i.lo, i.hi)).collect::<Vec<_>>().join(", ")
}

fn cell_mid(cell: &BTreeMap<Var, Iv>) -> BTreeMap<Var, Rational> {
    cell.iter().map(|(v, i)| (*v, i.mid())).collect()
}

enum Bounded {
    Certified,
    Negative(BTreeMap<Var, Rational>, Rational),
    Undecided(String),
}

/// `p >= 0` (or `> 0` when `strict`) on a box of closed ranges.
fn certify_bounded(p: &MultiPoly, cell0: BTreeMap<Var, Iv>, strict: bool) -> Bounded {
    let ok = |x: &Rational| if strict { x.is_positive() } else { !x.is_negative() };
    let bad = |x: &Rational| if strict { !x.is_positive() } else { x.is_negative() };
    let mut stack = vec![(cell0, 0u32)];
    while let Some((cell, depth)) = stack.pop() {
        let r = eval_box(p, &cell);
        if ok(&r.lo) {
            continue;
        }
        let mid = cell_mid(&cell);
        let value = p.eval(&mid).unwrap_or_default();
        if bad(&value) {
            return Bounded::Negative(mid, value);
        }
        if depth >= MAX_DEPTH || cell.is_empty() {
            return Bounded::Undecided(cell_text(&cell));
        }
        // split the widest range
        let (&v, _) = cell
            .iter()
            .max_by(|a, b| (&a.1.hi - &a.1.lo).cmp(&(&b.1.hi - &b.1.lo)))
            .expect("non-empty cell");
        let m = cell[&v].mid();
        let mut left = cell.clone();
        left.get_mut(&v).expect("present").hi = m.clone();
        let mut right = cell;
        right.get_mut(&v).expect("present").lo = m;
        stack.push((right, depth + 1));
        stack.push((left, depth + 1));
    }
    Bounded::Certified
}

/// Certifies `p >= 0` (or `p > 0`) on the domain.
///
/// Unbounded variables `v >= L` are shifted to `v = L + s`; every coefficient in `s`
/// must then be nonnegative on the bounded ranges, the constant one positive when `strict`.
pub fn certify_nonnegative(p: &MultiPoly, dom: &BoxDomain, strict: bool) -> BoxOutcome {
    for v in p.vars() {
        if dom.range(v).is_none() {
            return BoxOutcome::NotBoxVariable(v);
        }
    }
    let vars: Vec<Var> = p.vars().into_iter().collect();
    let mut shifted = p.clone();
    let mut unbounded = Vec::new();
    let mut cell = BTreeMap::new();
    for &v in &vars {
        match dom.range(v).expect("checked") {
            Range::Closed(a, b) => {
                cell.insert(v, Iv { lo: a.clone(), hi: b.clone() });
            }
            Range::AtLeast(l) => {
                let sub = &MultiPoly::constant(l.clone()) + &MultiPoly::var(v);
                shifted = shifted.substitute(v, &sub);
                unbounded.push(v);
            }
        }
    }
    // group by the exponents of the unbounded (shifted) variables
    let mut groups: BTreeMap<Vec<u16>, MultiPoly> = BTreeMap::new();
    for (m, c) in shifted.terms() {
        let key: Vec<u16> = unbounded.iter().map(|&v| m.exponent(v)).collect();
        let mut rest = *m;
        for &v in &unbounded {
            rest = rest.with_exponent(v, 0);
        }
        let e = groups.entry(key).or_insert_with(MultiPoly::zero);
        *e = &*e + &MultiPoly::from_terms([(rest, c.clone())]);
    }
    let zero_key = vec![0u16; unbounded.len()];
    if strict && !groups.contains_key(&zero_key) {
        return counterexample_or_undecided(p, dom, &unbounded, cell_mid(&cell), "constant coefficient vanishes");
    }
    for (key, coeff) in &groups {
        let is_const = *key == zero_key;
        match certify_bounded(coeff, cell.clone(), strict && is_const) {
            Bounded::Certified => {}
            Bounded::Negative(pt, v) if is_const => {
                let mut full = pt;
                for (&u, l) in unbounded.iter().zip(lower_bounds(dom, &unbounded)) {
                    full.insert(u, l);
                }
                return BoxOutcome::Counterexample(full, v);
            }
            Bounded::Negative(pt, _) => {
                return counterexample_or_undecided(p, dom, &unbounded, pt, "coefficient of a shifted variable");
            }
            Bounded::Undecided(cell) => return BoxOutcome::Undecided(cell),
        }
    }
    BoxOutcome::Certified
}

fn lower_bounds(dom: &BoxDomain, vars: &[Var]) -> Vec<Rational> {
    vars.iter()
        .map(|v| match dom.range(*v) {
            Some(Range::AtLeast(l)) => l.clone(),
            Some(Range::Closed(a, _)) => a.clone(),
            None => Rational::zero(),
        })
        .collect()
}

/// Probes the unbounded directions at a bounded point before giving up.
fn counterexample_or_undecided(
    p: &MultiPoly,
    dom: &BoxDomain,
    unbounded: &[Var],
    bounded_point: BTreeMap<Var, Rational>,
    why: &str,
) -> BoxOutcome {
    let lows = lower_bounds(dom, unbounded);
    for scale in [0i64, 1, 10, 1000, 1_000_000] {
        let mut pt = bounded_point.clone();
        for (&u, l) in unbounded.iter().zip(&lows) {
            pt.insert(u, l + rat(scale, 1));
        }
        if let Some(v) = p.eval(&pt) {
            if v.is_negative() {
                return BoxOutcome::Counterexample(pt, v);
            }
        }
    }
    BoxOutcome::Undecided(format!("{} at {:?}", why, bounded_point))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t() -> MultiPoly {
        MultiPoly::var(Var::T)
    }

    fn s() -> MultiPoly {
        MultiPoly::var(Var::S)
    }

    fn unit_t() -> BoxDomain {
        BoxDomain::new().closed(Var::T, rat(0, 1), rat(1, 1)).at_least(Var::S, rat(5, 1))
    }

    #[test]
    fn positive_quadratics_certify() {
        // 17t^2 - 33t + 24 has negative discriminant
        let p = MultiPoly::univariate(Var::T, &[rat(24, 1), rat(-33, 1), rat(17, 1)]);
        assert_eq!(certify_nonnegative(&p, &unit_t(), true), BoxOutcome::Certified);
    }

    #[test]
    fn touching_zero_is_nonnegative_but_not_positive() {
        let p = &MultiPoly::one() - &t();
        assert_eq!(certify_nonnegative(&p, &unit_t(), false), BoxOutcome::Certified);
        assert!(matches!(certify_nonnegative(&p, &unit_t(), true), BoxOutcome::Undecided(_)));
    }

    #[test]
    fn negative_somewhere_gives_counterexample() {
        // 4t^2 - 9t + 3 is negative near t = 1
        let p = MultiPoly::univariate(Var::T, &[rat(3, 1), rat(-9, 1), rat(4, 1)]);
        match certify_nonnegative(&p, &unit_t(), false) {
            BoxOutcome::Counterexample(pt, v) => {
                assert!(v.is_negative());
                assert_eq!(p.eval(&pt).unwrap(), v);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unbounded_direction_by_shifting() {
        // S - 5 + t S >= 0 for S >= 5
        let p = &(&s() - &MultiPoly::int(5)) + &(&t() * &s());
        assert_eq!(certify_nonnegative(&p, &unit_t(), false), BoxOutcome::Certified);
        // 5 - S fails at large S
        let q = &MultiPoly::int(4) - &s();
        assert!(matches!(certify_nonnegative(&q, &unit_t(), false), BoxOutcome::Counterexample(..)));
    }

    #[test]
    fn unknown_variable_reported() {
        let p = MultiPoly::var(Var::A);
        assert_eq!(certify_nonnegative(&p, &unit_t(), false), BoxOutcome::NotBoxVariable(Var::A));
    }

    #[test]
    fn certification_is_monotone_under_subboxes() {
        let p = MultiPoly::univariate(Var::T, &[rat(3, 1), rat(-9, 1), rat(4, 1)]);
        let dom = BoxDomain::new().closed(Var::T, rat(0, 1), rat(2, 5));
        assert_eq!(certify_nonnegative(&p, &dom, false), BoxOutcome::Certified);
        let sub = BoxDomain::new().closed(Var::T, rat(1, 10), rat(3, 10));
        assert_eq!(certify_nonnegative(&p, &sub, false), BoxOutcome::Certified);
    }
}
