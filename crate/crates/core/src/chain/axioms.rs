//! The hypotheses the chain starts from. Each is stored as `expr = 0` or `expr >= 0`.

use super::certificate::Hypothesis;
use super::ratfn::{Atom, RatFn};
use crate::exact::{rat, Rational, Var};

pub(crate) fn v(x: Var) -> RatFn {
    RatFn::var(x)
}

pub(crate) fn k(n: i64, d: i64) -> RatFn {
    RatFn::constant(rat(n, d))
}

pub(crate) fn q(c: &Rational) -> RatFn {
    RatFn::constant(c.clone())
}

/// `x₁ + x₂ + ...`
pub(crate) fn sum(xs: &[RatFn]) -> RatFn {
    xs.iter().fold(RatFn::zero(), |acc, x| acc.add(x))
}

/// `x₁ · x₂ · ...`
pub(crate) fn prod(xs: &[RatFn]) -> RatFn {
    xs.iter().fold(RatFn::one(), |acc, x| acc.mul(x))
}

pub(crate) fn one_minus_t() -> RatFn {
    k(1, 1).sub(&v(Var::T))
}

/// `A - 2B`
pub(crate) fn a_minus_2b() -> RatFn {
    v(Var::A).sub(&v(Var::B).scale(&rat(2, 1)))
}

/// `A - B`
pub(crate) fn a_minus_b() -> RatFn {
    v(Var::A).sub(&v(Var::B))
}

/// `A + 2B`
pub(crate) fn a_plus_2b() -> RatFn {
    v(Var::A).add(&v(Var::B).scale(&rat(2, 1)))
}

/// `4t² - 9t + 3`, whose sign selects the branch.
pub(crate) fn branch_quadratic() -> RatFn {
    let t = v(Var::T);
    sum(&[t.pow(2).scale(&rat(4, 1)), t.scale(&rat(-9, 1)), k(3, 1)])
}

/// `x / S^e`
pub(crate) fn over_s(x: &RatFn, e: u32) -> RatFn {
    x.over(Atom::S, e)
}

/// Knobs that tests perturb.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomConfig {
    /// Coefficient `c` in `C² <= c (A+2B) t S²`.
    pub ax6_coefficient: Rational,
}

impl Default for AxiomConfig {
    fn default() -> Self {
        AxiomConfig { ax6_coefficient: rat(1, 3) }
    }
}

/// Base hypotheses over `t, S, n, A, B, C, F3SQ, F4, f, y, USQ, HSQ`.
pub fn axioms(cfg: &AxiomConfig) -> Vec<Hypothesis> {
    let (t, s, n) = (v(Var::T), v(Var::S), v(Var::N));
    let (a, c, f) = (v(Var::A), v(Var::C), v(Var::F));
    let (f3sq, f4, y) = (v(Var::F3Sq), v(Var::F4), v(Var::Y));
    let (usq, hsq) = (v(Var::USq), v(Var::HSq));
    let ts = t.mul(&s);
    vec![
        Hypothesis::eq("AX1", n.sub(&one_minus_t().mul(&s)), "trace split S - n = tS"),
        // multiplied through by n > 0
        Hypothesis::eq(
            "AX2",
            sum(&[n.mul(&sum(&[s.mul(&f), s.mul(&f4).neg(), f3sq.clone()])), s.pow(3)]),
            "norm of a in terms of f4, f3 and S",
        ),
        Hypothesis::eq(
            "AX3",
            sum(&[n.sub(&s).mul(&y).mul(&s), c.scale(&rat(2, 1))]),
            "Laplacian of the trace of h cubed, with f3 = yS",
        ),
        Hypothesis::eq(
            "AX4",
            sum(&[s.mul(&f4), f3sq.neg(), s.pow(2).neg(), a_minus_2b().neg()]),
            "curvature identity for S f4 - f3²",
        ),
        Hypothesis::ge(
            "AX5",
            sum(&[ts.mul(&f4), a.scale(&rat(-2, 1)), v(Var::B).neg()]),
            "maximum principle at the extremal point",
        ),
        Hypothesis::ge(
            "AX6",
            q(&cfg.ax6_coefficient).mul(&a_plus_2b()).mul(&ts).mul(&s).sub(&c.pow(2)),
            "Cauchy-Schwarz bound on C",
        ),
        Hypothesis::ge(
            "AX8",
            k(2, 3).mul(&ts).mul(&s.pow(2)).sub(&a_minus_b()),
            "pinching bound on A - B",
        ),
        Hypothesis::ge("AX9.A", a.clone(), "A >= 0"),
        Hypothesis::ge("AX9.A+2B", a_plus_2b(), "A + 2B >= 0"),
        Hypothesis::ge("AX9.A-B", a_minus_b(), "A - B >= 0"),
        Hypothesis::ge("AX9.F3SQ", f3sq.clone(), "f3² >= 0"),
        Hypothesis::ge("AX9.f", f.clone(), "f >= 0"),
        Hypothesis::ge("AX9.n-5", n.sub(&k(5, 1)), "n >= 5"),
        Hypothesis::eq("DEF.y", f3sq.sub(&y.pow(2).mul(&s.pow(2))), "y = f3 / S"),
        Hypothesis::eq(
            "H.trace",
            sum(&[
                hsq.clone(),
                s.mul(&s.sub(&n)).mul(&sum(&[s.clone(), n.scale(&rat(-2, 1)), k(-3, 1)])).neg(),
                a_minus_2b().scale(&rat(-3, 1)),
            ]),
            "squared norm of the fourth-order tensor",
        ),
        Hypothesis::eq(
            "H.udec",
            sum(&[
                hsq,
                usq.neg(),
                sum(&[s.mul(&f4), f3sq.neg(), s.pow(2).scale(&rat(-2, 1)), n.mul(&s)]).scale(&rat(-3, 2)),
            ]),
            "orthogonal decomposition of the fourth-order tensor",
        ),
    ]
}

/// `a·t·S³ - 3(A - B) >= 0`, the bootstrap bound with coefficient `a`.
pub fn bootstrap_bound(a: &Rational) -> Hypothesis {
    let (t, s) = (v(Var::T), v(Var::S));
    Hypothesis::ge("BOOT", q(a).mul(&t).mul(&s.pow(3)).sub(&a_minus_b().scale(&rat(3, 1))), "iterated bound on A - B")
}
