//! Stored multiplier certificates and their exact checking.
//!
//! A certificate for `goal ⋈ 0` (⋈ is `=` or `>=`) lists terms `m_i · Π h_ij` over named
//! hypotheses. The residual `scale·goal - Σ m_i Π h_ij` is reduced by eliminations
//! `v := e` (each solved from an equality hypothesis linear in `v`) and by `w² = d`.
//! It must then vanish, or for inequalities be certified nonnegative on the box.
//! Multipliers of inequality products must be nonnegative and `scale` positive on the box.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use super::boxcert::{certify_nonnegative, BoxDomain, BoxOutcome};
use super::ratfn::RatFn;
use crate::exact::{Rational, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// `expr = 0`
    Eq,
    /// `expr >= 0`
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Eq => "= 0",
            Relation::Ge => ">= 0",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypothesis {
    pub name: String,
    pub relation: Relation,
    pub expr: RatFn,
    /// Universally quantified parameters that a certificate may bind.
    pub params: Vec<Var>,
    pub description: String,
}

impl Hypothesis {
    pub fn new(name: &str, relation: Relation, expr: RatFn, description: &str) -> Self {
        Hypothesis { name: name.to_string(), relation, expr, params: Vec::new(), description: description.to_string() }
    }

    pub fn eq(name: &str, expr: RatFn, description: &str) -> Self {
        Self::new(name, Relation::Eq, expr, description)
    }

    pub fn ge(name: &str, expr: RatFn, description: &str) -> Self {
        Self::new(name, Relation::Ge, expr, description)
    }

    pub fn with_params(mut self, params: &[Var]) -> Self {
        self.params = params.to_vec();
        self
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} {}", self.name, self.expr, self.relation)
    }
}

/// Named hypotheses available to certificates.
#[derive(Clone, Debug, Default)]
pub struct Env {
    hyps: BTreeMap<String, Hypothesis>,
}

impl Env {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, h: Hypothesis) {
        self.hyps.insert(h.name.clone(), h);
    }

    pub fn get(&self, name: &str) -> Option<&Hypothesis> {
        self.hyps.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.hyps.contains_key(name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub multiplier: RatFn,
    pub factors: Vec<String>,
}

impl Term {
    pub fn new(multiplier: RatFn, factors: &[&str]) -> Self {
        Term { multiplier, factors: factors.iter().map(|s| s.to_string()).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub label: String,
    pub goal: RatFn,
    pub relation: Relation,
    pub goal_scale: RatFn,
    pub bindings: Vec<(Var, RatFn)>,
    pub terms: Vec<Term>,
    /// Case hypotheses local to this certificate.
    pub local: Vec<Hypothesis>,
    pub eliminations: Vec<(Var, String)>,
    pub radical: Option<(Var, Rational)>,
    pub domain: BoxDomain,
    /// Demand an identically vanishing residual even for an inequality.
    pub exact: bool,
}

impl Certificate {
    pub fn new(label: &str, goal: RatFn, relation: Relation, domain: BoxDomain) -> Self {
        Certificate {
            label: label.to_string(),
            goal,
            relation,
            goal_scale: RatFn::one(),
            bindings: Vec::new(),
            terms: Vec::new(),
            local: Vec::new(),
            eliminations: Vec::new(),
            radical: None,
            domain,
            exact: false,
        }
    }

    pub fn term(mut self, multiplier: RatFn, factors: &[&str]) -> Self {
        self.terms.push(Term::new(multiplier, factors));
        self
    }

    pub fn scale(mut self, s: RatFn) -> Self {
        self.goal_scale = s;
        self
    }

    pub fn bind(mut self, v: Var, value: RatFn) -> Self {
        self.bindings.push((v, value));
        self
    }

    pub fn assume(mut self, h: Hypothesis) -> Self {
        self.local.push(h);
        self
    }

    pub fn eliminate(mut self, v: Var, by: &str) -> Self {
        self.eliminations.push((v, by.to_string()));
        self
    }

    pub fn radical(mut self, v: Var, d: Rational) -> Self {
        self.radical = Some((v, d));
        self
    }

    pub fn exact(mut self) -> Self {
        self.exact = true;
        self
    }

    /// Names of environment hypotheses the certificate refers to.
    pub fn references(&self) -> Vec<String> {
        let local: Vec<&str> = self.local.iter().map(|h| h.name.as_str()).collect();
        let mut out: Vec<String> = self
            .terms
            .iter()
            .flat_map(|t| t.factors.iter().cloned())
            .chain(self.eliminations.iter().map(|(_, n)| n.clone()))
            .filter(|n| !local.contains(&n.as_str()))
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Verified,
    Failed { reason: String, residual: Option<String> },
    Undecided { reason: String },
}

impl Outcome {
    pub fn is_verified(&self) -> bool {
        matches!(self, Outcome::Verified)
    }

    fn failed(reason: impl Into<String>) -> Self {
        Outcome::Failed { reason: reason.into(), residual: None }
    }
}

fn lookup<'a>(cert: &'a Certificate, env: &'a Env, name: &str) -> Option<&'a Hypothesis> {
    cert.local.iter().find(|h| h.name == name).or_else(|| env.get(name))
}

fn sign_check(p: &RatFn, dom: &BoxDomain, strict: bool, what: &str) -> Result<(), Outcome> {
    if let Some(c) = p.num().constant_value() {
        let ok = if strict { c.is_positive() } else { !c.is_negative() };
        return if ok { Ok(()) } else { Err(Outcome::failed(format!("{} {} has the wrong sign", what, p))) };
    }
    match certify_nonnegative(p.num(), dom, strict) {
        BoxOutcome::Certified => Ok(()),
        BoxOutcome::Counterexample(pt, v) => {
            Err(Outcome::failed(format!("{} {} takes value {} at {:?}", what, p, v, pt)))
        }
        BoxOutcome::Undecided(cell) => {
            Err(Outcome::Undecided { reason: format!("sign of {} {} undecided on {}", what, p, cell) })
        }
        BoxOutcome::NotBoxVariable(v) => {
            Err(Outcome::failed(format!("{} {} depends on {} outside the box", what, p, v)))
        }
    }
}

/// Computes the reduced residual, or the reason it cannot be formed.
pub fn residual(cert: &Certificate, env: &Env) -> Result<RatFn, Outcome> {
    let mut combo = RatFn::zero();
    for term in &cert.terms {
        let mut prod = RatFn::one();
        let mut rel = Relation::Ge;
        for name in &term.factors {
            let h = lookup(cert, env, name).ok_or_else(|| Outcome::failed(format!("unknown hypothesis {}", name)))?;
            let mut e = h.expr.clone();
            for (v, val) in &cert.bindings {
                if h.params.contains(v) {
                    e = e.substitute(*v, val).map_err(|err| Outcome::failed(err.to_string()))?;
                }
            }
            if h.relation == Relation::Eq {
                rel = Relation::Eq;
            }
            prod = prod.mul(&e);
        }
        if rel == Relation::Ge {
            if cert.relation == Relation::Eq {
                return Err(Outcome::failed(format!(
                    "identity uses inequality product {}",
                    term.factors.join("*")
                )));
            }
            sign_check(&term.multiplier, &cert.domain, false, "multiplier")?;
        }
        combo = combo.add(&term.multiplier.mul(&prod));
    }
    if cert.goal_scale != RatFn::one() {
        sign_check(&cert.goal_scale, &cert.domain, true, "goal scale")?;
    }
    let mut r = cert.goal_scale.mul(&cert.goal).sub(&combo);
    for (v, name) in &cert.eliminations {
        let h = lookup(cert, env, name).ok_or_else(|| Outcome::failed(format!("unknown hypothesis {}", name)))?;
        if h.relation != Relation::Eq {
            return Err(Outcome::failed(format!("elimination of {} needs an equality, {} is not", v, name)));
        }
        let value = h.expr.solve_linear(*v).map_err(|e| Outcome::failed(format!("{}: {}", name, e)))?;
        r = r.substitute(*v, &value).map_err(|e| Outcome::failed(e.to_string()))?;
    }
    if let Some((v, d)) = &cert.radical {
        r = r.reduce_radical(*v, d);
    }
    Ok(r)
}

/// Checks a certificate against the hypotheses in `env`.
pub fn check(cert: &Certificate, env: &Env) -> Outcome {
    let r = match residual(cert, env) {
        Ok(r) => r,
        Err(o) => return o,
    };
    if r.is_zero() {
        return Outcome::Verified;
    }
    let shown = Some(r.to_string());
    if cert.exact || cert.relation == Relation::Eq {
        return Outcome::Failed { reason: "residual is not identically zero".into(), residual: shown };
    }
    match certify_nonnegative(r.num(), &cert.domain, false) {
        BoxOutcome::Certified => Outcome::Verified,
        BoxOutcome::Counterexample(pt, v) => Outcome::Failed {
            reason: format!("residual numerator is {} at {:?}", v, pt),
            residual: shown,
        },
        BoxOutcome::Undecided(cell) => Outcome::Undecided { reason: format!("residual undecided on {}", cell) },
        BoxOutcome::NotBoxVariable(v) => Outcome::Failed {
            reason: format!("residual depends on {} outside the box", v),
            residual: shown,
        },
    }
}

impl Certificate {
    /// The conclusion as a hypothesis for later steps.
    pub fn conclusion(&self, name: &str, description: &str) -> Hypothesis {
        Hypothesis::new(name, self.relation, self.goal.clone(), description)
    }
}

/// `1` as a multiplier.
pub fn unit() -> RatFn {
    RatFn::constant(Rational::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, MultiPoly};

    fn v(x: Var) -> RatFn {
        RatFn::var(x)
    }

    fn dom() -> BoxDomain {
        BoxDomain::new().closed(Var::T, rat(0, 1), rat(1, 1)).at_least(Var::S, rat(5, 1))
    }

    fn env() -> Env {
        let mut e = Env::new();
        // A - B >= 0 and A + 2B >= 0
        e.insert(Hypothesis::ge("H1", v(Var::A).sub(&v(Var::B)), ""));
        e.insert(Hypothesis::ge("H2", v(Var::A).add(&v(Var::B).scale(&rat(2, 1))), ""));
        // f - A/S = 0
        e.insert(Hypothesis::eq("E1", v(Var::F).sub(&v(Var::A).over(super::super::ratfn::Atom::S, 1)), ""));
        e
    }

    #[test]
    fn nonnegative_combination() {
        // 3A = 2(A - B) + (A + 2B)
        let goal = v(Var::A).scale(&rat(3, 1));
        let c = Certificate::new("c", goal, Relation::Ge, dom())
            .term(RatFn::constant(rat(2, 1)), &["H1"])
            .term(unit(), &["H2"]);
        assert_eq!(check(&c, &env()), Outcome::Verified);
    }

    #[test]
    fn negative_multiplier_rejected() {
        let goal = v(Var::B).scale(&rat(-1, 1)).sub(&v(Var::A));
        let c = Certificate::new("c", goal, Relation::Ge, dom()).term(RatFn::constant(rat(-1, 1)), &["H1"]);
        assert!(matches!(check(&c, &env()), Outcome::Failed { .. }));
    }

    #[test]
    fn elimination_by_linear_equality() {
        // S f - A = 0 follows from E1
        let goal = v(Var::S).mul(&v(Var::F)).sub(&v(Var::A));
        let c = Certificate::new("c", goal, Relation::Eq, dom()).eliminate(Var::F, "E1");
        assert_eq!(check(&c, &env()), Outcome::Verified);
    }

    #[test]
    fn box_residual_certified_or_refuted() {
        // goal t S >= 0 with no hypotheses: residual t S
        let ok = Certificate::new("c", v(Var::T).mul(&v(Var::S)), Relation::Ge, dom());
        assert_eq!(check(&ok, &env()), Outcome::Verified);
        let bad = Certificate::new("c", v(Var::T).sub(&RatFn::constant(rat(1, 2))), Relation::Ge, dom());
        assert!(matches!(check(&bad, &env()), Outcome::Failed { .. }));
    }

    #[test]
    fn residual_outside_box_fails() {
        let c = Certificate::new("c", v(Var::A), Relation::Ge, dom());
        match check(&c, &env()) {
            Outcome::Failed { residual, .. } => assert_eq!(residual.unwrap(), "A"),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn parameters_are_bound_before_combination() {
        let mut e = env();
        // alpha^2 (A - B) >= 0 for every alpha
        e.insert(
            Hypothesis::ge("P", v(Var::Alpha).pow(2).mul(&v(Var::A).sub(&v(Var::B))), "").with_params(&[Var::Alpha]),
        );
        let goal = RatFn::from(&MultiPoly::var(Var::A) - &MultiPoly::var(Var::B)).scale(&rat(4, 1));
        let c = Certificate::new("c", goal, Relation::Ge, dom()).bind(Var::Alpha, RatFn::constant(rat(2, 1))).term(unit(), &["P"]);
        assert_eq!(check(&c, &e), Outcome::Verified);
    }
}
