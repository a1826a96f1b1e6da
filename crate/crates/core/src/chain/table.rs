//! Inner products among `u`, `P = a⊗h + h⊗a`, `Q = h⊗h`, `R = h⊗δ + δ⊗h`, and the
//! expansion of `|u + αP + βQ + γR|²`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::axioms::{one_minus_t, over_s, q, sum, v};
#[cfg(test)]
use super::axioms::k;
use super::ratfn::{Atom, RatFn};
use super::ChainError;
use crate::exact::{rat, Rational, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Entry {
    /// `⟨u, a⊗h⟩`
    UAh,
    /// `⟨u, h⊗h⟩`
    UHh,
    /// `⟨u, h⊗δ⟩`
    UHd,
    /// `⟨P, P⟩`
    PP,
    /// `⟨Q, Q⟩`
    QQ,
    /// `⟨R, R⟩`
    RR,
    PQ,
    PR,
    QR,
}

impl Entry {
    pub const ALL: [Entry; 9] =
        [Entry::UAh, Entry::UHh, Entry::UHd, Entry::PP, Entry::QQ, Entry::RR, Entry::PQ, Entry::PR, Entry::QR];

    /// Whether the entry is quoted from the source or re-derived here.
    pub fn source(self) -> EntrySource {
        match self {
            Entry::UAh | Entry::UHh | Entry::UHd => EntrySource::Quoted,
            _ => EntrySource::Derived,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EntrySource {
    Quoted,
    Derived,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearTable {
    entries: BTreeMap<Entry, RatFn>,
    /// `⟨u, X⊗Y + Y⊗X⟩ = factor · ⟨u, X⊗Y⟩` for `u` symmetric in its pairs.
    pub symmetrization: Rational,
}

impl Default for BilinearTable {
    fn default() -> Self {
        let (t, s, n, c, y) = (v(Var::T), v(Var::S), v(Var::N), v(Var::C), v(Var::Y));
        let ts2 = t.mul(&s.pow(2));
        let entries = [
            (
                Entry::UAh,
                sum(&[
                    v(Var::B).neg(),
                    v(Var::A).scale(&rat(-1, 2)),
                    y.mul(&c),
                    ts2.scale(&rat(1, 2)).over(Atom::OneMinusT, 1),
                ]),
            ),
            (Entry::UHh, c.neg()),
            (Entry::UHd, ts2.scale(&rat(-1, 2))),
            (Entry::PP, v(Var::F).mul(&s).scale(&rat(2, 1))),
            (Entry::QQ, s.pow(2)),
            (Entry::RR, n.mul(&s).scale(&rat(2, 1))),
            (Entry::PQ, RatFn::zero()),
            (Entry::PR, RatFn::zero()),
            (Entry::QR, RatFn::zero()),
        ]
        .into_iter()
        .collect();
        BilinearTable { entries, symmetrization: rat(2, 1) }
    }
}

impl BilinearTable {
    pub fn get(&self, e: Entry) -> &RatFn {
        &self.entries[&e]
    }

    pub fn set(&mut self, e: Entry, value: RatFn) {
        self.entries.insert(e, value);
    }

    /// The table with `delta` added to one entry.
    pub fn perturbed(&self, e: Entry, delta: &RatFn) -> Self {
        let mut out = self.clone();
        out.set(e, self.get(e).add(delta));
        out
    }
}

impl fmt::Display for BilinearTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (e, val) in &self.entries {
            writeln!(f, "{:?} = {}", e, val)?;
        }
        Ok(())
    }
}

/// `|u + αP + βQ + γR|²` expanded through the table; `|u|²` is the variable `USQ`.
pub fn expand_quadratic_form(table: &BilinearTable, alpha: &RatFn, beta: &RatFn, gamma: &RatFn) -> RatFn {
    let two = rat(2, 1);
    let sym = q(&table.symmetrization);
    let g = |e| table.get(e).clone();
    sum(&[
        v(Var::USq),
        alpha.mul(&sym).mul(&g(Entry::UAh)).scale(&two),
        beta.mul(&g(Entry::UHh)).scale(&two),
        gamma.mul(&sym).mul(&g(Entry::UHd)).scale(&two),
        alpha.pow(2).mul(&g(Entry::PP)),
        beta.pow(2).mul(&g(Entry::QQ)),
        gamma.pow(2).mul(&g(Entry::RR)),
        alpha.mul(beta).mul(&g(Entry::PQ)).scale(&two),
        alpha.mul(gamma).mul(&g(Entry::PR)).scale(&two),
        beta.mul(gamma).mul(&g(Entry::QR)).scale(&two),
    ])
}

/// `β = C/S²`
pub fn beta_choice() -> RatFn {
    over_s(&v(Var::C), 2)
}

/// `γ = t / (2(1-t))`
pub fn gamma_choice() -> RatFn {
    v(Var::T).scale(&rat(1, 2)).over(Atom::OneMinusT, 1)
}

/// The lower bound for `|u|²` that the expansion must produce, as a function of `α`.
pub fn quadratic_form_bound(alpha: &RatFn) -> RatFn {
    let (t, s, c, y, f) = (v(Var::T), v(Var::S), v(Var::C), v(Var::Y), v(Var::F));
    let ts2 = t.mul(&s.pow(2));
    let bracket = sum(&[
        v(Var::B).scale(&rat(2, 1)),
        v(Var::A),
        y.mul(&c).scale(&rat(-2, 1)),
        ts2.over(Atom::OneMinusT, 1).neg(),
    ]);
    sum(&[
        alpha.mul(&bracket).scale(&rat(2, 1)),
        alpha.pow(2).mul(&s).mul(&f).scale(&rat(-2, 1)),
        over_s(&c.pow(2), 2),
        t.mul(&ts2).scale(&rat(1, 2)).over(Atom::OneMinusT, 1),
    ])
}

/// Checks that the expansion with `β = C/S²`, `γ = t/(2(1-t))` and `n = (1-t)S` gives
/// exactly `|u|² >= quadratic_form_bound(α)` for symbolic `α`.
pub fn check_expansion(table: &BilinearTable) -> Result<(), ChainError> {
    let alpha = v(Var::Alpha);
    let qf = expand_quadratic_form(table, &alpha, &beta_choice(), &gamma_choice());
    // |u|² - qf is the implied lower bound
    let implied = v(Var::USq).sub(&qf);
    let n_value = one_minus_t().mul(&v(Var::S));
    let residual = implied.sub(&quadratic_form_bound(&alpha)).substitute(Var::N, &n_value)?;
    if residual.is_zero() {
        Ok(())
    } else {
        Err(ChainError::ResidualNonzero(residual.to_string()))
    }
}

/// Unused parameters collapse the form to `|u|²`.
pub fn trivial_expansion(table: &BilinearTable) -> RatFn {
    let z = RatFn::zero();
    expand_quadratic_form(table, &z, &z, &z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansion_matches_the_stated_bound() {
        check_expansion(&BilinearTable::default()).unwrap();
    }

    #[test]
    fn zero_parameters_give_the_norm() {
        assert_eq!(trivial_expansion(&BilinearTable::default()), v(Var::USq));
    }

    #[test]
    fn perturbed_uhh_leaves_two_beta() {
        let t = BilinearTable::default().perturbed(Entry::UHh, &k(1, 1));
        match check_expansion(&t) {
            Err(ChainError::ResidualNonzero(r)) => assert_eq!(r, over_s(&v(Var::C), 2).scale(&rat(-2, 1)).to_string()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn every_unit_perturbation_is_detected() {
        for e in Entry::ALL {
            let t = BilinearTable::default().perturbed(e, &k(1, 1));
            assert!(check_expansion(&t).is_err(), "{e:?}");
        }
    }

    #[test]
    fn single_symmetrization_fails() {
        let t = BilinearTable { symmetrization: rat(1, 1), ..BilinearTable::default() };
        assert!(check_expansion(&t).is_err());
    }
}
