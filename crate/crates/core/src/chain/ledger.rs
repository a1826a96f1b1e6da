//! The ordered chain of steps from the curvature identities to the linear lower bounds on `S`.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};
use serde::Serialize;

use super::axioms::{
    a_minus_b, axioms, bootstrap_bound, branch_quadratic, k, one_minus_t, over_s, prod, q, sum, v, AxiomConfig,
};
use super::boxcert::BoxDomain;
use super::certificate::{check, residual, Certificate, Env, Hypothesis, Outcome, Relation};
use super::ratfn::{Atom, RatFn};
use super::table::{beta_choice, check_expansion, expand_quadratic_form, gamma_choice, quadratic_form_bound, BilinearTable};
use super::ChainError;
use crate::bootstrap;
use crate::constants::{self, t_quad_root_low, surd_gap};
use crate::exact::roots::isolate_univariate;
use crate::exact::{parse_decimal, rat, DyadicInterval, QuadraticSurd, Rational, UniPoly, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Identity,
    Implication,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SideCheck {
    pub label: String,
    pub passed: bool,
}

impl SideCheck {
    fn new(label: impl Into<String>, passed: bool) -> Self {
        SideCheck { label: label.into(), passed }
    }
}

/// A certificate plus the hypothesis it makes available to later certificates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Link {
    pub certificate: Certificate,
    pub provides: Option<Hypothesis>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub name: String,
    pub anchor: String,
    pub kind: StepKind,
    pub depends: Vec<String>,
    pub links: Vec<Link>,
    /// Pairs of link indices whose case hypotheses must be exhaustive (`h₁ + h₂ ≡ 0`).
    pub case_splits: Vec<(usize, usize)>,
    pub side_checks: Vec<SideCheck>,
}

impl Step {
    fn new(name: &str, anchor: &str, kind: StepKind, depends: &[&str]) -> Self {
        Step {
            name: name.to_string(),
            anchor: anchor.to_string(),
            kind,
            depends: depends.iter().map(|s| s.to_string()).collect(),
            links: Vec::new(),
            case_splits: Vec::new(),
            side_checks: Vec::new(),
        }
    }

    fn link(mut self, certificate: Certificate, provides: Option<Hypothesis>) -> Self {
        self.links.push(Link { certificate, provides });
        self
    }

    /// Adds a certificate whose goal becomes a hypothesis named after the step.
    fn proves(self, certificate: Certificate, description: &str) -> Self {
        let name = self.name.clone();
        let h = certificate.conclusion(&name, description);
        self.link(certificate, Some(h))
    }

    fn cases(mut self, i: usize, j: usize) -> Self {
        self.case_splits.push((i, j));
        self
    }

    fn side(mut self, label: impl Into<String>, passed: bool) -> Self {
        self.side_checks.push(SideCheck::new(label, passed));
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Verified,
    Failed,
    Undecided,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepReport {
    pub step: String,
    pub anchor: String,
    pub kind: StepKind,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub detail: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LedgerConfig {
    pub axioms: AxiomConfig,
    /// Added to the optimal `α` in the master combination.
    pub alpha_shift: Rational,
    pub table: BilinearTable,
    /// Bootstrap coefficient for the refined chain; derived by iteration when absent.
    pub a7: Option<Rational>,
    /// Split point of the refined chain.
    pub t_split: Rational,
    pub precision: u32,
}

impl Default for LedgerConfig {
    fn default() -> Self {
        LedgerConfig {
            axioms: AxiomConfig::default(),
            alpha_shift: Rational::zero(),
            table: BilinearTable::default(),
            a7: None,
            t_split: constants::t_star(),
            precision: crate::exact::DEFAULT_PRECISION,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Ledger {
    pub axioms: Vec<Hypothesis>,
    pub steps: Vec<Step>,
}

fn base_domain() -> BoxDomain {
    BoxDomain::new().closed(Var::T, rat(0, 1), rat(1, 1)).at_least(Var::S, rat(5, 1))
}

/// `Σ_k c_k p_k`
fn power_sum(coeffs: &[RatFn], p: &[RatFn]) -> RatFn {
    coeffs.iter().zip(p).fold(RatFn::zero(), |acc, (c, pk)| acc.add(&c.mul(pk)))
}

fn convolve(a: &[RatFn], b: &[RatFn]) -> Vec<RatFn> {
    let mut out = vec![RatFn::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

/// Power sums `Σλ^k`, `k = 0..4`, of the eigenvalues of `h`.
fn eigen_power_sums() -> Vec<RatFn> {
    let s = v(Var::S);
    vec![v(Var::N), RatFn::zero(), s.clone(), v(Var::Y).mul(&s), v(Var::F4)]
}

fn step_s1() -> Step {
    let s = v(Var::S);
    let p = eigen_power_sums();
    // a(λ) = λ² - yλ - S/n in the eigenbasis of h
    let a = vec![s.over(Atom::N, 1).neg(), v(Var::Y).neg(), k(1, 1)];
    let lam = vec![RatFn::zero(), k(1, 1)];
    let norm = power_sum(&convolve(&a, &a), &p).sub(&v(Var::F));
    let against_h = power_sum(&convolve(&a, &lam), &p);
    let trace = power_sum(&a, &p);
    let d = base_domain;
    Step::new("S1", "norm of the traceless quadratic part a", StepKind::Identity, &[])
        .link(
            Certificate::new("|a|^2 = f", norm, Relation::Eq, d())
                .eliminate(Var::F, "AX2")
                .eliminate(Var::F3Sq, "DEF.y"),
            None,
        )
        .link(Certificate::new("<a, h> = 0", against_h, Relation::Eq, d()), None)
        .link(Certificate::new("tr a = 0", trace, Relation::Eq, d()), None)
}

fn step_s2(cfg: &LedgerConfig) -> Step {
    let alpha = v(Var::Alpha);
    let gram = Hypothesis::ge("GRAM", expand_quadratic_form(&cfg.table, &alpha, &beta_choice(), &gamma_choice()), "")
        .with_params(&[Var::Alpha]);
    let goal = v(Var::USq).sub(&quadratic_form_bound(&alpha));
    let cert = Certificate::new("|u|^2 lower bound", goal, Relation::Ge, base_domain())
        .assume(gram)
        .term(k(1, 1), &["GRAM"])
        .eliminate(Var::N, "AX1")
        .exact();
    let provides = cert.conclusion("S2", "lower bound for |u|² for every α").with_params(&[Var::Alpha]);
    Step::new("S2", "expansion of the nonnegative quadratic form", StepKind::Implication, &["S1"])
        .link(cert, Some(provides))
        .side("table expansion reduces exactly", check_expansion(&cfg.table).is_ok())
}

fn step_s3() -> Step {
    let (t, s, y) = (v(Var::T), v(Var::S), v(Var::Y));
    let goal = prod(&[t.clone(), s.pow(2), y.clone()]).sub(&v(Var::C).scale(&rat(2, 1)));
    Step::new("S3", "Laplacian identity t S f3 = 2C", StepKind::Identity, &[]).proves(
        Certificate::new("tS²y = 2C", goal, Relation::Eq, base_domain())
            .term(k(-1, 1), &["AX3"])
            .term(y.mul(&s), &["AX1"]),
        "tS²y - 2C = 0",
    )
}

fn step_s4() -> Step {
    let s = v(Var::S);
    let goal = sum(&[
        s.mul(&v(Var::F)),
        v(Var::T).mul(&s.pow(2)).over(Atom::OneMinusT, 1),
        super::axioms::a_minus_2b().neg(),
    ]);
    Step::new("S4", "norm identity for Sf", StepKind::Identity, &[]).proves(
        Certificate::new("Sf + tS²/(1-t) = A - 2B", goal, Relation::Eq, base_domain())
            .eliminate(Var::F, "AX2")
            .eliminate(Var::N, "AX1")
            .eliminate(Var::F3Sq, "AX4"),
        "Sf + tS²/(1-t) - (A - 2B) = 0",
    )
}

/// `S(S-n)(S-2n)`
fn cubic_sn() -> RatFn {
    let (s, n) = (v(Var::S), v(Var::N));
    prod(&[s.clone(), s.sub(&n), s.sub(&n.scale(&rat(2, 1)))])
}

fn step_s5() -> Step {
    let (s, n) = (v(Var::S), v(Var::N));
    let goal = sum(&[
        cubic_sn(),
        v(Var::USq).neg(),
        s.mul(&s.sub(&n)).scale(&rat(-3, 2)),
        super::axioms::a_minus_2b().scale(&rat(3, 2)),
    ]);
    Step::new("S5", "decomposition of the fourth-order tensor norm", StepKind::Identity, &[]).proves(
        Certificate::new("S(S-n)(S-2n) = |u|² + ...", goal, Relation::Eq, base_domain())
            .term(k(1, 1), &["H.udec"])
            .term(k(-1, 1), &["H.trace"])
            .term(k(3, 2), &["AX4"]),
        "S(S-n)(S-2n) - |u|² - (3/2)S(S-n) + (3/2)(A-2B) = 0",
    )
}

fn step_s6() -> Step {
    let (t, s) = (v(Var::T), v(Var::S));
    let goal = sum(&[
        t.mul(&v(Var::F3Sq)),
        k(2, 1).sub(&t).mul(&v(Var::A)).neg(),
        k(1, 1).add(&t.scale(&rat(2, 1))).mul(&v(Var::B)).neg(),
        t.mul(&s.pow(2)),
    ]);
    Step::new("S6", "lower bound for t f3² from the maximum principle", StepKind::Implication, &[]).proves(
        Certificate::new("t f3² >= (2-t)A + (1+2t)B - tS²", goal, Relation::Ge, base_domain())
            .term(k(1, 1), &["AX5"])
            .term(t.neg(), &["AX4"]),
        "t f3² - (2-t)A - (1+2t)B + tS² >= 0",
    )
}

fn step_s7() -> Step {
    let s = v(Var::S);
    let goal = a_minus_b().scale(&rat(1, 3)).sub(&prod(&[one_minus_t(), s.clone(), v(Var::F)]));
    Step::new("S7", "upper bound for (1-t)Sf", StepKind::Implication, &["S3", "S4", "S6"]).proves(
        Certificate::new("(1-t)Sf <= (A-B)/3", goal, Relation::Ge, base_domain())
            .term(k(1, 1), &["S6"])
            .term(k(4, 1).over(Atom::T, 1).over(Atom::S, 2), &["AX6"])
            .eliminate(Var::C, "S3")
            .eliminate(Var::F3Sq, "DEF.y")
            .eliminate(Var::F, "S4"),
        "(A-B)/3 - (1-t)Sf >= 0",
    )
}

/// Goal of the master combination: `S(S-n)(S-2n) - q(A-B)/(3(1-t)) + 2t²S²/(1-t) >= 0`.
fn master_goal() -> RatFn {
    let (t, s) = (v(Var::T), v(Var::S));
    sum(&[
        cubic_sn(),
        branch_quadratic().mul(&a_minus_b()).scale(&rat(-1, 3)).over(Atom::OneMinusT, 1),
        t.pow(2).mul(&s.pow(2)).scale(&rat(2, 1)).over(Atom::OneMinusT, 1),
    ])
}

fn step_s8(cfg: &LedgerConfig) -> Step {
    let t = v(Var::T);
    let alpha = sum(&[k(-3, 2), t.scale(&rat(2, 1)), q(&cfg.alpha_shift)]);
    let sigma6 = sum(&[t.pow(2).scale(&rat(8, 1)), t.scale(&rat(-15, 1)), k(9, 1)]).over(Atom::OneMinusT, 1);
    let z = sum(&[t.pow(2).scale(&rat(17, 1)), t.scale(&rat(-33, 1)), k(24, 1)])
        .over(Atom::T, 1)
        .over(Atom::OneMinusT, 1);
    Step::new("S8", "master cancellation", StepKind::Implication, &["S2", "S3", "S4", "S5", "S6"]).proves(
        Certificate::new("master inequality", master_goal(), Relation::Ge, base_domain())
            .bind(Var::Alpha, alpha)
            .term(k(1, 1), &["S2"])
            .term(sigma6, &["S6"])
            .term(over_s(&z, 2), &["AX6"])
            .eliminate(Var::USq, "S5")
            .eliminate(Var::N, "AX1")
            .eliminate(Var::F, "S4")
            .eliminate(Var::C, "S3")
            .eliminate(Var::F3Sq, "DEF.y")
            .exact(),
        "master inequality",
    )
}

fn t_box(lo: Rational, hi: Rational) -> BoxDomain {
    BoxDomain::new().closed(Var::T, lo, hi).at_least(Var::S, rat(5, 1))
}

fn step_s9(precision: u32) -> Step {
    let t = v(Var::T);
    let low = Hypothesis::ge("BRANCH.low", branch_quadratic(), "4t² - 9t + 3 >= 0");
    let cert = Certificate::new("t >= 5/12 on the low branch", t.scale(&rat(12, 1)).sub(&k(5, 1)), Relation::Ge, t_box(rat(0, 1), rat(1, 2)))
        .assume(low)
        .term(one_minus_t().over(Atom::T, 1).over(Atom::S, 2), &["S8"])
        .term(k(1, 3).over(Atom::T, 1).over(Atom::S, 2), &["BRANCH.low", "AX9.A-B"])
        .term(k(1, 1).sub(&t.scale(&rat(2, 1))), &["AX9.n-5"])
        .eliminate(Var::N, "AX1");
    // the low branch inside [0, 1] is exactly [0, t₀] with t₀ < 5/12 <= 1/2
    let t0 = t_quad_root_low();
    let five_twelfths = QuadraticSurd::rational(rat(5, 12));
    let exact_gap = five_twelfths.try_cmp(&t0).map(|o| o == Ordering::Greater).unwrap_or(false);
    let enc = t0.enclosure(precision);
    let interval_gap = enc.certainly_lt(&DyadicInterval::from_rational(&rat(5, 12), precision));
    let quad = UniPoly::from_ints(&[3, -9, 4]);
    let unit = DyadicInterval::from_int(0, precision).hull(&DyadicInterval::from_int(1, precision));
    let one_root = isolate_univariate(&quad, &unit)
        .ok()
        .map(|iso| iso.len() == 1 && iso.intervals[0].intersect(&enc).is_some() && iso.verify())
        .unwrap_or(false);
    let q0_positive = quad.eval(&rat(0, 1)).is_positive();
    let gap = surd_gap();
    let gap_matches = t0
        .scale(&rat(2, 1))
        .checked_div(&QuadraticSurd::rational(rat(1, 1)).checked_sub(&t0).unwrap_or_else(|_| t0.clone()))
        .map(|g| g == gap)
        .unwrap_or(false);
    Step::new("S9", "the branch 4t² - 9t + 3 >= 0 is empty", StepKind::Implication, &["S8"])
        .link(cert, None)
        .side("5/12 > (9 - √33)/8 exactly", exact_gap)
        .side("5/12 > (9 - √33)/8 by interval", interval_gap)
        .side("4t² - 9t + 3 has one root in [0, 1], at (9 - √33)/8, and is positive at 0", one_root && q0_positive)
        .side("2t₀/(1 - t₀) = (√33 - 3)/2", gap_matches)
}

fn w_domain(base: BoxDomain, precision: u32) -> BoxDomain {
    let w = QuadraticSurd::sqrt(465).enclosure(precision);
    base.closed(Var::W, w.lo_rational(), w.hi_rational())
}

fn step_s10(precision: u32) -> Step {
    let (t, s, n, w) = (v(Var::T), v(Var::S), v(Var::N), v(Var::W));
    let qd = branch_quadratic();
    let high = Hypothesis::ge("BRANCH.high", qd.neg(), "4t² - 9t + 3 <= 0");
    let p316 = sum(&[t.pow(2).scale(&rat(26, 1)), t.scale(&rat(-45, 1)), k(15, 1)]);
    let a_cert = Certificate::new("18t >= (26t² - 45t + 15)S", t.scale(&rat(18, 1)).sub(&p316.mul(&s)), Relation::Ge, base_domain())
        .assume(high)
        .term(one_minus_t().scale(&rat(9, 1)).over(Atom::T, 1).over(Atom::S, 2), &["S8"])
        .term(k(3, 1).over(Atom::T, 1).over(Atom::S, 2), &["BRANCH.high", "AX8"])
        .eliminate(Var::N, "AX1");
    let a_hyp = a_cert.conclusion("S10.quadratic", "18t - (26t² - 45t + 15)S >= 0");

    // r = (45 - √465)/52, corr = (9/26)(3√465/31 - 1)
    let r = k(45, 52).sub(&w.scale(&rat(1, 52)));
    let corr = w.scale(&rat(27, 806)).sub(&k(9, 26));
    let line_goal = t.sub(&r).mul(&s).add(&corr);
    let d = |b| w_domain(b, precision);
    let below = Hypothesis::ge("case.below", r.sub(&t), "t <= r");
    let above = Hypothesis::ge("case.above", t.sub(&r), "t >= r");
    let below_cert = Certificate::new("(t - r)S + corr >= 0 for t <= r", line_goal.clone(), Relation::Ge, d(base_domain()))
        .scale(k(45, 2).add(&w.scale(&rat(1, 2))).sub(&t.scale(&rat(26, 1))))
        .assume(below)
        .term(k(1, 1), &["S10.quadratic"])
        .term(w.scale(&rat(27, 31)).add(&k(9, 1)), &["case.below"])
        .radical(Var::W, rat(465, 1));
    let above_cert = Certificate::new("(t - r)S + corr >= 0 for t >= r", line_goal.clone(), Relation::Ge, d(base_domain()))
        .assume(above)
        .term(s.clone(), &["case.above"])
        .radical(Var::W, rat(465, 1));
    let line_hyp = Hypothesis::ge("S10.line", line_goal, "(t - r)S + corr >= 0");

    let slope = w.sub(&k(7, 1)).scale(&rat(1, 8));
    let offset = k(9, 4).sub(&w.scale(&rat(9, 124)));
    let final_goal = sum(&[s.clone(), slope.mul(&n).neg(), offset]);
    let final_cert = Certificate::new("S >= ((√465 - 7)/8) n - offset", final_goal, Relation::Ge, d(base_domain()))
        .term(slope, &["S10.line"])
        .eliminate(Var::N, "AX1")
        .radical(Var::W, rat(465, 1));

    let r_exact = constants::t_465_low();
    let r_is_root = {
        let r2 = r_exact.checked_mul(&r_exact);
        r2.and_then(|x| x.scale(&rat(26, 1)).checked_sub(&r_exact.scale(&rat(45, 1))))
            .map(|x| x.add_rational(&rat(15, 1)) == QuadraticSurd::rational(rat(0, 1)))
            .unwrap_or(false)
    };
    let corr_positive = constants::corr_465().signum() == Ordering::Greater;
    Step::new("S10", "linear bound on the high branch", StepKind::Implication, &["S8", "S9"])
        .link(a_cert, Some(a_hyp))
        .link(below_cert, None)
        .link(above_cert, Some(line_hyp))
        .cases(1, 2)
        .proves(final_cert, "S - ((√465 - 7)/8)n + 9/4 - (9/124)√465 >= 0")
        .side("r = (45 - √465)/52 is a root of 26t² - 45t + 15", r_is_root)
        .side("the correction term is positive", corr_positive)
}

/// Refined chain data derived from the bootstrap coefficient.
struct Refined {
    a: Rational,
    rho: Rational,
    kappa: Rational,
    lead: Rational,
    linear: Rational,
    constant: Rational,
}

fn refined_data(cfg: &LedgerConfig) -> Result<Refined, ChainError> {
    let a = match &cfg.a7 {
        Some(a) => a.clone(),
        None => {
            let ts = DyadicInterval::from_rational(&cfg.t_split, cfg.precision);
            let tr = bootstrap::iterate_with(&ts, bootstrap::Tail::Dimension(6), 7, cfg.precision)?;
            tr.entries.last().expect("nonempty trace").hi_rational()
        }
    };
    let poly = constants::refined_polynomial(&a);
    let rq = constants::derive_refined_quadratic_exact(&a, cfg.precision)?;
    let rho = cfg.t_split.clone().min(rq.roots[0].lo_rational());
    let c = poly.coeffs();
    let (constant, linear, lead) = (c[0].clone(), c[1].clone(), c[2].clone());
    let slope = &lead * rat(2, 1) * &rho + &linear;
    let kappa = rat(2, 1) * &rho / (-slope);
    Ok(Refined { a, rho, kappa, lead, linear, constant })
}

fn step_s11(cfg: &LedgerConfig) -> Result<Step, ChainError> {
    let rf = refined_data(cfg)?;
    let (t, s, n) = (v(Var::T), v(Var::S), v(Var::N));
    let poly_t = sum(&[q(&rf.lead).mul(&t.pow(2)), q(&rf.linear).mul(&t), q(&rf.constant)]);
    let high = Hypothesis::ge("BRANCH.high", branch_quadratic().neg(), "4t² - 9t + 3 <= 0");
    let boot = bootstrap_bound(&rf.a);
    let a_cert = Certificate::new("2t >= P(t) S", t.scale(&rat(2, 1)).sub(&poly_t.mul(&s)), Relation::Ge, t_box(rat(0, 1), cfg.t_split.clone()))
        .assume(high)
        .assume(boot)
        .term(one_minus_t().over(Atom::T, 1).over(Atom::S, 2), &["S8"])
        .term(k(1, 9).over(Atom::T, 1).over(Atom::S, 2), &["BRANCH.high", "BOOT"])
        .eliminate(Var::N, "AX1");
    let a_hyp = a_cert.conclusion("S11.quadratic", "2t - P(t)S >= 0");

    let (rho, kappa) = (q(&rf.rho), q(&rf.kappa));
    // P(t) - P(ρ) = (t - ρ) Q(t), Q(t) = L(t + ρ) + M
    let q_t = q(&rf.lead).mul(&t.add(&rho)).add(&q(&rf.linear));
    let line_goal = t.sub(&rho).mul(&s).add(&kappa);
    let below = Hypothesis::ge("case.below", rho.sub(&t), "t <= ρ");
    let above = Hypothesis::ge("case.above", t.sub(&rho), "t >= ρ");
    let below_cert = Certificate::new("(t - ρ)S + κ >= 0 for t <= ρ", line_goal.clone(), Relation::Ge, t_box(rat(0, 1), rf.rho.clone()))
        .scale(q_t.neg())
        .assume(below)
        .term(k(1, 1), &["S11.quadratic"])
        .term(q(&(&rf.kappa * &rf.lead + rat(2, 1))), &["case.below"]);
    let above_cert = Certificate::new("(t - ρ)S + κ >= 0 for t >= ρ", line_goal.clone(), Relation::Ge, t_box(rf.rho.clone(), rat(1, 1)))
        .assume(above)
        .term(s.clone(), &["case.above"]);
    let line_hyp = Hypothesis::ge("S11.line", line_goal, "(t - ρ)S + κ >= 0");
    let final_goal = sum(&[q(&(rat(1, 1) - &rf.rho)).mul(&s), n.neg(), kappa]);
    let final_cert = Certificate::new("(1 - ρ)S >= n - κ", final_goal, Relation::Ge, base_domain())
        .term(k(1, 1), &["S11.line"])
        .eliminate(Var::N, "AX1");

    let bound = constants::a7_bound();
    let p_rho = &rf.lead * &rf.rho * &rf.rho + &rf.linear * &rf.rho + &rf.constant;
    // (n - κ)/(1 - ρ) >= 1.8252 n - 0.712898 for all n >= 6
    let slope_ref = parse_decimal("1.8252").expect("literal");
    let offset_ref = parse_decimal("0.712898").expect("literal");
    let one_m = rat(1, 1) - &rf.rho;
    let slope_ok = rat(1, 1) / &one_m >= slope_ref;
    let at6 = (rat(6, 1) - &rf.kappa) / &one_m - (&slope_ref * rat(6, 1) - &offset_ref);
    let dominates = slope_ok && !at6.is_negative();
    Ok(Step::new("S11", "refined chain from the bootstrap coefficient", StepKind::Implication, &["S7", "S8", "S9"])
        .link(a_cert, Some(a_hyp))
        .link(below_cert, None)
        .link(above_cert, Some(line_hyp))
        .cases(1, 2)
        .proves(final_cert, "(1 - ρ)S - n + κ >= 0")
        .side(format!("bootstrap coefficient {} <= {}", rf.a, bound), rf.a <= bound)
        .side("P(ρ) >= 0, so ρ lies below the smaller root", !p_rho.is_negative())
        .side("line dominates 1.8252 n - 0.712898 for n >= 6", dominates))
}

impl Ledger {
    pub fn empty() -> Self {
        Ledger::default()
    }

    /// The full chain for a configuration.
    pub fn standard(cfg: &LedgerConfig) -> Result<Self, ChainError> {
        Ok(Ledger {
            axioms: axioms(&cfg.axioms),
            steps: vec![
                step_s1(),
                step_s2(cfg),
                step_s3(),
                step_s4(),
                step_s5(),
                step_s6(),
                step_s7(),
                step_s8(cfg),
                step_s9(cfg.precision),
                step_s10(cfg.precision),
                step_s11(cfg)?,
            ],
        })
    }

    pub fn step(&self, name: &str) -> Option<&Step> {
        self.steps.iter().find(|s| s.name == name)
    }

    /// Runs every step in order; dependents of a step that is not verified are skipped.
    pub fn verify_all(&self) -> Vec<StepReport> {
        self.run(None)
    }

    /// Verifies one step after the steps it depends on.
    pub fn verify_step(&self, name: &str) -> Result<StepReport, ChainError> {
        let idx = self.steps.iter().position(|s| s.name == name).ok_or_else(|| ChainError::UnknownStep(name.to_string()))?;
        Ok(self.run(Some(idx)).pop().expect("target report"))
    }

    /// Residuals of each certificate of `name`, after verifying everything it depends on.
    pub fn residuals(&self, name: &str) -> Result<Vec<RatFn>, ChainError> {
        let idx = self.steps.iter().position(|s| s.name == name).ok_or_else(|| ChainError::UnknownStep(name.to_string()))?;
        let mut env = Env::new();
        for h in &self.axioms {
            env.insert(h.clone());
        }
        let mut closure = self.closure(idx);
        closure.sort_unstable();
        for &j in closure.iter().filter(|&&j| j != idx) {
            verify(&self.steps[j], &mut env);
        }
        let mut out = Vec::new();
        for link in &self.steps[idx].links {
            match residual(&link.certificate, &env) {
                Ok(r) => out.push(r),
                Err(o) => return Err(ChainError::ResidualNonzero(format!("{}: {:?}", link.certificate.label, o))),
            }
            if let Some(h) = &link.provides {
                env.insert(h.clone());
            }
        }
        Ok(out)
    }

    fn run(&self, target: Option<usize>) -> Vec<StepReport> {
        let mut env = Env::new();
        for h in &self.axioms {
            env.insert(h.clone());
        }
        let needed = target.map(|i| self.closure(i));
        let mut reports: Vec<StepReport> = Vec::new();
        for (i, step) in self.steps.iter().enumerate() {
            if let Some(needed) = &needed {
                if !needed.contains(&i) {
                    continue;
                }
            }
            let blocked: Vec<&String> = step
                .depends
                .iter()
                .filter(|d| !reports.iter().any(|r| &r.step == *d && r.verdict == Verdict::Verified))
                .collect();
            let report = if blocked.is_empty() {
                verify(step, &mut env)
            } else {
                StepReport {
                    step: step.name.clone(),
                    anchor: step.anchor.clone(),
                    kind: step.kind,
                    verdict: Verdict::Skipped,
                    residual: None,
                    detail: blocked.iter().map(|d| format!("depends on unverified {}", d)).collect(),
                }
            };
            reports.push(report);
            if Some(i) == target {
                break;
            }
        }
        reports
    }

    fn closure(&self, i: usize) -> Vec<usize> {
        let mut out = vec![i];
        let mut k = 0;
        while k < out.len() {
            for d in &self.steps[out[k]].depends {
                if let Some(j) = self.steps.iter().position(|s| &s.name == d) {
                    if !out.contains(&j) {
                        out.push(j);
                    }
                }
            }
            k += 1;
        }
        out
    }
}

fn verify(step: &Step, env: &mut Env) -> StepReport {
    let mut report = StepReport {
        step: step.name.clone(),
        anchor: step.anchor.clone(),
        kind: step.kind,
        verdict: Verdict::Verified,
        residual: None,
        detail: Vec::new(),
    };
    let mut local_env = env.clone();
    for link in &step.links {
        match check(&link.certificate, &local_env) {
            Outcome::Verified => {
                if let Some(h) = &link.provides {
                    local_env.insert(h.clone());
                }
            }
            Outcome::Failed { reason, residual } => {
                report.verdict = Verdict::Failed;
                report.residual = residual;
                report.detail.push(format!("{}: {}", link.certificate.label, reason));
                return report;
            }
            Outcome::Undecided { reason } => {
                report.verdict = Verdict::Undecided;
                report.detail.push(format!("{}: {}", link.certificate.label, reason));
                return report;
            }
        }
    }
    for &(i, j) in &step.case_splits {
        let h = |l: usize| step.links.get(l).and_then(|x| x.certificate.local.first()).map(|h| h.expr.clone());
        let exhaustive = matches!((h(i), h(j)), (Some(a), Some(b)) if a.add(&b).is_zero());
        if !exhaustive {
            report.verdict = Verdict::Failed;
            report.detail.push(format!("cases {} and {} are not exhaustive", i, j));
            return report;
        }
    }
    for sc in &step.side_checks {
        if !sc.passed {
            report.verdict = Verdict::Failed;
            report.detail.push(format!("side check failed: {}", sc.label));
            return report;
        }
    }
    for link in &step.links {
        if let Some(h) = &link.provides {
            if h.name == step.name {
                env.insert(h.clone());
            }
        }
    }
    report
}

/// Counts of each verdict.
pub fn tally(reports: &[StepReport]) -> [(Verdict, usize); 4] {
    let c = |v| reports.iter().filter(|r| r.verdict == v).count();
    [
        (Verdict::Verified, c(Verdict::Verified)),
        (Verdict::Failed, c(Verdict::Failed)),
        (Verdict::Undecided, c(Verdict::Undecided)),
        (Verdict::Skipped, c(Verdict::Skipped)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn standard() -> Ledger {
        Ledger::standard(&LedgerConfig::default()).unwrap()
    }

    #[test]
    fn all_steps_verify() {
        let reports = standard().verify_all();
        assert_eq!(reports.len(), 11);
        for r in &reports {
            assert_eq!(r.verdict, Verdict::Verified, "{:?}", r);
        }
    }

    #[test]
    fn empty_ledger_reports_nothing() {
        assert!(Ledger::empty().verify_all().is_empty());
    }

    #[test]
    fn shifted_alpha_breaks_the_master_step() {
        let cfg = LedgerConfig { alpha_shift: rat(1, 100), ..LedgerConfig::default() };
        let r = Ledger::standard(&cfg).unwrap().verify_step("S8").unwrap();
        assert_eq!(r.verdict, Verdict::Failed);
        assert!(r.residual.is_some());
    }

    #[test]
    fn weaker_cauchy_schwarz_breaks_s7() {
        let cfg = LedgerConfig {
            axioms: AxiomConfig { ax6_coefficient: rat(1, 4) },
            ..LedgerConfig::default()
        };
        let reports = Ledger::standard(&cfg).unwrap().verify_all();
        let s7 = reports.iter().find(|r| r.step == "S7").unwrap();
        assert_eq!(s7.verdict, Verdict::Failed);
        let s11 = reports.iter().find(|r| r.step == "S11").unwrap();
        assert_eq!(s11.verdict, Verdict::Skipped);
    }

    #[test]
    fn single_step_runs_its_dependencies() {
        let r = standard().verify_step("S9").unwrap();
        assert_eq!(r.verdict, Verdict::Verified);
        assert!(matches!(standard().verify_step("S99"), Err(ChainError::UnknownStep(_))));
    }

    #[test]
    fn master_coefficient_is_negative_at_one_half() {
        let coeff = branch_quadratic().over(Atom::OneMinusT, 1).scale(&rat(1, 3));
        let pt = [(Var::T, rat(1, 2))].into_iter().collect();
        assert_eq!(coeff.eval(&pt), Some(rat(-1, 3)));
    }
}
