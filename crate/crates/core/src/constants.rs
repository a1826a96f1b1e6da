//! Registry of the named constants of the pinching argument with certified enclosures.

use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::bootstrap::{self, BootstrapError, Tail};
use crate::exact::roots::isolate_univariate;
use crate::exact::{
    parse_decimal, rat, Dyadic, DyadicInterval, IntervalError, QuadraticSurd, Rational, RootIsolation, UniPoly,
};

/// Default agreement tolerance between a printed decimal and its enclosure.
pub const DECIMAL_TOLERANCE: &str = "1e-5";

/// Printed split value for the refined branch.
pub const T_STAR: &str = "0.452115";
/// Printed bound on the seventh bootstrap coefficient.
pub const A7_BOUND: &str = "1.878415";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstantsError {
    #[error("bootstrap coefficient enclosure {0} is not positive")]
    NonPositiveCoefficient(String),
    #[error("discriminant enclosure {0} is not certainly positive")]
    NonPositiveDiscriminant(String),
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClosedForm {
    Surd(QuadraticSurd),
    Rational(Rational),
    /// Produced by running the bootstrap or the refined quadratic, described in words.
    IterationDerived(String),
    /// A symbolic expression with no single numeric value.
    Formula(String),
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClosedForm::Surd(s) => write!(f, "{}", s),
            ClosedForm::Rational(q) => write!(f, "{}", q),
            ClosedForm::IterationDerived(d) => write!(f, "iteration-derived: {}", d),
            ClosedForm::Formula(e) => f.write_str(e),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedConstant {
    pub key: &'static str,
    pub closed_form: ClosedForm,
    pub enclosure: Option<DyadicInterval>,
    pub paper_decimal: Option<&'static str>,
    pub tolerance: Rational,
    pub anchor: &'static str,
}

impl NamedConstant {
    /// Distance between the enclosure midpoint and the printed decimal.
    pub fn deviation(&self) -> Option<Rational> {
        let d = parse_decimal(self.paper_decimal?).ok()?;
        let e = self.enclosure.as_ref()?;
        Some((e.midpoint().to_rational() - d).abs())
    }

    /// True when there is nothing to compare or the comparison is within tolerance.
    pub fn agrees(&self) -> bool {
        self.deviation().is_none_or(|d| d <= self.tolerance)
    }

    /// True when the enclosure contains the exact closed-form value (rational or surd).
    pub fn encloses_closed_form(&self) -> bool {
        let Some(e) = &self.enclosure else { return true };
        match &self.closed_form {
            ClosedForm::Rational(q) => e.contains_rational(q),
            ClosedForm::Surd(s) => {
                let lo = QuadraticSurd::rational(e.lo_rational());
                let hi = QuadraticSurd::rational(e.hi_rational());
                lo.try_cmp(s).is_ok_and(|o| o.is_le()) && s.try_cmp(&hi).is_ok_and(|o| o.is_le())
            }
            _ => true,
        }
    }
}

fn surd(a: (i64, i64), b: (i64, i64), d: u64) -> QuadraticSurd {
    QuadraticSurd::new(rat(a.0, a.1), rat(b.0, b.1), d)
}

/// `(9 - √33)/8`, the smaller root of `4t² - 9t + 3`.
pub fn t_quad_root_low() -> QuadraticSurd {
    surd((9, 8), (-1, 8), 33)
}

/// `(√33 - 3)/2`.
pub fn surd_gap() -> QuadraticSurd {
    surd((-3, 2), (1, 2), 33)
}

/// `(45 - √465)/52`, the smaller root of `26t² - 45t + 15`.
pub fn t_465_low() -> QuadraticSurd {
    surd((45, 52), (-1, 52), 465)
}

/// `(9/26)(3√465/31 - 1)`.
pub fn corr_465() -> QuadraticSurd {
    surd((-9, 26), (27, 806), 465)
}

/// `(√465 - 7)/8`.
pub fn slope_316() -> QuadraticSurd {
    surd((-7, 8), (1, 8), 465)
}

/// `(9/4)(1 - √465/31)`.
pub fn offset_316() -> QuadraticSurd {
    surd((9, 4), (-9, 124), 465)
}

pub fn t_star() -> Rational {
    parse_decimal(T_STAR).expect("literal")
}

pub fn a7_bound() -> Rational {
    parse_decimal(A7_BOUND).expect("literal")
}

/// `(2 + 4a/9)t² - (3 + a)t + (1 + a/3)` for an exact coefficient `a`, ascending.
pub fn refined_polynomial(a: &Rational) -> UniPoly {
    UniPoly::new(vec![
        rat(1, 1) + a / rat(3, 1),
        -(rat(3, 1) + a),
        rat(2, 1) + a * rat(4, 9),
    ])
}

/// Coefficients, roots and tangent correction of the refined quadratic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinedQuadratic {
    pub a7: DyadicInterval,
    pub lead: DyadicInterval,
    pub linear: DyadicInterval,
    pub constant: DyadicInterval,
    /// Smaller then larger root.
    pub roots: [DyadicInterval; 2],
    /// `-2r₁ / (lead·(r₁ - r₂))`.
    pub corr: DyadicInterval,
    /// Exact Sturm isolation; present when the coefficient is known exactly.
    pub isolation: Option<RootIsolation>,
}

/// Builds the refined quadratic for a bootstrap coefficient enclosure.
pub fn derive_refined_quadratic(a7: &DyadicInterval) -> Result<RefinedQuadratic, ConstantsError> {
    let exact = a7.is_point().then(|| a7.lo().to_rational());
    derive_inner(a7, exact)
}

/// As [`derive_refined_quadratic`] for an exact coefficient, with Sturm-isolated roots.
pub fn derive_refined_quadratic_exact(a: &Rational, precision: u32) -> Result<RefinedQuadratic, ConstantsError> {
    derive_inner(&DyadicInterval::from_rational(a, precision), Some(a.clone()))
}

fn derive_inner(a7: &DyadicInterval, exact: Option<Rational>) -> Result<RefinedQuadratic, ConstantsError> {
    if !a7.certainly_positive() {
        return Err(ConstantsError::NonPositiveCoefficient(a7.to_string()));
    }
    let p = a7.precision();
    let lead = a7.mul_rational(&rat(4, 9)).add_rational(&rat(2, 1));
    let linear = a7.add_rational(&rat(3, 1)).neg();
    let constant = a7.mul_rational(&rat(1, 3)).add_rational(&rat(1, 1));
    let disc = linear.square().sub(&lead.mul(&constant).mul_rational(&rat(4, 1)));
    if !disc.certainly_positive() {
        return Err(ConstantsError::NonPositiveDiscriminant(disc.to_string()));
    }
    let root = disc.sqrt()?;
    let minus_b = linear.neg();
    // cancellation-free forms: r1 = 2c/(-b + √D), r2 = (-b + √D)/(2L)
    let big = minus_b.add(&root);
    let mut r1 = constant.mul_rational(&rat(2, 1)).div(&big)?;
    let mut r2 = big.div(&lead.mul_rational(&rat(2, 1)))?;
    let mut isolation = None;
    if let Some(a) = exact {
        let box02 = DyadicInterval::from_int(0, p).hull(&DyadicInterval::from_int(2, p));
        let iso = isolate_univariate(&refined_polynomial(&a), &box02).expect("nonzero polynomial");
        let w = Dyadic::new(1.into(), -(p as i64)).to_rational();
        if iso.len() == 2 {
            let e1 = iso.refine(0, &w).expect("index 0");
            let e2 = iso.refine(1, &w).expect("index 1");
            r1 = r1.intersect(&e1).unwrap_or(r1);
            r2 = r2.intersect(&e2).unwrap_or(r2);
        }
        isolation = Some(iso);
    }
    // lead·(r2 - r1) = √D
    let corr = r1.mul_rational(&rat(2, 1)).div(&root)?;
    Ok(RefinedQuadratic { a7: a7.clone(), lead, linear, constant, roots: [r1, r2], corr, isolation })
}

fn from_surd(
    key: &'static str,
    s: QuadraticSurd,
    decimal: Option<&'static str>,
    anchor: &'static str,
    precision: u32,
) -> NamedConstant {
    NamedConstant {
        key,
        enclosure: Some(s.enclosure(precision)),
        closed_form: ClosedForm::Surd(s),
        paper_decimal: decimal,
        tolerance: tolerance(),
        anchor,
    }
}

fn from_rational(
    key: &'static str,
    q: Rational,
    decimal: Option<&'static str>,
    anchor: &'static str,
    precision: u32,
) -> NamedConstant {
    NamedConstant {
        key,
        enclosure: Some(DyadicInterval::from_rational(&q, precision)),
        closed_form: ClosedForm::Rational(q),
        paper_decimal: decimal,
        tolerance: tolerance(),
        anchor,
    }
}

fn derived(
    key: &'static str,
    what: &str,
    e: DyadicInterval,
    decimal: &'static str,
    anchor: &'static str,
) -> NamedConstant {
    NamedConstant {
        key,
        closed_form: ClosedForm::IterationDerived(what.to_string()),
        enclosure: Some(e),
        paper_decimal: Some(decimal),
        tolerance: tolerance(),
        anchor,
    }
}

fn tolerance() -> Rational {
    parse_decimal(DECIMAL_TOLERANCE).expect("literal")
}

/// Closed-form surd entries only; cheap.
pub fn surd_catalog(precision: u32) -> Vec<NamedConstant> {
    vec![
        from_surd(
            "t_quad_root_low",
            t_quad_root_low(),
            None,
            "lower branch split: smaller root of 4t^2-9t+3",
            precision,
        ),
        from_surd("surd_gap", surd_gap(), None, "lower branch bound S >= 2n - (sqrt33-3)/2", precision),
        from_surd(
            "t_465_low",
            t_465_low(),
            None,
            "first pinching bound: smaller root of 26t^2-45t+15",
            precision,
        ),
        from_surd(
            "corr_465",
            corr_465(),
            None,
            "first pinching bound: tangent correction at (45-sqrt465)/52",
            precision,
        ),
        from_surd(
            "slope_316",
            slope_316(),
            Some("1.82048"),
            "first pinching bound: slope of S > 1.82048n - 0.684881",
            precision,
        ),
        from_surd(
            "offset_316",
            offset_316(),
            Some("0.684881"),
            "first pinching bound: offset of S > 1.82048n - 0.684881",
            precision,
        ),
    ]
}

/// The full registry, including values produced by running the bootstrap.
pub fn catalog(precision: u32) -> Result<Vec<NamedConstant>, BootstrapError> {
    let mut out = surd_catalog(precision);
    out.push(from_rational("a_seed", rat(2, 1), Some("2"), "bootstrap recurrence seed a_1 = 2", precision));

    let ts = t_star();
    let ts_iv = DyadicInterval::from_rational(&ts, precision);
    let trace = bootstrap::iterate_with(&ts_iv, Tail::Dimension(6), 7, precision)?;
    let a7 = trace.entries.last().expect("seven entries").clone();
    out.push(derived(
        "a7_bound",
        "seventh bootstrap iterate at t = 0.452115, n = 6",
        a7,
        A7_BOUND,
        "bootstrap recurrence: bound a_7 <= 1.878415",
    ));
    let split = bootstrap::solve_split_with(6, &rat(1, 1_000_000_000), precision)?;
    out.push(derived(
        "t_star",
        "self-consistent split point for n = 6",
        split,
        T_STAR,
        "refined branch split t < 0.452115",
    ));

    let rq = derive_refined_quadratic_exact(&a7_bound(), precision)?;
    out.push(derived(
        "root_high",
        "larger root of the refined quadratic at a_7 = 1.878415",
        rq.roots[1].clone(),
        "1.26876",
        "refined quadratic 2.83485(t-0.452115)(t-1.26876)",
    ));
    let lead = Rational::from_integer(2.into()) + a7_bound() * rat(4, 9);
    out.push(from_rational(
        "quad_lead",
        lead,
        Some("2.83485"),
        "refined quadratic leading coefficient 2 + 4a_7/9",
        precision,
    ));
    out.push(derived(
        "corr_refined",
        "tangent correction -2r1/(lead(r1-r2)) at a_7 = 1.878415",
        rq.corr.clone(),
        "0.390586",
        "refined branch: t > 0.452115 - 0.390586/S",
    ));
    let one_minus = rat(1, 1) - &ts;
    out.push(from_rational(
        "slope_refined",
        rat(1, 1) / &one_minus,
        Some("1.8252"),
        "refined bound slope 1/(1 - 0.452115)",
        precision,
    ));
    let offset = rq.corr.mul_rational(&(rat(1, 1) / &one_minus));
    out.push(derived(
        "offset_refined",
        "corr_refined / (1 - 0.452115)",
        offset,
        "0.712898",
        "refined bound S > 1.8252n - 0.712898",
    ));
    out.push(NamedConstant {
        key: "z_formula",
        closed_form: ClosedForm::Formula("tz = (17t^2-33t+24)/(1-t)".to_string()),
        enclosure: None,
        paper_decimal: None,
        tolerance: Rational::zero(),
        anchor: "master cancellation: choice of z",
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inside(e: &DyadicInterval, lo: &str, hi: &str) -> bool {
        e.lo_rational() >= parse_decimal(lo).unwrap() && e.hi_rational() <= parse_decimal(hi).unwrap()
    }

    #[test]
    fn printed_surd_decimals() {
        let cat = surd_catalog(128);
        let get = |k: &str| cat.iter().find(|c| c.key == k).unwrap().clone();
        assert!(inside(get("slope_316").enclosure.as_ref().unwrap(), "1.820482", "1.820483"));
        assert!(inside(get("offset_316").enclosure.as_ref().unwrap(), "0.684881", "0.684882"));
        for c in &cat {
            assert!(c.agrees(), "{}", c.key);
            assert!(c.encloses_closed_form(), "{}", c.key);
        }
    }

    #[test]
    fn refined_quadratic_at_printed_coefficient() {
        let rq = derive_refined_quadratic_exact(&a7_bound(), 128).unwrap();
        assert!(inside(&rq.lead, "2.834850", "2.834852"));
        assert!(inside(&rq.roots[0], "0.452114", "0.452116"));
        assert!(inside(&rq.roots[1], "1.268756", "1.268758"));
        assert!(inside(&rq.corr, "0.390585", "0.390587"));
        assert!(rq.isolation.as_ref().unwrap().verify());
    }

    #[test]
    fn unimproved_seed_recovers_second_proof_quadratic() {
        // at a = 2 the refined quadratic is (26t^2 - 45t + 15)/9
        let rq = derive_refined_quadratic(&DyadicInterval::from_int(2, 128)).unwrap();
        assert!(rq.lead.contains_rational(&rat(26, 9)));
        let low = t_465_low().enclosure(128);
        assert!(rq.roots[0].intersect(&low).is_some());
        assert!(inside(&rq.roots[0], "0.4506949", "0.4506951"));
    }

    #[test]
    fn lower_root_decreases_as_coefficient_grows() {
        let r = |a: Rational| derive_refined_quadratic(&DyadicInterval::from_rational(&a, 128)).unwrap().roots[0].clone();
        let r18 = r(rat(9, 5));
        let r1878 = r(a7_bound());
        let r2 = r(rat(2, 1));
        assert!(r2.certainly_lt(&r1878));
        assert!(r1878.certainly_lt(&r18));
    }

    #[test]
    fn wide_enclosures_still_contain_point_results() {
        let wide = DyadicInterval::from_rational_bounds(&rat(1878, 1000), &rat(1879, 1000), 128).unwrap();
        let rq = derive_refined_quadratic(&wide).unwrap();
        let pt = derive_refined_quadratic(&DyadicInterval::from_rational(&a7_bound(), 128)).unwrap();
        assert!(rq.roots[0].contains(&pt.roots[0]));
        assert!(rq.corr.contains(&pt.corr));
    }

    #[test]
    fn nonpositive_coefficient_rejected() {
        let z = DyadicInterval::from_int(0, 64);
        assert!(matches!(derive_refined_quadratic(&z), Err(ConstantsError::NonPositiveCoefficient(_))));
    }

    #[test]
    fn overly_wide_coefficient_is_rejected() {
        // the discriminant is positive pointwise, but not certifiably so over a huge enclosure
        let big = DyadicInterval::from_rational_bounds(&rat(1, 1000), &rat(1000, 1), 64).unwrap();
        assert!(matches!(derive_refined_quadratic(&big), Err(ConstantsError::NonPositiveDiscriminant(_))));
    }
}
