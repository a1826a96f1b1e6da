//! Certified evaluation of the coefficient-improvement recurrence, its fixed point,
//! the self-consistent split point and the per-dimension bound table.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::{self, ConstantsError};
use crate::exact::{parse_decimal, rat, Dyadic, DyadicInterval, IntervalError, Rational, DEFAULT_PRECISION};

pub const DEFAULT_K_MAX: usize = 64;
pub const DEFAULT_TOL: &str = "1e-8";
/// Bracket for the split-point bisection.
pub const SPLIT_BRACKET: (&str, &str) = ("0.40", "0.50");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BootstrapError {
    #[error("split point {0} must lie in [0, 1)")]
    InvalidSplit(String),
    #[error("dimension {0} is below the supported minimum {1}")]
    InvalidDimension(u32, u32),
    #[error("iteration count must be at least 1")]
    InvalidIterationCount,
    #[error("no certified fixed point after {0} iterations")]
    NoConvergence(usize),
    #[error("F(t) = r1(a_fix(t)) - t has no certified sign change on [{0}, {1}]")]
    NoSignChange(String, String),
    #[error("invalid dimension range {0}..={1}")]
    InvalidRange(u32, u32),
    #[error("tolerance must be positive")]
    InvalidTolerance,
    #[error(transparent)]
    Interval(#[from] IntervalError),
    #[error(transparent)]
    Refined(#[from] ConstantsError),
}

/// Additive term of the recurrence: `1/(4n)` for a dimension, or zero in the large-n limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tail {
    Dimension(u32),
    Vanishing,
}

impl Tail {
    fn value(self) -> Rational {
        match self {
            Tail::Dimension(n) => rat(1, 4 * n as i64),
            Tail::Vanishing => Rational::zero(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterationTrace {
    pub t_star: DyadicInterval,
    pub tail: Tail,
    /// `entries[k]` encloses `a_{k+1}`; `entries[0] = [2, 2]`.
    pub entries: Vec<DyadicInterval>,
}

fn check_split(t: &DyadicInterval) -> Result<(), BootstrapError> {
    if t.lo().is_negative() || t.hi() >= &Dyadic::from_int(1) {
        return Err(BootstrapError::InvalidSplit(t.to_string()));
    }
    Ok(())
}

fn check_tail(tail: Tail) -> Result<(), BootstrapError> {
    match tail {
        Tail::Dimension(n) if n < 5 => Err(BootstrapError::InvalidDimension(n, 5)),
        _ => Ok(()),
    }
}

/// One step `a ↦ 1 + 2((1/36)(t/(1-t))a + tail)^{1/3}`, outward rounded.
pub fn step(t: &DyadicInterval, tail: Tail, a: &DyadicInterval) -> Result<DyadicInterval, BootstrapError> {
    let p = a.precision().max(t.precision());
    let one = DyadicInterval::from_int(1, p);
    let ratio = t.div(&one.sub(t))?;
    let inner = ratio.mul(a).mul_rational(&rat(1, 36)).add_rational(&tail.value());
    Ok(inner.cbrt().mul_rational(&rat(2, 1)).add(&one))
}

/// Enclosures of `a_1, …, a_{k_max}` at `n`.
pub fn iterate(t_star: &DyadicInterval, n: u32, k_max: usize) -> Result<IterationTrace, BootstrapError> {
    iterate_with(t_star, Tail::Dimension(n), k_max, t_star.precision())
}

pub fn iterate_with(
    t_star: &DyadicInterval,
    tail: Tail,
    k_max: usize,
    precision: u32,
) -> Result<IterationTrace, BootstrapError> {
    check_split(t_star)?;
    check_tail(tail)?;
    if k_max == 0 {
        return Err(BootstrapError::InvalidIterationCount);
    }
    let t = t_star.with_precision(precision);
    let mut entries = vec![DyadicInterval::from_int(2, precision)];
    while entries.len() < k_max {
        let next = step(&t, tail, entries.last().expect("non-empty"))?;
        entries.push(next);
    }
    Ok(IterationTrace { t_star: t, tail, entries })
}

fn max_endpoint_gap(a: &DyadicInterval, b: &DyadicInterval) -> Rational {
    let dl = (a.lo_rational() - b.lo_rational()).abs();
    let dh = (a.hi_rational() - b.hi_rational()).abs();
    dl.max(dh)
}

/// Certified enclosure `E` of the fixed point with `step(E) ⊆ E`.
pub fn fixed_point(t_star: &DyadicInterval, n: u32, tol: &Rational) -> Result<DyadicInterval, BootstrapError> {
    fixed_point_with(t_star, Tail::Dimension(n), tol, DEFAULT_K_MAX, t_star.precision())
}

pub fn fixed_point_with(
    t_star: &DyadicInterval,
    tail: Tail,
    tol: &Rational,
    k_max: usize,
    precision: u32,
) -> Result<DyadicInterval, BootstrapError> {
    check_split(t_star)?;
    check_tail(tail)?;
    if !tol.is_positive() {
        return Err(BootstrapError::InvalidTolerance);
    }
    let t = t_star.with_precision(precision);
    let mut a = DyadicInterval::from_int(2, precision);
    for _ in 0..k_max {
        let next = step(&t, tail, &a)?;
        let settled = max_endpoint_gap(&next, &a) < *tol;
        a = next;
        if settled {
            let pad = DyadicInterval::from_rational_bounds(&-tol.clone(), tol, precision)?;
            let candidate = a.add(&pad);
            let image = step(&t, tail, &candidate)?;
            if candidate.contains(&image) {
                // the image of a self-map is again a self-map enclosure
                let mut e = image;
                for _ in 0..4 {
                    let f = step(&t, tail, &e)?;
                    if !e.contains(&f) {
                        break;
                    }
                    e = f;
                }
                return Ok(e);
            }
        }
    }
    Err(BootstrapError::NoConvergence(k_max))
}

/// Certified sign of `F(t) = r₁(a_fix(t)) - t`, or `None` when undecided.
fn split_residual(t: &Dyadic, tail: Tail, precision: u32) -> Result<Option<Ordering>, BootstrapError> {
    let tp = DyadicInterval::point(t.clone(), precision);
    let tol = rat(1, 1) / Rational::from_integer(num_bigint::BigInt::from(1) << (precision / 2));
    let a = fixed_point_with(&tp, tail, &tol, DEFAULT_K_MAX, precision)?;
    let rq = constants::derive_refined_quadratic(&a)?;
    let f = rq.roots[0].sub(&tp);
    Ok(if f.certainly_positive() {
        Some(Ordering::Greater)
    } else if f.certainly_negative() {
        Some(Ordering::Less)
    } else {
        None
    })
}

/// Enclosure of the self-consistent split point `t = r₁(a_fix(t))`.
pub fn solve_split(n: u32, tol: &Rational) -> Result<DyadicInterval, BootstrapError> {
    solve_split_with(n, tol, DEFAULT_PRECISION)
}

pub fn solve_split_with(n: u32, tol: &Rational, precision: u32) -> Result<DyadicInterval, BootstrapError> {
    if n < 6 {
        return Err(BootstrapError::InvalidDimension(n, 6));
    }
    solve_split_tail(Tail::Dimension(n), tol, precision)
}

pub fn solve_split_tail(tail: Tail, tol: &Rational, precision: u32) -> Result<DyadicInterval, BootstrapError> {
    if !tol.is_positive() {
        return Err(BootstrapError::InvalidTolerance);
    }
    let lo_q = parse_decimal(SPLIT_BRACKET.0).expect("literal");
    let hi_q = parse_decimal(SPLIT_BRACKET.1).expect("literal");
    let mut lo = Dyadic::floor_of(&lo_q, precision);
    let mut hi = Dyadic::ceil_of(&hi_q, precision);
    let s_lo = split_residual(&lo, tail, precision)?;
    let s_hi = split_residual(&hi, tail, precision)?;
    let (s_lo, s_hi) = match (s_lo, s_hi) {
        (Some(a), Some(b)) if a != b => (a, b),
        _ => return Err(BootstrapError::NoSignChange(lo.to_string(), hi.to_string())),
    };
    debug_assert_ne!(s_lo, s_hi);
    while hi.sub(&lo).to_rational() > *tol {
        let mid = lo.add(&hi).mul_pow2(-1);
        match split_residual(&mid, tail, precision)? {
            Some(s) if s == s_lo => lo = mid,
            Some(_) => hi = mid,
            None => break,
        }
    }
    Ok(DyadicInterval::new(lo, hi, precision)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundMode {
    /// Printed constants `t* = 0.452115`, `a_7 = 1.878415`.
    Paper,
    /// Per-dimension split from [`solve_split`] with a rigorous tangent correction.
    PerN,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Eq316,
    Refined,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundRow {
    pub n: u32,
    pub bound_316: DyadicInterval,
    /// Value of the refined line; in paper mode also reported at `n = 5` for the closing comparison.
    pub bound_refined: Option<DyadicInterval>,
    pub bound_final: DyadicInterval,
    pub branch: Branch,
    /// `n/(1 - t*)`, the bound on the complementary branch `t >= t*`.
    pub upper_branch: DyadicInterval,
    pub split: DyadicInterval,
    /// `bound_316 > bound_refined` certified (relevant at `n = 5`).
    pub eq316_strictly_above: bool,
}

fn line_316(n: u32, precision: u32) -> DyadicInterval {
    let slope = constants::slope_316().enclosure(precision);
    let offset = constants::offset_316().enclosure(precision);
    slope.mul_rational(&rat(n as i64, 1)).sub(&offset)
}

fn interval_max(a: &DyadicInterval, b: &DyadicInterval) -> DyadicInterval {
    let lo = a.lo().clone().max(b.lo().clone());
    let hi = a.hi().clone().max(b.hi().clone());
    DyadicInterval::new(lo, hi, a.precision().max(b.precision())).expect("max preserves order")
}

/// Rigorous refined bound for a split `rho_hint`: returns `(rho, kappa, a_used)` with
/// `S > (n - kappa)/(1 - rho)` whenever `t < rho_hint`.
pub fn refined_line(
    rho_hint: &Rational,
    n: u32,
    precision: u32,
) -> Result<(Rational, Rational, Rational), BootstrapError> {
    let tp = DyadicInterval::from_rational(rho_hint, precision);
    let tol = rat(1, 1) / Rational::from_integer(num_bigint::BigInt::from(1) << (precision / 2));
    let a_fix = fixed_point_with(&tp, Tail::Dimension(n), &tol, DEFAULT_K_MAX, precision)?;
    // the upper endpoint of an enclosure of the fixed point is a valid coefficient bound at t = hi(tp) >= rho_hint
    let a = a_fix.hi_rational();
    let poly = constants::refined_polynomial(&a);
    let rq = constants::derive_refined_quadratic_exact(&a, precision)?;
    let rho = rho_hint.clone().min(rq.roots[0].lo_rational());
    let c = poly.coeffs();
    // P'(rho) = 2 L rho + M < 0 on the lower branch
    let slope = &c[2] * rat(2, 1) * &rho + &c[1];
    let kappa = rat(2, 1) * &rho / (-slope);
    Ok((rho, kappa, a))
}

/// Lower bound on `S` per dimension, combining both bounds.
pub fn bound_table(n_min: u32, n_max: u32, mode: BoundMode) -> Result<Vec<BoundRow>, BootstrapError> {
    bound_table_with(n_min, n_max, mode, DEFAULT_PRECISION)
}

pub fn bound_table_with(
    n_min: u32,
    n_max: u32,
    mode: BoundMode,
    precision: u32,
) -> Result<Vec<BoundRow>, BootstrapError> {
    if n_min < 5 || n_min > n_max {
        return Err(BootstrapError::InvalidRange(n_min, n_max));
    }
    let paper_rq = match mode {
        BoundMode::Paper => Some(constants::derive_refined_quadratic_exact(&constants::a7_bound(), precision)?),
        BoundMode::PerN => None,
    };
    let mut rows = Vec::new();
    for n in n_min..=n_max {
        let p = precision;
        let nq = rat(n as i64, 1);
        let b316 = line_316(n, p);
        let one = DyadicInterval::from_int(1, p);
        let (refined, split) = match (&paper_rq, n) {
            (Some(rq), _) => {
                let ts = DyadicInterval::from_rational(&constants::t_star(), p);
                let r = DyadicInterval::from_rational(&nq, p).sub(&rq.corr).div(&one.sub(&ts))?;
                (Some(r), ts)
            }
            (None, 5) => (None, DyadicInterval::from_rational(&constants::t_star(), p)),
            (None, _) => {
                let tol = rat(1, 1_000_000_000);
                let split = solve_split_with(n, &tol, p)?;
                let (rho, kappa, _) = refined_line(&split.lo_rational(), n, p)?;
                let bound = (&nq - &kappa) / (rat(1, 1) - &rho);
                (Some(DyadicInterval::from_rational(&bound, p)), split)
            }
        };
        let upper_branch = DyadicInterval::from_rational(&nq, p).div(&one.sub(&split))?;
        let eq316_strictly_above = refined.as_ref().is_some_and(|r| r.certainly_lt(&b316));
        let (branch, bound_final) = match &refined {
            Some(r) if n >= 6 => {
                let m = interval_max(&b316, r);
                let branch = if b316.certainly_lt(r) || !r.certainly_lt(&b316) {
                    Branch::Refined
                } else {
                    Branch::Eq316
                };
                (branch, m)
            }
            _ => (Branch::Eq316, b316.clone()),
        };
        rows.push(BoundRow {
            n,
            bound_316: b316,
            bound_refined: refined,
            bound_final,
            branch,
            upper_branch,
            split,
            eq316_strictly_above,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inside(e: &DyadicInterval, lo: &str, hi: &str) -> bool {
        e.lo_rational() >= parse_decimal(lo).unwrap() && e.hi_rational() <= parse_decimal(hi).unwrap()
    }

    fn ts() -> DyadicInterval {
        DyadicInterval::from_rational(&constants::t_star(), 128)
    }

    #[test]
    fn seventh_iterate() {
        let tr = iterate(&ts(), 6, 7).unwrap();
        assert_eq!(tr.entries.len(), 7);
        assert!(tr.entries[0].is_point());
        let a7 = &tr.entries[6];
        assert!(inside(a7, "1.87840", "1.878415"));
    }

    #[test]
    fn second_iterate() {
        let tr = iterate(&ts(), 6, 2).unwrap();
        assert!(inside(&tr.entries[1], "1.8879", "1.8880"));
    }

    #[test]
    fn zero_split_gives_closed_form_step() {
        let tr = iterate(&DyadicInterval::from_int(0, 128), 6, 2).unwrap();
        assert!(inside(&tr.entries[1], "1.6933", "1.6934"));
        // 1 + 2 (1/24)^(1/3): cube of (a - 1)/2 brackets 1/24
        let c = tr.entries[1].add_rational(&rat(-1, 1)).mul_rational(&rat(1, 2)).powi(3);
        assert!(c.contains_rational(&rat(1, 24)));
    }

    #[test]
    fn split_domain_enforced() {
        for bad in [rat(3, 2), rat(1, 1), rat(-1, 10)] {
            let t = DyadicInterval::from_rational(&bad, 64);
            assert!(matches!(iterate(&t, 6, 3), Err(BootstrapError::InvalidSplit(_))));
        }
        assert!(matches!(iterate(&ts(), 4, 3), Err(BootstrapError::InvalidDimension(4, 5))));
        assert!(matches!(iterate(&ts(), 6, 0), Err(BootstrapError::InvalidIterationCount)));
    }

    #[test]
    fn fixed_point_is_self_map() {
        let tol = parse_decimal("1e-6").unwrap();
        let e = fixed_point(&ts(), 6, &tol).unwrap();
        assert!(inside(&e, "1.878413", "1.878414"));
        let img = step(&ts(), Tail::Dimension(6), &e).unwrap();
        assert!(e.contains(&img));
        let lim = fixed_point_with(&ts(), Tail::Vanishing, &tol, DEFAULT_K_MAX, 128).unwrap();
        assert!(lim.certainly_lt(&e));
    }

    #[test]
    fn split_solution_for_six() {
        let s = solve_split(6, &rat(1, 1_000_000_000)).unwrap();
        assert!(inside(&s, "0.45210", "0.45212"));
    }

    #[test]
    fn paper_table_rows() {
        let rows = bound_table(5, 10, BoundMode::Paper).unwrap();
        assert_eq!(rows[0].branch, Branch::Eq316);
        assert!(rows[0].eq316_strictly_above);
        assert!(inside(&rows[0].bound_final, "8.41752", "8.41754"));
        assert!(inside(rows[1].bound_refined.as_ref().unwrap(), "10.23829", "10.23831"));
        assert!(rows[1..].iter().all(|r| r.branch == Branch::Refined));
        let r10 = &rows[5];
        assert!(r10.bound_316.certainly_lt(r10.bound_refined.as_ref().unwrap()));
    }
}
