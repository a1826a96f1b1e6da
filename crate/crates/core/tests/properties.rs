use std::collections::BTreeMap;

use proptest::prelude::*;

use pinchcert::chain::table::{beta_choice, gamma_choice};
use pinchcert::chain::{certify_nonnegative, expand_quadratic_form, BilinearTable, BoxDomain, BoxOutcome, RatFn};
use pinchcert::constants;
use pinchcert::exact::{rat, DyadicInterval, MultiPoly, QuadraticSurd, Rational, Var};
use pinchcert::falsify::sample::project_orbits;
use pinchcert::falsify::{CurvatureSpectrum, GradTensor};
use pinchcert::report::{self, Format};

fn small_rational() -> impl Strategy<Value = Rational> {
    (-1000i64..1000, 1i64..200).prop_map(|(n, d)| rat(n, d))
}

fn positive_rational() -> impl Strategy<Value = Rational> {
    (1i64..1000, 1i64..200).prop_map(|(n, d)| rat(n, d))
}

proptest! {
    #[test]
    fn arithmetic_encloses_exact_result(a in small_rational(), b in small_rational(), p in 32u32..200) {
        let (x, y) = (DyadicInterval::from_rational(&a, p), DyadicInterval::from_rational(&b, p));
        prop_assert!(x.contains_rational(&a));
        prop_assert!(x.add(&y).contains_rational(&(&a + &b)));
        prop_assert!(x.sub(&y).contains_rational(&(&a - &b)));
        prop_assert!(x.mul(&y).contains_rational(&(&a * &b)));
        if b != rat(0, 1) {
            prop_assert!(x.div(&y).unwrap().contains_rational(&(&a / &b)));
        }
    }

    #[test]
    fn roots_enclose_their_argument(a in positive_rational(), p in 32u32..200) {
        let x = DyadicInterval::from_rational(&a, p);
        let r = x.sqrt().unwrap();
        prop_assert!(r.mul(&r).contains_rational(&a));
        let c = x.cbrt();
        prop_assert!(c.mul(&c).mul(&c).contains_rational(&a));
        let neg = DyadicInterval::from_rational(&-a.clone(), p).cbrt();
        prop_assert!(neg.mul(&neg).mul(&neg).contains_rational(&-a));
    }

    #[test]
    fn surd_enclosure_and_order_agree_with_doubles(
        a in small_rational(), b in small_rational(), c in small_rational(), d in small_rational(),
        r in prop::sample::select(vec![2u64, 3, 33, 465]),
    ) {
        let x = QuadraticSurd::new(a, b, r);
        let y = QuadraticSurd::new(c, d, r);
        let e = x.enclosure(128);
        prop_assert!((e.mid_f64() - x.to_f64()).abs() <= 1e-9 * (1.0 + x.to_f64().abs()));
        let ord = x.try_cmp(&y).unwrap();
        let diff = x.to_f64() - y.to_f64();
        if diff.abs() > 1e-6 {
            prop_assert_eq!(ord, diff.partial_cmp(&0.0).unwrap());
        }
        let sum = x.checked_add(&y).unwrap();
        prop_assert!((sum.to_f64() - (x.to_f64() + y.to_f64())).abs() < 1e-6);
    }

    #[test]
    fn box_certificates_persist_on_sub_boxes(
        coeffs in prop::collection::vec(-6i64..7, 1..5),
        lo in 0i64..8, len in 1i64..8, cut in 1i64..16,
    ) {
        let p = MultiPoly::univariate(Var::T, &coeffs.iter().map(|&c| rat(c, 1)).collect::<Vec<_>>());
        let (lo, hi) = (rat(lo, 8), rat(lo + len, 8));
        let mid = &lo + (&hi - &lo) * rat(cut, 16);
        let outer = certify_nonnegative(&p, &BoxDomain::new().closed(Var::T, lo.clone(), hi.clone()), false);
        let inner = certify_nonnegative(&p, &BoxDomain::new().closed(Var::T, lo.clone(), mid.clone()), false);
        if outer == BoxOutcome::Certified {
            prop_assert!(!matches!(inner, BoxOutcome::Counterexample(..)));
        }
        for o in [outer, inner] {
            if let BoxOutcome::Counterexample(point, value) = o {
                // a constant polynomial needs no coordinates
                if let Some(t) = point.get(&Var::T) {
                    prop_assert!(*t >= lo && *t <= hi);
                }
                prop_assert!(value < rat(0, 1));
                prop_assert_eq!(p.eval(&point), Some(value));
            }
        }
    }

    #[test]
    fn projection_enforces_constraints_and_is_idempotent(
        raw in prop::collection::vec(-3.0f64..3.0, 3..9),
        seed in prop::collection::vec(-1.0f64..1.0, 165),
    ) {
        let n = raw.len();
        let mean = raw.iter().sum::<f64>() / n as f64;
        let lambda: Vec<f64> = raw.iter().map(|x| x - mean).collect();
        prop_assume!(lambda.iter().map(|x| x * x).sum::<f64>() > 1e-3);
        let spec = CurvatureSpectrum::from_lambda(lambda).unwrap();
        let count = n * (n + 1) * (n + 2) / 6;
        let mut orbits = seed[..count].to_vec();
        project_orbits(&spec, &mut orbits).unwrap();
        let t = GradTensor::from_orbits(n, &orbits);
        prop_assert!(t.constraint_residual(&spec) < 1e-12);
        let mut again = orbits.clone();
        project_orbits(&spec, &mut again).unwrap();
        for (a, b) in orbits.iter().zip(&again) {
            prop_assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn json_output_round_trips(p in 48u32..160) {
        let r = report::constants_report(&constants::catalog(p).unwrap());
        let text = report::render_all(std::slice::from_ref(&r), Format::Json);
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&parsed["constants"], &r.json);
        prop_assert_eq!(report::canonical_json(&parsed), text);
    }

    /// Quadratic-form expansion against a hand-written evaluation at random rational points.
    #[test]
    fn quadratic_form_matches_direct_evaluation(
        t in (1i64..99).prop_map(|k| rat(k, 100)),
        s in positive_rational(), a in small_rational(), b in small_rational(), c in small_rational(),
        f in small_rational(), y in small_rational(), u in small_rational(), alpha in small_rational(),
    ) {
        let n = (rat(1, 1) - &t) * &s;
        let point: BTreeMap<Var, Rational> = [
            (Var::T, t.clone()), (Var::S, s.clone()), (Var::A, a.clone()), (Var::B, b.clone()),
            (Var::C, c.clone()), (Var::F, f.clone()), (Var::Y, y.clone()), (Var::N, n.clone()),
            (Var::USq, u.clone()), (Var::Alpha, alpha.clone()),
        ].into_iter().collect();
        let form = expand_quadratic_form(&BilinearTable::default(), &RatFn::var(Var::Alpha), &beta_choice(), &gamma_choice());
        let got = form.eval(&point).unwrap();
        let one = rat(1, 1);
        let beta = &c / (&s * &s);
        let gamma = &t / (rat(2, 1) * (&one - &t));
        let ts2 = &t * &s * &s;
        let u_ah = -&b - &a / rat(2, 1) + &y * &c + &ts2 / (rat(2, 1) * (&one - &t));
        let expected = &u
            + rat(4, 1) * &alpha * u_ah
            - rat(2, 1) * &beta * &c
            - rat(2, 1) * &gamma * &ts2
            + &alpha * &alpha * rat(2, 1) * &f * &s
            + &beta * &beta * &s * &s
            + &gamma * &gamma * rat(2, 1) * &n * &s;
        prop_assert_eq!(got, expected);
    }
}
