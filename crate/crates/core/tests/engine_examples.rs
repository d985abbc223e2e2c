use eulercheck::dsl::{builtin_corpus, parse_expr, Corpus, Identity, Param};
use eulercheck::engine::{
    evaluate, outcome, run, verdict, Env, EvalBudget, EvalError, Mode, Outcome, RunOptions,
    Verdict,
};
use eulercheck::mpball::{const_pi, BallReal};
use num_bigint::BigInt;
use num_rational::BigRational;

fn dec(s: &str) -> BigRational {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    let den = num_traits::pow(BigInt::from(10), frac.len());
    BigRational::new(format!("{int}{frac}").parse().unwrap(), den)
}

/// The ball lies within `[prefix, prefix + ulp]`: every point starts with
/// the given decimal digits.
fn starts_with(b: &BallReal, prefix: &str) -> bool {
    let lo = dec(prefix);
    let frac = prefix.split_once('.').map_or(0, |(_, f)| f.len());
    let ulp = BigRational::new(1.into(), num_traits::pow(BigInt::from(10), frac));
    b.lower_rational() >= lo && b.upper_rational() <= lo + ulp
}

fn id(name: &str) -> Identity {
    builtin_corpus().get(name).unwrap().clone()
}

fn budget(digits: u32) -> EvalBudget {
    EvalBudget {
        digits,
        ..EvalBudget::default()
    }
}

#[test]
fn paired_product_value() {
    let e = parse_expr("prod(k, 1..inf, 1 - (-1)^k/(2*k + 1))", None).unwrap();
    let v = evaluate(&e, &Env::new(), &EvalBudget::default()).unwrap();
    assert!(starts_with(&v.value, "1.1107207345"));
}

#[test]
fn constant_meets_radius() {
    let e = parse_expr("pi/4", None).unwrap();
    let v = evaluate(&e, &Env::new(), &budget(30)).unwrap();
    assert!(v.value.rad().to_f64() <= 1e-30);
    assert_eq!(v.stats.terms_used, 0);
}

#[test]
fn chrystal_side_at_zero_is_quarter_pi() {
    let eq2 = id("eq2");
    let p = eq2.param.as_ref().unwrap();
    let v = evaluate(&eq2.rhs, &Env::with(&p.name, 0), &budget(30)).unwrap();
    assert!(v.value.overlaps(&const_pi(40).mul_2exp(-2)));
}

#[test]
fn refutations_with_certified_gaps() {
    let j = verdict(&id("eq2"), Some(0), &budget(30));
    match j.verdict {
        Verdict::Refuted { gap } => assert!(gap >= dec("0.3")),
        v => panic!("{v:?}"),
    }
    let j = verdict(&id("eq3"), Some(1), &budget(30));
    match j.verdict {
        // (32/pi^3)^2 - 1 = 0.06512534...
        Verdict::Refuted { gap } => assert!(gap >= dec("0.05") && gap <= dec("0.0651254")),
        v => panic!("{v:?}"),
    }
}

#[test]
fn refutations_survive_doubled_precision() {
    for n in 0..=3 {
        let eq2 = id("eq2");
        let j = verdict(&eq2, Some(n), &budget(20));
        assert!(matches!(j.verdict, Verdict::Refuted { .. }));
        let env = Env::with("n", n);
        let l = evaluate(&eq2.lhs, &env, &budget(40)).unwrap();
        let r = evaluate(&eq2.rhs, &env, &budget(40)).unwrap();
        assert!(!l.value.overlaps(&r.value), "n = {n}");
    }
}

#[test]
fn beta_nine_closed_form() {
    let j = verdict(&id("eq7"), None, &budget(30));
    match j.verdict {
        Verdict::Confirmed { digits } => assert!(digits >= 30),
        v => panic!("{v:?}"),
    }
    // confirmed digits imply both radii and the midpoint distance are small
    let (l, r) = (j.lhs.unwrap(), j.rhs.unwrap());
    assert!(l.rad().to_f64() <= 1e-30 && r.rad().to_f64() <= 1e-30);
    assert!(l.mid_distance(&r).to_f64() <= 1e-30);
}

#[test]
fn confirmation_is_monotone_in_budget() {
    let eq6 = id("eq6");
    let mut last = 0;
    for digits in [12, 24, 40] {
        match verdict(&eq6, Some(4), &budget(digits)).verdict {
            Verdict::Confirmed { digits: d } => {
                assert!(d >= last);
                last = d;
            }
            v => panic!("{v:?}"),
        }
    }
}

#[test]
fn unrecognized_shapes_need_heuristic_mode() {
    let e = parse_expr("sum(k, 0..inf, 1/2^k)", None).unwrap();
    let err = evaluate(&e, &Env::new(), &budget(20)).unwrap_err();
    assert!(matches!(err, EvalError::Unrecognized(_)), "{err}");
    let h = EvalBudget {
        mode: Mode::Heuristic,
        ..budget(20)
    };
    let v = evaluate(&e, &Env::new(), &h).unwrap();
    assert!(v.stats.heuristic);
    assert!(v.value.contains_int(2));
    // where a rigorous route exists, heuristic mode takes it
    let e = parse_expr("sum(k, 0..inf, (-1)^k/(2*k + 1)^3)", None).unwrap();
    let rig = evaluate(&e, &Env::new(), &budget(20)).unwrap();
    let heu = evaluate(&e, &Env::new(), &h).unwrap();
    assert!(!heu.stats.heuristic);
    assert!(rig.value.contains(&heu.value));
}

#[test]
fn refuted_gap_and_digits_fields() {
    let eq11 = id("eq11_as_printed");
    let j = verdict(&eq11, None, &budget(20));
    assert_eq!(outcome(eq11.expect, &j.verdict), Outcome::Matched);
    let v = id("eq11_sqrt3_variant");
    let j = verdict(&v, None, &budget(20));
    assert!(matches!(j.verdict, Verdict::Confirmed { digits } if digits >= 10));
}

#[test]
fn budget_is_validated() {
    let e = parse_expr("1", None).unwrap();
    assert!(evaluate(&e, &Env::new(), &budget(3)).is_err());
    let bad = EvalBudget {
        max_terms: 0,
        ..EvalBudget::default()
    };
    assert!(run(&Corpus::default(), &bad, &RunOptions::default()).is_err());
}

#[test]
fn empty_corpus_gives_empty_report() {
    let r = run(&Corpus::default(), &EvalBudget::default(), &RunOptions::default()).unwrap();
    assert!(r.results.is_empty());
    assert_eq!((r.summary.matched, r.summary.mismatched, r.summary.inconclusive), (0, 0, 0));
    assert_eq!(r.summary.exit_code(), 0);
}

#[test]
fn reports_are_deterministic_and_schedule_free() {
    let corpus = builtin_corpus();
    let b = budget(20);
    let opts = RunOptions {
        corpus_name: "builtin".into(),
        timings: false,
    };
    let a = run(&corpus, &b, &opts).unwrap();
    let again = run(&corpus, &b, &opts).unwrap();
    assert_eq!(a.to_json(), again.to_json());
    assert_eq!(a.to_text(), again.to_text());
    assert!(!a.to_json().contains("\"ms\""));
    assert_eq!(a.summary.exit_code(), 0, "{}", a.to_text());

    let serial = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| run(&corpus, &b, &opts).unwrap());
    assert_eq!(a, serial);

    // record order follows the corpus; verdicts do not depend on it
    let mut reversed = corpus.clone();
    reversed.identities.reverse();
    let r = run(&reversed, &b, &opts).unwrap();
    let key = |rec: &eulercheck::engine::Record| (rec.id.clone(), rec.param);
    let mut x: Vec<_> = a.results.iter().map(|r| (key(r), r.clone())).collect();
    let mut y: Vec<_> = r.results.iter().map(|r| (key(r), r.clone())).collect();
    x.sort_by(|p, q| p.0.cmp(&q.0));
    y.sort_by(|p, q| p.0.cmp(&q.0));
    assert_eq!(x, y);
    assert_eq!(r.results[0].id, reversed.identities[0].id);

    let ids: Vec<(String, Option<i64>)> = a.results.iter().map(key).collect();
    let expected: Vec<(String, Option<i64>)> = corpus
        .identities
        .iter()
        .flat_map(|i| match &i.param {
            Some(Param { lo, hi, .. }) => (*lo..=*hi).map(|v| (i.id.clone(), Some(v))).collect(),
            None => vec![(i.id.clone(), None)],
        })
        .collect();
    assert_eq!(ids, expected);
}

#[test]
fn timings_only_when_requested() {
    let corpus = builtin_corpus().only("eq7").unwrap();
    let opts = RunOptions {
        corpus_name: "x".into(),
        timings: true,
    };
    let r = run(&corpus, &budget(20), &opts).unwrap();
    assert!(r.results[0].ms.is_some());
    assert!(r.to_json().contains("\"ms\""));
}
