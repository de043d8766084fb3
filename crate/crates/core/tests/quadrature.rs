use mopquad::precision::{agreeing_digits, format_fixed, rel_err};
use mopquad::quadrature::{pair_weights, weight_report};
use mopquad::{
    certified_pairs, exactness_degrees, integrate, integrate_named, make_rule, verify_exactness,
    weights_oracle, Error, ExtReal, Integrand, PrecisionContext, WeightSystem,
};
use proptest::prelude::*;
use rug::ops::Pow;

fn ctx(digits: u32) -> PrecisionContext {
    PrecisionContext::new(digits).unwrap()
}

fn bessel_k() -> WeightSystem {
    WeightSystem::bessel_k("1", "0").unwrap()
}

fn bessel_i() -> WeightSystem {
    WeightSystem::bessel_i("0", "1").unwrap()
}

#[test]
fn degrees_by_parity() {
    assert_eq!(exactness_degrees(1), (1, 0));
    assert_eq!(exactness_degrees(2), (2, 2));
    assert_eq!(exactness_degrees(3), (4, 3));
    assert_eq!(exactness_degrees(4), (5, 5));
    assert_eq!(exactness_degrees(5), (7, 6));
    assert_eq!(exactness_degrees(12), (17, 17));
}

#[test]
fn single_node_rules() {
    let c = ctx(50);
    let rule = make_rule(&bessel_k(), 1, &c).unwrap();
    assert_eq!(
        (
            rule.nodes[0].clone(),
            rule.weights1[0].clone(),
            rule.weights2[0].clone()
        ),
        (c.int(4), c.int(1), c.int(2))
    );
    let (o1, o2) = weights_oracle(&rule.nodes, &bessel_k(), &c).unwrap();
    assert_eq!((o1[0].clone(), o2[0].clone()), (c.int(1), c.int(2)));

    let rule = make_rule(&bessel_i(), 1, &c).unwrap();
    let e = c.one().exp();
    assert_eq!(rule.nodes[0], 2);
    assert!(rel_err(&rule.weights1[0], &e) <= c.tol(10));
    assert!(rel_err(&rule.weights2[0], &e) <= c.tol(10));
}

#[test]
fn reference_weights_in_first_row() {
    let c = ctx(100);
    let rule = make_rule(&bessel_k(), 10, &c).unwrap();
    assert_eq!(
        format_fixed(&rule.weights1[0], 20),
        "0.27736269648616286974"
    );
    assert_eq!(
        format_fixed(&rule.weights2[0], 20),
        "0.26086734230400106004"
    );
    let rule = make_rule(&bessel_i(), 10, &c).unwrap();
    assert_eq!(format_fixed(&rule.weights1[2], 10), "0.8459198767");
    // the printed value stops at 0.9551942639; the computed one continues 0.95519426396…
    assert_eq!(format_fixed(&rule.weights2[2], 11), "0.95519426396");
}

#[test]
fn oracle_weights_match_reference_columns() {
    let c = ctx(50);
    let rule = make_rule(&bessel_i(), 10, &c).unwrap();
    let (o1, o2) = weights_oracle(&rule.nodes, &bessel_i(), &c).unwrap();
    let w1 = [
        "0.3913749988",
        "0.8175616919",
        "0.8459198767",
        "0.4850707607",
        "0.1517396396",
    ];
    let w2 = [
        "0.0557885974",
        "0.4874004644",
        "0.9551942640",
        "0.8091738873",
        "0.3357737316",
    ];
    for k in 0..5 {
        assert_eq!(format_fixed(&o1[k], 10), w1[k]);
        assert_eq!(format_fixed(&o2[k], 10), w2[k]);
    }
}

#[test]
fn exactness_examples() {
    let c = ctx(100);
    for (system, n, deg) in [
        (bessel_k(), 2, (2, 2)),
        (bessel_k(), 3, (4, 3)),
        (bessel_k(), 4, (5, 5)),
        (bessel_i(), 5, (7, 6)),
    ] {
        let rule = make_rule(&system, n, &c).unwrap();
        let report = verify_exactness(&rule, &system, &c).unwrap();
        assert!(report.pass(), "N={n}");
        assert_eq!(report.measures[0].claimed_degree, deg.0);
        assert_eq!(report.measures[1].claimed_degree, deg.1);
        assert_eq!(report.measures[0].checks.len(), deg.0 + 1);
    }
}

#[test]
fn exactness_on_other_parameters() {
    let c = ctx(60);
    for system in [
        WeightSystem::bessel_k("0.5", "1.5").unwrap(),
        WeightSystem::bessel_k("-0.5", "0.25").unwrap(),
        WeightSystem::bessel_i("0.5", "2").unwrap(),
        WeightSystem::bessel_i("-0.5", "0.5").unwrap(),
    ] {
        for n in 1..=10 {
            let rule = make_rule(&system, n, &c).unwrap();
            let report = verify_exactness(&rule, &system, &c).unwrap();
            assert!(report.pass(), "{:?} N={n}", system.descriptor());
        }
    }
}

#[test]
fn beyond_the_claimed_degree_exactness_fails() {
    let c = ctx(60);
    let system = bessel_k();
    for n in [2, 3, 6, 7] {
        let rule = make_rule(&system, n, &c).unwrap();
        let (d1, d2) = exactness_degrees(n);
        for (j, d, w) in [(1, d1, &rule.weights1), (2, d2, &rule.weights2)] {
            let m = d + 1;
            let sum = rule
                .nodes
                .iter()
                .zip(w)
                .fold(c.zero(), |acc, (x, wk)| acc + c.lift(x).pow(m as u32) * wk);
            let exact = system.moment(j, m, &c).unwrap();
            assert!(
                rel_err(&sum, &exact) > c.tol(25 + m as i64),
                "N={n} measure {j}"
            );
        }
    }
}

#[test]
fn weights_sum_to_zeroth_moments() {
    let c = ctx(100);
    for system in [bessel_k(), bessel_i()] {
        let m0 = (
            system.moment(1, 0, &c).unwrap(),
            system.moment(2, 0, &c).unwrap(),
        );
        for n in [1, 2, 7, 16, 30] {
            let rule = make_rule(&system, n, &c).unwrap();
            let (s1, s2) = integrate_named(&rule, &Integrand::One, &c).unwrap();
            assert!(rel_err(&s1, &m0.0) <= c.tol(15), "N={n}");
            assert!(rel_err(&s2, &m0.1) <= c.tol(15), "N={n}");
        }
    }
}

#[test]
fn oracle_equivalence_other_parameters() {
    let c = ctx(80);
    for system in [
        WeightSystem::bessel_k("0.5", "1.5").unwrap(),
        WeightSystem::bessel_i("0.5", "2").unwrap(),
    ] {
        for n in [3, 8, 15, 20] {
            let rule = make_rule(&system, n, &c).unwrap();
            let (o1, o2) = weights_oracle(&rule.nodes, &system, &c).unwrap();
            for (a, b) in rule
                .weights1
                .iter()
                .zip(&o1)
                .chain(rule.weights2.iter().zip(&o2))
            {
                assert!(
                    rel_err(a, b) <= c.tol(25),
                    "{:?} N={n}",
                    system.descriptor()
                );
            }
        }
    }
}

#[test]
fn reference_integrals_at_ten_nodes() {
    let c = ctx(100);
    let rule = make_rule(&bessel_k(), 10, &c).unwrap();
    let (i1, i2) = integrate_named(&rule, &Integrand::ExpNeg, &c).unwrap();
    assert!(format_fixed(&i1, 12).starts_with("0.1940521520"));
    assert!(format_fixed(&i2, 12).starts_with("0.2114457811"));
    let rule = make_rule(&bessel_i(), 10, &c).unwrap();
    let (j1, j2) = integrate_named(&rule, &Integrand::Cos, &c).unwrap();
    assert!(format_fixed(&j1, 17).starts_with("0.328340082411357"));
    assert!(format_fixed(&j2, 17).starts_with("-0.395132567462746"));
}

#[test]
fn cos_errors_decrease_with_nodes() {
    let c = ctx(100);
    let j1 = c.parse("0.328224976685277123104160354501976758").unwrap();
    let j2 = c
        .parse("-0.39521954160680745592163128352397786234")
        .unwrap();
    let mut last = (0.0, 0.0);
    for n in [10, 20, 30, 40, 50] {
        let rule = make_rule(&bessel_i(), n, &c).unwrap();
        let (a, b) = integrate_named(&rule, &Integrand::Cos, &c).unwrap();
        let now = (
            agreeing_digits(&a, &j1, 100.0),
            agreeing_digits(&b, &j2, 100.0),
        );
        assert!(
            now.0 > last.0 && now.1 > last.1,
            "N={n}: {now:?} after {last:?}"
        );
        last = now;
    }
}

#[test]
fn integrands_parse_and_evaluate() {
    let c = ctx(30);
    let rule = make_rule(&bessel_k(), 6, &c).unwrap();
    let (p1, p2) = integrate_named(&rule, &Integrand::parse("power:3").unwrap(), &c).unwrap();
    assert!(rel_err(&p1, &bessel_k().moment(1, 3, &c).unwrap()) <= c.tol(10));
    assert!(rel_err(&p2, &bessel_k().moment(2, 3, &c).unwrap()) <= c.tol(10));
    // 2 - x + 0.5 x^2
    let poly = Integrand::parse("polycoeffs:2,-1,0.5").unwrap();
    let (q1, _) = integrate_named(&rule, &poly, &c).unwrap();
    let m = |k| bessel_k().moment(1, k, &c).unwrap();
    let expect = m(0) * 2u32 - m(1) + m(2) / 2u32;
    assert!(rel_err(&q1, &expect) <= c.tol(10));
    for bad in ["sin", "power:x", "polycoeffs:1,a", "power:-1"] {
        assert!(Integrand::parse(bad).is_err(), "{bad}");
    }
}

#[test]
fn integrand_failure_names_the_node() {
    let c = ctx(30);
    let rule = make_rule(&bessel_k(), 3, &c).unwrap();
    let out = integrate(&rule, |x| {
        if *x > 10 {
            Err("too large".into())
        } else {
            Ok(c.one())
        }
    });
    match out {
        Err(Error::Integrand { node, reason }) => {
            let first = rule.nodes.iter().find(|x| **x > 10).unwrap();
            assert_eq!(node, mopquad::format_sci(first, 20));
            assert_eq!(reason, "too large");
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn custom_table_reproduces_builtin_rule() {
    let c = ctx(50);
    let builtin = bessel_i();
    let n = 6;
    let wide = ctx(80);
    let lit = |v: &ExtReal| wide.format(v);
    let b: Vec<String> = (0..n)
        .map(|k| lit(&builtin.coefficients(k, &wide).unwrap().b))
        .collect();
    let cc: Vec<String> = (1..n)
        .map(|k| lit(&builtin.coefficients(k, &wide).unwrap().c))
        .collect();
    let d: Vec<String> = (2..n)
        .map(|k| lit(&builtin.coefficients(k, &wide).unwrap().d))
        .collect();
    let dm = builtin.normalization(&wide).unwrap();
    let m1: Vec<String> = (0..12)
        .map(|k| lit(&builtin.moment(1, k, &wide).unwrap()))
        .collect();
    let m2: Vec<String> = (0..12)
        .map(|k| lit(&builtin.moment(2, k, &wide).unwrap()))
        .collect();
    let doc = serde_json::json!({
        "b": b, "c": cc, "d": d,
        "D": [[lit(&dm.d11), "0"], [lit(&dm.d21), lit(&dm.d22)]],
        "moments1": m1, "moments2": m2,
    });
    let custom = WeightSystem::from_custom_json(&doc.to_string()).unwrap();
    let a = make_rule(&builtin, n, &c).unwrap();
    let r = make_rule(&custom, n, &c).unwrap();
    for (x, y) in a
        .nodes
        .iter()
        .chain(&a.weights1)
        .chain(&a.weights2)
        .zip(r.nodes.iter().chain(&r.weights1).chain(&r.weights2))
    {
        assert!(rel_err(x, y) <= c.tol(2));
    }
    assert!(verify_exactness(&r, &custom, &c).unwrap().pass());
}

#[test]
fn custom_table_without_oracles() {
    let c = ctx(30);
    let bare =
        WeightSystem::from_custom_json(r#"{"b": ["2", "4", "6"], "c": ["3", "8"], "d": ["2"]}"#)
            .unwrap();
    assert!(matches!(
        make_rule(&bare, 3, &c),
        Err(Error::IncompleteInput(_))
    ));
    let with_d = WeightSystem::from_custom_json(
        r#"{"b": ["2", "4", "6"], "c": ["3", "8"], "d": ["2"], "D": [["1", "0"], ["1", "1"]]}"#,
    )
    .unwrap();
    let rule = make_rule(&with_d, 3, &c).unwrap();
    assert!(matches!(
        verify_exactness(&rule, &with_d, &c),
        Err(Error::UnsupportedOracle { measure: 1 })
    ));
    assert!(matches!(
        weights_oracle(&rule.nodes, &with_d, &c),
        Err(Error::UnsupportedOracle { .. })
    ));
    assert!(matches!(
        make_rule(&with_d, 4, &c),
        Err(Error::IncompleteInput(_))
    ));
}

#[test]
fn weight_sign_report() {
    let c = ctx(100);
    for system in [bessel_k(), bessel_i()] {
        for n in [10, 25, 50] {
            let rule = make_rule(&system, n, &c).unwrap();
            let report = weight_report(&rule);
            for s in report.signs {
                assert_eq!(s.positive + s.negative + s.zero, n);
            }
            println!(
                "{:?} N={n}: positive {}/{} and {}/{}, largest node {}",
                system.descriptor(),
                report.signs[0].positive,
                n,
                report.signs[1].positive,
                n,
                mopquad::format_sci(&report.largest_node, 6)
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn rescaled_left_vectors_give_the_same_weights(
        which in 0usize..2,
        n in 1usize..14,
        pick in 0usize..14,
        mant in 1.0f64..10.0,
        exp in -80i32..80,
        neg in any::<bool>(),
    ) {
        let c = ctx(60);
        let system = if which == 0 { bessel_k() } else { bessel_i() };
        let (pairs, work) = certified_pairs(&system, n, &c).unwrap();
        let dm = system.normalization(&work).unwrap();
        let p = &pairs[pick % n];
        let s = work.parse(&format!("{}{mant:.12}e{exp}", if neg { "-" } else { "" })).unwrap();
        let scaled: Vec<ExtReal> = p.left.iter().map(|u| work.lift(u) * &s).collect();
        let (a1, a2) = pair_weights(&p.left, &p.right, &p.node, &dm, &work).unwrap();
        let (b1, b2) = pair_weights(&scaled, &p.right, &p.node, &dm, &work).unwrap();
        prop_assert!(rel_err(&b1, &a1) <= c.tol(20));
        prop_assert!(rel_err(&b2, &a2) <= c.tol(20));
    }
}
