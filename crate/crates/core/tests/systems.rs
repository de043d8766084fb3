use mopquad::precision::rel_err;
use mopquad::{
    bessel_i_normalization, bessel_k_normalization, eval_type_two, gamma, nn_to_stepline, Error,
    ExtReal, NNCoefficients, PrecisionContext, SystemDescriptor, WeightSystem,
};
use proptest::prelude::*;
use rug::ops::Pow;

fn ctx() -> PrecisionContext {
    PrecisionContext::new(50).unwrap()
}

fn close(a: &ExtReal, b: &ExtReal, c: &PrecisionContext, shift: i64) -> bool {
    rel_err(a, b) <= c.tol(shift)
}

#[test]
fn bessel_k_normalization_examples() {
    let c = ctx();
    let d = bessel_k_normalization(&c.int(1), &c.int(0), &c).unwrap();
    assert_eq!(
        (d.d11.clone(), d.d21.clone(), d.d22.clone()),
        (c.int(1), c.int(2), c.int(4))
    );
    let d = bessel_k_normalization(&c.int(0), &c.int(0), &c).unwrap();
    assert_eq!(
        (d.d11.clone(), d.d21.clone(), d.d22.clone()),
        (c.int(1), c.int(1), c.int(1))
    );
}

#[test]
fn bessel_i_normalization_examples() {
    let c = ctx();
    let e = c.one().exp();
    let d = bessel_i_normalization(&c.int(0), &c.int(1), &c).unwrap();
    for v in [&d.d11, &d.d21, &d.d22] {
        assert!(close(v, &e, &c, 2));
    }
    let root = c.parse("0.5").unwrap().exp();
    let d = bessel_i_normalization(&c.int(0), &c.int(2), &c).unwrap();
    assert!(close(&d.d11, &(c.lift(&root) / 2u32), &c, 2));
    assert!(close(&d.d21, &(c.lift(&root) / 4u32), &c, 2));
    assert!(close(&d.d22, &(c.lift(&root) / 8u32), &c, 2));
}

#[test]
fn normalization_inverts_type_one_constants() {
    let c = ctx();
    let systems = [
        WeightSystem::bessel_k("0.25", "1.5").unwrap(),
        WeightSystem::bessel_k("-0.5", "0").unwrap(),
        WeightSystem::bessel_i("-0.5", "0.75").unwrap(),
        WeightSystem::bessel_i("2", "3").unwrap(),
    ];
    for s in &systems {
        let d = s.normalization(&c).unwrap();
        let (a1, a2, b2) = s.type_one_constants(&c).unwrap().unwrap();
        let m = d.times(&a1, &a2, &b2);
        let expect = [[1, 0], [0, 1]];
        for i in 0..2 {
            for j in 0..2 {
                let err = c.lift(&m[i][j] - expect[i][j]).abs();
                assert!(err <= c.tol(2), "{:?} entry ({i},{j})", s.descriptor());
            }
        }
    }
}

#[test]
fn moment_examples() {
    let c = ctx();
    let k = WeightSystem::bessel_k("1", "0").unwrap();
    assert_eq!(k.moment(1, 0, &c).unwrap(), 1);
    assert_eq!(k.moment(2, 0, &c).unwrap(), 2);
    let i = WeightSystem::bessel_i("0", "1").unwrap();
    let e = c
        .parse("2.71828182845904523536028747135266249775724709369995")
        .unwrap();
    assert!(close(&i.moment(1, 0, &c).unwrap(), &e, &c, 1));
}

#[test]
fn bessel_k_moment_ratio_is_exact() {
    let c = ctx();
    for (alpha, nu) in [("1", "0"), ("0.5", "1.25"), ("-0.75", "2")] {
        let s = WeightSystem::bessel_k(alpha, nu).unwrap();
        let (a, v) = (c.parse(alpha).unwrap(), c.parse(nu).unwrap());
        for n in 1..=20usize {
            let ratio = s.moment(1, n, &c).unwrap() / s.moment(1, n - 1, &c).unwrap();
            let nn = c.int(n as i64);
            let shifted = c.lift(&nn + &a);
            let expect = c.lift(&shifted + &v) * shifted;
            assert!(close(&ratio, &expect, &c, 2), "alpha={alpha} nu={nu} n={n}");
        }
    }
}

#[test]
fn bessel_i_zeroth_moment_matches_closed_form() {
    let c = ctx();
    for (nu, rate) in [("0", "1"), ("0.5", "2"), ("-0.5", "0.4"), ("3", "1.5")] {
        let s = WeightSystem::bessel_i(nu, rate).unwrap();
        let (v, r) = (c.parse(nu).unwrap(), c.parse(rate).unwrap());
        for (j, shift) in [(1, 0), (2, 1)] {
            let vj = c.lift(&v + shift);
            // c^{-ν_j-1} e^{1/c}
            let closed = c.lift(&r).pow(&(-vj - 1u32)) * (c.one() / &r).exp();
            assert!(
                close(&s.moment(j, 0, &c).unwrap(), &closed, &c, 2),
                "nu={nu} c={rate} j={j}"
            );
        }
    }
}

#[test]
fn bessel_k_moments_against_gamma_products() {
    let c = ctx();
    let s = WeightSystem::bessel_k("0.5", "1.5").unwrap();
    for n in 0..8usize {
        let x = c.int(n as i64);
        let g = |shift: &str| gamma(&(c.lift(&x) + c.parse(shift).unwrap()), &c).unwrap();
        assert!(close(
            &s.moment(1, n, &c).unwrap(),
            &(g("3") * g("1.5")),
            &c,
            2
        ));
        assert!(close(
            &s.moment(2, n, &c).unwrap(),
            &(g("4") * g("1.5")),
            &c,
            2
        ));
    }
}

#[test]
fn coefficient_examples() {
    let c = ctx();
    let k = WeightSystem::bessel_k("1", "0").unwrap();
    let expect_k = [(4, 0, 0), (14, 20, 0), (30, 144, 72)];
    for (n, (b, cc, d)) in expect_k.into_iter().enumerate() {
        let t = k.coefficients(n, &c).unwrap();
        assert_eq!((t.b, t.c, t.d), (c.int(b), c.int(cc), c.int(d)), "n={n}");
    }
    let i = WeightSystem::bessel_i("0", "1").unwrap();
    let expect_i = [(2, 0, 0), (4, 3, 0), (6, 8, 2)];
    for (n, (b, cc, d)) in expect_i.into_iter().enumerate() {
        let t = i.coefficients(n, &c).unwrap();
        assert_eq!((t.b, t.c, t.d), (c.int(b), c.int(cc), c.int(d)), "n={n}");
    }
}

#[test]
fn parameter_domains() {
    for (a, n) in [("-1", "0"), ("1", "-0.1"), ("-3", "2")] {
        assert!(
            matches!(WeightSystem::bessel_k(a, n), Err(Error::Domain(_))),
            "{a} {n}"
        );
    }
    for (n, r) in [("-1", "1"), ("0", "0"), ("0", "-2")] {
        assert!(
            matches!(WeightSystem::bessel_i(n, r), Err(Error::Domain(_))),
            "{n} {r}"
        );
    }
    assert!(matches!(
        WeightSystem::bessel_k("one", "0"),
        Err(Error::Parse(_))
    ));
}

#[test]
fn coefficients_are_deterministic() {
    let c = ctx();
    let a = WeightSystem::bessel_i("0.3", "1.7").unwrap();
    let b = WeightSystem::bessel_i("0.3", "1.7").unwrap();
    for n in 0..30 {
        let (x, y) = (
            a.coefficients(n, &c).unwrap(),
            b.coefficients(n, &c).unwrap(),
        );
        assert_eq!(c.format(&x.b), c.format(&y.b));
        assert_eq!(c.format(&x.c), c.format(&y.c));
        assert_eq!(c.format(&x.d), c.format(&y.d));
    }
}

#[test]
fn nn_conversion_examples() {
    let c = ctx();
    let mut nn = NNCoefficients::new();
    for n in 0..3 {
        for m in 0..3 {
            for map in [&mut nn.a, &mut nn.b, &mut nn.c, &mut nn.d] {
                map.insert((n, m), c.int(1));
            }
        }
    }
    nn.c.insert((1, 1), c.int(5));
    nn.a.insert((1, 1), c.int(2));
    nn.c.insert((0, 0), c.int(3));
    nn.d.insert((0, 0), c.int(1));
    let s = nn_to_stepline(&nn, 2, &c).unwrap();
    assert_eq!(*s.b(2), 5);
    assert_eq!(*s.d(2), 4);

    let mut flat = nn.clone();
    flat.c.insert((0, 0), c.int(1));
    let s = nn_to_stepline(&flat, 2, &c).unwrap();
    assert_eq!(*s.d(2), 0);

    let mut sparse = nn.clone();
    sparse.b.remove(&(2, 1));
    match nn_to_stepline(&sparse, 3, &c) {
        Err(Error::IncompleteInput(what)) => assert_eq!(what, "b[2,1]"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn custom_system_from_json() {
    let text = r#"{
        "b": ["2", "4", "6"], "c": ["3", "8"], "d": ["2"],
        "D": [["2.5", "0"], ["1", "4"]],
        "moments1": ["1", "2"]
    }"#;
    let c = ctx();
    let s = WeightSystem::from_custom_json(text).unwrap();
    let t = s.coefficients(2, &c).unwrap();
    assert_eq!((t.b, t.c, t.d), (c.int(6), c.int(8), c.int(2)));
    let d = s.normalization(&c).unwrap();
    assert_eq!(d.d11, 2.5);
    assert!(s.has_moments(1) && !s.has_moments(2));
    assert!(matches!(
        s.moment(2, 0, &c),
        Err(Error::UnsupportedOracle { measure: 2 })
    ));
    assert!(matches!(
        s.coefficients(3, &c),
        Err(Error::IncompleteInput(_))
    ));

    for bad in [
        r#"{"b": ["1"], "c": [], "d": [], "extra": 1}"#,
        r#"{"b": [1.5], "c": [], "d": []}"#,
        r#"{"b": ["x"], "c": [], "d": []}"#,
        r#"{"b": ["1"], "c": [], "d": [], "D": [["1", "2"], ["0", "1"]]}"#,
        r#"{"b": ["1"], "c": [], "d": [], "D": [["0", "0"], ["0", "1"]]}"#,
    ] {
        assert!(WeightSystem::from_custom_json(bad).is_err(), "{bad}");
    }
}

#[test]
fn descriptors_round_trip() {
    for s in [
        WeightSystem::bessel_k("1", "0").unwrap(),
        WeightSystem::bessel_i("0.5", "2").unwrap(),
        WeightSystem::from_custom_json(r#"{"b": ["1", "2"], "c": ["0.5"], "d": []}"#).unwrap(),
    ] {
        let text = serde_json::to_string(&s.descriptor()).unwrap();
        let back: SystemDescriptor = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s.descriptor());
        assert_eq!(
            WeightSystem::from_descriptor(&back).unwrap().descriptor(),
            back
        );
    }
    let k = serde_json::to_string(&WeightSystem::bessel_k("1", "0").unwrap().descriptor()).unwrap();
    assert_eq!(k, r#"{"kind":"besselK","alpha":"1","nu":"0"}"#);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// d/dx P_n^ν = n P_{n-1}^{ν+1} for the besselI family at a fixed rate.
    #[test]
    fn bessel_i_derivative_identity(
        nu in -0.9f64..3.0,
        rate in 0.3f64..3.0,
        n in 1usize..=8,
        x in 0.01f64..20.0,
    ) {
        let c = ctx();
        let nu_s = format!("{nu:.6}");
        let rate_s = format!("{rate:.6}");
        let s0 = WeightSystem::bessel_i(&nu_s, &rate_s).unwrap();
        let shifted = c.parse(&nu_s).unwrap() + 1u32;
        let s1 = WeightSystem::bessel_i(&c.format(&shifted), &rate_s).unwrap();
        let x = c.parse(&format!("{x:.8}")).unwrap();
        let (_, dp) = eval_type_two(&s0, n, &x, &c).unwrap();
        let (q, _) = eval_type_two(&s1, n - 1, &x, &c).unwrap();
        prop_assert!(rel_err(&dp, &(q * n as u32)) <= c.tol(10));
    }

    #[test]
    fn bessel_i_series_converges(nu in -0.9f64..4.0, rate in 0.2f64..4.0, n in 0usize..30) {
        let c = ctx();
        let s = WeightSystem::bessel_i(&format!("{nu:.5}"), &format!("{rate:.5}")).unwrap();
        let a = s.moment(1, n, &c).unwrap();
        let wide = c.regarded(2 * c.guard());
        let b = s.moment(1, n, &wide).unwrap();
        prop_assert!(rel_err(&a, &b) <= c.tol(0));
    }
}
