use proptest::prelude::*;
use shla::expr::{parse, Expr, Tape};

const VARS: [&str; 3] = ["x", "y", "z"];

/// Random expressions in `x, y, z` built from text, so the parser is on the
/// path too. Denominators are kept away from zero.
fn expr_text() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (-5i64..=5).prop_map(|n| format!("{n}")),
        (1i64..=9, 1i64..=9).prop_map(|(p, q)| format!("{p}/{q}")),
        Just("pi".to_string()),
        prop::sample::select(VARS.to_vec()).prop_map(str::to_string),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) + ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) - ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) * ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) / (2 + sin({b}))")),
            (inner.clone(), 2i32..=3).prop_map(|(a, n)| format!("({a})^{n}")),
            inner.clone().prop_map(|a| format!("sin({a})")),
            inner.clone().prop_map(|a| format!("cos({a})")),
            inner.prop_map(|a| format!("exp(sin({a}))")),
        ]
    })
}

fn point() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-1.0..1.0f64)
}

fn at(e: &Expr, p: &[f64; 3]) -> f64 {
    e.eval_at(&[("x", p[0]), ("y", p[1]), ("z", p[2])]).unwrap()
}

fn central(e: &Expr, p: &[f64; 3], axis: usize, h: f64) -> f64 {
    let mut a = *p;
    let mut b = *p;
    a[axis] += h;
    b[axis] -= h;
    (at(e, &a) - at(e, &b)) / (2.0 * h)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn derivative_matches_finite_differences(text in expr_text(), p in point(), axis in 0usize..3) {
        let e = parse(&text).unwrap();
        let exact = at(&e.diff(VARS[axis]), &p);
        let fd = central(&e, &p, axis, 1e-5);
        prop_assert!((exact - fd).abs() <= 1e-6 * (1.0 + exact.abs()), "{text}: {exact} vs {fd}");
    }

    #[test]
    fn printing_round_trips(text in expr_text(), p in point()) {
        let e = parse(&text).unwrap();
        let again = parse(&e.to_string()).unwrap();
        prop_assert_eq!(e.to_string(), again.to_string());
        let (u, v) = (at(&e, &p), at(&again, &p));
        prop_assert!((u - v).abs() <= 1e-12 * (1.0 + u.abs()));
    }

    #[test]
    fn tape_agrees_with_tree(text in expr_text(), p in point()) {
        let e = parse(&text).unwrap();
        let t = Tape::compile(std::slice::from_ref(&e), &VARS).unwrap();
        let (u, v) = (t.eval(&p)[0], at(&e, &p));
        prop_assert!((u - v).abs() <= 1e-12 * (1.0 + v.abs()));
    }

    #[test]
    fn differentiation_is_linear(a in expr_text(), b in expr_text(), p in point(), c in -3i64..=3) {
        let (f, g) = (parse(&a).unwrap(), parse(&b).unwrap());
        let lhs = (&f * Expr::int(c) + &g).diff("x");
        let rhs = f.diff("x") * Expr::int(c) + g.diff("x");
        let (u, v) = (at(&lhs, &p), at(&rhs, &p));
        prop_assert!((u - v).abs() <= 1e-10 * (1.0 + u.abs()));
    }

    #[test]
    fn product_rule(a in expr_text(), b in expr_text(), p in point()) {
        let (f, g) = (parse(&a).unwrap(), parse(&b).unwrap());
        let lhs = (&f * &g).diff("y");
        let rhs = f.diff("y") * &g + &f * g.diff("y");
        let (u, v) = (at(&lhs, &p), at(&rhs, &p));
        prop_assert!((u - v).abs() <= 1e-10 * (1.0 + u.abs()));
    }

    #[test]
    fn chain_rule(a in expr_text(), p in point()) {
        let f = parse(&a).unwrap();
        let lhs = f.sin().diff("z");
        let rhs = f.cos() * f.diff("z");
        let (u, v) = (at(&lhs, &p), at(&rhs, &p));
        prop_assert!((u - v).abs() <= 1e-10 * (1.0 + u.abs()));
    }
}

#[test]
fn symbols_outside_the_expression_differentiate_to_zero() {
    let e = parse("sin(2*pi*x) * y^2").unwrap();
    assert!(e.diff("z").is_zero());
    assert!(e.diff("q1").is_zero());
}
