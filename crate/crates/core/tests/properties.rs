use proptest::prelude::*;

use causal_surgery::causality::isometry_deviation;
use causal_surgery::dsl::{eval_expression, parse_expression, BinOp, Bindings, Constant, Expr, ExprKind, Func, Var};
use causal_surgery::geometry::{
    freeze_ramp, spd_generalized_max_eigenvalue, time_reverse, unit_step, MetricField, SpatialDomain, SymMatrix,
};
use causal_surgery::scenario::csv::{parse_dump, render};

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0.0..1e6f64).prop_map(Expr::number),
        prop::sample::select(vec![0.0, 0.5, 1e-9, 3e12, 1.0 / 3.0]).prop_map(Expr::number),
        prop::sample::select(vec![Var::T, Var::X1, Var::X2]).prop_map(Expr::var),
        prop::bool::ANY.prop_map(|pi| Expr::new(ExprKind::Constant(if pi { Constant::Pi } else { Constant::E }))),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(5, 48, 3, |inner| {
        let ops = prop::sample::select(vec![BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Pow]);
        let unary = prop::sample::select(vec![Func::Exp, Func::Sin, Func::Cos, Func::Tanh, Func::Sqrt]);
        let variadic = prop::sample::select(vec![Func::Min, Func::Max]);
        prop_oneof![
            inner.clone().prop_map(Expr::neg),
            (ops, inner.clone(), inner.clone()).prop_map(|(op, a, b)| Expr::binary(op, a, b)),
            (unary, inner.clone()).prop_map(|(f, a)| Expr::call(f, vec![a])),
            (variadic, prop::collection::vec(inner, 2..4)).prop_map(|(f, args)| Expr::call(f, args)),
        ]
    })
}

fn spd() -> impl Strategy<Value = SymMatrix> {
    (0.1..3.0f64, -3.0..3.0f64, 0.1..3.0f64).prop_map(|(a, b, c)| SymMatrix::two(a * a, a * b, b * b + c * c))
}

fn wobbly(a: f64, b: f64) -> MetricField {
    let circle = SpatialDomain::circle(std::f64::consts::TAU, 8).unwrap();
    MetricField::closed_form(
        circle,
        "wobbly",
        move |t, x| 1.0 + 0.5 * (a * t + x[0]).sin().powi(2),
        move |t, x| SymMatrix::one(2.0 + (b * t).sin() + 0.5 * x[0].cos()),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn printed_expressions_parse_back(e in expr(), t in -2.0..2.0f64, x1 in 0.0..6.0f64) {
        let back = parse_expression(&e.to_string()).unwrap();
        prop_assert_eq!(&back, &e);
        let b = Bindings::event(t, [x1, 0.5]);
        match (eval_expression(&e, &b), eval_expression(&back, &b)) {
            (Ok(u), Ok(v)) => prop_assert_eq!(u.to_bits(), v.to_bits()),
            (Err(_), Err(_)) => {}
            (u, v) => prop_assert!(false, "{:?} vs {:?}", u, v),
        }
    }

    #[test]
    fn parser_never_panics(s in "[-+*/^(), .0-9a-z]{0,40}") {
        let _ = parse_expression(&s);
    }

    #[test]
    fn unit_step_is_monotone_and_symmetric(r in -0.5..1.5f64, d in 0.0..0.5f64) {
        let (a, b) = (unit_step(r), unit_step(r + d));
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(a <= b);
        prop_assert!((unit_step(r) + unit_step(1.0 - r) - 1.0).abs() <= 1e-15);
        prop_assert!(freeze_ramp(r) <= freeze_ramp(r + d));
        prop_assert!(freeze_ramp(r) <= r.max(0.0) + 1e-15);
    }

    #[test]
    fn generalized_eigenvalue_dominates_every_ratio(a in spd(), b in spd(), phi in 0.0..std::f64::consts::TAU) {
        let mu = spd_generalized_max_eigenvalue(&a, &b).unwrap();
        let v = [phi.cos(), phi.sin()];
        prop_assert!(b.quad(v) / a.quad(v) <= mu * (1.0 + 1e-12));
    }

    #[test]
    fn convex_combinations_stay_positive(a in spd(), b in spd(), r in 0.0..=1.0f64) {
        let m = a.lerp(&b, r);
        prop_assert!(m.is_spd());
        prop_assert!(m.min_eigenvalue() >= a.min_eigenvalue().min(b.min_eigenvalue()) * (1.0 - 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn time_reversal_is_an_involution(a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let m = wobbly(a, b);
        let twice = time_reverse(&time_reverse(&m));
        let times: Vec<f64> = (0..=12).map(|k| -3.0 + 0.5 * k as f64).collect();
        prop_assert_eq!(isometry_deviation(&twice, &m, &times, 0.0).unwrap(), 0.0);
        let once = time_reverse(&m);
        let s = once.eval(0.75, [1.0, 0.0]).unwrap();
        let r = m.eval(-0.75, [1.0, 0.0]).unwrap();
        prop_assert_eq!(s.lapse.to_bits(), r.lapse.to_bits());
    }

    #[test]
    fn dumps_round_trip_bit_exactly(a in -2.0..2.0f64, b in -2.0..2.0f64, n in 2usize..6) {
        let m = wobbly(a, b);
        let times: Vec<f64> = (0..n).map(|k| -1.0 + 0.375 * k as f64).collect();
        let text = render(&m, None, &times).unwrap();
        let dump = parse_dump(&text, m.domain()).unwrap();
        let back = dump.grid.into_field("back");
        prop_assert_eq!(isometry_deviation(&back, &m, &times, 0.0).unwrap(), 0.0);
    }
}
