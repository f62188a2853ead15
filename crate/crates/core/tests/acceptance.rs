//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use causal_surgery::causality::ode::rk4_integrate;
use causal_surgery::causality::{
    causal_diamond_extent, check_ultrastatic, isometry_deviation, verify_cone_containment, verify_convex_bound,
    Comparison, ConeContainmentOptions, Event,
};
use causal_surgery::dsl::{eval_expression, parse_expression, BinOp, Bindings, Constant, Expr, ExprKind, Func, Var};
use causal_surgery::geometry::{
    spd_generalized_max_eigenvalue, unit_step, MetricField, SpatialDomain, SpdField, SymMatrix, TimeInterval,
};
use causal_surgery::surgery::{
    asymptotic_join, completeness_factor, cone_bound_factor, interpolate_ultrastatic, make_globally_hyperbolic,
};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twofloat::TwoFloat;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn flrw(resolution: usize) -> MetricField {
    let circle = SpatialDomain::circle(std::f64::consts::TAU, resolution).unwrap();
    MetricField::closed_form(circle, "flrw", |_, _| 1.0, |t, _| SymMatrix::one((2.0 * t).exp()))
}

fn violating(resolution: usize) -> MetricField {
    let circle = SpatialDomain::circle(std::f64::consts::TAU, resolution).unwrap();
    MetricField::closed_form(circle, "shrinking", |_, _| 1.0, |t: f64, _| SymMatrix::one((-2.0 * t.abs()).exp()))
}

/// Theorem 1 on the FLRW circle.
fn criterion_1() -> Outcome {
    let start = Instant::now();
    let m = flrw(256);
    let g0 = m.slice(0.0);
    let j = completeness_factor(m.domain(), &g0);
    let lower = cone_bound_factor(&m, &j, &g0);
    let out = make_globally_hyperbolic(&m, None).unwrap();
    let times = TimeInterval::new(-3.0, 3.0).sample_times(192);
    let mut worst_rel: f64 = 0.0;
    let mut worst_oracle: f64 = 0.0;
    let mut worst_gap = f64::INFINITY;
    for &t in &times {
        let expected = (-2.0 * t).exp();
        for x in m.domain().grid_points() {
            let v = lower.eval(t, x).unwrap();
            worst_rel = worst_rel.max((v - expected).abs() / expected);
            // direction oracle: sup over v = +-1 of j g0(v, v) max(1, lambda) / g_t(v, v)
            let s = m.eval(t, x).unwrap();
            let r = g0.eval(x).unwrap();
            let oracle = [1.0, -1.0]
                .iter()
                .map(|&d| s.lapse.max(1.0) * r.quad([d, 0.0]) / s.spatial.quad([d, 0.0]))
                .fold(0.0, f64::max);
            worst_oracle = worst_oracle.max((v - oracle).abs() / oracle);
            let o = out.metric.eval(t, x).unwrap();
            let bound = r.matrix().scale(o.lapse.max(1.0));
            worst_gap = worst_gap.min((*o.spatial.matrix() - bound).min_eigenvalue());
        }
    }
    let elapsed = start.elapsed();
    let passed = worst_rel <= 1e-6 && worst_oracle <= 1e-6 && worst_gap >= -1e-9 && elapsed < Duration::from_secs(5);
    outcome(
        passed,
        format!(
            "lower vs e^-2t rel {worst_rel:.2e}, vs direction oracle {worst_oracle:.2e} (<= 1e-6); \
             min eig(f g_t - max(1,l) j g0) {worst_gap:.3e} (>= -1e-9); {} samples; {:.2}s (< 5s)",
            times.len() * 256,
            elapsed.as_secs_f64()
        ),
    )
}

/// Cone containment on the Theorem 1 output, and rejection of a violating metric.
fn criterion_2() -> Outcome {
    let start = Instant::now();
    let m = flrw(256);
    let out = make_globally_hyperbolic(&m, None).unwrap();
    let opts = ConeContainmentOptions {
        n_samples: 1000,
        seed: 2024,
        tolerance: 1e-4,
        ..Default::default()
    };
    let good = verify_cone_containment(&out.metric, &out.completeness, &out.g0, &opts).unwrap();
    let bad_metric = violating(256);
    let bad_g0 = bad_metric.slice(0.0);
    let j = completeness_factor(bad_metric.domain(), &bad_g0);
    let bad = verify_cone_containment(&bad_metric, &j, &bad_g0, &opts).unwrap();
    let elapsed = start.elapsed();
    let max_len = 2.0 - good.worst_margin;
    let passed = good.passed
        && max_len <= 2.0 + 1e-4
        && !bad.passed
        && !bad.witnesses.is_empty()
        && elapsed < Duration::from_secs(20);
    let witness = bad
        .witnesses
        .first()
        .map(|w| format!("{} length {:.3}", w.policy, w.reference_length))
        .unwrap_or_default();
    outcome(
        passed,
        format!(
            "1000 curves: max j g0-length {max_len:.6} (<= 2 + 1e-4); violating metric rejected = {}, witness: {witness}; {:.2}s (< 20s)",
            !bad.passed,
            elapsed.as_secs_f64()
        ),
    )
}

/// Join certificates for FLRW with the static metric 4 g0.
fn criterion_3() -> Outcome {
    let g = flrw(64);
    let h = MetricField::ultrastatic(SpdField::constant(g.domain().clone(), SymMatrix::one(4.0)));
    let join = asymptotic_join(&g, &h).unwrap();
    let future_times = TimeInterval::new(4.0, 10.0).sample_times(96);
    let future = isometry_deviation(&join.metric, &g, &future_times, join.future_shift).unwrap();
    let past_times = TimeInterval::new(-20.0, -1.0).sample_times(76);
    let past = isometry_deviation(&join.metric, &h, &past_times, join.past_shift).unwrap();
    let ultrastatic = check_ultrastatic(&join.metric, join.past_window, 1e-10);
    let mut exact = true;
    for x in g.domain().grid_points() {
        let a = join.metric.eval(-1.0, x).unwrap();
        let b = join.metric.eval(-10.0, x).unwrap();
        exact &= a == b && a.spatial.upper() == vec![4.0] && a.lapse == 1.0;
        for t in [4.0, 5.25, 9.0] {
            exact &= join.metric.eval(t, x).unwrap() == g.eval(t - 3.0, x).unwrap();
        }
    }
    outcome(
        future <= 1e-10 && past <= 1e-10 && ultrastatic && exact && join.is_certified(),
        format!(
            "future deviation {future:.1e}, past deviation {past:.1e} (<= 1e-10); past ultrastatic at 1e-10: {ultrastatic}; \
             plateau samples bit-exact: {exact}; {} certificates pass: {}",
            join.certificates.len(),
            join.is_certified()
        ),
    )
}

/// Comparison bounds of the interpolation and bounded diamonds.
fn criterion_4() -> Outcome {
    let torus = SpatialDomain::torus([1.0, 1.0], [64, 64]).unwrap();
    let k0 = SpdField::identity(torus.clone());
    let k1 = SpdField::constant(torus.clone(), SymMatrix::two(2.0, 0.0, 2.0));
    let times = TimeInterval::new(-1.0, 2.0).sample_times(192);
    let report = verify_convex_bound(&k0, &k1, &times, 0.0).unwrap();
    // closed form: k_theta - c k0 = (1 + theta - c) I and k_theta - c k1 = (1 + theta - 2 c) I
    let (c0, c1) = (1.0 - unit_step(2.0 / 3.0), unit_step(1.0 / 3.0));
    let lo = times.iter().filter(|&&t| t <= 2.0 / 3.0).map(|&t| 1.0 + unit_step(t) - c0).fold(f64::INFINITY, f64::min);
    let hi = times.iter().filter(|&&t| t >= 1.0 / 3.0).map(|&t| 1.0 + unit_step(t) - 2.0 * c1).fold(f64::INFINITY, f64::min);
    let agree = (report.lower_region_min_eigenvalue - lo).abs() < 1e-12 && (report.upper_region_min_eigenvalue - hi).abs() < 1e-12;

    let u0 = MetricField::ultrastatic(k0.clone());
    let u1 = MetricField::ultrastatic(k1.clone());
    let join = interpolate_ultrastatic(&u0, &u1).unwrap();
    let covering = Comparison::Covering { k0, k1 };
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut bounded = 0;
    let mut widest: f64 = 0.0;
    for _ in 0..100 {
        let tp = rng.random_range(-1.0..1.5);
        let tq = tp + rng.random_range(0.05..1.0);
        let p = Event::new(tp, [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)]);
        let q = Event::new(tq, [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)]);
        let d = causal_diamond_extent(&join.metric, p, q, 8, &covering).unwrap();
        if d.bounded {
            bounded += 1;
        }
        widest = widest.max(d.extent);
    }
    let passed = report.lower_region_min_eigenvalue >= -1e-12
        && report.upper_region_min_eigenvalue >= -1e-12
        && agree
        && bounded == 100;
    outcome(
        passed,
        format!(
            "min eig lower region {:.6} / upper region {:.6} (>= -1e-12, closed form agrees: {agree}); \
             {bounded}/100 diamonds bounded, widest extent {widest:.4}",
            report.lower_region_min_eigenvalue, report.upper_region_min_eigenvalue
        ),
    )
}

fn random_spd(rng: &mut ChaCha8Rng) -> SymMatrix {
    let a = rng.random_range(0.1..3.0);
    let b = rng.random_range(-3.0..3.0);
    let c = rng.random_range(0.1..3.0);
    SymMatrix::two(a * a, a * b, b * b + c * c)
}

/// Generalized eigenvalue against a 10^4-direction scan.
fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (a, b) = (random_spd(&mut rng), random_spd(&mut rng));
        let mu = spd_generalized_max_eigenvalue(&a, &b).unwrap();
        let scan = (0..10_000)
            .map(|k| {
                let phi = rng.random_range(0.0..std::f64::consts::TAU);
                let _ = k;
                let v = [phi.cos(), phi.sin()];
                b.quad(v) / a.quad(v)
            })
            .fold(f64::MIN, f64::max);
        worst = worst.max((mu - scan).abs() / mu);
    }
    outcome(worst <= 1e-3, format!("100 pairs, max relative difference {worst:.2e} (<= 1e-3)"))
}

/// Null curve of `-dt^2 + e^{2t} dx^2`: `dx/dt = e^{-t}`, `x(1) = 1 - e^{-1}`.
fn null_curve_error<T>(steps: usize, exp: impl Fn(T) -> T, to_f64: impl Fn(T) -> f64) -> f64
where
    T: num_traits::Num + Copy + num_traits::FromPrimitive,
{
    let zero = T::from_f64(0.0).unwrap();
    let one = T::from_f64(1.0).unwrap();
    let x = rk4_integrate(
        |t: T, _: &[T; 1]| Ok::<_, std::convert::Infallible>([exp(zero - t)]),
        zero,
        [zero],
        one,
        steps,
    )
    .unwrap();
    let exact = one - exp(zero - one);
    to_f64(x[0] - exact).abs()
}

/// `e^x` for `|x| <= 1` in double-double arithmetic: `(taylor(x / 256))^256`.
/// Built from the basic operations only, which are accurate to ~1e-32.
fn exp_dd(x: TwoFloat) -> TwoFloat {
    let r = x / 256.0;
    let mut term = TwoFloat::from(1.0);
    let mut sum = TwoFloat::from(1.0);
    for n in 1..16 {
        term = term * r / n as f64;
        sum += term;
    }
    for _ in 0..8 {
        sum = sum * sum;
    }
    sum
}

/// RK4 order. The truncation error at these steps is far below the f64
/// round-off floor, so the same generic integrator is run in double-double
/// arithmetic; the f64 figures are printed for reference.
fn criterion_6() -> Outcome {
    let e1 = null_curve_error(1000, exp_dd, f64::from);
    let e2 = null_curve_error(2000, exp_dd, f64::from);
    let ratio = e1 / e2;
    let f1 = null_curve_error(1000, f64::exp, |v| v);
    let f2 = null_curve_error(2000, f64::exp, |v| v);
    outcome(
        ratio >= 12.0,
        format!(
            "double-double: err(1e-3) {e1:.3e}, err(5e-4) {e2:.3e}, ratio {ratio:.2} (>= 12); \
             f64: {f1:.1e} / {f2:.1e} (round-off floor)"
        ),
    )
}

fn random_expr(rng: &mut ChaCha8Rng, depth: usize) -> Expr {
    let leaf = depth == 0 || rng.random_bool(0.25);
    if leaf {
        return match rng.random_range(0..4) {
            0 => Expr::number(rng.random_range(0.0..5.0)),
            1 => Expr::number([0.5, 1.0, 2.0, 1e-3, 12.25][rng.random_range(0..5)]),
            2 => Expr::var([Var::T, Var::X1, Var::X2][rng.random_range(0..3)]),
            _ => Expr::new(ExprKind::Constant(if rng.random_bool(0.5) { Constant::Pi } else { Constant::E })),
        };
    }
    match rng.random_range(0..9) {
        0 => Expr::neg(random_expr(rng, depth - 1)),
        1..=5 => {
            let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Pow][rng.random_range(0..5)];
            Expr::binary(op, random_expr(rng, depth - 1), random_expr(rng, depth - 1))
        }
        _ => {
            let f = [Func::Exp, Func::Sin, Func::Cos, Func::Tanh, Func::Sqrt, Func::Min, Func::Max][rng.random_range(0..7)];
            let n = if f.is_variadic() { rng.random_range(2..4) } else { 1 };
            Expr::call(f, (0..n).map(|_| random_expr(rng, depth - 1)).collect())
        }
    }
}

/// DSL round trip and evaluation equality.
fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let b = Bindings::event(0.7, [1.3, -0.4]);
    let mut round_trips = 0;
    let mut evals = 0;
    for _ in 0..100 {
        let e = random_expr(&mut rng, 4);
        let text = e.to_string();
        let Ok(back) = parse_expression(&text) else { continue };
        if back == e {
            round_trips += 1;
        }
        let same = match (eval_expression(&e, &b), eval_expression(&back, &b)) {
            (Ok(x), Ok(y)) => x.to_bits() == y.to_bits(),
            (Err(_), Err(_)) => true,
            _ => false,
        };
        if same {
            evals += 1;
        }
    }
    let v = eval_expression(&parse_expression("exp(2*t)").unwrap(), &Bindings::new().with(Var::T, 1.0)).unwrap();
    let err = (v - std::f64::consts::E.powi(2)).abs();
    outcome(
        round_trips == 100 && evals == 100 && err <= 1e-12,
        format!("round trips {round_trips}/100, equal evaluations {evals}/100; exp(2*t) at t=1 off by {err:.1e} (<= 1e-12)"),
    )
}

fn strip_timing(report: &str) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(report).unwrap();
    v.as_object_mut().unwrap().remove("timing");
    v
}

fn run_demo(out: &Path) -> (bool, Duration) {
    let start = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_causal-surgery"))
        .args(["demo", "--quiet", "--out"])
        .arg(out)
        .status()
        .unwrap();
    (status.success(), start.elapsed())
}

/// All demos pass and reruns are byte-identical.
fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let (ok_a, t_a) = run_demo(&a);
    let (ok_b, _) = run_demo(&b);
    let mut identical = true;
    let mut files = 0;
    for name in causal_surgery::scenario::DEMO_NAMES {
        let csv_a = std::fs::read(a.join(name).join("metric.csv")).unwrap_or_default();
        let csv_b = std::fs::read(b.join(name).join("metric.csv")).unwrap_or_default();
        identical &= !csv_a.is_empty() && csv_a == csv_b;
        let ra = std::fs::read_to_string(a.join(name).join("report.json")).unwrap_or_default();
        let rb = std::fs::read_to_string(b.join(name).join("report.json")).unwrap_or_default();
        identical &= !ra.is_empty() && strip_timing(&ra) == strip_timing(&rb);
        files += 2;
    }
    outcome(
        ok_a && ok_b && identical && t_a < Duration::from_secs(60),
        format!(
            "4 demos exit 0: {}, {files} files byte-identical across reruns: {identical}; first run {:.2}s (< 60s)",
            ok_a && ok_b,
            t_a.as_secs_f64()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("cone bound factor and stretched inequality", criterion_1),
        ("cone containment", criterion_2),
        ("join certificates", criterion_3),
        ("interpolation comparison bounds", criterion_4),
        ("generalized eigenvalue kernel", criterion_5),
        ("integrator order", criterion_6),
        ("expression language", criterion_7),
        ("end-to-end demos", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        println!("criterion {} {:<44} {}  {}", i + 1, name, if o.passed { "PASS" } else { "FAIL" }, o.detail);
        if !o.passed {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
