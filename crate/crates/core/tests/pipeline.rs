//! Library-level pipeline scenarios on small grids.

use causal_surgery::causality::{
    check_isometry_window, check_ultrastatic, isometry_deviation, verify_cone_containment, verify_global_hyperbolicity,
    ConeContainmentOptions,
};
use causal_surgery::geometry::{MetricField, SpatialDomain, SymMatrix, TimeInterval};
use causal_surgery::scenario::{build_scenario, demo_config, MetricSpec, Pipeline};
use causal_surgery::surgery::{
    asymptotic_join, make_globally_hyperbolic, splice, ultrastatic_join, JoinOptions, SurgeryError,
};

fn circle() -> SpatialDomain {
    SpatialDomain::circle(std::f64::consts::TAU, 32).unwrap()
}

fn flrw() -> MetricField {
    MetricField::closed_form(circle(), "flrw", |_, _| 1.0, |t, _| SymMatrix::one((2.0 * t).exp()))
}

fn ultrastatic(scale: f64) -> MetricField {
    MetricField::closed_form(circle(), "flat", |_, _| 1.0, move |_, _| SymMatrix::one(scale))
}

fn wavy() -> MetricField {
    MetricField::closed_form(
        circle(),
        "wavy",
        |t, x| 1.0 + 0.2 * (t + x[0]).sin().powi(2),
        |t, x| SymMatrix::one(1.5 + (0.7 * t).sin() * x[0].cos()),
    )
}

fn times(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect()
}

#[test]
fn stretched_flrw_keeps_curves_in_the_reference_ball() {
    let s = make_globally_hyperbolic(&flrw(), None).unwrap();
    let opts = ConeContainmentOptions {
        n_samples: 200,
        seed: 3,
        start_times: TimeInterval::new(-2.0, 0.0),
        t_end: 0.0,
        ..ConeContainmentOptions::default()
    };
    let r = verify_cone_containment(&s.metric, &s.completeness, &s.g0, &opts).unwrap();
    assert!(r.passed, "worst margin {}", r.worst_margin);

    // per-step chord velocities of null curves overshoot the cone by O(h^2)
    let fine = ConeContainmentOptions {
        step: opts.step / 2.0,
        ..opts.clone()
    };
    let rf = verify_cone_containment(&s.metric, &s.completeness, &s.g0, &fine).unwrap();
    let (coarse, half) = (r.max_speed_ratio - 1.0, rf.max_speed_ratio - 1.0);
    assert!(half <= 1e-6 && half <= coarse.max(0.0) / 3.0 + 1e-12, "excess {coarse:e} then {half:e}");

    let gh = verify_global_hyperbolicity(&s.metric, &s.reference(), TimeInterval::new(-3.0, 3.0), 16).unwrap();
    assert!(gh.passed);
}

#[test]
fn stretching_a_non_static_metric_bounds_its_speed() {
    let s = make_globally_hyperbolic(&wavy(), None).unwrap();
    let opts = ConeContainmentOptions {
        n_samples: 100,
        seed: 11,
        start_times: TimeInterval::new(-1.5, 0.5),
        t_end: 1.0,
        ..ConeContainmentOptions::default()
    };
    let r = verify_cone_containment(&s.metric, &s.completeness, &s.g0, &opts).unwrap();
    assert!(r.passed, "worst margin {}", r.worst_margin);
}

#[test]
fn ultrastatic_input_is_barely_stretched() {
    let g = ultrastatic(2.0);
    let s = make_globally_hyperbolic(&g, None).unwrap();
    for t in times(-3.0, 3.0, 24) {
        let f = s.factor.eval(t, [0.4, 0.0]).unwrap();
        assert!((f - 1.0).abs() <= 1e-5, "factor {f} at t = {t}");
    }
}

#[test]
fn already_globally_hyperbolic_future_is_left_untouched() {
    let g = ultrastatic(1.0);
    let s = make_globally_hyperbolic(&g, Some(0.0)).unwrap();
    let dev = isometry_deviation(&s.metric, &g, &times(0.0, 5.0, 40), 0.0).unwrap();
    assert_eq!(dev, 0.0);
}

#[test]
fn join_reproduces_both_inputs_exactly() {
    let (g, h) = (flrw(), ultrastatic(4.0));
    let art = asymptotic_join(&g, &h).unwrap();
    assert!(art.is_certified());
    assert_eq!(art.future_shift, -3.0);
    assert_eq!(art.past_shift, 0.0);
    assert!(check_isometry_window(&art.metric, &g, TimeInterval::new(4.0, 7.0), -3.0, 0.0));
    assert!(check_isometry_window(&art.metric, &h, TimeInterval::new(-4.0, -1.0), 0.0, 0.0));
    for t in [-1.0, 0.5, 1.5, 2.5, 4.0] {
        for x in [0.0, 1.0, 3.0, 6.0] {
            let s = art.metric.eval(t, [x, 0.0]).unwrap();
            assert!(s.lapse > 0.0);
        }
    }
}

#[test]
fn join_with_non_static_inputs() {
    let art = asymptotic_join(&wavy(), &flrw()).unwrap();
    assert!(art.is_certified());
    assert!(check_isometry_window(&art.metric, &wavy(), TimeInterval::new(4.0, 6.0), -3.0, 0.0));
    assert!(check_isometry_window(&art.metric, &flrw(), TimeInterval::new(-3.0, -1.0), 0.0, 0.0));
}

#[test]
fn ultrastatic_join_has_a_static_past() {
    let (art, parts) = ultrastatic_join(&flrw(), &JoinOptions::default()).unwrap();
    assert!(art.is_certified());
    assert!(parts.completeness > 0.0 && parts.completeness <= 1.0);
    assert!(check_ultrastatic(&art.metric, TimeInterval::new(-4.0, -1.0), 1e-10));
    assert!(!check_ultrastatic(&flrw(), TimeInterval::new(-4.0, -1.0), 1e-10));
}

#[test]
fn join_of_a_short_past_input_names_the_stage() {
    let h = flrw().with_window(TimeInterval::new(0.2, 3.0));
    let err = asymptotic_join(&flrw(), &h).unwrap_err();
    match err {
        SurgeryError::Stage { stage, .. } => assert_eq!(stage, "past_join"),
        other => panic!("unexpected error {other}"),
    }
}

#[test]
fn splice_rejects_disagreeing_pieces() {
    let err = splice(&ultrastatic(1.0), &ultrastatic(1.5), 0.0, 1e-12).unwrap_err();
    assert!(matches!(err, SurgeryError::Splice { .. }));
    let same = splice(&flrw(), &flrw(), 0.3, 1e-12).unwrap();
    assert_eq!(isometry_deviation(&same, &flrw(), &times(-2.0, 2.0, 16), 0.0).unwrap(), 0.0);
}

#[test]
fn join_pair_of_identical_inputs_is_noted_as_trivial() {
    let mut cfg = demo_config("join_pair_flrw_ultrastatic").unwrap();
    cfg.domain.resolution = vec![16];
    cfg.h = Some(cfg.g.clone());
    assert_eq!(cfg.pipeline, Pipeline::JoinPair);
    let built = build_scenario(&cfg).unwrap();
    assert!(built.notes.iter().any(|n| n.contains("trivial")));
    assert!(built.certificates.iter().all(|c| c.passed));

    cfg.h = Some(MetricSpec::catalog("ultrastatic", &[("scale", 3.0)]));
    let built = build_scenario(&cfg).unwrap();
    assert!(!built.notes.iter().any(|n| n.contains("trivial")));
}
