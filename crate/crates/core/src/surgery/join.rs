use super::{
    make_globally_hyperbolic_with, Certificate, ConeSurgery, ConeSurgeryOptions, JoinArtifact, StageExt, SurgeryError,
    IDENTITY_SLACK,
};
use crate::causality::{
    check_isometry_window, check_ultrastatic, find_ultrastatic_violation,
    verify_convex_bound, verify_global_hyperbolicity, WINDOW_TIME_SAMPLES,
};
use crate::geometry::{
    freeze_ramp, time_reverse, unit_step, GeometryError, MetricField, Representation, ScalarField, TimeInterval,
};

/// Half width of the slab on which [`splice`] compares its two pieces.
pub const SPLICE_HALF_WIDTH: f64 = 0.05;
const SPLICE_SAMPLES: usize = 10;
const ULTRASTATIC_TOLERANCE: f64 = 1e-10;
/// Head room kept below one when the completeness factor is rescaled.
const COMPLETENESS_HEADROOM: f64 = 1e-3;

/// `f m` with `f = 1 / s` on `{t <= 0}`, `f = 1` on `{t >= 1}` and the
/// unit step in between, where `s` is the lapse of `m`. The result has lapse
/// one in the past and keeps the lapse of `m` in the future.
pub fn normalize_conformal(m: &MetricField) -> MetricField {
    let inner = m.clone();
    MetricField::from_fn(
        m.domain().clone(),
        m.window(),
        m.representation(),
        format!("normalize({})", m.label()),
        move |t, x| {
            let (s, g) = inner.eval_raw(t, x)?;
            if !(s > 0.0) {
                return Err(GeometryError::Domain(format!("lapse {s} at t = {t} is not positive")));
            }
            if t >= 1.0 {
                return Ok((s, g));
            }
            if t <= 0.0 {
                return Ok((1.0, g.scale(1.0 / s)));
            }
            let r = unit_step(t);
            let f = (1.0 - r) / s + r;
            Ok((f * s, g.scale(f)))
        },
    )
}

/// `t -> m(psi(t))` with the freeze ramp `psi`: constant on `(-inf, 0]`,
/// equal to `m` on `[1, inf)`.
pub fn freeze_past(m: &MetricField) -> Result<MetricField, SurgeryError> {
    let w = m.window();
    if !(w.start <= 0.0 && w.end >= 1.0) {
        return Err(SurgeryError::Shape(format!("freeze_past needs a window containing [0, 1], got {w}")));
    }
    let inner = m.clone();
    Ok(MetricField::from_fn(
        m.domain().clone(),
        TimeInterval::until(w.end),
        m.representation(),
        format!("freeze({})", m.label()),
        move |t, x| inner.eval_raw(freeze_ramp(t), x),
    )
    .with_static_on(TimeInterval::until(0.0)))
}

/// `-dt^2 + h_0` with `h_0` the spatial form of `gamma` at `t = -1`,
/// after checking that `gamma` is ultrastatic on `(-inf, 0]`.
pub fn ultrastatic_tail(gamma: &MetricField) -> Result<MetricField, SurgeryError> {
    let times = TimeInterval::until(0.0).sample_times(WINDOW_TIME_SAMPLES);
    if let Some(v) = find_ultrastatic_violation(gamma, &times, ULTRASTATIC_TOLERANCE) {
        return Err(SurgeryError::Certificate {
            name: "ultrastatic_tail".into(),
            detail: format!("not ultrastatic on (-inf, 0] at t = {}, x = {:?}: {}", v.t, v.x, v.reason),
        });
    }
    Ok(MetricField::ultrastatic(gamma.slice(-1.0)).with_label(format!("tail({})", gamma.label())))
}

fn ultrastatic_input(name: &str, u: &MetricField) -> Result<(), SurgeryError> {
    let times = TimeInterval::ALL.intersect(&u.window()).sample_times(WINDOW_TIME_SAMPLES);
    match find_ultrastatic_violation(u, &times, ULTRASTATIC_TOLERANCE) {
        None => Ok(()),
        Some(v) => Err(SurgeryError::Certificate {
            name: format!("{name}_ultrastatic"),
            detail: format!("t = {}, x = {:?}: {}", v.t, v.x, v.reason),
        }),
    }
}

/// `-dt^2 + k_theta(t)` with `k_r = r k_1 + (1 - r) k_0`.
pub fn interpolate_ultrastatic(u0: &MetricField, u1: &MetricField) -> Result<JoinArtifact, SurgeryError> {
    if u0.domain() != u1.domain() {
        return Err(SurgeryError::Shape("ultrastatic metrics live on different domains".into()));
    }
    ultrastatic_input("u0", u0)?;
    ultrastatic_input("u1", u1)?;
    let (k0, k1) = (u0.slice(0.0), u1.slice(0.0));
    let (a, b) = (k0.clone(), k1.clone());
    let metric = MetricField::from_fn(
        u0.domain().clone(),
        TimeInterval::ALL,
        Representation::ClosedForm,
        format!("interp({}, {})", u0.label(), u1.label()),
        move |t, x| {
            let r = unit_step(t);
            Ok((1.0, a.eval(x)?.matrix().lerp(b.eval(x)?.matrix(), r)))
        },
    );

    let times = TimeInterval::new(-0.5, 1.5).sample_times(4 * WINDOW_TIME_SAMPLES);
    let convex = verify_convex_bound(&k0, &k1, &times, 0.0)?;
    let past = TimeInterval::until(0.0);
    let future = TimeInterval::from(1.0);
    let certificates = vec![
        Certificate::new(
            "convex_bound",
            convex.passed,
            format!(
                "min eigenvalues {:e} (t <= 2/3), {:e} (t >= 1/3)",
                convex.lower_region_min_eigenvalue, convex.upper_region_min_eigenvalue
            ),
        ),
        Certificate::new(
            "past_isometry",
            check_isometry_window(&metric, u0, past, 0.0, ULTRASTATIC_TOLERANCE),
            "equals u0 on (-inf, 0]",
        ),
        Certificate::new(
            "future_isometry",
            check_isometry_window(&metric, u1, future, 0.0, ULTRASTATIC_TOLERANCE),
            "equals u1 on [1, inf)",
        ),
    ];
    Ok(JoinArtifact {
        metric,
        future_window: future,
        future_shift: 0.0,
        past_window: past,
        past_shift: 0.0,
        certificates,
    })
}

/// `a` on `t <= t_cut`, `b` after, provided the two agree within `tol`
/// on `[t_cut - SPLICE_HALF_WIDTH, t_cut + SPLICE_HALF_WIDTH]`.
pub fn splice(a: &MetricField, b: &MetricField, t_cut: f64, tol: f64) -> Result<MetricField, SurgeryError> {
    if a.domain() != b.domain() {
        return Err(SurgeryError::Shape("splice pieces live on different domains".into()));
    }
    let slab = TimeInterval::new(t_cut - SPLICE_HALF_WIDTH, t_cut + SPLICE_HALF_WIDTH);
    let mut worst = (0.0f64, t_cut, [0.0; 2]);
    for t in slab.sample_times(SPLICE_SAMPLES) {
        for x in a.domain().grid_points() {
            let d = isometry_deviation_at(a, b, t, x)?;
            if d > worst.0 || d.is_nan() {
                worst = (d, t, x);
            }
        }
    }
    if !(worst.0 <= tol) {
        return Err(SurgeryError::Splice {
            deviation: worst.0,
            t: worst.1,
            x: worst.2,
        });
    }
    let (pa, pb) = (a.clone(), b.clone());
    Ok(MetricField::from_fn(
        a.domain().clone(),
        TimeInterval::new(a.window().start, b.window().end),
        if a.representation() == b.representation() {
            a.representation()
        } else {
            Representation::Grid
        },
        format!("splice({}, {}, {t_cut})", a.label(), b.label()),
        move |t, x| if t <= t_cut { pa.eval_raw(t, x) } else { pb.eval_raw(t, x) },
    ))
}

fn isometry_deviation_at(a: &MetricField, b: &MetricField, t: f64, x: [f64; 2]) -> Result<f64, GeometryError> {
    let sa = a.eval(t, x)?;
    let sb = b.eval(t, x)?;
    let dl = (sa.lapse - sb.lapse).abs() / sa.lapse.max(sb.lapse);
    Ok(dl.max(sa.spatial.matrix().relative_difference(sb.spatial.matrix())))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JoinOptions {
    /// Length of the future interval `[1, 1 + horizon]` over which the cone
    /// bound is sampled and certified.
    pub horizon: f64,
    pub samples_per_unit: usize,
    /// Componentwise relative tolerance of the isometry certificates.
    pub isometry_tolerance: f64,
}

impl Default for JoinOptions {
    fn default() -> Self {
        Self {
            horizon: 3.0,
            samples_per_unit: 32,
            isometry_tolerance: 1e-10,
        }
    }
}

/// Intermediate products of [`ultrastatic_join`].
#[derive(Debug, Clone)]
pub struct UltrastaticJoin {
    /// Equal to the input on `[1, inf)`, ultrastatic on `(-inf, 0]`.
    pub gamma: MetricField,
    /// The ultrastatic tail of `gamma`.
    pub u: MetricField,
    pub surgery: ConeSurgery,
    /// Constant completeness factor used by the cone surgery.
    pub completeness: f64,
}

/// Sup of the cone bound with `j = 1` over `window`.
fn sup_cone_bound(m: &MetricField, window: TimeInterval, samples_per_unit: usize) -> Result<f64, GeometryError> {
    let lower = super::cone_bound_factor(m, &ScalarField::constant(1.0), &m.slice(0.0));
    let n = ((window.end - window.start) * samples_per_unit as f64).ceil().max(1.0) as usize;
    let mut sup: f64 = 0.0;
    for t in window.sample_times(n) {
        for x in m.domain().grid_points() {
            sup = sup.max(lower.eval(t, x)?);
        }
    }
    Ok(sup)
}

/// A globally hyperbolic metric equal to `g` on `[1, inf)` and ultrastatic
/// on `(-inf, 0]`: normalization, past freezing and the cone surgery with
/// `f = 1` from `t = 1` on.
///
/// If the cone bound of the normalized, frozen input exceeds one somewhere
/// on `[2/3, 1 + horizon]` (with `j = 1`), the constant completeness factor
/// is lowered to `(1 - 1e-3) / sup`, which keeps `j g_0` complete and makes
/// the identity plateau admissible.
pub fn ultrastatic_join(g: &MetricField, options: &JoinOptions) -> Result<(JoinArtifact, UltrastaticJoin), SurgeryError> {
    let normalized = normalize_conformal(g);
    let frozen = freeze_past(&normalized).stage("freeze_past")?;
    let horizon = TimeInterval::new(2.0 / 3.0, 1.0 + options.horizon);
    let sup = sup_cone_bound(&frozen, horizon, options.samples_per_unit).stage("cone_bound_factor")?;
    let j = if sup > 1.0 + IDENTITY_SLACK {
        (1.0 - COMPLETENESS_HEADROOM) / sup
    } else {
        1.0
    };
    let surgery = make_globally_hyperbolic_with(
        &frozen,
        &ConeSurgeryOptions {
            already_gh_after: Some(1.0),
            completeness: Some(ScalarField::constant(j)),
            reference_time: 0.0,
            window: Some(TimeInterval::new(-1.0, 1.0 + options.horizon)),
            samples_per_unit: options.samples_per_unit,
        },
    )
    .stage("make_globally_hyperbolic")?;
    let gamma = surgery.metric.clone().with_label(format!("gamma({})", g.label()));
    let u = ultrastatic_tail(&gamma).stage("ultrastatic_tail")?;

    let future = TimeInterval::from(1.0);
    let past = TimeInterval::until(0.0);
    let tol = options.isometry_tolerance;
    let future_check = future.intersect(&g.window());
    let gh_window = TimeInterval::new(-1.0, 1.0 + options.horizon);
    let gh = verify_global_hyperbolicity(&gamma, &surgery.reference(), gh_window, options.samples_per_unit)
        .stage("verify_global_hyperbolicity")?;
    let certificates = vec![
        Certificate::new(
            "future_isometry",
            check_isometry_window(&gamma, g, future_check, 0.0, tol),
            format!("equals the input on {future_check}"),
        ),
        Certificate::new(
            "past_ultrastatic",
            check_ultrastatic(&gamma, past, ULTRASTATIC_TOLERANCE),
            "unit lapse and constant spatial form on (-inf, 0]",
        ),
        Certificate::new(
            "past_isometry",
            check_isometry_window(&gamma, &u, past, 0.0, tol),
            "equals its ultrastatic tail on (-inf, 0]",
        ),
        gh_certificate("global_hyperbolicity", &gh),
    ];
    let artifact = JoinArtifact {
        metric: gamma.clone(),
        future_window: future,
        future_shift: 0.0,
        past_window: past,
        past_shift: 0.0,
        certificates,
    }
    .certified()?;
    Ok((
        artifact,
        UltrastaticJoin {
            gamma,
            u,
            surgery,
            completeness: j,
        },
    ))
}

fn gh_certificate(name: &str, gh: &crate::causality::GhCertificate) -> Certificate {
    let speed = gh.max_speed();
    Certificate::new(
        name,
        gh.passed && speed <= 1.0 + 1e-8,
        format!(
            "sup causal speed {speed:.6} over {} slabs, reachable radius {:.6}",
            gh.slabs.len(),
            gh.reachable_radius
        ),
    )
}

/// Like [`asymptotic_join_with`] with default options.
pub fn asymptotic_join(g: &MetricField, h: &MetricField) -> Result<JoinArtifact, SurgeryError> {
    asymptotic_join_with(g, h, &JoinOptions::default())
}

/// A globally hyperbolic metric equal to `g(t - 3)` on `[4, inf)` and to `h`
/// on `(-inf, -1]`.
///
/// Layout on the time axis:
///
/// ```text
///   (-inf, -1]  h
///   [0, 1]      -dt^2 + k_h        (ultrastatic tail of h)
///   [1, 2]      convex interpolation of the two tails
///   [2, 3]      -dt^2 + k_g        (ultrastatic tail of g)
///   [4, inf)    g(t - 3)
/// ```
///
/// The pieces are joined with [`splice`] at `t = 0.5` and `t = 2.5`.
pub fn asymptotic_join_with(g: &MetricField, h: &MetricField, options: &JoinOptions) -> Result<JoinArtifact, SurgeryError> {
    if g.domain() != h.domain() {
        return Err(SurgeryError::Shape(
            "the two metrics must share one spatial domain".into(),
        ));
    }
    let (_, jg) = ultrastatic_join(g, options).stage("future_join")?;
    let (_, jh) = ultrastatic_join(&time_reverse(h), options).stage("past_join")?;
    let gamma_h = time_reverse(&jh.gamma);
    let inter = interpolate_ultrastatic(&jh.u, &jg.u).stage("interpolate_ultrastatic")?;
    let middle = inter.metric.time_shift(1.0);
    let gamma_g = jg.gamma.time_shift(3.0);

    let first = splice(&gamma_h, &middle, 0.5, 1e-12).stage("splice")?;
    let metric = splice(&first, &gamma_g, 2.5, 1e-12)
        .stage("splice")?
        .with_label(format!("join({}, {})", g.label(), h.label()));

    let tol = options.isometry_tolerance;
    let future = TimeInterval::from(4.0);
    let past = TimeInterval::until(-1.0);
    let future_check = future.intersect(&g.window().shift(3.0));
    let past_check = past.intersect(&h.window());
    let gh_window = TimeInterval::new(-1.0 - options.horizon, 4.0 + options.horizon);
    let gh = verify_global_hyperbolicity(&metric, &jg.u.slice(0.0), gh_window, options.samples_per_unit)
        .stage("verify_global_hyperbolicity")?;
    let mut certificates = vec![
        Certificate::new(
            "future_isometry",
            check_isometry_window(&metric, g, future_check, -3.0, tol),
            format!("equals g(t - 3) on {future_check}"),
        ),
        Certificate::new(
            "past_isometry",
            check_isometry_window(&metric, h, past_check, 0.0, tol),
            format!("equals h on {past_check}"),
        ),
        Certificate::new(
            "ultrastatic_past_tail",
            check_ultrastatic(&metric, TimeInterval::new(0.0, 1.0), ULTRASTATIC_TOLERANCE),
            "ultrastatic on [0, 1]",
        ),
        Certificate::new(
            "ultrastatic_future_tail",
            check_ultrastatic(&metric, TimeInterval::new(2.0, 3.0), ULTRASTATIC_TOLERANCE),
            "ultrastatic on [2, 3]",
        ),
    ];
    certificates.extend(inter.certificates.iter().filter(|c| c.name == "convex_bound").cloned());
    let finite = Certificate::new(
        "global_hyperbolicity",
        gh.passed,
        format!(
            "finite causal speeds over {gh_window} (sup {:.6}), reachable radius {:.6}",
            gh.max_speed(),
            gh.reachable_radius
        ),
    );
    certificates.push(finite);
    JoinArtifact {
        metric,
        future_window: future,
        future_shift: -3.0,
        past_window: past,
        past_shift: 0.0,
        certificates,
    }
    .certified()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::causality::isometry_deviation;
    use crate::geometry::{SpatialDomain, SpdField, SymMatrix};

    fn circle() -> SpatialDomain {
        SpatialDomain::circle(std::f64::consts::TAU, 16).unwrap()
    }

    fn flrw(d: SpatialDomain) -> MetricField {
        MetricField::closed_form(d, "flrw", |_, _| 1.0, |t, _| SymMatrix::one((2.0 * t).exp()))
    }

    fn lapse4(d: SpatialDomain) -> MetricField {
        MetricField::closed_form(d, "lapse4", |_, _| 4.0, |_, _| SymMatrix::one(1.0))
    }

    #[test]
    fn normalize_examples() {
        let d = circle();
        let m = flrw(d.clone());
        let n = normalize_conformal(&m);
        for t in [-2.0, 0.3, 0.7, 1.5] {
            assert!((n.eval(t, [0.0; 2]).unwrap().spatial.upper()[0] - (2.0 * t).exp()).abs() < 1e-15 * (2.0 * t).exp().max(1.0));
        }
        let n = normalize_conformal(&lapse4(d));
        assert_eq!(n.eval(-1.0, [0.0; 2]).unwrap().lapse, 1.0);
        assert_eq!(n.eval(0.0, [0.0; 2]).unwrap().lapse, 1.0);
        assert_eq!(n.eval(1.0, [0.0; 2]).unwrap().lapse, 4.0);
        let mid = n.eval(0.5, [0.0; 2]).unwrap().lapse;
        assert!(mid > 1.0 && mid < 4.0);
    }

    #[test]
    fn normalize_rejects_bad_lapse() {
        let m = MetricField::closed_form(circle(), "neg", |_, _| -1.0, |_, _| SymMatrix::one(1.0));
        assert!(matches!(normalize_conformal(&m).eval(0.5, [0.0; 2]), Err(GeometryError::Domain(_))));
    }

    #[test]
    fn freeze_examples() {
        let m = flrw(circle());
        let f = freeze_past(&m).unwrap();
        let at = |m: &MetricField, t: f64| m.eval(t, [0.0; 2]).unwrap().spatial.upper()[0];
        assert_eq!(at(&f, -5.0), at(&m, 0.0));
        assert_eq!(at(&f, -1.0).to_bits(), at(&f, -10.0).to_bits());
        assert_eq!(at(&f, 2.0), at(&m, 2.0));
        let psi = freeze_ramp(0.5);
        assert!(psi > 0.0 && psi <= 0.5);
        assert_eq!(at(&f, 0.5), at(&m, psi));
    }

    #[test]
    fn tail_examples() {
        let d = circle();
        let u = MetricField::ultrastatic(SpdField::constant(d.clone(), SymMatrix::one(4.0)));
        let tail = ultrastatic_tail(&u).unwrap();
        assert_eq!(tail.eval(7.0, [0.5, 0.0]).unwrap().spatial.upper(), vec![4.0]);
        assert_eq!(tail.eval(-3.0, [0.5, 0.0]).unwrap(), u.eval(-3.0, [0.5, 0.0]).unwrap());

        let bad = MetricField::closed_form(d, "lapse2", |_, _| 2.0, |_, _| SymMatrix::one(1.0));
        assert!(matches!(ultrastatic_tail(&bad), Err(SurgeryError::Certificate { .. })));
    }

    #[test]
    fn interpolation_examples() {
        let d = SpatialDomain::torus([1.0, 1.0], [8, 8]).unwrap();
        let u0 = MetricField::ultrastatic(SpdField::identity(d.clone()));
        let u1 = MetricField::ultrastatic(SpdField::constant(d.clone(), SymMatrix::two(2.0, 0.0, 2.0)));
        let out = interpolate_ultrastatic(&u0, &u1).unwrap();
        assert!(out.is_certified());
        let s = out.metric.eval(0.5, [0.2, 0.3]).unwrap();
        assert_eq!(s.spatial.upper(), vec![1.5, 0.0, 1.5]);
        assert_eq!(out.metric.eval(-1.0, [0.2, 0.3]).unwrap().spatial.upper(), vec![1.0, 0.0, 1.0]);

        let same = interpolate_ultrastatic(&u0, &u0).unwrap();
        assert!(check_ultrastatic(&same.metric, TimeInterval::new(-2.0, 3.0), 1e-15));

        let c = MetricField::ultrastatic(SpdField::identity(circle()));
        assert!(matches!(interpolate_ultrastatic(&u0, &c), Err(SurgeryError::Shape(_))));
    }

    #[test]
    fn splice_examples() {
        let d = circle();
        let a = flrw(d.clone());
        let s = splice(&a, &a, 0.5, 1e-12).unwrap();
        assert_eq!(s.eval(0.3, [0.0; 2]).unwrap(), a.eval(0.3, [0.0; 2]).unwrap());

        let b = MetricField::closed_form(d.clone(), "b", |_, _| 1.0, |t: f64, _| {
            SymMatrix::one(if t < 0.8 { (2.0 * t).exp() } else { 7.0 })
        });
        let s = splice(&a, &b, 0.5, 1e-9).unwrap();
        assert_eq!(s.eval(2.0, [0.0; 2]).unwrap().spatial.upper(), vec![7.0]);
        let dev = isometry_deviation(&s, &a, &[0.5, 0.5 + 1e-12], 0.0).unwrap();
        assert!(dev <= 1e-9);

        let c = MetricField::closed_form(d, "c", |_, _| 1.0, |t: f64, _| SymMatrix::one((2.0 * t).exp() * 1.1));
        match splice(&a, &c, 0.5, 1e-9) {
            Err(SurgeryError::Splice { deviation, .. }) => assert!(deviation > 0.05),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ultrastatic_join_of_flrw() {
        let g = flrw(circle());
        let (art, parts) = ultrastatic_join(&g, &JoinOptions::default()).unwrap();
        assert!(art.is_certified());
        assert_eq!(parts.completeness, 1.0);
        assert_eq!(art.metric.eval(1.0, [0.0; 2]).unwrap(), g.eval(1.0, [0.0; 2]).unwrap());
    }

    #[test]
    fn join_of_flrw_with_ultrastatic() {
        let d = circle();
        let g = flrw(d.clone());
        let h = MetricField::ultrastatic(SpdField::constant(d, SymMatrix::one(4.0)));
        let art = asymptotic_join(&g, &h).unwrap();
        assert!(art.is_certified(), "{:?}", art.certificates);
        for t in [-1.0, -4.0, -30.0] {
            assert_eq!(art.metric.eval(t, [1.0, 0.0]).unwrap().spatial.upper(), vec![4.0]);
        }
        for t in [4.0, 5.5, 9.0] {
            assert_eq!(art.metric.eval(t, [1.0, 0.0]).unwrap(), g.eval(t - 3.0, [1.0, 0.0]).unwrap());
        }
    }

    #[test]
    fn join_of_identical_ultrastatic_metrics() {
        let d = circle();
        let g = MetricField::ultrastatic(SpdField::identity(d));
        let art = asymptotic_join(&g, &g).unwrap();
        assert!(art.is_certified());
        let dev = isometry_deviation(&art.metric, &g, &TimeInterval::new(-5.0, 8.0).sample_times(52), 0.0).unwrap();
        assert!(dev < 2e-6, "{dev}");
    }

    #[test]
    fn join_rejects_mismatched_domains() {
        let g = flrw(circle());
        let h = MetricField::ultrastatic(SpdField::identity(SpatialDomain::torus([1.0, 1.0], [8, 8]).unwrap()));
        assert!(matches!(asymptotic_join(&g, &h), Err(SurgeryError::Shape(_))));
    }

    #[test]
    fn stage_tags_on_failure() {
        let d = circle();
        let g = flrw(d.clone());
        let short = flrw(d).with_window(TimeInterval::new(0.5, 3.0));
        match asymptotic_join(&g, &short) {
            Err(SurgeryError::Stage { stage, .. }) => assert_eq!(stage, "past_join"),
            other => panic!("{other:?}"),
        }
    }
}
