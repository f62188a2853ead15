use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::curve::{integrate_causal_curve, random_direction, DirectionPolicy};
use super::speed::max_coordinate_speed;
use crate::geometry::{
    unit_step, GeometryError, MetricField, Point, ScalarField, SpdField, SymMatrix, TimeInterval,
};

/// Number of time samples used when a check is given only a window.
pub const WINDOW_TIME_SAMPLES: usize = 32;

#[derive(Debug, Clone)]
pub struct ConeContainmentOptions {
    pub n_samples: usize,
    pub seed: u64,
    /// Launch times are drawn uniformly from this interval (all `< t_end`).
    pub start_times: TimeInterval,
    /// The slice `S` curves are integrated to.
    pub t_end: f64,
    pub step: f64,
    /// Allowed excess of the reference length over `|t_start - t_end|`.
    pub tolerance: f64,
}

impl Default for ConeContainmentOptions {
    fn default() -> Self {
        Self {
            n_samples: 1000,
            seed: 0,
            start_times: TimeInterval::new(-2.0, -2.0),
            t_end: 0.0,
            step: 1e-3,
            tolerance: 1e-4,
        }
    }
}

/// A curve that left the allowed ball.
#[derive(Debug, Clone, Serialize)]
pub struct ConeWitness {
    pub sample: usize,
    pub start_t: f64,
    pub start_x: Point,
    pub end_x: Point,
    pub policy: String,
    pub reference_length: f64,
    pub allowed: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConeContainmentReport {
    pub samples: usize,
    /// `min(allowed - length)` over all curves; negative means some curve
    /// travelled further than the ball radius.
    pub worst_margin: f64,
    pub max_speed_ratio: f64,
    /// Worst offender first (at most 8 recorded).
    pub witnesses: Vec<ConeWitness>,
    pub passed: bool,
}

/// Launches seeded extremal curves from random events with `t < t_end`
/// and checks that each reaches the slice `t = t_end` within
/// `j g_0`-length `|t_start - t_end| + tolerance`, i.e. that
/// `I(t, x) ∩ S` stays inside the reference ball of radius `|t|`.
///
/// Policies cycle through constant random directions, piecewise random
/// directions and the fastest direction of the reference metric.
pub fn verify_cone_containment(
    m: &MetricField,
    j: &ScalarField,
    g0: &SpdField,
    options: &ConeContainmentOptions,
) -> Result<ConeContainmentReport, GeometryError> {
    let reference = g0.conformal(j);
    let domain = m.domain().clone();
    let results: Vec<Result<(f64, f64, ConeWitness), GeometryError>> = (0..options.n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
            rng.set_stream(i as u64);
            let (lo, hi) = (options.start_times.start, options.start_times.end);
            let t0 = if hi > lo { rng.random_range(lo..hi) } else { lo };
            let mut x0 = [0.0; 2];
            for (axis, l) in domain.circumferences().iter().enumerate() {
                x0[axis] = rng.random_range(0.0..*l);
            }
            let policy = match i % 3 {
                0 => DirectionPolicy::Constant(random_direction(&mut rng, domain.dim())),
                1 => DirectionPolicy::PiecewiseRandom {
                    seed: rng.random(),
                    segment: 0.25,
                },
                _ => DirectionPolicy::MaxSpeed(reference.clone()),
            };
            let curve = integrate_causal_curve(m, (t0, x0), &policy, options.t_end, options.step)?;
            if curve.truncated {
                return Err(GeometryError::OutOfWindow {
                    t: curve.end().t,
                    window: m.window(),
                });
            }
            let length = curve.reference_length(&reference)?;
            let allowed = (options.t_end - t0).abs();
            let witness = ConeWitness {
                sample: i,
                start_t: t0,
                start_x: x0,
                end_x: curve.end().x,
                policy: policy.describe(),
                reference_length: length,
                allowed,
            };
            Ok((allowed - length, curve.max_speed_ratio(), witness))
        })
        .collect();

    let mut worst_margin = f64::INFINITY;
    let mut max_ratio: f64 = 0.0;
    let mut violations = Vec::new();
    for r in results {
        let (margin, ratio, witness) = r?;
        worst_margin = worst_margin.min(margin);
        max_ratio = max_ratio.max(ratio);
        if margin < -options.tolerance {
            violations.push((margin, witness));
        }
    }
    violations.sort_by(|a, b| a.0.total_cmp(&b.0));
    let passed = violations.is_empty();
    Ok(ConeContainmentReport {
        samples: options.n_samples,
        worst_margin,
        max_speed_ratio: max_ratio,
        witnesses: violations.into_iter().take(8).map(|(_, w)| w).collect(),
        passed,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SlabBound {
    pub slab: TimeInterval,
    pub sup_speed: f64,
}

/// Per-slab sup of the maximal causal speed measured in a complete
/// reference metric. Finite bounds on every slab give a finite reachable
/// radius over any compact time window, which is what makes the time
/// slices Cauchy surfaces.
#[derive(Debug, Clone, Serialize)]
pub struct GhCertificate {
    pub reference: String,
    pub slabs: Vec<SlabBound>,
    /// `sum(sup_speed * slab length)` over the table.
    pub reachable_radius: f64,
    pub passed: bool,
}

impl GhCertificate {
    pub fn max_speed(&self) -> f64 {
        self.slabs.iter().map(|s| s.sup_speed).fold(0.0, f64::max)
    }
}

/// Tabulates `sup_x max_coordinate_speed` over unit slabs of `window`,
/// sampling `samples_per_slab + 1` times per slab on every grid node.
pub fn verify_global_hyperbolicity(
    m: &MetricField,
    reference: &SpdField,
    window: TimeInterval,
    samples_per_slab: usize,
) -> Result<GhCertificate, GeometryError> {
    let (lo, hi) = window.sampling_range();
    let mut edges = vec![lo];
    let mut k = lo.floor() + 1.0;
    while k < hi {
        edges.push(k);
        k += 1.0;
    }
    if hi > lo {
        edges.push(hi);
    }
    let points = m.domain().grid_points();
    let slabs: Vec<Result<SlabBound, GeometryError>> = edges
        .windows(2)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|w| {
            let slab = TimeInterval::new(w[0], w[1]);
            let mut sup: f64 = 0.0;
            for t in slab.sample_times(samples_per_slab.max(1)) {
                for &x in &points {
                    sup = sup.max(max_coordinate_speed(m, reference, t, x)?);
                }
            }
            Ok(SlabBound { slab, sup_speed: sup })
        })
        .collect();
    let slabs = slabs.into_iter().collect::<Result<Vec<_>, _>>()?;
    let reachable_radius = slabs.iter().map(|s| s.sup_speed * (s.slab.end - s.slab.start)).sum::<f64>();
    let passed = slabs.iter().all(|s| s.sup_speed.is_finite()) && reachable_radius.is_finite();
    Ok(GhCertificate {
        reference: reference.label().to_string(),
        slabs,
        reachable_radius,
        passed,
    })
}

/// First sample at which a metric fails to be `-dt^2 + h(x)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UltrastaticViolation {
    pub t: f64,
    pub x: Point,
    pub reason: String,
}

/// Checks unit lapse and time independence of the spatial form at the
/// given times (compared against the first one) on every grid node.
pub fn find_ultrastatic_violation(m: &MetricField, times: &[f64], tol: f64) -> Option<UltrastaticViolation> {
    let points = m.domain().grid_points();
    let Some(&t_ref) = times.first() else {
        return None;
    };
    for &x in &points {
        let base = match m.eval(t_ref, x) {
            Ok(s) => s,
            Err(e) => {
                return Some(UltrastaticViolation {
                    t: t_ref,
                    x,
                    reason: e.to_string(),
                })
            }
        };
        for &t in times {
            let s = match m.eval(t, x) {
                Ok(s) => s,
                Err(e) => {
                    return Some(UltrastaticViolation { t, x, reason: e.to_string() })
                }
            };
            if (s.lapse - 1.0).abs() > tol {
                return Some(UltrastaticViolation {
                    t,
                    x,
                    reason: format!("lapse {} is not 1", s.lapse),
                });
            }
            let drift = s.spatial.matrix().relative_difference(base.spatial.matrix());
            if drift > tol {
                return Some(UltrastaticViolation {
                    t,
                    x,
                    reason: format!("spatial form drifts by {drift:e} relative to t = {t_ref}"),
                });
            }
        }
    }
    None
}

pub fn check_ultrastatic_at(m: &MetricField, times: &[f64], tol: f64) -> bool {
    find_ultrastatic_violation(m, times, tol).is_none()
}

/// True iff `m` is ultrastatic on `window` within `tol`.
pub fn check_ultrastatic(m: &MetricField, window: TimeInterval, tol: f64) -> bool {
    check_ultrastatic_at(m, &window.sample_times(WINDOW_TIME_SAMPLES), tol)
}

/// Largest relative componentwise deviation between `a(t, x)` and
/// `b(t + shift, x)` over the given times and all grid nodes.
pub fn isometry_deviation(a: &MetricField, b: &MetricField, times: &[f64], shift: f64) -> Result<f64, GeometryError> {
    if a.domain() != b.domain() {
        return Err(GeometryError::Shape("metrics live on different domains".into()));
    }
    let mut worst: f64 = 0.0;
    for &t in times {
        for x in a.domain().grid_points() {
            let sa = a.eval(t, x)?;
            let sb = b.eval(t + shift, x)?;
            let dl = (sa.lapse - sb.lapse).abs() / sa.lapse.max(sb.lapse);
            let ds = sa.spatial.matrix().relative_difference(sb.spatial.matrix());
            worst = worst.max(dl).max(ds);
        }
    }
    Ok(worst)
}

pub fn check_isometry_at(a: &MetricField, b: &MetricField, times: &[f64], shift: f64, tol: f64) -> bool {
    matches!(isometry_deviation(a, b, times, shift), Ok(d) if d <= tol)
}

/// Identity-chart isometry after a time shift: `a(t, x) = b(t + shift, x)`
/// for `t` in `window`, componentwise within `tol` (relative).
pub fn check_isometry_window(a: &MetricField, b: &MetricField, window: TimeInterval, shift: f64, tol: f64) -> bool {
    check_isometry_at(a, b, &window.sample_times(WINDOW_TIME_SAMPLES), shift, tol)
}

/// Comparison bounds for `k_r = r k_1 + (1 - r) k_0` along `r = theta(t)`.
#[derive(Debug, Clone, Serialize)]
pub struct ConvexBoundReport {
    /// `min` over sampled `t <= 2/3` of the smallest eigenvalue of
    /// `k_theta(t) - (1 - theta(2/3)) k_0`.
    pub lower_region_min_eigenvalue: f64,
    /// Same for `t >= 1/3` and `k_theta(t) - theta(1/3) k_1`.
    pub upper_region_min_eigenvalue: f64,
    pub passed: bool,
}

/// Checks that the interpolated forms dominate the two comparison
/// metrics `(1 - theta(2/3)) k_0` on `{t < 2/3}` and `theta(1/3) k_1` on
/// `{t > 1/3}`. Both are complete on the compact torus, so each region is
/// globally hyperbolic by comparison.
pub fn verify_convex_bound(k0: &SpdField, k1: &SpdField, times: &[f64], tol: f64) -> Result<ConvexBoundReport, GeometryError> {
    let c_lower = 1.0 - unit_step(2.0 / 3.0);
    let c_upper = unit_step(1.0 / 3.0);
    let mut lower = f64::INFINITY;
    let mut upper = f64::INFINITY;
    for x in k0.domain().grid_points() {
        let a = *k0.eval(x)?.matrix();
        let b = *k1.eval(x)?.matrix();
        for &t in times {
            let r = unit_step(t);
            let k: SymMatrix = a.lerp(&b, r);
            if t <= 2.0 / 3.0 {
                lower = lower.min((k - a.scale(c_lower)).min_eigenvalue());
            }
            if t >= 1.0 / 3.0 {
                upper = upper.min((k - b.scale(c_upper)).min_eigenvalue());
            }
        }
    }
    Ok(ConvexBoundReport {
        lower_region_min_eigenvalue: lower,
        upper_region_min_eigenvalue: upper,
        passed: lower >= -tol && upper >= -tol,
    })
}
