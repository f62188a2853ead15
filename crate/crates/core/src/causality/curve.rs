use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::ode::rk4_step;
use super::speed::{fastest_direction, null_velocity};
use crate::geometry::{GeometryError, MetricField, Point, SpdField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeDirection {
    Future,
    Past,
}

/// How the spatial direction of an extremal (null) curve is chosen.
#[derive(Debug, Clone)]
pub enum DirectionPolicy {
    /// A fixed coordinate direction.
    Constant([f64; 2]),
    /// A fresh uniformly random coordinate direction every `segment` units of
    /// coordinate time, drawn from a generator seeded with `seed`.
    PiecewiseRandom { seed: u64, segment: f64 },
    /// The direction of maximal speed measured in `reference`.
    MaxSpeed(SpdField),
}

impl DirectionPolicy {
    pub fn describe(&self) -> String {
        match self {
            DirectionPolicy::Constant(d) => format!("constant {d:?}"),
            DirectionPolicy::PiecewiseRandom { seed, segment } => {
                format!("piecewise-random seed {seed} segment {segment}")
            }
            DirectionPolicy::MaxSpeed(r) => format!("max-speed w.r.t. {}", r.label()),
        }
    }
}

/// Uniform direction on the unit circle (or `+-1` on the line).
pub fn random_direction(rng: &mut ChaCha8Rng, dim: usize) -> [f64; 2] {
    if dim == 1 {
        if rng.random_bool(0.5) {
            [1.0, 0.0]
        } else {
            [-1.0, 0.0]
        }
    } else {
        let phi = rng.random_range(0.0..std::f64::consts::TAU);
        [phi.cos(), phi.sin()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveSample {
    pub t: f64,
    /// Position on the universal cover (not wrapped into the torus cell).
    pub x: Point,
}

/// A graph-parametrized causal curve `t -> (t, k(t))` with one speed
/// certificate per step: `g(v, v) / lambda` for the secant velocity `v`,
/// evaluated at the step midpoint.
#[derive(Debug, Clone, Serialize)]
pub struct CausalCurve {
    pub samples: Vec<CurveSample>,
    pub direction: TimeDirection,
    pub speed_ratios: Vec<f64>,
    /// The validity window ended before `t_end`.
    pub truncated: bool,
}

impl CausalCurve {
    pub fn start(&self) -> CurveSample {
        self.samples[0]
    }

    pub fn end(&self) -> CurveSample {
        *self.samples.last().unwrap()
    }

    pub fn max_speed_ratio(&self) -> f64 {
        self.speed_ratios.iter().copied().fold(0.0, f64::max)
    }

    /// Polygonal length in `reference`, each segment measured at its midpoint.
    pub fn reference_length(&self, reference: &SpdField) -> Result<f64, GeometryError> {
        let mut total = 0.0;
        for w in self.samples.windows(2) {
            let dx = [w[1].x[0] - w[0].x[0], w[1].x[1] - w[0].x[1]];
            let mid = [0.5 * (w[0].x[0] + w[1].x[0]), 0.5 * (w[0].x[1] + w[1].x[1])];
            total += reference.eval(mid)?.quad(dx).sqrt();
        }
        Ok(total)
    }
}

/// Integrates the null curve `dk/dt = sigma(t, k) d(t, k)` from `start` to
/// `t_end` with fixed-step RK4 (global error `O(step^4)`). The step is
/// shrunk so that an integral number of steps lands on `t_end`.
pub fn integrate_causal_curve(
    m: &MetricField,
    start: (f64, Point),
    policy: &DirectionPolicy,
    t_end: f64,
    step: f64,
) -> Result<CausalCurve, GeometryError> {
    if !(step > 0.0) {
        return Err(GeometryError::Domain(format!("step must be positive, got {step}")));
    }
    let (t0, x0) = start;
    let direction = if t_end >= t0 {
        TimeDirection::Future
    } else {
        TimeDirection::Past
    };
    let mut curve = CausalCurve {
        samples: vec![CurveSample { t: t0, x: x0 }],
        direction,
        speed_ratios: Vec::new(),
        truncated: false,
    };
    if t_end == t0 {
        return Ok(curve);
    }
    let span = t_end - t0;
    let n = (span.abs() / step).ceil().max(1.0) as usize;
    let h = span / n as f64;
    let dim = m.dim();
    let window = m.window();

    let random_dirs: Vec<[f64; 2]> = match policy {
        DirectionPolicy::PiecewiseRandom { seed, segment } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let count = (span.abs() / segment).ceil() as usize + 1;
            (0..count).map(|_| random_direction(&mut rng, dim)).collect()
        }
        _ => Vec::new(),
    };
    let mut preferred = match policy {
        DirectionPolicy::Constant(d) => *d,
        _ => [1.0, 0.5],
    };

    let mut y = [x0[0], x0[1]];
    for k in 0..n {
        let t = t0 + h * k as f64;
        let t_next = if k + 1 == n { t_end } else { t0 + h * (k + 1) as f64 };
        if !window.contains(t) || !window.contains(t_next) {
            curve.truncated = true;
            break;
        }
        let dir = match policy {
            DirectionPolicy::Constant(d) => *d,
            DirectionPolicy::PiecewiseRandom { segment, .. } => {
                // indexed by the step start so the direction is constant within a step
                let idx = (k as f64 * h.abs() / segment).floor() as usize;
                random_dirs[idx.min(random_dirs.len() - 1)]
            }
            DirectionPolicy::MaxSpeed(_) => preferred,
        };
        let mut rhs = |s: f64, state: &[f64; 2]| -> Result<[f64; 2], GeometryError> {
            let x = [state[0], state[1]];
            let d = match policy {
                DirectionPolicy::MaxSpeed(reference) => {
                    let v = fastest_direction(m, reference, s, x)?;
                    if v[0] * dir[0] + v[1] * dir[1] < 0.0 {
                        [-v[0], -v[1]]
                    } else {
                        v
                    }
                }
                _ => dir,
            };
            // the curve runs backward in t when integrating into the past,
            // but dk/dt is the same null velocity
            null_velocity(m, s, x, d)
        };
        let next = rk4_step(&mut rhs, t, &y, t_next - t)?;
        let dt = t_next - t;
        let v = [(next[0] - y[0]) / dt, (next[1] - y[1]) / dt];
        let tm = 0.5 * (t + t_next);
        let xm = [0.5 * (y[0] + next[0]), 0.5 * (y[1] + next[1])];
        let s = m.eval(tm, xm)?;
        curve.speed_ratios.push(s.spatial.quad(v) / s.lapse);
        if let DirectionPolicy::MaxSpeed(_) = policy {
            if v[0] != 0.0 || v[1] != 0.0 {
                preferred = v;
            }
        }
        y = next;
        curve.samples.push(CurveSample { t: t_next, x: [y[0], y[1]] });
    }
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{SpatialDomain, SymMatrix, TimeInterval};

    fn flrw() -> MetricField {
        let d = SpatialDomain::circle(std::f64::consts::TAU, 32).unwrap();
        MetricField::closed_form(d, "flrw", |_, _| 1.0, |t, _| SymMatrix::one((2.0 * t).exp()))
    }

    #[test]
    fn unit_speed_on_the_ultrastatic_circle() {
        let d = SpatialDomain::circle(std::f64::consts::TAU, 32).unwrap();
        let m = MetricField::ultrastatic(SpdField::identity(d.clone()));
        let c = integrate_causal_curve(&m, (-2.0, [0.0; 2]), &DirectionPolicy::Constant([1.0, 0.0]), 0.0, 1e-3).unwrap();
        let end = c.end();
        assert_eq!(end.t, 0.0);
        assert!((d.wrap(end.x)[0] - 2.0).abs() < 1e-8);
        assert!(c.speed_ratios.iter().all(|r| (r - 1.0).abs() < 1e-12));
    }

    #[test]
    fn flrw_null_curve_matches_closed_form() {
        let m = flrw();
        for t_end in [1.0, 3.0] {
            let c = integrate_causal_curve(&m, (0.0, [0.0; 2]), &DirectionPolicy::Constant([1.0, 0.0]), t_end, 1e-3)
                .unwrap();
            let exact = 1.0 - (-t_end as f64).exp();
            assert!((c.end().x[0] - exact).abs() < 1e-6);
            assert!(c.max_speed_ratio() <= 1.0 + 1e-6);
        }
    }

    #[test]
    fn degenerate_and_truncated() {
        let m = flrw();
        let c = integrate_causal_curve(&m, (0.5, [1.0, 0.0]), &DirectionPolicy::Constant([1.0, 0.0]), 0.5, 1e-3).unwrap();
        assert_eq!(c.samples.len(), 1);
        let bounded = m.with_window(TimeInterval::new(-1.0, 1.0));
        let c = integrate_causal_curve(&bounded, (0.0, [0.0; 2]), &DirectionPolicy::Constant([1.0, 0.0]), 2.0, 1e-2)
            .unwrap();
        assert!(c.truncated);
        assert!(c.end().t <= 1.0);
        assert!(integrate_causal_curve(&bounded, (0.0, [0.0; 2]), &DirectionPolicy::Constant([1.0, 0.0]), 0.5, 0.0).is_err());
    }

    #[test]
    fn past_directed_curves() {
        let m = flrw();
        let c = integrate_causal_curve(&m, (1.0, [0.0; 2]), &DirectionPolicy::Constant([-1.0, 0.0]), 0.0, 1e-3).unwrap();
        assert_eq!(c.direction, TimeDirection::Past);
        // k(0) = k(1) - (1 - e^{-1}) moving along -x while t decreases: the
        // displacement is along -d times the negative time span, i.e. +x.
        assert!((c.end().x[0] - (1.0 - (-1.0f64).exp())).abs() < 1e-6);
    }

    #[test]
    fn random_and_max_speed_policies_stay_causal() {
        let d = SpatialDomain::torus([1.0, 2.0], [8, 8]).unwrap();
        let m = MetricField::closed_form(
            d.clone(),
            "aniso",
            |t, _| 1.0 + 0.5 * t * t,
            |t, x| SymMatrix::two((t).exp(), 0.2 * x[0].sin(), 2.0 + t.sin()),
        );
        for policy in [
            DirectionPolicy::PiecewiseRandom { seed: 3, segment: 0.25 },
            DirectionPolicy::MaxSpeed(SpdField::identity(d.clone())),
        ] {
            let c = integrate_causal_curve(&m, (-1.0, [0.1, 0.2]), &policy, 0.5, 1e-3).unwrap();
            assert!(c.max_speed_ratio() <= 1.0 + 1e-6, "{}", policy.describe());
            assert_eq!(c.samples.len(), 1501);
        }
    }
}
