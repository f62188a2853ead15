use rayon::prelude::*;

use super::SurgeryError;
use crate::geometry::{
    unit_step, GeometryError, MetricField, PlateauConstraint, PlateauKind, Point, ScalarField, SpatialDomain,
    SpdField, TimeInterval,
};

/// Relative head room of the majorant over the sampled lower bound.
pub const MAJORANT_MARGIN: f64 = 1e-6;
/// Width of the slabs over which the lower bound is maximized.
pub const MAJORANT_SLAB: f64 = 1.0 / 3.0;
/// Round-off slack when a lower bound is compared against one.
pub const IDENTITY_SLACK: f64 = 1e-9;
/// Relative tolerance for "constant in t" on sampled lower bounds.
const CONSTANCY_TOLERANCE: f64 = 1e-12;
/// Dense samples per ramp used near plateau boundaries.
const RAMP_SAMPLES: usize = 64;

/// `j` with `j g_0` complete. Every supported domain is a compact torus, on
/// which any Riemannian metric is complete, so `j = 1`.
pub fn completeness_factor(_domain: &SpatialDomain, _g0: &SpdField) -> ScalarField {
    ScalarField::constant(1.0)
}

/// The pointwise minimal stretch
/// `f_low(t, x) = max(1, lambda) * sup_v j g_0(v, v) / g_t(v, v)`
/// for which `f g_t >= max(1, lambda) j g_0` as quadratic forms.
pub fn cone_bound_factor(m: &MetricField, j: &ScalarField, g0: &SpdField) -> ScalarField {
    let reference = g0.conformal(j);
    let inner = m.clone();
    let mut field = ScalarField::from_fn(
        m.window(),
        m.representation(),
        format!("cone_bound({})", m.label()),
        move |t, x| {
            let s = inner.eval(t, x)?;
            let r = reference.eval(x)?;
            let (mu, _) = s.spatial.generalized_max_eigen(r.matrix());
            Ok(s.lapse.max(1.0) * mu)
        },
    );
    if let Some(w) = m.static_on() {
        field = field.with_plateau(PlateauConstraint {
            interval: w,
            kind: PlateauKind::ConstantInT,
        });
    }
    field
}

/// `-lambda dt^2 + f g_t`.
pub fn stretch_metric(m: &MetricField, f: &ScalarField) -> MetricField {
    let inner = m.clone();
    let factor = f.clone();
    let window = m.window().intersect(&f.window());
    let mut out = MetricField::from_fn(
        m.domain().clone(),
        window,
        m.representation(),
        format!("{}*{}", f.label(), m.label()),
        move |t, x| {
            let s = inner.eval(t, x)?;
            let v = factor.eval(t, x)?;
            if !(v > 0.0) {
                return Err(GeometryError::Domain(format!("stretch factor {v} at t = {t} is not positive")));
            }
            Ok((s.lapse, s.spatial.matrix().scale(v)))
        },
    );
    if let (Some(a), Some(b)) = (m.static_on(), f.constant_on()) {
        let w = a.intersect(&b);
        if !w.is_empty() {
            out = out.with_static_on(w);
        }
    }
    out
}

/// Where and how densely `smooth_majorant` samples its lower bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MajorantSampling {
    pub window: TimeInterval,
    pub samples_per_unit: usize,
}

impl MajorantSampling {
    pub fn new(window: TimeInterval, samples_per_unit: usize) -> Self {
        Self {
            window,
            samples_per_unit,
        }
    }
}

struct Plateaus {
    constant_until: Option<f64>,
    one_from: Option<f64>,
}

fn classify(constraints: &[PlateauConstraint]) -> Result<Plateaus, SurgeryError> {
    let mut out = Plateaus {
        constant_until: None,
        one_from: None,
    };
    for c in constraints {
        match c.kind {
            PlateauKind::ConstantInT if c.interval.start == f64::NEG_INFINITY && c.interval.end.is_finite() => {
                if out.constant_until.replace(c.interval.end).is_some() {
                    return Err(SurgeryError::Shape("more than one constant-in-t plateau".into()));
                }
            }
            PlateauKind::IdenticallyOne if c.interval.end == f64::INFINITY && c.interval.start.is_finite() => {
                if out.one_from.replace(c.interval.start).is_some() {
                    return Err(SurgeryError::Shape("more than one identically-one plateau".into()));
                }
            }
            _ => {
                return Err(SurgeryError::Shape(format!(
                    "unsupported plateau {:?} on {}; constant-in-t plateaus must be (-inf, b] and \
                     identically-one plateaus [a, inf)",
                    c.kind, c.interval
                )))
            }
        }
    }
    if let (Some(b), Some(a)) = (out.constant_until, out.one_from) {
        if b >= a {
            return Err(SurgeryError::Shape(format!("plateaus (-inf, {b}] and [{a}, inf) overlap")));
        }
    }
    Ok(out)
}

fn dense(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..=n).map(move |k| lo + (hi - lo) * k as f64 / n as f64)
}

/// A smooth `f >= lower` that satisfies the plateau constraints exactly.
///
/// The lower bound is sampled on every grid node; its sup over space is
/// maximized over slabs of width [`MAJORANT_SLAB`], inflated by
/// `1 + MAJORANT_MARGIN`, and each slab value is widened to its two
/// neighbours. The slab values are blended with the unit step, so `f` is
/// spatially constant, C-infinity in `t`, and
/// `f(t) <= (1 + MAJORANT_MARGIN) sup{lower on [t - 1, t + 1] x N}`
/// away from plateau ramps.
///
/// Plateaus are written exactly: `f = C` on `(-inf, b]` with `C` the largest
/// majorant value over the following ramp; `f = 1` on `[a, inf)`, reached
/// by a ramp over which `lower <= 1`. The ramp before `a` is the longest of
/// `MAJORANT_SLAB / 2^k`, `k <= 6`, that is admissible.
pub fn smooth_majorant(
    lower: &ScalarField,
    constraints: &[PlateauConstraint],
    domain: &SpatialDomain,
    sampling: &MajorantSampling,
) -> Result<ScalarField, SurgeryError> {
    let plateaus = classify(constraints)?;
    let (lo, hi) = (sampling.window.start, sampling.window.end);
    if !(sampling.window.is_bounded() && lo < hi) {
        return Err(SurgeryError::Shape(format!(
            "majorant sampling window {} must be bounded and non-empty",
            sampling.window
        )));
    }
    if let Some(b) = plateaus.constant_until {
        if !(lo <= b && b < hi) {
            return Err(SurgeryError::Shape(format!("constant plateau end {b} outside sampling window {}", sampling.window)));
        }
    }
    if let Some(a) = plateaus.one_from {
        if !(lo < a && a <= hi) {
            return Err(SurgeryError::Shape(format!("identity plateau start {a} outside sampling window {}", sampling.window)));
        }
    }

    let w = MAJORANT_SLAB;
    let spu = sampling.samples_per_unit.max(6);
    let n = ((hi - lo) * spu as f64).ceil() as usize;
    let mut times: Vec<f64> = dense(lo, hi, n).collect();
    if let Some(b) = plateaus.constant_until {
        times.extend(dense(b, (b + w).min(hi), RAMP_SAMPLES));
    }
    if let Some(a) = plateaus.one_from {
        times.extend(dense((a - w).max(lo), a, RAMP_SAMPLES));
    }
    times.sort_by(f64::total_cmp);
    times.dedup();

    let points = domain.grid_points();
    let rows: Vec<Result<Vec<f64>, GeometryError>> = times
        .par_iter()
        .map(|&t| points.iter().map(|&x| lower.eval(t, x)).collect())
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;

    let violation = |t: f64, x: Point, message: String| SurgeryError::Constraint { t, x, message };
    for (k, row) in rows.iter().enumerate() {
        for (p, &v) in row.iter().enumerate() {
            if !(v > 0.0) {
                return Err(violation(times[k], points[p], format!("lower bound {v} is not positive")));
            }
        }
    }
    if let Some(b) = plateaus.constant_until {
        let kb = times.iter().position(|&t| t == b).expect("b was sampled");
        for (k, row) in rows.iter().enumerate().filter(|(k, _)| times[*k] <= b) {
            for (p, &v) in row.iter().enumerate() {
                let anchor = rows[kb][p];
                if (v - anchor).abs() > CONSTANCY_TOLERANCE * anchor {
                    return Err(violation(
                        times[k],
                        points[p],
                        format!("lower bound {v} differs from its value {anchor} at t = {b} on a constant-in-t plateau"),
                    ));
                }
            }
        }
    }
    if let Some(a) = plateaus.one_from {
        for (k, row) in rows.iter().enumerate().filter(|(k, _)| times[*k] >= a) {
            for (p, &v) in row.iter().enumerate() {
                if v > 1.0 + IDENTITY_SLACK {
                    return Err(violation(times[k], points[p], format!("lower bound {v} exceeds 1 on an identically-one plateau")));
                }
            }
        }
    }

    let sup: Vec<f64> = rows.iter().map(|r| r.iter().copied().fold(0.0, f64::max)).collect();
    let slabs = ((hi - lo) / w).ceil() as usize;
    let mut slab_max = vec![0.0f64; slabs];
    for (k, &t) in times.iter().enumerate() {
        let u = (t - lo) / w;
        let j = (u.floor() as usize).min(slabs - 1);
        slab_max[j] = slab_max[j].max(sup[k]);
        // slab edges belong to both neighbours
        if u == u.floor() && j > 0 {
            slab_max[j - 1] = slab_max[j - 1].max(sup[k]);
        }
    }
    let widened: Vec<f64> = (0..slabs)
        .map(|j| {
            let l = slab_max[j.saturating_sub(1)];
            let r = slab_max[(j + 1).min(slabs - 1)];
            (1.0 + MAJORANT_MARGIN) * slab_max[j].max(l).max(r)
        })
        .collect();
    let base = move |t: f64| -> f64 {
        let u = (t - lo) / w;
        let upper = (u + 0.5).floor();
        let s = unit_step(u + 0.5 - upper);
        let clamp = |j: f64| widened[(j.max(0.0) as usize).min(slabs - 1)];
        (1.0 - s) * clamp(upper - 1.0) + s * clamp(upper)
    };

    // constant plateau on (-inf, b], then a ramp of width rc into `base`
    let mut rc = w;
    let mut ramp_one = None;
    if let Some(a) = plateaus.one_from {
        let mut chosen = None;
        let mut offender = None;
        for k in 0..=6 {
            let r = w / f64::powi(2.0, k);
            let start = a - r;
            let bad = times
                .iter()
                .enumerate()
                .filter(|(_, &t)| t >= start && t <= a)
                .flat_map(|(i, _)| rows[i].iter().enumerate().map(move |(p, v)| (i, p, *v)))
                .find(|&(_, _, v)| v > 1.0 + IDENTITY_SLACK);
            match bad {
                None => {
                    chosen = Some(r);
                    break;
                }
                Some(b) => offender = Some(b),
            }
        }
        let Some(r1) = chosen else {
            let (i, p, v) = offender.unwrap();
            return Err(violation(
                times[i],
                points[p],
                format!("lower bound {v} exceeds 1 immediately before the identically-one plateau at {a}"),
            ));
        };
        if let Some(b) = plateaus.constant_until {
            rc = rc.min(a - r1 - b);
            if rc <= 0.0 {
                return Err(SurgeryError::Shape(format!("no room for a ramp between plateaus at {b} and {a}")));
            }
        }
        ramp_one = Some((a, r1));
    }
    let constant = match plateaus.constant_until {
        Some(b) => {
            let c = times
                .iter()
                .filter(|&&t| t >= b && t <= b + rc)
                .map(|&t| base(t))
                .fold(0.0, f64::max);
            Some((b, c.max(base(b + rc))))
        }
        None => None,
    };

    let profile = move |t: f64| -> f64 {
        if let Some((a, _)) = ramp_one {
            if t >= a {
                return 1.0;
            }
        }
        let mut v = match constant {
            Some((b, c)) if t <= b => c,
            Some((b, c)) if t < b + rc => {
                let beta = unit_step((t - b) / rc);
                (1.0 - beta) * c + beta * base(t)
            }
            _ => base(t),
        };
        if let Some((a, r1)) = ramp_one {
            if t > a - r1 {
                let beta = unit_step((t - (a - r1)) / r1);
                v = (1.0 - beta) * v + beta;
            }
        }
        v
    };

    // post-hoc inequality check on every sample
    for (k, row) in rows.iter().enumerate() {
        let f = profile(times[k]);
        for (p, &v) in row.iter().enumerate() {
            if f < v * (1.0 - IDENTITY_SLACK) {
                return Err(violation(times[k], points[p], format!("majorant {f} below lower bound {v}")));
            }
        }
    }

    let window = TimeInterval::new(
        if plateaus.constant_until.is_some() { f64::NEG_INFINITY } else { lo },
        if plateaus.one_from.is_some() { f64::INFINITY } else { hi },
    );
    let mut field = ScalarField::from_fn(window, lower.representation(), format!("majorant({})", lower.label()), move |t, _| {
        Ok(profile(t))
    });
    if let Some(b) = plateaus.constant_until {
        field = field.with_plateau(PlateauConstraint::constant_until(b));
    }
    if let Some(a) = plateaus.one_from {
        field = field.with_plateau(PlateauConstraint::one_from(a));
    }
    Ok(field)
}

#[derive(Debug, Clone)]
pub struct ConeSurgeryOptions {
    /// Time from which the input is already globally hyperbolic; `f = 1` there.
    pub already_gh_after: Option<f64>,
    /// Replaces [`completeness_factor`].
    pub completeness: Option<ScalarField>,
    /// Slice whose spatial form is `g_0`.
    pub reference_time: f64,
    /// Majorant sampling window; `None` picks one from the input.
    pub window: Option<TimeInterval>,
    pub samples_per_unit: usize,
}

impl Default for ConeSurgeryOptions {
    fn default() -> Self {
        Self {
            already_gh_after: None,
            completeness: None,
            reference_time: 0.0,
            window: None,
            samples_per_unit: 32,
        }
    }
}

/// Result of the cone-bounding surgery.
#[derive(Debug, Clone)]
pub struct ConeSurgery {
    /// `-lambda dt^2 + f g_t`.
    pub metric: MetricField,
    pub factor: ScalarField,
    pub lower: ScalarField,
    pub completeness: ScalarField,
    pub g0: SpdField,
    pub sampling: MajorantSampling,
}

impl ConeSurgery {
    /// The reference metric `j g_0`.
    pub fn reference(&self) -> SpdField {
        self.g0.conformal(&self.completeness)
    }
}

/// Stretches `m` so that causal curves have `j g_0`-speed at most one.
pub fn make_globally_hyperbolic(m: &MetricField, already_gh_after: Option<f64>) -> Result<ConeSurgery, SurgeryError> {
    make_globally_hyperbolic_with(
        m,
        &ConeSurgeryOptions {
            already_gh_after,
            ..Default::default()
        },
    )
}

pub fn make_globally_hyperbolic_with(m: &MetricField, options: &ConeSurgeryOptions) -> Result<ConeSurgery, SurgeryError> {
    let g0 = m.slice(options.reference_time);
    let j = options
        .completeness
        .clone()
        .unwrap_or_else(|| completeness_factor(m.domain(), &g0));
    let lower = cone_bound_factor(m, &j, &g0);

    let mut constraints = Vec::new();
    let frozen_until = m
        .static_on()
        .filter(|w| w.start == f64::NEG_INFINITY && w.end.is_finite())
        .map(|w| w.end);
    if let Some(b) = frozen_until {
        constraints.push(PlateauConstraint::constant_until(b));
    }
    if let Some(a) = options.already_gh_after {
        constraints.push(PlateauConstraint::one_from(a));
    }

    let window = options.window.unwrap_or_else(|| {
        let mw = m.window();
        let mut lo = if mw.start.is_finite() { mw.start } else { -3.0 };
        let mut hi = if mw.end.is_finite() { mw.end } else { 3.0 };
        if let Some(b) = frozen_until {
            lo = lo.min(b - 1.0);
            hi = hi.max(b + 1.0);
        }
        if let Some(a) = options.already_gh_after {
            hi = hi.max(a + 2.0);
            lo = lo.min(a - 1.0);
        }
        TimeInterval::new(lo, hi)
    });
    let sampling = MajorantSampling::new(window, options.samples_per_unit);
    let factor = smooth_majorant(&lower, &constraints, m.domain(), &sampling)?;
    let metric = stretch_metric(m, &factor).with_label(format!("cone_stretch({})", m.label()));
    Ok(ConeSurgery {
        metric,
        factor,
        lower,
        completeness: j,
        g0,
        sampling,
    })
}
