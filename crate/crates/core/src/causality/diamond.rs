use serde::Serialize;
use thiserror::Error;

use super::speed::max_coordinate_speed;
use crate::geometry::{unit_step, GeometryError, MetricField, Point, SpatialDomain, SpdField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Event {
    pub t: f64,
    pub x: Point,
}

impl Event {
    pub fn new(t: f64, x: Point) -> Self {
        Self { t, x }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiamondError {
    #[error("p = {p:?} does not precede q = {q:?} in coordinate time")]
    Order { p: Event, q: Event },
    #[error("slice budget must be positive")]
    Budget,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Reference metric used to measure diamond radii.
#[derive(Debug, Clone)]
pub enum Comparison {
    Fixed(SpdField),
    /// The two-set covering for `-dt^2 + k_theta(t)`: `A = {t < 2/3}` is
    /// compared with `(1 - theta(2/3)) k_0`, `B = {t > 1/3}` with
    /// `theta(1/3) k_1`.
    Covering { k0: SpdField, k1: SpdField },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparisonUsed {
    Fixed,
    /// `t(q) < 2/3`: `(1 - theta(2/3)) k_0`.
    LowerRegion,
    /// `t(p) > 1/3`: `theta(1/3) k_1`.
    UpperRegion,
    /// Neither; a common minorant of both comparison metrics.
    BothRegions,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiamondSlice {
    pub t: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiamondReport {
    pub p: Event,
    pub q: Event,
    pub comparison: ComparisonUsed,
    pub reference: String,
    pub slices: Vec<DiamondSlice>,
    /// Largest slice radius around `x(p)`.
    pub extent: f64,
    pub bounded: bool,
}

fn choose_reference(comparison: &Comparison, p: &Event, q: &Event) -> Result<(ComparisonUsed, SpdField), GeometryError> {
    match comparison {
        Comparison::Fixed(r) => Ok((ComparisonUsed::Fixed, r.clone())),
        Comparison::Covering { k0, k1 } => {
            let a = 1.0 - unit_step(2.0 / 3.0);
            let b = unit_step(1.0 / 3.0);
            if q.t < 2.0 / 3.0 {
                Ok((ComparisonUsed::LowerRegion, k0.scaled(a)))
            } else if p.t > 1.0 / 3.0 {
                Ok((ComparisonUsed::UpperRegion, k1.scaled(b)))
            } else {
                // c(x) k_0 <= a k_0 and c(x) k_0 <= b k_1 pointwise
                let k0 = k0.clone();
                let k1 = k1.clone();
                let label = format!("min({a}, {b}*mu_min)*{}", k0.label());
                let both = SpdField::from_fn(k0.domain().clone(), crate::geometry::Representation::ClosedForm, label, move |x| {
                    let f0 = k0.eval(x)?;
                    let f1 = k1.eval(x)?;
                    let mu = f0.generalized_min_eigenvalue(f1.matrix());
                    Ok(f0.matrix().scale(a.min(b * mu)))
                });
                Ok((ComparisonUsed::BothRegions, both))
            }
        }
    }
}

/// Shortest lattice image distance from `a` to `b` measured with `form`.
fn torus_distance(domain: &SpatialDomain, form: &SpdField, a: Point, b: Point) -> Result<f64, GeometryError> {
    let f = form.eval(a)?;
    let mut delta = [0.0; 2];
    for axis in 0..domain.dim() {
        let l = domain.circumferences()[axis];
        let d = (b[axis] - a[axis]).rem_euclid(l);
        delta[axis] = if d > 0.5 * l { d - l } else { d };
    }
    let mut best = f64::INFINITY;
    let shifts: &[f64] = &[-1.0, 0.0, 1.0];
    for &s1 in shifts {
        for &s2 in if domain.dim() == 2 { shifts } else { &[0.0][..] } {
            let v = [
                delta[0] + s1 * domain.circumferences()[0],
                delta[1] + if domain.dim() == 2 { s2 * domain.circumferences()[1] } else { 0.0 },
            ];
            best = best.min(f.quad(v).sqrt());
        }
    }
    Ok(best)
}

/// Bounds the slices of the causal diamond `D(p, q)`.
///
/// Slices sit on the lattice `t(p) + k / budget` plus `t(q)`. On each cell
/// the sup over space of the maximal reference speed is bounded by the
/// larger of its end values; the forward radius from `p` and backward
/// radius from `q` are the integrals of that piecewise constant bound.
/// The slice radius around `x(p)` is `min(R_fwd, d(p, q) + R_bwd)`.
pub fn causal_diamond_extent(
    m: &MetricField,
    p: Event,
    q: Event,
    budget: usize,
    comparison: &Comparison,
) -> Result<DiamondReport, DiamondError> {
    if budget == 0 {
        return Err(DiamondError::Budget);
    }
    let domain = m.domain().clone();
    let (used, reference) = choose_reference(comparison, &p, &q)?;
    let d_pq = torus_distance(&domain, &reference, p.x, q.x)?;
    if q.t < p.t || (q.t == p.t && d_pq > 0.0) {
        return Err(DiamondError::Order { p, q });
    }
    let dt = 1.0 / budget as f64;
    let mut times = vec![p.t];
    let mut k = 1usize;
    loop {
        let t = p.t + k as f64 * dt;
        if t >= q.t {
            break;
        }
        times.push(t);
        k += 1;
    }
    if q.t > p.t {
        times.push(q.t);
    }
    let points = domain.grid_points();
    let sup_at = |t: f64| -> Result<f64, GeometryError> {
        let mut s: f64 = 0.0;
        for &x in &points {
            s = s.max(max_coordinate_speed(m, &reference, t, x)?);
        }
        Ok(s)
    };
    // lattice cell bounds; the last (partial) cell uses its full lattice end
    let mut cell_bounds = Vec::with_capacity(times.len().saturating_sub(1));
    for i in 0..times.len().saturating_sub(1) {
        let cell_end = p.t + (i + 1) as f64 * dt;
        cell_bounds.push(sup_at(times[i])?.max(sup_at(cell_end)?));
    }
    let mut forward = vec![0.0; times.len()];
    for i in 1..times.len() {
        forward[i] = forward[i - 1] + cell_bounds[i - 1] * (times[i] - times[i - 1]);
    }
    let mut backward = vec![0.0; times.len()];
    for i in (0..times.len().saturating_sub(1)).rev() {
        backward[i] = backward[i + 1] + cell_bounds[i] * (times[i + 1] - times[i]);
    }
    let slices: Vec<DiamondSlice> = times
        .iter()
        .enumerate()
        .map(|(i, &t)| DiamondSlice {
            t,
            radius: forward[i].min(d_pq + backward[i]),
        })
        .collect();
    let extent = slices.iter().map(|s| s.radius).fold(0.0, f64::max);
    let bounded = slices.iter().all(|s| s.radius.is_finite());
    Ok(DiamondReport {
        p,
        q,
        comparison: used,
        reference: reference.label().to_string(),
        slices,
        extent,
        bounded,
    })
}
