use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{GeometryError, Point, SpatialDomain, SpdForm, SymMatrix, TimeInterval};

/// How a field is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    /// A formula evaluated exactly at every query.
    ClosedForm,
    /// Samples on a time x space grid, interpolated between nodes.
    Grid,
}

/// Raw value of a metric at one event: lapse and spatial form, unchecked.
pub type RawMetric = (f64, SymMatrix);

type MetricFn = dyn Fn(f64, Point) -> Result<RawMetric, GeometryError> + Send + Sync;
type ScalarFn = dyn Fn(f64, Point) -> Result<f64, GeometryError> + Send + Sync;
type FormFn = dyn Fn(Point) -> Result<SymMatrix, GeometryError> + Send + Sync;

/// A validated metric value `-lapse dt^2 + spatial`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSample {
    pub lapse: f64,
    pub spatial: SpdForm,
}

/// A split Lorentzian metric `-lambda(t, x) dt^2 + g_t(x)` on `R x T^d`.
///
/// Fields are immutable: every transformation returns a new field that
/// shares the original through an `Arc`.
#[derive(Clone)]
pub struct MetricField {
    domain: SpatialDomain,
    window: TimeInterval,
    representation: Representation,
    static_on: Option<TimeInterval>,
    label: String,
    eval: Arc<MetricFn>,
}

impl fmt::Debug for MetricField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricField")
            .field("label", &self.label)
            .field("dim", &self.domain.dim())
            .field("window", &self.window)
            .field("representation", &self.representation)
            .field("static_on", &self.static_on)
            .finish()
    }
}

impl MetricField {
    /// Closed-form field valid for all times. The closures receive points
    /// already reduced to the fundamental cell.
    pub fn closed_form<L, G>(domain: SpatialDomain, label: impl Into<String>, lapse: L, spatial: G) -> Self
    where
        L: Fn(f64, Point) -> f64 + Send + Sync + 'static,
        G: Fn(f64, Point) -> SymMatrix + Send + Sync + 'static,
    {
        Self::from_fn(
            domain,
            TimeInterval::ALL,
            Representation::ClosedForm,
            label,
            move |t, x| Ok((lapse(t, x), spatial(t, x))),
        )
    }

    pub fn from_fn<F>(
        domain: SpatialDomain,
        window: TimeInterval,
        representation: Representation,
        label: impl Into<String>,
        eval: F,
    ) -> Self
    where
        F: Fn(f64, Point) -> Result<RawMetric, GeometryError> + Send + Sync + 'static,
    {
        Self {
            domain,
            window,
            representation,
            static_on: None,
            label: label.into(),
            eval: Arc::new(eval),
        }
    }

    /// `-dt^2 + h(x)`.
    pub fn ultrastatic(spatial: SpdField) -> Self {
        let domain = spatial.domain().clone();
        let label = format!("ultrastatic({})", spatial.label());
        Self::from_fn(
            domain,
            TimeInterval::ALL,
            spatial.representation,
            label,
            move |_, x| Ok((1.0, *spatial.eval(x)?.matrix())),
        )
        .with_static_on(TimeInterval::ALL)
    }

    pub fn domain(&self) -> &SpatialDomain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn window(&self) -> TimeInterval {
        self.window
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Interval on which the field is known to be constant in `t`.
    pub fn static_on(&self) -> Option<TimeInterval> {
        self.static_on
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_window(mut self, window: TimeInterval) -> Self {
        self.window = window;
        self
    }

    pub fn with_static_on(mut self, interval: TimeInterval) -> Self {
        self.static_on = Some(interval);
        self
    }

    pub fn without_static_annotation(mut self) -> Self {
        self.static_on = None;
        self
    }

    /// Unvalidated evaluation; used by composite fields that validate the
    /// final result themselves.
    pub fn eval_raw(&self, t: f64, x: Point) -> Result<RawMetric, GeometryError> {
        if !self.window.contains(t) {
            return Err(GeometryError::OutOfWindow {
                t,
                window: self.window,
            });
        }
        (self.eval)(t, self.domain.wrap(x))
    }

    /// Evaluates and validates `lapse > 0` and `g_t(x)` SPD.
    pub fn eval(&self, t: f64, x: Point) -> Result<MetricSample, GeometryError> {
        let (lapse, spatial) = self.eval_raw(t, x)?;
        if !(lapse.is_finite() && lapse > 0.0) {
            return Err(GeometryError::Data {
                t,
                x,
                message: format!("lapse {lapse} is not positive"),
            });
        }
        if spatial.dim() != self.dim() {
            return Err(GeometryError::Shape(format!(
                "spatial form of dimension {} on a {}-dimensional domain",
                spatial.dim(),
                self.dim()
            )));
        }
        let spatial = SpdForm::new(spatial).map_err(|_| GeometryError::Data {
            t,
            x,
            message: format!("spatial form {:?} is not SPD", spatial.upper()),
        })?;
        Ok(MetricSample { lapse, spatial })
    }

    /// `m(t - shift)`: the same geometry translated forward in time by `shift`.
    pub fn time_shift(&self, shift: f64) -> MetricField {
        let inner = self.clone();
        let mut out = MetricField::from_fn(
            self.domain.clone(),
            self.window.shift(shift),
            self.representation,
            format!("shift({}, {shift})", self.label),
            move |t, x| inner.eval_raw(t - shift, x),
        );
        out.static_on = self.static_on.map(|w| w.shift(shift));
        out
    }

    /// Spatial slice `g_{t0}` as a time-independent form field.
    pub fn slice(&self, t0: f64) -> SpdField {
        let inner = self.clone();
        SpdField::from_fn(
            self.domain.clone(),
            self.representation,
            format!("{}|t={t0}", self.label),
            move |x| Ok(*inner.eval(t0, x)?.spatial.matrix()),
        )
    }
}

/// Evaluates `m` at `(t, x)`, returning the lapse and the spatial form.
pub fn metric_eval(m: &MetricField, t: f64, x: Point) -> Result<(f64, SpdForm), GeometryError> {
    let s = m.eval(t, x)?;
    Ok((s.lapse, s.spatial))
}

/// The field `t -> m(-t)`.
pub fn time_reverse(m: &MetricField) -> MetricField {
    let inner = m.clone();
    let mut out = MetricField::from_fn(
        m.domain.clone(),
        m.window.negate(),
        m.representation,
        format!("reverse({})", m.label),
        move |t, x| inner.eval_raw(-t, x),
    );
    out.static_on = m.static_on.map(|w| w.negate());
    out
}

/// Constancy kind of a plateau.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlateauKind {
    ConstantInT,
    IdenticallyOne,
}

/// A time interval on which a scalar field is constant in `t`, or equal to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlateauConstraint {
    pub interval: TimeInterval,
    pub kind: PlateauKind,
}

impl PlateauConstraint {
    pub fn constant_until(end: f64) -> Self {
        Self {
            interval: TimeInterval::until(end),
            kind: PlateauKind::ConstantInT,
        }
    }

    pub fn one_from(start: f64) -> Self {
        Self {
            interval: TimeInterval::from(start),
            kind: PlateauKind::IdenticallyOne,
        }
    }

    /// The time at which a constant plateau is evaluated.
    fn anchor(&self) -> f64 {
        if self.interval.end.is_finite() {
            self.interval.end
        } else {
            self.interval.start
        }
    }
}

/// Scalar field `f(t, x)` with plateau annotations that hold exactly under
/// evaluation.
#[derive(Clone)]
pub struct ScalarField {
    window: TimeInterval,
    representation: Representation,
    plateaus: Vec<PlateauConstraint>,
    label: String,
    eval: Arc<ScalarFn>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("label", &self.label)
            .field("window", &self.window)
            .field("plateaus", &self.plateaus)
            .finish()
    }
}

impl ScalarField {
    pub fn from_fn<F>(window: TimeInterval, representation: Representation, label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(f64, Point) -> Result<f64, GeometryError> + Send + Sync + 'static,
    {
        Self {
            window,
            representation,
            plateaus: Vec::new(),
            label: label.into(),
            eval: Arc::new(eval),
        }
    }

    /// A closed-form scalar valid for all times.
    pub fn closed_form<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64, Point) -> f64 + Send + Sync + 'static,
    {
        Self::from_fn(TimeInterval::ALL, Representation::ClosedForm, label, move |t, x| Ok(f(t, x)))
    }

    pub fn constant(value: f64) -> Self {
        let mut field = Self::closed_form(format!("{value}"), move |_, _| value);
        field.plateaus.push(PlateauConstraint {
            interval: TimeInterval::ALL,
            kind: PlateauKind::ConstantInT,
        });
        field
    }

    /// Adds a plateau annotation. The caller is responsible for the
    /// annotation being consistent with the underlying formula; evaluation
    /// enforces it regardless.
    pub fn with_plateau(mut self, plateau: PlateauConstraint) -> Self {
        self.plateaus.push(plateau);
        self
    }

    pub fn plateaus(&self) -> &[PlateauConstraint] {
        &self.plateaus
    }

    pub fn window(&self) -> TimeInterval {
        self.window
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Interval on which the field is constant in `t`, if annotated.
    pub fn constant_on(&self) -> Option<TimeInterval> {
        self.plateaus
            .iter()
            .filter(|p| p.kind == PlateauKind::ConstantInT)
            .map(|p| p.interval)
            .next()
    }

    pub fn eval(&self, t: f64, x: Point) -> Result<f64, GeometryError> {
        for p in &self.plateaus {
            if p.interval.contains(t) {
                return match p.kind {
                    PlateauKind::IdenticallyOne => Ok(1.0),
                    PlateauKind::ConstantInT => self.eval_inner(p.anchor(), x),
                };
            }
        }
        if !self.window.contains(t) {
            return Err(GeometryError::OutOfWindow {
                t,
                window: self.window,
            });
        }
        self.eval_inner(t, x)
    }

    fn eval_inner(&self, t: f64, x: Point) -> Result<f64, GeometryError> {
        let v = (self.eval)(t, x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(GeometryError::Data {
                t,
                x,
                message: format!("scalar field {} evaluates to {v}", self.label),
            })
        }
    }
}

/// Time-independent SPD form field `x -> h(x)` (reference metrics, frozen
/// slices, ultrastatic spatial parts).
#[derive(Clone)]
pub struct SpdField {
    domain: SpatialDomain,
    representation: Representation,
    label: String,
    eval: Arc<FormFn>,
}

impl fmt::Debug for SpdField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpdField").field("label", &self.label).finish()
    }
}

impl SpdField {
    pub fn from_fn<F>(domain: SpatialDomain, representation: Representation, label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(Point) -> Result<SymMatrix, GeometryError> + Send + Sync + 'static,
    {
        Self {
            domain,
            representation,
            label: label.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn constant(domain: SpatialDomain, form: SymMatrix) -> Self {
        Self::from_fn(domain, Representation::ClosedForm, format!("{:?}", form.upper()), move |_| Ok(form))
    }

    pub fn identity(domain: SpatialDomain) -> Self {
        let dim = domain.dim();
        Self::constant(domain, SymMatrix::identity(dim))
    }

    pub fn domain(&self) -> &SpatialDomain {
        &self.domain
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, x: Point) -> Result<SpdForm, GeometryError> {
        let x = self.domain.wrap(x);
        let m = (self.eval)(x)?;
        SpdForm::new(m).map_err(|_| GeometryError::Data {
            t: f64::NAN,
            x,
            message: format!("form {:?} of {} is not SPD", m.upper(), self.label),
        })
    }

    /// `j(0, x) * h(x)` for a positive scalar `j`.
    pub fn conformal(&self, j: &ScalarField) -> SpdField {
        let inner = self.clone();
        let j = j.clone();
        SpdField::from_fn(
            self.domain.clone(),
            self.representation,
            format!("{}*{}", j.label(), self.label),
            move |x| {
                let s = j.eval(0.0, x)?;
                if s <= 0.0 {
                    return Err(GeometryError::Domain(format!("conformal factor {s} is not positive")));
                }
                Ok(inner.eval(x)?.matrix().scale(s))
            },
        )
    }

    pub fn scaled(&self, s: f64) -> SpdField {
        let inner = self.clone();
        SpdField::from_fn(
            self.domain.clone(),
            self.representation,
            format!("{s}*{}", self.label),
            move |x| Ok(inner.eval(x)?.matrix().scale(s)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flrw(domain: SpatialDomain) -> MetricField {
        let dim = domain.dim();
        MetricField::closed_form(domain, "flrw", |_, _| 1.0, move |t, _| SymMatrix::scalar(dim, (2.0 * t).exp()))
    }

    #[test]
    fn ultrastatic_evaluates_to_identity() {
        let d = SpatialDomain::torus([1.0, 1.0], [8, 8]).unwrap();
        let m = MetricField::ultrastatic(SpdField::identity(d));
        let (lapse, g) = metric_eval(&m, 12.5, [0.3, 0.9]).unwrap();
        assert_eq!(lapse, 1.0);
        assert_eq!(g, SpdForm::identity(2));
    }

    #[test]
    fn flrw_substitution() {
        let m = flrw(SpatialDomain::circle(1.0, 8).unwrap());
        let (lapse, g) = metric_eval(&m, 1.0, [0.0, 0.0]).unwrap();
        assert_eq!(lapse, 1.0);
        assert_eq!(g.upper(), vec![(2.0f64).exp()]);
    }

    #[test]
    fn reversal() {
        let m = flrw(SpatialDomain::circle(1.0, 8).unwrap());
        let r = time_reverse(&m);
        assert_eq!(metric_eval(&r, 1.0, [0.0; 2]).unwrap().1.upper(), vec![(-2.0f64).exp()]);
        let rr = time_reverse(&r);
        for k in -20..20 {
            let t = k as f64 * 0.37;
            assert_eq!(m.eval(t, [0.1, 0.0]).unwrap(), rr.eval(t, [0.1, 0.0]).unwrap());
        }
        let bounded = m.clone().with_window(TimeInterval::new(-1.0, 3.0));
        assert_eq!(time_reverse(&bounded).window(), TimeInterval::new(-3.0, 1.0));
    }

    #[test]
    fn out_of_window_and_bad_values() {
        let d = SpatialDomain::circle(1.0, 8).unwrap();
        let m = flrw(d.clone()).with_window(TimeInterval::new(0.0, 1.0));
        assert!(matches!(m.eval(2.0, [0.0; 2]), Err(GeometryError::OutOfWindow { .. })));
        let bad = MetricField::closed_form(d, "bad", |t, _| t, |_, _| SymMatrix::one(1.0));
        match bad.eval(-1.0, [0.25, 0.0]) {
            Err(GeometryError::Data { t, x, .. }) => {
                assert_eq!(t, -1.0);
                assert_eq!(x[0], 0.25);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn plateaus_hold_exactly() {
        let f = ScalarField::closed_form("wobble", |t, _| 2.0 + (3.0 * t).sin())
            .with_plateau(PlateauConstraint::constant_until(0.0))
            .with_plateau(PlateauConstraint::one_from(5.0));
        assert_eq!(f.eval(-1.0, [0.0; 2]).unwrap(), f.eval(-10.0, [0.0; 2]).unwrap());
        assert_eq!(f.eval(-1.0, [0.0; 2]).unwrap(), 2.0);
        assert_eq!(f.eval(6.0, [0.0; 2]).unwrap(), 1.0);
    }
}
