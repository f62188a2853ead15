//! Spatial domains, metric and scalar fields, step profiles and the
//! generalized eigenvalue kernel.

mod domain;
mod field;
mod form;
mod grid;
mod interval;
mod profile;

use thiserror::Error;

pub use domain::{Point, SpatialDomain, MIN_RESOLUTION};
pub use field::{
    metric_eval, time_reverse, MetricField, MetricSample, PlateauConstraint, PlateauKind, RawMetric,
    Representation, ScalarField, SpdField,
};
pub use form::{spd_generalized_max_eigenvalue, SpdForm, SymMatrix, SPD_RELATIVE_FLOOR};
pub use grid::MetricGrid;
pub use interval::{TimeInterval, UNBOUNDED_SAMPLE_SPAN};
pub use profile::{freeze_ramp, smooth_step_eval, unit_step, SmoothStepProfile};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("form is not symmetric positive definite: {0}")]
    NotSpd(String),
    #[error("time {t} outside validity window {window}")]
    OutOfWindow { t: f64, window: TimeInterval },
    #[error("invalid field value at t = {t}, x = {x:?}: {message}")]
    Data { t: f64, x: Point, message: String },
}
