//! Conformal surgery on split metrics.
//!
//! [`make_globally_hyperbolic`] stretches the spatial part of
//! `-lambda dt^2 + g_t` by a smooth factor `f >= max(1, lambda) sup_v
//! j g_0(v, v) / g_t(v, v)` so that every causal curve moves with
//! `j g_0`-speed at most one. [`asymptotic_join`] chains normalization,
//! past freezing, cone stretching, ultrastatic tails and a convex
//! interpolation of tails into a single metric that agrees with one input
//! in the future and another in the past.

mod cone;
mod join;

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{GeometryError, MetricField, Point, TimeInterval};

pub use crate::geometry::{PlateauConstraint, PlateauKind};
pub use cone::{
    completeness_factor, cone_bound_factor, make_globally_hyperbolic, make_globally_hyperbolic_with, smooth_majorant,
    stretch_metric, ConeSurgery, ConeSurgeryOptions, MajorantSampling, IDENTITY_SLACK, MAJORANT_MARGIN, MAJORANT_SLAB,
};
pub use join::{
    asymptotic_join, asymptotic_join_with, freeze_past, interpolate_ultrastatic, normalize_conformal, splice,
    ultrastatic_join, ultrastatic_tail, JoinOptions, UltrastaticJoin, SPLICE_HALF_WIDTH,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SurgeryError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("plateau constraint violated at t = {t}, x = {x:?}: {message}")]
    Constraint { t: f64, x: Point, message: String },
    #[error("splice pieces disagree by {deviation:e} (relative) at t = {t}, x = {x:?}")]
    Splice { deviation: f64, t: f64, x: Point },
    #[error("certificate `{name}` failed: {detail}")]
    Certificate { name: String, detail: String },
    #[error("stage `{stage}`: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<SurgeryError>,
    },
}

impl SurgeryError {
    pub fn at_stage(self, stage: &'static str) -> SurgeryError {
        SurgeryError::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T, SurgeryError>;
}

impl<T, E: Into<SurgeryError>> StageExt<T> for Result<T, E> {
    fn stage(self, stage: &'static str) -> Result<T, SurgeryError> {
        self.map_err(|e| e.into().at_stage(stage))
    }
}

/// Outcome of one machine check attached to a [`JoinArtifact`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Certificate {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// A metric together with the windows on which it reproduces its two
/// inputs in the identity chart:
///
/// - `metric(t, x) = future_model(t + future_shift, x)` for `t` in `future_window`
/// - `metric(t, x) = past_model(t + past_shift, x)` for `t` in `past_window`
#[derive(Debug, Clone)]
pub struct JoinArtifact {
    pub metric: MetricField,
    pub future_window: TimeInterval,
    pub future_shift: f64,
    pub past_window: TimeInterval,
    pub past_shift: f64,
    pub certificates: Vec<Certificate>,
}

impl JoinArtifact {
    pub fn is_certified(&self) -> bool {
        !self.certificates.is_empty() && self.certificates.iter().all(|c| c.passed)
    }

    /// Fails with the first failing certificate.
    pub(crate) fn certified(self) -> Result<Self, SurgeryError> {
        if let Some(c) = self.certificates.iter().find(|c| !c.passed) {
            return Err(SurgeryError::Certificate {
                name: c.name.clone(),
                detail: c.detail.clone(),
            });
        }
        Ok(self)
    }
}
