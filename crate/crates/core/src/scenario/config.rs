use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dsl::{eval_expression, parse_expression, Bindings};
use crate::geometry::{SpatialDomain, TimeInterval, MIN_RESOLUTION};

pub const SCHEMA_VERSION: u32 = 1;

/// A configuration problem, located by a dotted field path such as
/// `g.spatial[1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

/// A number given either literally or as a constant DSL expression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Number(f64),
    Expression(String),
}

impl Scalar {
    pub fn value(&self, path: &str) -> Result<f64, ConfigError> {
        match self {
            Scalar::Number(v) => Ok(*v),
            Scalar::Expression(s) => {
                let e = parse_expression(s).map_err(|e| ConfigError::new(path, e.to_string()))?;
                if !e.free_variables().is_empty() {
                    return Err(ConfigError::new(path, format!("`{s}` must be a constant expression")));
                }
                eval_expression(&e, &Bindings::new()).map_err(|e| ConfigError::new(path, e.to_string()))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub dim: usize,
    pub circumferences: Vec<Scalar>,
    pub resolution: Vec<usize>,
}

impl DomainSpec {
    pub fn build(&self) -> Result<SpatialDomain, ConfigError> {
        if !(1..=2).contains(&self.dim) {
            return Err(ConfigError::new("domain.dim", format!("must be 1 or 2, got {}", self.dim)));
        }
        if self.circumferences.len() != self.dim {
            return Err(ConfigError::new(
                "domain.circumferences",
                format!("expected {} entries, got {}", self.dim, self.circumferences.len()),
            ));
        }
        if self.resolution.len() != self.dim {
            return Err(ConfigError::new(
                "domain.resolution",
                format!("expected {} entries, got {}", self.dim, self.resolution.len()),
            ));
        }
        let mut lengths = Vec::new();
        for (i, c) in self.circumferences.iter().enumerate() {
            let path = format!("domain.circumferences[{i}]");
            let v = c.value(&path)?;
            if !(v.is_finite() && v > 0.0) {
                return Err(ConfigError::new(path, format!("must be positive, got {v}")));
            }
            lengths.push(v);
        }
        for (i, &n) in self.resolution.iter().enumerate() {
            if n < MIN_RESOLUTION {
                return Err(ConfigError::new(
                    format!("domain.resolution[{i}]"),
                    format!("must be at least {MIN_RESOLUTION}, got {n}"),
                ));
            }
        }
        SpatialDomain::new(&lengths, &self.resolution).map_err(|e| ConfigError::new("domain", e.to_string()))
    }
}

/// One metric: either a catalog entry with parameters, or DSL expressions
/// for the lapse and the upper triangle of the spatial form.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lapse: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spatial: Option<Vec<String>>,
}

impl MetricSpec {
    pub fn catalog(name: &str, params: &[(&str, f64)]) -> Self {
        Self {
            catalog: Some(name.to_string()),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            ..Default::default()
        }
    }

    pub fn expressions(lapse: &str, spatial: &[&str]) -> Self {
        Self {
            lapse: Some(lapse.to_string()),
            spatial: Some(spatial.iter().map(|s| s.to_string()).collect()),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    Theorem1,
    JoinUltrastatic,
    JoinPair,
}

impl Pipeline {
    pub fn name(&self) -> &'static str {
        match self {
            Pipeline::Theorem1 => "theorem1",
            Pipeline::JoinUltrastatic => "join_ultrastatic",
            Pipeline::JoinPair => "join_pair",
        }
    }

    /// Export window used when the config gives none.
    pub fn default_window(&self) -> TimeInterval {
        match self {
            Pipeline::Theorem1 => TimeInterval::new(-3.0, 3.0),
            Pipeline::JoinUltrastatic => TimeInterval::new(-2.0, 4.0),
            Pipeline::JoinPair => TimeInterval::new(-3.0, 7.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerificationSpec {
    /// Number of sampled causal curves.
    pub samples: usize,
    pub seed: u64,
    /// Cone-containment length tolerance.
    pub tolerance: f64,
    /// Relative tolerance of isometry and ultrastatic checks.
    pub isometry_tolerance: f64,
    /// Integration step of the sampled curves.
    pub step: f64,
}

impl Default for VerificationSpec {
    fn default() -> Self {
        Self {
            samples: 1000,
            seed: 0,
            tolerance: 1e-4,
            isometry_tolerance: 1e-10,
            step: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    pub metric_csv: String,
    pub report: String,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            metric_csv: "metric.csv".into(),
            report: "report.json".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub name: String,
    pub domain: DomainSpec,
    pub g: MetricSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<MetricSpec>,
    pub pipeline: Pipeline,
    /// Export (and, for `theorem1`, surgery) window `[start, end]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
    #[serde(default = "default_time_samples")]
    pub time_samples_per_unit: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub already_gh_after: Option<f64>,
    #[serde(default)]
    pub verification: VerificationSpec,
    #[serde(default)]
    pub outputs: OutputSpec,
}

fn default_time_samples() -> usize {
    8
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: ScenarioConfig = serde_json::from_str(text)
            .map_err(|e| ConfigError::new("", format!("invalid scenario JSON: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn window(&self) -> TimeInterval {
        match self.window {
            Some([a, b]) => TimeInterval::new(a, b),
            None => self.pipeline.default_window(),
        }
    }

    /// Checks everything that can be checked without running a pipeline.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::new(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(ConfigError::new("name", "must be non-empty and use only [A-Za-z0-9_-]"));
        }
        let domain = self.domain.build()?;
        super::catalog::build_metric(&self.g, &domain, "g")?;
        if let Some(h) = &self.h {
            super::catalog::build_metric(h, &domain, "h")?;
        }
        if let Some([a, b]) = self.window {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(ConfigError::new("window", format!("need finite start < end, got [{a}, {b}]")));
            }
            let (need_a, need_b) = match self.pipeline {
                Pipeline::Theorem1 => (-2.0, 0.0),
                Pipeline::JoinUltrastatic => (0.0, 1.0),
                Pipeline::JoinPair => (-1.0, 4.0),
            };
            if !(a <= need_a && b >= need_b) {
                return Err(ConfigError::new(
                    "window",
                    format!("{} windows must contain [{need_a}, {need_b}]", self.pipeline.name()),
                ));
            }
        }
        if self.time_samples_per_unit == 0 || self.time_samples_per_unit > 1024 {
            return Err(ConfigError::new("time_samples_per_unit", "must be in 1..=1024"));
        }
        if let Some(a) = self.already_gh_after {
            if self.pipeline != Pipeline::Theorem1 {
                return Err(ConfigError::new("already_gh_after", "only used by the theorem1 pipeline"));
            }
            let w = self.window();
            if !(a.is_finite() && a > w.start) {
                return Err(ConfigError::new("already_gh_after", format!("{a} must lie after the window start")));
            }
        }
        let v = &self.verification;
        if v.samples == 0 {
            return Err(ConfigError::new("verification.samples", "must be positive"));
        }
        if !(v.tolerance >= 0.0 && v.tolerance.is_finite()) {
            return Err(ConfigError::new("verification.tolerance", "must be finite and non-negative"));
        }
        if !(v.isometry_tolerance >= 0.0 && v.isometry_tolerance.is_finite()) {
            return Err(ConfigError::new("verification.isometry_tolerance", "must be finite and non-negative"));
        }
        if !(v.step > 0.0 && v.step <= 0.1) {
            return Err(ConfigError::new("verification.step", "must be in (0, 0.1]"));
        }
        for (path, file) in [("outputs.metric_csv", &self.outputs.metric_csv), ("outputs.report", &self.outputs.report)] {
            if file.is_empty() || file.contains(['/', '\\']) {
                return Err(ConfigError::new(path, "must be a plain file name"));
            }
        }
        Ok(())
    }
}
