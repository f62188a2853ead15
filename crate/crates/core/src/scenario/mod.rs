//! Scenario files, pipelines, field dumps and run reports: the layer
//! behind the `causal-surgery` binary.
//!
//! A scenario is a JSON document:
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "name": "flrw",
//!   "domain": { "dim": 1, "circumferences": ["2*pi"], "resolution": [256] },
//!   "g": { "catalog": "flrw_exp", "params": { "rate": 1.0 } },
//!   "pipeline": "theorem1",
//!   "window": [-3.0, 3.0],
//!   "verification": { "samples": 1000, "seed": 7 }
//! }
//! ```
//!
//! Metrics are catalog entries (see [`catalog`]) or expressions:
//! `{ "lapse": "1", "spatial": ["exp(2*t)"] }`, with the upper triangle
//! `g11, g12, g22` on 2-dimensional domains.

pub mod catalog;
mod config;
pub mod csv;
mod demo;
mod run;

pub use config::{
    ConfigError, DomainSpec, MetricSpec, OutputSpec, Pipeline, Scalar, ScenarioConfig, VerificationSpec, SCHEMA_VERSION,
};
pub use demo::{demo_config, demo_configs, DEMO_NAMES};
pub use run::{
    build_scenario, check_suite, inputs, run_build, run_export, run_verify, sample_times, Built, CheckResult, Inputs,
    RunError, RunReport, Timing, CONE_INEQUALITY_SLACK, REPORT_SCHEMA_VERSION,
};
