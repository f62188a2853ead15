use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use super::catalog::build_metric;
use super::config::{ConfigError, Pipeline, ScenarioConfig};
use super::csv::{export_fields, read_dump, write_atomic, ExportError, ExportedFile, FormatError};
use crate::causality::{
    find_ultrastatic_violation, isometry_deviation, verify_cone_containment, verify_global_hyperbolicity,
    ConeContainmentOptions, ConeWitness,
};
use crate::geometry::{GeometryError, MetricField, ScalarField, SpdField, TimeInterval};
use crate::surgery::{
    asymptotic_join_with, completeness_factor, make_globally_hyperbolic_with, ultrastatic_join, Certificate,
    ConeSurgeryOptions, JoinOptions, SurgeryError,
};

pub const REPORT_SCHEMA_VERSION: u32 = 1;
/// Slack of the pointwise cone inequality, relative to the reference scale.
pub const CONE_INEQUALITY_SLACK: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("dump format error: {0}")]
    Format(#[from] FormatError),
    #[error("pipeline error: {0}")]
    Pipeline(#[from] SurgeryError),
    #[error("evaluation error: {0}")]
    Geometry(#[from] GeometryError),
    #[error("{0}")]
    Export(#[from] ExportError),
    #[error("i/o error: {0}")]
    Io(String),
}

impl RunError {
    /// 1 for a failed certificate inside a pipeline, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        let mut e = match self {
            RunError::Pipeline(e) => e,
            _ => return 2,
        };
        while let SurgeryError::Stage { source, .. } = e {
            e = source;
        }
        match e {
            SurgeryError::Certificate { .. } => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<ConeWitness>,
}

impl CheckResult {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            passed,
            detail,
            witnesses: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Timing {
    pub stages: Vec<(String, f64)>,
    pub total_seconds: f64,
}

/// Result of `build` or `verify`. Everything except `timing` is a
/// deterministic function of the config and the seed.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: String,
    pub scenario: String,
    pub pipeline: String,
    pub seed: u64,
    pub stages: Vec<String>,
    pub certificates: Vec<Certificate>,
    pub checks: Vec<CheckResult>,
    pub notes: Vec<String>,
    pub outputs: Vec<ExportedFile>,
    pub passed: bool,
    pub timing: Timing,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn summary(&self) -> String {
        let mut out = format!(
            "{} {} ({}): {}\n",
            self.command,
            self.scenario,
            self.pipeline,
            if self.passed { "PASS" } else { "FAIL" }
        );
        for c in &self.certificates {
            out.push_str(&format!("  certificate {:<26} {}  {}\n", c.name, verdict(c.passed), c.detail));
        }
        for c in &self.checks {
            out.push_str(&format!("  check       {:<26} {}  {}\n", c.name, verdict(c.passed), c.detail));
        }
        for n in &self.notes {
            out.push_str(&format!("  note: {n}\n"));
        }
        out
    }
}

fn verdict(p: bool) -> &'static str {
    if p {
        "pass"
    } else {
        "FAIL"
    }
}

struct Clock {
    start: Instant,
    last: Instant,
    stages: Vec<(String, f64)>,
    names: Vec<String>,
}

impl Clock {
    fn new() -> Self {
        let now = Instant::now();
        Self {
            start: now,
            last: now,
            stages: Vec::new(),
            names: Vec::new(),
        }
    }

    fn lap(&mut self, name: &str) {
        let now = Instant::now();
        self.stages.push((name.to_string(), (now - self.last).as_secs_f64()));
        self.names.push(name.to_string());
        self.last = now;
    }

    fn finish(self) -> (Vec<String>, Timing) {
        let total = self.start.elapsed().as_secs_f64();
        (
            self.names,
            Timing {
                stages: self.stages,
                total_seconds: total,
            },
        )
    }
}

/// `n + 1` equally spaced times over `window`, `n = ceil(len * per_unit)`.
pub fn sample_times(window: TimeInterval, per_unit: usize) -> Vec<f64> {
    let len = window.end - window.start;
    let n = (len * per_unit as f64).ceil().max(1.0) as usize;
    (0..=n)
        .map(|k| if k == n { window.end } else { window.start + len * k as f64 / n as f64 })
        .collect()
}

/// Output of a pipeline, before any file is written.
#[derive(Debug, Clone)]
pub struct Built {
    pub metric: MetricField,
    /// Stretch factor (`theorem1` only).
    pub factor: Option<ScalarField>,
    pub certificates: Vec<Certificate>,
    pub notes: Vec<String>,
}

/// The input metrics of a scenario.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub g: MetricField,
    pub h: MetricField,
    /// True when `h` is absent or equal to `g`.
    pub trivial_pair: bool,
}

pub fn inputs(cfg: &ScenarioConfig) -> Result<Inputs, ConfigError> {
    let domain = cfg.domain.build()?;
    let g = build_metric(&cfg.g, &domain, "g")?;
    let (h, trivial_pair) = match &cfg.h {
        Some(spec) => (build_metric(spec, &domain, "h")?, *spec == cfg.g),
        None => (g.clone(), true),
    };
    Ok(Inputs { g, h, trivial_pair })
}

fn join_options(cfg: &ScenarioConfig) -> JoinOptions {
    JoinOptions {
        isometry_tolerance: cfg.verification.isometry_tolerance,
        ..JoinOptions::default()
    }
}

/// Runs the selected pipeline in memory.
pub fn build_scenario(cfg: &ScenarioConfig) -> Result<Built, RunError> {
    cfg.validate()?;
    let inp = inputs(cfg)?;
    let mut notes = Vec::new();
    match cfg.pipeline {
        Pipeline::Theorem1 => {
            let out = make_globally_hyperbolic_with(
                &inp.g,
                &ConeSurgeryOptions {
                    already_gh_after: cfg.already_gh_after,
                    window: Some(cfg.window()),
                    ..ConeSurgeryOptions::default()
                },
            )?;
            Ok(Built {
                metric: out.metric,
                factor: Some(out.factor),
                certificates: Vec::new(),
                notes,
            })
        }
        Pipeline::JoinUltrastatic => {
            let (art, parts) = ultrastatic_join(&inp.g, &join_options(cfg))?;
            if parts.completeness != 1.0 {
                notes.push(format!("completeness factor lowered to {:.6e}", parts.completeness));
            }
            Ok(Built {
                metric: art.metric,
                factor: None,
                certificates: art.certificates,
                notes,
            })
        }
        Pipeline::JoinPair => {
            if inp.trivial_pair {
                notes.push("trivial join: h equals g".into());
            }
            let art = asymptotic_join_with(&inp.g, &inp.h, &join_options(cfg))?;
            notes.push("future window [4, inf) equals g(t - 3); past window (-inf, -1] equals h".into());
            Ok(Built {
                metric: art.metric,
                factor: None,
                certificates: art.certificates,
                notes,
            })
        }
    }
}

fn times_in(times: &[f64], w: TimeInterval) -> Vec<f64> {
    times.iter().copied().filter(|&t| w.contains(t)).collect()
}

fn isometry_check(
    name: &str,
    m: &MetricField,
    model: &MetricField,
    times: &[f64],
    window: TimeInterval,
    shift: f64,
    tol: f64,
) -> Result<CheckResult, GeometryError> {
    let ts = times_in(times, window);
    if ts.is_empty() {
        return Ok(CheckResult::new(name, false, format!("no samples in {window}")));
    }
    let dev = isometry_deviation(m, model, &ts, shift)?;
    Ok(CheckResult::new(
        name,
        dev <= tol,
        format!("max relative deviation {dev:.3e} over {} times in {window} (tol {tol:e})", ts.len()),
    ))
}

fn ultrastatic_check(name: &str, m: &MetricField, times: &[f64], window: TimeInterval, tol: f64) -> CheckResult {
    let ts = times_in(times, window);
    if ts.is_empty() {
        return CheckResult::new(name, false, format!("no samples in {window}"));
    }
    match find_ultrastatic_violation(m, &ts, tol) {
        None => CheckResult::new(name, true, format!("{} times in {window} (tol {tol:e})", ts.len())),
        Some(v) => CheckResult::new(name, false, format!("t = {}, x = {:?}: {}", v.t, v.x, v.reason)),
    }
}

fn gh_check(m: &MetricField, reference: &SpdField, window: TimeInterval, spu: usize) -> Result<CheckResult, GeometryError> {
    let gh = verify_global_hyperbolicity(m, reference, window, spu)?;
    Ok(CheckResult::new(
        "global_hyperbolicity",
        gh.passed,
        format!(
            "sup causal speed {:.6} over {} slabs of {window}, reachable radius {:.6}",
            gh.max_speed(),
            gh.slabs.len(),
            gh.reachable_radius
        ),
    ))
}

/// Checks shared by `build` (on the in-memory metric) and `verify` (on a
/// re-imported dump): `times` are the export times.
pub fn check_suite(cfg: &ScenarioConfig, m: &MetricField, times: &[f64]) -> Result<Vec<CheckResult>, RunError> {
    let inp = inputs(cfg)?;
    let window = cfg.window().intersect(&m.window());
    let tol = cfg.verification.isometry_tolerance;
    let spu = cfg.time_samples_per_unit.max(4);
    let mut checks = Vec::new();
    match cfg.pipeline {
        Pipeline::Theorem1 => {
            let g0 = inp.g.slice(0.0);
            let j = completeness_factor(m.domain(), &g0);
            let reference = g0.conformal(&j);
            let mut worst = f64::INFINITY;
            let mut at = (0.0, [0.0; 2]);
            for &t in &times_in(times, window) {
                for x in m.domain().grid_points() {
                    let s = m.eval(t, x)?;
                    let r = reference.eval(x)?.matrix().scale(s.lapse.max(1.0));
                    let gap = (*s.spatial.matrix() - r).min_eigenvalue() / r.max_abs();
                    if gap < worst {
                        worst = gap;
                        at = (t, x);
                    }
                }
            }
            checks.push(CheckResult::new(
                "cone_inequality",
                worst >= -CONE_INEQUALITY_SLACK,
                format!(
                    "min eigenvalue of f g_t - max(1, lambda) j g_0 relative to scale: {worst:.3e} at t = {}, x = {:?}",
                    at.0, at.1
                ),
            ));
            let v = &cfg.verification;
            let report = verify_cone_containment(
                m,
                &j,
                &g0,
                &ConeContainmentOptions {
                    n_samples: v.samples,
                    seed: v.seed,
                    tolerance: v.tolerance,
                    step: v.step,
                    ..ConeContainmentOptions::default()
                },
            )?;
            let mut c = CheckResult::new(
                "cone_containment",
                report.passed,
                format!(
                    "{} curves from t = -2 to t = 0: worst margin {:.3e} (tol {:e}), max speed ratio {:.6}",
                    report.samples, report.worst_margin, v.tolerance, report.max_speed_ratio
                ),
            );
            c.witnesses = report.witnesses;
            checks.push(c);
            checks.push(gh_check(m, &reference, window, spu)?);
        }
        Pipeline::JoinUltrastatic => {
            checks.push(isometry_check("future_isometry", m, &inp.g, times, TimeInterval::from(1.0), 0.0, tol)?);
            checks.push(ultrastatic_check("past_ultrastatic", m, times, TimeInterval::until(0.0), tol));
            checks.push(gh_check(m, &m.slice(window.start), window, spu)?);
        }
        Pipeline::JoinPair => {
            checks.push(isometry_check("future_isometry", m, &inp.g, times, TimeInterval::from(4.0), -3.0, tol)?);
            checks.push(isometry_check("past_isometry", m, &inp.h, times, TimeInterval::until(-1.0), 0.0, tol)?);
            checks.push(ultrastatic_check("ultrastatic_past_tail", m, times, TimeInterval::new(0.0, 1.0), tol));
            checks.push(ultrastatic_check("ultrastatic_future_tail", m, times, TimeInterval::new(2.0, 3.0), tol));
            checks.push(gh_check(m, &m.slice(window.start), window, spu)?);
        }
    }
    Ok(checks)
}

fn report(
    command: &str,
    cfg: &ScenarioConfig,
    clock: Clock,
    certificates: Vec<Certificate>,
    checks: Vec<CheckResult>,
    notes: Vec<String>,
    outputs: Vec<ExportedFile>,
) -> RunReport {
    let passed = certificates.iter().all(|c| c.passed) && checks.iter().all(|c| c.passed);
    let (stages, timing) = clock.finish();
    RunReport {
        schema_version: REPORT_SCHEMA_VERSION,
        command: command.into(),
        scenario: cfg.name.clone(),
        pipeline: cfg.pipeline.name().into(),
        seed: cfg.verification.seed,
        stages,
        certificates,
        checks,
        notes,
        outputs,
        passed,
        timing,
    }
}

fn create_dir(dir: &Path) -> Result<(), RunError> {
    std::fs::create_dir_all(dir).map_err(|e| RunError::Io(format!("cannot create {}: {e}", dir.display())))
}

fn write_report(r: &RunReport, cfg: &ScenarioConfig, dir: &Path) -> Result<(), RunError> {
    let path = dir.join(&cfg.outputs.report);
    write_atomic(&path, r.to_json().as_bytes()).map_err(|e| RunError::Io(format!("cannot write {}: {e}", path.display())))
}

/// Builds, exports and checks a scenario; writes the dump and the report
/// into `out_dir`.
pub fn run_build(cfg: &ScenarioConfig, out_dir: &Path) -> Result<RunReport, RunError> {
    let mut clock = Clock::new();
    let built = build_scenario(cfg)?;
    clock.lap(cfg.pipeline.name());
    create_dir(out_dir)?;
    let times = sample_times(cfg.window(), cfg.time_samples_per_unit);
    let file = export_fields(&built.metric, built.factor.as_ref(), &times, &out_dir.join(&cfg.outputs.metric_csv))?;
    clock.lap("export");
    let checks = check_suite(cfg, &built.metric, &times)?;
    clock.lap("verify");
    let mut outputs = vec![file];
    outputs.push(ExportedFile {
        kind: "report".into(),
        file: cfg.outputs.report.clone(),
        rows: 0,
        columns: Vec::new(),
    });
    let r = report("build", cfg, clock, built.certificates, checks, built.notes, outputs);
    write_report(&r, cfg, out_dir)?;
    Ok(r)
}

/// Re-imports a dump over the config's domain and runs the check suite on
/// it. Writes the report into `out_dir` if given.
pub fn run_verify(cfg: &ScenarioConfig, dump: &Path, out_dir: Option<&Path>) -> Result<RunReport, RunError> {
    cfg.validate()?;
    let mut clock = Clock::new();
    let domain = cfg.domain.build()?;
    let parsed = read_dump(dump, &domain)?;
    let times = parsed.grid.times().to_vec();
    let m = parsed.grid.into_field(format!("dump({})", dump.display()));
    clock.lap("import");
    let checks = check_suite(cfg, &m, &times)?;
    clock.lap("verify");
    let r = report("verify", cfg, clock, Vec::new(), checks, Vec::new(), Vec::new());
    if let Some(dir) = out_dir {
        create_dir(dir)?;
        write_report(&r, cfg, dir)?;
    }
    Ok(r)
}

/// Writes the pipeline output (or the raw input `g` with `input_only`) as a
/// dump into `out_dir`, without running any check.
pub fn run_export(cfg: &ScenarioConfig, out_dir: &Path, input_only: bool) -> Result<ExportedFile, RunError> {
    cfg.validate()?;
    let times = sample_times(cfg.window(), cfg.time_samples_per_unit);
    create_dir(out_dir)?;
    let path = out_dir.join(&cfg.outputs.metric_csv);
    if input_only {
        return Ok(export_fields(&inputs(cfg)?.g, None, &times, &path)?);
    }
    let built = build_scenario(cfg)?;
    Ok(export_fields(&built.metric, built.factor.as_ref(), &times, &path)?)
}
