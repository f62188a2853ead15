//! The built-in demo scenarios.

use super::config::{DomainSpec, MetricSpec, OutputSpec, Pipeline, Scalar, ScenarioConfig, VerificationSpec, SCHEMA_VERSION};

pub const DEMO_NAMES: [&str; 4] = ["theorem1_flrw", "join_ultrastatic_flrw", "join_pair_flrw_ultrastatic", "join_pair_torus"];

fn circle(resolution: usize) -> DomainSpec {
    DomainSpec {
        dim: 1,
        circumferences: vec![Scalar::Expression("2*pi".into())],
        resolution: vec![resolution],
    }
}

fn scenario(name: &str, domain: DomainSpec, g: MetricSpec, h: Option<MetricSpec>, pipeline: Pipeline) -> ScenarioConfig {
    ScenarioConfig {
        schema_version: SCHEMA_VERSION,
        name: name.into(),
        domain,
        g,
        h,
        pipeline,
        window: None,
        time_samples_per_unit: 8,
        already_gh_after: None,
        verification: VerificationSpec::default(),
        outputs: OutputSpec::default(),
    }
}

/// Configuration of a demo scenario by name.
pub fn demo_config(name: &str) -> Option<ScenarioConfig> {
    let flrw = MetricSpec::catalog("flrw_exp", &[("rate", 1.0)]);
    Some(match name {
        // d = 1 circle, a(t) = e^t, cone surgery on [-3, 3]
        "theorem1_flrw" => scenario(name, circle(256), flrw, None, Pipeline::Theorem1),
        "join_ultrastatic_flrw" => scenario(name, circle(64), flrw, None, Pipeline::JoinUltrastatic),
        "join_pair_flrw_ultrastatic" => scenario(
            name,
            circle(64),
            flrw,
            Some(MetricSpec::catalog("ultrastatic", &[("scale", 4.0)])),
            Pipeline::JoinPair,
        ),
        "join_pair_torus" => scenario(
            name,
            DomainSpec {
                dim: 2,
                circumferences: vec![Scalar::Number(1.0), Scalar::Expression("sqrt(2)".into())],
                resolution: vec![12, 12],
            },
            MetricSpec::catalog("anisotropic_diag", &[("p1", 1.0), ("p2", 0.5)]),
            Some(MetricSpec::expressions("1", &["1 + t^2", "0.1 * sin(x1) / (1 + t^2)", "2"])),
            Pipeline::JoinPair,
        ),
        _ => return None,
    })
}

pub fn demo_configs() -> Vec<ScenarioConfig> {
    DEMO_NAMES.iter().map(|n| demo_config(n).expect("demo names are known")).collect()
}
