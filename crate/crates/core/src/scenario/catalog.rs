//! Named metric families and DSL-backed metrics.
//!
//! | name               | parameters (default, range)                   | metric                                  |
//! |--------------------|-----------------------------------------------|-----------------------------------------|
//! | `ultrastatic`      | `scale` (1, (0, 1e6])                         | `-dt^2 + scale I`                       |
//! | `flrw_exp`         | `rate` (1, [-5, 5])                           | `-dt^2 + e^{2 rate t} I`                |
//! | `flrw_poly`        | `power` (1, [-4, 4])                          | `-dt^2 + (1 + t^2)^power I`             |
//! | `anisotropic_diag` | `p1`, `p2` (1, 0.5, [-5, 5]); `d = 2` only    | `-dt^2 + diag(e^{2 p1 t}, e^{2 p2 t})`  |
//!
//! Every entry also takes `lapse` (1, (0, 1e6]), a constant lapse.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::config::{ConfigError, MetricSpec};
use crate::dsl::{eval_expression, parse_expression, Bindings, Expr};
use crate::geometry::{GeometryError, MetricField, Representation, SpatialDomain, SymMatrix, TimeInterval};

pub const CATALOG: [&str; 4] = ["ultrastatic", "flrw_exp", "flrw_poly", "anisotropic_diag"];

struct Params<'a> {
    path: String,
    given: &'a BTreeMap<String, f64>,
    allowed: Vec<&'static str>,
}

impl Params<'_> {
    fn get(&mut self, name: &'static str, default: f64, lo: f64, hi: f64, open_lo: bool) -> Result<f64, ConfigError> {
        self.allowed.push(name);
        let v = self.given.get(name).copied().unwrap_or(default);
        let ok = v.is_finite() && v <= hi && if open_lo { v > lo } else { v >= lo };
        if !ok {
            let bracket = if open_lo { "(" } else { "[" };
            return Err(ConfigError::new(
                format!("{}.params.{name}", self.path),
                format!("{v} outside {bracket}{lo}, {hi}]"),
            ));
        }
        Ok(v)
    }

    fn finish(self) -> Result<(), ConfigError> {
        for k in self.given.keys() {
            if !self.allowed.contains(&k.as_str()) {
                return Err(ConfigError::new(format!("{}.params.{k}", self.path), "unknown parameter"));
            }
        }
        Ok(())
    }
}

/// Builds the metric described by `spec` on `domain`; `path` prefixes any
/// error location.
pub fn build_metric(spec: &MetricSpec, domain: &SpatialDomain, path: &str) -> Result<MetricField, ConfigError> {
    match (&spec.catalog, &spec.lapse, &spec.spatial) {
        (Some(name), None, None) => catalog_metric(name, &spec.params, domain, path),
        (None, Some(lapse), Some(spatial)) => {
            if !spec.params.is_empty() {
                return Err(ConfigError::new(format!("{path}.params"), "only catalog metrics take parameters"));
            }
            expression_metric(lapse, spatial, domain, path)
        }
        _ => Err(ConfigError::new(
            path,
            "give either `catalog` (with optional `params`) or both `lapse` and `spatial`",
        )),
    }
}

fn catalog_metric(
    name: &str,
    given: &BTreeMap<String, f64>,
    domain: &SpatialDomain,
    path: &str,
) -> Result<MetricField, ConfigError> {
    let mut p = Params {
        path: path.to_string(),
        given,
        allowed: Vec::new(),
    };
    let lapse = p.get("lapse", 1.0, 0.0, 1e6, true)?;
    let dim = domain.dim();
    let d = domain.clone();
    let m = match name {
        "ultrastatic" => {
            let s = p.get("scale", 1.0, 0.0, 1e6, true)?;
            MetricField::closed_form(d, format!("ultrastatic({s})"), move |_, _| lapse, move |_, _| SymMatrix::scalar(dim, s))
        }
        "flrw_exp" => {
            let r = p.get("rate", 1.0, -5.0, 5.0, false)?;
            MetricField::closed_form(d, format!("flrw_exp({r})"), move |_, _| lapse, move |t, _| {
                SymMatrix::scalar(dim, (2.0 * r * t).exp())
            })
        }
        "flrw_poly" => {
            let q = p.get("power", 1.0, -4.0, 4.0, false)?;
            MetricField::closed_form(d, format!("flrw_poly({q})"), move |_, _| lapse, move |t, _| {
                SymMatrix::scalar(dim, (1.0 + t * t).powf(q))
            })
        }
        "anisotropic_diag" => {
            if dim != 2 {
                return Err(ConfigError::new(format!("{path}.catalog"), "anisotropic_diag needs a 2-dimensional domain"));
            }
            let p1 = p.get("p1", 1.0, -5.0, 5.0, false)?;
            let p2 = p.get("p2", 0.5, -5.0, 5.0, false)?;
            MetricField::closed_form(d, format!("anisotropic_diag({p1}, {p2})"), move |_, _| lapse, move |t, _| {
                SymMatrix::two((2.0 * p1 * t).exp(), 0.0, (2.0 * p2 * t).exp())
            })
        }
        other => {
            return Err(ConfigError::new(
                format!("{path}.catalog"),
                format!("unknown catalog entry `{other}`; expected one of {}", CATALOG.join(", ")),
            ))
        }
    };
    p.finish()?;
    Ok(m)
}

fn parse(text: &str, path: String) -> Result<Expr, ConfigError> {
    parse_expression(text).map_err(|e| ConfigError::new(path, e.to_string()))
}

fn expression_metric(lapse: &str, spatial: &[String], domain: &SpatialDomain, path: &str) -> Result<MetricField, ConfigError> {
    let dim = domain.dim();
    let expected = dim * (dim + 1) / 2;
    if spatial.len() != expected {
        return Err(ConfigError::new(
            format!("{path}.spatial"),
            format!("a {dim}-dimensional domain needs {expected} upper-triangle entries, got {}", spatial.len()),
        ));
    }
    let lapse_expr = parse(lapse, format!("{path}.lapse"))?;
    let entries = spatial
        .iter()
        .enumerate()
        .map(|(i, s)| parse(s, format!("{path}.spatial[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let exprs = Arc::new((lapse_expr, entries));
    let label = format!("dsl({lapse}; {})", spatial.join(", "));
    Ok(MetricField::from_fn(
        domain.clone(),
        TimeInterval::ALL,
        Representation::ClosedForm,
        label,
        move |t, x| {
            let b = Bindings::event(t, x);
            let data = |e: crate::dsl::EvalError| GeometryError::Data {
                t,
                x,
                message: e.to_string(),
            };
            let lapse = eval_expression(&exprs.0, &b).map_err(data)?;
            let mut upper = [0.0; 3];
            for (k, e) in exprs.1.iter().enumerate() {
                upper[k] = eval_expression(e, &b).map_err(data)?;
            }
            Ok((lapse, SymMatrix::from_upper(dim, &upper[..exprs.1.len()])?))
        },
    ))
}
