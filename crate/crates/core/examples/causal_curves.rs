//! Extremal causal curves under the three direction policies, in a metric
//! whose light cones open up near `t = 0`.

use causal_surgery::causality::{integrate_causal_curve, DirectionPolicy};
use causal_surgery::geometry::{MetricField, SpatialDomain, SpdField, SymMatrix};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let torus = SpatialDomain::torus([1.0, 2.0], [16, 16])?;
    // a(t) = e^{-|t|}: spatial distances shrink towards t = 0
    let m = MetricField::closed_form(torus.clone(), "shrinking", |_, _| 1.0, |t: f64, _| {
        let a2 = (-2.0 * t.abs()).exp();
        SymMatrix::two(a2, 0.0, 4.0 * a2)
    });
    let reference = SpdField::constant(torus, SymMatrix::two(1.0, 0.0, 4.0));

    let policies = [
        DirectionPolicy::Constant([1.0, 0.0]),
        DirectionPolicy::PiecewiseRandom { seed: 3, segment: 0.25 },
        DirectionPolicy::MaxSpeed(reference.clone()),
    ];
    for policy in &policies {
        let curve = integrate_causal_curve(&m, (-2.0, [0.1, 0.2]), policy, 0.0, 1e-3)?;
        let end = curve.end();
        println!(
            "{:<40} end x = [{:+.4}, {:+.4}], reference length {:.4} (cone radius 2)",
            policy.describe(),
            end.x[0],
            end.x[1],
            curve.reference_length(&reference)?
        );
    }
    Ok(())
}
