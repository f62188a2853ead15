//! Cone surgery on the expanding FLRW circle `-dt^2 + e^{2t} dx^2`.
//!
//! Prints the lower bound, the smooth majorant and the resulting speed of
//! light in the reference metric, then samples causal curves.

use causal_surgery::causality::{max_coordinate_speed, verify_cone_containment, ConeContainmentOptions};
use causal_surgery::geometry::{MetricField, SpatialDomain, SymMatrix};
use causal_surgery::surgery::make_globally_hyperbolic;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let circle = SpatialDomain::circle(std::f64::consts::TAU, 64)?;
    let flrw = MetricField::closed_form(circle, "flrw", |_, _| 1.0, |t, _| SymMatrix::one((2.0 * t).exp()));

    let out = make_globally_hyperbolic(&flrw, None)?;
    let reference = out.reference();
    println!("{:>6} {:>12} {:>12} {:>12} {:>12}", "t", "lower", "f", "speed in", "speed out");
    for k in 0..=12 {
        let t = -3.0 + 0.5 * k as f64;
        let x = [0.0, 0.0];
        println!(
            "{t:>6.2} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
            out.lower.eval(t, x)?,
            out.factor.eval(t, x)?,
            max_coordinate_speed(&flrw, &reference, t, x)?,
            max_coordinate_speed(&out.metric, &reference, t, x)?,
        );
    }

    let opts = ConeContainmentOptions {
        n_samples: 300,
        seed: 11,
        ..Default::default()
    };
    let before = verify_cone_containment(&flrw, &out.completeness, &out.g0, &opts)?;
    let after = verify_cone_containment(&out.metric, &out.completeness, &out.g0, &opts)?;
    println!("\ncurves from t = -2 to t = 0, allowed reference length 2");
    println!("  input : passed = {}, worst margin {:+.4}", before.passed, before.worst_margin);
    println!("  output: passed = {}, worst margin {:+.4}", after.passed, after.worst_margin);
    if let Some(w) = before.witnesses.first() {
        println!("  input witness: {} from x = {:.3}, length {:.4}", w.policy, w.start_x[0], w.reference_length);
    }
    Ok(())
}
