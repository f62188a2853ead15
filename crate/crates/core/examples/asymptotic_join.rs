//! Joins the FLRW circle (future) with the static metric `-dt^2 + 4 dx^2`
//! (past) and prints the certificates and a time profile of the result.

use causal_surgery::geometry::{MetricField, SpatialDomain, SpdField, SymMatrix};
use causal_surgery::surgery::asymptotic_join;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let circle = SpatialDomain::circle(std::f64::consts::TAU, 32)?;
    let g = MetricField::closed_form(circle.clone(), "flrw", |_, _| 1.0, |t, _| SymMatrix::one((2.0 * t).exp()));
    let h = MetricField::ultrastatic(SpdField::constant(circle, SymMatrix::one(4.0)));

    let join = asymptotic_join(&g, &h)?;
    for c in &join.certificates {
        println!("{:<26} {:<5} {}", c.name, c.passed, c.detail);
    }
    println!(
        "\nfuture window {} (shift {}), past window {} (shift {})\n",
        join.future_window, join.future_shift, join.past_window, join.past_shift
    );
    println!("{:>6} {:>10} {:>14} {:>14}", "t", "lapse", "g11", "g11(t-3)");
    for k in 0..=20 {
        let t = -3.0 + 0.5 * k as f64;
        let s = join.metric.eval(t, [0.0; 2])?;
        let model = g.eval(t - 3.0, [0.0; 2])?.spatial.upper()[0];
        println!("{t:>6.2} {:>10.6} {:>14.8} {:>14.8}", s.lapse, s.spatial.upper()[0], model);
    }
    Ok(())
}
