//! Convex interpolation between two static metrics on the flat 2-torus,
//! the comparison bounds on the two covering regions, and causal diamonds
//! in the interpolated metric.

use causal_surgery::causality::{causal_diamond_extent, verify_convex_bound, Comparison, Event};
use causal_surgery::geometry::{MetricField, Representation, SpatialDomain, SpdField, SymMatrix, TimeInterval};
use causal_surgery::surgery::interpolate_ultrastatic;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let torus = SpatialDomain::torus([1.0, 1.0], [16, 16])?;
    let k0 = SpdField::identity(torus.clone());
    let k1 = SpdField::from_fn(torus.clone(), Representation::ClosedForm, "bumpy", |x| {
        let s = 2.0 + 0.5 * (std::f64::consts::TAU * x[0]).sin();
        Ok(SymMatrix::two(s, 0.2, 1.5))
    });
    let u0 = MetricField::ultrastatic(k0.clone());
    let u1 = MetricField::ultrastatic(k1.clone());

    let join = interpolate_ultrastatic(&u0, &u1)?;
    for c in &join.certificates {
        println!("{:<18} {:<5} {}", c.name, c.passed, c.detail);
    }
    let times = TimeInterval::new(-0.5, 1.5).sample_times(200);
    let bound = verify_convex_bound(&k0, &k1, &times, 0.0)?;
    println!("\nconvex bound: {bound:?}\n");

    let covering = Comparison::Covering { k0, k1 };
    for (p, q) in [
        (Event::new(-1.0, [0.0, 0.0]), Event::new(0.5, [0.2, 0.1])),
        (Event::new(0.5, [0.0, 0.0]), Event::new(2.0, [0.5, 0.5])),
        (Event::new(0.0, [0.3, 0.3]), Event::new(1.0, [0.3, 0.4])),
    ] {
        let d = causal_diamond_extent(&join.metric, p, q, 16, &covering)?;
        println!(
            "diamond t in [{}, {}]: comparison {:?}, extent {:.4}, bounded {}",
            p.t, q.t, d.comparison, d.extent, d.bounded
        );
    }
    Ok(())
}
