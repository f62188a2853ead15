//! Sampling a closed-form metric on a grid and querying it between nodes.

use causal_surgery::geometry::{MetricField, MetricGrid, SpatialDomain, SymMatrix, TimeInterval};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let torus = SpatialDomain::torus([1.0, 1.0], [24, 24])?;
    let tau = std::f64::consts::TAU;
    let exact = MetricField::closed_form(
        torus,
        "wavy",
        move |t, x| 1.0 + 0.2 * (tau * x[0]).sin() * t.cos(),
        move |t, x| SymMatrix::two((0.5 * t).exp(), 0.1 * (tau * x[1]).cos(), 1.0 + 0.3 * (tau * (x[0] + x[1])).sin()),
    );
    for per_unit in [4, 8, 16] {
        let times = TimeInterval::new(-1.0, 1.0).sample_times(2 * per_unit);
        let grid = MetricGrid::sample(&exact, &times)?.into_field("grid");
        let mut worst: f64 = 0.0;
        for k in 0..97 {
            let t = -0.99 + 1.98 * k as f64 / 96.0;
            let x = [0.37 * k as f64 % 1.0, 0.61 * k as f64 % 1.0];
            let a = exact.eval(t, x)?;
            let b = grid.eval(t, x)?;
            worst = worst.max((a.lapse - b.lapse).abs());
            worst = worst.max(a.spatial.matrix().relative_difference(b.spatial.matrix()));
        }
        println!("{per_unit:>3} samples per unit time: max deviation {worst:.3e}");
    }
    Ok(())
}
