use crate::geometry::{GeometryError, MetricField, Point, SpdField};

/// Largest `ref`-speed of a causal velocity at `(t, x)`:
/// `sqrt(lambda * sup_v ref(v, v) / g_t(v, v))`.
pub fn max_coordinate_speed(m: &MetricField, reference: &SpdField, t: f64, x: Point) -> Result<f64, GeometryError> {
    let s = m.eval(t, x)?;
    let r = reference.eval(x)?;
    let (mu, _) = s.spatial.generalized_max_eigen(r.matrix());
    Ok((s.lapse * mu).sqrt())
}

/// Coordinate direction in which causal curves move fastest as measured by
/// `reference`, normalized to `g_t(v, v) = 1`.
pub fn fastest_direction(m: &MetricField, reference: &SpdField, t: f64, x: Point) -> Result<[f64; 2], GeometryError> {
    let s = m.eval(t, x)?;
    let r = reference.eval(x)?;
    Ok(s.spatial.generalized_max_eigen(r.matrix()).1)
}

/// Null velocity `sqrt(lambda / g_t(d, d)) d` along a coordinate direction `d`.
pub fn null_velocity(m: &MetricField, t: f64, x: Point, d: [f64; 2]) -> Result<[f64; 2], GeometryError> {
    let s = m.eval(t, x)?;
    let norm2 = s.spatial.quad(d);
    if !(norm2 > 0.0) {
        return Err(GeometryError::Domain(format!("direction {d:?} has no length")));
    }
    let sigma = (s.lapse / norm2).sqrt();
    Ok([sigma * d[0], sigma * d[1]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{SpatialDomain, SymMatrix};

    #[test]
    fn speeds() {
        let d = SpatialDomain::circle(1.0, 8).unwrap();
        let reference = SpdField::identity(d.clone());
        let ultra = MetricField::ultrastatic(reference.clone());
        assert_eq!(max_coordinate_speed(&ultra, &reference, 0.0, [0.0; 2]).unwrap(), 1.0);

        let flrw = MetricField::closed_form(d.clone(), "flrw", |_, _| 1.0, |t, _| SymMatrix::one((2.0 * t).exp()));
        let v = max_coordinate_speed(&flrw, &reference, 1.0, [0.0; 2]).unwrap();
        assert!((v - (-1.0f64).exp()).abs() < 1e-15);

        let fast = MetricField::closed_form(d, "lapse4", |_, _| 4.0, |_, _| SymMatrix::one(1.0));
        assert_eq!(max_coordinate_speed(&fast, &reference, 3.0, [0.5, 0.0]).unwrap(), 2.0);
    }

    #[test]
    fn fastest_direction_is_the_soft_axis() {
        let d = SpatialDomain::torus([1.0, 1.0], [8, 8]).unwrap();
        let m = MetricField::closed_form(d.clone(), "aniso", |_, _| 1.0, |_, _| SymMatrix::two(4.0, 0.0, 1.0));
        let v = fastest_direction(&m, &SpdField::identity(d), 0.0, [0.0; 2]).unwrap();
        assert!(v[0].abs() < 1e-15 && (v[1].abs() - 1.0).abs() < 1e-15);
    }
}
