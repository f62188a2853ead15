//! Grid-sampled metrics.
//!
//! Space is interpolated with periodic cubic B-splines (C2) per axis; time
//! with piecewise cubic Hermite polynomials whose knot slopes are the
//! derivatives of the local three-point parabola (C1). Queries landing
//! exactly on a stored node return the stored sample unchanged.

use std::sync::Arc;

use super::{GeometryError, MetricField, Point, Representation, SpatialDomain, SymMatrix, TimeInterval};

/// Number of stored components per sample: lapse plus the upper triangle.
fn components(dim: usize) -> usize {
    1 + dim * (dim + 1) / 2
}

/// Samples of a metric on `times x domain grid`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricGrid {
    domain: SpatialDomain,
    times: Vec<f64>,
    /// `values[(k * npts + p) * ncomp + c]`
    values: Vec<f64>,
}

impl MetricGrid {
    /// `values` is laid out time-major, then grid point (first axis
    /// slowest), then component `[lapse, upper triangle...]`.
    pub fn new(domain: SpatialDomain, times: Vec<f64>, values: Vec<f64>) -> Result<Self, GeometryError> {
        if times.is_empty() {
            return Err(GeometryError::Shape("grid needs at least one time sample".into()));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(GeometryError::Shape("grid times must be strictly increasing".into()));
        }
        let expected = times.len() * domain.num_points() * components(domain.dim());
        if values.len() != expected {
            return Err(GeometryError::Shape(format!(
                "expected {expected} grid values, got {}",
                values.len()
            )));
        }
        Ok(Self { domain, times, values })
    }

    /// Samples `m` at `times` on every grid node.
    pub fn sample(m: &MetricField, times: &[f64]) -> Result<Self, GeometryError> {
        let domain = m.domain().clone();
        let points = domain.grid_points();
        let mut values = Vec::with_capacity(times.len() * points.len() * components(domain.dim()));
        for &t in times {
            for &x in &points {
                let s = m.eval(t, x)?;
                values.push(s.lapse);
                values.extend(s.spatial.upper());
            }
        }
        Self::new(domain, times.to_vec(), values)
    }

    pub fn domain(&self) -> &SpatialDomain {
        &self.domain
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn num_components(&self) -> usize {
        components(self.domain.dim())
    }

    /// Stored components at time index `k`, grid point index `p`.
    pub fn sample_at(&self, k: usize, p: usize) -> &[f64] {
        let nc = self.num_components();
        let start = (k * self.domain.num_points() + p) * nc;
        &self.values[start..start + nc]
    }

    /// Interpolating field over `[t_first, t_last]`.
    pub fn into_field(self, label: impl Into<String>) -> MetricField {
        let window = TimeInterval::new(self.times[0], *self.times.last().unwrap());
        let domain = self.domain.clone();
        let interp = Arc::new(GridInterpolator::new(self));
        MetricField::from_fn(domain, window, Representation::Grid, label, move |t, x| interp.eval(t, x))
    }
}

struct GridInterpolator {
    grid: MetricGrid,
    /// B-spline coefficients, same layout as `grid.values`.
    coeffs: Vec<f64>,
}

impl GridInterpolator {
    fn new(grid: MetricGrid) -> Self {
        let d = &grid.domain;
        let nc = grid.num_components();
        let (n1, n2) = (d.resolution()[0], if d.dim() == 2 { d.resolution()[1] } else { 1 });
        let mut coeffs = grid.values.clone();
        let np = n1 * n2;
        for k in 0..grid.times.len() {
            for c in 0..nc {
                let at = |p: usize| (k * np + p) * nc + c;
                // along axis 2
                if d.dim() == 2 {
                    for i in 0..n1 {
                        let line: Vec<f64> = (0..n2).map(|j| coeffs[at(i * n2 + j)]).collect();
                        let out = periodic_bspline_prefilter(&line);
                        for j in 0..n2 {
                            coeffs[at(i * n2 + j)] = out[j];
                        }
                    }
                }
                // along axis 1
                for j in 0..n2 {
                    let line: Vec<f64> = (0..n1).map(|i| coeffs[at(i * n2 + j)]).collect();
                    let out = periodic_bspline_prefilter(&line);
                    for i in 0..n1 {
                        coeffs[at(i * n2 + j)] = out[i];
                    }
                }
            }
        }
        Self { grid, coeffs }
    }

    /// Component vector at time index `k` and spatial point `x`.
    fn spatial(&self, k: usize, x: Point, node: Option<(usize, usize)>, out: &mut [f64]) {
        let d = &self.grid.domain;
        let nc = self.grid.num_components();
        let n1 = d.resolution()[0];
        let n2 = if d.dim() == 2 { d.resolution()[1] } else { 1 };
        let np = n1 * n2;
        if let Some((i, j)) = node {
            let p = i * n2 + if d.dim() == 2 { j } else { 0 };
            out.copy_from_slice(self.grid.sample_at(k, p));
            return;
        }
        out.iter_mut().for_each(|v| *v = 0.0);
        let (i0, w1) = bspline_weights(x[0] / d.spacing(0));
        let (j0, w2) = if d.dim() == 2 {
            bspline_weights(x[1] / d.spacing(1))
        } else {
            (0, [1.0, 0.0, 0.0, 0.0])
        };
        let span2 = if d.dim() == 2 { 4 } else { 1 };
        for (a, wa) in w1.iter().enumerate() {
            let i = (i0 + a as i64 - 1).rem_euclid(n1 as i64) as usize;
            for (b, wb) in w2.iter().take(span2).enumerate() {
                let j = if d.dim() == 2 {
                    (j0 + b as i64 - 1).rem_euclid(n2 as i64) as usize
                } else {
                    0
                };
                let w = wa * wb;
                let base = (k * np + i * n2 + j) * nc;
                for c in 0..nc {
                    out[c] += w * self.coeffs[base + c];
                }
            }
        }
    }

    fn eval(&self, t: f64, x: Point) -> Result<(f64, SymMatrix), GeometryError> {
        let times = &self.grid.times;
        let nc = self.grid.num_components();
        let dim = self.grid.domain.dim();
        let node = self.grid.domain.exact_node(x);
        let mut out = vec![0.0; nc];
        match times.binary_search_by(|probe| probe.partial_cmp(&t).unwrap()) {
            Ok(k) => self.spatial(k, x, node, &mut out),
            Err(pos) => {
                if pos == 0 || pos == times.len() {
                    return Err(GeometryError::OutOfWindow {
                        t,
                        window: TimeInterval::new(times[0], *times.last().unwrap()),
                    });
                }
                let k = pos - 1;
                let lo = k.saturating_sub(1);
                let hi = (k + 2).min(times.len() - 1);
                let mut slices = Vec::with_capacity(hi - lo + 1);
                for q in lo..=hi {
                    let mut v = vec![0.0; nc];
                    self.spatial(q, x, node, &mut v);
                    slices.push(v);
                }
                let local = |q: usize| -> &Vec<f64> { &slices[q - lo] };
                let (t0, t1) = (times[k], times[k + 1]);
                let h = t1 - t0;
                let s = (t - t0) / h;
                let (h00, h10, h01, h11) = hermite_basis(s);
                for c in 0..nc {
                    let y0 = local(k)[c];
                    let y1 = local(k + 1)[c];
                    let m0 = knot_slope(times, k, lo, hi, |q| local(q)[c]);
                    let m1 = knot_slope(times, k + 1, lo, hi, |q| local(q)[c]);
                    out[c] = h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1;
                }
            }
        }
        let spatial = SymMatrix::from_upper(dim, &out[1..])?;
        Ok((out[0], spatial))
    }
}

fn hermite_basis(s: f64) -> (f64, f64, f64, f64) {
    let s2 = s * s;
    let s3 = s2 * s;
    (
        2.0 * s3 - 3.0 * s2 + 1.0,
        s3 - 2.0 * s2 + s,
        -2.0 * s3 + 3.0 * s2,
        s3 - s2,
    )
}

/// Derivative at knot `q` of the parabola through its neighbours (one-sided
/// secant at the ends of the available range).
fn knot_slope(times: &[f64], q: usize, lo: usize, hi: usize, y: impl Fn(usize) -> f64) -> f64 {
    if q > lo && q < hi {
        let h0 = times[q] - times[q - 1];
        let h1 = times[q + 1] - times[q];
        let d0 = (y(q) - y(q - 1)) / h0;
        let d1 = (y(q + 1) - y(q)) / h1;
        (h1 * d0 + h0 * d1) / (h0 + h1)
    } else if q < hi {
        (y(q + 1) - y(q)) / (times[q + 1] - times[q])
    } else {
        (y(q) - y(q - 1)) / (times[q] - times[q - 1])
    }
}

/// Cubic B-spline basis weights for the four coefficients `i-1 ..= i+2`.
fn bspline_weights(u: f64) -> (i64, [f64; 4]) {
    let i = u.floor();
    let s = u - i;
    let s2 = s * s;
    let s3 = s2 * s;
    let one = 1.0 - s;
    (
        i as i64,
        [
            one * one * one / 6.0,
            (3.0 * s3 - 6.0 * s2 + 4.0) / 6.0,
            (-3.0 * s3 + 3.0 * s2 + 3.0 * s + 1.0) / 6.0,
            s3 / 6.0,
        ],
    )
}

/// Coefficients `c` with `(c[i-1] + 4 c[i] + c[i+1]) / 6 = f[i]` (periodic).
fn periodic_bspline_prefilter(f: &[f64]) -> Vec<f64> {
    let rhs: Vec<f64> = f.iter().map(|v| 6.0 * v).collect();
    solve_cyclic_tridiagonal(1.0, 4.0, 1.0, &rhs)
}

/// Solves the circulant tridiagonal system with constant bands
/// `(sub, diag, sup)` via Sherman-Morrison.
fn solve_cyclic_tridiagonal(sub: f64, diag: f64, sup: f64, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let gamma = -diag;
    let mut b = vec![diag; n];
    b[0] = diag - gamma;
    b[n - 1] = diag - sub * sup / gamma;
    let x = thomas(sub, &b, sup, rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = sup;
    let z = thomas(sub, &b, sup, &u);
    let fact = (x[0] + sub * x[n - 1] / gamma) / (1.0 + z[0] + sub * z[n - 1] / gamma);
    x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect()
}

fn thomas(sub: f64, diag: &[f64], sup: f64, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - sub * c[i - 1];
        c[i] = sup / m;
        d[i] = (rhs[i] - sub * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{metric_eval, SpatialDomain};

    #[test]
    fn prefilter_reproduces_samples() {
        let f: Vec<f64> = (0..16).map(|i| (i as f64 * 0.4).sin() + 2.0).collect();
        let c = periodic_bspline_prefilter(&f);
        for i in 0..16 {
            let back = (c[(i + 15) % 16] + 4.0 * c[i] + c[(i + 1) % 16]) / 6.0;
            assert!((back - f[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn off_grid_query_is_close_to_closed_form() {
        let domain = SpatialDomain::circle(std::f64::consts::TAU, 32).unwrap();
        let m = MetricField::closed_form(
            domain,
            "wavy",
            |_, _| 1.0,
            |t, x| SymMatrix::one((2.0 + x[0].sin()) * (0.5 * t).exp()),
        );
        let times: Vec<f64> = (0..=40).map(|k| -1.0 + k as f64 * 0.05).collect();
        let g = MetricGrid::sample(&m, &times).unwrap().into_field("grid");
        // exact at nodes
        let x_node = g.domain().node(5, 0);
        assert_eq!(metric_eval(&g, times[7], x_node).unwrap(), metric_eval(&m, times[7], x_node).unwrap());
        // interpolation error far below sample-scale variation
        let mut worst = 0.0f64;
        for k in 0..200 {
            let t = -0.99 + k as f64 * 0.0099;
            let x = [0.123 + k as f64 * 0.031, 0.0];
            let a = metric_eval(&g, t, x).unwrap();
            let b = metric_eval(&m, t, x).unwrap();
            assert!((a.0 - 1.0).abs() < 1e-12);
            worst = worst.max((a.1.upper()[0] - b.1.upper()[0]).abs());
        }
        // spline term ~ 5 h^4 max|f_xxxx| / 384 with h = 0.196, plus the
        // O(dt^3) Hermite term with dt = 0.05; together below 2e-4 here.
        assert!(worst < 2e-4, "worst interpolation error {worst}");
    }

    #[test]
    fn two_dimensional_nodes_round_trip() {
        let domain = SpatialDomain::torus([1.0, 2.0], [8, 8]).unwrap();
        let m = MetricField::closed_form(
            domain,
            "aniso",
            |t, x| 1.0 + 0.1 * (t + x[1]).cos(),
            |t, x| SymMatrix::two(2.0 + t.sin(), 0.1 * x[0].cos(), 3.0),
        );
        let times = [0.0, 0.5, 1.0];
        let grid = MetricGrid::sample(&m, &times).unwrap();
        let field = grid.clone().into_field("g");
        for &t in &times {
            for x in field.domain().grid_points() {
                assert_eq!(field.eval(t, x).unwrap(), m.eval(t, x).unwrap());
            }
        }
        assert!(field.eval(1.5, [0.0; 2]).is_err());
        assert!(field.eval(0.25, [0.3, 1.1]).is_ok());
    }
}
