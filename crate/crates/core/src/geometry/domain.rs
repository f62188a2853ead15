use serde::{Deserialize, Serialize};

use super::GeometryError;

/// Spatial coordinates. For one-dimensional domains the second entry is
/// ignored and kept at zero.
pub type Point = [f64; 2];

pub const MIN_RESOLUTION: usize = 8;

/// A flat torus `T^d`, d = 1 or 2, sampled on an even periodic grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialDomain {
    dim: usize,
    circumferences: [f64; 2],
    resolution: [usize; 2],
}

impl SpatialDomain {
    pub fn new(circumferences: &[f64], resolution: &[usize]) -> Result<Self, GeometryError> {
        let dim = circumferences.len();
        if !(1..=2).contains(&dim) {
            return Err(GeometryError::Shape(format!(
                "spatial dimension must be 1 or 2, got {dim}"
            )));
        }
        if resolution.len() != dim {
            return Err(GeometryError::Shape(format!(
                "{dim} circumferences but {} resolutions",
                resolution.len()
            )));
        }
        if let Some(c) = circumferences.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
            return Err(GeometryError::Domain(format!(
                "circumference must be positive and finite, got {c}"
            )));
        }
        if let Some(n) = resolution.iter().find(|n| **n < MIN_RESOLUTION) {
            return Err(GeometryError::Domain(format!(
                "grid resolution must be at least {MIN_RESOLUTION} per axis, got {n}"
            )));
        }
        let mut c = [1.0; 2];
        let mut r = [1; 2];
        c[..dim].copy_from_slice(circumferences);
        r[..dim].copy_from_slice(resolution);
        Ok(Self {
            dim,
            circumferences: c,
            resolution: r,
        })
    }

    pub fn circle(circumference: f64, resolution: usize) -> Result<Self, GeometryError> {
        Self::new(&[circumference], &[resolution])
    }

    pub fn torus(circumferences: [f64; 2], resolution: [usize; 2]) -> Result<Self, GeometryError> {
        Self::new(&circumferences, &resolution)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn circumferences(&self) -> &[f64] {
        &self.circumferences[..self.dim]
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution[..self.dim]
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.circumferences[axis] / self.resolution[axis] as f64
    }

    pub fn num_points(&self) -> usize {
        self.resolution().iter().product()
    }

    /// Grid node `(i, j)`; `j` is ignored in one dimension.
    pub fn node(&self, i: usize, j: usize) -> Point {
        let x1 = self.circumferences[0] * i as f64 / self.resolution[0] as f64;
        let x2 = if self.dim == 2 {
            self.circumferences[1] * j as f64 / self.resolution[1] as f64
        } else {
            0.0
        };
        [x1, x2]
    }

    /// All grid nodes with the first axis varying slowest.
    pub fn grid_points(&self) -> Vec<Point> {
        let (n1, n2) = (self.resolution[0], self.resolution[1]);
        let mut out = Vec::with_capacity(n1 * n2);
        for i in 0..n1 {
            for j in 0..n2 {
                out.push(self.node(i, j));
            }
        }
        out
    }

    /// Reduce a point into the fundamental cell `[0, L_1) x [0, L_2)`.
    pub fn wrap(&self, x: Point) -> Point {
        let mut out = [0.0; 2];
        for axis in 0..self.dim {
            let l = self.circumferences[axis];
            let mut v = x[axis].rem_euclid(l);
            if v >= l {
                v -= l;
            }
            out[axis] = v;
        }
        out
    }

    /// Index of the grid node that `x` coincides with exactly (after
    /// wrapping), if any.
    pub fn exact_node(&self, x: Point) -> Option<(usize, usize)> {
        let w = self.wrap(x);
        let mut idx = [0usize; 2];
        for axis in 0..self.dim {
            let k = (w[axis] / self.spacing(axis)).round() as usize % self.resolution[axis];
            idx[axis] = k;
        }
        let node = self.node(idx[0], idx[1]);
        (node[..self.dim] == w[..self.dim]).then_some((idx[0], idx[1]))
    }
}
