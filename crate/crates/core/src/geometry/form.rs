use std::ops::{Add, Mul, Sub};

use super::GeometryError;

/// Relative eigenvalue floor below which a form is not accepted as SPD.
pub const SPD_RELATIVE_FLOOR: f64 = 1e-12;

/// Symmetric `d x d` matrix, `d` in {1, 2}, stored as its upper triangle
/// `[[s11, s12], [s12, s22]]`. One-dimensional matrices keep `s12 = s22 = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    s11: f64,
    s12: f64,
    s22: f64,
}

impl SymMatrix {
    pub fn one(s11: f64) -> Self {
        Self {
            dim: 1,
            s11,
            s12: 0.0,
            s22: 0.0,
        }
    }

    pub fn two(s11: f64, s12: f64, s22: f64) -> Self {
        Self {
            dim: 2,
            s11,
            s12,
            s22,
        }
    }

    pub fn diag(dim: usize, entries: [f64; 2]) -> Self {
        match dim {
            1 => Self::one(entries[0]),
            _ => Self::two(entries[0], 0.0, entries[1]),
        }
    }

    pub fn scalar(dim: usize, s: f64) -> Self {
        Self::diag(dim, [s, s])
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, 1.0)
    }

    /// Builds from the row-major upper triangle (`[s11]` or `[s11, s12, s22]`).
    pub fn from_upper(dim: usize, upper: &[f64]) -> Result<Self, GeometryError> {
        match (dim, upper) {
            (1, [a]) => Ok(Self::one(*a)),
            (2, [a, b, c]) => Ok(Self::two(*a, *b, *c)),
            _ => Err(GeometryError::Shape(format!(
                "expected {} upper-triangle entries for dimension {dim}, got {}",
                upper_len(dim),
                upper.len()
            ))),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn upper(&self) -> Vec<f64> {
        match self.dim {
            1 => vec![self.s11],
            _ => vec![self.s11, self.s12, self.s22],
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        match (i, j) {
            (0, 0) => self.s11,
            (1, 1) => self.s22,
            _ => self.s12,
        }
    }

    pub fn quad(&self, v: [f64; 2]) -> f64 {
        match self.dim {
            1 => self.s11 * v[0] * v[0],
            _ => self.s11 * v[0] * v[0] + 2.0 * self.s12 * v[0] * v[1] + self.s22 * v[1] * v[1],
        }
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        match self.dim {
            1 => [self.s11 * v[0], 0.0],
            _ => [
                self.s11 * v[0] + self.s12 * v[1],
                self.s12 * v[0] + self.s22 * v[1],
            ],
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            s11: self.s11 * s,
            s12: self.s12 * s,
            s22: self.s22 * s,
        }
    }

    /// Convex combination `(1 - r) * self + r * other`.
    pub fn lerp(&self, other: &SymMatrix, r: f64) -> Self {
        self.scale(1.0 - r) + other.scale(r)
    }

    /// `(min, max)` eigenvalue.
    pub fn eigenvalues(&self) -> (f64, f64) {
        match self.dim {
            1 => (self.s11, self.s11),
            _ => {
                let mean = 0.5 * (self.s11 + self.s22);
                let radius = (0.5 * (self.s11 - self.s22)).hypot(self.s12);
                (mean - radius, mean + radius)
            }
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().0
    }

    pub fn max_abs(&self) -> f64 {
        self.s11.abs().max(self.s12.abs()).max(self.s22.abs())
    }

    pub fn is_finite(&self) -> bool {
        self.s11.is_finite() && self.s12.is_finite() && self.s22.is_finite()
    }

    pub fn is_spd(&self) -> bool {
        if !self.is_finite() {
            return false;
        }
        let (lo, hi) = self.eigenvalues();
        hi > 0.0 && lo > SPD_RELATIVE_FLOOR * hi
    }

    /// Largest componentwise difference divided by the larger of the two
    /// entry magnitudes (0 when both matrices vanish).
    pub fn relative_difference(&self, other: &SymMatrix) -> f64 {
        let scale = self.max_abs().max(other.max_abs());
        let diff = (*self - *other).max_abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / scale
        }
    }
}

fn upper_len(dim: usize) -> usize {
    dim * (dim + 1) / 2
}

impl Add for SymMatrix {
    type Output = SymMatrix;
    fn add(self, rhs: SymMatrix) -> SymMatrix {
        debug_assert_eq!(self.dim, rhs.dim);
        SymMatrix {
            dim: self.dim,
            s11: self.s11 + rhs.s11,
            s12: self.s12 + rhs.s12,
            s22: self.s22 + rhs.s22,
        }
    }
}

impl Sub for SymMatrix {
    type Output = SymMatrix;
    fn sub(self, rhs: SymMatrix) -> SymMatrix {
        debug_assert_eq!(self.dim, rhs.dim);
        SymMatrix {
            dim: self.dim,
            s11: self.s11 - rhs.s11,
            s12: self.s12 - rhs.s12,
            s22: self.s22 - rhs.s22,
        }
    }
}

impl Mul<SymMatrix> for f64 {
    type Output = SymMatrix;
    fn mul(self, rhs: SymMatrix) -> SymMatrix {
        rhs.scale(self)
    }
}

/// A symmetric positive definite form: the value of a Riemannian metric at a
/// point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpdForm(SymMatrix);

impl SpdForm {
    pub fn new(m: SymMatrix) -> Result<Self, GeometryError> {
        if m.is_spd() {
            Ok(Self(m))
        } else {
            Err(GeometryError::NotSpd(format!("{:?}", m.upper())))
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self(SymMatrix::identity(dim))
    }

    pub fn scalar(dim: usize, s: f64) -> Result<Self, GeometryError> {
        Self::new(SymMatrix::scalar(dim, s))
    }

    pub fn diag(dim: usize, entries: [f64; 2]) -> Result<Self, GeometryError> {
        Self::new(SymMatrix::diag(dim, entries))
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn quad(&self, v: [f64; 2]) -> f64 {
        self.0.quad(v)
    }

    pub fn upper(&self) -> Vec<f64> {
        self.0.upper()
    }

    /// Positive multiple; the caller guarantees `s > 0`.
    pub fn scale(&self, s: f64) -> Result<Self, GeometryError> {
        Self::new(self.0.scale(s))
    }

    /// Lower Cholesky factor `[[l11, 0], [l21, l22]]`.
    fn cholesky(&self) -> (f64, f64, f64) {
        let m = &self.0;
        let l11 = m.s11.sqrt();
        if m.dim == 1 {
            return (l11, 0.0, 0.0);
        }
        let l21 = m.s12 / l11;
        let l22 = (m.s22 - l21 * l21).max(0.0).sqrt();
        (l11, l21, l22)
    }

    /// Largest generalized eigenpair of the pencil `(b, self)`:
    /// `b v = mu self v`, with `v` normalized so that `self(v, v) = 1`.
    ///
    /// `mu = sup_{v != 0} b(v, v) / self(v, v)`. Computed by reducing to the
    /// symmetric matrix `L^{-1} b L^{-T}` with `self = L L^T`.
    pub fn generalized_max_eigen(&self, b: &SymMatrix) -> (f64, [f64; 2]) {
        debug_assert_eq!(self.dim(), b.dim);
        let (l11, l21, l22) = self.cholesky();
        if self.dim() == 1 {
            return (b.s11 / self.0.s11, [1.0 / l11, 0.0]);
        }
        // M = L^{-1} B, then C = M L^{-T}.
        let li11 = 1.0 / l11;
        let li22 = 1.0 / l22;
        let li21 = -l21 * li11 * li22;
        let m11 = li11 * b.s11;
        let m12 = li11 * b.s12;
        let m21 = li21 * b.s11 + li22 * b.s12;
        let m22 = li21 * b.s12 + li22 * b.s22;
        let c11 = m11 * li11;
        let c12 = m11 * li21 + m12 * li22;
        let c22 = m21 * li21 + m22 * li22;

        let mean = 0.5 * (c11 + c22);
        let half = 0.5 * (c11 - c22);
        let radius = half.hypot(c12);
        let mu = mean + radius;

        let y = if c12 == 0.0 {
            if c11 >= c22 {
                [1.0, 0.0]
            } else {
                [0.0, 1.0]
            }
        } else {
            let a = [c12, mu - c11];
            let b = [mu - c22, c12];
            let (na, nb) = (a[0].hypot(a[1]), b[0].hypot(b[1]));
            if na >= nb {
                [a[0] / na, a[1] / na]
            } else {
                [b[0] / nb, b[1] / nb]
            }
        };
        // v = L^{-T} y
        let v2 = y[1] * li22;
        let v1 = (y[0] - l21 * v2) * li11;
        (mu, [v1, v2])
    }

    /// Smallest generalized eigenvalue `inf_{v != 0} b(v, v) / self(v, v)`.
    pub fn generalized_min_eigenvalue(&self, b: &SymMatrix) -> f64 {
        -self.generalized_max_eigen(&b.scale(-1.0)).0
    }
}

/// `sup_{v != 0} B(v, v) / A(v, v)` for symmetric `A, B` with `A` positive
/// definite: the largest root of `det(B - mu A) = 0`.
pub fn spd_generalized_max_eigenvalue(a: &SymMatrix, b: &SymMatrix) -> Result<f64, GeometryError> {
    if a.dim != b.dim {
        return Err(GeometryError::Shape(format!(
            "pencil dimensions differ: {} vs {}",
            a.dim, b.dim
        )));
    }
    let a = SpdForm::new(*a)
        .map_err(|_| GeometryError::Domain(format!("pencil base {:?} is not SPD", a.upper())))?;
    Ok(a.generalized_max_eigen(b).0)
}
