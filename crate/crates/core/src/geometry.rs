//! Planar vectors and 2×2 matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec2 = [f64; 2];

#[inline]
pub fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn norm_sq(v: Vec2) -> f64 {
    v[0] * v[0] + v[1] * v[1]
}

/// Row-major 2×2 matrix. Serializes as `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);
    pub const ZERO: Mat2 = Mat2([[0.0, 0.0], [0.0, 0.0]]);

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn symmetric(xx: f64, xy: f64, yy: f64) -> Self {
        Mat2([[xx, xy], [xy, yy]])
    }

    pub fn diag(xx: f64, yy: f64) -> Self {
        Mat2::symmetric(xx, 0.0, yy)
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[row][col]
    }

    pub fn det(&self) -> f64 {
        let [[a, b], [c, d]] = self.0;
        a * d - b * c
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (self.0[0][1] - self.0[1][0]).abs() <= tol
    }

    /// Both eigenvalues strictly positive (Sylvester's criterion on a
    /// symmetric matrix).
    pub fn is_positive_definite(&self) -> bool {
        self.is_symmetric(1e-9) && self.0[0][0] > 0.0 && self.det() > 0.0 && self.0[0][0].is_finite()
    }

    /// Eigenvalues of a symmetric matrix in ascending order.
    pub fn symmetric_eigenvalues(&self) -> [f64; 2] {
        let [[a, b], [_, d]] = self.0;
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        [mean - radius, mean + radius]
    }

    /// Closed-form inverse via the adjugate; `None` when singular.
    pub fn inverse(&self) -> Option<Mat2> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let [[a, b], [c, d]] = self.0;
        Some(Mat2::new(d / det, -b / det, -c / det, a / det))
    }

    /// `vᵀ M v`.
    #[inline]
    pub fn quad_form(&self, v: Vec2) -> f64 {
        let [[a, b], [c, d]] = self.0;
        v[0] * (a * v[0] + b * v[1]) + v[1] * (c * v[0] + d * v[1])
    }

    pub fn add_scaled_identity(&self, eps: f64) -> Mat2 {
        let mut m = *self;
        m.0[0][0] += eps;
        m.0[1][1] += eps;
        m
    }

    pub fn scale(&self, f: f64) -> Mat2 {
        let [[a, b], [c, d]] = self.0;
        Mat2::new(a * f, b * f, c * f, d * f)
    }

    /// Checks symmetry and positive definiteness, returning the matrix.
    pub fn into_spd(self) -> Result<Mat2> {
        if !self.is_symmetric(1e-9) {
            return Err(Error::AsymmetricMatrix(self.0));
        }
        if !self.is_positive_definite() {
            return Err(Error::NotPositiveDefinite(self.0));
        }
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_diagonal() {
        let m = Mat2::diag(4.0, 0.5).inverse().unwrap();
        assert_eq!(m, Mat2::diag(0.25, 2.0));
        assert!(Mat2::ZERO.inverse().is_none());
    }

    #[test]
    fn eigenvalues_of_rotated_diagonal() {
        // R diag(1, 9) Rᵀ for a 45° rotation.
        let m = Mat2::symmetric(5.0, 4.0, 5.0);
        let [lo, hi] = m.symmetric_eigenvalues();
        assert!((lo - 1.0).abs() < 1e-12 && (hi - 9.0).abs() < 1e-12);
    }

    #[test]
    fn spd_check() {
        assert!(Mat2::IDENTITY.into_spd().is_ok());
        assert!(matches!(
            Mat2::new(1.0, 0.5, 0.0, 1.0).into_spd(),
            Err(Error::AsymmetricMatrix(_))
        ));
        assert!(matches!(
            Mat2::diag(1.0, -1.0).into_spd(),
            Err(Error::NotPositiveDefinite(_))
        ));
    }
}
