use std::fmt;
use std::ops::{Mul, Neg};

use serde::{Deserialize, Serialize};

use super::AlgError;

/// A 2×2 integer matrix, row-major: top row `(a, b)`, bottom row `(c, d)`.
///
/// Gluing matrices have determinant −1 and torus-bundle monodromies have
/// determinant +1; the checked constructors enforce this.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2::new(1, 0, 0, 1);
    /// The swap `[[0,1],[1,0]]` used by most gluings in the chain-link tables.
    pub const SWAP: Mat2 = Mat2::new(0, 1, 1, 0);

    pub const fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2 { a, b, c, d }
    }

    /// A gluing matrix; the determinant must be −1.
    pub fn gluing(a: i64, b: i64, c: i64, d: i64) -> Result<Self, AlgError> {
        Self::with_det(Mat2::new(a, b, c, d), -1)
    }

    /// A torus-bundle monodromy; the determinant must be +1.
    pub fn monodromy(a: i64, b: i64, c: i64, d: i64) -> Result<Self, AlgError> {
        Self::with_det(Mat2::new(a, b, c, d), 1)
    }

    fn with_det(m: Mat2, expected: i64) -> Result<Self, AlgError> {
        let found = m.det();
        if found == expected {
            Ok(m)
        } else {
            Err(AlgError::Determinant { expected, found })
        }
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> i64 {
        self.a + self.d
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2::new(self.a, self.c, self.b, self.d)
    }

    /// Inverse of a unimodular matrix, `None` when `det ∉ {±1}`.
    pub fn inverse(&self) -> Option<Mat2> {
        match self.det() {
            1 => Some(Mat2::new(self.d, -self.b, -self.c, self.a)),
            -1 => Some(Mat2::new(-self.d, self.b, self.c, -self.a)),
            _ => None,
        }
    }

    /// Representative of `±self` whose first nonzero entry is positive.
    pub fn projective(&self) -> Mat2 {
        let first = [self.a, self.b, self.c, self.d]
            .into_iter()
            .find(|&x| x != 0)
            .unwrap_or(0);
        if first < 0 {
            -*self
        } else {
            *self
        }
    }

    pub fn entries(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl Neg for Mat2 {
    type Output = Mat2;

    fn neg(self) -> Mat2 {
        Mat2::new(-self.a, -self.b, -self.c, -self.d)
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{};{},{}]", self.a, self.b, self.c, self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checked_constructors() {
        assert!(Mat2::gluing(0, 1, 1, 0).is_ok());
        assert_eq!(
            Mat2::gluing(1, 1, 0, 1),
            Err(AlgError::Determinant { expected: -1, found: 1 })
        );
        assert!(Mat2::monodromy(3, 1, -1, 0).is_ok());
    }

    #[test]
    fn inverse_of_both_determinants() {
        for m in [Mat2::new(2, 3, 1, 1), Mat2::new(1, 2, 0, -1), Mat2::new(3, 1, -1, 0)] {
            let inv = m.inverse().unwrap();
            assert_eq!(m * inv, Mat2::IDENTITY);
            assert_eq!(inv * m, Mat2::IDENTITY);
        }
        assert_eq!(Mat2::new(2, 0, 0, 1).inverse(), None);
    }

    #[test]
    fn projective_sign() {
        assert_eq!(Mat2::new(0, -1, 1, 0).projective(), Mat2::new(0, 1, -1, 0));
        assert_eq!(Mat2::new(0, 1, -1, 0).projective(), Mat2::new(0, 1, -1, 0));
    }
}
