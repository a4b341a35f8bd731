//! 2×2 complex matrices, the coefficient ring of every loop in this crate.
//!
//! The Pauli matrices
//!
//!   σ₁ = [[0, 1], [1, 0]],  σ₂ = [[0, -i], [i, 0]],  σ₃ = [[1, 0], [0, -1]]
//!
//! are used throughout, and Euclidean 3-space is identified with su₂ by
//!
//!   (x, y, z) ↔ (i/2)(x σ₁ - y σ₂ + z σ₃).

use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

pub type C64 = Complex<f64>;

/// 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub e: [[C64; 2]; 2],
}

impl Mat2 {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2 { e: [[a, b], [c, d]] }
    }

    pub fn zero() -> Self {
        let z = C64::new(0.0, 0.0);
        Mat2::new(z, z, z, z)
    }

    pub fn identity() -> Self {
        let z = C64::new(0.0, 0.0);
        let o = C64::new(1.0, 0.0);
        Mat2::new(o, z, z, o)
    }

    pub fn diag(a: C64, d: C64) -> Self {
        let z = C64::new(0.0, 0.0);
        Mat2::new(a, z, z, d)
    }

    pub fn off_diag(b: C64, c: C64) -> Self {
        let z = C64::new(0.0, 0.0);
        Mat2::new(z, b, c, z)
    }

    /// diag(e^{iθ}, e^{-iθ}).
    pub fn phase_diag(theta: f64) -> Self {
        Mat2::diag(C64::from_polar(1.0, theta), C64::from_polar(1.0, -theta))
    }

    pub fn sigma1() -> Self {
        let z = C64::new(0.0, 0.0);
        let o = C64::new(1.0, 0.0);
        Mat2::new(z, o, o, z)
    }

    pub fn sigma2() -> Self {
        let z = C64::new(0.0, 0.0);
        let i = C64::new(0.0, 1.0);
        Mat2::new(z, -i, i, z)
    }

    pub fn sigma3() -> Self {
        let z = C64::new(0.0, 0.0);
        let o = C64::new(1.0, 0.0);
        Mat2::new(o, z, z, -o)
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut r = *self;
        for row in r.e.iter_mut() {
            for x in row.iter_mut() {
                *x *= s;
            }
        }
        r
    }

    pub fn trace(&self) -> C64 {
        self.e[0][0] + self.e[1][1]
    }

    pub fn det(&self) -> C64 {
        self.e[0][0] * self.e[1][1] - self.e[0][1] * self.e[1][0]
    }

    /// Adjugate: `m * m.adjugate() == m.det() * Id` exactly.
    pub fn adjugate(&self) -> Self {
        Mat2::new(self.e[1][1], -self.e[0][1], -self.e[1][0], self.e[0][0])
    }

    pub fn conj_transpose(&self) -> Self {
        Mat2::new(
            self.e[0][0].conj(),
            self.e[1][0].conj(),
            self.e[0][1].conj(),
            self.e[1][1].conj(),
        )
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.norm() == 0.0 {
            return None;
        }
        Some(self.adjugate().scale(d.inv()))
    }

    /// A - (tr A / 2) Id.
    pub fn traceless_part(&self) -> Self {
        let h = self.trace() * C64::new(0.5, 0.0);
        let mut r = *self;
        r.e[0][0] -= h;
        r.e[1][1] -= h;
        r
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.e
            .iter()
            .flatten()
            .map(|x| x.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.e
            .iter()
            .flatten()
            .map(|x| x.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }

    pub fn approx_eq(&self, other: &Mat2, tol: f64) -> bool {
        (*self - *other).max_abs() <= tol
    }

    /// ‖m mᴴ - Id‖, the defect from unitarity.
    pub fn unitarity_defect(&self) -> f64 {
        (*self * self.conj_transpose() - Mat2::identity()).max_abs()
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let mut r = self;
        for i in 0..2 {
            for j in 0..2 {
                r.e[i][j] += rhs.e[i][j];
            }
        }
        r
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        let mut r = self;
        for i in 0..2 {
            for j in 0..2 {
                r.e[i][j] -= rhs.e[i][j];
            }
        }
        r
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let mut r = Mat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                r.e[i][j] = self.e[i][0] * rhs.e[0][j] + self.e[i][1] * rhs.e[1][j];
            }
        }
        r
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(C64::new(-1.0, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn adjugate_identity() {
        let m = Mat2::new(c(1.0, 2.0), c(-0.5, 0.3), c(0.0, 1.0), c(2.0, -1.0));
        let prod = m * m.adjugate();
        let expect = Mat2::identity().scale(m.det());
        assert!(prod.approx_eq(&expect, 1e-15));
    }

    #[test]
    fn pauli_relations() {
        let s1 = Mat2::sigma1();
        let s2 = Mat2::sigma2();
        let s3 = Mat2::sigma3();
        assert!((s1 * s1).approx_eq(&Mat2::identity(), 0.0));
        // σ₁σ₂ = iσ₃
        assert!((s1 * s2).approx_eq(&s3.scale(c(0.0, 1.0)), 0.0));
        assert_eq!(s3.trace(), c(0.0, 0.0));
    }

    #[test]
    fn traceless_projection() {
        let m = Mat2::new(c(3.0, 1.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, -1.0));
        let t = m.traceless_part();
        assert!(t.trace().norm() < 1e-15);
        assert_eq!(t.e[0][1], m.e[0][1]);
    }

    #[test]
    fn inverse_round_trip() {
        let m = Mat2::new(c(1.0, 0.5), c(0.2, -0.1), c(-0.3, 0.0), c(0.8, 0.2));
        let inv = m.inverse().unwrap();
        assert!((m * inv).approx_eq(&Mat2::identity(), 1e-14));
    }
}
