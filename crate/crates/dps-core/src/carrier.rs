//! SU₂-valued loops as polynomial carriers with split-off determinants.
//!
//! The transition matrices of a discrete PS frame are unitary only after
//! division by `Δ₊ = sqrt(1 + (p/2)² λ²)` or `Δ₋ = sqrt(1 + (q/2)² λ⁻²)`.
//! Instead of materializing those square roots we carry the polynomial part
//! and its exact determinant: a [`CarrierLoop`] `(mat, det)` represents the
//! loop `mat / sqrt(det)`, with `det` a real-positive scalar on λ ∈ ℝ₊.
//!
//! Inverses stay in the class without any division: for 2×2 matrices
//! `adj(mat)` has the same determinant as `mat`, so
//! `(mat / sqrt(det))⁻¹ = adj(mat) / sqrt(det)`.

use crate::loops::{LaurentLoop, LoopError};
use crate::mat2::{C64, Mat2};
use crate::scalar::ScalarLaurent;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

/// Polynomial carrier `mat` plus its scalar determinant `det`;
/// the underlying SU₂ loop is `mat / sqrt(det)`.
#[derive(Debug, Clone)]
pub struct CarrierLoop {
    pub mat: LaurentLoop,
    pub det: ScalarLaurent,
}

impl CarrierLoop {
    pub fn identity() -> Self {
        CarrierLoop {
            mat: LaurentLoop::identity(),
            det: ScalarLaurent::one(),
        }
    }

    /// Constant unitary loop (det 1).
    pub fn from_unitary(u: Mat2) -> Self {
        debug_assert!(u.unitarity_defect() < 1e-10, "initial frame not unitary");
        CarrierLoop {
            mat: LaurentLoop::constant(u),
            det: ScalarLaurent::one(),
        }
    }

    pub fn mul(&self, rhs: &CarrierLoop, max_band: usize) -> Result<CarrierLoop, LoopError> {
        Ok(CarrierLoop {
            mat: self.mat.mul_checked(&rhs.mat, max_band)?,
            det: self.det.mul_checked(&rhs.det, 2 * max_band)?,
        })
    }

    /// Inverse of the underlying loop; the determinant is unchanged.
    pub fn inverse(&self) -> CarrierLoop {
        CarrierLoop {
            mat: self.mat.adjugate(),
            det: self.det.clone(),
        }
    }

    /// Carrier value at a complex point (no determinant normalization).
    pub fn eval_carrier(&self, z: C64) -> Result<Mat2, LoopError> {
        self.mat.evaluate(z)
    }

    /// The unitary value `mat(λ0) / sqrt(det(λ0))` at real λ0 > 0, where the
    /// determinant is real positive and the root is unambiguous.
    pub fn eval_unitary(&self, lambda0: f64) -> Result<Mat2, LoopError> {
        let z = C64::new(lambda0, 0.0);
        let d = self.det.evaluate(z)?;
        if d.re <= 0.0 || d.im.abs() > 1e-8 * d.re.abs().max(1.0) {
            return Err(LoopError::SingularFrame);
        }
        Ok(self.mat.evaluate(z)?.scale(C64::new(1.0 / d.re.sqrt(), 0.0)))
    }

    /// Defect `‖det(mat) - det‖` between the stored determinant and the one
    /// recomputed from the carrier.
    pub fn det_consistency(&self) -> f64 {
        self.mat.det().sub(&self.det).band_norm()
    }

    pub fn trimmed(&self, tol: f64) -> CarrierLoop {
        CarrierLoop {
            mat: self.mat.trimmed(tol),
            det: self.det.trim(tol),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn xi_plus(p: f64) -> CarrierLoop {
        let ip2 = C64::new(0.0, p / 2.0);
        CarrierLoop {
            mat: LaurentLoop::new(0, vec![Mat2::identity(), Mat2::off_diag(ip2, ip2)]),
            det: ScalarLaurent::delta_plus_sq(p),
        }
    }

    #[test]
    fn stored_det_matches_carrier_det() {
        let a = xi_plus(0.8);
        assert!(a.det_consistency() < 1e-15);
        let prod = a.mul(&a, 64).unwrap();
        assert!(prod.det_consistency() < 1e-15);
    }

    #[test]
    fn unitary_evaluation() {
        let a = xi_plus(1.3);
        for lambda0 in [0.5, 1.0, 2.0] {
            let u = a.eval_unitary(lambda0).unwrap();
            assert!(u.unitarity_defect() < 1e-14);
        }
    }

    #[test]
    fn inverse_is_pointwise_inverse() {
        let a = xi_plus(0.9).mul(&CarrierLoop::from_unitary(Mat2::phase_diag(0.4)), 64).unwrap();
        let inv = a.inverse();
        let u = a.eval_unitary(1.7).unwrap();
        let v = inv.eval_unitary(1.7).unwrap();
        assert!((u * v).approx_eq(&Mat2::identity(), 1e-13));
    }
}
