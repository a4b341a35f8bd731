//! Scalar Laurent series on a finite band.
//!
//! These carry the determinants of frame carriers: products of the
//! normalizer squares `Δ₊² = 1 + (p/2)² λ²` and `Δ₋² = 1 + (q/2)² λ⁻²`.
//! Keeping them as exact series (instead of taking matrix square roots)
//! is what keeps the rest of the pipeline polynomial.

use alloc::vec;
use alloc::vec::Vec;

use crate::loops::LoopError;
use crate::mat2::C64;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

/// Complex scalar Laurent series with powers `lo ..= hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarLaurent {
    lo: i32,
    coeff: Vec<C64>,
}

impl ScalarLaurent {
    pub fn new(lo: i32, coeff: Vec<C64>) -> Self {
        assert!(!coeff.is_empty(), "empty coefficient band");
        ScalarLaurent { lo, coeff }
    }

    pub fn one() -> Self {
        ScalarLaurent::new(0, vec![C64::new(1.0, 0.0)])
    }

    pub fn constant(c: C64) -> Self {
        ScalarLaurent::new(0, vec![c])
    }

    /// `1 + (p/2)² λ²`, the square of the plus normalizer.
    pub fn delta_plus_sq(p: f64) -> Self {
        let h = p / 2.0;
        ScalarLaurent::new(
            0,
            vec![
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(h * h, 0.0),
            ],
        )
    }

    /// `1 + (q/2)² λ⁻²`, the square of the minus normalizer.
    pub fn delta_minus_sq(q: f64) -> Self {
        let h = q / 2.0;
        ScalarLaurent::new(
            -2,
            vec![
                C64::new(h * h, 0.0),
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
            ],
        )
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.coeff.len() as i32 - 1
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeff
    }

    /// Coefficient of λ^k, zero outside the band.
    pub fn at(&self, k: i32) -> C64 {
        if k < self.lo || k > self.hi() {
            C64::new(0.0, 0.0)
        } else {
            self.coeff[(k - self.lo) as usize]
        }
    }

    pub fn band_norm(&self) -> f64 {
        self.coeff.iter().map(|c| c.norm()).sum()
    }

    pub fn mul(&self, rhs: &ScalarLaurent) -> ScalarLaurent {
        let lo = self.lo + rhs.lo;
        let len = self.coeff.len() + rhs.coeff.len() - 1;
        let mut out = vec![C64::new(0.0, 0.0); len];
        for (i, a) in self.coeff.iter().enumerate() {
            if a.norm() == 0.0 {
                continue;
            }
            for (j, b) in rhs.coeff.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ScalarLaurent::new(lo, out)
    }

    pub fn mul_checked(
        &self,
        rhs: &ScalarLaurent,
        max_band: usize,
    ) -> Result<ScalarLaurent, LoopError> {
        let width = (self.hi() + rhs.hi() - self.lo - rhs.lo) as usize;
        if width > max_band {
            return Err(LoopError::Truncation { band: width });
        }
        Ok(self.mul(rhs))
    }

    pub fn evaluate(&self, z: C64) -> Result<C64, LoopError> {
        if self.lo < 0 && z.norm() == 0.0 {
            return Err(LoopError::PoleAtZero);
        }
        // Horner on λ^(k - lo), then multiply by λ^lo.
        let mut acc = C64::new(0.0, 0.0);
        for c in self.coeff.iter().rev() {
            acc = acc * z + c;
        }
        Ok(acc * z.powi(self.lo))
    }

    /// d/dλ evaluated at z.
    pub fn derivative_at(&self, z: C64) -> Result<C64, LoopError> {
        if self.lo - 1 < 0 && z.norm() == 0.0 {
            return Err(LoopError::PoleAtZero);
        }
        let mut acc = C64::new(0.0, 0.0);
        for (i, c) in self.coeff.iter().enumerate() {
            let k = self.lo + i as i32;
            if k != 0 {
                acc += c * C64::new(k as f64, 0.0) * z.powi(k - 1);
            }
        }
        Ok(acc)
    }

    /// Drop leading/trailing coefficients below `tol`; never empties the band.
    pub fn trim(&self, tol: f64) -> ScalarLaurent {
        let mut lo_idx = 0usize;
        let mut hi_idx = self.coeff.len();
        while hi_idx - lo_idx > 1 && self.coeff[lo_idx].norm() <= tol {
            lo_idx += 1;
        }
        while hi_idx - lo_idx > 1 && self.coeff[hi_idx - 1].norm() <= tol {
            hi_idx -= 1;
        }
        ScalarLaurent::new(
            self.lo + lo_idx as i32,
            self.coeff[lo_idx..hi_idx].to_vec(),
        )
    }

    /// Reciprocal of a series with `lo = 0` and invertible constant term,
    /// as a power series in λ truncated at `λ^k_max`.
    pub fn reciprocal_plus(&self, k_max: usize) -> Result<ScalarLaurent, LoopError> {
        if self.lo != 0 || self.coeff[0].norm() == 0.0 {
            return Err(LoopError::SingularSeries);
        }
        let a0 = self.coeff[0];
        let mut out = vec![C64::new(0.0, 0.0); k_max + 1];
        out[0] = a0.inv();
        for j in 1..=k_max {
            let mut s = C64::new(0.0, 0.0);
            for k in 1..=j.min(self.coeff.len() - 1) {
                s += self.coeff[k] * out[j - k];
            }
            out[j] = -s / a0;
        }
        Ok(ScalarLaurent::new(0, out))
    }

    /// Mirror of [`Self::reciprocal_plus`] for a series with `hi = 0`,
    /// truncated at `λ^-k_max`.
    pub fn reciprocal_minus(&self, k_max: usize) -> Result<ScalarLaurent, LoopError> {
        let rev = self.reversed();
        let rec = rev.reciprocal_plus(k_max)?;
        Ok(rec.reversed())
    }

    /// λ ↦ λ⁻¹ substitution (band reflection).
    pub fn reversed(&self) -> ScalarLaurent {
        let mut coeff: Vec<C64> = self.coeff.clone();
        coeff.reverse();
        ScalarLaurent::new(-self.hi(), coeff)
    }

    pub fn sub(&self, rhs: &ScalarLaurent) -> ScalarLaurent {
        let lo = self.lo.min(rhs.lo);
        let hi = self.hi().max(rhs.hi());
        let mut coeff = vec![C64::new(0.0, 0.0); (hi - lo + 1) as usize];
        for (i, c) in coeff.iter_mut().enumerate() {
            let k = lo + i as i32;
            *c = self.at(k) - rhs.at(k);
        }
        ScalarLaurent::new(lo, coeff)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_products_evaluate() {
        // Δ₊²(λ=1, p=1) = 1.25, Δ₋²(λ=2, q=1) = 1 + 1/16.
        let dp = ScalarLaurent::delta_plus_sq(1.0);
        let dm = ScalarLaurent::delta_minus_sq(1.0);
        let at1 = dp.evaluate(C64::new(1.0, 0.0)).unwrap();
        assert!((at1.re - 1.25).abs() < 1e-15 && at1.im.abs() < 1e-15);
        let at2 = dm.evaluate(C64::new(2.0, 0.0)).unwrap();
        assert!((at2.re - 1.0625).abs() < 1e-15);
    }

    #[test]
    fn pole_at_zero_rejected() {
        let dm = ScalarLaurent::delta_minus_sq(0.5);
        assert!(matches!(
            dm.evaluate(C64::new(0.0, 0.0)),
            Err(LoopError::PoleAtZero)
        ));
    }

    #[test]
    fn reciprocal_plus_convolves_to_one() {
        let s = ScalarLaurent::delta_plus_sq(0.8);
        let r = s.reciprocal_plus(40).unwrap();
        let prod = s.mul(&r);
        // 1 up to the truncation tail.
        assert!((prod.at(0) - C64::new(1.0, 0.0)).norm() < 1e-14);
        for k in 1..=38 {
            assert!(prod.at(k).norm() < 1e-14, "tail at {k}");
        }
    }

    #[test]
    fn reciprocal_minus_mirror() {
        let s = ScalarLaurent::delta_minus_sq(0.6);
        let r = s.reciprocal_minus(40).unwrap();
        let prod = s.mul(&r);
        assert!((prod.at(0) - C64::new(1.0, 0.0)).norm() < 1e-14);
        for k in 1..=38 {
            assert!(prod.at(-k).norm() < 1e-14);
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let s = ScalarLaurent::delta_minus_sq(1.2).mul(&ScalarLaurent::delta_plus_sq(0.7));
        let z = C64::new(1.3, 0.0);
        let h = 1e-6;
        let fd = (s.evaluate(z + C64::new(h, 0.0)).unwrap()
            - s.evaluate(z - C64::new(h, 0.0)).unwrap())
            / C64::new(2.0 * h, 0.0);
        let an = s.derivative_at(z).unwrap();
        assert!((fd - an).norm() < 1e-8);
    }
}
