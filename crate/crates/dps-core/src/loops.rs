//! Arithmetic for 2×2 matrix Laurent loops in the spectral parameter λ.
//!
//! A loop is a finite band of matrix coefficients `Σ_{k=lo}^{hi} M_k λ^k`.
//! Every frame and factor in this crate is such a band once the scalar
//! normalizers are stripped (see [`crate::carrier`]), so exact convolution
//! arithmetic suffices; there is no implicit truncation anywhere. The trim
//! threshold `TRIM_EPS` is applied only by explicit [`LaurentLoop::trimmed`]
//! calls.
//!
//! Loops of interest satisfy the twisting condition `σ₃ L(-λ) σ₃ = L(λ)`
//! (diagonal entries even in λ, off-diagonal odd) and, after pointwise
//! division by the scalar determinant root, are unitary for real λ.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::mat2::{C64, Mat2};
use crate::scalar::ScalarLaurent;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

/// Trim threshold for explicit normalization calls.
pub const TRIM_EPS: f64 = 1e-14;

/// Errors from loop arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub enum LoopError {
    /// A product band exceeded the configured maximum width.
    Truncation { band: usize },
    /// Evaluation at λ = 0 of a loop with negative powers.
    PoleAtZero,
    /// Pointwise evaluation is (numerically) singular.
    SingularFrame,
    /// Series inversion with a vanishing leading term.
    SingularSeries,
}

impl core::fmt::Display for LoopError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            LoopError::Truncation { band } => {
                write!(f, "loop band {band} exceeds the configured maximum")
            }
            LoopError::PoleAtZero => write!(f, "evaluation at λ=0 with negative powers"),
            LoopError::SingularFrame => write!(f, "loop evaluates to a singular matrix"),
            LoopError::SingularSeries => write!(f, "series has no invertible leading term"),
        }
    }
}

impl core::error::Error for LoopError {}

/// Membership classes in the Birkhoff decomposition.
///
/// `Plus` loops extend holomorphically into the unit disk (`lo ≥ 0`),
/// `Minus` loops to the exterior including ∞ (`hi ≤ 0`); the `*Normalized`
/// variants are additionally `Id` at λ = 0 resp. λ = ∞.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopClass {
    Full,
    PlusNormalized,
    Plus,
    MinusNormalized,
    Minus,
}

impl LoopClass {
    pub fn satisfied_by(&self, l: &LaurentLoop, tol: f64) -> bool {
        let t = l.trimmed(tol);
        match self {
            LoopClass::Full => true,
            LoopClass::Plus => t.lo() >= 0,
            LoopClass::Minus => t.hi() <= 0,
            LoopClass::PlusNormalized => {
                t.lo() >= 0 && t.at(0).approx_eq(&Mat2::identity(), tol)
            }
            LoopClass::MinusNormalized => {
                t.hi() <= 0 && t.at(0).approx_eq(&Mat2::identity(), tol)
            }
        }
    }
}

/// 2×2 matrix Laurent polynomial `Σ_{k=lo}^{hi} coeff[k] λ^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentLoop {
    lo: i32,
    coeff: Vec<Mat2>,
}

impl LaurentLoop {
    pub fn new(lo: i32, coeff: Vec<Mat2>) -> Self {
        assert!(!coeff.is_empty(), "empty coefficient band");
        LaurentLoop { lo, coeff }
    }

    pub fn identity() -> Self {
        LaurentLoop::new(0, vec![Mat2::identity()])
    }

    pub fn constant(m: Mat2) -> Self {
        LaurentLoop::new(0, vec![m])
    }

    /// The single term `m λ^k`.
    pub fn monomial(k: i32, m: Mat2) -> Self {
        LaurentLoop::new(k, vec![m])
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.coeff.len() as i32 - 1
    }

    /// Band width `hi - lo`.
    pub fn band_width(&self) -> usize {
        self.coeff.len() - 1
    }

    pub fn coeffs(&self) -> &[Mat2] {
        &self.coeff
    }

    /// Coefficient of λ^k, zero outside the band.
    pub fn at(&self, k: i32) -> Mat2 {
        if k < self.lo || k > self.hi() {
            Mat2::zero()
        } else {
            self.coeff[(k - self.lo) as usize]
        }
    }

    /// Wiener-algebra style norm `Σ_k ‖coeff[k]‖_F`.
    pub fn band_norm(&self) -> f64 {
        self.coeff.iter().map(|m| m.frobenius_norm()).sum()
    }

    pub fn max_coeff_abs(&self) -> f64 {
        self.coeff.iter().map(|m| m.max_abs()).fold(0.0, f64::max)
    }

    /// Cauchy product; the result band is `[a.lo + b.lo, a.hi + b.hi]`.
    pub fn mul(&self, rhs: &LaurentLoop) -> LaurentLoop {
        let lo = self.lo + rhs.lo;
        let len = self.coeff.len() + rhs.coeff.len() - 1;
        let mut out = vec![Mat2::zero(); len];
        for (i, a) in self.coeff.iter().enumerate() {
            if a.max_abs() == 0.0 {
                continue;
            }
            for (j, b) in rhs.coeff.iter().enumerate() {
                out[i + j] = out[i + j] + *a * *b;
            }
        }
        LaurentLoop::new(lo, out)
    }

    /// Product with a hard band-width cap.
    pub fn mul_checked(&self, rhs: &LaurentLoop, max_band: usize) -> Result<LaurentLoop, LoopError> {
        let width = self.band_width() + rhs.band_width();
        if width > max_band {
            return Err(LoopError::Truncation { band: width });
        }
        Ok(self.mul(rhs))
    }

    pub fn add(&self, rhs: &LaurentLoop) -> LaurentLoop {
        let lo = self.lo.min(rhs.lo);
        let hi = self.hi().max(rhs.hi());
        let mut coeff = vec![Mat2::zero(); (hi - lo + 1) as usize];
        for (i, c) in coeff.iter_mut().enumerate() {
            let k = lo + i as i32;
            *c = self.at(k) + rhs.at(k);
        }
        LaurentLoop::new(lo, coeff)
    }

    pub fn sub(&self, rhs: &LaurentLoop) -> LaurentLoop {
        self.add(&rhs.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> LaurentLoop {
        LaurentLoop::new(self.lo, self.coeff.iter().map(|m| m.scale(s)).collect())
    }

    /// Multiply by a scalar Laurent series (coefficient convolution).
    pub fn mul_scalar(&self, s: &ScalarLaurent) -> LaurentLoop {
        let lo = self.lo + s.lo();
        let len = self.coeff.len() + (s.hi() - s.lo()) as usize;
        let mut out = vec![Mat2::zero(); len];
        for (i, a) in self.coeff.iter().enumerate() {
            for k in s.lo()..=s.hi() {
                let c = s.at(k);
                if c.norm() == 0.0 {
                    continue;
                }
                out[i + (k - s.lo()) as usize] = out[i + (k - s.lo()) as usize] + a.scale(c);
            }
        }
        LaurentLoop::new(lo, out)
    }

    /// `Σ_k coeff[k] λ0^k`.
    pub fn evaluate(&self, z: C64) -> Result<Mat2, LoopError> {
        if self.lo < 0 && z.norm() == 0.0 {
            return Err(LoopError::PoleAtZero);
        }
        let mut acc = Mat2::zero();
        for c in self.coeff.iter().rev() {
            acc = acc.scale(z) + *c;
        }
        Ok(acc.scale(z.powi(self.lo)))
    }

    /// `Σ_k k coeff[k] λ0^{k-1}`.
    pub fn derivative_at(&self, z: C64) -> Result<Mat2, LoopError> {
        if self.lo - 1 < 0 && z.norm() == 0.0 {
            return Err(LoopError::PoleAtZero);
        }
        let mut acc = Mat2::zero();
        for (i, c) in self.coeff.iter().enumerate() {
            let k = self.lo + i as i32;
            if k != 0 {
                acc = acc + c.scale(C64::new(k as f64, 0.0) * z.powi(k - 1));
            }
        }
        Ok(acc)
    }

    /// `λ0 (∂_λ L)(λ0) L(λ0)⁻¹`, the log-derivative entering the Sym formula.
    pub fn lambda_log_derivative(&self, lambda0: f64) -> Result<Mat2, LoopError> {
        let z = C64::new(lambda0, 0.0);
        let val = self.evaluate(z)?;
        let det = val.det();
        if det.norm() < 1e-300 || !det.norm().is_finite() {
            return Err(LoopError::SingularFrame);
        }
        let inv = val.adjugate().scale(det.inv());
        Ok(self.derivative_at(z)?.scale(z) * inv)
    }

    /// `λ0 L(λ0)⁻¹ (∂_λ L)(λ0)`, the left-inverse variant of the
    /// log-derivative.
    pub fn lambda_log_derivative_left(&self, lambda0: f64) -> Result<Mat2, LoopError> {
        let z = C64::new(lambda0, 0.0);
        let val = self.evaluate(z)?;
        let det = val.det();
        if det.norm() < 1e-300 || !det.norm().is_finite() {
            return Err(LoopError::SingularFrame);
        }
        let inv = val.adjugate().scale(det.inv());
        Ok(inv * self.derivative_at(z)?.scale(z))
    }

    /// Determinant as a scalar Laurent series.
    pub fn det(&self) -> ScalarLaurent {
        let lo = 2 * self.lo;
        let len = 2 * self.coeff.len() - 1;
        let mut out = vec![C64::new(0.0, 0.0); len];
        for (i, a) in self.coeff.iter().enumerate() {
            for (j, b) in self.coeff.iter().enumerate() {
                out[i + j] += a.e[0][0] * b.e[1][1] - a.e[0][1] * b.e[1][0];
            }
        }
        ScalarLaurent::new(lo, out)
    }

    /// Coefficientwise adjugate; `L · adj(L) = det(L) · Id` as series.
    pub fn adjugate(&self) -> LaurentLoop {
        LaurentLoop::new(self.lo, self.coeff.iter().map(Mat2::adjugate).collect())
    }

    /// True iff diagonal entries vanish for odd powers and off-diagonal
    /// entries vanish for even powers (the σ₃-twisting condition).
    pub fn check_twisted(&self, tol: f64) -> bool {
        self.twisted_defect() <= tol
    }

    /// Largest entry violating the twisting parity pattern.
    pub fn twisted_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, c) in self.coeff.iter().enumerate() {
            let k = self.lo + i as i32;
            let (d, o) = (
                c.e[0][0].norm().max(c.e[1][1].norm()),
                c.e[0][1].norm().max(c.e[1][0].norm()),
            );
            worst = worst.max(if k.rem_euclid(2) == 1 { d } else { o });
        }
        worst
    }

    /// True iff `L(λ0) L(λ0)ᴴ = Id` within `tol`. Only meaningful for loops
    /// whose scalar determinant root has already been divided out.
    pub fn check_unitary_on_ray(&self, lambda0: f64, tol: f64) -> bool {
        match self.evaluate(C64::new(lambda0, 0.0)) {
            Ok(v) => v.unitarity_defect() <= tol,
            Err(_) => false,
        }
    }

    /// Drop leading/trailing coefficients with all entries ≤ `tol`;
    /// never empties the band.
    pub fn trimmed(&self, tol: f64) -> LaurentLoop {
        let mut lo_idx = 0usize;
        let mut hi_idx = self.coeff.len();
        while hi_idx - lo_idx > 1 && self.coeff[lo_idx].is_zero(tol) {
            lo_idx += 1;
        }
        while hi_idx - lo_idx > 1 && self.coeff[hi_idx - 1].is_zero(tol) {
            hi_idx -= 1;
        }
        LaurentLoop::new(self.lo + lo_idx as i32, self.coeff[lo_idx..hi_idx].to_vec())
    }

    /// Explicit normalization at the standard trim threshold.
    pub fn normalized(&self) -> LaurentLoop {
        self.trimmed(TRIM_EPS)
    }

    /// Restriction to powers `k ≥ 0` (missing band yields the zero constant).
    pub fn nonneg_part(&self) -> LaurentLoop {
        self.band_part(0, self.hi().max(0))
    }

    /// Restriction to powers `k ≤ 0`.
    pub fn nonpos_part(&self) -> LaurentLoop {
        self.band_part(self.lo().min(0), 0)
    }

    /// Restriction to powers `lo ..= hi` of this loop.
    pub fn band_part(&self, lo: i32, hi: i32) -> LaurentLoop {
        let hi = hi.max(lo);
        let coeff = (lo..=hi).map(|k| self.at(k)).collect();
        LaurentLoop::new(lo, coeff)
    }

    /// Band norm of the strictly negative-power part.
    pub fn neg_tail_norm(&self) -> f64 {
        (self.lo..0.min(self.hi() + 1))
            .map(|k| self.at(k).frobenius_norm())
            .sum()
    }

    /// Band norm of the strictly positive-power part.
    pub fn pos_tail_norm(&self) -> f64 {
        ((self.lo.max(1))..=self.hi())
            .map(|k| self.at(k).frobenius_norm())
            .sum()
    }

    /// Debug serialization: `{"lo":..,"hi":..,"coeff":[[[re,im],...x4],...]}`
    /// with entries row-major per power.
    pub fn to_debug_json(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("{{\"lo\":{},\"hi\":{},\"coeff\":[", self.lo, self.hi()));
        for (i, m) in self.coeff.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push('[');
            let mut first = true;
            for row in &m.e {
                for x in row {
                    if !first {
                        s.push(',');
                    }
                    first = false;
                    s.push_str(&format!("[{:e},{:e}]", x.re, x.im));
                }
            }
            s.push(']');
        }
        s.push_str("]}");
        s
    }
}
