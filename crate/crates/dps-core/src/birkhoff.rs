//! Birkhoff (Wiener–Hopf) factorization of matrix Laurent loops.
//!
//! Any loop Φ in the twisted SU₂ loop group splits uniquely both ways,
//!
//!   Φ = V₋ · W     with  V₋(∞) = Id,  W holomorphic in the disk,
//!   Φ = F₊ · F₋    with  F₊(0) = Id,  F₋ holomorphic outside,
//!
//! and the maps are diffeomorphisms (all partial indices vanish for loops
//! into a compact group). Numerically we exploit that the factors of the
//! loops arising here are rational with poles strictly off the unit circle:
//!
//! * parameterize the *inverse* of the normalized factor by a truncated
//!   band, e.g. `V₋⁻¹ = Id + Σ_{k=1..K} C_k λ⁻ᵏ`;
//! * demand that the coefficients of λ⁻ʲ, j = 1..K of `V₋⁻¹ Φ` vanish —
//!   a 2K×2K block-Toeplitz linear system in the `C_k` (two shared-matrix
//!   solves, one per coefficient row);
//! * rebuild both factors, measure the reconstruction residual in the band
//!   norm, and double K until it clears the configured tolerance.
//!
//! Coefficients of the true factors decay geometrically (rate = largest
//! pole radius inside the circle), so the doubling loop terminates quickly
//! and a failure to converge is reported, never papered over.
//!
//! Scalar determinants are *not* factored here; callers strip the Δ±
//! normalizers first (see [`crate::carrier`]), which keeps Φ polynomial.

use alloc::vec;
use alloc::vec::Vec;

use crate::linsolve::{solve_dense, SingularMatrix};
use crate::loops::{LaurentLoop, LoopClass};
use crate::mat2::{C64, Mat2};

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

/// Truncation and tolerance knobs for the factorization solver.
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    /// Initial number of unknown coefficient blocks.
    pub truncation_k: usize,
    /// Band-norm reconstruction residual demanded of a split, relative to
    /// `max(1, ‖Φ‖)` (frame carriers grow geometrically with the lattice
    /// extent, so an absolute criterion would chase the rounding floor).
    pub residual_tol: f64,
    /// Adaptive ceiling for the doubling loop.
    pub max_k: usize,
    /// Equispaced points for the determinant screen on the unit circle.
    pub circle_samples: usize,
    /// Pivot-ratio threshold above which a split is flagged ill-conditioned.
    pub condition_warn: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            truncation_k: 8,
            residual_tol: 1e-11,
            max_k: 1024,
            circle_samples: 64,
            condition_warn: 1e12,
        }
    }
}

impl SolverConfig {
    /// Pick the initial truncation from the factor coefficient decay rate
    /// `r` (the largest pole radius inside the unit circle, `max |q/2|` for
    /// the loops built in this crate): K ≈ log(tol) / log(r).
    pub fn for_decay_radius(r: f64, residual_tol: f64) -> Self {
        let mut cfg = SolverConfig {
            residual_tol,
            ..SolverConfig::default()
        };
        if r > 0.0 && r < 1.0 {
            let k = ((residual_tol / 10.0).ln() / r.ln()).ceil();
            cfg.truncation_k = (k as usize).clamp(4, cfg.max_k);
        }
        cfg
    }
}

/// Which normalized factor comes first in the product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BirkhoffOrder {
    /// `Φ = plus · minus` with `plus(0) = Id`.
    PlusMinus,
    /// `Φ = minus · plus` with `minus(∞) = Id`.
    MinusPlus,
}

#[derive(Debug, Clone)]
pub struct BirkhoffSplit {
    pub order: BirkhoffOrder,
    pub plus: LaurentLoop,
    pub minus: LaurentLoop,
    /// Band norm of `Φ - product`.
    pub residual: f64,
    /// Pivot-ratio condition proxy of the final Toeplitz solve.
    pub condition: f64,
    /// Truncation at which the solve converged.
    pub truncation_k: usize,
}

impl BirkhoffSplit {
    pub fn reconstruct(&self) -> LaurentLoop {
        match self.order {
            BirkhoffOrder::PlusMinus => self.plus.mul(&self.minus),
            BirkhoffOrder::MinusPlus => self.minus.mul(&self.plus),
        }
    }

    /// Both factors satisfy the class constraints of the order.
    pub fn classes_ok(&self, tol: f64) -> bool {
        match self.order {
            BirkhoffOrder::PlusMinus => {
                LoopClass::PlusNormalized.satisfied_by(&self.plus, tol)
                    && LoopClass::Minus.satisfied_by(&self.minus, tol)
            }
            BirkhoffOrder::MinusPlus => {
                LoopClass::MinusNormalized.satisfied_by(&self.minus, tol)
                    && LoopClass::Plus.satisfied_by(&self.plus, tol)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BirkhoffError {
    /// The determinant screen found a (near-)zero on the unit circle.
    SingularOnCircle { min_abs_det: f64 },
    /// Residual still above tolerance at the truncation ceiling.
    NoConvergence { residual: f64, truncation_k: usize },
    /// The block-Toeplitz system is rank deficient at the ceiling — the
    /// signature of nontrivial partial indices, which the theory excludes
    /// for loops into SU₂.
    SingularToeplitz { truncation_k: usize },
}

impl core::fmt::Display for BirkhoffError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            BirkhoffError::SingularOnCircle { min_abs_det } => write!(
                f,
                "loop determinant nearly vanishes on the unit circle (min |det| = {min_abs_det:.3e})"
            ),
            BirkhoffError::NoConvergence { residual, truncation_k } => write!(
                f,
                "factorization residual {residual:.3e} above tolerance at K = {truncation_k}"
            ),
            BirkhoffError::SingularToeplitz { truncation_k } => {
                write!(f, "singular block-Toeplitz system at K = {truncation_k}")
            }
        }
    }
}

impl core::error::Error for BirkhoffError {}

/// `Φ = V₋ · W` with `V₋` minus-normalized and `W` in the plus class.
pub fn split_minus_plus(
    phi: &LaurentLoop,
    cfg: &SolverConfig,
) -> Result<BirkhoffSplit, BirkhoffError> {
    split(phi, cfg, BirkhoffOrder::MinusPlus)
}

/// `Φ = F₊ · F₋` with `F₊` plus-normalized and `F₋` in the minus class.
pub fn split_plus_minus(
    phi: &LaurentLoop,
    cfg: &SolverConfig,
) -> Result<BirkhoffSplit, BirkhoffError> {
    split(phi, cfg, BirkhoffOrder::PlusMinus)
}

/// Max pointwise reconstruction error over 16 circle samples; the
/// uniqueness diagnostic used by tests.
pub fn factor_uniqueness_check(phi: &LaurentLoop, split: &BirkhoffSplit) -> f64 {
    let rec = split.reconstruct();
    let mut worst = 0.0f64;
    for j in 0..16 {
        let theta = core::f64::consts::TAU * j as f64 / 16.0;
        let z = C64::from_polar(1.0, theta);
        let a = phi.evaluate(z).unwrap_or_else(|_| Mat2::zero());
        let b = rec.evaluate(z).unwrap_or_else(|_| Mat2::zero());
        worst = worst.max((a - b).frobenius_norm());
    }
    worst
}

fn split(
    phi: &LaurentLoop,
    cfg: &SolverConfig,
    order: BirkhoffOrder,
) -> Result<BirkhoffSplit, BirkhoffError> {
    screen_circle_determinant(phi, cfg)?;

    let scale = phi.band_norm().max(1.0);
    let mut k = cfg.truncation_k.max(1).min(cfg.max_k.max(1));
    loop {
        match solve_at_truncation(phi, k, order) {
            Ok(split) if split.residual <= cfg.residual_tol * scale => return Ok(split),
            Ok(split) => {
                if k >= cfg.max_k {
                    return Err(BirkhoffError::NoConvergence {
                        residual: split.residual,
                        truncation_k: k,
                    });
                }
            }
            Err(SingularMatrix) => {
                if k >= cfg.max_k {
                    return Err(BirkhoffError::SingularToeplitz { truncation_k: k });
                }
            }
        }
        k = (2 * k).min(cfg.max_k);
    }
}

fn screen_circle_determinant(
    phi: &LaurentLoop,
    cfg: &SolverConfig,
) -> Result<(), BirkhoffError> {
    let det = phi.det();
    let samples = cfg.circle_samples.max(4);
    let mut min_abs = f64::INFINITY;
    for j in 0..samples {
        let theta = core::f64::consts::TAU * j as f64 / samples as f64;
        let z = C64::from_polar(1.0, theta);
        let v = det.evaluate(z).expect("circle point is nonzero");
        min_abs = min_abs.min(v.norm());
    }
    if min_abs < 1e-10 {
        return Err(BirkhoffError::SingularOnCircle { min_abs_det: min_abs });
    }
    Ok(())
}

/// One factorization attempt at fixed truncation K.
///
/// Unknowns are the blocks of the inverse normalized factor
/// `X = Id + Σ_{k=1..K} C_k λ^∓ᵏ`; the vanishing of the offending-side
/// coefficients of `X Φ` is linear in the `C_k` with the same 2K×2K matrix
/// for both coefficient rows.
fn solve_at_truncation(
    phi: &LaurentLoop,
    k: usize,
    order: BirkhoffOrder,
) -> Result<BirkhoffSplit, SingularMatrix> {
    // Power of λ carried by unknown block index k and by equation index j.
    let sgn: i32 = match order {
        BirkhoffOrder::MinusPlus => -1,
        BirkhoffOrder::PlusMinus => 1,
    };

    let n = 2 * k;
    let mut a = vec![C64::new(0.0, 0.0); n * n];
    let mut rhs = vec![C64::new(0.0, 0.0); n * 2];

    // Equation (j, c): Σ_{kk, s} C_kk[r][s] Φ_{sgn·(kk - j)}[s][c] = -Φ_{-sgn·j}[r][c].
    for j in 1..=k {
        for kk in 1..=k {
            // Unknown block kk carries λ^{sgn·kk}; the condition sits at power
            // sgn·j, so Φ contributes its coefficient at sgn·(j - kk).
            let block = phi.at(sgn * (j as i32 - kk as i32));
            for c in 0..2 {
                for s in 0..2 {
                    a[((j - 1) * 2 + c) * n + ((kk - 1) * 2 + s)] = block.e[s][c];
                }
            }
        }
        let b = phi.at(sgn * j as i32);
        for c in 0..2 {
            for r in 0..2 {
                rhs[((j - 1) * 2 + c) * 2 + r] = -b.e[r][c];
            }
        }
    }

    let report = solve_dense(&mut a, n, &mut rhs, 2)?;

    // Assemble X = Id + Σ C_kk λ^{sgn·kk}.
    let mut x_coeffs = vec![Mat2::zero(); k + 1];
    x_coeffs[0] = Mat2::identity();
    for kk in 1..=k {
        let mut m = Mat2::zero();
        for r in 0..2 {
            for s in 0..2 {
                m.e[r][s] = rhs[((kk - 1) * 2 + s) * 2 + r];
            }
        }
        x_coeffs[kk] = m;
    }
    let x = match order {
        BirkhoffOrder::MinusPlus => {
            let mut rev = x_coeffs.clone();
            rev.reverse();
            LaurentLoop::new(-(k as i32), rev)
        }
        BirkhoffOrder::PlusMinus => LaurentLoop::new(0, x_coeffs),
    };

    // The unnormalized factor is the good-side part of X Φ; the normalized
    // factor is the series inverse of X, truncated at geometric decay.
    let product = x.mul(phi);
    let (normalized, other) = match order {
        BirkhoffOrder::MinusPlus => (invert_normalized(&x, k, -1), product.nonneg_part()),
        BirkhoffOrder::PlusMinus => (invert_normalized(&x, k, 1), product.nonpos_part()),
    };

    let (plus, minus) = match order {
        BirkhoffOrder::MinusPlus => (other, normalized),
        BirkhoffOrder::PlusMinus => (normalized, other),
    };

    let split = BirkhoffSplit {
        order,
        plus,
        minus,
        residual: 0.0,
        condition: report.condition_proxy(),
        truncation_k: k,
    };
    let residual = split.reconstruct().sub(phi).band_norm();
    Ok(BirkhoffSplit { residual, ..split })
}

/// Series inverse of `X = Id + Σ_{k=1..K} C_k λ^{sgn·k}`: the recursion
/// `D_j = -Σ_{k≤j} C_k D_{j-k}` truncated once the geometric tail is
/// negligible.
fn invert_normalized(x: &LaurentLoop, k: usize, sgn: i32) -> LaurentLoop {
    let cap = 2 * k + 16;
    let c = |idx: usize| x.at(sgn * idx as i32);
    let mut d: Vec<Mat2> = Vec::with_capacity(cap + 1);
    d.push(Mat2::identity());
    for j in 1..=cap {
        let mut s = Mat2::zero();
        for kk in 1..=j.min(k) {
            s = s + c(kk) * d[j - kk];
        }
        let next = -s;
        let small = next.frobenius_norm() < 1e-16;
        d.push(next);
        if small && j > k {
            break;
        }
    }
    match sgn {
        1 => LaurentLoop::new(0, d),
        _ => {
            d.reverse();
            let lo = -(d.len() as i32 - 1);
            LaurentLoop::new(lo, d)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ScalarLaurent;
    use alloc::vec;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn xi_plus(p: f64, alpha: f64) -> LaurentLoop {
        let ip2 = C64::new(0.0, p / 2.0);
        LaurentLoop::new(
            0,
            vec![
                Mat2::identity(),
                Mat2::off_diag(ip2 * C64::from_polar(1.0, -alpha), ip2 * C64::from_polar(1.0, alpha)),
            ],
        )
    }

    fn xi_minus(q: f64, beta: f64) -> LaurentLoop {
        let miq2 = C64::new(0.0, -q / 2.0);
        LaurentLoop::new(
            -1,
            vec![
                Mat2::off_diag(miq2 * C64::from_polar(1.0, beta), miq2 * C64::from_polar(1.0, -beta)),
                Mat2::identity(),
            ],
        )
    }

    /// Unnormalized U factor of the moving-frame system at angle step du.
    fn u_factor(du: f64, p: f64) -> LaurentLoop {
        let ip2 = c(0.0, p / 2.0);
        LaurentLoop::new(
            0,
            vec![
                Mat2::diag(C64::from_polar(1.0, -du / 2.0), C64::from_polar(1.0, du / 2.0)),
                Mat2::off_diag(ip2, ip2),
            ],
        )
    }

    fn v_factor(su: f64, q: f64) -> LaurentLoop {
        let miq2 = c(0.0, -q / 2.0);
        LaurentLoop::new(
            -1,
            vec![
                Mat2::off_diag(
                    miq2 * C64::from_polar(1.0, su / 2.0),
                    miq2 * C64::from_polar(1.0, -su / 2.0),
                ),
                Mat2::identity(),
            ],
        )
    }

    #[test]
    fn identity_splits_trivially() {
        let cfg = SolverConfig::default();
        let id = LaurentLoop::identity();
        for s in [
            split_minus_plus(&id, &cfg).unwrap(),
            split_plus_minus(&id, &cfg).unwrap(),
        ] {
            assert!(s.residual < 1e-15);
            assert!(s.plus.normalized().sub(&id).band_norm() < 1e-14);
            assert!(s.minus.normalized().sub(&id).band_norm() < 1e-14);
        }
    }

    #[test]
    fn plus_input_passes_through_minus_plus() {
        let phi = xi_plus(1.0, 0.3).mul(&xi_plus(0.7, -0.9));
        let s = split_minus_plus(&phi, &SolverConfig::default()).unwrap();
        assert!(s.minus.normalized().sub(&LaurentLoop::identity()).band_norm() < 1e-12);
        assert!(s.plus.sub(&phi).band_norm() < 1e-11);
    }

    #[test]
    fn minus_normalized_input_passes_through_plus_minus() {
        let phi = xi_minus(0.9, 0.2).mul(&xi_minus(0.4, 1.4));
        let s = split_plus_minus(&phi, &SolverConfig::default()).unwrap();
        assert!(s.plus.normalized().sub(&LaurentLoop::identity()).band_norm() < 1e-12);
        assert!(s.minus.sub(&phi).band_norm() < 1e-11);
    }

    #[test]
    fn amsler_axis_split_is_explicit() {
        // Φ = diag(e^{iγ}, e^{-iγ}) Ξ₋^m factors as
        //   V₋ = diag Ξ₋^m diag⁻¹,  W = diag.
        let gamma = core::f64::consts::FRAC_PI_4;
        let diag = Mat2::phase_diag(gamma);
        let diag_inv = Mat2::phase_diag(-gamma);
        let xim = xi_minus(1.0, 0.0);
        let xim2 = xim.mul(&xim);
        let phi = LaurentLoop::constant(diag).mul(&xim2);

        let s = split_minus_plus(&phi, &SolverConfig::default()).unwrap();
        assert!(s.residual < 1e-12);

        let v_minus_expect = LaurentLoop::constant(diag)
            .mul(&xim2)
            .mul(&LaurentLoop::constant(diag_inv));
        let w_expect = LaurentLoop::constant(diag);
        assert!(s.minus.sub(&v_minus_expect).band_norm() < 1e-11);
        assert!(s.plus.trimmed(1e-13).sub(&w_expect).band_norm() < 1e-11);
    }

    #[test]
    fn random_uv_products_split_both_ways() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let cfg = SolverConfig::for_decay_radius(0.5, 1e-11);
        for _ in 0..10 {
            let mut phi = LaurentLoop::identity();
            for j in 0..6 {
                let ang = rng.gen_range(-core::f64::consts::PI..core::f64::consts::PI);
                phi = if j % 2 == 0 {
                    phi.mul(&u_factor(ang, 1.0))
                } else {
                    phi.mul(&v_factor(ang, 1.0))
                };
            }
            for s in [
                split_minus_plus(&phi, &cfg).unwrap(),
                split_plus_minus(&phi, &cfg).unwrap(),
            ] {
                assert!(s.residual < 1e-10, "residual {}", s.residual);
                assert!(s.classes_ok(1e-9));
                assert!(factor_uniqueness_check(&phi, &s) < 1e-9);
                // Twisting passes to both factors.
                assert!(s.plus.check_twisted(1e-10));
                assert!(s.minus.check_twisted(1e-10));
            }
        }
    }

    #[test]
    fn plus_factor_reconstructs_pointwise() {
        // F₊ must reproduce Φ F₋⁻¹ pointwise on circle samples.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let mut phi = LaurentLoop::identity();
        for j in 0..6 {
            let ang = rng.gen_range(-core::f64::consts::PI..core::f64::consts::PI);
            phi = if j % 2 == 0 {
                phi.mul(&u_factor(ang, 1.0))
            } else {
                phi.mul(&v_factor(ang, 1.0))
            };
        }
        let s = split_plus_minus(&phi, &SolverConfig::for_decay_radius(0.5, 1e-11)).unwrap();
        assert!(s.residual < 1e-10);
        for j in 0..8 {
            let z = C64::from_polar(1.0, core::f64::consts::TAU * j as f64 / 8.0);
            let lhs = s.plus.evaluate(z).unwrap();
            let fm = s.minus.evaluate(z).unwrap();
            let rhs = phi.evaluate(z).unwrap() * fm.inverse().unwrap();
            assert!((lhs - rhs).frobenius_norm() < 1e-9);
        }
    }

    #[test]
    fn idempotent_and_truncation_stable() {
        let phi = u_factor(0.8, 1.0)
            .mul(&v_factor(-0.4, 1.0))
            .mul(&u_factor(1.9, 1.0))
            .mul(&v_factor(2.5, 1.0));
        let cfg = SolverConfig::for_decay_radius(0.5, 1e-11);
        let s1 = split_minus_plus(&phi, &cfg).unwrap();

        // Splitting the reconstruction returns the same factors.
        let s2 = split_minus_plus(&s1.reconstruct(), &cfg).unwrap();
        assert!(s1.minus.sub(&s2.minus).band_norm() < 1e-10);

        // A higher truncation agrees on the shared band.
        let cfg_hi = SolverConfig {
            truncation_k: 2 * s1.truncation_k,
            ..cfg
        };
        let s3 = split_minus_plus(&phi, &cfg_hi).unwrap();
        let shared_lo = s1.minus.lo().max(s3.minus.lo());
        let d = s1
            .minus
            .band_part(shared_lo, 0)
            .sub(&s3.minus.band_part(shared_lo, 0))
            .band_norm();
        assert!(d < 1e-9, "factor drift {d}");
    }

    #[test]
    fn singular_on_circle_is_screened() {
        // det(Id + λ σ₁) = 1 - λ² vanishes at λ = ±1.
        let phi = LaurentLoop::new(0, vec![Mat2::identity(), Mat2::sigma1()]);
        let err = split_minus_plus(&phi, &SolverConfig::default()).unwrap_err();
        assert!(matches!(err, BirkhoffError::SingularOnCircle { .. }));
    }

    #[test]
    fn no_convergence_reported_at_ceiling() {
        let phi = u_factor(0.9, 1.0).mul(&v_factor(0.3, 1.0));
        let cfg = SolverConfig {
            truncation_k: 1,
            max_k: 2,
            residual_tol: 1e-14,
            ..SolverConfig::default()
        };
        let err = split_minus_plus(&phi, &cfg).unwrap_err();
        assert!(matches!(err, BirkhoffError::NoConvergence { .. }));
    }

    #[test]
    fn det_is_multiplicative_sanity() {
        let a = u_factor(0.5, 1.2);
        let b = v_factor(1.1, 0.7);
        let lhs = a.mul(&b).det().trim(1e-15);
        let rhs = a.det().mul(&b.det()).trim(1e-15);
        assert!(lhs.sub(&rhs).band_norm() < 1e-13);
        let _ = ScalarLaurent::one();
    }
}
