//! One-variable potential data and its ordered loop products.
//!
//! A normalized potential is the quadruple `(α(n), β(m), p(n), q(m))` with
//! `α(0) = 0` and `0 < |p/2|, |q/2| < 1`. Its unnormalized step factors are
//!
//!   Ξ₊(n) = [[1, (i/2) p e^{-iα} λ], [(i/2) p e^{iα} λ, 1]],
//!   Ξ₋(m) = [[1, -(i/2) q e^{iβ} λ⁻¹], [-(i/2) q e^{-iβ} λ⁻¹, 1]],
//!
//! with determinants `Δ₊² = 1 + (p/2)² λ²` and `Δ₋² = 1 + (q/2)² λ⁻²`.
//! A dressed (generalized) potential conjugates these by one-sided factors
//! `η_n = P₋ˡ Ξ₊ P₋ʳ`, `η_m = P₊ˡ Ξ₋ P₊ʳ` and allows constant unitary
//! initial frames.
//!
//! The ordered products `F₊(n) = F_init Π_j η_n(j)` and
//! `G₋(m) = G_init Π_j η_m(j)` depend on one lattice variable each; the
//! diagonal correction `D(n) = diag(e^{ik/2}, e^{-ik/2})` with the
//! alternating sum
//!
//!   k(n) = Σ_{j=0}^{n-1} (-1)^{j+n} (2α(j) - θˡ(j) + θʳ(j)),   k(0) = 0,
//!
//! compensates the phase drift of the plus product (θ read from the minus
//! dressing factors at λ = ∞). Equivalently k solves
//! `α - (θˡ - θʳ)/2 + (k₁ + k)/2 = 0` backward and forward, which is how
//! negative indices are filled.

use alloc::vec;
use alloc::vec::Vec;

use crate::carrier::CarrierLoop;
use crate::loops::{LaurentLoop, LoopClass, LoopError};
use crate::mat2::{C64, Mat2};
use crate::scalar::ScalarLaurent;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

/// Default product band cap on an `n_max + m_max` lattice; exactness is
/// cheap at desk scale, so overflow is a hard error rather than truncation.
pub fn default_max_band(n_extent: usize, m_extent: usize) -> usize {
    4 * (n_extent + m_extent) + 8
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialError {
    /// The normalization `α(0) = 0` fails.
    AlphaOriginNonzero { value: f64 },
    /// `0 < |p/2| < 1` violated at an index.
    PBoundViolated { n: i32, value: f64 },
    /// `0 < |q/2| < 1` violated at an index.
    QBoundViolated { m: i32, value: f64 },
    /// Table lookup or product requested outside the declared range.
    IndexOutOfRange { index: i32 },
    /// A minus dressing factor has no diagonal limit at λ = ∞.
    NonDiagonalAtInfinity { n: i32, defect: f64 },
    /// A dressing factor is not in its declared loop class.
    DressingClass { minus_side: bool },
    /// An initial frame is not unitary.
    NonUnitaryInitial { defect: f64 },
    Loop(LoopError),
}

impl From<LoopError> for PotentialError {
    fn from(e: LoopError) -> Self {
        PotentialError::Loop(e)
    }
}

impl core::fmt::Display for PotentialError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PotentialError::AlphaOriginNonzero { value } => {
                write!(f, "normalized potentials require α(0) = 0, got {value:.3e}")
            }
            PotentialError::PBoundViolated { n, value } => {
                write!(f, "requires 0 < |p/2| < 1, but p({n}) = {value}")
            }
            PotentialError::QBoundViolated { m, value } => {
                write!(f, "requires 0 < |q/2| < 1, but q({m}) = {value}")
            }
            PotentialError::IndexOutOfRange { index } => {
                write!(f, "index {index} outside the declared potential range")
            }
            PotentialError::NonDiagonalAtInfinity { n, defect } => write!(
                f,
                "minus dressing factor at n = {n} is not diagonal at λ = ∞ (defect {defect:.3e})"
            ),
            PotentialError::DressingClass { minus_side } => write!(
                f,
                "{} dressing factor violates its loop class",
                if *minus_side { "minus" } else { "plus" }
            ),
            PotentialError::NonUnitaryInitial { defect } => {
                write!(f, "initial frame is not unitary (defect {defect:.3e})")
            }
            PotentialError::Loop(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for PotentialError {}

/// One-variable real function: closed-form presets or a lookup table.
///
/// Tables are hard-bounded; there is no extrapolation.
#[derive(Debug, Clone, PartialEq)]
pub enum SampledFn {
    Constant(f64),
    Linear { intercept: f64, slope: f64 },
    Sinusoidal { amplitude: f64, frequency: f64, phase: f64, offset: f64 },
    Table { start: i32, values: Vec<f64> },
}

impl SampledFn {
    pub fn eval(&self, n: i32) -> Result<f64, PotentialError> {
        match self {
            SampledFn::Constant(c) => Ok(*c),
            SampledFn::Linear { intercept, slope } => Ok(intercept + slope * n as f64),
            SampledFn::Sinusoidal { amplitude, frequency, phase, offset } => {
                Ok(offset + amplitude * (frequency * n as f64 + phase).sin())
            }
            SampledFn::Table { start, values } => {
                let idx = n - start;
                if idx < 0 || idx as usize >= values.len() {
                    Err(PotentialError::IndexOutOfRange { index: n })
                } else {
                    Ok(values[idx as usize])
                }
            }
        }
    }
}

/// Discrete normalized potential data `(α, β, p, q)` on declared ranges.
#[derive(Debug, Clone)]
pub struct PotentialPair {
    pub alpha: SampledFn,
    pub beta: SampledFn,
    pub p: SampledFn,
    pub q: SampledFn,
    /// Inclusive `n` interval containing 0.
    pub n_range: (i32, i32),
    /// Inclusive `m` interval containing 0.
    pub m_range: (i32, i32),
}

impl PotentialPair {
    pub fn new(
        alpha: SampledFn,
        beta: SampledFn,
        p: SampledFn,
        q: SampledFn,
        n_range: (i32, i32),
        m_range: (i32, i32),
    ) -> Result<Self, PotentialError> {
        assert!(n_range.0 <= 0 && n_range.1 >= 0, "n range must contain 0");
        assert!(m_range.0 <= 0 && m_range.1 >= 0, "m range must contain 0");
        let pp = PotentialPair { alpha, beta, p, q, n_range, m_range };
        pp.validate()?;
        Ok(pp)
    }

    fn validate(&self) -> Result<(), PotentialError> {
        let a0 = self.alpha.eval(0)?;
        if a0.abs() > 1e-12 {
            return Err(PotentialError::AlphaOriginNonzero { value: a0 });
        }
        for n in self.n_range.0..=self.n_range.1 {
            let p = self.p.eval(n)?;
            if !(p.abs() / 2.0 > 0.0 && p.abs() / 2.0 < 1.0) {
                return Err(PotentialError::PBoundViolated { n, value: p });
            }
        }
        for m in self.m_range.0..=self.m_range.1 {
            let q = self.q.eval(m)?;
            if !(q.abs() / 2.0 > 0.0 && q.abs() / 2.0 < 1.0) {
                return Err(PotentialError::QBoundViolated { m, value: q });
            }
        }
        Ok(())
    }

    fn check_n(&self, n: i32) -> Result<(), PotentialError> {
        if n < self.n_range.0 || n > self.n_range.1 {
            Err(PotentialError::IndexOutOfRange { index: n })
        } else {
            Ok(())
        }
    }

    fn check_m(&self, m: i32) -> Result<(), PotentialError> {
        if m < self.m_range.0 || m > self.m_range.1 {
            Err(PotentialError::IndexOutOfRange { index: m })
        } else {
            Ok(())
        }
    }
}

/// `Δ₊ Ξ₊(n)`: the unnormalized plus potential step, a polynomial carrier
/// with determinant `Δ₊²`.
pub fn xi_plus_unnormalized(pp: &PotentialPair, n: i32) -> Result<CarrierLoop, PotentialError> {
    pp.check_n(n)?;
    let p = pp.p.eval(n)?;
    let alpha = pp.alpha.eval(n)?;
    Ok(xi_plus_raw(p, alpha))
}

/// `Δ₋ Ξ₋(m)`: the unnormalized minus potential step with determinant `Δ₋²`.
pub fn xi_minus_unnormalized(pp: &PotentialPair, m: i32) -> Result<CarrierLoop, PotentialError> {
    pp.check_m(m)?;
    let q = pp.q.eval(m)?;
    let beta = pp.beta.eval(m)?;
    Ok(xi_minus_raw(q, beta))
}

pub fn xi_plus_raw(p: f64, alpha: f64) -> CarrierLoop {
    let ip2 = C64::new(0.0, p / 2.0);
    CarrierLoop {
        mat: LaurentLoop::new(
            0,
            vec![
                Mat2::identity(),
                Mat2::off_diag(ip2 * C64::from_polar(1.0, -alpha), ip2 * C64::from_polar(1.0, alpha)),
            ],
        ),
        det: ScalarLaurent::delta_plus_sq(p),
    }
}

pub fn xi_minus_raw(q: f64, beta: f64) -> CarrierLoop {
    let miq2 = C64::new(0.0, -q / 2.0);
    CarrierLoop {
        mat: LaurentLoop::new(
            -1,
            vec![
                Mat2::off_diag(miq2 * C64::from_polar(1.0, beta), miq2 * C64::from_polar(1.0, -beta)),
                Mat2::identity(),
            ],
        ),
        det: ScalarLaurent::delta_minus_sq(q),
    }
}

/// Per-index dressing factor sequence.
#[derive(Debug, Clone)]
pub enum Dressing {
    Identity,
    /// The same factor at every index.
    Constant(CarrierLoop),
    /// Explicit per-index table starting at `start`.
    Table { start: i32, items: Vec<CarrierLoop> },
}

impl Dressing {
    fn at(&self, idx: i32) -> Result<CarrierLoop, PotentialError> {
        match self {
            Dressing::Identity => Ok(CarrierLoop::identity()),
            Dressing::Constant(c) => Ok(c.clone()),
            Dressing::Table { start, items } => {
                let i = idx - start;
                if i < 0 || i as usize >= items.len() {
                    Err(PotentialError::IndexOutOfRange { index: idx })
                } else {
                    Ok(items[i as usize].clone())
                }
            }
        }
    }

    fn is_identity(&self) -> bool {
        matches!(self, Dressing::Identity)
    }

    fn class_ok(&self, class: LoopClass) -> bool {
        let check = |c: &CarrierLoop| class.satisfied_by(&c.mat, 1e-12);
        match self {
            Dressing::Identity => true,
            Dressing::Constant(c) => check(c),
            Dressing::Table { items, .. } => items.iter().all(check),
        }
    }
}

/// Generalized potential: dressed steps plus constant unitary initial frames.
#[derive(Debug, Clone)]
pub struct DressedPotential {
    pub base: PotentialPair,
    pub p_minus_left: Dressing,
    pub p_minus_right: Dressing,
    pub p_plus_left: Dressing,
    pub p_plus_right: Dressing,
    pub f_init: Mat2,
    pub g_init: Mat2,
}

impl DressedPotential {
    pub fn new(
        base: PotentialPair,
        p_minus_left: Dressing,
        p_minus_right: Dressing,
        p_plus_left: Dressing,
        p_plus_right: Dressing,
        f_init: Mat2,
        g_init: Mat2,
    ) -> Result<Self, PotentialError> {
        for (d, class) in [
            (&p_minus_left, LoopClass::Minus),
            (&p_minus_right, LoopClass::Minus),
        ] {
            if !d.class_ok(class) {
                return Err(PotentialError::DressingClass { minus_side: true });
            }
        }
        for (d, class) in [
            (&p_plus_left, LoopClass::Plus),
            (&p_plus_right, LoopClass::Plus),
        ] {
            if !d.class_ok(class) {
                return Err(PotentialError::DressingClass { minus_side: false });
            }
        }
        for init in [&f_init, &g_init] {
            let defect = init.unitarity_defect();
            if defect > 1e-10 {
                return Err(PotentialError::NonUnitaryInitial { defect });
            }
        }
        Ok(DressedPotential {
            base,
            p_minus_left,
            p_minus_right,
            p_plus_left,
            p_plus_right,
            f_init,
            g_init,
        })
    }

    /// Normalized potential viewed as a trivially dressed one.
    pub fn from_pair(base: PotentialPair) -> Self {
        DressedPotential {
            base,
            p_minus_left: Dressing::Identity,
            p_minus_right: Dressing::Identity,
            p_plus_left: Dressing::Identity,
            p_plus_right: Dressing::Identity,
            f_init: Mat2::identity(),
            g_init: Mat2::identity(),
        }
    }

    /// Diagonal phase θ(n) of a minus dressing factor at λ = ∞, where
    /// `P₋(∞) = diag(e^{iθ/2}, e^{-iθ/2})`.
    fn theta_at_infinity(d: &Dressing, n: i32) -> Result<f64, PotentialError> {
        if d.is_identity() {
            return Ok(0.0);
        }
        let c = d.at(n)?;
        // The λ⁰ coefficient of a minus carrier is its value at ∞
        // (det(∞) = 1 for the Δ₋-type determinants carried here).
        let top = c.mat.at(0);
        let off = top.e[0][1].norm().max(top.e[1][0].norm());
        if off > 1e-12 {
            return Err(PotentialError::NonDiagonalAtInfinity { n, defect: off });
        }
        Ok(2.0 * top.e[0][0].arg())
    }

    /// Diagonal phase ω(m) of a plus dressing factor at λ = 0.
    pub fn omega_at_zero(d: &Dressing, m: i32) -> Result<f64, PotentialError> {
        if d.is_identity() {
            return Ok(0.0);
        }
        let c = d.at(m)?;
        let bottom = c.mat.at(0);
        let off = bottom.e[0][1].norm().max(bottom.e[1][0].norm());
        if off > 1e-12 {
            return Err(PotentialError::NonDiagonalAtInfinity { n: m, defect: off });
        }
        Ok(2.0 * bottom.e[0][0].arg())
    }

    pub fn theta_l(&self, n: i32) -> Result<f64, PotentialError> {
        Self::theta_at_infinity(&self.p_minus_left, n)
    }

    pub fn theta_r(&self, n: i32) -> Result<f64, PotentialError> {
        Self::theta_at_infinity(&self.p_minus_right, n)
    }

    pub fn omega_l(&self, m: i32) -> Result<f64, PotentialError> {
        Self::omega_at_zero(&self.p_plus_left, m)
    }

    pub fn omega_r(&self, m: i32) -> Result<f64, PotentialError> {
        Self::omega_at_zero(&self.p_plus_right, m)
    }

    /// Dressed plus step `η_n = P₋ˡ Ξ₊ P₋ʳ` as a carrier.
    pub fn eta_n(&self, n: i32, max_band: usize) -> Result<CarrierLoop, PotentialError> {
        let xi = xi_plus_unnormalized(&self.base, n)?;
        let l = self.p_minus_left.at(n)?;
        let r = self.p_minus_right.at(n)?;
        Ok(l.mul(&xi, max_band)?.mul(&r, max_band)?)
    }

    /// Dressed minus step `η_m = P₊ˡ Ξ₋ P₊ʳ`.
    pub fn eta_m(&self, m: i32, max_band: usize) -> Result<CarrierLoop, PotentialError> {
        let xi = xi_minus_unnormalized(&self.base, m)?;
        let l = self.p_plus_left.at(m)?;
        let r = self.p_plus_right.at(m)?;
        Ok(l.mul(&xi, max_band)?.mul(&r, max_band)?)
    }
}

/// Either flavor of potential input accepted by the frame builders.
#[derive(Debug, Clone)]
pub enum Potential {
    Normalized(PotentialPair),
    Dressed(DressedPotential),
}

impl Potential {
    pub fn as_dressed(&self) -> DressedPotential {
        match self {
            Potential::Normalized(pp) => DressedPotential::from_pair(pp.clone()),
            Potential::Dressed(dp) => dp.clone(),
        }
    }

    pub fn pair(&self) -> &PotentialPair {
        match self {
            Potential::Normalized(pp) => pp,
            Potential::Dressed(dp) => &dp.base,
        }
    }
}

/// Ordered plus product `F₊(n) = F_init η(0) η(1) ⋯ η(n-1)`, extended to
/// negative `n` by the exact rational inverse `F₊(n-1) = F₊(n) η(n-1)⁻¹`.
pub fn accumulate_f_plus(
    dp: &DressedPotential,
    n: i32,
    max_band: usize,
) -> Result<CarrierLoop, PotentialError> {
    if n > 0 {
        dp.base.check_n(n - 1)?;
    } else if n < 0 {
        dp.base.check_n(n)?;
    }
    let mut acc = CarrierLoop::from_unitary(dp.f_init);
    if n >= 0 {
        for j in 0..n {
            acc = acc.mul(&dp.eta_n(j, max_band)?, max_band)?;
        }
    } else {
        for j in (n..0).rev() {
            acc = acc.mul(&dp.eta_n(j, max_band)?.inverse(), max_band)?;
        }
    }
    Ok(acc)
}

/// Ordered minus product `G₋(m)`, mirror of [`accumulate_f_plus`].
pub fn accumulate_g_minus(
    dp: &DressedPotential,
    m: i32,
    max_band: usize,
) -> Result<CarrierLoop, PotentialError> {
    if m > 0 {
        dp.base.check_m(m - 1)?;
    } else if m < 0 {
        dp.base.check_m(m)?;
    }
    let mut acc = CarrierLoop::from_unitary(dp.g_init);
    if m >= 0 {
        for j in 0..m {
            acc = acc.mul(&dp.eta_m(j, max_band)?, max_band)?;
        }
    } else {
        for j in (m..0).rev() {
            acc = acc.mul(&dp.eta_m(j, max_band)?.inverse(), max_band)?;
        }
    }
    Ok(acc)
}

/// Precomputed ordered products over a lattice range; fill is serial, reads
/// are shared and immutable.
#[derive(Debug, Clone)]
pub struct ProductTable {
    n_min: i32,
    m_min: i32,
    f_plus: Vec<CarrierLoop>,
    g_minus: Vec<CarrierLoop>,
}

impl ProductTable {
    pub fn build(
        dp: &DressedPotential,
        n_range: (i32, i32),
        m_range: (i32, i32),
        max_band: usize,
    ) -> Result<Self, PotentialError> {
        // Forward-fill from the base point in each direction, reusing the
        // previous product instead of recomputing from scratch.
        let mut f_plus = vec![CarrierLoop::identity(); (n_range.1 - n_range.0 + 1) as usize];
        let mut g_minus = vec![CarrierLoop::identity(); (m_range.1 - m_range.0 + 1) as usize];

        let idx_n = |n: i32| (n - n_range.0) as usize;
        let idx_m = |m: i32| (m - m_range.0) as usize;

        f_plus[idx_n(0)] = CarrierLoop::from_unitary(dp.f_init);
        for n in 1..=n_range.1 {
            f_plus[idx_n(n)] = f_plus[idx_n(n - 1)].mul(&dp.eta_n(n - 1, max_band)?, max_band)?;
        }
        for n in (n_range.0..0).rev() {
            f_plus[idx_n(n)] = f_plus[idx_n(n + 1)].mul(&dp.eta_n(n, max_band)?.inverse(), max_band)?;
        }

        g_minus[idx_m(0)] = CarrierLoop::from_unitary(dp.g_init);
        for m in 1..=m_range.1 {
            g_minus[idx_m(m)] = g_minus[idx_m(m - 1)].mul(&dp.eta_m(m - 1, max_band)?, max_band)?;
        }
        for m in (m_range.0..0).rev() {
            g_minus[idx_m(m)] = g_minus[idx_m(m + 1)].mul(&dp.eta_m(m, max_band)?.inverse(), max_band)?;
        }

        Ok(ProductTable {
            n_min: n_range.0,
            m_min: m_range.0,
            f_plus,
            g_minus,
        })
    }

    pub fn f_plus(&self, n: i32) -> &CarrierLoop {
        &self.f_plus[(n - self.n_min) as usize]
    }

    pub fn g_minus(&self, m: i32) -> &CarrierLoop {
        &self.g_minus[(m - self.m_min) as usize]
    }
}

/// The diagonal correction `D(n) = diag(e^{ik/2}, e^{-ik/2})`.
#[derive(Debug, Clone)]
pub struct DiagonalCorrection {
    n_min: i32,
    k: Vec<f64>,
}

impl DiagonalCorrection {
    pub fn k(&self, n: i32) -> f64 {
        self.k[(n - self.n_min) as usize]
    }

    pub fn d(&self, n: i32) -> Mat2 {
        Mat2::phase_diag(self.k(n) / 2.0)
    }

    pub fn d_inv(&self, n: i32) -> Mat2 {
        Mat2::phase_diag(-self.k(n) / 2.0)
    }
}

/// Build the diagonal correction over the potential's `n` range.
///
/// For normalized potentials θˡ = θʳ = 0 and this reduces to
/// `k(n) = 2 Σ_{j<n} (-1)^{j+n} α(j)`.
pub fn diagonal_correction(dp: &DressedPotential) -> Result<DiagonalCorrection, PotentialError> {
    let (n_min, n_max) = dp.base.n_range;
    let step = |j: i32| -> Result<f64, PotentialError> {
        Ok(2.0 * dp.base.alpha.eval(j)? - dp.theta_l(j)? + dp.theta_r(j)?)
    };

    let mut k = vec![0.0f64; (n_max - n_min + 1) as usize];
    let idx = |n: i32| (n - n_min) as usize;
    // k(n+1) = -step(n) - k(n), the recursion underlying the alternating sum.
    for n in 0..n_max {
        k[idx(n + 1)] = -step(n)? - k[idx(n)];
    }
    for n in (n_min..0).rev() {
        k[idx(n)] = -step(n)? - k[idx(n + 1)];
    }
    Ok(DiagonalCorrection { n_min, k })
}
