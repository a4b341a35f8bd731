//! Frame assembly from potentials (the converse construction) and potential
//! extraction from frames (the forward direction).
//!
//! Given one-sided products `F₊(n)`, `G₋(m)` and the diagonal correction
//! `D(n)`, each lattice site gets its own Birkhoff problem
//!
//!   Φ(n, m) = (F₊ D)⁻¹ G₋ = V₋ V₊⁻¹,
//!
//! and the extended frame is `F = G₋ V₊ = F₊ D V₋`. Everything is done on
//! polynomial carriers: with `F̂₊ = Π Δ₊·ξ₊` and `Ĝ₋ = Π Δ₋·ξ₋`,
//!
//!   Φ̂ = D⁻¹ adj(F̂₊) Ĝ₋,   Φ̂ = V̂₋ Ŵ,   V₊ = adj(Ŵ)/ΠΔ₊,
//!   F̂ = Ĝ₋ adj(Ŵ),        det F̂ = ΠΔ₊² · ΠΔ₋².
//!
//! Sites are independent work items; [`FrameBuilder::site`] is pure and may
//! be called concurrently against the shared product table.
//!
//! The forward direction splits a given frame field both ways per site,
//! checks that the plus factor is independent of `m` and the minus factor
//! of `n`, and reads the potential data off the one-step Maurer–Cartan
//! quotients `F₊⁻¹(F₊)₁` and `G₋⁻¹(G₋)₂`.

use alloc::vec::Vec;

use crate::birkhoff::{self, BirkhoffError, SolverConfig};
use crate::carrier::CarrierLoop;
use crate::hirota::AngleField;
use crate::lattice::{Lattice2, Rect};
use crate::loops::{LaurentLoop, LoopError};
use crate::mat2::{C64, Mat2};
use crate::potentials::{
    diagonal_correction, DiagonalCorrection, DressedPotential, Potential, PotentialError,
    ProductTable,
};

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, PartialEq)]
pub enum FrameError {
    Potential(PotentialError),
    Birkhoff { n: i32, m: i32, source: BirkhoffError },
    /// The det-normalized frame fails the unitarity check at λ = 1.
    NonUnitaryFrame { n: i32, m: i32, defect: f64 },
    /// A phase recursion step exceeded π; the branch is ambiguous.
    BranchAmbiguity { n: i32, m: i32, jump: f64 },
    /// A one-sided factor varies along its forbidden lattice direction.
    DependenceViolation { along_m: bool, defect: f64 },
    /// Angle extraction needs the per-site factors `(V₋, V₊, h)`.
    MissingFactors { n: i32, m: i32 },
    Loop(LoopError),
}

impl From<PotentialError> for FrameError {
    fn from(e: PotentialError) -> Self {
        FrameError::Potential(e)
    }
}

impl From<LoopError> for FrameError {
    fn from(e: LoopError) -> Self {
        FrameError::Loop(e)
    }
}

impl core::fmt::Display for FrameError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            FrameError::Potential(e) => write!(f, "{e}"),
            FrameError::Birkhoff { n, m, source } => {
                write!(f, "factorization failed at site ({n},{m}): {source}")
            }
            FrameError::NonUnitaryFrame { n, m, defect } => write!(
                f,
                "frame at site ({n},{m}) is not unitary after normalization (defect {defect:.3e})"
            ),
            FrameError::BranchAmbiguity { n, m, jump } => write!(
                f,
                "phase jump {jump:.6} at site ({n},{m}) exceeds π; branch ambiguous"
            ),
            FrameError::DependenceViolation { along_m, defect } => write!(
                f,
                "{} factor varies along its forbidden direction (defect {defect:.3e})",
                if *along_m { "plus" } else { "minus" }
            ),
            FrameError::MissingFactors { n, m } => {
                write!(f, "site ({n},{m}) carries no Birkhoff factors")
            }
            FrameError::Loop(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for FrameError {}

/// Per-site Birkhoff data attached to a frame.
#[derive(Debug, Clone)]
pub struct FrameFactors {
    pub v_minus: CarrierLoop,
    pub v_plus: CarrierLoop,
    /// Phase of `V₊(λ=0) = diag(e^{ih/2}, e^{-ih/2})`, in (-2π, 2π].
    pub h: f64,
}

/// One lattice site of an extended frame.
#[derive(Debug, Clone)]
pub struct FrameSite {
    pub frame: CarrierLoop,
    /// Present when the site was produced by the factorization pipeline.
    pub factors: Option<FrameFactors>,
}

/// Lattice of frames with optional per-site factors.
#[derive(Debug, Clone)]
pub struct FrameField {
    sites: Lattice2<FrameSite>,
}

impl FrameField {
    pub fn new(sites: Lattice2<FrameSite>) -> Self {
        FrameField { sites }
    }

    pub fn rect(&self) -> Rect {
        self.sites.rect()
    }

    pub fn site(&self, n: i32, m: i32) -> &FrameSite {
        self.sites.get(n, m)
    }

    pub fn frame(&self, n: i32, m: i32) -> &CarrierLoop {
        &self.sites.get(n, m).frame
    }

    pub fn h(&self, n: i32, m: i32) -> Result<f64, FrameError> {
        self.sites
            .get(n, m)
            .factors
            .as_ref()
            .map(|f| f.h)
            .ok_or(FrameError::MissingFactors { n, m })
    }

    /// Pointwise unnormalized transition `F̂(n,m)⁻¹ F̂(n+1,m)` at z; equals
    /// `Δ₊ U` for a compatible frame field.
    pub fn transition_u(&self, n: i32, m: i32, z: C64) -> Result<Mat2, FrameError> {
        let a = self.frame(n, m).eval_carrier(z)?;
        let b = self.frame(n + 1, m).eval_carrier(z)?;
        let inv = a.inverse().ok_or(LoopError::SingularFrame)?;
        Ok(inv * b)
    }

    /// Pointwise unnormalized transition `F̂(n,m)⁻¹ F̂(n,m+1)` at z (`Δ₋ V`).
    pub fn transition_v(&self, n: i32, m: i32, z: C64) -> Result<Mat2, FrameError> {
        let a = self.frame(n, m).eval_carrier(z)?;
        let b = self.frame(n, m + 1).eval_carrier(z)?;
        let inv = a.inverse().ok_or(LoopError::SingularFrame)?;
        Ok(inv * b)
    }
}

/// Tolerances of the frame pipeline beyond the factorization solver.
#[derive(Debug, Clone, Copy)]
pub struct FrameConfig {
    pub solver: SolverConfig,
    /// Hard cap for loop product bands; 0 = derive from the lattice extent.
    pub max_band: usize,
    /// Unitarity defect allowed for det-normalized frames at λ = 1.
    pub unitarity_tol: f64,
}

impl Default for FrameConfig {
    fn default() -> Self {
        FrameConfig {
            solver: SolverConfig::default(),
            max_band: 0,
            unitarity_tol: 1e-8,
        }
    }
}

impl FrameConfig {
    fn band_for(&self, rect: Rect) -> usize {
        if self.max_band != 0 {
            return self.max_band;
        }
        let n_extent = rect.n_min.unsigned_abs().max(rect.n_max.unsigned_abs()) as usize;
        let m_extent = rect.m_min.unsigned_abs().max(rect.m_max.unsigned_abs()) as usize;
        crate::potentials::default_max_band(n_extent, m_extent)
    }
}

/// Shared state for per-site frame assembly.
pub struct FrameBuilder {
    dp: DressedPotential,
    correction: DiagonalCorrection,
    table: ProductTable,
    cfg: FrameConfig,
    rect: Rect,
    max_band: usize,
}

impl FrameBuilder {
    pub fn new(pot: &Potential, rect: Rect, cfg: FrameConfig) -> Result<Self, FrameError> {
        assert!(rect.contains_origin(), "lattice must contain the base point");
        let dp = pot.as_dressed();
        let max_band = cfg.band_for(rect);
        let correction = diagonal_correction(&dp)?;
        let table = ProductTable::build(
            &dp,
            (rect.n_min, rect.n_max),
            (rect.m_min, rect.m_max),
            max_band,
        )?;
        Ok(FrameBuilder { dp, correction, table, cfg, rect, max_band })
    }

    pub fn rect(&self) -> Rect {
        self.rect
    }

    pub fn potential(&self) -> &DressedPotential {
        &self.dp
    }

    pub fn correction(&self) -> &DiagonalCorrection {
        &self.correction
    }

    pub fn products(&self) -> &ProductTable {
        &self.table
    }

    /// Assemble the frame and factors at one site. Pure; callable from
    /// concurrent workers.
    pub fn site(&self, n: i32, m: i32) -> Result<FrameSite, FrameError> {
        let f_plus = self.table.f_plus(n);
        let g_minus = self.table.g_minus(m);
        let d_inv = LaurentLoop::constant(self.correction.d_inv(n));

        // Φ̂ = D⁻¹ adj(F̂₊) Ĝ₋, determinant S₊(n) S₋(m).
        let phi_mat = d_inv
            .mul_checked(&f_plus.mat.adjugate(), self.max_band)?
            .mul_checked(&g_minus.mat, self.max_band)?;
        let split = birkhoff::split_minus_plus(&phi_mat, &self.cfg.solver)
            .map_err(|source| FrameError::Birkhoff { n, m, source })?;

        // Factor determinants are recomputed from the carriers: for dressed
        // potentials the Δ₊/Δ₋ content of V± is not the one-sided product
        // split (det V̂₋ is the minus-normalized part of det Φ̂).
        let v_minus_mat = split.minus.normalized();
        let v_minus = CarrierLoop {
            det: v_minus_mat.det().trim(1e-14),
            mat: v_minus_mat,
        };
        let v_plus_mat = split.plus.adjugate().normalized();
        let h = extract_h(&v_plus_mat);
        let v_plus = CarrierLoop {
            det: v_plus_mat.det().trim(1e-14),
            mat: v_plus_mat,
        };

        let frame = CarrierLoop {
            mat: g_minus.mat.mul_checked(&v_plus.mat, self.max_band)?.normalized(),
            det: g_minus.det.mul(&v_plus.det).trim(1e-14),
        };

        let defect = frame
            .eval_unitary(1.0)
            .map_err(FrameError::Loop)?
            .unitarity_defect();
        if defect > self.cfg.unitarity_tol {
            return Err(FrameError::NonUnitaryFrame { n, m, defect });
        }

        Ok(FrameSite {
            frame,
            factors: Some(FrameFactors { v_minus, v_plus, h }),
        })
    }

    /// Serial assembly over the whole rectangle.
    pub fn field(&self) -> Result<FrameField, FrameError> {
        let sites = Lattice2::try_from_fn(self.rect, |n, m| self.site(n, m))?;
        Ok(FrameField::new(sites))
    }
}

/// `h` from the λ⁰ coefficient of `V₊ = adj(Ŵ)`: the value at λ = 0 is
/// `diag(e^{ih/2}, e^{-ih/2})` (the carrier determinant is 1 there).
fn extract_h(v_plus_mat: &LaurentLoop) -> f64 {
    2.0 * v_plus_mat.at(0).e[0][0].arg()
}

/// One-shot frame assembly at a single site.
pub fn build_frame(
    pot: &Potential,
    n: i32,
    m: i32,
    cfg: FrameConfig,
) -> Result<FrameSite, FrameError> {
    let rect = Rect::new(n.min(0), n.max(0), m.min(0), m.max(0));
    FrameBuilder::new(pot, rect, cfg)?.site(n, m)
}

/// Build the full frame field over `rect`.
pub fn build_frame_field(
    pot: &Potential,
    rect: Rect,
    cfg: FrameConfig,
) -> Result<FrameField, FrameError> {
    FrameBuilder::new(pot, rect, cfg)?.field()
}

/// Wrap to the principal interval (-2π, 2π] modulo 4π.
pub fn wrap_mod_4pi(x: f64) -> f64 {
    let tau2 = 2.0 * core::f64::consts::TAU;
    let mut y = x % tau2;
    if y > core::f64::consts::TAU {
        y -= tau2;
    } else if y <= -core::f64::consts::TAU {
        y += tau2;
    }
    y
}

/// Reconstruct the Hirota angle field from the per-site phases `h` and the
/// potential's `β` (with the λ=0 phases of any plus dressing factors).
///
/// The recursions are `u₁ - u = -(h₁ - h)` along rows and
/// `u₂ + u = 2β - (h + h₂) + ωˡ - ωʳ` along the base column, propagated
/// outward from `u(0,0) = u00` with every step reduced to (-2π, 2π]; a step
/// at the wrap boundary is reported as ambiguous, not guessed.
pub fn extract_angle_field(
    ff: &FrameField,
    pot: &Potential,
    u00: f64,
) -> Result<AngleField, FrameError> {
    let rect = ff.rect();
    let dp = pot.as_dressed();
    let mut u = Lattice2::filled(rect, f64::NAN);

    // Row step u(n+1, m) - u(n, m). Steps are determined mod 4π; near the
    // ±2π wrap boundary the two admissible representatives collide under
    // numerical noise, which is reported rather than guessed.
    let row_step = |n: i32, m: i32| -> Result<f64, FrameError> {
        let step = wrap_mod_4pi(ff.h(n, m)? - ff.h(n + 1, m)?);
        if step.abs() >= core::f64::consts::TAU - 1e-6 {
            return Err(FrameError::BranchAmbiguity { n, m, jump: step });
        }
        Ok(step)
    };

    // Base column via the β relation.
    *u.get_mut(0, 0) = u00;
    for m in 0..rect.m_max {
        let sum = column_sum(&dp, ff, m)?;
        let prev = *u.get(0, m);
        *u.get_mut(0, m + 1) = sum - prev;
    }
    for m in (rect.m_min..0).rev() {
        let sum = column_sum(&dp, ff, m)?;
        let next = *u.get(0, m + 1);
        *u.get_mut(0, m) = sum - next;
    }

    // Rows outward from n = 0.
    for m in rect.m_min..=rect.m_max {
        for n in 0..rect.n_max {
            let step = row_step(n, m)?;
            let prev = *u.get(n, m);
            *u.get_mut(n + 1, m) = prev + step;
        }
        for n in (rect.n_min..0).rev() {
            let step = row_step(n, m)?;
            let next = *u.get(n + 1, m);
            *u.get_mut(n, m) = next - step;
        }
    }

    Ok(AngleField::new(u))
}

/// `u(0, m+1) + u(0, m)` from the factored data at column steps.
fn column_sum(dp: &DressedPotential, ff: &FrameField, m: i32) -> Result<f64, FrameError> {
    let beta = dp.base.beta.eval(m)?;
    let omega_l = dp.omega_l(m)?;
    let omega_r = dp.omega_r(m)?;
    Ok(wrap_mod_4pi(
        2.0 * beta - (ff.h(0, m)? + ff.h(0, m + 1)?) + omega_l - omega_r,
    ))
}

/// Potential data recovered from a frame field, with the residuals of the
/// one-variable dependence checks.
#[derive(Debug, Clone)]
pub struct ExtractedPotentials {
    pub n_start: i32,
    pub m_start: i32,
    /// α(n) for steps n_start ..= n_start + alpha.len() - 1.
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    /// |p(n)| (the route only determines p up to sign).
    pub p_abs: Vec<f64>,
    pub q_abs: Vec<f64>,
    /// Off-diagonal products `ℓ(n) = (i/2) p e^{iα}` for sign-free checks.
    pub ell: Vec<C64>,
    /// `r(m) = -(i/2) q e^{iβ}`.
    pub r: Vec<C64>,
    /// Worst coefficientwise variation of the plus factor along m.
    pub m_dependence: f64,
    /// Worst coefficientwise variation of the minus factor along n.
    pub n_dependence: f64,
}

/// Forward direction: split every frame both ways, verify the one-variable
/// dependence, and read the normalized potential off the factors.
pub fn extract_potentials(
    ff: &FrameField,
    cfg: &SolverConfig,
    dependence_tol: f64,
) -> Result<ExtractedPotentials, FrameError> {
    let rect = ff.rect();

    // Split per site.
    let mut plus_factors: Vec<Vec<LaurentLoop>> = Vec::new();
    let mut minus_factors: Vec<Vec<LaurentLoop>> = Vec::new();
    for n in rect.n_min..=rect.n_max {
        let mut prow = Vec::new();
        let mut mrow = Vec::new();
        for m in rect.m_min..=rect.m_max {
            let mat = &ff.frame(n, m).mat;
            let sp = birkhoff::split_plus_minus(mat, cfg)
                .map_err(|source| FrameError::Birkhoff { n, m, source })?;
            let sm = birkhoff::split_minus_plus(mat, cfg)
                .map_err(|source| FrameError::Birkhoff { n, m, source })?;
            prow.push(sp.plus);
            mrow.push(sm.minus);
        }
        plus_factors.push(prow);
        minus_factors.push(mrow);
    }

    // F₊ must not depend on m; G₋ must not depend on n.
    let mut m_dep = 0.0f64;
    for prow in &plus_factors {
        for f in &prow[1..] {
            m_dep = m_dep.max(f.sub(&prow[0]).band_norm());
        }
    }
    if m_dep > dependence_tol {
        return Err(FrameError::DependenceViolation { along_m: true, defect: m_dep });
    }
    let mut n_dep = 0.0f64;
    for nrow in &minus_factors[1..] {
        for (g, g0) in nrow.iter().zip(minus_factors[0].iter()) {
            n_dep = n_dep.max(g.sub(g0).band_norm());
        }
    }
    if n_dep > dependence_tol {
        return Err(FrameError::DependenceViolation { along_m: false, defect: n_dep });
    }

    // Maurer–Cartan quotients along the base row/column.
    let mut alpha = Vec::new();
    let mut p_abs = Vec::new();
    let mut ell = Vec::new();
    let m_ref = (0 - rect.m_min) as usize;
    for i in 0..(rect.n_len() - 1) {
        let x0 = &plus_factors[i][m_ref];
        let x1 = &plus_factors[i + 1][m_ref];
        let xi = one_step_quotient(x0, x1, true)?;
        let m1 = xi.at(1);
        let (a, p, l) = read_plus_step(&m1);
        alpha.push(a);
        p_abs.push(p);
        ell.push(l);
    }

    let mut beta = Vec::new();
    let mut q_abs = Vec::new();
    let mut r = Vec::new();
    let n_ref = (0 - rect.n_min) as usize;
    for j in 0..(rect.m_len() - 1) {
        let g0 = &minus_factors[n_ref][j];
        let g1 = &minus_factors[n_ref][j + 1];
        let xi = one_step_quotient(g0, g1, false)?;
        let mm1 = xi.at(-1);
        let (b, q, rr) = read_minus_step(&mm1);
        beta.push(b);
        q_abs.push(q);
        r.push(rr);
    }

    Ok(ExtractedPotentials {
        n_start: rect.n_min,
        m_start: rect.m_min,
        alpha,
        beta,
        p_abs,
        q_abs,
        ell,
        r,
        m_dependence: m_dep,
        n_dependence: n_dep,
    })
}

/// `X⁻¹ Y` for two truncated one-sided series via adjugate and determinant
/// reciprocal; exact up to the geometric truncation tails.
fn one_step_quotient(
    x: &LaurentLoop,
    y: &LaurentLoop,
    plus_side: bool,
) -> Result<LaurentLoop, FrameError> {
    let det = x.det();
    let k_max = 2 * (x.band_width() + y.band_width()).max(8);
    let recip = if plus_side {
        det.reciprocal_plus(k_max)
    } else {
        det.reciprocal_minus(k_max)
    }
    .map_err(FrameError::Loop)?;
    let prod = x.adjugate().mul(y).mul_scalar(&recip);
    // The true quotient is the one-step potential: band [0, 1] or [-1, 0].
    Ok(if plus_side {
        prod.band_part(0, 1)
    } else {
        prod.band_part(-1, 0)
    })
}

/// Read `(α, |p|, ℓ)` from the λ¹ coefficient `[[0, (i/2)p e^{-iα}], [(i/2)p e^{iα}, 0]]`.
fn read_plus_step(m1: &Mat2) -> (f64, f64, C64) {
    let prod = m1.e[0][1] * m1.e[1][0]; // -(p/2)²
    let p_abs = 2.0 * (-prod.re).max(0.0).sqrt();
    let l = m1.e[1][0];
    // e^{iα} = -2i ℓ / p for the positive-sign convention.
    let alpha = (l * C64::new(0.0, -2.0) / C64::new(p_abs.max(1e-300), 0.0)).arg();
    (alpha, p_abs, l)
}

/// Read `(β, |q|, r)` from the λ⁻¹ coefficient `[[0, -(i/2)q e^{iβ}], [-(i/2)q e^{-iβ}, 0]]`.
fn read_minus_step(mm1: &Mat2) -> (f64, f64, C64) {
    let prod = mm1.e[0][1] * mm1.e[1][0]; // -(q/2)²
    let q_abs = 2.0 * (-prod.re).max(0.0).sqrt();
    let rr = mm1.e[0][1];
    // e^{iβ} = 2i r / q for the positive-sign convention.
    let beta = (rr * C64::new(0.0, 2.0) / C64::new(q_abs.max(1e-300), 0.0)).arg();
    (beta, q_abs, rr)
}

/// Structural residuals of the transition matrices: how far `F̂⁻¹F̂₁` is from
/// the U-shape `M₀ + λ M₁` (unimodular conjugate diagonal, equal purely
/// imaginary off-diagonal) and `F̂⁻¹F̂₂` from the mirror V-shape.
#[derive(Debug, Clone, Copy, Default)]
pub struct McShapeReport {
    pub max_u_defect: f64,
    pub max_v_defect: f64,
}

pub fn mc_shape_report(ff: &FrameField) -> Result<McShapeReport, FrameError> {
    let rect = ff.rect();
    let z = [C64::new(0.7, 0.0), C64::new(1.0, 0.0), C64::new(1.6, 0.0)];
    let mut rep = McShapeReport::default();

    for n in rect.n_min..=rect.n_max {
        for m in rect.m_min..=rect.m_max {
            if n < rect.n_max {
                let vals = [
                    ff.transition_u(n, m, z[0])?,
                    ff.transition_u(n, m, z[1])?,
                    ff.transition_u(n, m, z[2])?,
                ];
                // Fit M0 + λ M1 from the outer samples, check the middle.
                let denom = C64::new(z[2].re - z[0].re, 0.0);
                let m1 = (vals[2] - vals[0]).scale(denom.inv());
                let m0 = vals[0] - m1.scale(z[0]);
                let mid = m0 + m1.scale(z[1]);
                let mut d = (mid - vals[1]).max_abs();
                d = d.max(m0.e[0][1].norm()).max(m0.e[1][0].norm());
                d = d.max((m0.e[0][0] * m0.e[1][1] - C64::new(1.0, 0.0)).norm());
                d = d.max((m0.e[0][0] - m0.e[1][1].conj()).norm());
                d = d.max((m1.e[0][1] - m1.e[1][0]).norm());
                d = d.max(m1.e[0][1].re.abs()).max(m1.e[0][0].norm()).max(m1.e[1][1].norm());
                rep.max_u_defect = rep.max_u_defect.max(d);
            }
            if m < rect.m_max {
                let vals = [
                    ff.transition_v(n, m, z[0])?,
                    ff.transition_v(n, m, z[1])?,
                    ff.transition_v(n, m, z[2])?,
                ];
                // Fit M0 + λ⁻¹ M(-1).
                let w = [z[0].inv(), z[1].inv(), z[2].inv()];
                let denom = w[2] - w[0];
                let mneg = (vals[2] - vals[0]).scale(denom.inv());
                let m0 = vals[0] - mneg.scale(w[0]);
                let mid = m0 + mneg.scale(w[1]);
                let mut d = (mid - vals[1]).max_abs();
                d = d.max((m0 - Mat2::identity()).max_abs());
                // Off-diagonals -(i/2)q e^{±iσ} are a conjugate-negative pair.
                d = d.max((mneg.e[1][0] + mneg.e[0][1].conj()).norm());
                d = d.max(mneg.e[0][0].norm()).max(mneg.e[1][1].norm());
                rep.max_v_defect = rep.max_v_defect.max(d);
            }
        }
    }
    Ok(rep)
}
