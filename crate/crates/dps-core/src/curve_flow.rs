//! Discrete flow of constant-torsion space curves and its gauge
//! correspondence with the extended frame.
//!
//! A discrete constant-torsion curve carries an SU₂ Frenet frame Φ moving by
//!
//!   Φ₁ = Φ L,   L = R⁽¹⁾(-ν₁) R⁽³⁾((u₁₁ - u)/2),   ν₁ = 2 arctan(aλ/2),
//!   Φ₂ = Φ M,   M = R⁽³⁾(-(u₂+u₁)/2) R⁽¹⁾(μ) R⁽³⁾((u₁₂+u)/2),
//!               μ = 2 arctan(2/(bλ)),
//!
//! where R⁽¹⁾, R⁽³⁾ are the SU₂ rotations about e₁ and e₃. The flow moves
//! vertices by
//!
//!   γ₂ = γ + δ (cos w T + sin w N),   δ = b / (1 + (b/2)² λ²),
//!
//! with `w = -(u₂ + u₁)/2`, and `w` can alternatively be propagated along
//! the curve by `tan((w₁ + k₁)/2) = ((b+a)/(b-a)) tan(w/2)`,
//! `k = (u₁ - u₁̄)/2` — a recursion equivalent to the lattice sine-Gordon
//! equation.
//!
//! Under `a = p`, `b = 4/q` the Frenet frame is a gauge of the extended
//! frame, `F = Φ G` with `G = diag(e^{i(u₁-u)/4}, e^{-i(u₁-u)/4})`, so the
//! swept point lattice is congruent to the Sym-formula mesh.

use alloc::vec::Vec;

use crate::geom::Vec3;
use crate::hirota::{AngleField, HirotaError};
use crate::mat2::{C64, Mat2};
use crate::potentials::SampledFn;
use crate::sym::{su2_to_vec, vec_to_su2};

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, PartialEq)]
pub enum CurveError {
    /// The tangent/flow weights coincide; the w-recursion degenerates.
    DegenerateStep { a: f64, b: f64 },
    Angle(HirotaError),
}

impl From<HirotaError> for CurveError {
    fn from(e: HirotaError) -> Self {
        CurveError::Angle(e)
    }
}

impl core::fmt::Display for CurveError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CurveError::DegenerateStep { a, b } => {
                write!(f, "flow step degenerates at b = a = {a} (got b = {b})")
            }
            CurveError::Angle(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for CurveError {}

/// SU₂ rotation about e₁: [[cos x/2, -i sin x/2], [-i sin x/2, cos x/2]].
pub fn rot1(x: f64) -> Mat2 {
    let (c, s) = ((x / 2.0).cos(), (x / 2.0).sin());
    Mat2::new(
        C64::new(c, 0.0),
        C64::new(0.0, -s),
        C64::new(0.0, -s),
        C64::new(c, 0.0),
    )
}

/// SU₂ rotation about e₃: diag(e^{-ix/2}, e^{ix/2}).
pub fn rot3(x: f64) -> Mat2 {
    Mat2::diag(C64::from_polar(1.0, -x / 2.0), C64::from_polar(1.0, x / 2.0))
}

/// Curve-direction Frenet transition at site (n, m).
pub fn frenet_l(u: &AngleField, a: f64, lambda0: f64, n: i32, m: i32) -> Result<Mat2, CurveError> {
    let nu1 = 2.0 * (a * lambda0 / 2.0).atan();
    let u0 = u.try_u(n, m)?;
    let u11 = u.try_u(n + 2, m)?;
    Ok(rot1(-nu1) * rot3((u11 - u0) / 2.0))
}

/// Flow-direction Frenet transition at site (n, m).
pub fn frenet_m(u: &AngleField, b: f64, lambda0: f64, n: i32, m: i32) -> Result<Mat2, CurveError> {
    let mu = 2.0 * (2.0 / (b * lambda0)).atan();
    let u0 = u.try_u(n, m)?;
    let u1 = u.try_u(n + 1, m)?;
    let u2 = u.try_u(n, m + 1)?;
    let u12 = u.try_u(n + 1, m + 1)?;
    Ok(rot3(-(u2 + u1) / 2.0) * rot1(mu) * rot3((u12 + u0) / 2.0))
}

/// The gauge `G = diag(e^{i(u₁-u)/4}, e^{-i(u₁-u)/4})`.
fn gauge_g(u: &AngleField, n: i32, m: i32) -> Result<Mat2, CurveError> {
    let du = u.try_u(n + 1, m)? - u.try_u(n, m)?;
    Ok(rot3(-du / 2.0))
}

/// Δ-normalized extended-frame transition U at a real point.
fn u_normalized(u: &AngleField, p: f64, lambda0: f64, n: i32, m: i32) -> Result<Mat2, CurveError> {
    let m_hat = crate::hirota::u_transition(u.try_u(n + 1, m)? - u.try_u(n, m)?, p);
    let delta = (1.0 + (p / 2.0) * (p / 2.0) * lambda0 * lambda0).sqrt();
    Ok(m_hat
        .mat
        .evaluate(C64::new(lambda0, 0.0))
        .expect("polynomial")
        .scale(C64::new(1.0 / delta, 0.0)))
}

fn v_normalized(u: &AngleField, q: f64, lambda0: f64, n: i32, m: i32) -> Result<Mat2, CurveError> {
    let m_hat = crate::hirota::v_transition(u.try_u(n, m + 1)? + u.try_u(n, m)?, q);
    let delta = (1.0 + (q / 2.0) * (q / 2.0) / (lambda0 * lambda0)).sqrt();
    Ok(m_hat
        .mat
        .evaluate(C64::new(lambda0, 0.0))
        .expect("λ0 > 0")
        .scale(C64::new(1.0 / delta, 0.0)))
}

#[derive(Debug, Clone, Default)]
pub struct GaugeReport {
    pub max_l_defect: f64,
    pub max_m_defect: f64,
    pub sites_checked: usize,
    pub pass: bool,
}

/// Verify the gauge identities `G⁻¹ L G₁ = U` and `G⁻¹ M G₂ = V` over the
/// interior of the angle field under `a = p`, `b = 4/q`.
pub fn gauge_check(
    u: &AngleField,
    p: &SampledFn,
    q: &SampledFn,
    lambda0: f64,
    tol: f64,
) -> Result<GaugeReport, CurveError> {
    let rect = u.rect();
    let mut rep = GaugeReport::default();
    for n in rect.n_min..rect.n_max {
        for m in rect.m_min..rect.m_max {
            let pv = p.eval(n).map_err(HirotaError::Potential)?;
            let qv = q.eval(m).map_err(HirotaError::Potential)?;
            let g = gauge_g(u, n, m)?;
            let g_inv = g.conj_transpose();

            if n + 2 <= rect.n_max {
                let l = frenet_l(u, pv, lambda0, n, m)?;
                let g1 = gauge_g(u, n + 1, m)?;
                let lhs = g_inv * l * g1;
                let rhs = u_normalized(u, pv, lambda0, n, m)?;
                rep.max_l_defect = rep.max_l_defect.max((lhs - rhs).max_abs());
            }
            let b = 4.0 / qv;
            let mm = frenet_m(u, b, lambda0, n, m)?;
            let g2 = gauge_g(u, n, m + 1)?;
            let lhs = g_inv * mm * g2;
            let rhs = v_normalized(u, qv, lambda0, n, m)?;
            rep.max_m_defect = rep.max_m_defect.max((lhs - rhs).max_abs());
            rep.sites_checked += 1;
        }
    }
    rep.pass = rep.max_l_defect <= tol && rep.max_m_defect <= tol;
    Ok(rep)
}

/// Discrete constant-torsion curve: vertices, orthonormal frame vectors,
/// their SU₂ lifts, and the segment/flow weights.
#[derive(Debug, Clone)]
pub struct DiscreteCurve {
    pub gamma: Vec<Vec3>,
    pub tangent: Vec<Vec3>,
    pub normal: Vec<Vec3>,
    pub binormal: Vec<Vec3>,
    /// SU₂ Frenet lifts Φ(n).
    pub frames: Vec<Mat2>,
    /// Segment weight a(n) per vertex.
    pub seg_a: Vec<f64>,
    /// Flow weight b of the step that produced this slice (`None` for the
    /// initial curve).
    pub flow_b: Option<f64>,
}

/// Frame vectors of an SU₂ lift: T, N, B are the images of the coordinate
/// axes under the rotation induced by Φ (with the sign pairing that makes
/// the flow formula hold verbatim and keeps the triple right-handed).
pub fn frame_vectors(phi: &Mat2) -> (Vec3, Vec3, Vec3) {
    let phi_inv = phi.conj_transpose();
    let rot = |v: Vec3| su2_to_vec(&(*phi * vec_to_su2(&v) * phi_inv));
    let t = rot(Vec3::new(1.0, 0.0, 0.0));
    let n = -rot(Vec3::new(0.0, 1.0, 0.0));
    let b = -rot(Vec3::new(0.0, 0.0, 1.0));
    (t, n, b)
}

/// Surface edge length of an n-step: `4 a λ / (4 + a² λ²)`.
pub fn segment_length(a: f64, lambda0: f64) -> f64 {
    4.0 * a * lambda0 / (4.0 + a * a * lambda0 * lambda0)
}

/// Flow displacement per step: `δ = b / (1 + (b/2)² λ²)`.
pub fn flow_delta(b: f64, lambda0: f64) -> f64 {
    b / (1.0 + (b / 2.0) * (b / 2.0) * lambda0 * lambda0)
}

/// Build the initial curve from row `m` of an angle field: Φ(0) = Id at the
/// origin, frames propagated by L, vertices by the tangent steps.
pub fn curve_from_row(
    u: &AngleField,
    a: &SampledFn,
    lambda0: f64,
    m: i32,
    n_len: usize,
) -> Result<DiscreteCurve, CurveError> {
    let mut frames = Vec::with_capacity(n_len);
    let mut gamma = Vec::with_capacity(n_len);
    let mut seg_a = Vec::with_capacity(n_len);
    frames.push(Mat2::identity());
    gamma.push(Vec3::zero());
    for n in 0..(n_len as i32 - 1) {
        let av = a.eval(n).map_err(HirotaError::Potential)?;
        seg_a.push(av);
        let phi = frames[n as usize];
        let (t, _, _) = frame_vectors(&phi);
        gamma.push(gamma[n as usize] + t.scale(segment_length(av, lambda0)));
        // The L-transition needs u(n+2, m); beyond the lattice the frame of
        // the final vertex is propagated with the last in-range step.
        let l = if u.rect().contains(n + 2, m) {
            frenet_l(u, av, lambda0, n, m)?
        } else {
            let nu1 = 2.0 * (av * lambda0 / 2.0).atan();
            let du = u.try_u(n + 1, m)? - u.try_u(n, m)?;
            rot1(-nu1) * rot3(-du / 2.0) // u₁₁ extrapolated flat
        };
        frames.push(phi * l);
    }
    seg_a.push(*seg_a.last().unwrap_or(&0.0));

    let mut curve = DiscreteCurve {
        gamma,
        tangent: Vec::new(),
        normal: Vec::new(),
        binormal: Vec::new(),
        frames,
        seg_a,
        flow_b: None,
    };
    curve.refresh_vectors();
    Ok(curve)
}

impl DiscreteCurve {
    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }

    fn refresh_vectors(&mut self) {
        self.tangent.clear();
        self.normal.clear();
        self.binormal.clear();
        for phi in &self.frames {
            let (t, n, b) = frame_vectors(phi);
            self.tangent.push(t);
            self.normal.push(n);
            self.binormal.push(b);
        }
    }

    /// Worst orthonormality/right-handedness defect of the frame triple.
    pub fn frame_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.len() {
            let (t, n, b) = (self.tangent[i], self.normal[i], self.binormal[i]);
            worst = worst.max((t.norm() - 1.0).abs());
            worst = worst.max((n.norm() - 1.0).abs());
            worst = worst.max(t.dot(&n).abs());
            worst = worst.max((t.cross(&n) - b).norm());
        }
        worst
    }
}

/// `w = -(u₂ + u₁)/2` read from the angle field.
pub fn w_direct(u: &AngleField, n: i32, m: i32) -> Result<f64, CurveError> {
    Ok(-(u.try_u(n, m + 1)? + u.try_u(n + 1, m)?) / 2.0)
}

/// One step of the tangent-angle recursion
/// `tan((w₁ + k₁)/2) = ((b+a)/(b-a)) tan(w/2)` on the branch continuous in w.
pub fn w_recursion_step(w: f64, k1: f64, a: f64, b: f64) -> Result<f64, CurveError> {
    if (b - a).abs() < 1e-14 {
        return Err(CurveError::DegenerateStep { a, b });
    }
    let rho = (b + a) / (b - a);
    // tan is π-periodic: resolve w/2 into principal part + branch count.
    let half = w / 2.0;
    let branch = (half / core::f64::consts::PI).round();
    let principal = half - branch * core::f64::consts::PI;
    let mapped = (rho * principal.tan()).atan();
    // ρ > 0 preserves the branch; ρ < 0 reflects it.
    let out = if rho >= 0.0 {
        mapped + branch * core::f64::consts::PI
    } else {
        -mapped - branch * core::f64::consts::PI
    };
    Ok(2.0 * out - k1)
}

/// Evolve a curve `m_steps` times through the angle field, starting at row
/// `m0`. Slice j is built from row `m0 + j` data.
pub fn evolve_curve(
    curve: &DiscreteCurve,
    u: &AngleField,
    b: &SampledFn,
    lambda0: f64,
    m0: i32,
    m_steps: usize,
) -> Result<Vec<DiscreteCurve>, CurveError> {
    let mut slices = Vec::with_capacity(m_steps + 1);
    slices.push(curve.clone());
    for j in 0..m_steps {
        let m = m0 + j as i32;
        let prev = &slices[j];
        let bv = b.eval(m).map_err(HirotaError::Potential)?;
        let delta = flow_delta(bv, lambda0);
        let mut gamma = Vec::with_capacity(prev.len());
        let mut frames = Vec::with_capacity(prev.len());
        for idx in 0..prev.len() {
            let n = idx as i32;
            let w = w_direct(u, n, m)?;
            let t = prev.tangent[idx];
            let nv = prev.normal[idx];
            gamma.push(prev.gamma[idx] + (t.scale(w.cos()) + nv.scale(w.sin())).scale(delta));
            // Frames advance with M where the stencil exists; the last
            // vertex reuses its predecessor's step.
            let stencil_n = if u.rect().contains(n + 1, m + 1) { n } else { n - 1 };
            let mm = frenet_m(u, bv, lambda0, stencil_n.max(u.rect().n_min), m)?;
            frames.push(prev.frames[idx] * mm);
        }
        let mut next = DiscreteCurve {
            gamma,
            tangent: Vec::new(),
            normal: Vec::new(),
            binormal: Vec::new(),
            frames,
            seg_a: prev.seg_a.clone(),
            flow_b: Some(bv),
        };
        next.refresh_vectors();
        slices.push(next);
    }
    Ok(slices)
}
