//! Discrete pseudospherical surfaces of revolution.
//!
//! The dressed potential is `η_n = η_m⁻¹ = A₊ L A₋` with
//! `L = diag(e^{ic}, e^{-ic})`, `c = π/ℓ`, and `A±` the constant
//! normalized steps of weight q. In the factored form used here:
//!
//!   η_n:  ξ₊ = A₊,  P₋ʳ = L A₋,  P₋ˡ = Id,
//!   η_m:  ξ₋ = A₋⁻¹, P₊ʳ = L⁻¹ A₊⁻¹, P₊ˡ = Id,
//!
//! with the sign convention `β ≡ π` so that `A₋⁻¹` is the minus step of the
//! same positive q (this is what puts the reduced lattice equation below in
//! its standard form). The lattice shift `(n, m) ↦ (n+1, m-1)` acts on the
//! surface as a fixed rotation, and along the invariant direction the angle
//! variable obeys the one-dimensional reduction
//!
//!   Q₁ Q₁̄ = ((Q - k)/(1 - k Q))²,   k = q²/4.

use alloc::vec::Vec;

use crate::carrier::CarrierLoop;
use crate::dalembert::{build_frame_field, extract_angle_field, FrameConfig, FrameError, FrameField};
use crate::geom::{fit_rigid_motion, rotation_axis_angle, Vec3};
use crate::hirota::AngleField;
use crate::lattice::Rect;
use crate::mat2::{C64, Mat2};
use crate::potentials::{
    xi_minus_raw, xi_plus_raw, DressedPotential, Dressing, Potential, PotentialError,
    PotentialPair, SampledFn,
};
use crate::sym::SurfaceMesh;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy)]
pub struct RevolutionConfig {
    /// Edge weight, 0 < |q/2| < 1.
    pub q: f64,
    /// Period ℓ ∈ ℤ₊; the twist angle is c = π/ℓ.
    pub ell: u32,
    pub rect: Rect,
}

impl RevolutionConfig {
    pub fn c(&self) -> f64 {
        core::f64::consts::PI / self.ell as f64
    }
}

/// The revolution potential as a dressed pair.
pub fn revolution_potential(cfg: &RevolutionConfig) -> Result<Potential, PotentialError> {
    let q = cfg.q;
    let c = cfg.c();
    let base = PotentialPair::new(
        SampledFn::Constant(0.0),
        SampledFn::Constant(core::f64::consts::PI),
        SampledFn::Constant(q),
        SampledFn::Constant(q),
        (cfg.rect.n_min, cfg.rect.n_max),
        (cfg.rect.m_min, cfg.rect.m_max),
    )?;

    let l_mat = Mat2::phase_diag(c);
    let l_inv = Mat2::phase_diag(-c);
    // P₋ʳ = L A₋ (carrier L Ξ₋), P₊ʳ = L⁻¹ A₊⁻¹ (carrier L⁻¹ adj Ξ₊).
    let p_minus_r = CarrierLoop::from_unitary(l_mat)
        .mul(&xi_minus_raw(q, 0.0), 8)
        .expect("band 2 product");
    let p_plus_r = CarrierLoop::from_unitary(l_inv)
        .mul(&xi_plus_raw(q, 0.0).inverse(), 8)
        .expect("band 2 product");

    let dp = DressedPotential::new(
        base,
        Dressing::Identity,
        Dressing::Constant(p_minus_r),
        Dressing::Identity,
        Dressing::Constant(p_plus_r),
        Mat2::identity(),
        Mat2::identity(),
    )?;
    Ok(Potential::Dressed(dp))
}

/// Assembled revolution surface data.
pub struct RevolutionSurface {
    pub config: RevolutionConfig,
    pub potential: Potential,
    pub frames: FrameField,
    pub angles: AngleField,
}

pub fn build_revolution(
    cfg: &RevolutionConfig,
    fcfg: FrameConfig,
) -> Result<RevolutionSurface, FrameError> {
    let potential = revolution_potential(cfg)?;
    let frames = build_frame_field(&potential, cfg.rect, fcfg)?;
    let angles = extract_angle_field(&frames, &potential, 0.0)?;
    Ok(RevolutionSurface {
        config: *cfg,
        potential,
        frames,
        angles,
    })
}

/// Fit of the lattice shift `(n, m) ↦ (n+p, m-p)` by a rigid motion.
#[derive(Debug, Clone)]
pub struct RotationReport {
    pub shift: i32,
    /// RMS residual of the rigid fit.
    pub rms: f64,
    pub orthogonality_defect: f64,
    pub det_defect: f64,
    pub axis: Vec3,
    pub angle: f64,
    /// Translation component along the fitted axis (0 for a pure rotation
    /// about a fixed axis, nonzero for a helicoidal motion).
    pub translation_along_axis: f64,
    pub pass: bool,
}

/// Check that shifting by `(p, -p)` acts as a rotation about a fixed axis.
pub fn check_rotation_symmetry(mesh: &SurfaceMesh, shift: i32, tol: f64) -> RotationReport {
    let rect = mesh.rect();
    let mut src = Vec::new();
    let mut dst = Vec::new();
    for n in rect.n_min..=rect.n_max {
        for m in rect.m_min..=rect.m_max {
            if rect.contains(n + shift, m - shift) {
                src.push(mesh.pos(n, m));
                dst.push(mesh.pos(n + shift, m - shift));
            }
        }
    }
    let fit = fit_rigid_motion(&src, &dst);
    let (axis, angle) = rotation_axis_angle(&fit.rotation);
    let along = fit.translation.dot(&axis).abs();
    let pass = fit.rms <= tol
        && fit.rotation.orthogonality_defect() <= tol
        && (fit.rotation.det() - 1.0).abs() <= tol
        && along <= tol;
    RotationReport {
        shift,
        rms: fit.rms,
        orthogonality_defect: fit.rotation.orthogonality_defect(),
        det_defect: (fit.rotation.det() - 1.0).abs(),
        axis,
        angle,
        translation_along_axis: along,
        pass,
    }
}

#[derive(Debug, Clone)]
pub struct DrotReport {
    pub max_residual: f64,
    pub sites_checked: usize,
    pub pass: bool,
}

/// Sitewise residual of the reduced equation `Q₁ Q₁̄ = ((Q-k)/(1-kQ))²`
/// along the invariant direction, with `k = q²/4`.
pub fn check_dp_revolution(angles: &AngleField, q: f64, tol: f64) -> DrotReport {
    let rect = angles.rect();
    let k = q * q / 4.0;
    let mut worst = 0.0f64;
    let mut count = 0usize;
    for n in (rect.n_min + 1)..rect.n_max {
        for m in rect.m_min..rect.m_max {
            let (q0, q1, qb) = match (
                angles.q(n, m),
                angles.q(n + 1, m),
                angles.q(n - 1, m),
            ) {
                (Ok(a), Ok(b), Ok(c)) => (a, b, c),
                _ => continue,
            };
            let denom = C64::new(1.0, 0.0) - q0 * k;
            let rhs = ((q0 - k) / denom) * ((q0 - k) / denom);
            worst = worst.max((q1 * qb - rhs).norm());
            count += 1;
        }
    }
    DrotReport {
        max_residual: worst,
        sites_checked: count,
        pass: worst <= tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::birkhoff::SolverConfig;
    use crate::potentials::accumulate_f_plus;
    use crate::sym::{build_mesh, validate_geometry};

    fn frame_cfg(q: f64) -> FrameConfig {
        FrameConfig {
            solver: SolverConfig::for_decay_radius(q.abs() / 2.0, 1e-11),
            ..FrameConfig::default()
        }
    }

    fn eta_carrier(q: f64, c: f64) -> CarrierLoop {
        // η̂_n = Ξ₊ L Ξ₋.
        xi_plus_raw(q, 0.0)
            .mul(&CarrierLoop::from_unitary(Mat2::phase_diag(c)), 16)
            .unwrap()
            .mul(&xi_minus_raw(q, 0.0), 16)
            .unwrap()
    }

    #[test]
    fn products_match_direct_powers() {
        let cfg = RevolutionConfig { q: 1.0, ell: 4, rect: Rect::first_quadrant(3, 3) };
        let pot = revolution_potential(&cfg).unwrap();
        let dp = pot.as_dressed();

        // F_n(2) = (A₊ L A₋)² as carriers.
        let eta = eta_carrier(1.0, cfg.c());
        let direct = eta.mul(&eta, 32).unwrap();
        let f2 = accumulate_f_plus(&dp, 2, 32).unwrap();
        assert!(f2.mat.sub(&direct.mat).band_norm() < 1e-13);

        // G_m(m) = (A₊ L A₋)^{-m}: carrier adj((Ξ₊ L Ξ₋)^m).
        let g2 = crate::potentials::accumulate_g_minus(&dp, 2, 32).unwrap();
        let expect = direct.inverse();
        assert!(g2.mat.sub(&expect.mat).band_norm() < 1e-12);
    }

    #[test]
    fn revolution_mesh_rotates_under_the_diagonal_shift() {
        let cfg = RevolutionConfig { q: 1.0, ell: 4, rect: Rect::first_quadrant(6, 6) };
        let surf = build_revolution(&cfg, frame_cfg(1.0)).unwrap();
        let mesh = build_mesh(&surf.frames, 1.0, "revolution-test").unwrap();

        let geo = validate_geometry(&mesh, 1e-8);
        assert!(geo.pass, "geometry violations: {:?}", geo.violations);

        let rot = check_rotation_symmetry(&mesh, 1, 1e-8);
        assert!(rot.pass, "rotation fit: {rot:?}");

        // Angle consistency across shifts: angle(2) = 2 angle(1) mod 2π.
        let rot2 = check_rotation_symmetry(&mesh, 2, 1e-8);
        assert!(rot2.pass);
        let d = crate::hirota::wrap_mod_2pi(rot2.angle - 2.0 * rot.angle).abs();
        let d_alt = crate::hirota::wrap_mod_2pi(rot2.angle + 2.0 * rot.angle).abs();
        assert!(
            d < 1e-8 || d_alt < 1e-8,
            "angle(2) = {} vs 2 angle(1) = {}",
            rot2.angle,
            2.0 * rot.angle
        );
    }

    #[test]
    fn reduced_equation_holds_along_invariant_direction() {
        let cfg = RevolutionConfig { q: 1.0, ell: 4, rect: Rect::first_quadrant(7, 7) };
        let surf = build_revolution(&cfg, frame_cfg(1.0)).unwrap();
        // The angle variable is invariant along the diagonal shift at the
        // level of Q = e^{iφ⁽¹⁾} (the frame symmetry carries a diagonal
        // twist, so u itself is only invariant up to gauge).
        for n in 0..5 {
            for m in 1..=5 {
                let d = (surf.angles.q(n + 1, m - 1).unwrap() - surf.angles.q(n, m).unwrap())
                    .norm();
                assert!(d < 1e-9, "Q not shift-invariant: {d} at ({n},{m})");
            }
        }
        let rep = check_dp_revolution(&surf.angles, 1.0, 1e-8);
        assert!(rep.sites_checked > 0);
        assert!(rep.pass, "reduced-equation residual {}", rep.max_residual);
    }

    #[test]
    fn trivial_angle_field_satisfies_reduction() {
        // u ≡ 0 gives Q = 1 and 1 = ((1-k)/(1-k))².
        let u = AngleField::new(crate::lattice::Lattice2::filled(
            Rect::first_quadrant(4, 4),
            0.0,
        ));
        let rep = check_dp_revolution(&u, 1.2, 1e-12);
        assert!(rep.pass);
    }

    #[test]
    fn generic_field_fails_reduction() {
        // Negative control: a random Hirota field has no reason to satisfy
        // the one-dimensional reduction.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut u_row: Vec<f64> = (0..=6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let u_col: Vec<f64> = (0..=6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        u_row[0] = u_col[0];
        let ax = crate::hirota::AxisData::new(
            u_row,
            u_col,
            SampledFn::Constant(1.0),
            SampledFn::Constant(1.0),
        )
        .unwrap();
        let u = crate::hirota::evolve_u(&ax).unwrap();
        let rep = check_dp_revolution(&u, 1.0, 1e-8);
        assert!(!rep.pass);
    }
}
