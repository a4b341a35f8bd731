//! Sym formula and discrete surface geometry.
//!
//! A frame yields a surface point through `f = λ (∂F/∂λ) F⁻¹`, an
//! anti-Hermitian traceless matrix identified with E³ by
//!
//!   (x, y, z) ↔ (i/2)(x σ₁ - y σ₂ + z σ₃).
//!
//! On det-carrying frames the scalar part of the log-derivative is pure
//! trace (the normalized frame has det 1), so the traceless part of the raw
//! carrier log-derivative *is* the Sym image — no square roots are taken.
//!
//! The geometric characterization validated here: every vertex star
//! {f, f₁, f₁̄, f₂, f₂̄} is planar, and opposite edges of every elementary
//! quadrilateral have equal length with `|f₁ - f| = a(n)` and
//! `|f₂ - f| = b(m)` functions of one lattice direction only.

use alloc::string::String;
use alloc::vec::Vec;

use crate::carrier::CarrierLoop;
use crate::dalembert::FrameField;
use crate::geom::{singular_values_3col, Vec3};
use crate::lattice::{Lattice2, Rect};
use crate::loops::LoopError;
use crate::mat2::{C64, Mat2};

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

/// su₂ matrix for a Euclidean vector under the σ-identification.
pub fn vec_to_su2(v: &Vec3) -> Mat2 {
    let i2 = C64::new(0.0, 0.5);
    Mat2::new(
        i2 * C64::new(v.z, 0.0),
        i2 * C64::new(v.x, v.y),
        i2 * C64::new(v.x, -v.y),
        i2 * C64::new(-v.z, 0.0),
    )
}

/// Euclidean vector of an (approximately) anti-Hermitian traceless matrix.
pub fn su2_to_vec(m: &Mat2) -> Vec3 {
    Vec3::new(
        2.0 * m.e[0][1].im,
        -2.0 * m.e[0][1].re,
        2.0 * m.e[0][0].im,
    )
}

/// One surface point: E³ coordinates plus the raw su₂ matrix.
#[derive(Debug, Clone, Copy)]
pub struct SurfacePoint {
    pub pos: Vec3,
    pub su2: Mat2,
}

/// Sym-formula image of a frame at λ0 > 0: the traceless part of
/// `λ ∂λ F̂ · F̂⁻¹` (the determinant contribution is pure trace and drops).
pub fn sym_point(frame: &CarrierLoop, lambda0: f64) -> Result<SurfacePoint, LoopError> {
    let a = frame.mat.lambda_log_derivative(lambda0)?;
    let su2 = a.traceless_part();
    Ok(SurfacePoint {
        pos: su2_to_vec(&su2),
        su2,
    })
}

/// Lattice of Sym points for one member of the associated family.
#[derive(Debug, Clone)]
pub struct SurfaceMesh {
    points: Lattice2<SurfacePoint>,
    lambda0: f64,
    provenance: String,
}

impl SurfaceMesh {
    pub fn rect(&self) -> Rect {
        self.points.rect()
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn point(&self, n: i32, m: i32) -> &SurfacePoint {
        self.points.get(n, m)
    }

    pub fn pos(&self, n: i32, m: i32) -> Vec3 {
        self.points.get(n, m).pos
    }

    pub fn positions_row_major(&self) -> Vec<Vec3> {
        self.points.values().iter().map(|p| p.pos).collect()
    }

    /// Displace a single vertex (negative-control hook for the validators).
    pub fn perturb(&mut self, n: i32, m: i32, offset: Vec3) {
        let p = self.points.get_mut(n, m);
        p.pos = p.pos + offset;
        p.su2 = vec_to_su2(&p.pos);
    }
}

/// Evaluate the Sym formula at every site of a frame field.
pub fn build_mesh(
    ff: &FrameField,
    lambda0: f64,
    provenance: impl Into<String>,
) -> Result<SurfaceMesh, LoopError> {
    assert!(lambda0 > 0.0, "the associated family is parametrized by λ0 > 0");
    let points = Lattice2::try_from_fn(ff.rect(), |n, m| sym_point(ff.frame(n, m), lambda0))?;
    Ok(SurfaceMesh {
        points,
        lambda0,
        provenance: provenance.into(),
    })
}

/// One failed check inside a [`GeometryReport`].
#[derive(Debug, Clone)]
pub struct GeometryViolation {
    pub site: (i32, i32),
    pub check: &'static str,
    pub value: f64,
    pub tol: f64,
}

/// Outcome of the discrete-PS characterization checks.
#[derive(Debug, Clone)]
pub struct GeometryReport {
    /// Worst σ₃/σ₁ over interior vertex stars.
    pub max_planarity_ratio: f64,
    /// Worst spread of |f₁ - f| over m at fixed n.
    pub max_a_spread: f64,
    /// Worst spread of |f₂ - f| over n at fixed m.
    pub max_b_spread: f64,
    /// Measured edge lengths a(n) (row-direction), one per n step.
    pub a_lengths: Vec<f64>,
    /// Measured edge lengths b(m) (column-direction).
    pub b_lengths: Vec<f64>,
    pub violations: Vec<GeometryViolation>,
    pub tol: f64,
    pub pass: bool,
}

/// Run the planarity and edge-length checks at tolerance `tol`.
///
/// Planarity is scale-aware (third singular value relative to the first);
/// edge spreads are absolute lengths.
pub fn validate_geometry(mesh: &SurfaceMesh, tol: f64) -> GeometryReport {
    let rect = mesh.rect();
    let mut violations = Vec::new();

    // Vertex stars at interior sites.
    let mut max_ratio = 0.0f64;
    for n in (rect.n_min + 1)..rect.n_max {
        for m in (rect.m_min + 1)..rect.m_max {
            let f = mesh.pos(n, m);
            let star = [
                mesh.pos(n + 1, m) - f,
                mesh.pos(n - 1, m) - f,
                mesh.pos(n, m + 1) - f,
                mesh.pos(n, m - 1) - f,
            ];
            let sv = singular_values_3col(&star);
            let ratio = if sv[0] > 0.0 { sv[2] / sv[0] } else { 0.0 };
            max_ratio = max_ratio.max(ratio);
            if ratio > tol {
                violations.push(GeometryViolation {
                    site: (n, m),
                    check: "star-planarity",
                    value: ratio,
                    tol,
                });
            }
        }
    }

    // Edge lengths: a(n) = |f(n+1, m) - f(n, m)| must not depend on m,
    // b(m) likewise over n. Opposite-edge equality per quadrilateral is
    // subsumed by the spreads.
    let mut a_lengths = Vec::new();
    let mut max_a_spread = 0.0f64;
    for n in rect.n_min..rect.n_max {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for m in rect.m_min..=rect.m_max {
            let len = (mesh.pos(n + 1, m) - mesh.pos(n, m)).norm();
            lo = lo.min(len);
            hi = hi.max(len);
        }
        a_lengths.push(0.5 * (lo + hi));
        let spread = hi - lo;
        max_a_spread = max_a_spread.max(spread);
        if spread > tol {
            violations.push(GeometryViolation {
                site: (n, rect.m_min),
                check: "a-constancy",
                value: spread,
                tol,
            });
        }
    }
    let mut b_lengths = Vec::new();
    let mut max_b_spread = 0.0f64;
    for m in rect.m_min..rect.m_max {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for n in rect.n_min..=rect.n_max {
            let len = (mesh.pos(n, m + 1) - mesh.pos(n, m)).norm();
            lo = lo.min(len);
            hi = hi.max(len);
        }
        b_lengths.push(0.5 * (lo + hi));
        let spread = hi - lo;
        max_b_spread = max_b_spread.max(spread);
        if spread > tol {
            violations.push(GeometryViolation {
                site: (rect.n_min, m),
                check: "b-constancy",
                value: spread,
                tol,
            });
        }
    }

    GeometryReport {
        max_planarity_ratio: max_ratio,
        max_a_spread,
        max_b_spread,
        a_lengths,
        b_lengths,
        pass: violations.is_empty(),
        violations,
        tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loops::LaurentLoop;
    use crate::scalar::ScalarLaurent;
    use alloc::vec;

    #[test]
    fn su2_vector_round_trip() {
        let v = Vec3::new(0.3, -1.2, 0.7);
        let m = vec_to_su2(&v);
        assert!(m.trace().norm() < 1e-15);
        // Anti-Hermitian: m + mᴴ = 0.
        assert!((m + m.conj_transpose()).max_abs() < 1e-15);
        let w = su2_to_vec(&m);
        assert!((v - w).norm() < 1e-15);
    }

    #[test]
    fn constant_frame_maps_to_origin() {
        let f = CarrierLoop::from_unitary(Mat2::phase_diag(0.9));
        let p = sym_point(&f, 1.0).unwrap();
        assert!(p.pos.norm() < 1e-15);
    }

    #[test]
    fn det_scalar_does_not_move_the_point() {
        // Multiplying the carrier by a scalar series changes only the trace
        // part of the log-derivative.
        let ip2 = C64::new(0.0, 0.45);
        let base = CarrierLoop {
            mat: LaurentLoop::new(0, vec![Mat2::identity(), Mat2::off_diag(ip2, ip2)]),
            det: ScalarLaurent::delta_plus_sq(0.9),
        };
        let scaled = CarrierLoop {
            mat: base.mat.mul_scalar(&ScalarLaurent::delta_plus_sq(0.5)),
            det: base.det.mul(&ScalarLaurent::delta_plus_sq(0.5)),
        };
        for lambda0 in [0.5, 1.0, 2.0] {
            let a = sym_point(&base, lambda0).unwrap();
            let b = sym_point(&scaled, lambda0).unwrap();
            assert!((a.pos - b.pos).norm() < 1e-12);
        }
    }
}
