//! Wavefront OBJ export of surface meshes.
//!
//! Byte output is deterministic for fixed input: vertices in lattice
//! storage order (n outer, m inner), elementary quadrilaterals as quad
//! faces, floats via the shortest round-trip formatting.

use std::fmt::Write as _;
use std::path::Path;

use dps_core::sym::SurfaceMesh;

/// Render a mesh as an OBJ document.
pub fn mesh_to_obj(mesh: &SurfaceMesh, timestamp: Option<&str>) -> String {
    let rect = mesh.rect();
    let mut out = String::new();
    out.push_str("# dps surface mesh\n");
    let _ = writeln!(out, "# provenance: {}", mesh.provenance());
    let _ = writeln!(out, "# lambda0: {}", mesh.lambda0());
    let _ = writeln!(
        out,
        "# lattice: n {}..{} m {}..{}",
        rect.n_min, rect.n_max, rect.m_min, rect.m_max
    );
    if let Some(ts) = timestamp {
        let _ = writeln!(out, "# generated: {ts}");
    }

    for (_, p) in rect.iter().map(|s| (s, mesh.pos(s.0, s.1))) {
        let _ = writeln!(out, "v {} {} {}", p.x, p.y, p.z);
    }

    let index = |n: i32, m: i32| rect.index(n, m) + 1;
    for n in rect.n_min..rect.n_max {
        for m in rect.m_min..rect.m_max {
            let _ = writeln!(
                out,
                "f {} {} {} {}",
                index(n, m),
                index(n + 1, m),
                index(n + 1, m + 1),
                index(n, m + 1)
            );
        }
    }
    out
}

pub fn write_obj(mesh: &SurfaceMesh, path: &Path, timestamp: Option<&str>) -> std::io::Result<()> {
    std::fs::write(path, mesh_to_obj(mesh, timestamp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use dps_core::carrier::CarrierLoop;
    use dps_core::dalembert::{FrameField, FrameSite};
    use dps_core::lattice::Lattice2;
    use dps_core::loops::LaurentLoop;
    use dps_core::mat2::{C64, Mat2};
    use dps_core::scalar::ScalarLaurent;
    use dps_core::sym::build_mesh;
    use dps_core::Rect;

    fn tiny_field(extent: i32) -> FrameField {
        // A frame linear in λ per site keeps the Sym points distinct.
        let sites = Lattice2::from_fn(Rect::first_quadrant(extent, extent), |n, m| {
            let ip2 = C64::new(0.0, 0.1 * (n as f64 + 1.0));
            let diag = Mat2::phase_diag(0.05 * m as f64);
            FrameSite {
                frame: CarrierLoop {
                    mat: LaurentLoop::new(0, vec![diag, Mat2::off_diag(ip2, ip2)]),
                    det: ScalarLaurent::delta_plus_sq(0.2 * (n as f64 + 1.0)),
                },
                factors: None,
            }
        });
        FrameField::new(sites)
    }

    #[test]
    fn vertex_and_face_counts() {
        let mesh = build_mesh(&tiny_field(1), 1.0, "t").unwrap();
        let obj = mesh_to_obj(&mesh, None);
        assert_eq!(obj.matches("\nv ").count(), 4);
        assert_eq!(obj.matches("\nf ").count(), 1);

        let mesh3 = build_mesh(&tiny_field(2), 1.0, "t").unwrap();
        let obj3 = mesh_to_obj(&mesh3, None);
        assert_eq!(obj3.matches("\nv ").count(), 9);
        assert_eq!(obj3.matches("\nf ").count(), 4);
        // 1-indexed quad over the first plaquette, m-inner order.
        assert!(obj3.contains("f 1 4 5 2"));
    }

    #[test]
    fn byte_determinism() {
        let mesh = build_mesh(&tiny_field(2), 1.0, "t").unwrap();
        assert_eq!(mesh_to_obj(&mesh, None), mesh_to_obj(&mesh, None));
    }
}
