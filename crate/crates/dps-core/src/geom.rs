//! Small Euclidean geometry kit: 3-vectors, symmetric eigensolves, and
//! rigid-motion fitting for the mesh validators.

use alloc::vec::Vec;

use core::ops::{Add, Mul, Neg, Sub};

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn zero() -> Self {
        Vec3::default()
    }

    pub fn dot(&self, o: &Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(&self, o: &Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn normalized(&self) -> Vec3 {
        let n = self.norm();
        if n == 0.0 {
            *self
        } else {
            self.scale(1.0 / n)
        }
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        self.scale(-1.0)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        self.scale(s)
    }
}

/// Row-major 3×3 real matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3 {
    pub e: [[f64; 3]; 3],
}

impl Mat3 {
    pub fn identity() -> Self {
        let mut e = [[0.0; 3]; 3];
        for (i, row) in e.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Mat3 { e }
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        Vec3::new(
            self.e[0][0] * v.x + self.e[0][1] * v.y + self.e[0][2] * v.z,
            self.e[1][0] * v.x + self.e[1][1] * v.y + self.e[1][2] * v.z,
            self.e[2][0] * v.x + self.e[2][1] * v.y + self.e[2][2] * v.z,
        )
    }

    pub fn transpose(&self) -> Mat3 {
        let mut t = *self;
        for i in 0..3 {
            for j in 0..3 {
                t.e[i][j] = self.e[j][i];
            }
        }
        t
    }

    pub fn mul(&self, o: &Mat3) -> Mat3 {
        let mut r = Mat3 { e: [[0.0; 3]; 3] };
        for i in 0..3 {
            for j in 0..3 {
                r.e[i][j] = (0..3).map(|k| self.e[i][k] * o.e[k][j]).sum();
            }
        }
        r
    }

    pub fn det(&self) -> f64 {
        let e = &self.e;
        e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1])
            - e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0])
            + e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0])
    }

    /// ‖RᵀR - Id‖ (max entry), the orthogonality defect.
    pub fn orthogonality_defect(&self) -> f64 {
        let g = self.transpose().mul(self);
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g.e[i][j] - target).abs());
            }
        }
        worst
    }
}

/// Cyclic Jacobi eigensolver for small symmetric matrices.
///
/// Returns eigenvalues (descending) with matching eigenvector columns.
pub fn jacobi_eigen_sym<const N: usize>(mut a: [[f64; N]; N]) -> ([f64; N], [[f64; N]; N]) {
    let mut v = [[0.0f64; N]; N];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }

    for _sweep in 0..64 {
        let mut off = 0.0f64;
        for i in 0..N {
            for j in (i + 1)..N {
                off += a[i][j] * a[i][j];
            }
        }
        if off.sqrt() < 1e-14 {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..N {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..N {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..N {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut vals = [0.0f64; N];
    for i in 0..N {
        vals[i] = a[i][i];
    }
    // Sort descending, permuting columns along.
    let mut order: [usize; N] = [0; N];
    for (i, o) in order.iter_mut().enumerate() {
        *o = i;
    }
    order.sort_unstable_by(|&i, &j| vals[j].partial_cmp(&vals[i]).unwrap());
    let mut vals_sorted = [0.0f64; N];
    let mut vecs_sorted = [[0.0f64; N]; N];
    for (new, &old) in order.iter().enumerate() {
        vals_sorted[new] = vals[old];
        for k in 0..N {
            vecs_sorted[k][new] = v[k][old];
        }
    }
    (vals_sorted, vecs_sorted)
}

/// Singular values (descending) of a tall matrix with 3 columns.
///
/// σ₁ and σ₂ come from the 3×3 Gram eigenvalues. σ₃ is re-measured in data
/// space as `‖A v₃‖` with v₃ the smallest Gram eigenvector: the Gram route
/// alone cannot certify σ₃ below √ε·σ₁, which the near-planar star checks
/// need to.
pub fn singular_values_3col(rows: &[Vec3]) -> [f64; 3] {
    let mut g = [[0.0f64; 3]; 3];
    for r in rows {
        let v = [r.x, r.y, r.z];
        for i in 0..3 {
            for j in 0..3 {
                g[i][j] += v[i] * v[j];
            }
        }
    }
    let (vals, vecs) = jacobi_eigen_sym(g);
    let v3 = Vec3::new(vecs[0][2], vecs[1][2], vecs[2][2]).normalized();
    let sigma3 = rows
        .iter()
        .map(|r| {
            let d = r.dot(&v3);
            d * d
        })
        .sum::<f64>()
        .sqrt();
    [vals[0].max(0.0).sqrt(), vals[1].max(0.0).sqrt(), sigma3]
}

/// A fitted rigid motion `x ↦ R x + t`.
#[derive(Debug, Clone, Copy)]
pub struct RigidMotion {
    pub rotation: Mat3,
    pub translation: Vec3,
    /// RMS point residual of the fit.
    pub rms: f64,
}

impl RigidMotion {
    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.rotation.apply(v) + self.translation
    }
}

/// Least-squares rigid motion mapping `src[i] ↦ dst[i]` (Horn's quaternion
/// method: the optimal rotation is the top eigenvector of a symmetric 4×4
/// built from the cross-covariance).
pub fn fit_rigid_motion(src: &[Vec3], dst: &[Vec3]) -> RigidMotion {
    assert_eq!(src.len(), dst.len());
    assert!(src.len() >= 3, "rigid fit needs at least 3 points");
    let nf = src.len() as f64;
    let cs = src.iter().fold(Vec3::zero(), |a, b| a + *b).scale(1.0 / nf);
    let cd = dst.iter().fold(Vec3::zero(), |a, b| a + *b).scale(1.0 / nf);

    // Cross-covariance S[a][b] = Σ (src - cs)_a (dst - cd)_b.
    let mut s = [[0.0f64; 3]; 3];
    for (x, y) in src.iter().zip(dst.iter()) {
        let u = *x - cs;
        let w = *y - cd;
        let ua = [u.x, u.y, u.z];
        let wa = [w.x, w.y, w.z];
        for a in 0..3 {
            for b in 0..3 {
                s[a][b] += ua[a] * wa[b];
            }
        }
    }

    let trace = s[0][0] + s[1][1] + s[2][2];
    let n4 = [
        [
            trace,
            s[1][2] - s[2][1],
            s[2][0] - s[0][2],
            s[0][1] - s[1][0],
        ],
        [
            s[1][2] - s[2][1],
            s[0][0] - s[1][1] - s[2][2],
            s[0][1] + s[1][0],
            s[2][0] + s[0][2],
        ],
        [
            s[2][0] - s[0][2],
            s[0][1] + s[1][0],
            -s[0][0] + s[1][1] - s[2][2],
            s[1][2] + s[2][1],
        ],
        [
            s[0][1] - s[1][0],
            s[2][0] + s[0][2],
            s[1][2] + s[2][1],
            -s[0][0] - s[1][1] + s[2][2],
        ],
    ];
    let (_vals, vecs) = jacobi_eigen_sym(n4);
    let q = [vecs[0][0], vecs[1][0], vecs[2][0], vecs[3][0]];
    let rotation = quaternion_to_matrix(q);
    let translation = cd - rotation.apply(&cs);

    let mut sq = 0.0f64;
    for (x, y) in src.iter().zip(dst.iter()) {
        let d = *y - (rotation.apply(x) + translation);
        sq += d.dot(&d);
    }
    RigidMotion {
        rotation,
        translation,
        rms: (sq / nf).sqrt(),
    }
}

fn quaternion_to_matrix(q: [f64; 4]) -> Mat3 {
    let (w, x, y, z) = (q[0], q[1], q[2], q[3]);
    Mat3 {
        e: [
            [
                1.0 - 2.0 * (y * y + z * z),
                2.0 * (x * y - w * z),
                2.0 * (x * z + w * y),
            ],
            [
                2.0 * (x * y + w * z),
                1.0 - 2.0 * (x * x + z * z),
                2.0 * (y * z - w * x),
            ],
            [
                2.0 * (x * z - w * y),
                2.0 * (y * z + w * x),
                1.0 - 2.0 * (x * x + y * y),
            ],
        ],
    }
}

/// Axis (unit) and angle in [0, π] of a rotation matrix.
pub fn rotation_axis_angle(r: &Mat3) -> (Vec3, f64) {
    let cos_theta = ((r.e[0][0] + r.e[1][1] + r.e[2][2] - 1.0) / 2.0).clamp(-1.0, 1.0);
    let theta = cos_theta.acos();
    let skew = Vec3::new(
        r.e[2][1] - r.e[1][2],
        r.e[0][2] - r.e[2][0],
        r.e[1][0] - r.e[0][1],
    );
    if skew.norm() > 1e-12 {
        (skew.normalized(), theta)
    } else {
        // θ ≈ 0 or π: take the dominant column of R + Id.
        let mut best = Vec3::new(
            r.e[0][0] + 1.0,
            r.e[1][0],
            r.e[2][0],
        );
        for c in 1..3 {
            let v = Vec3::new(
                r.e[0][c] + if c == 0 { 1.0 } else { 0.0 },
                r.e[1][c] + if c == 1 { 1.0 } else { 0.0 },
                r.e[2][c] + if c == 2 { 1.0 } else { 0.0 },
            );
            if v.norm() > best.norm() {
                best = v;
            }
        }
        (best.normalized(), theta)
    }
}

/// Procrustes distance: RMS after the best rigid alignment.
pub fn rigid_congruence_rms(a: &[Vec3], b: &[Vec3]) -> f64 {
    fit_rigid_motion(a, b).rms
}

#[allow(dead_code)]
pub(crate) fn collect_vec3(it: impl Iterator<Item = Vec3>) -> Vec<Vec3> {
    it.collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn rot_z(theta: f64) -> Mat3 {
        Mat3 {
            e: [
                [theta.cos(), -theta.sin(), 0.0],
                [theta.sin(), theta.cos(), 0.0],
                [0.0, 0.0, 1.0],
            ],
        }
    }

    #[test]
    fn jacobi_diagonalizes_known_matrix() {
        // Eigenvalues of [[2,1,0],[1,2,0],[0,0,5]] are 5, 3, 1.
        let a = [[2.0, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, 5.0]];
        let (vals, vecs) = jacobi_eigen_sym(a);
        assert!((vals[0] - 5.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
        assert!((vals[2] - 1.0).abs() < 1e-12);
        // A v = λ v for the top pair.
        let v = Vec3::new(vecs[0][1], vecs[1][1], vecs[2][1]);
        let av = Vec3::new(
            2.0 * v.x + v.y,
            v.x + 2.0 * v.y,
            5.0 * v.z,
        );
        assert!((av - v.scale(3.0)).norm() < 1e-12);
    }

    #[test]
    fn planarity_singular_values() {
        // Four coplanar offsets have σ₃ = 0; perturbing one breaks it.
        let flat = [
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(-1.0, 0.3, 0.0),
            Vec3::new(0.2, -1.0, 0.0),
        ];
        let sv = singular_values_3col(&flat);
        assert!(sv[2] < 1e-13);
        let mut bent = flat;
        bent[3].z = 1e-3;
        let sv2 = singular_values_3col(&bent);
        assert!(sv2[2] > 1e-4);
    }

    #[test]
    fn rigid_fit_recovers_motion() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let r = rot_z(0.83);
        let t = Vec3::new(0.4, -1.1, 2.0);
        let src: Vec<Vec3> = (0..24)
            .map(|_| {
                Vec3::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                )
            })
            .collect();
        let dst: Vec<Vec3> = src.iter().map(|v| r.apply(v) + t).collect();
        let fit = fit_rigid_motion(&src, &dst);
        assert!(fit.rms < 1e-12);
        assert!(fit.rotation.orthogonality_defect() < 1e-12);
        assert!((fit.rotation.det() - 1.0).abs() < 1e-12);
        assert!((fit.translation - t).norm() < 1e-12);
        let (axis, angle) = rotation_axis_angle(&fit.rotation);
        assert!((angle - 0.83).abs() < 1e-12);
        assert!((axis - Vec3::new(0.0, 0.0, 1.0)).norm() < 1e-10);
    }
}
