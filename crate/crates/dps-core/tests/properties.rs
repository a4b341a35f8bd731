//! Algebraic invariants of the loop arithmetic and the factorization,
//! exercised on seeded random inputs.

use dps_core::birkhoff::{split_minus_plus, split_plus_minus, SolverConfig};
use dps_core::loops::LaurentLoop;
use dps_core::mat2::{C64, Mat2};
use dps_core::potentials::{xi_minus_raw, xi_plus_raw};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_mat(rng: &mut ChaCha8Rng) -> Mat2 {
    let mut c = || C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    Mat2::new(c(), c(), c(), c())
}

fn random_loop(rng: &mut ChaCha8Rng, lo: i32, hi: i32) -> LaurentLoop {
    let coeff = (lo..=hi).map(|_| random_mat(rng)).collect();
    LaurentLoop::new(lo, coeff)
}

/// Random product of twisted unitary-carrier U/V factors.
fn random_uv_product(rng: &mut ChaCha8Rng, factors: usize, p: f64, q: f64) -> LaurentLoop {
    let mut phi = LaurentLoop::identity();
    for j in 0..factors {
        let ang = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        let f = if j % 2 == 0 {
            let mut u = xi_plus_raw(p, 0.0).mat;
            // Put the angle on the diagonal the way the moving frame does.
            u = LaurentLoop::new(
                0,
                vec![
                    Mat2::phase_diag(-ang / 2.0),
                    u.at(1),
                ],
            );
            u
        } else {
            xi_minus_raw(q, ang).mat
        };
        phi = phi.mul(&f);
    }
    phi
}

#[test]
fn multiplication_is_associative() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..20 {
        let a = random_loop(&mut rng, -3, 0);
        let b = random_loop(&mut rng, -1, 2);
        let c = random_loop(&mut rng, 0, 3);
        let lhs = a.mul(&b).mul(&c);
        let rhs = a.mul(&b.mul(&c));
        assert!(lhs.sub(&rhs).band_norm() < 1e-12);
    }
}

#[test]
fn determinant_is_multiplicative() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for _ in 0..20 {
        let a = random_loop(&mut rng, -2, 1);
        let b = random_loop(&mut rng, -1, 3);
        let lhs = a.mul(&b).det().trim(1e-300);
        let rhs = a.det().mul(&b.det()).trim(1e-300);
        assert!(lhs.sub(&rhs).band_norm() < 1e-12);
    }
}

#[test]
fn twisting_survives_multiplication() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for _ in 0..20 {
        let a = random_uv_product(&mut rng, 4, 1.0, 0.8);
        let b = random_uv_product(&mut rng, 3, 0.7, 1.3);
        assert!(a.check_twisted(1e-12));
        assert!(b.check_twisted(1e-12));
        assert!(a.mul(&b).check_twisted(1e-11));
    }
}

#[test]
fn log_derivative_obeys_cocycle_rule() {
    // D(ab) = D(a) + a D(b) a⁻¹ pointwise, D = λ ∂λ(·) (·)⁻¹.
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for _ in 0..10 {
        let a = random_uv_product(&mut rng, 4, 1.1, 0.9);
        let b = random_uv_product(&mut rng, 4, 0.6, 1.2);
        for lambda0 in [0.7, 1.0, 1.8] {
            let z = C64::new(lambda0, 0.0);
            let da = a.lambda_log_derivative(lambda0).unwrap();
            let db = b.lambda_log_derivative(lambda0).unwrap();
            let dab = a.mul(&b).lambda_log_derivative(lambda0).unwrap();
            let av = a.evaluate(z).unwrap();
            let av_inv = av.inverse().unwrap();
            let rhs = da + av * db * av_inv;
            assert!((dab - rhs).max_abs() < 1e-10, "cocycle defect at λ={lambda0}");
        }
    }
}

#[test]
fn unnormalized_potentials_are_unitary_after_division() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    for _ in 0..20 {
        let p = rng.gen_range(0.2..1.8);
        let alpha = rng.gen_range(-3.0..3.0);
        let xi = xi_plus_raw(p, alpha);
        assert!(xi.mat.check_twisted(0.0));
        for lambda0 in [0.5, 1.0, 2.0] {
            let v = xi.eval_unitary(lambda0).unwrap();
            assert!(v.unitarity_defect() < 1e-12);
        }
    }
}

#[test]
fn split_factors_agree_between_orders_pointwise() {
    // Both factorization orders reconstruct the same loop; their factors
    // compose to the identity crosswise at circle points.
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let cfg = SolverConfig::for_decay_radius(0.5, 1e-12);
    let phi = random_uv_product(&mut rng, 6, 1.0, 1.0);
    let smp = split_minus_plus(&phi, &cfg).unwrap();
    let spm = split_plus_minus(&phi, &cfg).unwrap();
    for j in 0..8 {
        let z = C64::from_polar(1.0, std::f64::consts::TAU * j as f64 / 8.0);
        let rec1 = smp.minus.evaluate(z).unwrap() * smp.plus.evaluate(z).unwrap();
        let rec2 = spm.plus.evaluate(z).unwrap() * spm.minus.evaluate(z).unwrap();
        assert!((rec1 - rec2).max_abs() < 1e-9);
    }
}
