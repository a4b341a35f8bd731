//! Cross-validation of the two frame constructions: the per-site Birkhoff
//! pipeline against the direct transition-product integration, plus the
//! potential round trip.

use dps_core::birkhoff::SolverConfig;
use dps_core::dalembert::{
    self, build_frame_field, extract_angle_field, extract_potentials, mc_shape_report,
    FrameBuilder, FrameConfig,
};
use dps_core::hirota::{self, direct_frame, hirota_residual_max};
use dps_core::loops::LaurentLoop;
use dps_core::mat2::Mat2;
use dps_core::potentials::{
    accumulate_f_plus, diagonal_correction, DressedPotential, Potential, PotentialPair, SampledFn,
};
use dps_core::Rect;

use rand::{Rng, SeedableRng};

fn random_tables(extent: i32, p: f64, q: f64, seed: u64) -> PotentialPair {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut alphas: Vec<f64> = (0..=extent).map(|_| rng.gen_range(-1.0..1.0)).collect();
    alphas[0] = 0.0;
    let betas: Vec<f64> = (0..=extent).map(|_| rng.gen_range(-1.0..1.0)).collect();
    PotentialPair::new(
        SampledFn::Table { start: 0, values: alphas },
        SampledFn::Table { start: 0, values: betas },
        SampledFn::Constant(p),
        SampledFn::Constant(q),
        (0, extent),
        (0, extent),
    )
    .unwrap()
}

fn frame_config(p: f64, q: f64) -> FrameConfig {
    FrameConfig {
        solver: SolverConfig::for_decay_radius((p.abs() / 2.0).max(q.abs() / 2.0), 1e-11),
        ..FrameConfig::default()
    }
}

#[test]
fn base_point_and_axis_factors_are_explicit() {
    let pp = random_tables(5, 0.8, 0.8, 40);
    let pot = Potential::Normalized(pp.clone());
    let cfg = frame_config(0.8, 0.8);
    let builder = FrameBuilder::new(&pot, Rect::first_quadrant(5, 5), cfg).unwrap();

    // (0,0): everything is the identity.
    let s00 = builder.site(0, 0).unwrap();
    let f00 = s00.factors.as_ref().unwrap();
    assert!(s00.frame.mat.sub(&LaurentLoop::identity()).band_norm() < 1e-12);
    assert!(f00.v_minus.mat.sub(&LaurentLoop::identity()).band_norm() < 1e-12);
    assert!(f00.v_plus.mat.sub(&LaurentLoop::identity()).band_norm() < 1e-12);
    assert!(f00.h.abs() < 1e-12);

    // m = 0: V₋ = Id, V₊ = F̂₊ D, h = k(n).
    let dp = DressedPotential::from_pair(pp.clone());
    let dc = diagonal_correction(&dp).unwrap();
    for n in [1, 3, 5] {
        let s = builder.site(n, 0).unwrap();
        let f = s.factors.as_ref().unwrap();
        assert!(f.v_minus.mat.sub(&LaurentLoop::identity()).band_norm() < 1e-10);
        let expect = accumulate_f_plus(&dp, n, 256)
            .unwrap()
            .mat
            .mul(&LaurentLoop::constant(dc.d(n)));
        assert!(f.v_plus.mat.sub(&expect).band_norm() < 1e-9);
        assert!(
            dalembert::wrap_mod_4pi(f.h - dc.k(n)).abs() < 1e-10,
            "h vs k at n = {n}"
        );
    }

    // n = 0: V₋ = Ĝ₋, V₊ = Id, h = 0.
    for m in [1, 4] {
        let s = builder.site(0, m).unwrap();
        let f = s.factors.as_ref().unwrap();
        assert!(f.v_plus.mat.sub(&LaurentLoop::identity()).band_norm() < 1e-10);
        assert!(f
            .v_minus
            .mat
            .sub(&builder.products().g_minus(m).mat)
            .band_norm()
            < 1e-9);
        assert!(f.h.abs() < 1e-10);
    }
}

#[test]
fn both_frame_products_agree() {
    // F = G₋ V₊ must equal F₊ D V₋ (the two halves of the gluing identity).
    let pp = random_tables(4, 0.9, 0.7, 41);
    let pot = Potential::Normalized(pp.clone());
    let builder = FrameBuilder::new(&pot, Rect::first_quadrant(4, 4), frame_config(0.9, 0.7)).unwrap();
    let dp = DressedPotential::from_pair(pp);
    let dc = diagonal_correction(&dp).unwrap();
    for (n, m) in [(1, 1), (3, 2), (4, 4)] {
        let s = builder.site(n, m).unwrap();
        let f = s.factors.as_ref().unwrap();
        let alt = builder
            .products()
            .f_plus(n)
            .mat
            .mul(&LaurentLoop::constant(dc.d(n)))
            .mul(&f.v_minus.mat);
        assert!(
            s.frame.mat.sub(&alt).band_norm() < 1e-9,
            "site ({n},{m}) products disagree"
        );
    }
}

#[test]
fn dalembert_frame_matches_direct_integration() {
    let extent = 6;
    let (p, q) = (0.8, 0.8);
    let pp = random_tables(extent, p, q, 42);
    let pot = Potential::Normalized(pp.clone());
    let rect = Rect::first_quadrant(extent, extent);
    let ff = build_frame_field(&pot, rect, frame_config(p, q)).unwrap();

    // Extract the angle field; its row/column data must reproduce the
    // potential functions.
    let u00 = 0.4;
    let u = extract_angle_field(&ff, &pot, u00).unwrap();
    for n in 0..extent {
        let alpha_rec = 0.5 * u.u(n + 1, 0) + 0.5 * u.u(n, 0) - u.u(0, 0);
        let alpha_in = pp.alpha.eval(n).unwrap();
        assert!(
            hirota::wrap_mod_2pi(alpha_rec - alpha_in).abs() < 1e-9,
            "alpha mismatch at n = {n}: {alpha_rec} vs {alpha_in}"
        );
    }
    for m in 0..extent {
        let beta_rec = 0.5 * u.u(0, m + 1) + 0.5 * u.u(0, m);
        let beta_in = pp.beta.eval(m).unwrap();
        assert!(
            hirota::wrap_mod_2pi(beta_rec - beta_in).abs() < 1e-9,
            "beta mismatch at m = {m}"
        );
    }

    // The extracted angles solve the Hirota equation.
    let res = hirota_residual_max(&u, &pp.p, &pp.q).unwrap();
    assert!(res < 1e-9, "Hirota residual {res}");

    // Keystone: the direct product frame from the extracted angles equals
    // the factored frame pointwise at λ ∈ {1/2, 1, 2}.
    let ff2 = direct_frame(&u, &pp.p, &pp.q, 256).unwrap();
    for n in 0..=extent {
        for m in 0..=extent {
            for lambda0 in [0.5, 1.0, 2.0] {
                let a = ff.frame(n, m).eval_unitary(lambda0).unwrap();
                let b = ff2.frame(n, m).eval_unitary(lambda0).unwrap();
                let d = (a - b).max_abs();
                assert!(d < 1e-8, "frames differ by {d} at ({n},{m}), λ={lambda0}");
            }
        }
    }

    // The transition matrices have the structural U/V shapes.
    let shape = mc_shape_report(&ff).unwrap();
    assert!(shape.max_u_defect < 1e-9, "U-shape defect {}", shape.max_u_defect);
    assert!(shape.max_v_defect < 1e-9, "V-shape defect {}", shape.max_v_defect);
}

#[test]
fn potentials_round_trip_through_direct_frame() {
    // Evolve random axis data, integrate the frame directly, split it per
    // site, and recover the potential data of the factorization theorems.
    let extent = 5;
    let (p, q) = (0.8, 0.8);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
    let mut u_row: Vec<f64> = (0..=extent).map(|_| rng.gen_range(-1.5..1.5)).collect();
    let u_col: Vec<f64> = (0..=extent).map(|_| rng.gen_range(-1.5..1.5)).collect();
    u_row[0] = u_col[0];
    let ax = dps_core::AxisData::new(
        u_row.clone(),
        u_col.clone(),
        SampledFn::Constant(p),
        SampledFn::Constant(q),
    )
    .unwrap();
    let u = hirota::evolve_u(&ax).unwrap();
    let ff = direct_frame(&u, &ax.p, &ax.q, 256).unwrap();

    let cfg = SolverConfig::for_decay_radius(0.4, 1e-11);
    let ex = extract_potentials(&ff, &cfg, 1e-8).unwrap();
    assert!(ex.m_dependence < 1e-8);
    assert!(ex.n_dependence < 1e-8);

    for n in 0..extent as usize {
        // α(n) = u(n+1,0)/2 + u(n,0)/2 - u(0,0) against the recovered phase.
        let alpha_expect = 0.5 * u_row[n + 1] + 0.5 * u_row[n] - u_row[0];
        let d = hirota::wrap_mod_2pi(ex.alpha[n] - alpha_expect).abs();
        assert!(d < 1e-8, "alpha defect {d} at {n}");
        assert!((ex.p_abs[n] - p).abs() < 1e-8, "p defect at {n}");
    }
    for m in 0..extent as usize {
        let beta_expect = 0.5 * u_col[m + 1] + 0.5 * u_col[m];
        let d = hirota::wrap_mod_2pi(ex.beta[m] - beta_expect).abs();
        assert!(d < 1e-8, "beta defect {d} at {m}");
        assert!((ex.q_abs[m] - q).abs() < 1e-8, "q defect at {m}");
    }

    // Base-point factors reproduce the unnormalized one-step potentials:
    // ℓ(0) = (i/2) p e^{iα(0)} and r(0) = -(i/2) q e^{iβ(0)}.
    use dps_core::mat2::C64;
    let alpha0 = 0.5 * u_row[1] + 0.5 * u_row[0] - u_row[0];
    let l0 = C64::new(0.0, p / 2.0) * C64::from_polar(1.0, alpha0);
    assert!((ex.ell[0] - l0).norm() < 1e-8, "ξ₊ base step mismatch");
    let beta0 = 0.5 * u_col[1] + 0.5 * u_col[0];
    let r0 = C64::new(0.0, -q / 2.0) * C64::from_polar(1.0, beta0);
    assert!((ex.r[0] - r0).norm() < 1e-8, "ξ₋ base step mismatch");
}

#[test]
fn round_trip_potentials_to_frame_and_back() {
    // potentials → frame field → extract_potentials reproduces (α, β, p², q²).
    let extent = 5;
    let (p, q) = (1.1, 0.9);
    let pp = random_tables(extent, p, q, 99);
    let pot = Potential::Normalized(pp.clone());
    let rect = Rect::first_quadrant(extent, extent);
    let ff = build_frame_field(&pot, rect, frame_config(p, q)).unwrap();

    let cfg = SolverConfig::for_decay_radius(0.55, 1e-11);
    let ex = extract_potentials(&ff, &cfg, 1e-7).unwrap();
    for n in 0..extent as usize {
        assert!((ex.p_abs[n].powi(2) - p * p).abs() < 1e-7);
        let a_in = pp.alpha.eval(n as i32).unwrap();
        // Compare the full off-diagonal product (sign-free form).
        let ell_in = dps_core::mat2::C64::new(0.0, p / 2.0)
            * dps_core::mat2::C64::from_polar(1.0, a_in);
        assert!((ex.ell[n] - ell_in).norm() < 1e-7, "ell defect at {n}");
    }
    for m in 0..extent as usize {
        assert!((ex.q_abs[m].powi(2) - q * q).abs() < 1e-7);
        let b_in = pp.beta.eval(m as i32).unwrap();
        let r_in = dps_core::mat2::C64::new(0.0, -q / 2.0)
            * dps_core::mat2::C64::from_polar(1.0, b_in);
        assert!((ex.r[m] - r_in).norm() < 1e-7, "r defect at {m}");
    }

    let _ = Mat2::identity();
}
