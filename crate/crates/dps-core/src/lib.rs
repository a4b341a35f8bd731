//! Loop-group construction of discrete pseudospherical (constant negative
//! Gauss curvature) surfaces in Euclidean 3-space.
//!
//! A discrete PS surface is encoded by its extended frame `F(n, m, λ)`, a
//! lattice-indexed family of SU₂-valued loops in the spectral parameter λ
//! solving the difference system `F₁ = F U`, `F₂ = F V`. This crate builds
//! such frames two independent ways and turns them into meshes:
//!
//! * the separation-of-variables route: one-variable potential data
//!   `(α, β, p, q)` is integrated to one-sided loop products and glued by
//!   Birkhoff factorization at every lattice site ([`dalembert`]);
//! * the direct route: the Hirota (discrete sine-Gordon) equation is evolved
//!   from axis data and the frame is accumulated as ordered products of the
//!   transition matrices ([`hirota`]).
//!
//! Surfaces come out of either frame through the Sym formula
//! `f = λ (∂F/∂λ) F⁻¹` ([`sym`]), and the two routes cross-validate each
//! other pointwise. The two classical worked constructions — surfaces of
//! revolution and Amsler surfaces — live in [`examples`], and the companion
//! correspondence with the flow of discrete constant-torsion space curves in
//! [`curve_flow`].
//!
//! All loops are stored as finite-band matrix Laurent series with the scalar
//! normalizers `Δ± = sqrt(1 + (p/2)² λ^±²)` split off and tracked separately
//! as exact determinants, so the whole pipeline is square-root free; see
//! [`carrier::CarrierLoop`].
//!
//! The crate is `no_std`-compatible (with `alloc`); the default `std` feature
//! only forwards to the float backends of `num-complex`/`num-traits`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod birkhoff;
pub mod carrier;
pub mod curve_flow;
pub mod dalembert;
pub mod examples;
pub mod geom;
pub mod hirota;
pub mod lattice;
mod linsolve;
pub mod loops;
pub mod mat2;
pub mod potentials;
pub mod scalar;
pub mod sym;

pub use birkhoff::{BirkhoffOrder, BirkhoffSplit, SolverConfig};
pub use carrier::CarrierLoop;
pub use dalembert::{FrameConfig, FrameField, FrameSite};
pub use hirota::{AngleField, AxisData};
pub use lattice::{Lattice2, Rect};
pub use loops::{LaurentLoop, LoopClass};
pub use mat2::{Mat2, C64};
pub use potentials::{DressedPotential, Potential, PotentialPair, SampledFn};
pub use scalar::ScalarLaurent;
pub use sym::{SurfaceMesh, SurfacePoint};
