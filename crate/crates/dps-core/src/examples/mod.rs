//! The two classical worked constructions: discrete surfaces of revolution
//! (via a dressed potential with a diagonal twist) and discrete Amsler
//! surfaces (constant normalized potential with diagonal initial frames),
//! together with the special-equation and symmetry validators specific to
//! each.

pub mod amsler;
pub mod revolution;
