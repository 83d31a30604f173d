//! Numerical analytic objects on finite-volume hyperbolic Riemann orbisurfaces.
//!
//! The library models quotients of the upper half-plane by Hecke congruence
//! groups, and computes the heat kernel, automorphic Green's functions,
//! parabolic Eisenstein series, and the canonical metric coming from weight-2
//! cusp forms. On top of those it verifies a family of identities relating
//! the canonical and hyperbolic metrics through the resolvent trace of the
//! Laplacian.

pub mod canonical;
pub mod eisenstein;
pub mod error;
pub mod fuchsian;
pub mod greens;
pub mod halfplane;
pub mod heat;
pub mod numeric;
pub mod verify;

pub use error::{Error, Result};
