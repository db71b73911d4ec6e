//! Matter-wave solitons in collisionally inhomogeneous condensates.
//!
//! The crate evolves the 1D Gross-Pitaevskii equation with a spatially varying
//! interaction `g(x)`, both directly and after the substitution `Ψ = u/√g`, and
//! compares the PDE against a hierarchy of reduced soliton models.

// Negated float comparisons are used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bright;
pub mod dark;
pub mod error;
pub mod grid;
pub mod harness;
pub mod ode;
pub mod pde;
pub mod profile;
pub mod validation;

pub use error::{Error, Result};
pub use grid::{ComplexField, SpatialGrid};
pub use ode::Stepper;
pub use profile::{make_inverse_square, InhomogeneityProfile};
