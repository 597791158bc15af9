//! Desk-scale modular theory: standard subspaces, finite von Neumann algebras,
//! second quantization, Minkowski wedges and discretized Aff(R) models.

pub mod error;
pub mod linalg;
pub mod realified;
pub mod standard;

pub use error::{Error, Result};
pub mod groups;
pub mod json;
pub mod random;
pub mod vn;
pub mod fock;
pub mod wedge;
pub mod affine;
pub mod plot;
pub mod report;
pub mod suites;
