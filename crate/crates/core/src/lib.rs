//! Exact computation of derivations, inner and almost-inner derivations,
//! and the Tate-Shafarevich algebra `AID(g)/Inn(g)` of a finite-dimensional
//! Lie algebra given by structure constants.

pub mod aidcert;
pub mod catalog;
pub mod derivations;
pub mod error;
pub mod liealg;
pub mod linalg;
pub mod polyideal;
pub mod report;
pub mod scalars;
pub mod sha;

pub use error::{Error, Result};
