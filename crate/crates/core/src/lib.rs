//! Exact computations on orbit spaces of compact coregular linear groups:
//! P-matrices built from integrity bases, the boundary equation, and the
//! stratification of the orbit space by rank of the P-matrix.

pub mod basisreg;
pub mod boundary;
pub mod catalog;
pub mod error;
pub mod pmatrix;
pub mod polyring;
pub mod searchq2;
pub mod strata;

pub use error::{Error, Result};
