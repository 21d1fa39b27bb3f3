//! Exact exterior/Clifford algebra over a small scalar tower, metatensor
//! nesting, a truncated `Z⁴` lattice of point kets, and invariance checks of
//! the resulting vacuum states.

pub mod error;
pub mod exec;
pub mod exterior;
pub mod lattice;
pub mod linalg;
pub mod run;
pub mod metatensor;
pub mod scalar;
pub mod symmetry;
pub mod vacua;

pub use error::{Error, Result};
pub use exterior::{Atom, Extensor, Label, Sector, Word};
pub use linalg::Matrix;
pub use scalar::{Scalar, Tower};
