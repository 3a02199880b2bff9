//! Aharonov-Bohm eigenvalues with half-integer circulation, computed as
//! antisymmetric Dirichlet eigenvalues on the double cover of a planar
//! domain branched at the pole.

pub mod analysis;
pub mod assembly;
pub mod cli;
pub mod eigensolve;
pub mod error;
pub mod geometry;
pub mod meshing;
pub mod sparse;
pub mod spectral;

pub use error::{Error, Result};
