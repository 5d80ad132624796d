//! Hilbert functions and graded Betti numbers of fat point ideals supported
//! at up to six points of the projective plane, computed through the class
//! lattice of the blown-up surface.

pub mod config;
pub mod cones;
pub mod error;
pub mod lattice;
pub mod murank;
pub mod oracle;
pub mod resolution;
pub mod weyl;

pub use error::{Error, Result};
pub use lattice::DivisorClass;
