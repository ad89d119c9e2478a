//! Exact lattice arithmetic for even lattices, discriminant forms, genus
//! symbols, primitive embeddings and hyperbolic reflection chambers.

pub mod autom;
pub mod cli;
pub mod discform;
pub mod embed;
pub mod error;
pub mod files;
pub mod genus;
pub mod hk;
pub mod isom;
pub mod lll;
pub mod padic;
pub mod shortvec;
pub mod standard;
pub mod vinberg;
pub mod lattice;
pub mod matrix;

pub use error::{Error, Result};
pub use lattice::{Lattice, Sublattice, VectorType};
pub use matrix::{Int, IntMatrix, Rat, RatMatrix};
