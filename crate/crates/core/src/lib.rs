//! Exact computations in Chow rings of matroids: flats, quotients, Bergman classes, nested bases,
//! intersection numbers of simplicial generators, volume polynomials and Hodge-theoretic checks.

pub mod bergman;
pub mod chow;
pub mod error;
pub mod hodge;
pub mod lattice;
pub mod linalg;
pub mod matroid;
pub mod quotient;

pub use error::{Error, Result};
pub use lattice::{FlatId, FlatLattice};
pub use matroid::{GroundSet, Mask, Matroid, Minor, MAX_GROUND};
