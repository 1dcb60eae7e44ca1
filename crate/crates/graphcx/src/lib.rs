//! Graph complexes at finite bidegree: hairy, oriented, sourced and ribbon
//! graphs, their differentials, the forest map from hairy to oriented graphs,
//! and the map from oriented graphs to ribbon graphs, all as exact sparse
//! matrices.

mod canon;
pub mod complexes;
pub mod error;
pub mod exec;
pub mod forest;
pub mod gen;
pub mod graph;
pub mod linalg;
pub mod matrix;
pub mod ribbon;
pub mod total;
pub mod verify;

pub use complexes::{Combo, ComplexSlice, SliceKey, SliceStore};
pub use error::{Error, Result};
pub use exec::Exec;
pub use graph::{canonicalize, CanonicalTerm, Family, FamilyTag, LabeledDiGraph, ParityRules};
pub use matrix::{SparseRationalMatrix, Q};
