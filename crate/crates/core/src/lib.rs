//! Maximal green sequences of cluster quivers and maximal forward
//! hom-orthogonal sequences of modules over bound quiver algebras.
//!
//! - [`quiver`]: ice quivers, mutation, exchange and c-matrices
//! - [`green`]: green sequences and their enumeration
//! - [`algebra`]: relations, potentials, representations and Hom spaces
//! - [`modules`]: catalogs of Schurian modules
//! - [`orthogonality`]: hom-orthogonal sequences and the verification pipeline
//! - [`problem`]: problem files and presets

pub mod algebra;
pub mod green;
pub mod linalg;
pub mod modules;
pub mod orthogonality;
pub mod problem;
pub mod quiver;
