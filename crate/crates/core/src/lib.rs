//! Operational probability models end to end: run logs to state vectors,
//! state polytope geometry, barycentric decompositions, ontology
//! classification, dynamics audits and an exact Hilbert-space
//! representation.

pub mod cli;
pub mod decompose;
pub mod dynamics;
pub mod empirical;
pub mod error;
pub mod fixtures;
pub mod linalg;
pub mod formats;
pub mod lp;
pub mod ontology;
pub mod quantum;
pub mod schema;
pub mod statespace;

pub use error::{Error, Result};
