//! Shotgun assembly of sparse random graphs: neighborhood profiles, rooted
//! isomorphism, Galton–Watson isomorphism probabilities, non-identifiability
//! certificates and the reconstruction procedure with its admissibility checks.

pub mod error;
pub mod graph;
pub mod rng;
pub mod rooted;

pub use error::{Error, Result};
pub mod pgw;
pub mod estimators;
pub mod blocking;
pub mod io;
pub mod reconstruct;
pub mod admissibility;
