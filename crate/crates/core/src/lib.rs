//! Numerical toolkit for entropic lower bounds on geometrically local
//! quantum error correction.
//!
//! The crate covers register-labelled quantum states, entropies, the
//! relative entropy of entanglement, stabilizer codes, noisy local circuits,
//! geometric partitions of embedded graphs, explicit overhead and depth
//! bounds, and a verification harness that checks each inequality on
//! simulated instances.

pub mod bounds;
pub mod circuit;
pub mod entropy;
pub mod error;
pub mod linalg;
pub mod partition;
pub mod qstate;
pub mod random;
pub mod separability;
pub mod stabilizer;
pub mod verify;

pub use error::{Error, Result};
