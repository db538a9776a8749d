//! Desk-scale workbench for the finite constructions behind amenable groups
//! with zero Hilbert compression: word metrics on wreath products, pinned
//! traveling-salesman metrics, GF(2) cube quotients, the explicit embedding
//! maps between them, and exact Euclidean distortion of finite metrics.

pub mod error;
pub mod assembly;
pub mod cli;
pub mod codes;
pub mod distortion;
pub mod gf2;
pub mod groups;
pub mod tsmetric;

pub use error::{Error, Result};
