//! Number-theoretic Hilbert transform (NHT) generator sequences.
//!
//! Builds the interleaved circulant NHT matrix from a generator sequence,
//! discovers a modulus that makes it orthogonal, and analyses the modular
//! auto- and cross-correlation of the resulting residue sequences.

pub mod arith;
pub mod error;
pub mod nht;

pub use arith::Modulus;
pub use error::{NhtError, Result};
pub use nht::{GeneratorSequence, ResidueSequence};
pub mod cli;
pub mod correlation;
pub mod io;
pub mod reproduce;
pub mod search;
