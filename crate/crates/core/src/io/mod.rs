//! Sequence files, fixtures and CSV output.

pub mod csv;
pub mod fixtures;
pub mod format;

pub use format::{FormatError, SequenceFile};
