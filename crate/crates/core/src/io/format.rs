//! One-sequence-per-file text format.
//!
//! ```text
//! name = "example1"
//! n = 16
//! modulus = 7283
//! values = [911, 1821, 3642, 1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096]
//! ```
//!
//! The file is TOML with exactly these four keys; `modulus` is optional.
//! Integers are limited to the TOML range (`< 2^63`).

use serde::Deserialize;
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;
use toml::Spanned;

use crate::arith::Modulus;
use crate::error::NhtError;
use crate::nht::{GeneratorSequence, ResidueSequence};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{}: {message}", location(.line))]
    Parse {
        line: Option<usize>,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn location(line: &Option<usize>) -> String {
    match line {
        Some(l) => format!("line {l}"),
        None => "input".into(),
    }
}

impl FormatError {
    pub fn line(&self) -> Option<usize> {
        match self {
            FormatError::Parse { line, .. } => *line,
            FormatError::Io { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceFile {
    pub name: String,
    pub n: usize,
    pub values: Vec<u64>,
    pub modulus: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    name: String,
    n: Spanned<i64>,
    values: Spanned<Vec<Spanned<i64>>>,
    modulus: Option<Spanned<i64>>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

impl SequenceFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let err = |offset: usize, message: String| FormatError::Parse {
            line: Some(line_of(text, offset)),
            message,
        };
        let raw: RawFile = toml::from_str(text).map_err(|e| FormatError::Parse {
            line: e.span().map(|s| line_of(text, s.start)),
            message: e.message().trim().to_string(),
        })?;

        let n = *raw.n.get_ref();
        if n < 2 {
            return Err(err(raw.n.span().start, format!("n = {n} is below 2")));
        }
        let modulus = match &raw.modulus {
            Some(m) if *m.get_ref() < 2 => {
                return Err(err(
                    m.span().start,
                    format!("modulus {} is below 2", m.get_ref()),
                ))
            }
            Some(m) => Some(*m.get_ref() as u64),
            None => None,
        };
        let mut values = Vec::with_capacity(raw.values.get_ref().len());
        for (i, v) in raw.values.get_ref().iter().enumerate() {
            let x = *v.get_ref();
            if x < 0 {
                return Err(err(
                    v.span().start,
                    format!("value {x} at index {i} is negative"),
                ));
            }
            let x = x as u64;
            if let Some(q) = modulus {
                if x >= q {
                    return Err(err(
                        v.span().start,
                        format!("value {x} at index {i} is not below modulus {q}"),
                    ));
                }
            }
            values.push(x);
        }
        if values.len() != n as usize {
            return Err(err(
                raw.values.span().start,
                format!("n = {n} but {} values are listed", values.len()),
            ));
        }
        Ok(Self {
            name: raw.name,
            n: n as usize,
            values,
            modulus,
        })
    }

    pub fn read(path: &Path) -> Result<Self, FormatError> {
        let text = std::fs::read_to_string(path).map_err(|source| FormatError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Canonical text; `parse(emit())` returns `self`.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        writeln!(out, "name = {}", toml::Value::String(self.name.clone())).unwrap();
        writeln!(out, "n = {}", self.n).unwrap();
        if let Some(q) = self.modulus {
            writeln!(out, "modulus = {q}").unwrap();
        }
        let values: Vec<String> = self.values.iter().map(u64::to_string).collect();
        writeln!(out, "values = [{}]", values.join(", ")).unwrap();
        out
    }

    pub fn from_residues(name: &str, s: &ResidueSequence) -> Self {
        Self {
            name: name.to_string(),
            n: s.len(),
            values: s.values().to_vec(),
            modulus: Some(s.modulus().get()),
        }
    }

    pub fn generator(&self) -> Result<GeneratorSequence, NhtError> {
        GeneratorSequence::from_u64s(&self.values)
    }

    /// The values as residues modulo the file's modulus, or `fallback` when absent.
    pub fn residues(&self, fallback: Option<Modulus>) -> Result<ResidueSequence, NhtError> {
        let q = match (self.modulus, fallback) {
            (Some(q), _) => Modulus::new(q)?,
            (None, Some(q)) => q,
            (None, None) => {
                return Err(NhtError::InvalidGenerator(format!(
                    "sequence '{}' has no modulus",
                    self.name
                )))
            }
        };
        let values = self.values.iter().map(|&v| q.reduce(v)).collect();
        ResidueSequence::new(values, q)
    }
}
