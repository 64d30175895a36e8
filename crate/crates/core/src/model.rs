//! Loading a `.lus` file into the forms the checker works on.

use std::collections::BTreeSet;
use std::path::Path;

use crate::lustre::{self, Diagnostic, Program};
use crate::ts::{self, TransitionSystem, TsError};

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Syntax(#[from] Diagnostic),
    #[error(transparent)]
    Lower(#[from] TsError),
    #[error("model has no property")]
    NoProperty,
}

/// A checked program, its normalized form and its transition system.
#[derive(Debug, Clone)]
pub struct LoadedModel {
    pub name: String,
    pub source: Program,
    pub normalized: Program,
    pub ts: TransitionSystem,
}

impl LoadedModel {
    pub fn from_source(name: &str, src: &str) -> Result<Self, LoadError> {
        let source = lustre::parse(src)?;
        let normalized = lustre::normalize(&source)?;
        let ts = ts::lower(&normalized)?;
        Ok(LoadedModel { name: name.to_owned(), source, normalized, ts })
    }

    pub fn from_file(path: &Path) -> Result<Self, LoadError> {
        let src = std::fs::read_to_string(path)
            .map_err(|source| LoadError::Io { path: path.display().to_string(), source })?;
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        Self::from_source(&name, &src)
    }

    /// The first declared property.
    pub fn property(&self) -> Result<&str, LoadError> {
        self.ts.properties.first().map(|(n, _)| n.as_str()).ok_or(LoadError::NoProperty)
    }

    /// Candidate equations in the backward slice of `prop`.
    pub fn slice(&self, prop: &str) -> Result<BTreeSet<String>, LoadError> {
        let all = lustre::slice_backward(&self.normalized, prop)?;
        let cands: BTreeSet<String> = self.ts.candidates().into_iter().collect();
        Ok(all.intersection(&cands).cloned().collect())
    }
}
