//! Reading specifications and model files.

use std::path::{Path, PathBuf};

use ltlcheck_core::executor::{Model, ModelDocument, ModelError};
use ltlcheck_core::speclang::{compile, ElaboratedSpec, SpecError};
use serde_path_to_error::Segment;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Spec { path: PathBuf, source: SpecError },
    #[error("{}: {source}", path.display())]
    Model { path: PathBuf, source: ModelError },
}

pub fn read_text(path: &Path) -> Result<String, LoadError> {
    std::fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.to_owned(), source })
}

pub fn load_spec(path: &Path, default_subscript: u32) -> Result<ElaboratedSpec, LoadError> {
    let text = read_text(path)?;
    compile(&text, default_subscript).map_err(|source| LoadError::Spec { path: path.to_owned(), source })
}

/// Parses and validates a model document.
pub fn parse_model(text: &str) -> Result<Model, ModelError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: ModelDocument = serde_path_to_error::deserialize(de).map_err(|e| {
        let mut path = String::new();
        for segment in e.path().iter() {
            match segment {
                Segment::Seq { index } => path.push_str(&format!("/{}", index)),
                Segment::Map { key } => path.push_str(&format!("/{}", key)),
                Segment::Enum { variant } => path.push_str(&format!("/{}", variant)),
                Segment::Unknown => {}
            }
        }
        ModelError { path, reason: e.into_inner().to_string() }
    })?;
    Model::from_document(&doc)
}

pub fn load_model(path: &Path) -> Result<Model, LoadError> {
    let text = read_text(path)?;
    parse_model(&text).map_err(|source| LoadError::Model { path: path.to_owned(), source })
}
