//! Newline-delimited JSON encoding of protocol messages.

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("byte {offset}: {reason}")]
pub struct DecodeError {
    /// Byte offset into the line where decoding failed.
    pub offset: usize,
    pub reason: String,
}

/// Encodes a message as one line of JSON, without the trailing newline.
pub fn encode<M: Serialize>(msg: &M) -> String {
    serde_json::to_string(msg).expect("protocol messages always serialize")
}

/// Decodes one line; a trailing newline is allowed.
pub fn decode<M: DeserializeOwned>(line: &str) -> Result<M, DecodeError> {
    let line = line.strip_suffix('\n').unwrap_or(line);
    let line = line.strip_suffix('\r').unwrap_or(line);
    serde_json::from_str(line).map_err(|e| DecodeError { offset: offset_of(line, e.line(), e.column()), reason: e.to_string() })
}

fn offset_of(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let start: usize = text.split_inclusive('\n').take(line - 1).map(str::len).sum();
    (start + column.saturating_sub(1)).min(text.len())
}
