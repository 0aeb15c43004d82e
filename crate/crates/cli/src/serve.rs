//! The model executor's side of the protocol over byte streams.

use std::io::{BufRead, Write};
use std::net::TcpListener;
use std::time::Duration;

use ltlcheck_core::executor::{ExecutorError, Model, ModelSession};
use ltlcheck_core::protocol::CheckerMessage;
use thiserror::Error;

use crate::codec::{decode, encode, DecodeError};

#[derive(Debug, Error)]
pub enum ServeError {
    #[error("transport error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: malformed message: {source}")]
    Decode { line: usize, source: DecodeError },
    #[error("{0}")]
    Executor(#[from] ExecutorError),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ServeOptions {
    /// Sleep for each elapsed logical millisecond.
    pub realtime: bool,
}

/// Serves one session until `End` or end of input.
pub fn serve_session<R: BufRead, W: Write>(
    model: Model,
    reader: R,
    mut writer: W,
    options: ServeOptions,
) -> Result<(), ServeError> {
    let mut session = ModelSession::new(model);
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let msg: CheckerMessage = decode(&line).map_err(|source| ServeError::Decode { line: i + 1, source })?;
        let before = session.now();
        let replies = session.handle(&msg)?;
        if options.realtime {
            std::thread::sleep(Duration::from_millis(session.now() - before));
        }
        for reply in replies {
            writeln!(writer, "{}", encode(&reply))?;
        }
        writer.flush()?;
        if session.is_ended() {
            break;
        }
    }
    Ok(())
}

/// Accepts connections forever, one fresh session per connection.
pub fn serve_tcp(model: Model, listener: TcpListener, options: ServeOptions) -> Result<(), ServeError> {
    for stream in listener.incoming() {
        let stream = stream?;
        let model = model.clone();
        std::thread::spawn(move || {
            let peer = stream.peer_addr().map(|a| a.to_string()).unwrap_or_default();
            let result = stream
                .try_clone()
                .map_err(ServeError::from)
                .and_then(|r| serve_session(model, std::io::BufReader::new(r), stream, options));
            if let Err(e) = result {
                eprintln!("session {}: {}", peer, e);
            }
        });
    }
    Ok(())
}
