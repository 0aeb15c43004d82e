//! Connections to executors: in-process models, subprocesses speaking the
//! protocol on their standard streams, and TCP endpoints.

use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;
use std::path::PathBuf;
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::str::FromStr;

use ltlcheck_core::executor::{InProcess, Model, ModelSession};
use ltlcheck_core::protocol::{CheckerMessage, Connection, ConnectionError, ExecutorMessage};

use crate::codec::{decode, encode};
use crate::files::{load_model, LoadError};

/// Where the system under test lives, as given to `--executor`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExecutorTarget {
    /// `model:PATH`, a model file interpreted in-process.
    Model(PathBuf),
    /// `exec:COMMAND`, a subprocess run through `sh -c`.
    Exec(String),
    /// `tcp:HOST:PORT`.
    Tcp(String),
}

impl FromStr for ExecutorTarget {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, rest) = s.split_once(':').ok_or_else(|| format!("`{}`: expected model:, exec: or tcp:", s))?;
        if rest.is_empty() {
            return Err(format!("`{}`: missing {} target", s, kind));
        }
        match kind {
            "model" => Ok(ExecutorTarget::Model(rest.into())),
            "exec" => Ok(ExecutorTarget::Exec(rest.into())),
            "tcp" => Ok(ExecutorTarget::Tcp(rest.into())),
            _ => Err(format!("`{}`: unknown executor kind `{}`", s, kind)),
        }
    }
}

impl fmt::Display for ExecutorTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExecutorTarget::Model(p) => write!(f, "model:{}", p.display()),
            ExecutorTarget::Exec(c) => write!(f, "exec:{}", c),
            ExecutorTarget::Tcp(a) => write!(f, "tcp:{}", a),
        }
    }
}

pub type BoxedConnection = Box<dyn Connection + Send>;

/// Opens a fresh executor session per run.
#[derive(Debug, Clone)]
pub enum Connector {
    Model(Model),
    Exec(String),
    Tcp(String),
}

impl Connector {
    /// Model files are loaded and validated once, up front.
    pub fn new(target: &ExecutorTarget) -> Result<Self, LoadError> {
        Ok(match target {
            ExecutorTarget::Model(p) => Connector::Model(load_model(p)?),
            ExecutorTarget::Exec(c) => Connector::Exec(c.clone()),
            ExecutorTarget::Tcp(a) => Connector::Tcp(a.clone()),
        })
    }

    pub fn connect(&self) -> Result<BoxedConnection, ConnectionError> {
        Ok(match self {
            Connector::Model(m) => Box::new(InProcess::new(ModelSession::new(m.clone()))),
            Connector::Exec(c) => Box::new(ChildConnection::spawn(c)?),
            Connector::Tcp(a) => {
                let stream = TcpStream::connect(a).map_err(|e| ConnectionError::Io(format!("{}: {}", a, e)))?;
                let _ = stream.set_nodelay(true);
                let reader = stream.try_clone().map_err(io)?;
                Box::new(LineConnection::new(BufReader::new(reader), stream))
            }
        })
    }
}

fn io(e: std::io::Error) -> ConnectionError {
    ConnectionError::Io(e.to_string())
}

/// The protocol over any line-oriented byte stream pair.
pub struct LineConnection<R, W> {
    reader: R,
    writer: W,
    line: String,
}

impl<R: BufRead, W: Write> LineConnection<R, W> {
    pub fn new(reader: R, writer: W) -> Self {
        LineConnection { reader, writer, line: String::new() }
    }
}

impl<R: BufRead, W: Write> Connection for LineConnection<R, W> {
    fn send(&mut self, msg: &CheckerMessage) -> Result<(), ConnectionError> {
        let mut line = encode(msg);
        line.push('\n');
        self.writer.write_all(line.as_bytes()).map_err(io)?;
        self.writer.flush().map_err(io)
    }

    fn recv(&mut self) -> Result<ExecutorMessage, ConnectionError> {
        self.line.clear();
        if self.reader.read_line(&mut self.line).map_err(io)? == 0 {
            return Err(ConnectionError::Closed);
        }
        decode(&self.line).map_err(|e| ConnectionError::Protocol(format!("undecodable message: {}", e)))
    }
}

/// A subprocess executor; killed when the connection is dropped.
pub struct ChildConnection {
    child: Child,
    inner: LineConnection<BufReader<ChildStdout>, ChildStdin>,
}

impl ChildConnection {
    pub fn spawn(command: &str) -> Result<Self, ConnectionError> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| ConnectionError::Io(format!("cannot start `{}`: {}", command, e)))?;
        let stdin = child.stdin.take().expect("piped");
        let stdout = child.stdout.take().expect("piped");
        Ok(ChildConnection { child, inner: LineConnection::new(BufReader::new(stdout), stdin) })
    }

    fn died(&mut self, e: ConnectionError) -> ConnectionError {
        match self.child.try_wait() {
            Ok(Some(status)) if !status.success() => ConnectionError::Executor(format!("executor exited with {}", status)),
            _ => e,
        }
    }
}

impl Connection for ChildConnection {
    fn send(&mut self, msg: &CheckerMessage) -> Result<(), ConnectionError> {
        self.inner.send(msg).map_err(|e| self.died(e))
    }

    fn recv(&mut self) -> Result<ExecutorMessage, ConnectionError> {
        match self.inner.recv() {
            Err(ConnectionError::Closed) => {
                // Give the process a moment to report its exit status.
                let _ = self.child.wait();
                Err(self.died(ConnectionError::Closed))
            }
            other => other,
        }
    }
}

impl Drop for ChildConnection {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn targets_parse() {
        assert_eq!("model:m.json".parse(), Ok(ExecutorTarget::Model("m.json".into())));
        assert_eq!("tcp:127.0.0.1:9000".parse(), Ok(ExecutorTarget::Tcp("127.0.0.1:9000".into())));
        assert_eq!("exec:./run --x".parse(), Ok(ExecutorTarget::Exec("./run --x".into())));
        assert!("ftp:x".parse::<ExecutorTarget>().is_err());
        assert!("model:".parse::<ExecutorTarget>().is_err());
    }

    #[test]
    fn line_connection_round_trip() {
        let input = b"{\"tag\":\"Stale\",\"version\":3}\n".to_vec();
        let mut out = Vec::new();
        let mut c = LineConnection::new(&input[..], &mut out);
        c.send(&CheckerMessage::End).unwrap();
        assert_eq!(c.recv().unwrap(), ExecutorMessage::Stale { version: 3 });
        assert_eq!(c.recv(), Err(ConnectionError::Closed));
        assert_eq!(out, b"{\"tag\":\"End\"}\n");
    }
}
