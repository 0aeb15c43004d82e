//! Property-based testing of interactive systems against temporal
//! specifications.
//!
//! The crate is `no_std` (it needs `alloc`). It holds the formula engine,
//! the specification language, the checker/executor protocol, the checker
//! loop and an in-process model executor. IO, process and socket
//! transports and the command line live in the `ltlcheck` crate.

#![no_std]

extern crate alloc;

pub mod checker;
pub mod executor;
pub mod expr;
pub mod formula;
pub mod oracle;
pub mod protocol;
pub mod speclang;
pub mod state;
pub mod value;
pub mod verdict;

pub use expr::{EvalError, Expr};
pub use formula::{evaluate_trace, Formula, Guarded, NextKind, Outcome, Progression};
pub use state::{State, StateView};
pub use value::Value;
pub use verdict::{ExtVerdict, Verdict};
