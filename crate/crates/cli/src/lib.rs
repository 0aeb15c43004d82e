//! File formats, transports, reports and the command line for
//! `ltlcheck-core`.

pub mod app;
pub mod codec;
pub mod files;
pub mod report;
pub mod runner;
pub mod serve;
pub mod transport;
