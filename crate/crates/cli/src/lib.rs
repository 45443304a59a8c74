//! Suite runner behind the `fsdlab` binary: configuration, the verification
//! suites and report assembly.

pub mod config;
pub mod report;
pub mod runner;
pub mod suites;
