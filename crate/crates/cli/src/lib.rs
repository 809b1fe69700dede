//! Verification suites and report rendering for the `heckeamp` binary.

pub mod commands;
pub mod report;
