//! Command-line companion to the `helix-core` library: configuration
//! parsing, verification drivers, and report serialization.

pub mod config;
pub mod report;
pub mod verify;
