//! Library surface of the command-line frontend, exposed so integration
//! tests can drive the commands in-process.

pub mod commands;
pub mod config;
pub mod ingest;
pub mod synth;
