//! Command-line companion to the `sombl` library: corpus and model file
//! handling, experiment runs and sweeps, and the `sombl` binary's argument
//! surface.

pub mod cli;
pub mod config;
pub mod formats;
pub mod harness;
