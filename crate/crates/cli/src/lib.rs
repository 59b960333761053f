//! Experiment harness for the coupled column: configuration loading and the
//! drivers that write CSV tables and JSON metadata.

pub mod commands;
pub mod config;
pub mod output;
