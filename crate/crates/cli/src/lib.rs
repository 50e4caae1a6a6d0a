//! Command-line front end for `mcld`: run configuration, reports, the
//! per-module subcommands and the verification recipes.

pub mod commands;
pub mod config;
pub mod recipes;
pub mod report;

pub use config::RunConfig;
pub use report::{CheckRecord, Report, Verdict};
