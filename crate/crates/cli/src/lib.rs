//! Front end for `nullcert`: run reports, table files and the subcommands.

pub mod commands;
pub mod report;
pub mod tables;

pub use report::{RunReport, Verdict};
