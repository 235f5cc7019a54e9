//! File formats, plots and the command-line front end over
//! `multirate-core`.
//!
//! Exit codes: 0 on success, 2 for unreadable or invalid input, 3 when the
//! numerics fail on valid input.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod commands;
pub mod error;
pub mod formats;
pub mod svg;

pub use cli::{run, Cli};
pub use error::{CliError, CliResult};
