//! Command-line front end: the model expression parser, subcommand logic and
//! deterministic report rendering. The binary in `main.rs` is a thin wrapper
//! over this library so the whole surface is testable in-process.

pub mod parse;
pub mod report;
pub mod run;
pub mod selftest;

pub use parse::{parse_expr, ParseError};
pub use report::{OutputFormat, Report};
pub use run::{
    cmd_e1, cmd_eval, cmd_growth, cmd_mc, cmd_ss, parse_field_flag, parse_window_flag, CliError,
    CliResult, GrowthSource, RunConfig,
};
pub use selftest::cmd_selftest;
