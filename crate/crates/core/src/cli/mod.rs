//! Concrete syntax and the command-line front end.

mod command;
mod defs;
mod parse;
mod print;

pub use command::{run_command, EXIT_BUDGET, EXIT_INPUT, EXIT_INVARIANT, EXIT_OK};
pub use defs::{parse_defs, DefsError, DefsFile, DefsOptions, GUARD_BUDGET};
pub use parse::{parse_term, ParseError, ParseErrorKind, Signature};
