//! Library surface of the fischerlab tool: the expression parser, the JSON
//! document formats, and the command implementations.

pub mod commands;
pub mod document;
pub mod parse;

pub use commands::{run, Cli, CliError};
pub use document::{PolynomialDocument, TermDocument};
pub use parse::{parse_expression, print_expression, ParseError};
