//! Command-line front end for the harmonic Toeplitz engine.

pub mod commands;
pub mod parse;

pub use commands::{dispatch, Command, RunReport, SCHEMA_VERSION};
pub use parse::{parse_binding, parse_radial, parse_rational_fn, parse_symbol, ParseError};
