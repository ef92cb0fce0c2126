//! The ordering-specification language: syntax tree, parser and printer.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod printer;

use thiserror::Error;

pub use ast::*;
pub use parser::{parse_axiom_file, parse_formula, parse_module_definition, parse_pair_file};
pub use printer::{print_axiom_file, print_formula, print_module_definition};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: u32, col: u32, msg: String },
    #[error("module `{module}` declares event `{event}` twice")]
    DuplicateEvent { module: String, event: String },
    #[error("module `{module}` event indices {indices:?} are not contiguous from 0")]
    NonContiguousEvents { module: String, indices: Vec<u32> },
    #[error("module `{module}` declares instance `{instance}` twice")]
    DuplicateInstance { module: String, instance: String },
    #[error("interface `{module}` cannot have submodules or connection axioms")]
    InterfaceStructure { module: String },
}

/// Parses one formula; shared entry point for tests and linting.
pub fn parse_litmus_expression(text: &str) -> Result<Formula, ParseError> {
    parse_formula(text)
}
