// SPDX-License-Identifier: Apache-2.0

//! Lexing, parsing and resolution of the supported Solidity fragment.

use std::fmt;

use thiserror::Error;

pub mod lexer;
pub mod parser;
pub mod resolve;
pub mod syntax;
pub mod typed;
pub mod types;

pub use lexer::Expectation;
pub use typed::{TExpr, TExprKind, TStmt, TypedContract};
pub use types::{DataLoc, LocCategory, SolType};

/// Source position (1-based line and column).
///
/// Spans never take part in tree equality: two trees that differ only in
/// positions compare equal.
#[derive(Clone, Copy, Debug, Default, Eq)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl Span {
    pub fn new(line: usize, col: usize) -> Self {
        Span { line, col }
    }
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error, Clone)]
pub enum FrontendError {
    #[error("{span}: syntax error: {msg}")]
    Syntax { span: Span, msg: String },
    #[error("{span}: unsupported: {msg}")]
    Unsupported { span: Span, msg: String },
    #[error("{span}: invalid expectation: {msg}")]
    Expectation { span: Span, msg: String },
    #[error("{span}: {msg}")]
    Resolve { span: Span, msg: String },
    #[error("{span}: type error: {msg}")]
    Type { span: Span, msg: String },
}

impl FrontendError {
    pub fn syntax(span: Span, msg: impl Into<String>) -> Self {
        FrontendError::Syntax { span, msg: msg.into() }
    }

    pub fn unsupported(span: Span, msg: impl Into<String>) -> Self {
        FrontendError::Unsupported { span, msg: msg.into() }
    }

    pub fn span(&self) -> Span {
        match self {
            FrontendError::Syntax { span, .. }
            | FrontendError::Unsupported { span, .. }
            | FrontendError::Expectation { span, .. }
            | FrontendError::Resolve { span, .. }
            | FrontendError::Type { span, .. } => *span,
        }
    }
}

/// Parsed but unresolved source, plus lexer warnings.
#[derive(Clone, Debug)]
pub struct Parsed {
    pub unit: syntax::SourceUnit,
    pub warnings: Vec<String>,
}

pub fn parse_source(text: &str) -> Result<Parsed, FrontendError> {
    let lexed = lexer::lex(text)?;
    let unit = parser::Parser::new(lexed.tokens).parse_source_unit()?;
    Ok(Parsed { unit, warnings: lexed.warnings })
}

pub fn resolve_and_check(parsed: &Parsed) -> Result<TypedContract, FrontendError> {
    resolve::resolve(&parsed.unit, parsed.warnings.clone())
}

/// Parses and resolves in one go.
pub fn load(text: &str) -> Result<TypedContract, FrontendError> {
    resolve_and_check(&parse_source(text)?)
}

pub fn type_of(e: &TExpr) -> (SolType, LocCategory) {
    (e.ty.clone(), e.cat)
}
