//! Concrete syntax for regular programs and two-sorted formulas.
//!
//! Programs use the clingo rule syntax restricted to regular rules:
//!
//! ```text
//! even(2*X) :- X = -10..10.
//! {foo(X)} :- even(X).
//! :- not foo(0).
//! ```
//!
//! Formulas use `forall`, `exists`, `<->`, `->`, `|`, `&`, `~`, `true`,
//! `false` and the comparison symbols `= != < > <= >=` (the Unicode
//! connectives are accepted as well). Variables named `I`..`N` are
//! integer-sorted, all others general; `int:X` and `gen:I` override.

mod formula;
pub(crate) mod lexer;
pub mod print;
mod program;

use std::fmt;

use thiserror::Error;

use crate::formula::Formula;
use crate::sorts::{check_sorts, SortError};
use crate::syntax::Program;
use lexer::{Tok, Token};

pub use print::{
    formula_to_string, print_formula, print_program, print_rule, term_to_string, tptp_annotated,
    Style,
};

/// Position of a parse error; line and column are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub file: String,
    pub line: usize,
    pub column: usize,
}

impl SourceSpan {
    pub fn new(file: &str, line: usize, column: usize) -> Self {
        SourceSpan {
            file: file.to_string(),
            line,
            column,
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Syntax(String),
    /// A construct clingo accepts but that is not part of regular programs.
    NonRegular(String),
    Sort(SortError),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ParseError {
    pub span: SourceSpan,
    pub kind: ErrorKind,
}

impl ParseError {
    pub fn is_non_regular(&self) -> bool {
        matches!(self.kind, ErrorKind::NonRegular(_))
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ErrorKind::Syntax(msg) => write!(f, "{}: syntax error: {msg}", self.span),
            ErrorKind::NonRegular(msg) => write!(f, "{}: non-regular construct: {msg}", self.span),
            ErrorKind::Sort(err) => write!(f, "{}: sort error: {err}", self.span),
        }
    }
}

const DEFAULT_FILE: &str = "<input>";

pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    parse_program_named(text, DEFAULT_FILE)
}

/// Like [`parse_program`], with `file` recorded in error spans.
pub fn parse_program_named(text: &str, file: &str) -> Result<Program, ParseError> {
    let tokens = lexer::tokenize(text, file)?;
    program::ProgramParser::new(Cursor::new(tokens, file)).program()
}

/// Parses one formula and checks it is well-sorted.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let tokens = lexer::tokenize(text, DEFAULT_FILE)?;
    let mut cursor = Cursor::new(tokens, DEFAULT_FILE);
    let start = cursor.span();
    let f = formula::FormulaParser::new(&mut cursor).formula()?;
    cursor.expect_eof()?;
    check_sorts(&f).map_err(|e| ParseError {
        span: start,
        kind: ErrorKind::Sort(e),
    })?;
    Ok(f)
}

/// Parses one formula without the sort check.
pub fn parse_formula_unchecked(text: &str) -> Result<Formula, ParseError> {
    let tokens = lexer::tokenize(text, DEFAULT_FILE)?;
    let mut cursor = Cursor::new(tokens, DEFAULT_FILE);
    let f = formula::FormulaParser::new(&mut cursor).formula()?;
    cursor.expect_eof()?;
    Ok(f)
}

/// Parses an axiom file: formulas each terminated by `.`.
pub fn parse_axioms(text: &str) -> Result<Vec<Formula>, ParseError> {
    parse_axioms_named(text, DEFAULT_FILE)
}

pub fn parse_axioms_named(text: &str, file: &str) -> Result<Vec<Formula>, ParseError> {
    let tokens = lexer::tokenize(text, file)?;
    let mut cursor = Cursor::new(tokens, file);
    let mut out = Vec::new();
    while cursor.peek() != &Tok::Eof {
        let start = cursor.span();
        let f = formula::FormulaParser::new(&mut cursor).formula()?;
        cursor.expect(&Tok::Dot, "`.` after axiom")?;
        check_sorts(&f).map_err(|e| ParseError {
            span: start,
            kind: ErrorKind::Sort(e),
        })?;
        out.push(f);
    }
    Ok(out)
}

pub(crate) struct Cursor {
    tokens: Vec<Token>,
    pos: usize,
    file: String,
}

impl Cursor {
    fn new(tokens: Vec<Token>, file: &str) -> Self {
        Cursor {
            tokens,
            pos: 0,
            file: file.to_string(),
        }
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let idx = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[idx].tok
    }

    fn bump(&mut self) -> Tok {
        let tok = self.tokens[self.pos].tok.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn span(&self) -> SourceSpan {
        let t = &self.tokens[self.pos];
        SourceSpan::new(&self.file, t.line, t.column)
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError {
            span: self.span(),
            kind: ErrorKind::Syntax(msg.into()),
        }
    }

    fn non_regular(&self, msg: impl Into<String>) -> ParseError {
        ParseError {
            span: self.span(),
            kind: ErrorKind::NonRegular(msg.into()),
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        self.error(format!("expected {wanted}, found {}", self.peek()))
    }

    fn expect(&mut self, tok: &Tok, wanted: &str) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        if self.peek() == &Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }
}
