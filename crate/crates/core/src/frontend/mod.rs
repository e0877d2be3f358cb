//! Arrow do-notation: parsing and elaboration to effectful diagrams.
//!
//! ```text
//! program := [ident "="] "proc" pattern "->" "do" ["{"] stmt* "return" expr ["}"]
//! stmt    := pattern "<-" ( string | ident "(" vars ")" | ident "-<" expr ) [";"]
//! pattern := "()" | binder | "(" binder ("," binder)* ")"
//! binder  := ident [":" ident]
//! expr    := "()" | ident | "(" ident ("," ident)* ")"
//! ```
//!
//! `--` starts a comment. Variables are linear: each is bound once and used
//! exactly once. Pure generators are called as `g(args)` and effectful ones
//! as `g -< args`; a string literal stands for the nullary pure generator of
//! the same name.

mod elaborate;
mod lexer;
mod parser;

use std::fmt;

use thiserror::Error;

use crate::signature::SortId;

pub use elaborate::elaborate;
pub use parser::parse;

/// A line and column, both starting at 1.
///
/// Positions are bookkeeping for error messages; they never distinguish two
/// syntax trees, so every pair of positions compares equal.
#[derive(Clone, Copy, Debug, Default, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl PartialEq for Pos {
    fn eq(&self, _: &Pos) -> bool {
        true
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Binder {
    pub name: String,
    pub sort: Option<SortId>,
    pub pos: Pos,
}

/// A bound tuple of variables; empty for `()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    pub binders: Vec<Binder>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Var {
    pub name: String,
    pub pos: Pos,
}

/// A tuple of variable uses; empty for `()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub vars: Vec<Var>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rhs {
    /// `"text"`: the nullary pure generator named `text`.
    Literal(String),
    /// `g(args)`.
    Pure { gen: String, args: Expr },
    /// `g -< arg`.
    Effect { gen: String, arg: Expr },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stmt {
    pub pattern: Pattern,
    pub rhs: Rhs,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub name: Option<String>,
    pub params: Pattern,
    pub stmts: Vec<Stmt>,
    pub result: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error("{pos}: syntax error: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("{pos}: unbound variable `{name}`")]
    UnboundVariable { name: String, pos: Pos },
    #[error("{pos}: variable `{name}` is used more than once")]
    ReusedVariable { name: String, pos: Pos },
    #[error("{pos}: variable `{name}` is never used")]
    UnusedVariable { name: String, pos: Pos },
    #[error("{pos}: variable `{name}` is bound twice")]
    DuplicateBinding { name: String, pos: Pos },
    #[error("{pos}: `{gen}` is {declared} but is called as {used}")]
    PurityMismatch {
        gen: String,
        declared: &'static str,
        used: &'static str,
        pos: Pos,
    },
    #[error("{pos}: unknown generator `{gen}`")]
    UnknownGenerator { gen: String, pos: Pos },
    #[error("{pos}: literal \"{literal}\" is not a declared nullary pure generator with one output")]
    UnknownLiteral { literal: String, pos: Pos },
    #[error("{pos}: `{gen}` takes {expected} wires but is given {found}")]
    ArityMismatch {
        gen: String,
        expected: usize,
        found: usize,
        pos: Pos,
    },
    #[error("{pos}: `{name}` has sort `{found}` but `{expected}` is expected")]
    SortMismatch {
        name: String,
        expected: SortId,
        found: SortId,
        pos: Pos,
    },
    #[error("{pos}: undeclared sort `{sort}`")]
    UndeclaredSort { sort: SortId, pos: Pos },
    #[error("{pos}: cannot infer the sort of parameter `{name}`; annotate it as `{name}: Sort`")]
    UntypedParameter { name: String, pos: Pos },
    #[error("{pos}: variables {} are not adjacent and in order on the wire stack", .names.join(", "))]
    UnalignedVariables { names: Vec<String>, pos: Pos },
}

impl FrontendError {
    pub fn pos(&self) -> Pos {
        match self {
            FrontendError::Syntax { pos, .. }
            | FrontendError::UnboundVariable { pos, .. }
            | FrontendError::ReusedVariable { pos, .. }
            | FrontendError::UnusedVariable { pos, .. }
            | FrontendError::DuplicateBinding { pos, .. }
            | FrontendError::PurityMismatch { pos, .. }
            | FrontendError::UnknownGenerator { pos, .. }
            | FrontendError::UnknownLiteral { pos, .. }
            | FrontendError::ArityMismatch { pos, .. }
            | FrontendError::SortMismatch { pos, .. }
            | FrontendError::UndeclaredSort { pos, .. }
            | FrontendError::UntypedParameter { pos, .. }
            | FrontendError::UnalignedVariables { pos, .. } => *pos,
        }
    }
}

fn write_tuple<T>(f: &mut fmt::Formatter<'_>, items: &[T], one: impl Fn(&T) -> String) -> fmt::Result {
    match items {
        [] => f.write_str("()"),
        [x] => f.write_str(&one(x)),
        _ => {
            let parts: Vec<String> = items.iter().map(one).collect();
            write!(f, "({})", parts.join(", "))
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, &self.binders, |b| match &b.sort {
            Some(s) => format!("{}: {s}", b.name),
            None => b.name.clone(),
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_tuple(f, &self.vars, |v| v.name.clone())
    }
}

fn quote(text: &str) -> String {
    let mut out = String::from("\"");
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <- ", self.pattern)?;
        match &self.rhs {
            Rhs::Literal(text) => f.write_str(&quote(text)),
            Rhs::Pure { gen, args } => {
                let names: Vec<&str> = args.vars.iter().map(|v| v.name.as_str()).collect();
                write!(f, "{gen}({})", names.join(", "))
            }
            Rhs::Effect { gen, arg } => write!(f, "{gen} -< {arg}"),
        }
    }
}

/// Layout form: one statement per line, indented under `do`.
impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(name) = &self.name {
            write!(f, "{name} = ")?;
        }
        writeln!(f, "proc {} -> do", self.params)?;
        for stmt in &self.stmts {
            writeln!(f, "  {stmt}")?;
        }
        writeln!(f, "  return {}", self.result)
    }
}
