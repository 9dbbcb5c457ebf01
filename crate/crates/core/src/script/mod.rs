//! The restricted scripting language generated programs are written in.
//!
//! It is an indentation-delimited imperative subset: assignments (`=`, `+=`),
//! `if`/`elif`/`else`, `while`, `for ... in`, `break`, `continue`, `pass`,
//! calls, `.append(...)`, indexing, f-strings, and `import` (which parses but
//! never executes). Everything else is rejected with
//! [`ScriptError::Unsupported`].

mod ast;
mod lexer;
mod parser;
mod token;
mod unparse;

use thiserror::Error;

pub use ast::{AssignOp, BinOp, Expr, FStringPart, IfArm, Import, Program, Stmt, StmtKind, UnaryOp};
pub use lexer::tokenize;
pub use parser::{parse, parse_source, MAX_NESTING};
pub use token::{is_keyword, Token, TokenKind};
pub use unparse::{unparse, unparse_expr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScriptError {
    #[error("lex error at {line}:{col}: {reason}")]
    Lex {
        line: usize,
        col: usize,
        reason: String,
    },
    #[error("syntax error at {line}:{col}: expected {expected}")]
    Syntax {
        line: usize,
        col: usize,
        expected: String,
    },
    #[error("unsupported construct `{construct}` on line {line}")]
    Unsupported { construct: String, line: usize },
}

impl ScriptError {
    pub fn line(&self) -> usize {
        match self {
            ScriptError::Lex { line, .. }
            | ScriptError::Syntax { line, .. }
            | ScriptError::Unsupported { line, .. } => *line,
        }
    }
}

/// Stable textual dump of a program's tree.
pub fn dump_ast(program: &Program) -> String {
    format!("{:#?}", program.statements.iter().map(|s| &s.kind).collect::<Vec<_>>())
}
