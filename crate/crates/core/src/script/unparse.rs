//! Canonical source emission: 4-space indentation, double-quoted strings,
//! minimal parentheses.

use std::fmt::Write as _;

use super::ast::{BinOp, Expr, FStringPart, Program, Stmt, StmtKind, UnaryOp};

pub fn unparse(program: &Program) -> String {
    let mut out = String::new();
    for s in &program.statements {
        stmt(&mut out, s, 0);
    }
    if out.ends_with('\n') {
        out.pop();
    }
    out
}

pub fn unparse_expr(e: &Expr) -> String {
    let mut out = String::new();
    expr(&mut out, e, Quote::Double);
    out
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("    ");
    }
}

fn block(out: &mut String, body: &[Stmt], level: usize) {
    for s in body {
        stmt(out, s, level + 1);
    }
}

fn stmt(out: &mut String, s: &Stmt, level: usize) {
    indent(out, level);
    match &s.kind {
        StmtKind::Assign { target, op, value } => {
            let _ = write!(out, "{target} {} ", op.symbol());
            expr(out, value, Quote::Double);
            out.push('\n');
        }
        StmtKind::Expr(e) => {
            expr(out, e, Quote::Double);
            out.push('\n');
        }
        StmtKind::If { arms, else_body } => {
            for (i, arm) in arms.iter().enumerate() {
                if i > 0 {
                    indent(out, level);
                }
                out.push_str(if i == 0 { "if " } else { "elif " });
                expr(out, &arm.cond, Quote::Double);
                out.push_str(":\n");
                block(out, &arm.body, level);
            }
            if let Some(body) = else_body {
                indent(out, level);
                out.push_str("else:\n");
                block(out, body, level);
            }
        }
        StmtKind::While { cond, body } => {
            out.push_str("while ");
            expr(out, cond, Quote::Double);
            out.push_str(":\n");
            block(out, body, level);
        }
        StmtKind::For { var, iterable, body } => {
            let _ = write!(out, "for {var} in ");
            expr(out, iterable, Quote::Double);
            out.push_str(":\n");
            block(out, body, level);
        }
        StmtKind::Break => out.push_str("break\n"),
        StmtKind::Continue => out.push_str("continue\n"),
        StmtKind::Pass => out.push_str("pass\n"),
        StmtKind::Import(imp) => {
            match &imp.from {
                Some(m) => {
                    let _ = write!(out, "from {m} import {}", imp.names.join(", "));
                }
                None => {
                    let _ = write!(out, "import {}", imp.names.join(", "));
                }
            }
            out.push('\n');
        }
    }
}

/// Quoting for string literals. Inside an f-string field, literals use
/// single quotes and escape both quote characters so the enclosing
/// double-quoted f-string stays intact.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Quote {
    Double,
    InField,
}

const OR: u8 = 1;
const AND: u8 = 2;
const NOT: u8 = 3;
const CMP: u8 = 4;
const ADD: u8 = 5;
const MUL: u8 = 6;
const NEG: u8 = 7;
const POSTFIX: u8 = 8;
const ATOM: u8 = 9;

fn binop_prec(op: BinOp) -> u8 {
    match op {
        BinOp::Or => OR,
        BinOp::And => AND,
        BinOp::Add | BinOp::Sub => ADD,
        BinOp::Mul | BinOp::Div => MUL,
        _ => CMP,
    }
}

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Binary { op, .. } => binop_prec(*op),
        Expr::Unary { op: UnaryOp::Not, .. } => NOT,
        Expr::Unary { op: UnaryOp::Neg, .. } => NEG,
        Expr::Call { .. } | Expr::MethodCall { .. } | Expr::Index { .. } => POSTFIX,
        _ => ATOM,
    }
}

fn sub(out: &mut String, e: &Expr, paren: bool, q: Quote) {
    if paren {
        out.push('(');
        expr(out, e, q);
        out.push(')');
    } else {
        expr(out, e, q);
    }
}

fn args(out: &mut String, items: &[Expr], q: Quote) {
    for (i, a) in items.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        expr(out, a, q);
    }
}

fn expr(out: &mut String, e: &Expr, q: Quote) {
    match e {
        Expr::Null => out.push_str("None"),
        Expr::Bool(true) => out.push_str("True"),
        Expr::Bool(false) => out.push_str("False"),
        Expr::Int(i) => {
            let _ = write!(out, "{i}");
        }
        Expr::Str(s) => string_literal(out, s, q),
        Expr::FString(parts) => {
            out.push_str("f\"");
            for p in parts {
                match p {
                    FStringPart::Literal(s) => escape_into(out, s, true, Quote::Double),
                    FStringPart::Expr(inner) => {
                        out.push('{');
                        expr(out, inner, Quote::InField);
                        out.push('}');
                    }
                }
            }
            out.push('"');
        }
        Expr::List(items) => {
            out.push('[');
            args(out, items, q);
            out.push(']');
        }
        Expr::Name(n) => out.push_str(n),
        Expr::Call { callee, args: a } => {
            out.push_str(callee);
            out.push('(');
            args(out, a, q);
            out.push(')');
        }
        Expr::MethodCall {
            receiver,
            method,
            args: a,
        } => {
            let paren = prec(receiver) < POSTFIX || matches!(**receiver, Expr::Int(_));
            sub(out, receiver, paren, q);
            let _ = write!(out, ".{method}(");
            args(out, a, q);
            out.push(')');
        }
        Expr::Index { receiver, index } => {
            sub(out, receiver, prec(receiver) < POSTFIX, q);
            out.push('[');
            expr(out, index, q);
            out.push(']');
        }
        Expr::Unary { op: UnaryOp::Not, operand } => {
            out.push_str("not ");
            sub(out, operand, prec(operand) < NOT, q);
        }
        Expr::Unary { op: UnaryOp::Neg, operand } => {
            out.push('-');
            sub(out, operand, prec(operand) < NEG, q);
        }
        Expr::Binary { op, lhs, rhs } => {
            let p = binop_prec(*op);
            if p == CMP {
                sub(out, lhs, prec(lhs) <= CMP, q);
                match op {
                    BinOp::IsNone => out.push_str(" is None"),
                    BinOp::IsNotNone => out.push_str(" is not None"),
                    _ => {
                        let _ = write!(out, " {} ", op.symbol());
                        sub(out, rhs, prec(rhs) <= CMP, q);
                    }
                }
            } else {
                sub(out, lhs, prec(lhs) < p, q);
                let _ = write!(out, " {} ", op.symbol());
                sub(out, rhs, prec(rhs) <= p, q);
            }
        }
    }
}

fn string_literal(out: &mut String, s: &str, q: Quote) {
    let delim = if q == Quote::InField { '\'' } else { '"' };
    out.push(delim);
    escape_into(out, s, false, q);
    out.push(delim);
}

fn escape_into(out: &mut String, s: &str, braces: bool, q: Quote) {
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            '"' => out.push_str("\\\""),
            '\'' if q == Quote::InField => out.push_str("\\'"),
            '{' if braces => out.push_str("{{"),
            '}' if braces => out.push_str("}}"),
            c => out.push(c),
        }
    }
}
