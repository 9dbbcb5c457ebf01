//! Recursive-descent parser.
//!
//! Precedence, loosest first: `or`, `and`, `not`, comparisons (`==`, `<`,
//! `in`, `is None`, ...), `+ -`, `* /`, unary `-`, then calls, indexing and
//! method calls.

use super::ast::{
    push_fstring_part, AssignOp, BinOp, Expr, FStringPart, IfArm, Import, Program, Stmt, StmtKind,
    UnaryOp,
};
use super::lexer::{decode_escapes, tokenize};
use super::token::{Token, TokenKind};
use super::ScriptError;

/// Bound on syntactic nesting, which also bounds the depth of every tree the
/// parser can return.
pub const MAX_NESTING: usize = 100;

const UNSUPPORTED_KEYWORDS: &[&str] = &[
    "def", "class", "try", "with", "return", "yield", "lambda", "global", "nonlocal", "del",
    "assert", "raise", "async", "await", "except", "finally",
];

const UNSUPPORTED_BINARY: &[&str] = &["%", "//", "**", "@", "<<", ">>", "&", "|", "^"];

const UNSUPPORTED_AUGMENTED: &[&str] = &[
    "-=", "*=", "/=", "%=", "//=", "**=", ">>=", "<<=", "&=", "|=", "^=", "@=",
];

pub fn parse(tokens: &[Token]) -> Result<Program, ScriptError> {
    if tokens.last().map(|t| &t.kind) != Some(&TokenKind::Eof) {
        let (line, col) = tokens.last().map(|t| (t.line, t.col)).unwrap_or((1, 1));
        let mut owned = tokens.to_vec();
        owned.push(Token {
            kind: TokenKind::Eof,
            text: String::new(),
            line,
            col,
        });
        return parse(&owned);
    }
    let mut p = Parser::new(tokens, 0);
    let mut statements = Vec::new();
    loop {
        let t = p.peek();
        match t.kind {
            TokenKind::Eof => break,
            TokenKind::Newline => {
                p.advance();
            }
            TokenKind::Indent => return Err(p.syntax_at(t, "statement (unexpected indent)")),
            TokenKind::Dedent => return Err(p.syntax_at(t, "statement (unexpected dedent)")),
            _ => statements.push(p.statement()?),
        }
    }
    Ok(Program { statements })
}

/// Tokenizes and parses `source`.
pub fn parse_source(source: &str) -> Result<Program, ScriptError> {
    parse(&tokenize(source)?)
}

/// Operates on a non-empty, EOF-terminated token slice.
struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    depth: usize,
    loops: usize,
}

impl<'t> Parser<'t> {
    fn new(tokens: &'t [Token], depth: usize) -> Self {
        Parser {
            tokens,
            pos: 0,
            depth,
            loops: 0,
        }
    }

    fn peek(&self) -> &'t Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn peek_at(&self, n: usize) -> Option<&'t Token> {
        self.tokens.get(self.pos + n)
    }

    fn advance(&mut self) -> &'t Token {
        let t = self.peek();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax_at(&self, t: &Token, expected: &str) -> ScriptError {
        let found = match t.kind {
            TokenKind::Eof => "end of input".to_owned(),
            TokenKind::Newline => "end of line".to_owned(),
            _ => format!("`{}`", t.text),
        };
        ScriptError::Syntax {
            line: t.line,
            col: t.col,
            expected: format!("{expected}, found {found}"),
        }
    }

    fn syntax(&self, expected: &str) -> ScriptError {
        self.syntax_at(self.peek(), expected)
    }

    fn unsupported(&self, construct: impl Into<String>, t: &Token) -> ScriptError {
        ScriptError::Unsupported {
            construct: construct.into(),
            line: t.line,
        }
    }

    fn enter(&mut self) -> Result<(), ScriptError> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return Err(self.syntax("shallower nesting"));
        }
        Ok(())
    }

    fn leave(&mut self, n: usize) {
        self.depth -= n;
    }

    fn is_op(&self, op: &str) -> bool {
        self.peek().is_op(op)
    }

    fn is_keyword(&self, kw: &str) -> bool {
        self.peek().is_keyword(kw)
    }

    fn expect_op(&mut self, op: &str) -> Result<&'t Token, ScriptError> {
        if self.is_op(op) {
            Ok(self.advance())
        } else {
            Err(self.syntax(&format!("`{op}`")))
        }
    }

    fn expect_ident(&mut self) -> Result<String, ScriptError> {
        if self.peek().kind == TokenKind::Ident {
            Ok(self.advance().text.clone())
        } else {
            Err(self.syntax("identifier"))
        }
    }

    // statements

    fn statement(&mut self) -> Result<Stmt, ScriptError> {
        let t = self.peek();
        if t.kind == TokenKind::Keyword {
            match t.text.as_str() {
                "if" => return self.if_stmt(),
                "while" => return self.while_stmt(),
                "for" => return self.for_stmt(),
                _ => {}
            }
        }
        self.simple_statement()
    }

    fn simple_statement(&mut self) -> Result<Stmt, ScriptError> {
        let t = self.peek();
        let line = t.line;
        let kind = match (&t.kind, t.text.as_str()) {
            (TokenKind::Keyword, kw @ ("break" | "continue")) => {
                if self.loops == 0 {
                    return Err(self.syntax_at(t, &format!("`{kw}` only inside a loop")));
                }
                self.advance();
                if kw == "break" {
                    StmtKind::Break
                } else {
                    StmtKind::Continue
                }
            }
            (TokenKind::Keyword, "pass") => {
                self.advance();
                StmtKind::Pass
            }
            (TokenKind::Keyword, "import" | "from") => StmtKind::Import(self.import()?),
            (TokenKind::Keyword, kw) if UNSUPPORTED_KEYWORDS.contains(&kw) => {
                return Err(self.unsupported(kw, t))
            }
            (TokenKind::Keyword, "if" | "while" | "for" | "elif" | "else") => {
                return Err(self.syntax_at(t, "simple statement"))
            }
            (TokenKind::Op, "@") => return Err(self.unsupported("decorator", t)),
            (TokenKind::Indent, _) => return Err(self.syntax_at(t, "statement (unexpected indent)")),
            _ => self.expr_or_assign()?,
        };
        self.end_of_statement()?;
        Ok(Stmt::at(kind, line))
    }

    fn end_of_statement(&mut self) -> Result<(), ScriptError> {
        let t = self.peek();
        match t.kind {
            TokenKind::Newline => {
                self.advance();
                Ok(())
            }
            TokenKind::Eof => Ok(()),
            TokenKind::Op if t.text == ";" => Err(self.unsupported("semicolon", t)),
            _ => Err(self.syntax_at(t, "end of statement")),
        }
    }

    fn expr_or_assign(&mut self) -> Result<StmtKind, ScriptError> {
        let start = self.peek();
        let expr = self.expr()?;
        let t = self.peek();
        if t.kind != TokenKind::Op {
            return Ok(StmtKind::Expr(expr));
        }
        let op = match t.text.as_str() {
            "=" => AssignOp::Set,
            "+=" => AssignOp::Add,
            "," => return Err(self.unsupported("tuple", t)),
            ":" => return Err(self.unsupported("variable annotation", t)),
            ":=" => return Err(self.unsupported("assignment expression", t)),
            o if UNSUPPORTED_AUGMENTED.contains(&o) => {
                return Err(self.unsupported(format!("`{o}` assignment"), t))
            }
            _ => return Ok(StmtKind::Expr(expr)),
        };
        let target = match expr {
            Expr::Name(n) => n,
            Expr::Index { .. } => return Err(self.unsupported("subscript assignment", start)),
            Expr::Call { .. } | Expr::MethodCall { .. } => {
                return Err(self.syntax_at(start, "assignment target"))
            }
            _ => return Err(self.syntax_at(start, "assignment target")),
        };
        self.advance();
        let value = self.expr()?;
        let t = self.peek();
        if t.is_op("=") {
            return Err(self.unsupported("chained assignment", t));
        }
        if t.is_op(",") {
            return Err(self.unsupported("tuple", t));
        }
        Ok(StmtKind::Assign { target, op, value })
    }

    fn dotted(&mut self) -> Result<String, ScriptError> {
        let mut path = String::new();
        while self.is_op(".") || self.is_op("...") {
            path.push_str(&self.advance().text);
        }
        if !path.is_empty() && self.is_keyword("import") {
            return Ok(path);
        }
        path.push_str(&self.expect_ident()?);
        while self.is_op(".") {
            self.advance();
            path.push('.');
            path.push_str(&self.expect_ident()?);
        }
        Ok(path)
    }

    fn skip_alias(&mut self) -> Result<(), ScriptError> {
        if self.is_keyword("as") {
            self.advance();
            self.expect_ident()?;
        }
        Ok(())
    }

    fn import(&mut self) -> Result<Import, ScriptError> {
        if self.advance().text == "import" {
            let mut names = vec![self.dotted()?];
            self.skip_alias()?;
            while self.is_op(",") {
                self.advance();
                names.push(self.dotted()?);
                self.skip_alias()?;
            }
            return Ok(Import { from: None, names });
        }
        let from = self.dotted()?;
        if !self.is_keyword("import") {
            return Err(self.syntax("`import`"));
        }
        self.advance();
        if self.is_op("*") {
            self.advance();
            return Ok(Import {
                from: Some(from),
                names: vec!["*".into()],
            });
        }
        let paren = self.is_op("(");
        if paren {
            self.advance();
        }
        let mut names = vec![self.expect_ident()?];
        self.skip_alias()?;
        while self.is_op(",") {
            self.advance();
            if paren && self.is_op(")") {
                break;
            }
            names.push(self.expect_ident()?);
            self.skip_alias()?;
        }
        if paren {
            self.expect_op(")")?;
        }
        Ok(Import {
            from: Some(from),
            names,
        })
    }

    fn block(&mut self) -> Result<Vec<Stmt>, ScriptError> {
        self.expect_op(":")?;
        self.enter()?;
        let body = if self.peek().kind == TokenKind::Newline {
            self.advance();
            if self.peek().kind != TokenKind::Indent {
                return Err(self.syntax("indented block"));
            }
            self.advance();
            let mut body = Vec::new();
            loop {
                match self.peek().kind {
                    TokenKind::Dedent => {
                        self.advance();
                        break;
                    }
                    TokenKind::Eof => break,
                    TokenKind::Newline => {
                        self.advance();
                    }
                    _ => body.push(self.statement()?),
                }
            }
            body
        } else {
            vec![self.simple_statement()?]
        };
        self.leave(1);
        Ok(body)
    }

    fn if_stmt(&mut self) -> Result<Stmt, ScriptError> {
        let line = self.advance().line;
        let cond = self.expr()?;
        let body = self.block()?;
        let mut arms = vec![IfArm { cond, body }];
        let mut else_body = None;
        loop {
            if self.is_keyword("elif") {
                self.advance();
                let cond = self.expr()?;
                let body = self.block()?;
                arms.push(IfArm { cond, body });
            } else if self.is_keyword("else") {
                self.advance();
                else_body = Some(self.block()?);
                break;
            } else {
                break;
            }
        }
        Ok(Stmt::at(StmtKind::If { arms, else_body }, line))
    }

    fn loop_body(&mut self) -> Result<Vec<Stmt>, ScriptError> {
        self.loops += 1;
        let body = self.block();
        self.loops -= 1;
        body
    }

    fn loop_else_check(&self) -> Result<(), ScriptError> {
        if self.is_keyword("else") {
            return Err(self.unsupported("loop else clause", self.peek()));
        }
        Ok(())
    }

    fn while_stmt(&mut self) -> Result<Stmt, ScriptError> {
        let line = self.advance().line;
        let cond = self.expr()?;
        let body = self.loop_body()?;
        self.loop_else_check()?;
        Ok(Stmt::at(StmtKind::While { cond, body }, line))
    }

    fn for_stmt(&mut self) -> Result<Stmt, ScriptError> {
        let line = self.advance().line;
        let var = self.expect_ident()?;
        if self.is_op(",") {
            return Err(self.unsupported("tuple unpacking", self.peek()));
        }
        if !self.is_op("in") {
            return Err(self.syntax("`in`"));
        }
        self.advance();
        let iterable = self.expr()?;
        let body = self.loop_body()?;
        self.loop_else_check()?;
        Ok(Stmt::at(StmtKind::For { var, iterable, body }, line))
    }

    // expressions

    fn expr(&mut self) -> Result<Expr, ScriptError> {
        self.enter()?;
        let e = self.or_expr()?;
        if self.is_keyword("if") {
            return Err(self.unsupported("conditional expression", self.peek()));
        }
        self.leave(1);
        Ok(e)
    }

    fn or_expr(&mut self) -> Result<Expr, ScriptError> {
        let mut lhs = self.and_expr()?;
        let mut chain = 0;
        while self.is_keyword("or") {
            self.advance();
            self.enter()?;
            chain += 1;
            let rhs = self.and_expr()?;
            lhs = Expr::binary(BinOp::Or, lhs, rhs);
        }
        self.leave(chain);
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<Expr, ScriptError> {
        let mut lhs = self.not_expr()?;
        let mut chain = 0;
        while self.is_keyword("and") {
            self.advance();
            self.enter()?;
            chain += 1;
            let rhs = self.not_expr()?;
            lhs = Expr::binary(BinOp::And, lhs, rhs);
        }
        self.leave(chain);
        Ok(lhs)
    }

    fn not_expr(&mut self) -> Result<Expr, ScriptError> {
        if self.is_keyword("not") {
            self.advance();
            self.enter()?;
            let operand = self.not_expr()?;
            self.leave(1);
            return Ok(Expr::unary(UnaryOp::Not, operand));
        }
        self.comparison()
    }

    fn comparison_op(&self) -> Option<(&'static str, usize)> {
        let t = self.peek();
        if t.kind == TokenKind::Keyword && t.text == "not" {
            return self.peek_at(1).filter(|n| n.is_op("in")).map(|_| ("not in", 2));
        }
        if t.kind != TokenKind::Op {
            return None;
        }
        let op = match t.text.as_str() {
            "==" => "==",
            "!=" => "!=",
            "<" => "<",
            "<=" => "<=",
            ">" => ">",
            ">=" => ">=",
            "in" => "in",
            "is" => "is",
            _ => return None,
        };
        Some((op, 1))
    }

    fn comparison(&mut self) -> Result<Expr, ScriptError> {
        let lhs = self.additive()?;
        let Some((op, width)) = self.comparison_op() else {
            return Ok(lhs);
        };
        let op_tok = self.peek();
        for _ in 0..width {
            self.advance();
        }
        self.enter()?;
        let result = if op == "is" {
            let negated = self.is_keyword("not");
            if negated {
                self.advance();
            }
            if !self.is_keyword("None") {
                return Err(self.unsupported("identity comparison", op_tok));
            }
            self.advance();
            let op = if negated { BinOp::IsNotNone } else { BinOp::IsNone };
            Expr::binary(op, lhs, Expr::Null)
        } else {
            let rhs = self.additive()?;
            match op {
                "not in" => Expr::unary(UnaryOp::Not, Expr::binary(BinOp::In, lhs, rhs)),
                _ => {
                    let bop = match op {
                        "==" => BinOp::Eq,
                        "!=" => BinOp::Ne,
                        "<" => BinOp::Lt,
                        "<=" => BinOp::Le,
                        ">" => BinOp::Gt,
                        ">=" => BinOp::Ge,
                        _ => BinOp::In,
                    };
                    Expr::binary(bop, lhs, rhs)
                }
            }
        };
        self.leave(1);
        if self.comparison_op().is_some() {
            return Err(self.unsupported("chained comparison", self.peek()));
        }
        Ok(result)
    }

    fn additive(&mut self) -> Result<Expr, ScriptError> {
        let mut lhs = self.multiplicative()?;
        let mut chain = 0;
        loop {
            let op = if self.is_op("+") {
                BinOp::Add
            } else if self.is_op("-") {
                BinOp::Sub
            } else {
                break;
            };
            self.advance();
            self.enter()?;
            chain += 1;
            let rhs = self.multiplicative()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        self.leave(chain);
        Ok(lhs)
    }

    fn check_unsupported_binary(&self) -> Result<(), ScriptError> {
        let t = self.peek();
        if t.kind == TokenKind::Op && UNSUPPORTED_BINARY.contains(&t.text.as_str()) {
            return Err(self.unsupported(format!("`{}` operator", t.text), t));
        }
        Ok(())
    }

    fn multiplicative(&mut self) -> Result<Expr, ScriptError> {
        let mut lhs = self.unary()?;
        let mut chain = 0;
        loop {
            self.check_unsupported_binary()?;
            let op = if self.is_op("*") {
                BinOp::Mul
            } else if self.is_op("/") {
                BinOp::Div
            } else {
                break;
            };
            self.advance();
            self.enter()?;
            chain += 1;
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        self.leave(chain);
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ScriptError> {
        let t = self.peek();
        if t.is_op("-") {
            self.advance();
            self.enter()?;
            let operand = self.unary()?;
            self.leave(1);
            return Ok(Expr::unary(UnaryOp::Neg, operand));
        }
        if t.is_op("+") || t.is_op("~") {
            return Err(self.unsupported(format!("unary `{}`", t.text), t));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Expr, ScriptError> {
        let mut e = self.primary()?;
        let mut chain = 0;
        loop {
            let t = self.peek();
            if t.is_op("(") {
                let Expr::Name(callee) = e else {
                    return Err(self.unsupported("call of a non-name expression", t));
                };
                self.advance();
                let args = self.call_args()?;
                e = Expr::Call { callee, args };
            } else if t.is_op("[") {
                self.advance();
                let index = self.expr()?;
                if self.is_op(":") {
                    return Err(self.unsupported("slice", self.peek()));
                }
                if self.is_op(",") {
                    return Err(self.unsupported("tuple index", self.peek()));
                }
                self.expect_op("]")?;
                e = Expr::Index {
                    receiver: Box::new(e),
                    index: Box::new(index),
                };
            } else if t.is_op(".") {
                self.advance();
                let method = self.expect_ident()?;
                if !self.is_op("(") {
                    return Err(self.unsupported("attribute access", t));
                }
                self.advance();
                let args = self.call_args()?;
                e = Expr::MethodCall {
                    receiver: Box::new(e),
                    method,
                    args,
                };
            } else {
                break;
            }
            self.enter()?;
            chain += 1;
        }
        self.leave(chain);
        Ok(e)
    }

    /// Arguments after an opening parenthesis, through the closing one.
    fn call_args(&mut self) -> Result<Vec<Expr>, ScriptError> {
        let mut args = Vec::new();
        loop {
            if self.is_op(")") {
                self.advance();
                return Ok(args);
            }
            let t = self.peek();
            if t.is_op("*") {
                return Err(self.unsupported("*args", t));
            }
            if t.is_op("**") {
                return Err(self.unsupported("**kwargs", t));
            }
            if t.kind == TokenKind::Ident && self.peek_at(1).is_some_and(|n| n.is_op("=")) {
                return Err(self.unsupported("keyword argument", t));
            }
            args.push(self.expr()?);
            if self.is_keyword("for") {
                return Err(self.unsupported("generator expression", self.peek()));
            }
            if self.is_op(",") {
                self.advance();
            } else if !self.is_op(")") {
                return Err(self.syntax("`,` or `)`"));
            }
        }
    }

    fn primary(&mut self) -> Result<Expr, ScriptError> {
        let t = self.peek();
        match &t.kind {
            TokenKind::Int(i) => {
                self.advance();
                Ok(Expr::Int(*i))
            }
            TokenKind::Str(_) | TokenKind::FString(_) => self.strings(),
            TokenKind::Ident => {
                self.advance();
                Ok(Expr::Name(t.text.clone()))
            }
            TokenKind::Keyword => match t.text.as_str() {
                "True" => {
                    self.advance();
                    Ok(Expr::Bool(true))
                }
                "False" => {
                    self.advance();
                    Ok(Expr::Bool(false))
                }
                "None" => {
                    self.advance();
                    Ok(Expr::Null)
                }
                kw if UNSUPPORTED_KEYWORDS.contains(&kw) => Err(self.unsupported(kw, t)),
                _ => Err(self.syntax_at(t, "expression")),
            },
            TokenKind::Op => match t.text.as_str() {
                "(" => {
                    self.advance();
                    if self.is_op(")") {
                        return Err(self.unsupported("tuple", t));
                    }
                    let e = self.expr()?;
                    if self.is_op(",") {
                        return Err(self.unsupported("tuple", self.peek()));
                    }
                    if self.is_keyword("for") {
                        return Err(self.unsupported("generator expression", self.peek()));
                    }
                    self.expect_op(")")?;
                    Ok(e)
                }
                "[" => {
                    self.advance();
                    let mut items = Vec::new();
                    loop {
                        if self.is_op("]") {
                            self.advance();
                            break;
                        }
                        if self.is_op("*") {
                            return Err(self.unsupported("starred expression", self.peek()));
                        }
                        items.push(self.expr()?);
                        if self.is_keyword("for") {
                            return Err(self.unsupported("comprehension", self.peek()));
                        }
                        if self.is_op(",") {
                            self.advance();
                        } else if !self.is_op("]") {
                            return Err(self.syntax("`,` or `]`"));
                        }
                    }
                    Ok(Expr::List(items))
                }
                "{" => Err(self.unsupported("dict or set literal", t)),
                "*" => Err(self.unsupported("starred expression", t)),
                _ => Err(self.syntax_at(t, "expression")),
            },
            _ => Err(self.syntax_at(t, "expression")),
        }
    }

    /// One or more adjacent string literals, concatenated.
    fn strings(&mut self) -> Result<Expr, ScriptError> {
        let mut parts = Vec::new();
        let mut any_f = false;
        loop {
            let t = self.peek();
            match &t.kind {
                TokenKind::Str(s) => push_fstring_part(&mut parts, FStringPart::Literal(s.clone())),
                TokenKind::FString(raw) => {
                    any_f = true;
                    for part in self.fstring(raw, t)? {
                        push_fstring_part(&mut parts, part);
                    }
                }
                _ => break,
            }
            self.advance();
        }
        if any_f {
            return Ok(Expr::FString(parts));
        }
        Ok(Expr::Str(match parts.pop() {
            Some(FStringPart::Literal(s)) => s,
            _ => String::new(),
        }))
    }

    fn fstring(&self, raw: &str, tok: &Token) -> Result<Vec<FStringPart>, ScriptError> {
        let chars: Vec<char> = raw.chars().collect();
        let mut parts = Vec::new();
        let mut lit = String::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            match c {
                '\\' => {
                    lit.push(c);
                    if let Some(&n) = chars.get(i + 1) {
                        lit.push(n);
                    }
                    i += 2;
                }
                '{' if chars.get(i + 1) == Some(&'{') => {
                    lit.push('{');
                    i += 2;
                }
                '}' if chars.get(i + 1) == Some(&'}') => {
                    lit.push('}');
                    i += 2;
                }
                '}' => {
                    return Err(ScriptError::Syntax {
                        line: tok.line,
                        col: tok.col,
                        expected: "`}}` for a literal brace in f-string".into(),
                    })
                }
                '{' => {
                    push_fstring_part(&mut parts, FStringPart::Literal(decode_escapes(&lit)));
                    lit.clear();
                    let end = field_end(&chars, i + 1).ok_or_else(|| ScriptError::Syntax {
                        line: tok.line,
                        col: tok.col,
                        expected: "`}` closing f-string field".into(),
                    })?;
                    let field: String = chars[i + 1..end].iter().collect();
                    let expr = self.fstring_field(&field, tok)?;
                    parts.push(FStringPart::Expr(expr));
                    i = end + 1;
                }
                _ => {
                    lit.push(c);
                    i += 1;
                }
            }
        }
        push_fstring_part(&mut parts, FStringPart::Literal(decode_escapes(&lit)));
        Ok(parts)
    }

    fn fstring_field(&self, field: &str, tok: &Token) -> Result<Expr, ScriptError> {
        let relocate = |e: ScriptError| match e {
            ScriptError::Lex { reason, .. } => ScriptError::Lex {
                line: tok.line,
                col: tok.col,
                reason: format!("in f-string field: {reason}"),
            },
            ScriptError::Syntax { expected, .. } => ScriptError::Syntax {
                line: tok.line,
                col: tok.col,
                expected: format!("{expected} (in f-string field)"),
            },
            ScriptError::Unsupported { construct, .. } => ScriptError::Unsupported {
                construct,
                line: tok.line,
            },
        };
        let unsupported = |c: &str| ScriptError::Unsupported {
            construct: c.into(),
            line: tok.line,
        };
        match top_level_marker(field) {
            Some('!') => return Err(unsupported("f-string conversion")),
            Some(':') => return Err(unsupported("f-string format spec")),
            _ => {}
        }
        let field = field.trim();
        if field.is_empty() {
            return Err(ScriptError::Syntax {
                line: tok.line,
                col: tok.col,
                expected: "expression in f-string field".into(),
            });
        }
        let tokens = tokenize(field).map_err(relocate)?;
        if tokens.iter().any(|t| matches!(t.kind, TokenKind::FString(_))) {
            return Err(unsupported("nested f-string"));
        }
        let mut sub = Parser::new(&tokens, self.depth + 1);
        let e = sub.expr().map_err(relocate)?;
        if sub.peek().kind == TokenKind::Newline {
            sub.advance();
        }
        if sub.peek().kind != TokenKind::Eof {
            return Err(relocate(sub.syntax("`}` closing f-string field")));
        }
        Ok(e)
    }
}

/// Index of the `}` closing a replacement field that starts at `start`.
fn field_end(chars: &[char], start: usize) -> Option<usize> {
    let mut depth = 0usize;
    let mut quote: Option<char> = None;
    let mut i = start;
    while i < chars.len() {
        let c = chars[i];
        if let Some(q) = quote {
            if c == '\\' {
                i += 1;
            } else if c == q {
                quote = None;
            }
        } else {
            match c {
                '\'' | '"' => quote = Some(c),
                '(' | '[' | '{' => depth += 1,
                ')' | ']' => depth = depth.saturating_sub(1),
                '}' if depth == 0 => return Some(i),
                '}' => depth -= 1,
                _ => {}
            }
        }
        i += 1;
    }
    None
}

/// First `!` (not part of `!=`) or `:` outside brackets and quotes.
fn top_level_marker(field: &str) -> Option<char> {
    let chars: Vec<char> = field.chars().collect();
    let mut depth = 0usize;
    let mut quote: Option<char> = None;
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if let Some(q) = quote {
            if c == '\\' {
                i += 1;
            } else if c == q {
                quote = None;
            }
        } else {
            match c {
                '\'' | '"' => quote = Some(c),
                '(' | '[' | '{' => depth += 1,
                ')' | ']' | '}' => depth = depth.saturating_sub(1),
                '!' if depth == 0 && chars.get(i + 1) != Some(&'=') => return Some('!'),
                ':' if depth == 0 => return Some(':'),
                _ => {}
            }
        }
        i += 1;
    }
    None
}
