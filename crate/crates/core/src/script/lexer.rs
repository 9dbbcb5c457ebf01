//! Indentation-aware tokenizer.

use super::token::{Token, TokenKind, KEYWORDS, WORD_OPS};
use super::ScriptError;

const OPS3: &[&str] = &["**=", "//=", ">>=", "<<=", "..."];
const OPS2: &[&str] = &[
    "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=", "%=", "**", "//", "->", ":=", "<<", ">>",
    "&=", "|=", "^=", "@=",
];
const OPS1: &str = "+-*/%<>=()[]{},:.;@&|^~!";

pub fn tokenize(source: &str) -> Result<Vec<Token>, ScriptError> {
    Lexer::new(source).run()
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
    tokens: Vec<Token>,
    indents: Vec<String>,
    depth: usize,
    at_line_start: bool,
    line_has_tokens: bool,
}

impl Lexer {
    fn new(source: &str) -> Self {
        Lexer {
            chars: source.chars().collect(),
            pos: 0,
            line: 1,
            col: 1,
            tokens: Vec::new(),
            indents: vec![String::new()],
            depth: 0,
            at_line_start: true,
            line_has_tokens: false,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.chars.get(self.pos + n).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn error(line: usize, col: usize, reason: impl Into<String>) -> ScriptError {
        ScriptError::Lex {
            line,
            col,
            reason: reason.into(),
        }
    }

    fn push(&mut self, kind: TokenKind, text: String, line: usize, col: usize) {
        self.tokens.push(Token { kind, text, line, col });
        self.line_has_tokens = true;
    }

    fn push_layout(&mut self, kind: TokenKind) {
        self.tokens.push(Token {
            kind,
            text: String::new(),
            line: self.line,
            col: self.col,
        });
    }

    fn run(mut self) -> Result<Vec<Token>, ScriptError> {
        loop {
            if self.at_line_start && self.depth == 0 {
                self.indentation()?;
            }
            while matches!(self.peek(), Some(' ' | '\t' | '\r' | '\x0c')) {
                self.bump();
            }
            let Some(c) = self.peek() else { break };
            let (line, col) = (self.line, self.col);
            match c {
                '#' => {
                    while !matches!(self.peek(), None | Some('\n')) {
                        self.bump();
                    }
                }
                '\n' => {
                    self.bump();
                    if self.depth == 0 {
                        if self.line_has_tokens {
                            self.tokens.push(Token {
                                kind: TokenKind::Newline,
                                text: "\n".into(),
                                line,
                                col,
                            });
                        }
                        self.line_has_tokens = false;
                        self.at_line_start = true;
                    }
                }
                '\\' => {
                    self.bump();
                    if self.peek() == Some('\r') && self.peek_at(1) == Some('\n') {
                        self.bump();
                    }
                    if self.peek() != Some('\n') {
                        return Err(Self::error(line, col, "unexpected character `\\`"));
                    }
                    self.bump();
                }
                '"' | '\'' => self.string(line, col, false)?,
                c if c.is_ascii_alphabetic() || c == '_' => self.name(line, col)?,
                c if c.is_ascii_digit() => self.number(line, col)?,
                _ => self.operator(line, col)?,
            }
        }
        let (line, col) = (self.line, self.col);
        if self.line_has_tokens {
            self.tokens.push(Token {
                kind: TokenKind::Newline,
                text: String::new(),
                line,
                col,
            });
        }
        for _ in 1..self.indents.len() {
            self.push_layout(TokenKind::Dedent);
        }
        self.push_layout(TokenKind::Eof);
        Ok(self.tokens)
    }

    fn indentation(&mut self) -> Result<(), ScriptError> {
        self.at_line_start = false;
        let line = self.line;
        let mut indent = String::new();
        while let Some(c @ (' ' | '\t' | '\x0c')) = self.peek() {
            indent.push(c);
            self.bump();
        }
        let blank = match self.peek() {
            None | Some('\n' | '#') => true,
            Some('\r') => matches!(self.peek_at(1), None | Some('\n')),
            _ => false,
        };
        if blank {
            return Ok(());
        }
        let indent: String = indent.chars().filter(|&c| c != '\x0c').collect();
        if indent.contains(' ') && indent.contains('\t') {
            let first = indent.chars().next().unwrap_or(' ');
            let at = indent.chars().position(|c| c != first).unwrap_or(0);
            return Err(Self::error(line, at + 1, "tabs mixed with spaces in indentation"));
        }
        let top = self.indents.last().cloned().unwrap_or_default();
        if indent == top {
            return Ok(());
        }
        if indent.len() > top.len() && indent.starts_with(&top) {
            self.indents.push(indent);
            self.push_layout(TokenKind::Indent);
            return Ok(());
        }
        while self.indents.len() > 1 {
            let top = self.indents.last().expect("non-empty");
            if *top == indent || !top.starts_with(&indent) {
                break;
            }
            self.indents.pop();
            self.push_layout(TokenKind::Dedent);
        }
        if self.indents.last().map(String::as_str) != Some(indent.as_str()) {
            return Err(Self::error(
                line,
                self.col,
                "unindent does not match any outer indentation level",
            ));
        }
        Ok(())
    }

    fn name(&mut self, line: usize, col: usize) -> Result<(), ScriptError> {
        let mut text = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                text.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if matches!(self.peek(), Some('"' | '\'')) {
            match text.as_str() {
                "f" | "F" => return self.string(line, col, true),
                "u" | "U" => return self.string(line, col, false),
                "r" | "R" | "b" | "B" | "rb" | "br" | "Rb" | "bR" | "RB" | "BR" | "rB" | "Br"
                | "fr" | "rf" | "Fr" | "fR" | "FR" | "RF" | "rF" | "Rf" => {
                    return Err(Self::error(line, col, format!("unsupported string prefix `{text}`")))
                }
                _ => {}
            }
        }
        let kind = if WORD_OPS.contains(&text.as_str()) {
            TokenKind::Op
        } else if KEYWORDS.contains(&text.as_str()) {
            TokenKind::Keyword
        } else {
            TokenKind::Ident
        };
        self.push(kind, text, line, col);
        Ok(())
    }

    fn number(&mut self, line: usize, col: usize) -> Result<(), ScriptError> {
        let mut text = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                text.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if let Some(c) = self.peek() {
            if c == '.' || c == '_' || c.is_ascii_alphanumeric() {
                return Err(Self::error(line, col, "unsupported numeric literal"));
            }
        }
        let value: i64 = text
            .parse()
            .map_err(|_| Self::error(line, col, "integer literal too large"))?;
        self.push(TokenKind::Int(value), text, line, col);
        Ok(())
    }

    fn string(&mut self, line: usize, col: usize, fstring: bool) -> Result<(), ScriptError> {
        let start = self.pos;
        let quote = self.bump().expect("caller saw a quote");
        if self.peek() == Some(quote) && self.peek_at(1) == Some(quote) {
            return Err(Self::error(line, col, "triple-quoted strings are not supported"));
        }
        let mut body = String::new();
        loop {
            match self.peek() {
                None | Some('\n') => {
                    return Err(Self::error(line, col, "unterminated string literal"));
                }
                Some('\\') => {
                    self.bump();
                    match self.peek() {
                        None | Some('\n') => {
                            return Err(Self::error(line, col, "unterminated string literal"))
                        }
                        Some(e) => {
                            self.bump();
                            if fstring {
                                body.push('\\');
                                body.push(e);
                            } else {
                                push_escape(&mut body, e);
                            }
                        }
                    }
                }
                Some(c) if c == quote => {
                    self.bump();
                    break;
                }
                Some(c) => {
                    body.push(c);
                    self.bump();
                }
            }
        }
        // lexeme starts at the prefix, which sits `col - 1` columns before the quote
        let prefix = if fstring { self.chars[start - 1].to_string() } else { String::new() };
        let text: String = prefix + &self.chars[start..self.pos].iter().collect::<String>();
        let kind = if fstring {
            TokenKind::FString(body)
        } else {
            TokenKind::Str(body)
        };
        self.push(kind, text, line, col);
        Ok(())
    }

    fn operator(&mut self, line: usize, col: usize) -> Result<(), ScriptError> {
        let rest: String = self.chars[self.pos..].iter().take(3).collect();
        let op = OPS3
            .iter()
            .chain(OPS2)
            .find(|op| rest.starts_with(**op))
            .map(|s| s.to_string())
            .or_else(|| {
                let c = self.peek()?;
                OPS1.contains(c).then(|| c.to_string())
            });
        let Some(op) = op else {
            let c = self.peek().unwrap_or(' ');
            return Err(Self::error(line, col, format!("unexpected character `{}`", c.escape_debug())));
        };
        for _ in 0..op.chars().count() {
            self.bump();
        }
        match op.as_str() {
            "(" | "[" | "{" => self.depth += 1,
            ")" | "]" | "}" => self.depth = self.depth.saturating_sub(1),
            _ => {}
        }
        self.push(TokenKind::Op, op, line, col);
        Ok(())
    }
}

/// Decodes one escape character following a backslash. Unknown escapes keep
/// the backslash.
pub(crate) fn push_escape(out: &mut String, e: char) {
    match e {
        'n' => out.push('\n'),
        't' => out.push('\t'),
        'r' => out.push('\r'),
        '\\' => out.push('\\'),
        '"' => out.push('"'),
        '\'' => out.push('\''),
        other => {
            out.push('\\');
            out.push(other);
        }
    }
}

/// Decodes escapes in a raw f-string literal segment.
pub(crate) fn decode_escapes(raw: &str) -> String {
    let mut out = String::new();
    let mut chars = raw.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next() {
                Some(e) => push_escape(&mut out, e),
                None => out.push('\\'),
            }
        } else {
            out.push(c);
        }
    }
    out
}
