use std::fmt;

pub(crate) const KEYWORDS: &[&str] = &[
    "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class",
    "continue", "def", "del", "elif", "else", "except", "finally", "for", "from", "global", "if",
    "import", "lambda", "nonlocal", "not", "or", "pass", "raise", "return", "try", "while",
    "with", "yield",
];

/// `in` and `is` lex as operators.
pub(crate) const WORD_OPS: &[&str] = &["in", "is"];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s) || WORD_OPS.contains(&s)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Int(i64),
    /// Decoded string contents.
    Str(String),
    /// Undecoded body of an f-string, between the quotes.
    FString(String),
    Keyword,
    Op,
    Newline,
    Indent,
    Dedent,
    Eof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// Source lexeme. Empty for NEWLINE at end of input, INDENT, DEDENT and EOF.
    pub text: String,
    pub line: usize,
    pub col: usize,
}

impl Token {
    pub fn is_op(&self, op: &str) -> bool {
        self.kind == TokenKind::Op && self.text == op
    }

    pub fn is_keyword(&self, kw: &str) -> bool {
        self.kind == TokenKind::Keyword && self.text == kw
    }

    /// Short name of the kind, as used in debug dumps.
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            TokenKind::Ident => "IDENT",
            TokenKind::Int(_) => "INT",
            TokenKind::Str(_) => "STRING",
            TokenKind::FString(_) => "FSTRING",
            TokenKind::Keyword => "KEYWORD",
            TokenKind::Op => "OP",
            TokenKind::Newline => "NEWLINE",
            TokenKind::Indent => "INDENT",
            TokenKind::Dedent => "DEDENT",
            TokenKind::Eof => "EOF",
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            TokenKind::Newline | TokenKind::Indent | TokenKind::Dedent | TokenKind::Eof => {
                f.write_str(self.kind_name())
            }
            _ => write!(f, "{}({})", self.kind_name(), self.text),
        }
    }
}
