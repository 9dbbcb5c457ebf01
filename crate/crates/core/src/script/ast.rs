//! Syntax tree of the script subset.
//!
//! Equality is structural: statement line numbers are carried for error
//! reporting but ignored by `==`.

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Program {
    pub statements: Vec<Stmt>,
}

#[derive(Debug, Clone, Eq)]
pub struct Stmt {
    pub kind: StmtKind,
    /// 1-based source line of the statement's first token; 0 when synthesized.
    pub line: usize,
}

impl Stmt {
    pub fn new(kind: StmtKind) -> Self {
        Stmt { kind, line: 0 }
    }

    pub fn at(kind: StmtKind, line: usize) -> Self {
        Stmt { kind, line }
    }
}

impl PartialEq for Stmt {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl From<StmtKind> for Stmt {
    fn from(kind: StmtKind) -> Self {
        Stmt::new(kind)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssignOp {
    Set,
    Add,
}

impl AssignOp {
    pub fn symbol(self) -> &'static str {
        match self {
            AssignOp::Set => "=",
            AssignOp::Add => "+=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IfArm {
    pub cond: Expr,
    pub body: Vec<Stmt>,
}

/// `import a.b, c` has `from: None`; `from a import b, c` has `from: Some("a")`.
/// Aliases are dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Import {
    pub from: Option<String>,
    pub names: Vec<String>,
}

impl Import {
    /// The module the statement tries to load.
    pub fn module(&self) -> &str {
        self.from
            .as_deref()
            .or_else(|| self.names.first().map(String::as_str))
            .unwrap_or("")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    Assign {
        target: String,
        op: AssignOp,
        value: Expr,
    },
    Expr(Expr),
    If {
        arms: Vec<IfArm>,
        else_body: Option<Vec<Stmt>>,
    },
    While {
        cond: Expr,
        body: Vec<Stmt>,
    },
    For {
        var: String,
        iterable: Expr,
        body: Vec<Stmt>,
    },
    Break,
    Continue,
    Pass,
    Import(Import),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Not,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    In,
    /// `x is None`; the right operand is always [`Expr::Null`].
    IsNone,
    /// `x is not None`; the right operand is always [`Expr::Null`].
    IsNotNone,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "and",
            BinOp::Or => "or",
            BinOp::In => "in",
            BinOp::IsNone => "is",
            BinOp::IsNotNone => "is not",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FStringPart {
    Literal(String),
    Expr(Expr),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Null,
    Bool(bool),
    Int(i64),
    Str(String),
    /// Adjacent literal parts are merged and empty literals dropped.
    FString(Vec<FStringPart>),
    List(Vec<Expr>),
    Name(String),
    Call {
        callee: String,
        args: Vec<Expr>,
    },
    MethodCall {
        receiver: Box<Expr>,
        method: String,
        args: Vec<Expr>,
    },
    Index {
        receiver: Box<Expr>,
        index: Box<Expr>,
    },
    Unary {
        op: UnaryOp,
        operand: Box<Expr>,
    },
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
}

impl Expr {
    pub fn name(s: impl Into<String>) -> Self {
        Expr::Name(s.into())
    }

    pub fn str(s: impl Into<String>) -> Self {
        Expr::Str(s.into())
    }

    pub fn call(callee: impl Into<String>, args: Vec<Expr>) -> Self {
        Expr::Call {
            callee: callee.into(),
            args,
        }
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn unary(op: UnaryOp, operand: Expr) -> Self {
        Expr::Unary {
            op,
            operand: Box::new(operand),
        }
    }
}

/// Builds a normalized f-string part list.
pub(crate) fn push_fstring_part(parts: &mut Vec<FStringPart>, part: FStringPart) {
    match part {
        FStringPart::Literal(s) if s.is_empty() => {}
        FStringPart::Literal(s) => match parts.last_mut() {
            Some(FStringPart::Literal(prev)) => prev.push_str(&s),
            _ => parts.push(FStringPart::Literal(s)),
        },
        e => parts.push(e),
    }
}
