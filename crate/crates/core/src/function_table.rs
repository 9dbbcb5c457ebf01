//! The function table: the typed API surface shown to the model and the only
//! effectful capability available to generated scripts.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::consent::Consent;
use crate::trace::{TraceEvent, TraceSink};
use crate::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseType {
    String,
    Integer,
    /// A file handle. At runtime files are passed around as integer ids.
    File,
}

impl BaseType {
    pub fn name(self) -> &'static str {
        match self {
            BaseType::String => "String",
            BaseType::Integer => "Integer",
            BaseType::File => "File",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        match s {
            "String" => Some(BaseType::String),
            "Integer" => Some(BaseType::Integer),
            "File" => Some(BaseType::File),
            _ => None,
        }
    }

    fn accepts(self, v: &Value) -> bool {
        match self {
            BaseType::String => matches!(v, Value::Str(_)),
            BaseType::Integer | BaseType::File => matches!(v, Value::Int(_)),
        }
    }
}

/// A parameter or return type as written in the API documentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TypeExpr {
    Base(BaseType),
    /// `T|null`
    Nullable(BaseType),
    /// `Collection<T>`
    Collection(BaseType),
    /// Only valid as a return type.
    Void,
}

impl TypeExpr {
    /// Shallow structural check of a runtime value against this type.
    pub fn accepts(&self, v: &Value) -> bool {
        match self {
            TypeExpr::Base(b) => b.accepts(v),
            TypeExpr::Nullable(b) => matches!(v, Value::Null) || b.accepts(v),
            TypeExpr::Collection(b) => match v {
                Value::List(items) => items.iter().all(|i| b.accepts(i)),
                _ => false,
            },
            TypeExpr::Void => matches!(v, Value::Null),
        }
    }

    /// A value of this type that a no-op handler can return.
    pub fn default_value(&self) -> Value {
        match self {
            TypeExpr::Base(BaseType::String) => Value::Str(String::new()),
            TypeExpr::Base(_) => Value::Int(0),
            TypeExpr::Nullable(_) | TypeExpr::Void => Value::Null,
            TypeExpr::Collection(_) => Value::List(Vec::new()),
        }
    }

    fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if s == "void" {
            return Some(TypeExpr::Void);
        }
        if let Some(inner) = s.strip_suffix("|null") {
            return BaseType::from_name(inner.trim()).map(TypeExpr::Nullable);
        }
        if let Some(inner) = s.strip_prefix("Collection<").and_then(|r| r.strip_suffix('>')) {
            return BaseType::from_name(inner.trim()).map(TypeExpr::Collection);
        }
        BaseType::from_name(s).map(TypeExpr::Base)
    }
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeExpr::Base(b) => f.write_str(b.name()),
            TypeExpr::Nullable(b) => write!(f, "{}|null", b.name()),
            TypeExpr::Collection(b) => write!(f, "Collection<{}>", b.name()),
            TypeExpr::Void => f.write_str("void"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub ty: TypeExpr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionSignature {
    pub name: String,
    pub params: Vec<Param>,
    pub return_type: TypeExpr,
}

impl FunctionSignature {
    pub fn new(name: impl Into<String>, params: &[(&str, TypeExpr)], return_type: TypeExpr) -> Self {
        FunctionSignature {
            name: name.into(),
            params: params
                .iter()
                .map(|(n, t)| Param {
                    name: (*n).to_owned(),
                    ty: *t,
                })
                .collect(),
            return_type,
        }
    }

    pub fn validate(&self) -> Result<(), TableError> {
        let invalid = |reason: String| TableError::InvalidSignature {
            name: self.name.clone(),
            reason,
        };
        if !is_identifier(&self.name) {
            return Err(invalid(format!("`{}` is not a valid identifier", self.name)));
        }
        for (i, p) in self.params.iter().enumerate() {
            if !is_identifier(&p.name) {
                return Err(invalid(format!("parameter `{}` is not a valid identifier", p.name)));
            }
            if p.ty == TypeExpr::Void {
                return Err(invalid(format!("parameter `{}` has type void", p.name)));
            }
            if self.params[..i].iter().any(|q| q.name == p.name) {
                return Err(invalid(format!("duplicate parameter `{}`", p.name)));
            }
        }
        Ok(())
    }

    /// Parses one documentation line of the form
    /// `function NAME(p1: T1, p2: T2): RET`. Whitespace around separators is
    /// not significant.
    pub fn parse(line: &str) -> Result<Self, SignatureParseError> {
        let err = |reason: &str| SignatureParseError {
            line: line.to_owned(),
            reason: reason.to_owned(),
        };
        let rest = line
            .trim()
            .strip_prefix("function ")
            .ok_or_else(|| err("expected `function ` prefix"))?;
        let (name, rest) = rest.split_once('(').ok_or_else(|| err("expected `(`"))?;
        let (params, rest) = rest.split_once(')').ok_or_else(|| err("expected `)`"))?;
        let ret = rest
            .trim_start()
            .strip_prefix(':')
            .ok_or_else(|| err("expected `:` before return type"))?;
        let return_type = TypeExpr::parse(ret).ok_or_else(|| err("unknown return type"))?;
        let mut parsed = Vec::new();
        if !params.trim().is_empty() {
            for p in params.split(',') {
                let (pname, pty) = p.split_once(':').ok_or_else(|| err("expected `name: type`"))?;
                let ty = TypeExpr::parse(pty).ok_or_else(|| err("unknown parameter type"))?;
                parsed.push(Param {
                    name: pname.trim().to_owned(),
                    ty,
                });
            }
        }
        let sig = FunctionSignature {
            name: name.trim().to_owned(),
            params: parsed,
            return_type,
        };
        sig.validate().map_err(|e| err(&e.to_string()))?;
        Ok(sig)
    }
}

/// Canonical documentation line.
impl fmt::Display for FunctionSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "function {}(", self.name)?;
        for (i, p) in self.params.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}: {}", p.name, p.ty)?;
        }
        write!(f, "): {}", self.return_type)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse signature `{line}`: {reason}")]
pub struct SignatureParseError {
    pub line: String,
    pub reason: String,
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !crate::script::is_keyword(s)
}

pub type Handler = Arc<dyn Fn(&[Value]) -> Value + Send + Sync>;

#[derive(Clone)]
pub struct FunctionEntry {
    pub signature: FunctionSignature,
    pub handler: Handler,
    pub privileged: bool,
    /// Documentation line shown in prompts instead of the canonical
    /// rendering of `signature`.
    pub doc_line: Option<String>,
}

impl FunctionEntry {
    pub fn new<F>(signature: FunctionSignature, handler: F) -> Self
    where
        F: Fn(&[Value]) -> Value + Send + Sync + 'static,
    {
        FunctionEntry {
            signature,
            handler: Arc::new(handler),
            privileged: false,
            doc_line: None,
        }
    }

    /// An entry whose handler does nothing and returns the default value of
    /// its return type.
    pub fn noop(signature: FunctionSignature) -> Self {
        let ret = signature.return_type.default_value();
        FunctionEntry::new(signature, move |_| ret.clone())
    }

    pub fn privileged(mut self, privileged: bool) -> Self {
        self.privileged = privileged;
        self
    }

    pub fn with_doc_line(mut self, line: impl Into<String>) -> Self {
        self.doc_line = Some(line.into());
        self
    }

    pub fn name(&self) -> &str {
        &self.signature.name
    }

    pub fn doc(&self) -> String {
        self.doc_line
            .clone()
            .unwrap_or_else(|| self.signature.to_string())
    }
}

impl fmt::Debug for FunctionEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionEntry")
            .field("signature", &self.signature.to_string())
            .field("privileged", &self.privileged)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("function `{0}` is already registered")]
    DuplicateName(String),
    #[error("invalid signature for `{name}`: {reason}")]
    InvalidSignature { name: String, reason: String },
    #[error("function table is empty")]
    EmptyTable,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvokeError {
    #[error("`{0}` is not available in the function table")]
    UnknownFunction(String),
    #[error("`{function}` takes {expected} argument(s) but {got} were given")]
    ArityMismatch {
        function: String,
        expected: usize,
        got: usize,
    },
    #[error("argument `{param}` of `{function}` expects {expected}, got {got}")]
    TypeMismatch {
        function: String,
        param: String,
        expected: String,
        got: String,
    },
    #[error("privileged function `{0}` was not approved")]
    PrivilegedDenied(String),
    #[error("handler for `{function}` returned {got}, declared {expected}")]
    BadReturn {
        function: String,
        expected: String,
        got: String,
    },
}

/// Ordered registry of callable functions. Immutable once shared.
#[derive(Debug, Clone, Default)]
pub struct FunctionTable {
    entries: Vec<FunctionEntry>,
    index: HashMap<String, usize>,
}

impl FunctionTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, entry: FunctionEntry) -> Result<(), TableError> {
        entry.signature.validate()?;
        if self.index.contains_key(entry.name()) {
            return Err(TableError::DuplicateName(entry.name().to_owned()));
        }
        self.index.insert(entry.name().to_owned(), self.entries.len());
        self.entries.push(entry);
        Ok(())
    }

    /// Builder-style [`register`](Self::register).
    pub fn with(mut self, entry: FunctionEntry) -> Result<Self, TableError> {
        self.register(entry)?;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&FunctionEntry> {
        self.index.get(name).map(|&i| &self.entries[i])
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn entries(&self) -> impl Iterator<Item = &FunctionEntry> {
        self.entries.iter()
    }

    /// Marks an existing entry privileged or not.
    pub fn set_privileged(&mut self, name: &str, privileged: bool) -> bool {
        match self.index.get(name) {
            Some(&i) => {
                self.entries[i].privileged = privileged;
                true
            }
            None => false,
        }
    }

    /// Drops an entry, keeping the order of the rest.
    pub fn remove(&mut self, name: &str) -> Option<FunctionEntry> {
        let i = self.index.remove(name)?;
        let entry = self.entries.remove(i);
        for v in self.index.values_mut() {
            if *v > i {
                *v -= 1;
            }
        }
        Some(entry)
    }

    /// API documentation block: one line per entry in registration order,
    /// LF-separated, no trailing newline.
    pub fn render_docs(&self) -> Result<String, TableError> {
        if self.entries.is_empty() {
            return Err(TableError::EmptyTable);
        }
        Ok(self
            .entries
            .iter()
            .map(FunctionEntry::doc)
            .collect::<Vec<_>>()
            .join("\n"))
    }

    /// Calls `name` with `args`. On success exactly one event reaches `sink`;
    /// on failure none does.
    pub fn invoke(
        &self,
        name: &str,
        args: Vec<Value>,
        consent: &mut dyn Consent,
        sink: &mut dyn TraceSink,
    ) -> Result<Value, InvokeError> {
        let entry = self
            .get(name)
            .ok_or_else(|| InvokeError::UnknownFunction(name.to_owned()))?;
        let sig = &entry.signature;
        if sig.params.len() != args.len() {
            return Err(InvokeError::ArityMismatch {
                function: name.to_owned(),
                expected: sig.params.len(),
                got: args.len(),
            });
        }
        for (p, a) in sig.params.iter().zip(&args) {
            if !p.ty.accepts(a) {
                return Err(InvokeError::TypeMismatch {
                    function: name.to_owned(),
                    param: p.name.clone(),
                    expected: p.ty.to_string(),
                    got: a.type_name().to_owned(),
                });
            }
        }
        if entry.privileged && !consent.approve(name) {
            return Err(InvokeError::PrivilegedDenied(name.to_owned()));
        }
        let ret = (entry.handler)(&args);
        if !sig.return_type.accepts(&ret) {
            return Err(InvokeError::BadReturn {
                function: name.to_owned(),
                expected: sig.return_type.to_string(),
                got: ret.type_name().to_owned(),
            });
        }
        sink.record(TraceEvent::new(name, args));
        Ok(ret)
    }

    /// Reads a table from documentation lines. Blank lines and `#` comments
    /// are skipped; a leading `privileged ` marks the entry privileged.
    /// Every handler is a no-op returning its type's default value.
    pub fn from_doc_lines(text: &str) -> Result<Self, TableFileError> {
        let mut table = FunctionTable::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (privileged, line) = match line.strip_prefix("privileged ") {
                Some(rest) => (true, rest.trim_start()),
                None => (false, line),
            };
            let sig = FunctionSignature::parse(line).map_err(|e| TableFileError {
                line: lineno + 1,
                reason: e.reason,
            })?;
            table
                .register(FunctionEntry::noop(sig).privileged(privileged))
                .map_err(|e| TableFileError {
                    line: lineno + 1,
                    reason: e.to_string(),
                })?;
        }
        Ok(table)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("table file line {line}: {reason}")]
pub struct TableFileError {
    pub line: usize,
    pub reason: String,
}
