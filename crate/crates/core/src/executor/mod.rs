//! Tree-walking evaluator for parsed scripts.
//!
//! The only effects a script can have are calls into the [`FunctionTable`].
//! Everything else (names, lists, arithmetic, the builtins) is pure and
//! confined to one flat global scope. Every statement and every expression
//! evaluation costs one step against [`Limits::max_steps`].

mod builtins;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::consent::Consent;
use crate::function_table::{FunctionTable, InvokeError};
use crate::script::{AssignOp, BinOp, Expr, FStringPart, Program, Stmt, StmtKind, UnaryOp};
use crate::trace::{TraceEvent, TraceSink};
use crate::value::Value;

pub use builtins::{Builtin, Builtins};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub max_steps: u64,
    pub max_list_len: usize,
    pub max_string_len: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_steps: 10_000,
            max_list_len: 10_000,
            max_string_len: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("limit `{0}` must be positive")]
pub struct LimitsError(pub &'static str);

impl Limits {
    pub fn new(max_steps: u64, max_list_len: usize, max_string_len: usize) -> Result<Self, LimitsError> {
        let l = Limits {
            max_steps,
            max_list_len,
            max_string_len,
        };
        l.validate()?;
        Ok(l)
    }

    pub fn validate(&self) -> Result<(), LimitsError> {
        if self.max_steps == 0 {
            return Err(LimitsError("max_steps"));
        }
        if self.max_list_len == 0 {
            return Err(LimitsError("max_list_len"));
        }
        if self.max_string_len == 0 {
            return Err(LimitsError("max_string_len"));
        }
        Ok(())
    }

    pub fn with_max_steps(mut self, max_steps: u64) -> Self {
        self.max_steps = max_steps;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FailureKind {
    /// An `import`, or a call to a name that is neither in the table nor an
    /// enabled builtin.
    UnauthorizedAccess,
    /// Read of a name that was never assigned.
    ScopingViolation,
    TypeError,
    DivisionByZero,
    StepLimitExceeded,
    /// A list or string grew past its limit.
    ResourceLimitExceeded,
    PrivilegedDenied,
}

impl fmt::Display for FailureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Success,
    Failure {
        kind: FailureKind,
        message: String,
        line: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutionResult {
    pub status: Status,
    pub trace: Vec<TraceEvent>,
    pub steps_used: u64,
}

impl ExecutionResult {
    pub fn is_success(&self) -> bool {
        self.status == Status::Success
    }

    pub fn failure_kind(&self) -> Option<FailureKind> {
        match self.status {
            Status::Success => None,
            Status::Failure { kind, .. } => Some(kind),
        }
    }

    pub fn trace_lines(&self) -> Vec<&str> {
        self.trace.iter().map(|e| e.rendered.as_str()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Fault {
    pub kind: FailureKind,
    pub message: String,
}

impl Fault {
    pub(crate) fn new(kind: FailureKind, message: String) -> Self {
        Fault { kind, message }
    }
}

fn type_error(message: impl Into<String>) -> Fault {
    Fault::new(FailureKind::TypeError, message.into())
}

/// Runs programs against one function table.
#[derive(Debug, Clone)]
pub struct Executor<'a> {
    table: &'a FunctionTable,
    limits: Limits,
    builtins: Builtins,
}

impl<'a> Executor<'a> {
    pub fn new(table: &'a FunctionTable) -> Self {
        Executor {
            table,
            limits: Limits::default(),
            builtins: Builtins::default(),
        }
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub fn with_builtins(mut self, builtins: Builtins) -> Self {
        self.builtins = builtins;
        self
    }

    pub fn run(&self, program: &Program, consent: &mut dyn Consent) -> ExecutionResult {
        self.run_with_sink(program, consent, &mut crate::trace::NullSink)
    }

    /// Like [`run`](Self::run), also forwarding each event to `sink` as it
    /// happens.
    pub fn run_with_sink(
        &self,
        program: &Program,
        consent: &mut dyn Consent,
        sink: &mut dyn TraceSink,
    ) -> ExecutionResult {
        let mut m = Machine {
            exec: self,
            consent,
            sink,
            trace: Vec::new(),
            scope: HashMap::new(),
            steps: 0,
            line: 0,
        };
        let status = match m.block(&program.statements) {
            Ok(_) => Status::Success,
            Err(f) => Status::Failure {
                kind: f.kind,
                message: f.message,
                line: m.line,
            },
        };
        ExecutionResult {
            status,
            trace: m.trace,
            steps_used: m.steps,
        }
    }
}

/// Executes `program` with the default builtins.
pub fn execute(
    program: &Program,
    table: &FunctionTable,
    limits: Limits,
    consent: &mut dyn Consent,
) -> ExecutionResult {
    Executor::new(table).with_limits(limits).run(program, consent)
}

enum Flow {
    Normal,
    Break,
    Continue,
}

struct Machine<'e, 'a> {
    exec: &'e Executor<'a>,
    consent: &'e mut dyn Consent,
    sink: &'e mut dyn TraceSink,
    trace: Vec<TraceEvent>,
    scope: HashMap<String, Value>,
    steps: u64,
    line: usize,
}

impl Machine<'_, '_> {
    fn tick(&mut self) -> Result<(), Fault> {
        if self.steps >= self.exec.limits.max_steps {
            return Err(Fault::new(
                FailureKind::StepLimitExceeded,
                format!("step limit of {} exceeded", self.exec.limits.max_steps),
            ));
        }
        self.steps += 1;
        Ok(())
    }

    fn block(&mut self, stmts: &[Stmt]) -> Result<Flow, Fault> {
        for s in stmts {
            match self.stmt(s)? {
                Flow::Normal => {}
                flow => return Ok(flow),
            }
        }
        Ok(Flow::Normal)
    }

    fn stmt(&mut self, s: &Stmt) -> Result<Flow, Fault> {
        self.line = s.line;
        self.tick()?;
        match &s.kind {
            StmtKind::Assign { target, op, value } => {
                let v = self.eval(value)?;
                let v = match op {
                    AssignOp::Set => v,
                    AssignOp::Add => {
                        let old = self.lookup(target)?;
                        self.line = s.line;
                        self.add(old, v)?
                    }
                };
                self.scope.insert(target.clone(), v);
            }
            StmtKind::Expr(e) => {
                self.eval(e)?;
            }
            StmtKind::If { arms, else_body } => {
                for arm in arms {
                    let c = self.eval(&arm.cond)?;
                    if c.truthy() {
                        return self.block(&arm.body);
                    }
                    self.line = s.line;
                }
                if let Some(body) = else_body {
                    return self.block(body);
                }
            }
            StmtKind::While { cond, body } => loop {
                self.line = s.line;
                if !self.eval(cond)?.truthy() {
                    break;
                }
                if let Flow::Break = self.block(body)? {
                    break;
                }
            },
            StmtKind::For { var, iterable, body } => {
                let items = match self.eval(iterable)? {
                    Value::List(items) => items,
                    Value::Str(s) => s.chars().map(|c| Value::Str(c.to_string())).collect(),
                    other => return Err(type_error(format!("{} is not iterable", other.type_name()))),
                };
                for item in items {
                    self.line = s.line;
                    self.tick()?;
                    self.scope.insert(var.clone(), item);
                    if let Flow::Break = self.block(body)? {
                        break;
                    }
                }
            }
            StmtKind::Break => return Ok(Flow::Break),
            StmtKind::Continue => return Ok(Flow::Continue),
            StmtKind::Pass => {}
            StmtKind::Import(imp) => {
                return Err(Fault::new(
                    FailureKind::UnauthorizedAccess,
                    format!("import of `{}` is not permitted", imp.module()),
                ))
            }
        }
        Ok(Flow::Normal)
    }

    fn lookup(&self, name: &str) -> Result<Value, Fault> {
        self.scope.get(name).cloned().ok_or_else(|| {
            Fault::new(
                FailureKind::ScopingViolation,
                format!("name `{name}` is not defined"),
            )
        })
    }

    fn check_str(&self, s: String) -> Result<Value, Fault> {
        if s.len() > self.exec.limits.max_string_len && s.chars().count() > self.exec.limits.max_string_len {
            return Err(Fault::new(
                FailureKind::ResourceLimitExceeded,
                "string length limit exceeded".into(),
            ));
        }
        Ok(Value::Str(s))
    }

    fn check_list(&self, items: Vec<Value>) -> Result<Value, Fault> {
        if items.len() > self.exec.limits.max_list_len {
            return Err(Fault::new(
                FailureKind::ResourceLimitExceeded,
                "list length limit exceeded".into(),
            ));
        }
        Ok(Value::List(items))
    }

    fn eval_all(&mut self, exprs: &[Expr]) -> Result<Vec<Value>, Fault> {
        exprs.iter().map(|e| self.eval(e)).collect()
    }

    fn eval(&mut self, e: &Expr) -> Result<Value, Fault> {
        self.tick()?;
        match e {
            Expr::Null => Ok(Value::Null),
            Expr::Bool(b) => Ok(Value::Bool(*b)),
            Expr::Int(i) => Ok(Value::Int(*i)),
            Expr::Str(s) => Ok(Value::Str(s.clone())),
            Expr::FString(parts) => {
                let mut out = String::new();
                for p in parts {
                    match p {
                        FStringPart::Literal(s) => out.push_str(s),
                        FStringPart::Expr(inner) => out.push_str(&self.eval(inner)?.render()),
                    }
                }
                self.check_str(out)
            }
            Expr::List(items) => {
                let items = self.eval_all(items)?;
                self.check_list(items)
            }
            Expr::Name(n) => self.lookup(n),
            Expr::Call { callee, args } => self.call(callee, args),
            Expr::MethodCall {
                receiver,
                method,
                args,
            } => self.method_call(receiver, method, args),
            Expr::Index { receiver, index } => {
                let r = self.eval(receiver)?;
                let i = self.eval(index)?;
                index_value(r, i)
            }
            Expr::Unary { op, operand } => {
                let v = self.eval(operand)?;
                match op {
                    UnaryOp::Not => Ok(Value::Bool(!v.truthy())),
                    UnaryOp::Neg => match v {
                        Value::Int(i) => i
                            .checked_neg()
                            .map(Value::Int)
                            .ok_or_else(|| type_error("integer overflow")),
                        other => Err(type_error(format!("bad operand for unary -: {}", other.type_name()))),
                    },
                }
            }
            Expr::Binary { op, lhs, rhs } => self.binary(*op, lhs, rhs),
        }
    }

    fn call(&mut self, callee: &str, args: &[Expr]) -> Result<Value, Fault> {
        if self.exec.table.contains(callee) {
            let args = self.eval_all(args)?;
            let mut sink = crate::trace::Tee(&mut self.trace, &mut *self.sink);
            return self
                .exec
                .table
                .invoke(callee, args, &mut *self.consent, &mut sink)
                .map_err(|e| {
                    let kind = match e {
                        InvokeError::UnknownFunction(_) => FailureKind::UnauthorizedAccess,
                        InvokeError::PrivilegedDenied(_) => FailureKind::PrivilegedDenied,
                        _ => FailureKind::TypeError,
                    };
                    Fault::new(kind, e.to_string())
                });
        }
        if let Some(b) = self.exec.builtins.lookup(callee) {
            let args = self.eval_all(args)?;
            return builtins::call(b, args, &self.exec.limits);
        }
        Err(Fault::new(
            FailureKind::UnauthorizedAccess,
            format!("`{callee}` is not available in the function table"),
        ))
    }

    fn method_call(&mut self, receiver: &Expr, method: &str, args: &[Expr]) -> Result<Value, Fault> {
        if method != "append" {
            let r = self.eval(receiver)?;
            return Err(type_error(format!("{} has no method `{method}`", r.type_name())));
        }
        let Some(path) = place(receiver) else {
            // temporary receiver: evaluate for its effects, result is discarded
            let r = self.eval(receiver)?;
            let arg = self.single_arg(args)?;
            return match r {
                Value::List(mut items) => {
                    items.push(arg);
                    self.check_list(items).map(|_| Value::Null)
                }
                other => Err(type_error(format!("{} has no method `append`", other.type_name()))),
            };
        };
        let (root, index_exprs) = path;
        self.tick()?;
        if !self.scope.contains_key(root) {
            self.lookup(root)?;
        }
        let mut indices = Vec::with_capacity(index_exprs.len());
        for ie in index_exprs {
            indices.push(self.eval(ie)?);
        }
        let arg = self.single_arg(args)?;
        let max = self.exec.limits.max_list_len;
        let mut slot = self.scope.get_mut(root).ok_or_else(|| {
            Fault::new(FailureKind::ScopingViolation, format!("name `{root}` is not defined"))
        })?;
        for i in indices {
            slot = index_slot(slot, i)?;
        }
        match slot {
            Value::List(items) => {
                if items.len() >= max {
                    return Err(Fault::new(
                        FailureKind::ResourceLimitExceeded,
                        "list length limit exceeded".into(),
                    ));
                }
                items.push(arg);
                Ok(Value::Null)
            }
            other => Err(type_error(format!("{} has no method `append`", other.type_name()))),
        }
    }

    fn single_arg(&mut self, args: &[Expr]) -> Result<Value, Fault> {
        match args {
            [a] => self.eval(a),
            _ => Err(type_error(format!("append() takes exactly one argument ({} given)", args.len()))),
        }
    }

    fn binary(&mut self, op: BinOp, lhs: &Expr, rhs: &Expr) -> Result<Value, Fault> {
        let l = self.eval(lhs)?;
        match op {
            BinOp::And => return if l.truthy() { self.eval(rhs) } else { Ok(l) },
            BinOp::Or => return if l.truthy() { Ok(l) } else { self.eval(rhs) },
            BinOp::IsNone => return Ok(Value::Bool(l == Value::Null)),
            BinOp::IsNotNone => return Ok(Value::Bool(l != Value::Null)),
            _ => {}
        }
        let r = self.eval(rhs)?;
        match op {
            BinOp::Add => self.add(l, r),
            BinOp::Sub | BinOp::Mul | BinOp::Div => arith(op, l, r),
            BinOp::Eq => Ok(Value::Bool(l == r)),
            BinOp::Ne => Ok(Value::Bool(l != r)),
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                let ord = match (&l, &r) {
                    (Value::Int(a), Value::Int(b)) => a.cmp(b),
                    (Value::Str(a), Value::Str(b)) => a.cmp(b),
                    _ => {
                        return Err(type_error(format!(
                            "`{}` not supported between {} and {}",
                            op.symbol(),
                            l.type_name(),
                            r.type_name()
                        )))
                    }
                };
                Ok(Value::Bool(match op {
                    BinOp::Lt => ord.is_lt(),
                    BinOp::Le => ord.is_le(),
                    BinOp::Gt => ord.is_gt(),
                    _ => ord.is_ge(),
                }))
            }
            BinOp::In => match (&l, &r) {
                (_, Value::List(items)) => Ok(Value::Bool(items.contains(&l))),
                (Value::Str(needle), Value::Str(hay)) => Ok(Value::Bool(hay.contains(needle.as_str()))),
                _ => Err(type_error(format!(
                    "`in` not supported between {} and {}",
                    l.type_name(),
                    r.type_name()
                ))),
            },
            BinOp::And | BinOp::Or | BinOp::IsNone | BinOp::IsNotNone => unreachable!("handled above"),
        }
    }

    fn add(&self, l: Value, r: Value) -> Result<Value, Fault> {
        match (l, r) {
            (Value::Int(a), Value::Int(b)) => a
                .checked_add(b)
                .map(Value::Int)
                .ok_or_else(|| type_error("integer overflow")),
            (Value::Str(mut a), Value::Str(b)) => {
                a.push_str(&b);
                self.check_str(a)
            }
            (Value::List(mut a), Value::List(b)) => {
                a.extend(b);
                self.check_list(a)
            }
            (a, b) => Err(type_error(format!(
                "unsupported operands for +: {} and {}",
                a.type_name(),
                b.type_name()
            ))),
        }
    }
}

fn arith(op: BinOp, l: Value, r: Value) -> Result<Value, Fault> {
    let (Value::Int(a), Value::Int(b)) = (&l, &r) else {
        return Err(type_error(format!(
            "unsupported operands for {}: {} and {}",
            op.symbol(),
            l.type_name(),
            r.type_name()
        )));
    };
    let (a, b) = (*a, *b);
    let out = match op {
        BinOp::Sub => a.checked_sub(b),
        BinOp::Mul => a.checked_mul(b),
        _ => {
            if b == 0 {
                return Err(Fault::new(FailureKind::DivisionByZero, "division by zero".into()));
            }
            a.checked_div(b)
        }
    };
    out.map(Value::Int).ok_or_else(|| type_error("integer overflow"))
}

/// Root name and index expressions of an assignable location such as
/// `xs` or `xs[0][i]`.
fn place(e: &Expr) -> Option<(&str, Vec<&Expr>)> {
    match e {
        Expr::Name(n) => Some((n, Vec::new())),
        Expr::Index { receiver, index } => {
            let (root, mut idx) = place(receiver)?;
            idx.push(index);
            Some((root, idx))
        }
        _ => None,
    }
}

fn resolve_index(len: usize, i: &Value) -> Result<usize, Fault> {
    let Value::Int(i) = *i else {
        return Err(type_error(format!("indices must be integers, not {}", i.type_name())));
    };
    let idx = if i < 0 { len as i64 + i } else { i };
    if idx < 0 || idx >= len as i64 {
        return Err(type_error("index out of range"));
    }
    Ok(idx as usize)
}

fn index_value(r: Value, i: Value) -> Result<Value, Fault> {
    match r {
        Value::List(mut items) => {
            let k = resolve_index(items.len(), &i)?;
            Ok(items.swap_remove(k))
        }
        Value::Str(s) => {
            let chars: Vec<char> = s.chars().collect();
            let k = resolve_index(chars.len(), &i)?;
            Ok(Value::Str(chars[k].to_string()))
        }
        other => Err(type_error(format!("{} is not subscriptable", other.type_name()))),
    }
}

fn index_slot(slot: &mut Value, i: Value) -> Result<&mut Value, Fault> {
    match slot {
        Value::List(items) => {
            let k = resolve_index(items.len(), &i)?;
            Ok(&mut items[k])
        }
        other => Err(type_error(format!(
            "{} does not support item assignment",
            other.type_name()
        ))),
    }
}

#[cfg(test)]
mod tests;
