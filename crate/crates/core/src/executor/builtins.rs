//! Pure functions callable without a function-table entry.

use std::fmt;
use std::str::FromStr;

use crate::value::Value;

use super::{Fault, FailureKind, Limits};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Builtin {
    Len,
    Str,
    Int,
    Range,
}

impl Builtin {
    pub const ALL: [Builtin; 4] = [Builtin::Len, Builtin::Str, Builtin::Int, Builtin::Range];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Len => "len",
            Builtin::Str => "str",
            Builtin::Int => "int",
            Builtin::Range => "range",
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Builtin {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| format!("unknown builtin `{s}`"))
    }
}

/// The set of builtins a run may use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Builtins(Vec<Builtin>);

impl Builtins {
    pub fn all() -> Self {
        Builtins(Builtin::ALL.to_vec())
    }

    pub fn none() -> Self {
        Builtins(Vec::new())
    }

    pub fn only(list: &[Builtin]) -> Self {
        let mut v = list.to_vec();
        v.sort();
        v.dedup();
        Builtins(v)
    }

    pub fn lookup(&self, name: &str) -> Option<Builtin> {
        self.0.iter().copied().find(|b| b.name() == name)
    }

    pub fn iter(&self) -> impl Iterator<Item = Builtin> + '_ {
        self.0.iter().copied()
    }
}

impl Default for Builtins {
    fn default() -> Self {
        Builtins::all()
    }
}

fn type_error(msg: String) -> Fault {
    Fault::new(FailureKind::TypeError, msg)
}

pub(super) fn call(b: Builtin, args: Vec<Value>, limits: &Limits) -> Result<Value, Fault> {
    let [arg]: [Value; 1] = args.try_into().map_err(|a: Vec<Value>| {
        type_error(format!("{b}() takes exactly one argument ({} given)", a.len()))
    })?;
    match (b, arg) {
        (Builtin::Len, Value::Str(s)) => Ok(Value::Int(s.chars().count() as i64)),
        (Builtin::Len, Value::List(items)) => Ok(Value::Int(items.len() as i64)),
        (Builtin::Len, other) => Err(type_error(format!("len() of {}", other.type_name()))),
        (Builtin::Str, v) => {
            let s = v.render();
            if s.chars().count() > limits.max_string_len {
                return Err(Fault::new(
                    FailureKind::ResourceLimitExceeded,
                    "string length limit exceeded".into(),
                ));
            }
            Ok(Value::Str(s))
        }
        (Builtin::Int, Value::Int(i)) => Ok(Value::Int(i)),
        (Builtin::Int, Value::Str(s)) => s
            .trim()
            .parse::<i64>()
            .map(Value::Int)
            .map_err(|_| type_error(format!("int() cannot parse {s:?}"))),
        (Builtin::Int, other) => Err(type_error(format!("int() of {}", other.type_name()))),
        (Builtin::Range, Value::Int(n)) => {
            let n = n.max(0);
            if n as u64 > limits.max_list_len as u64 {
                return Err(Fault::new(
                    FailureKind::ResourceLimitExceeded,
                    format!("range({n}) exceeds the list length limit"),
                ));
            }
            Ok(Value::List((0..n).map(Value::Int).collect()))
        }
        (Builtin::Range, other) => Err(type_error(format!("range() of {}", other.type_name()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(b: Builtin, args: Vec<Value>) -> Result<Value, FailureKind> {
        call(b, args, &Limits::default()).map_err(|f| f.kind)
    }

    #[test]
    fn spec_examples() {
        assert_eq!(
            run(Builtin::Len, vec![Value::List(vec![Value::Int(1), Value::Int(2)])]),
            Ok(Value::Int(2))
        );
        assert_eq!(run(Builtin::Str, vec![Value::Int(5)]), Ok(Value::from("5")));
        assert_eq!(run(Builtin::Int, vec!["abc".into()]), Err(FailureKind::TypeError));
    }

    #[test]
    fn conversions() {
        assert_eq!(run(Builtin::Len, vec!["héllo".into()]), Ok(Value::Int(5)));
        assert_eq!(run(Builtin::Len, vec![Value::Int(3)]), Err(FailureKind::TypeError));
        assert_eq!(run(Builtin::Int, vec![" -12 ".into()]), Ok(Value::Int(-12)));
        assert_eq!(run(Builtin::Int, vec![Value::Int(4)]), Ok(Value::Int(4)));
        assert_eq!(run(Builtin::Int, vec![Value::Null]), Err(FailureKind::TypeError));
        assert_eq!(
            run(Builtin::Str, vec![Value::List(vec!["a".into()])]),
            Ok(Value::from("[\"a\"]"))
        );
        assert_eq!(run(Builtin::Str, vec![Value::Null]), Ok(Value::from("None")));
    }

    #[test]
    fn range_bounds() {
        assert_eq!(
            run(Builtin::Range, vec![Value::Int(3)]),
            Ok(Value::List(vec![Value::Int(0), Value::Int(1), Value::Int(2)]))
        );
        assert_eq!(run(Builtin::Range, vec![Value::Int(-2)]), Ok(Value::List(vec![])));
        let limits = Limits {
            max_list_len: 5,
            ..Limits::default()
        };
        assert_eq!(
            call(Builtin::Range, vec![Value::Int(6)], &limits).map_err(|f| f.kind),
            Err(FailureKind::ResourceLimitExceeded)
        );
        assert!(call(Builtin::Range, vec![Value::Int(5)], &limits).is_ok());
    }

    #[test]
    fn arity() {
        assert_eq!(run(Builtin::Len, vec![]), Err(FailureKind::TypeError));
        assert_eq!(
            run(Builtin::Range, vec![Value::Int(1), Value::Int(2)]),
            Err(FailureKind::TypeError)
        );
    }

    #[test]
    fn sets() {
        assert_eq!(Builtins::none().lookup("len"), None);
        assert_eq!(Builtins::all().lookup("len"), Some(Builtin::Len));
        assert_eq!(Builtins::all().lookup("print"), None);
        let only = Builtins::only(&[Builtin::Str, Builtin::Str]);
        assert_eq!(only.iter().count(), 1);
        assert_eq!("range".parse::<Builtin>(), Ok(Builtin::Range));
    }
}
