//! Runtime values of the script interpreter.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A script value. Lists are the only compound value; they are copied on
/// assignment and mutated only through `append`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Null,
    Bool(bool),
    Int(i64),
    Str(String),
    List(Vec<Value>),
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Null => "None",
            Value::Bool(_) => "bool",
            Value::Int(_) => "int",
            Value::Str(_) => "str",
            Value::List(_) => "list",
        }
    }

    /// Truth value used by `if`, `while`, `and`, `or` and `not`.
    pub fn truthy(&self) -> bool {
        match self {
            Value::Null => false,
            Value::Bool(b) => *b,
            Value::Int(i) => *i != 0,
            Value::Str(s) => !s.is_empty(),
            Value::List(items) => !items.is_empty(),
        }
    }

    /// Text form used in traces and by `str()`.
    ///
    /// Top-level strings are emitted verbatim; strings nested inside a list
    /// are wrapped in double quotes.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out, false);
        out
    }

    fn render_into(&self, out: &mut String, nested: bool) {
        match self {
            Value::Null => out.push_str("None"),
            Value::Bool(true) => out.push_str("True"),
            Value::Bool(false) => out.push_str("False"),
            Value::Int(i) => out.push_str(&i.to_string()),
            Value::Str(s) if nested => {
                out.push('"');
                out.push_str(s);
                out.push('"');
            }
            Value::Str(s) => out.push_str(s),
            Value::List(items) => {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    item.render_into(out, true);
                }
                out.push(']');
            }
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Str(s.to_owned())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Str(s)
    }
}

impl From<i64> for Value {
    fn from(i: i64) -> Self {
        Value::Int(i)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<Vec<Value>> for Value {
    fn from(items: Vec<Value>) -> Self {
        Value::List(items)
    }
}

/// Free-function form of [`Value::render`].
pub fn render_value(v: &Value) -> String {
    v.render()
}

/// Free-function form of [`Value::truthy`].
pub fn truthiness(v: &Value) -> bool {
    v.truthy()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_trace_arguments() {
        assert_eq!(Value::Int(1).render(), "1");
        assert_eq!(Value::List(vec![Value::Int(1)]).render(), "[1]");
        assert_eq!(Value::from("insurance company").render(), "insurance company");
    }

    #[test]
    fn renders_scalars_and_nesting() {
        assert_eq!(Value::Null.render(), "None");
        assert_eq!(Value::Bool(true).render(), "True");
        assert_eq!(Value::Bool(false).render(), "False");
        assert_eq!(Value::Int(-42).render(), "-42");
        assert_eq!(Value::List(vec![]).render(), "[]");
        let nested = Value::List(vec![
            Value::from("a b"),
            Value::Int(2),
            Value::List(vec![Value::from("c"), Value::Null]),
        ]);
        assert_eq!(nested.render(), r#"["a b", 2, ["c", None]]"#);
    }

    #[test]
    fn string_rendering_does_not_escape() {
        assert_eq!(Value::from("say \"hi\"").render(), "say \"hi\"");
        assert_eq!(Value::List(vec![Value::from("q\"")]).render(), "[\"q\"\"]");
    }

    #[test]
    fn truthiness_table() {
        assert!(!Value::Null.truthy());
        assert!(!Value::from("").truthy());
        assert!(Value::from(" ").truthy());
        assert!(Value::List(vec![Value::Int(0)]).truthy());
        assert!(!Value::List(vec![]).truthy());
        assert!(!Value::Int(0).truthy());
        assert!(Value::Int(-1).truthy());
        assert!(Value::Bool(true).truthy());
        assert!(!Value::Bool(false).truthy());
    }
}
