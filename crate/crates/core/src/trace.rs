//! Invocation traces.
//!
//! Every successful call into a [`FunctionTable`](crate::FunctionTable) produces
//! one [`TraceEvent`]. The rendered form is the line format
//!
//! ```text
//! Execute "send_email" and arguments "john.doe@example.com", "[1]"
//! ```

use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::value::Value;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub function: String,
    pub args: Vec<Value>,
    pub rendered: String,
}

impl TraceEvent {
    pub fn new(function: impl Into<String>, args: Vec<Value>) -> Self {
        let function = function.into();
        let rendered = render_trace_line(&function, &args);
        TraceEvent {
            function,
            args,
            rendered,
        }
    }
}

/// Renders one trace line. Zero-argument calls end in `arguments ` with
/// nothing after the trailing space.
pub fn render_trace_line(function: &str, args: &[Value]) -> String {
    let mut line = format!("Execute \"{function}\" and arguments ");
    for (i, arg) in args.iter().enumerate() {
        if i > 0 {
            line.push_str(", ");
        }
        line.push('"');
        line.push_str(&arg.render());
        line.push('"');
    }
    line
}

/// Joins rendered trace lines, one per line, each LF-terminated.
pub fn trace_text(events: &[TraceEvent]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&e.rendered);
        out.push('\n');
    }
    out
}

/// Receiver of trace events.
pub trait TraceSink {
    fn record(&mut self, event: TraceEvent);
}

impl TraceSink for Vec<TraceEvent> {
    fn record(&mut self, event: TraceEvent) {
        self.push(event);
    }
}

/// Discards events.
#[derive(Debug, Default, Clone, Copy)]
pub struct NullSink;

impl TraceSink for NullSink {
    fn record(&mut self, _event: TraceEvent) {}
}

/// A cloneable sink backed by a shared buffer, for observing events from
/// outside the executor.
#[derive(Debug, Default, Clone)]
pub struct SharedSink(Arc<Mutex<Vec<TraceEvent>>>);

impl SharedSink {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn events(&self) -> Vec<TraceEvent> {
        self.0.lock().expect("trace buffer poisoned").clone()
    }
}

impl TraceSink for SharedSink {
    fn record(&mut self, event: TraceEvent) {
        self.0.lock().expect("trace buffer poisoned").push(event);
    }
}

/// Forwards each event to two sinks.
pub struct Tee<'a, A: ?Sized, B: ?Sized>(pub &'a mut A, pub &'a mut B);

impl<A: TraceSink + ?Sized, B: TraceSink + ?Sized> TraceSink for Tee<'_, A, B> {
    fn record(&mut self, event: TraceEvent) {
        self.1.record(event.clone());
        self.0.record(event);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_string_argument() {
        let e = TraceEvent::new("find_contact_id", vec!["insurance company".into()]);
        assert_eq!(
            e.rendered,
            r#"Execute "find_contact_id" and arguments "insurance company""#
        );
    }

    #[test]
    fn zero_arguments_leave_trailing_space() {
        assert_eq!(
            render_trace_line("ping", &[]),
            r#"Execute "ping" and arguments "#
        );
    }

    #[test]
    fn several_arguments_are_comma_space_joined() {
        let line = render_trace_line(
            "send_email",
            &[
                "a@b.c".into(),
                Value::Int(3),
                Value::List(vec![Value::Int(1), Value::Int(2)]),
            ],
        );
        assert_eq!(line, r#"Execute "send_email" and arguments "a@b.c", "3", "[1, 2]""#);
    }

    #[test]
    fn trace_text_is_lf_terminated() {
        let events = vec![
            TraceEvent::new("a", vec![]),
            TraceEvent::new("b", vec![Value::Null]),
        ];
        assert_eq!(
            trace_text(&events),
            "Execute \"a\" and arguments \nExecute \"b\" and arguments \"None\"\n"
        );
    }
}
