//! The default stub table: nine functions of a GUI-less assistant API whose
//! handlers have no side effects and return canned values.

use crate::function_table::{BaseType, FunctionEntry, FunctionSignature, FunctionTable, TypeExpr};
use crate::value::Value;

/// Canned return for `find_contact_email`.
pub const STUB_CONTACT_EMAIL: &str = "john.doe@example.com";

/// The documentation block of the stub table, in registration order.
///
/// `find_contact_email` keeps its historical spelling without a space before
/// the return type.
pub const STUB_DOCS: &str = "\
function find_file_id(expression: String): Integer|null
function find_contact_id(expression: String): Integer|null
function find_contact_email(contact_id: Integer):String|null
function play_voice(text: String): void
function ask_question(question: String): String
function play_audio_file(file: File): void
function send_email(email: String, subject: String, text: String, attachments: Collection<Integer>): void
function print_screen(text: String): void
function shell(command: String): String";

/// Replies for the stubs whose return value is not fixed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StubConfig {
    pub ask_question_reply: String,
    pub shell_reply: String,
}

pub fn default_stub_table() -> FunctionTable {
    stub_table(&StubConfig::default())
}

pub fn stub_table(config: &StubConfig) -> FunctionTable {
    use BaseType::{File, Integer, String as Str};
    let s = TypeExpr::Base(Str);
    let void = TypeExpr::Void;

    let ask = config.ask_question_reply.clone();
    let shell = config.shell_reply.clone();

    let entries = vec![
        FunctionEntry::new(
            FunctionSignature::new("find_file_id", &[("expression", s)], TypeExpr::Nullable(Integer)),
            |_| Value::Int(1),
        ),
        FunctionEntry::new(
            FunctionSignature::new("find_contact_id", &[("expression", s)], TypeExpr::Nullable(Integer)),
            |_| Value::Int(1),
        ),
        FunctionEntry::new(
            FunctionSignature::new(
                "find_contact_email",
                &[("contact_id", TypeExpr::Base(Integer))],
                TypeExpr::Nullable(Str),
            ),
            |_| Value::from(STUB_CONTACT_EMAIL),
        )
        .with_doc_line("function find_contact_email(contact_id: Integer):String|null"),
        FunctionEntry::noop(FunctionSignature::new("play_voice", &[("text", s)], void)),
        FunctionEntry::new(
            FunctionSignature::new("ask_question", &[("question", s)], s),
            move |_| Value::Str(ask.clone()),
        ),
        FunctionEntry::noop(FunctionSignature::new(
            "play_audio_file",
            &[("file", TypeExpr::Base(File))],
            void,
        )),
        FunctionEntry::noop(FunctionSignature::new(
            "send_email",
            &[
                ("email", s),
                ("subject", s),
                ("text", s),
                ("attachments", TypeExpr::Collection(Integer)),
            ],
            void,
        )),
        FunctionEntry::noop(FunctionSignature::new("print_screen", &[("text", s)], void)),
        FunctionEntry::new(
            FunctionSignature::new("shell", &[("command", s)], s),
            move |_| Value::Str(shell.clone()),
        )
        .privileged(true),
    ];

    let mut table = FunctionTable::new();
    for e in entries {
        table.register(e).expect("stub signatures are well-formed");
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consent::ConsentPolicy;
    use crate::function_table::InvokeError;

    fn call(t: &FunctionTable, name: &str, args: Vec<Value>) -> (Result<Value, InvokeError>, Vec<String>) {
        let mut sink = Vec::new();
        let r = t.invoke(name, args, &mut ConsentPolicy::AutoDeny, &mut sink);
        (r, sink.into_iter().map(|e| e.rendered).collect())
    }

    #[test]
    fn docs_match_listing() {
        let t = default_stub_table();
        assert_eq!(t.len(), 9);
        assert_eq!(t.render_docs().unwrap(), STUB_DOCS);
    }

    #[test]
    fn single_entry_docs() {
        let t = default_stub_table();
        let only = |name: &str| {
            let mut single = FunctionTable::new();
            single.register(t.get(name).unwrap().clone()).unwrap();
            single.render_docs().unwrap()
        };
        assert_eq!(only("play_voice"), "function play_voice(text: String): void");
        assert_eq!(
            only("send_email"),
            "function send_email(email: String, subject: String, text: String, attachments: Collection<Integer>): void"
        );
    }

    #[test]
    fn every_listed_signature_round_trips() {
        let t = default_stub_table();
        for (line, entry) in STUB_DOCS.lines().zip(t.entries()) {
            assert_eq!(FunctionSignature::parse(line).unwrap(), entry.signature);
            assert_eq!(FunctionSignature::parse(&entry.signature.to_string()).unwrap(), entry.signature);
        }
    }

    #[test]
    fn canned_returns() {
        let t = default_stub_table();
        let (r, tr) = call(&t, "find_contact_id", vec!["insurance company".into()]);
        assert_eq!(r, Ok(Value::Int(1)));
        assert_eq!(tr, vec![r#"Execute "find_contact_id" and arguments "insurance company""#]);
        assert_eq!(call(&t, "find_contact_email", vec![Value::Int(1)]).0, Ok(Value::from(STUB_CONTACT_EMAIL)));
        assert_eq!(call(&t, "find_file_id", vec!["car title".into()]).0, Ok(Value::Int(1)));
        assert_eq!(call(&t, "play_voice", vec!["hi".into()]).0, Ok(Value::Null));
        assert_eq!(call(&t, "ask_question", vec!["why?".into()]).0, Ok(Value::from("")));
    }

    #[test]
    fn unknown_function_is_rejected() {
        let (r, tr) = call(&default_stub_table(), "no_such_fn", vec![]);
        assert_eq!(r, Err(InvokeError::UnknownFunction("no_such_fn".into())));
        assert!(tr.is_empty());
    }

    #[test]
    fn shell_is_privileged() {
        let t = stub_table(&StubConfig {
            shell_reply: "Documents\nMusic".into(),
            ..Default::default()
        });
        assert!(t.get("shell").unwrap().privileged);
        assert_eq!(
            t.entries().filter(|e| e.privileged).count(),
            1,
            "only shell is privileged"
        );
        let (r, tr) = call(&t, "shell", vec!["ls".into()]);
        assert_eq!(r, Err(InvokeError::PrivilegedDenied("shell".into())));
        assert!(tr.is_empty());

        let mut sink = Vec::new();
        let r = t.invoke("shell", vec!["ls".into()], &mut ConsentPolicy::AutoAllow, &mut sink);
        assert_eq!(r, Ok(Value::from("Documents\nMusic")));
        assert_eq!(sink.len(), 1);
    }
}
