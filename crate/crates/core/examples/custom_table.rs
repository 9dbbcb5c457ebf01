//! Build a function table with real handlers, render its prompt, and run a
//! program against it.

use std::sync::{Arc, Mutex};

use intentflow::consent::ConsentPolicy;
use intentflow::executor::Executor;
use intentflow::function_table::{BaseType, FunctionEntry, FunctionSignature, FunctionTable, TypeExpr};
use intentflow::prompting::{render_prompt, Intention};
use intentflow::script::parse_source;
use intentflow::value::Value;

fn main() {
    let notes = Arc::new(Mutex::new(Vec::<String>::new()));
    let sink = Arc::clone(&notes);
    let string = TypeExpr::Base(BaseType::String);

    let table = FunctionTable::new()
        .with(FunctionEntry::new(
            FunctionSignature::new("add_note", &[("text", string)], TypeExpr::Void),
            move |args| {
                if let [Value::Str(s)] = args {
                    sink.lock().unwrap().push(s.clone());
                }
                Value::Null
            },
        ))
        .and_then(|t| {
            t.with(FunctionEntry::new(
                FunctionSignature::new("count_notes", &[], TypeExpr::Base(BaseType::Integer)),
                {
                    let notes = Arc::clone(&notes);
                    move |_| Value::Int(notes.lock().unwrap().len() as i64)
                },
            ))
        })
        .expect("valid table");

    let intention = Intention::new("Remember to buy milk and eggs").unwrap();
    println!("{}\n", render_prompt(&intention, &table).unwrap().body);

    let program = parse_source(
        "for item in [\"milk\", \"eggs\"]:\n    add_note(f\"buy {item}\")\nn = count_notes()",
    )
    .unwrap();
    let result = Executor::new(&table).run(&program, &mut ConsentPolicy::AutoDeny);
    for line in result.trace_lines() {
        println!("{line}");
    }
    println!("notes: {:?}", notes.lock().unwrap());
}
