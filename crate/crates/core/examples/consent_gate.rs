//! Privileged calls go through a consent gate. Here the "user" approves the
//! first request and the gate remembers the answer for the rest of the run.

use intentflow::consent::{ConsentPolicy, InteractiveConsent};
use intentflow::executor::Executor;
use intentflow::script::parse_source;
use intentflow::stubs::{stub_table, StubConfig};

const PROGRAM: &str = r#"
listing = shell("ls ~")
print_screen(listing)
again = shell("ls -a ~")
"#;

fn main() {
    let table = stub_table(&StubConfig {
        shell_reply: "notes.txt\nphotos".into(),
        ..Default::default()
    });
    let program = parse_source(PROGRAM).unwrap();

    let denied = Executor::new(&table).run(&program, &mut ConsentPolicy::AutoDeny);
    println!("auto-deny: {:?}, {} calls", denied.failure_kind(), denied.trace.len());

    let mut asked = Vec::new();
    let mut consent = InteractiveConsent::new(|f: &str| {
        asked.push(f.to_string());
        true
    });
    let allowed = Executor::new(&table).run(&program, &mut consent);
    println!("interactive: {:?} after {} prompt(s)", allowed.status, consent.prompts());
    for line in allowed.trace_lines() {
        println!("  {line}");
    }
}
