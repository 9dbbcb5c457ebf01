//! Parse the reference program and execute it against the stub table.
//!
//! ```text
//! cargo run --example golden_trace
//! ```

use intentflow::consent::ConsentPolicy;
use intentflow::executor::{execute, Limits};
use intentflow::script::parse_source;
use intentflow::stubs::default_stub_table;
use intentflow::trace::trace_text;

const PROGRAM: &str = include_str!("../fixtures/bench/intention-1/trial-1.txt");

fn main() {
    let program = parse_source(PROGRAM).expect("reference program parses");
    let table = default_stub_table();
    let result = execute(&program, &table, Limits::default(), &mut ConsentPolicy::AutoDeny);
    print!("{}", trace_text(&result.trace));
    println!("-- {:?} in {} steps", result.status, result.steps_used);
}
