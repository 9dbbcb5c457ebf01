//! Render the prompt for an intention given on the command line.
//!
//! ```text
//! cargo run --example render_prompt -- "Please tell me the current temperature"
//! ```

use intentflow::prompting::{render_prompt, Intention};
use intentflow::stubs::default_stub_table;

fn main() {
    let text = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "Please send my car title to my insurance company".to_string());
    let intention = match Intention::new(text) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };
    let bundle = render_prompt(&intention, &default_stub_table()).expect("stub table is not empty");
    println!("[system] {}\n", bundle.role);
    println!("{}", bundle.body);
}
