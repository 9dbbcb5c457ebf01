//! Run the four-intention benchmark over the shipped replay fixtures and
//! print the report in every format.

use std::path::Path;

use intentflow::consent::ConsentPolicy;
use intentflow::harness::{default_corpus, render_report, Harness, ReportFormat};
use intentflow::llm::ReplayBackend;
use intentflow::stubs::default_stub_table;

fn main() {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/bench");
    let backend = ReplayBackend::open(fixtures);
    let table = default_stub_table();
    let harness = Harness::new(&backend, &table).unwrap();
    // the intention-4 fixtures call `shell`, so consent is granted up front
    let report = harness
        .run_bench(&default_corpus(), 5, &mut ConsentPolicy::AutoAllow)
        .expect("fixtures are complete");

    print!("{}", render_report(&report, ReportFormat::Markdown).unwrap());
    println!();
    print!("{}", render_report(&report, ReportFormat::Csv).unwrap());
    println!();
    for t in report.trials.iter().filter(|t| !t.success) {
        println!(
            "intention {} trial {}: {:?} ({})",
            t.intention_index,
            t.trial_index,
            t.failure_class.unwrap(),
            t.failure_message.as_deref().unwrap_or("")
        );
    }
}
