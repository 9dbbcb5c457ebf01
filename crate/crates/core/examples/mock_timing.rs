//! The mock backend in real-time mode actually waits, so the harness measures
//! genuine latencies close to the configured ones.

use intentflow::consent::ConsentPolicy;
use intentflow::harness::{render_report, Harness, ReportFormat};
use intentflow::llm::{MockBackend, Timing, TimingMode};
use intentflow::prompting::Intention;
use intentflow::stubs::default_stub_table;

fn main() {
    let backend = MockBackend::new("play_voice(\"It is sunny.\")")
        .timing(Timing::from_ms(120.0, 450.0))
        .mode(TimingMode::RealTime);
    let table = default_stub_table();
    let harness = Harness::new(&backend, &table).unwrap();
    let corpus = [Intention::new("Please tell me the current temperature").unwrap()];
    let report = harness.run_bench(&corpus, 3, &mut ConsentPolicy::AutoDeny).unwrap();
    print!("{}", render_report(&report, ReportFormat::Markdown).unwrap());
    for t in &report.trials {
        println!("trial {}: ttft {:?}, total {:?}", t.trial_index, t.ttft, t.response_time);
    }
}
