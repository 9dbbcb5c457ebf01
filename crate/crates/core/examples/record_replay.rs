//! Record generations from a "live" backend into fixtures, then replay them
//! and confirm the outcomes match.

use intentflow::consent::ConsentPolicy;
use intentflow::harness::{parse_corpus, Harness};
use intentflow::llm::{MockBackend, ReplayBackend, Timing};
use intentflow::stubs::default_stub_table;

fn main() {
    let dir = std::env::temp_dir().join(format!("intentflow-record-{}", std::process::id()));
    let live = MockBackend::with_replies(vec![
        "```python\nplay_voice(\"Hello\")\n```".into(),
        "song = find_file_id(\"beat it\")\nplay_audio_file(song)".into(),
    ])
    .timing(Timing::from_ms(40.0, 900.0));
    let table = default_stub_table();
    let corpus = parse_corpus("Say hello\nPlay beat it\n");

    let (fixtures, recorded) = Harness::new(&live, &table)
        .unwrap()
        .record_fixtures(&corpus, 2, &dir, true, &mut ConsentPolicy::AutoDeny)
        .expect("recording succeeds");
    println!("recorded into {}", fixtures.root().display());

    let replay = ReplayBackend::new(fixtures);
    let replayed = Harness::new(&replay, &table)
        .unwrap()
        .run_bench(&corpus, 2, &mut ConsentPolicy::AutoDeny)
        .unwrap();
    for (a, b) in recorded.trials.iter().zip(&replayed.trials) {
        println!(
            "intention {} trial {}: same outcome = {}",
            a.intention_index,
            a.trial_index,
            a.same_outcome(b)
        );
    }
    let _ = std::fs::remove_dir_all(&dir);
}
