use std::path::PathBuf;

use super::*;
use crate::consent::ConsentPolicy;
use crate::llm::{MockBackend, ReplayBackend};
use crate::stubs::default_stub_table;

fn bench_fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/bench")
}

fn intention(text: &str) -> Intention {
    Intention::new(text).unwrap()
}

fn record(i: usize, success: bool, ttft_ms: u64, total_ms: u64) -> TrialRecord {
    TrialRecord {
        intention_index: i,
        trial_index: 1,
        intention: "x".into(),
        success,
        failure_class: (!success).then_some(FailureClass::TypeError),
        failure_message: None,
        response_time: Duration::from_millis(total_ms),
        ttft: Duration::from_millis(ttft_ms),
        execution_time: Duration::ZERO,
        code: String::new(),
        trace: Vec::new(),
    }
}

#[test]
fn golden_trial_over_replay() {
    let backend = ReplayBackend::open(bench_fixtures());
    let table = default_stub_table();
    let h = Harness::new(&backend, &table).unwrap();
    let rec = h.run_trial(&default_corpus()[0], Slot::new(1, 1), &mut ConsentPolicy::AutoDeny);
    assert!(rec.success, "{rec:?}");
    assert_eq!(rec.failure_class, None);
    assert_eq!(rec.trace.len(), 4);
    assert_eq!(rec.ttft, Duration::from_micros(452_300));
    assert_eq!(rec.response_time, Duration::from_millis(3120));
}

#[test]
fn failures_are_classified() {
    let table = default_stub_table();
    let cases: [(&str, FailureClass); 9] = [
        ("import os\nprint_screen(shell(\"ls ~\"))", FailureClass::UnauthorizedAccess),
        ("print_screen(files)", FailureClass::ScopingViolation),
        ("def f():\n    pass", FailureClass::Unsupported),
        ("x = (", FailureClass::Syntax),
        ("x = 1.5", FailureClass::Lex),
        ("x = 1 / 0", FailureClass::DivisionByZero),
        ("while True:\n    pass", FailureClass::StepLimit),
        ("shell(\"ls\")", FailureClass::PrivilegedDenied),
        ("```\n```", FailureClass::NoCode),
    ];
    for (code, class) in cases {
        let backend = MockBackend::new(code);
        let h = Harness::new(&backend, &table).unwrap();
        let rec = h.run_trial(&intention("i"), Slot::new(1, 1), &mut ConsentPolicy::AutoDeny);
        assert!(!rec.success);
        assert_eq!(rec.failure_class, Some(class), "{code:?}");
        assert!(rec.failure_message.is_some());
    }
    let backend = MockBackend::new("");
    let h = Harness::new(&backend, &table).unwrap();
    let rec = h.run_trial(&intention("i"), Slot::new(1, 1), &mut ConsentPolicy::AutoDeny);
    assert_eq!(rec.failure_class, Some(FailureClass::BackendError));
}

#[test]
fn code_and_partial_trace_kept_on_failure() {
    let table = default_stub_table();
    let backend = MockBackend::new("```\nplay_voice(\"a\")\nx = y\n```");
    let h = Harness::new(&backend, &table).unwrap();
    let rec = h.run_trial(&intention("i"), Slot::new(1, 1), &mut ConsentPolicy::AutoDeny);
    assert_eq!(rec.code, "play_voice(\"a\")\nx = y");
    assert_eq!(rec.trace, ["Execute \"play_voice\" and arguments \"a\""]);
    assert_eq!(rec.failure_class, Some(FailureClass::ScopingViolation));
}

#[test]
fn empty_table_rejected() {
    let backend = MockBackend::new("x = 1");
    let table = FunctionTable::new();
    assert!(matches!(Harness::new(&backend, &table), Err(HarnessError::EmptyTable)));
}

#[test]
fn bench_over_shipped_fixtures() {
    let backend = ReplayBackend::open(bench_fixtures());
    let table = default_stub_table();
    let h = Harness::new(&backend, &table).unwrap();
    let report = h.run_bench(&default_corpus(), 5, &mut ConsentPolicy::AutoAllow).unwrap();
    assert_eq!(report.successes(), [5, 5, 5, 3]);
    let failed: Vec<_> = report.trials.iter().filter(|t| !t.success).map(|t| t.failure_class).collect();
    assert_eq!(
        failed,
        [Some(FailureClass::UnauthorizedAccess), Some(FailureClass::ScopingViolation)]
    );
    let md = render_report(&report, ReportFormat::Markdown).unwrap();
    assert!(md.contains("| 1 | 5 | 3.31 | 466.0 |\n"), "{md}");
    assert!(md.contains("| 2 | 5 | 1.31 | 460.5 |\n"), "{md}");
    assert!(md.contains("| 3 | 5 | 2.03 | 491.4 |\n"), "{md}");
    assert!(md.contains("| 4 | 3 | 1.47 | 461.0 |\n"), "{md}");
}

#[test]
fn bench_order_is_intention_major() {
    let backend = MockBackend::with_replies(vec!["x = 1".into(), "y = 2".into()]);
    let table = default_stub_table();
    let h = Harness::new(&backend, &table).unwrap();
    let corpus = parse_corpus("a\nb");
    let report = h.run_bench(&corpus, 3, &mut ConsentPolicy::AutoDeny).unwrap();
    let slots: Vec<_> = report.trials.iter().map(|t| (t.intention_index, t.trial_index)).collect();
    assert_eq!(slots, [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (2, 3)]);
    assert_eq!(report.trials[3].code, "y = 2");
}

#[test]
fn bench_preflight_and_arguments() {
    let table = default_stub_table();
    let backend = ReplayBackend::open(bench_fixtures());
    let h = Harness::new(&backend, &table).unwrap();
    let err = h.run_bench(&default_corpus(), 6, &mut ConsentPolicy::AutoDeny).unwrap_err();
    assert!(matches!(err, HarnessError::Backend(BackendError::FixtureMissing(_))), "{err}");
    assert!(matches!(
        h.run_bench(&default_corpus(), 0, &mut ConsentPolicy::AutoDeny),
        Err(HarnessError::NoTrials)
    ));
    assert!(matches!(
        h.run_bench(&[], 1, &mut ConsentPolicy::AutoDeny),
        Err(HarnessError::EmptyCorpus)
    ));
    let missing = ReplayBackend::open("/nonexistent/fixtures");
    let h = Harness::new(&missing, &table).unwrap();
    assert!(h.run_bench(&default_corpus(), 1, &mut ConsentPolicy::AutoDeny).is_err());
}

#[test]
fn single_trial_report() {
    let backend = MockBackend::new("x = 1");
    let table = default_stub_table();
    let h = Harness::new(&backend, &table).unwrap();
    let report = h.run_bench(&[intention("only")], 1, &mut ConsentPolicy::AutoDeny).unwrap();
    assert_eq!(report.rows.len(), 1);
    assert_eq!(report.trials.len(), 1);
}

#[test]
fn aggregation_includes_failures() {
    let report = BenchReport::from_trials(vec![
        record(1, true, 400, 3000),
        record(1, false, 500, 4000),
        record(2, true, 460, 1310),
    ]);
    assert_eq!(report.rows[0].trials, 2);
    assert_eq!(report.rows[0].successes, 1);
    assert_eq!(report.rows[0].avg_ttft, Duration::from_millis(450));
    assert_eq!(report.rows[0].avg_response_time, Duration::from_millis(3500));
    assert_eq!(report.rows[1].intention, 2);
}

#[test]
fn report_formats() {
    let report = BenchReport::from_trials(vec![record(1, true, 466, 3310)]);
    assert_eq!(
        render_report(&report, ReportFormat::Markdown).unwrap(),
        "| Intention | Successes | Average Response Time (s) | Average Time to First Token (ms) |\n\
         |---|---|---|---|\n\
         | 1 | 5 | 3.31 | 466.0 |\n"
            .replace("| 5 |", "| 1 |")
    );
    assert_eq!(
        render_report(&report, ReportFormat::Csv).unwrap(),
        "intention,successes,avg_response_time_s,avg_ttft_ms\n1,1,3.31,466.0\n"
    );
    let jl = render_report(&report, ReportFormat::JsonLines).unwrap();
    assert_eq!(jl.lines().count(), 1);
    let back: TrialRecord = serde_json::from_str(jl.trim_end()).unwrap();
    assert_eq!(back, report.trials[0]);
    assert!(jl.contains("\"ttft_ms\":466.0"));
    assert_eq!(render_report(&BenchReport::default(), ReportFormat::Csv), Err(EmptyReport));
}

#[test]
fn format_names() {
    for f in [ReportFormat::Markdown, ReportFormat::Csv, ReportFormat::JsonLines] {
        assert_eq!(f.to_string().parse::<ReportFormat>(), Ok(f));
    }
    assert_eq!("jsonl".parse::<ReportFormat>(), Ok(ReportFormat::JsonLines));
    assert!("xml".parse::<ReportFormat>().is_err());
}

#[test]
fn record_then_replay() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rec");
    let live = MockBackend::new("```\nplay_voice(\"hi\")\n```").timing(Timing::from_ms(12.5, 80.0));
    let table = default_stub_table();
    let corpus = [intention("say hi")];
    let h = Harness::new(&live, &table).unwrap();
    let (set, recorded) = h
        .record_fixtures(&corpus, 2, &out, false, &mut ConsentPolicy::AutoDeny)
        .unwrap();
    assert_eq!(set.trial_count(1), 2);
    assert!(set.timing_path(Slot::new(1, 2)).is_file());

    let replay = ReplayBackend::new(set);
    let h = Harness::new(&replay, &table).unwrap();
    let replayed = h.run_bench(&corpus, 2, &mut ConsentPolicy::AutoDeny).unwrap();
    for (a, b) in recorded.trials.iter().zip(&replayed.trials) {
        assert!(a.same_outcome(b), "{a:?}\n{b:?}");
    }

    let h = Harness::new(&live, &table).unwrap();
    let err = h.record_fixtures(&corpus, 1, &out, false, &mut ConsentPolicy::AutoDeny).unwrap_err();
    assert!(matches!(err, HarnessError::OutputNotEmpty(_)));
    assert!(h.record_fixtures(&corpus, 1, &out, true, &mut ConsentPolicy::AutoDeny).is_ok());
}
