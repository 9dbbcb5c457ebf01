use super::*;
use crate::consent::ConsentPolicy;
use crate::script::parse_source;
use crate::stubs::default_stub_table;
use crate::trace::trace_text;

const SAMPLE: &str = include_str!("../../fixtures/bench/intention-1/trial-1.txt");
const GOLDEN: &str = include_str!("../../fixtures/golden_trace.txt");

fn run_with(src: &str, limits: Limits) -> ExecutionResult {
    let prog = parse_source(src).unwrap_or_else(|e| panic!("{src:?}: {e}"));
    execute(&prog, &default_stub_table(), limits, &mut ConsentPolicy::AutoDeny)
}

fn run(src: &str) -> ExecutionResult {
    run_with(src, Limits::default())
}

fn kind(src: &str) -> Option<FailureKind> {
    run(src).failure_kind()
}

/// Runs `src` and returns what `print_screen` was last called with.
fn printed(src: &str) -> String {
    let r = run(src);
    assert!(r.is_success(), "{src:?}: {:?}", r.status);
    let last = r.trace.iter().rev().find(|e| e.function == "print_screen").expect("print_screen call");
    match &last.args[0] {
        Value::Str(s) => s.clone(),
        other => panic!("{other:?}"),
    }
}

#[test]
fn golden_trace() {
    let r = run(SAMPLE);
    assert_eq!(r.status, Status::Success);
    assert_eq!(trace_text(&r.trace), GOLDEN);
}

#[test]
fn import_is_unauthorized() {
    let r = run("import os\nprint_screen(\"x\")");
    assert_eq!(r.failure_kind(), Some(FailureKind::UnauthorizedAccess));
    assert!(r.trace.is_empty());
    let Status::Failure { line, .. } = r.status else { unreachable!() };
    assert_eq!(line, 1);
}

#[test]
fn unknown_function_is_unauthorized() {
    assert_eq!(kind("open(\"f\")"), Some(FailureKind::UnauthorizedAccess));
    assert_eq!(kind("print(1)"), Some(FailureKind::UnauthorizedAccess));
    // callee is rejected before its arguments run
    let r = run("eval(play_voice(\"x\"))");
    assert!(r.trace.is_empty());
}

#[test]
fn unbound_name_is_scoping_violation() {
    let r = run("x = 1\nprint_screen(y)");
    assert_eq!(r.failure_kind(), Some(FailureKind::ScopingViolation));
    let Status::Failure { line, .. } = r.status else { unreachable!() };
    assert_eq!(line, 2);
    assert_eq!(kind("x += 1"), Some(FailureKind::ScopingViolation));
    assert_eq!(kind("y.append(1)"), Some(FailureKind::ScopingViolation));
}

#[test]
fn conditional_binding_then_read() {
    let src = "home_listing = shell(\"ls ~\")\nif home_listing is None:\n    files = \"none\"\nprint_screen(files)";
    let prog = parse_source(src).unwrap();
    let r = execute(&prog, &default_stub_table(), Limits::default(), &mut ConsentPolicy::AutoAllow);
    assert_eq!(r.failure_kind(), Some(FailureKind::ScopingViolation));
    assert_eq!(r.trace_lines(), ["Execute \"shell\" and arguments \"ls ~\""]);
}

#[test]
fn infinite_loop_hits_step_limit() {
    let r = run_with("while True:\n    pass", Limits::default().with_max_steps(100));
    assert_eq!(r.failure_kind(), Some(FailureKind::StepLimitExceeded));
    assert_eq!(r.steps_used, 100);
}

#[test]
fn step_accounting() {
    // one statement plus one expression
    assert_eq!(run("x = 1").steps_used, 2);
    // statement, binary, two operands
    assert_eq!(run("x = 1 + 2").steps_used, 4);
    assert_eq!(run("").steps_used, 0);
    let r = run_with("x = 1 + 2", Limits::default().with_max_steps(4));
    assert!(r.is_success());
    let r = run_with("x = 1 + 2", Limits::default().with_max_steps(3));
    assert_eq!(r.failure_kind(), Some(FailureKind::StepLimitExceeded));
}

#[test]
fn privileged_denied() {
    let r = run("x = shell(\"ls\")");
    assert_eq!(r.failure_kind(), Some(FailureKind::PrivilegedDenied));
    assert!(r.trace.is_empty());
}

#[test]
fn type_errors() {
    assert_eq!(kind("find_file_id(1)"), Some(FailureKind::TypeError));
    assert_eq!(kind("find_file_id()"), Some(FailureKind::TypeError));
    assert_eq!(kind("x = 1 + \"a\""), Some(FailureKind::TypeError));
    assert_eq!(kind("x = \"a\" - \"b\""), Some(FailureKind::TypeError));
    assert_eq!(kind("x = [1] < [2]"), Some(FailureKind::TypeError));
    assert_eq!(kind("x = [1][3]"), Some(FailureKind::TypeError));
    assert_eq!(kind("x = 1[0]"), Some(FailureKind::TypeError));
    assert_eq!(kind("x = 1\nx.append(2)"), Some(FailureKind::TypeError));
    assert_eq!(kind("x = [1]\nx.pop()"), Some(FailureKind::TypeError));
    assert_eq!(kind("for c in 5:\n    pass"), Some(FailureKind::TypeError));
    assert_eq!(kind("x = 9223372036854775807 + 1"), Some(FailureKind::TypeError));
    assert_eq!(kind("x = 1 in 2"), Some(FailureKind::TypeError));
}

#[test]
fn division() {
    assert_eq!(kind("x = 1 / 0"), Some(FailureKind::DivisionByZero));
    assert_eq!(printed("print_screen(str(7 / 2))"), "3");
    assert_eq!(printed("print_screen(str(-7 / 2))"), "-3");
}

#[test]
fn resource_limits() {
    let limits = Limits {
        max_list_len: 3,
        ..Limits::default()
    };
    let r = run_with("x = []\nwhile True:\n    x.append(1)", limits);
    assert_eq!(r.failure_kind(), Some(FailureKind::ResourceLimitExceeded));
    let r = run_with("x = [1, 2] + [3, 4]", limits);
    assert_eq!(r.failure_kind(), Some(FailureKind::ResourceLimitExceeded));
    let limits = Limits {
        max_string_len: 8,
        ..Limits::default()
    };
    let r = run_with("s = \"ab\"\nwhile True:\n    s += s", limits);
    assert_eq!(r.failure_kind(), Some(FailureKind::ResourceLimitExceeded));
}

#[test]
fn truthiness_and_short_circuit() {
    assert_eq!(printed("if []:\n    print_screen(\"a\")\nelse:\n    print_screen(\"b\")"), "b");
    assert_eq!(printed("if \"\" or 0 or None:\n    print_screen(\"a\")\nelse:\n    print_screen(\"b\")"), "b");
    assert_eq!(printed("print_screen(\"\" or \"x\")"), "x");
    assert_eq!(printed("print_screen(\"y\" and \"x\")"), "x");
    // rhs is never evaluated
    let r = run("x = False and undefined_name");
    assert!(r.is_success());
    assert_eq!(printed("if not None:\n    print_screen(\"t\")"), "t");
}

#[test]
fn loops_and_control_flow() {
    let src = "\
total = 0
for i in range(10):
    if i == 2:
        continue
    if i == 5:
        break
    total += i
print_screen(str(total))";
    assert_eq!(printed(src), "8");
    let src = "\
n = 0
while True:
    n += 1
    if n >= 3:
        break
print_screen(f\"n={n}\")";
    assert_eq!(printed(src), "n=3");
    let src = "out = \"\"\nfor c in \"abc\":\n    out = c + out\nprint_screen(out)";
    assert_eq!(printed(src), "cba");
}

#[test]
fn lists_have_value_semantics() {
    let src = "\
a = [1]
b = a
b.append(2)
print_screen(str([len(a), len(b)]))";
    assert_eq!(printed(src), "[1, 2]");
    let src = "\
grid = [[], []]
grid[1].append(\"x\")
grid[-1].append(\"y\")
print_screen(str(grid))";
    assert_eq!(printed(src), "[[], [\"x\", \"y\"]]");
}

#[test]
fn rendering_in_fstrings() {
    assert_eq!(
        printed("x = None\ny = [1, \"a\", True]\nprint_screen(f\"{x} {y} {len(y)}\")"),
        "None [1, \"a\", True] 3"
    );
    assert_eq!(printed("print_screen(\"abc\"[-1])"), "c");
    assert_eq!(printed("print_screen(str(\"b\" in \"abc\"))"), "True");
    assert_eq!(printed("print_screen(str(2 in [1, 2]))"), "True");
    assert_eq!(printed("print_screen(str(int(\"12\") * 2))"), "24");
}

#[test]
fn builtins_can_be_disabled() {
    let prog = parse_source("x = len([1])").unwrap();
    let table = default_stub_table();
    let r = Executor::new(&table)
        .with_builtins(Builtins::none())
        .run(&prog, &mut ConsentPolicy::AutoDeny);
    assert_eq!(r.failure_kind(), Some(FailureKind::UnauthorizedAccess));
}

#[test]
fn sink_sees_events_live() {
    let prog = parse_source(SAMPLE).unwrap();
    let table = default_stub_table();
    let mut seen = Vec::new();
    let r = Executor::new(&table).run_with_sink(&prog, &mut ConsentPolicy::AutoDeny, &mut seen);
    assert_eq!(seen, r.trace);
}

#[test]
fn limits_validate() {
    assert!(Limits::new(0, 1, 1).is_err());
    assert!(Limits::new(1, 1, 1).is_ok());
}
