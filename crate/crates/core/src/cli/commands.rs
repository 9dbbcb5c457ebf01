use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::consent::{Consent, ConsentPolicy, InteractiveConsent};
use crate::executor::{Executor, Status};
use crate::harness::{corpus_index, render_report, Harness, ReportFormat, TrialRecord};
use crate::llm::{extract_code, Backend, GenerationRequest, Slot};
use crate::prompting::{render_prompt, Intention};
use crate::script::{dump_ast, parse_source};

use super::{BackendKind, Config, Io, EXIT_CONFIG, EXIT_FAILURE, EXIT_OK};

macro_rules! bail {
    ($io:expr, $($arg:tt)*) => {{
        let _ = writeln!($io.err, "error: {}", format_args!($($arg)*));
        return EXIT_CONFIG;
    }};
}

macro_rules! try_cfg {
    ($io:expr, $e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => bail!($io, "{e}"),
        }
    };
}

/// Reads one line; `None` at end of input.
fn read_line(input: &mut dyn BufRead) -> Option<String> {
    let mut line = String::new();
    match input.read_line(&mut line) {
        Ok(0) | Err(_) => None,
        Ok(_) => Some(line.trim().to_string()),
    }
}

fn confirm(input: &mut dyn BufRead, out: &mut dyn Write, question: &str) -> bool {
    let _ = write!(out, "{question} [y/N] ");
    let _ = out.flush();
    matches!(read_line(input).as_deref(), Some("y" | "Y" | "yes" | "Yes"))
}

fn status_line(record: &TrialRecord) -> String {
    match (&record.failure_class, &record.failure_message) {
        (None, _) => "status: success".to_string(),
        (Some(class), Some(msg)) => format!("status: failure {class}: {msg}"),
        (Some(class), None) => format!("status: failure {class}"),
    }
}

/// Picks the fixture slot for a single intention. Replay needs the
/// intention to be part of the corpus.
fn slot_for(cfg: &Config, text: &str, trial: usize) -> Result<Slot, String> {
    let corpus = cfg.intentions().map_err(|e| e.to_string())?;
    match (corpus_index(&corpus, text), cfg.backend) {
        (Some(i), _) => Ok(Slot::new(i, trial)),
        (None, BackendKind::Replay) => Err(format!(
            "intention {text:?} is not in the corpus, so there is no fixture to replay"
        )),
        (None, _) => Ok(Slot::new(1, trial)),
    }
}

pub fn cmd_run(cfg: &Config, text: &str, trial: usize, io: &mut Io<'_>) -> i32 {
    let intention = try_cfg!(io, Intention::new(text));
    let backend = try_cfg!(io, cfg.build_backend());
    let table = try_cfg!(io, cfg.function_table());
    let slot = try_cfg!(io, slot_for(cfg, text, trial));
    let harness = try_cfg!(io, Harness::new(&*backend, &table))
        .params(cfg.params.clone())
        .limits(cfg.limits);

    let record = {
        let Io { input, err, .. } = io;
        let mut interactive = InteractiveConsent::new(|f: &str| {
            confirm(&mut **input, &mut **err, &format!("allow privileged call `{f}`?"))
        });
        let mut policy = cfg.consent;
        let consent: &mut dyn Consent = match cfg.consent {
            ConsentPolicy::Interactive => &mut interactive,
            _ => &mut policy,
        };
        harness.run_trial(&intention, slot, consent)
    };

    let _ = writeln!(io.out, "{}", record.code);
    for line in &record.trace {
        let _ = writeln!(io.out, "{line}");
    }
    let _ = writeln!(io.out, "{}", status_line(&record));
    if let Some(path) = &cfg.out {
        let json = serde_json::to_string_pretty(&record).expect("trial records always serialize");
        if let Err(e) = fs::write(path, json + "\n") {
            bail!(io, "cannot write {}: {e}", path.display());
        }
    }
    if record.success {
        EXIT_OK
    } else {
        EXIT_FAILURE
    }
}

fn write_reports(cfg: &Config, rendered: &[(ReportFormat, String)], io: &mut Io<'_>) -> Result<(), String> {
    match (&cfg.out, rendered) {
        (None, _) => {
            for (i, (_, text)) in rendered.iter().enumerate() {
                if i > 0 {
                    let _ = writeln!(io.out);
                }
                let _ = write!(io.out, "{text}");
            }
            Ok(())
        }
        (Some(path), [(_, text)]) => fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        (Some(dir), many) => {
            fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
            for (format, text) in many {
                let path = dir.join(format!("report.{}", format.extension()));
                fs::write(&path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            }
            Ok(())
        }
    }
}

/// Runs the bench. Failed trials are results, not errors: the exit code is
/// 0 unless the harness itself could not run.
///
/// With `interactive` consent, each privileged function is asked about once
/// for the whole bench.
pub fn cmd_bench(cfg: &Config, record: Option<&Path>, force: bool, io: &mut Io<'_>) -> i32 {
    let backend = try_cfg!(io, cfg.build_backend());
    let table = try_cfg!(io, cfg.function_table());
    let intentions = try_cfg!(io, cfg.intentions());
    let harness = try_cfg!(io, Harness::new(&*backend, &table))
        .params(cfg.params.clone())
        .limits(cfg.limits);

    let result = {
        let Io { input, err, .. } = io;
        let mut interactive = InteractiveConsent::new(|f: &str| {
            confirm(&mut **input, &mut **err, &format!("allow privileged call `{f}`?"))
        });
        let mut policy = cfg.consent;
        let consent: &mut dyn Consent = match cfg.consent {
            ConsentPolicy::Interactive => &mut interactive,
            _ => &mut policy,
        };
        match record {
            Some(dir) => harness
                .record_fixtures(&intentions, cfg.trials, dir, force, consent)
                .map(|(_, report)| report),
            None => harness.run_bench(&intentions, cfg.trials, consent),
        }
    };
    let report = try_cfg!(io, result);
    let mut rendered = Vec::new();
    for &format in &cfg.formats {
        rendered.push((format, try_cfg!(io, render_report(&report, format))));
    }
    try_cfg!(io, write_reports(cfg, &rendered, io));
    EXIT_OK
}

/// Prints the prompt body exactly, with no trailing newline.
pub fn cmd_render_prompt(cfg: &Config, text: &str, table: Option<&Path>, io: &mut Io<'_>) -> i32 {
    let intention = try_cfg!(io, Intention::new(text));
    let table = match table {
        Some(path) => try_cfg!(io, super::load_table(path)),
        None => try_cfg!(io, cfg.function_table()),
    };
    let bundle = try_cfg!(io, render_prompt(&intention, &table));
    let _ = write!(io.out, "{}", bundle.body);
    let _ = io.out.flush();
    EXIT_OK
}

/// Dumps the syntax tree of a program file (raw model output is accepted;
/// fenced code is extracted first). With `execute`, also runs it against the
/// configured table and prints the trace.
pub fn cmd_trace(cfg: &Config, file: &Path, execute: bool, io: &mut Io<'_>) -> i32 {
    let raw = try_cfg!(io, fs::read_to_string(file).map_err(|e| format!("cannot read {}: {e}", file.display())));
    let table = if execute { Some(try_cfg!(io, cfg.function_table())) } else { None };

    let mut text = String::new();
    let code = match extract_code(&raw) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io.err, "{e}");
            return EXIT_FAILURE;
        }
    };
    let program = match parse_source(&code) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(io.err, "{e}");
            return EXIT_FAILURE;
        }
    };
    text.push_str(&dump_ast(&program));
    text.push('\n');

    let mut exit = EXIT_OK;
    if let Some(table) = &table {
        let mut policy = cfg.consent;
        let result = Executor::new(table).with_limits(cfg.limits).run(&program, &mut policy);
        text.push_str("--- trace\n");
        for line in result.trace_lines() {
            text.push_str(line);
            text.push('\n');
        }
        match &result.status {
            Status::Success => text.push_str("status: success\n"),
            Status::Failure { kind, message, line } => {
                text.push_str(&format!("status: failure {kind}: line {line}: {message}\n"));
                exit = EXIT_FAILURE;
            }
        }
    }

    match &cfg.out {
        Some(path) => try_cfg!(io, fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display()))),
        None => {
            let _ = write!(io.out, "{text}");
        }
    }
    exit
}

/// Interactive loop. Each intention is generated, shown, and only executed
/// after the user approves; privileged calls are confirmed individually.
/// `exit`, `quit` or end of input leaves the loop.
pub fn cmd_repl(cfg: &Config, io: &mut Io<'_>) -> i32 {
    let backend = try_cfg!(io, cfg.build_backend());
    let table = try_cfg!(io, cfg.function_table());
    loop {
        let _ = write!(io.out, "intention> ");
        let _ = io.out.flush();
        let Some(line) = read_line(io.input) else {
            let _ = writeln!(io.out);
            return EXIT_OK;
        };
        match line.as_str() {
            "" => continue,
            "exit" | "quit" => return EXIT_OK,
            _ => {}
        }
        if let Err(msg) = repl_step(cfg, &*backend, &table, &line, io) {
            let _ = writeln!(io.out, "error: {msg}");
        }
    }
}

fn repl_step(
    cfg: &Config,
    backend: &dyn Backend,
    table: &crate::function_table::FunctionTable,
    text: &str,
    io: &mut Io<'_>,
) -> Result<(), String> {
    let intention = Intention::new(text).map_err(|e| e.to_string())?;
    let slot = slot_for(cfg, text, 1)?;
    let prompt = render_prompt(&intention, table).map_err(|e| e.to_string())?;
    let generated = backend
        .generate(&GenerationRequest {
            prompt: &prompt,
            params: &cfg.params,
            slot,
        })
        .map_err(|e| e.to_string())?;
    let code = extract_code(&generated.raw_text).map_err(|e| e.to_string())?;
    let _ = writeln!(io.out, "{code}");
    let program = parse_source(&code).map_err(|e| e.to_string())?;

    if !confirm(io.input, io.out, "execute?") {
        let _ = writeln!(io.out, "skipped");
        return Ok(());
    }

    let result = {
        let Io { input, out, .. } = io;
        let mut consent = InteractiveConsent::new(|f: &str| {
            confirm(&mut **input, &mut **out, &format!("allow privileged call `{f}`?"))
        });
        Executor::new(table).with_limits(cfg.limits).run(&program, &mut consent)
    };
    for line in result.trace_lines() {
        let _ = writeln!(io.out, "{line}");
    }
    match result.status {
        Status::Success => {
            let _ = writeln!(io.out, "status: success");
        }
        Status::Failure { kind, message, line } => {
            let _ = writeln!(io.out, "status: failure {kind}: line {line}: {message}");
        }
    }
    Ok(())
}
