//! Benchmark protocol: run each intention through the full pipeline a number
//! of times, classify every outcome, and aggregate timings.

mod corpus;
mod report;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::consent::Consent;
use crate::executor::{Builtins, Executor, FailureKind, Limits, Status};
use crate::function_table::FunctionTable;
use crate::llm::{
    extract_code, Backend, BackendError, FixtureSet, GenerationParams, GenerationRequest, GenerationResult, Slot,
    Timing,
};
use crate::prompting::{render_prompt, Intention, PromptBundle};
use crate::script::{parse_source, ScriptError};
use crate::trace::{NullSink, TraceSink};

pub use corpus::{corpus_index, default_corpus, load_corpus, parse_corpus, DEFAULT_INTENTIONS};
pub use report::{render_report, BenchReport, EmptyReport, ReportFormat, ReportRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FailureClass {
    UnauthorizedAccess,
    ScopingViolation,
    Syntax,
    Lex,
    Unsupported,
    TypeError,
    DivisionByZero,
    StepLimit,
    ResourceLimit,
    PrivilegedDenied,
    BackendError,
    NoCode,
}

impl fmt::Display for FailureClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl From<FailureKind> for FailureClass {
    fn from(k: FailureKind) -> Self {
        match k {
            FailureKind::UnauthorizedAccess => FailureClass::UnauthorizedAccess,
            FailureKind::ScopingViolation => FailureClass::ScopingViolation,
            FailureKind::TypeError => FailureClass::TypeError,
            FailureKind::DivisionByZero => FailureClass::DivisionByZero,
            FailureKind::StepLimitExceeded => FailureClass::StepLimit,
            FailureKind::ResourceLimitExceeded => FailureClass::ResourceLimit,
            FailureKind::PrivilegedDenied => FailureClass::PrivilegedDenied,
        }
    }
}

impl From<&ScriptError> for FailureClass {
    fn from(e: &ScriptError) -> Self {
        match e {
            ScriptError::Lex { .. } => FailureClass::Lex,
            ScriptError::Syntax { .. } => FailureClass::Syntax,
            ScriptError::Unsupported { .. } => FailureClass::Unsupported,
        }
    }
}

/// Outcome of one pass through the pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub intention_index: usize,
    pub trial_index: usize,
    pub intention: String,
    pub success: bool,
    pub failure_class: Option<FailureClass>,
    pub failure_message: Option<String>,
    #[serde(rename = "response_time_ms", with = "ms")]
    pub response_time: Duration,
    #[serde(rename = "ttft_ms", with = "ms")]
    pub ttft: Duration,
    /// Wall time spent executing the generated code. Not part of the
    /// response time.
    #[serde(rename = "execution_ms", with = "ms")]
    pub execution_time: Duration,
    pub code: String,
    pub trace: Vec<String>,
}

impl TrialRecord {
    /// Equality ignoring execution wall time.
    pub fn same_outcome(&self, other: &TrialRecord) -> bool {
        TrialRecord {
            execution_time: Duration::ZERO,
            ..self.clone()
        } == TrialRecord {
            execution_time: Duration::ZERO,
            ..other.clone()
        }
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("the function table is empty")]
    EmptyTable,
    #[error("trials per intention must be at least 1")]
    NoTrials,
    #[error("the intention corpus is empty")]
    EmptyCorpus,
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error("refusing to overwrite non-empty directory {} (use force)", .0.display())]
    OutputNotEmpty(PathBuf),
    #[error("i/o error on {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Pipeline wiring shared by every trial.
pub struct Harness<'a> {
    backend: &'a dyn Backend,
    table: &'a FunctionTable,
    params: GenerationParams,
    limits: Limits,
    builtins: Builtins,
}

impl<'a> Harness<'a> {
    pub fn new(backend: &'a dyn Backend, table: &'a FunctionTable) -> Result<Self, HarnessError> {
        if table.is_empty() {
            return Err(HarnessError::EmptyTable);
        }
        Ok(Harness {
            backend,
            table,
            params: GenerationParams::default(),
            limits: Limits::default(),
            builtins: Builtins::default(),
        })
    }

    pub fn params(mut self, params: GenerationParams) -> Self {
        self.params = params;
        self
    }

    pub fn limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub fn builtins(mut self, builtins: Builtins) -> Self {
        self.builtins = builtins;
        self
    }

    fn prompt(&self, intention: &Intention) -> PromptBundle {
        render_prompt(intention, self.table).expect("table checked non-empty at construction")
    }

    fn generate(&self, intention: &Intention, slot: Slot) -> Result<GenerationResult, BackendError> {
        let prompt = self.prompt(intention);
        self.backend.generate(&GenerationRequest {
            prompt: &prompt,
            params: &self.params,
            slot,
        })
    }

    /// render, generate, extract, parse, execute. Never fails; every problem
    /// is recorded in the returned record.
    pub fn run_trial(&self, intention: &Intention, slot: Slot, consent: &mut dyn Consent) -> TrialRecord {
        self.run_trial_with_sink(intention, slot, consent, &mut NullSink)
    }

    /// Like [`run_trial`](Self::run_trial), forwarding trace events to `sink`
    /// as they happen.
    pub fn run_trial_with_sink(
        &self,
        intention: &Intention,
        slot: Slot,
        consent: &mut dyn Consent,
        sink: &mut dyn TraceSink,
    ) -> TrialRecord {
        let generated = self.generate(intention, slot);
        self.finish_trial(intention, slot, generated, consent, sink)
    }

    fn finish_trial(
        &self,
        intention: &Intention,
        slot: Slot,
        generated: Result<GenerationResult, BackendError>,
        consent: &mut dyn Consent,
        sink: &mut dyn TraceSink,
    ) -> TrialRecord {
        let mut rec = TrialRecord {
            intention_index: slot.intention,
            trial_index: slot.trial,
            intention: intention.text().to_string(),
            success: false,
            failure_class: None,
            failure_message: None,
            response_time: Duration::ZERO,
            ttft: Duration::ZERO,
            execution_time: Duration::ZERO,
            code: String::new(),
            trace: Vec::new(),
        };
        let fail = |mut rec: TrialRecord, class: FailureClass, msg: String| {
            rec.failure_class = Some(class);
            rec.failure_message = Some(msg);
            rec
        };

        let generated = match generated {
            Ok(g) => g,
            Err(e) => return fail(rec, FailureClass::BackendError, e.to_string()),
        };
        rec.response_time = generated.total_time;
        rec.ttft = generated.ttft;
        rec.code = match extract_code(&generated.raw_text) {
            Ok(code) => code,
            Err(e) => return fail(rec, FailureClass::NoCode, e.to_string()),
        };
        let program = match parse_source(&rec.code) {
            Ok(p) => p,
            Err(e) => return fail(rec, FailureClass::from(&e), e.to_string()),
        };

        let started = Instant::now();
        let result = Executor::new(self.table)
            .with_limits(self.limits)
            .with_builtins(self.builtins.clone())
            .run_with_sink(&program, consent, sink);
        rec.execution_time = started.elapsed();
        rec.trace = result.trace.iter().map(|e| e.rendered.clone()).collect();
        match result.status {
            Status::Success => {
                rec.success = true;
                rec
            }
            Status::Failure { kind, message, line } => {
                fail(rec, kind.into(), format!("line {line}: {message}"))
            }
        }
    }

    /// Runs every intention `trials` times, intention-major, one trial at a
    /// time. Intention `i` (1-based) uses slots `(i, 1..=trials)`.
    pub fn run_bench(
        &self,
        intentions: &[Intention],
        trials: usize,
        consent: &mut dyn Consent,
    ) -> Result<BenchReport, HarnessError> {
        if trials == 0 {
            return Err(HarnessError::NoTrials);
        }
        if intentions.is_empty() {
            return Err(HarnessError::EmptyCorpus);
        }
        self.backend.check_slots(intentions.len(), trials)?;
        let mut records = Vec::with_capacity(intentions.len() * trials);
        for (i, intention) in intentions.iter().enumerate() {
            for j in 1..=trials {
                records.push(self.run_trial(intention, Slot::new(i + 1, j), consent));
            }
        }
        Ok(BenchReport::from_trials(records))
    }

    /// Runs the bench against the configured (live) backend and writes each
    /// generation to `out_dir` as a replayable fixture.
    ///
    /// A non-empty `out_dir` is refused unless `force` is set. Any backend
    /// error aborts the recording.
    pub fn record_fixtures(
        &self,
        intentions: &[Intention],
        trials: usize,
        out_dir: &Path,
        force: bool,
        consent: &mut dyn Consent,
    ) -> Result<(FixtureSet, BenchReport), HarnessError> {
        if trials == 0 {
            return Err(HarnessError::NoTrials);
        }
        if intentions.is_empty() {
            return Err(HarnessError::EmptyCorpus);
        }
        let io = |source| HarnessError::Io {
            path: out_dir.to_path_buf(),
            source,
        };
        if out_dir.exists() && !force && fs::read_dir(out_dir).map_err(io)?.next().is_some() {
            return Err(HarnessError::OutputNotEmpty(out_dir.to_path_buf()));
        }
        let fixtures = FixtureSet::new(out_dir);
        let mut records = Vec::new();
        for (i, intention) in intentions.iter().enumerate() {
            for j in 1..=trials {
                let slot = Slot::new(i + 1, j);
                let generated = self.generate(intention, slot)?;
                let timing = Timing {
                    ttft: generated.ttft,
                    total: generated.total_time,
                };
                fixtures.write(slot, &generated.raw_text, timing)?;
                records.push(self.finish_trial(intention, slot, Ok(generated), consent, &mut NullSink));
            }
        }
        Ok((fixtures, BenchReport::from_trials(records)))
    }
}

pub(crate) mod ms {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_nanos() as f64 / 1e6)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let v = f64::deserialize(d)?;
        if !(v.is_finite() && v >= 0.0) {
            return Err(serde::de::Error::custom("duration must be a non-negative number of ms"));
        }
        Ok(Duration::from_nanos((v * 1e6).round() as u64))
    }
}

#[cfg(test)]
mod tests;
