//! Code-generation backends and extraction of code from model output.

mod extract;
mod fixtures;
mod http;
mod mock;

use std::path::PathBuf;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::prompting::PromptBundle;

pub use extract::{extract_code, NoCode};
pub use fixtures::{FixtureSet, ReplayBackend, Timing};
pub use http::{HttpBackend, HttpConfig};
pub use mock::{MockBackend, TimingMode};

pub const DEFAULT_MODEL: &str = "gpt-4o-mini";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationParams {
    pub model: String,
    pub temperature: f64,
    pub max_tokens: u32,
    #[serde(with = "millis")]
    pub timeout: Duration,
}

impl Default for GenerationParams {
    fn default() -> Self {
        GenerationParams {
            model: DEFAULT_MODEL.to_string(),
            temperature: 0.2,
            max_tokens: 1024,
            timeout: Duration::from_secs(60),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid generation parameter `{field}`: {reason}")]
pub struct ParamsError {
    pub field: &'static str,
    pub reason: &'static str,
}

impl GenerationParams {
    pub fn with_model(mut self, model: impl Into<String>) -> Self {
        self.model = model.into();
        self
    }

    pub fn validate(&self) -> Result<(), ParamsError> {
        if self.model.trim().is_empty() {
            return Err(ParamsError { field: "model", reason: "must not be empty" });
        }
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return Err(ParamsError { field: "temperature", reason: "must be a finite number >= 0" });
        }
        if self.max_tokens == 0 {
            return Err(ParamsError { field: "max_tokens", reason: "must be positive" });
        }
        if self.timeout.is_zero() {
            return Err(ParamsError { field: "timeout", reason: "must be positive" });
        }
        Ok(())
    }
}

/// A 1-based (intention, trial) coordinate. Replay backends use it to pick a
/// fixture; live backends ignore it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Slot {
    pub intention: usize,
    pub trial: usize,
}

impl Slot {
    pub fn new(intention: usize, trial: usize) -> Self {
        Slot { intention, trial }
    }
}

pub struct GenerationRequest<'a> {
    pub prompt: &'a PromptBundle,
    pub params: &'a GenerationParams,
    pub slot: Slot,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationResult {
    pub raw_text: String,
    pub ttft: Duration,
    pub total_time: Duration,
}

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("network error: {0}")]
    NetworkError(String),
    #[error("authentication error: {0}")]
    AuthError(String),
    #[error("backend returned an empty response")]
    EmptyResponse,
    #[error("fixture missing: {}", .0.display())]
    FixtureMissing(PathBuf),
    #[error("malformed fixture {}: {reason}", .path.display())]
    BadFixture { path: PathBuf, reason: String },
    #[error("i/o error on {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Params(#[from] ParamsError),
}

/// A source of generated code.
pub trait Backend: Send + Sync {
    fn name(&self) -> &str;

    fn generate(&self, request: &GenerationRequest<'_>) -> Result<GenerationResult, BackendError>;

    /// Fails fast if a run over `intentions` x `trials` slots cannot be
    /// served. Live backends accept anything.
    fn check_slots(&self, _intentions: usize, _trials: usize) -> Result<(), BackendError> {
        Ok(())
    }
}

impl<B: Backend + ?Sized> Backend for Box<B> {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn generate(&self, request: &GenerationRequest<'_>) -> Result<GenerationResult, BackendError> {
        (**self).generate(request)
    }

    fn check_slots(&self, intentions: usize, trials: usize) -> Result<(), BackendError> {
        (**self).check_slots(intentions, trials)
    }
}

/// Measures time to first content and time to end of stream from a single
/// dispatch instant.
#[derive(Debug)]
pub(crate) struct StreamTimer {
    start: Instant,
    first: Option<Duration>,
}

impl StreamTimer {
    pub(crate) fn start() -> Self {
        StreamTimer { start: Instant::now(), first: None }
    }

    pub(crate) fn mark_content(&mut self) {
        if self.first.is_none() {
            self.first = Some(self.start.elapsed());
        }
    }

    /// Returns `(ttft, total)`. With no content seen, ttft equals total.
    pub(crate) fn finish(self) -> (Duration, Duration) {
        let total = self.start.elapsed();
        (self.first.unwrap_or(total), total)
    }
}

pub(crate) fn ms_to_duration(ms: f64) -> Duration {
    Duration::from_nanos((ms * 1e6).round() as u64)
}

pub(crate) fn duration_to_ms(d: Duration) -> f64 {
    d.as_nanos() as f64 / 1e6
}

mod millis {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_millis() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        u64::deserialize(d).map(Duration::from_millis)
    }
}
