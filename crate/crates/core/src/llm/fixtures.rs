use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Duration;

use super::{
    duration_to_ms, ms_to_duration, Backend, BackendError, GenerationRequest, GenerationResult, Slot,
};

/// Recorded timings of one generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Timing {
    pub ttft: Duration,
    pub total: Duration,
}

impl Timing {
    pub fn from_ms(ttft_ms: f64, total_ms: f64) -> Self {
        Timing {
            ttft: ms_to_duration(ttft_ms),
            total: ms_to_duration(total_ms),
        }
    }

    fn parse(text: &str) -> Result<Self, String> {
        let mut nums = text.lines().map(str::trim).filter(|l| !l.is_empty()).map(|l| {
            l.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite() && *v >= 0.0)
                .ok_or_else(|| format!("`{l}` is not a non-negative number of milliseconds"))
        });
        let ttft = nums.next().ok_or("missing ttft line")??;
        let total = nums.next().ok_or("missing total line")??;
        if nums.next().is_some() {
            return Err("expected exactly two lines".into());
        }
        if ttft > total {
            return Err(format!("ttft {ttft} ms exceeds total {total} ms"));
        }
        Ok(Timing::from_ms(ttft, total))
    }

    fn render(&self) -> String {
        format!("{}\n{}\n", duration_to_ms(self.ttft), duration_to_ms(self.total))
    }
}

/// A directory of recorded model outputs laid out as
/// `intention-<i>/trial-<j>.txt` with optional `trial-<j>.timing` sidecars
/// holding the time to first token and the total time in milliseconds, one
/// per line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixtureSet {
    root: PathBuf,
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> BackendError + '_ {
    move |source| BackendError::Io {
        path: path.to_path_buf(),
        source,
    }
}

impl FixtureSet {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        FixtureSet { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn intention_dir(&self, intention: usize) -> PathBuf {
        self.root.join(format!("intention-{intention}"))
    }

    pub fn trial_path(&self, slot: Slot) -> PathBuf {
        self.intention_dir(slot.intention).join(format!("trial-{}.txt", slot.trial))
    }

    pub fn timing_path(&self, slot: Slot) -> PathBuf {
        self.intention_dir(slot.intention).join(format!("trial-{}.timing", slot.trial))
    }

    /// Reads a fixture. A missing sidecar yields zero timings.
    pub fn load(&self, slot: Slot) -> Result<(String, Timing), BackendError> {
        let path = self.trial_path(slot);
        let raw = match fs::read_to_string(&path) {
            Ok(raw) => raw,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Err(BackendError::FixtureMissing(path)),
            Err(e) => return Err(io_err(&path)(e)),
        };
        let tpath = self.timing_path(slot);
        let timing = match fs::read_to_string(&tpath) {
            Ok(text) => Timing::parse(&text).map_err(|reason| BackendError::BadFixture { path: tpath, reason })?,
            Err(e) if e.kind() == io::ErrorKind::NotFound => Timing::default(),
            Err(e) => return Err(io_err(&tpath)(e)),
        };
        Ok((raw, timing))
    }

    pub fn write(&self, slot: Slot, raw_text: &str, timing: Timing) -> Result<(), BackendError> {
        let dir = self.intention_dir(slot.intention);
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        let path = self.trial_path(slot);
        fs::write(&path, raw_text).map_err(io_err(&path))?;
        let tpath = self.timing_path(slot);
        fs::write(&tpath, timing.render()).map_err(io_err(&tpath))
    }

    /// Number of contiguous trials recorded for an intention, counting from 1.
    pub fn trial_count(&self, intention: usize) -> usize {
        (1..).take_while(|&j| self.trial_path(Slot::new(intention, j)).is_file()).count()
    }

    /// Number of contiguous intention directories, counting from 1.
    pub fn intention_count(&self) -> usize {
        (1..).take_while(|&i| self.intention_dir(i).is_dir()).count()
    }

    /// Fails with the first missing slot in intention-major order.
    pub fn check(&self, intentions: usize, trials: usize) -> Result<(), BackendError> {
        if !self.root.is_dir() {
            return Err(BackendError::FixtureMissing(self.root.clone()));
        }
        for i in 1..=intentions {
            for j in 1..=trials {
                let path = self.trial_path(Slot::new(i, j));
                if !path.is_file() {
                    return Err(BackendError::FixtureMissing(path));
                }
            }
        }
        Ok(())
    }
}

/// Serves recorded outputs and timings from a [`FixtureSet`].
#[derive(Debug, Clone)]
pub struct ReplayBackend {
    fixtures: FixtureSet,
}

impl ReplayBackend {
    pub fn new(fixtures: FixtureSet) -> Self {
        ReplayBackend { fixtures }
    }

    pub fn open(root: impl Into<PathBuf>) -> Self {
        ReplayBackend::new(FixtureSet::new(root))
    }

    pub fn fixtures(&self) -> &FixtureSet {
        &self.fixtures
    }
}

impl Backend for ReplayBackend {
    fn name(&self) -> &str {
        "replay"
    }

    fn generate(&self, request: &GenerationRequest<'_>) -> Result<GenerationResult, BackendError> {
        let (raw_text, timing) = self.fixtures.load(request.slot)?;
        if raw_text.is_empty() {
            return Err(BackendError::EmptyResponse);
        }
        Ok(GenerationResult {
            raw_text,
            ttft: timing.ttft,
            total_time: timing.total,
        })
    }

    fn check_slots(&self, intentions: usize, trials: usize) -> Result<(), BackendError> {
        self.fixtures.check(intentions, trials)
    }
}
