use std::thread;

use super::{Backend, BackendError, GenerationRequest, GenerationResult, StreamTimer, Timing};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimingMode {
    /// Report the configured timings without waiting.
    #[default]
    Simulated,
    /// Sleep for the configured delays and report what was measured.
    RealTime,
}

/// Scripted backend. The reply for intention `i` is `replies[(i - 1) % len]`.
#[derive(Debug, Clone)]
pub struct MockBackend {
    replies: Vec<String>,
    timing: Timing,
    mode: TimingMode,
}

impl MockBackend {
    pub fn new(reply: impl Into<String>) -> Self {
        MockBackend::with_replies(vec![reply.into()])
    }

    pub fn with_replies(replies: Vec<String>) -> Self {
        MockBackend {
            replies,
            timing: Timing::default(),
            mode: TimingMode::Simulated,
        }
    }

    pub fn timing(mut self, timing: Timing) -> Self {
        self.timing = timing;
        self
    }

    pub fn mode(mut self, mode: TimingMode) -> Self {
        self.mode = mode;
        self
    }

    fn reply_for(&self, intention: usize) -> &str {
        if self.replies.is_empty() {
            return "";
        }
        &self.replies[intention.saturating_sub(1) % self.replies.len()]
    }
}

impl Backend for MockBackend {
    fn name(&self) -> &str {
        "mock"
    }

    fn generate(&self, request: &GenerationRequest<'_>) -> Result<GenerationResult, BackendError> {
        let raw_text = self.reply_for(request.slot.intention).to_string();
        let (ttft, total_time) = match self.mode {
            TimingMode::Simulated => (self.timing.ttft, self.timing.total),
            TimingMode::RealTime => {
                let mut timer = StreamTimer::start();
                thread::sleep(self.timing.ttft);
                timer.mark_content();
                thread::sleep(self.timing.total.saturating_sub(self.timing.ttft));
                timer.finish()
            }
        };
        if raw_text.is_empty() {
            return Err(BackendError::EmptyResponse);
        }
        Ok(GenerationResult {
            raw_text,
            ttft,
            total_time,
        })
    }
}

#[cfg(test)]
mod tests {
    use std::time::Duration;

    use super::*;
    use crate::llm::{GenerationParams, Slot};
    use crate::prompting::PromptBundle;

    fn gen(b: &MockBackend, intention: usize) -> Result<GenerationResult, BackendError> {
        let prompt = PromptBundle {
            role: String::new(),
            body: String::new(),
        };
        b.generate(&GenerationRequest {
            prompt: &prompt,
            params: &GenerationParams::default(),
            slot: Slot::new(intention, 1),
        })
    }

    #[test]
    fn simulated_reports_configured_timings() {
        let b = MockBackend::new("x = 1").timing(Timing::from_ms(466.0, 3310.0));
        let r = gen(&b, 1).unwrap();
        assert_eq!(r.raw_text, "x = 1");
        assert_eq!(r.ttft, Duration::from_millis(466));
        assert_eq!(r.total_time, Duration::from_millis(3310));
    }

    #[test]
    fn real_time_measures() {
        let b = MockBackend::new("x").timing(Timing::from_ms(20.0, 40.0)).mode(TimingMode::RealTime);
        let r = gen(&b, 1).unwrap();
        assert!(r.ttft >= Duration::from_millis(20));
        assert!(r.total_time >= Duration::from_millis(40));
        assert!(r.ttft <= r.total_time);
    }

    #[test]
    fn replies_cycle_by_intention() {
        let b = MockBackend::with_replies(vec!["a".into(), "b".into()]);
        assert_eq!(gen(&b, 1).unwrap().raw_text, "a");
        assert_eq!(gen(&b, 2).unwrap().raw_text, "b");
        assert_eq!(gen(&b, 3).unwrap().raw_text, "a");
        assert!(matches!(gen(&MockBackend::new(""), 1), Err(BackendError::EmptyResponse)));
    }
}
