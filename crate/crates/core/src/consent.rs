//! Consent gate for privileged functions.
//!
//! Functions flagged privileged in the table (by default only `shell`) are
//! never run without passing through a [`Consent`] decision.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Decides whether a privileged function may run.
pub trait Consent {
    fn approve(&mut self, function: &str) -> bool;
}

/// How privileged calls are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConsentPolicy {
    AutoAllow,
    AutoDeny,
    /// Ask the user once per privileged function per execution.
    Interactive,
}

impl ConsentPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            ConsentPolicy::AutoAllow => "auto-allow",
            ConsentPolicy::AutoDeny => "auto-deny",
            ConsentPolicy::Interactive => "interactive",
        }
    }
}

impl fmt::Display for ConsentPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConsentPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto-allow" => Ok(ConsentPolicy::AutoAllow),
            "auto-deny" => Ok(ConsentPolicy::AutoDeny),
            "interactive" => Ok(ConsentPolicy::Interactive),
            other => Err(format!(
                "unknown consent policy `{other}` (expected auto-allow, auto-deny or interactive)"
            )),
        }
    }
}

/// Non-interactive policies answer directly. `Interactive` without a
/// prompter denies.
impl Consent for ConsentPolicy {
    fn approve(&mut self, _function: &str) -> bool {
        matches!(self, ConsentPolicy::AutoAllow)
    }
}

/// Asks a prompter the first time each privileged function is reached and
/// remembers the answer for the rest of the run.
pub struct InteractiveConsent<F> {
    prompter: F,
    decisions: HashMap<String, bool>,
}

impl<F: FnMut(&str) -> bool> InteractiveConsent<F> {
    pub fn new(prompter: F) -> Self {
        InteractiveConsent {
            prompter,
            decisions: HashMap::new(),
        }
    }

    /// Number of times the prompter was consulted.
    pub fn prompts(&self) -> usize {
        self.decisions.len()
    }
}

impl<F: FnMut(&str) -> bool> Consent for InteractiveConsent<F> {
    fn approve(&mut self, function: &str) -> bool {
        if let Some(&d) = self.decisions.get(function) {
            return d;
        }
        let d = (self.prompter)(function);
        self.decisions.insert(function.to_owned(), d);
        d
    }
}
