//! Prompt rendering.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::function_table::{FunctionTable, TableError};

/// System role sent alongside every prompt.
pub const DEFAULT_ROLE: &str = "You are a Python 3 code generator";

const HEADER: &str = "You have the following application programming interface:";
const INSTRUCTION: &str =
    "Write Python 3 code only, which uses the application programming interface for the instruction";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PromptError {
    #[error("intention is empty")]
    EmptyIntention,
    #[error("function table is empty")]
    EmptyTable,
}

impl From<TableError> for PromptError {
    fn from(_: TableError) -> Self {
        PromptError::EmptyTable
    }
}

/// A user's goal in natural language. Never blank.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Intention(String);

impl Intention {
    pub fn new(text: impl Into<String>) -> Result<Self, PromptError> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(PromptError::EmptyIntention);
        }
        Ok(Intention(text))
    }

    pub fn text(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Intention {
    type Error = PromptError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        Intention::new(s)
    }
}

impl From<Intention> for String {
    fn from(i: Intention) -> Self {
        i.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptBundle {
    /// System message.
    pub role: String,
    /// User message.
    pub body: String,
}

/// Builds the prompt for `intention`. The intention is substituted verbatim,
/// without escaping.
pub fn render_prompt(intention: &Intention, table: &FunctionTable) -> Result<PromptBundle, PromptError> {
    let docs = table.render_docs()?;
    let body = format!("{HEADER}\n\n{docs}\n\n{INSTRUCTION}\n\"{}\"", intention.text());
    Ok(PromptBundle {
        role: DEFAULT_ROLE.to_owned(),
        body,
    })
}
