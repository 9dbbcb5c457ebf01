use std::fs;
use std::path::Path;

use crate::prompting::Intention;

use super::HarnessError;

/// The four intentions of the reference experiment, in order.
pub const DEFAULT_INTENTIONS: [&str; 4] = [
    "Please send my car title to my insurance company",
    "Please tell me the current temperature",
    "Please play the song beat it by michael jackson",
    "Please tell me all files in my home directory",
];

pub fn default_corpus() -> Vec<Intention> {
    DEFAULT_INTENTIONS
        .iter()
        .map(|t| Intention::new(*t).expect("built-in intentions are non-empty"))
        .collect()
}

/// Parses a corpus: one intention per line, blank lines skipped.
pub fn parse_corpus(text: &str) -> Vec<Intention> {
    text.lines().filter_map(|l| Intention::new(l.trim()).ok()).collect()
}

pub fn load_corpus(path: &Path) -> Result<Vec<Intention>, HarnessError> {
    let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let corpus = parse_corpus(&text);
    if corpus.is_empty() {
        return Err(HarnessError::EmptyCorpus);
    }
    Ok(corpus)
}

/// 1-based position of `text` in `corpus`, ignoring surrounding whitespace.
pub fn corpus_index(corpus: &[Intention], text: &str) -> Option<usize> {
    corpus.iter().position(|i| i.text().trim() == text.trim()).map(|p| p + 1)
}
