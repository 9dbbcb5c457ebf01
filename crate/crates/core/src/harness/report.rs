use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::TrialRecord;

/// Per-intention aggregate. Averages cover all trials, failed ones included.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub intention: usize,
    pub trials: usize,
    pub successes: usize,
    pub avg_response_time: Duration,
    pub avg_ttft: Duration,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchReport {
    pub rows: Vec<ReportRow>,
    pub trials: Vec<TrialRecord>,
}

fn mean(ds: impl Iterator<Item = Duration>) -> Duration {
    let (mut sum, mut n) = (0u128, 0u128);
    for d in ds {
        sum += d.as_nanos();
        n += 1;
    }
    if n == 0 {
        return Duration::ZERO;
    }
    Duration::from_nanos(((sum + n / 2) / n) as u64)
}

impl BenchReport {
    /// Groups records by intention index in order of first appearance.
    pub fn from_trials(trials: Vec<TrialRecord>) -> Self {
        let mut order: Vec<usize> = Vec::new();
        for t in &trials {
            if !order.contains(&t.intention_index) {
                order.push(t.intention_index);
            }
        }
        let rows = order
            .into_iter()
            .map(|i| {
                let group = || trials.iter().filter(move |t| t.intention_index == i);
                ReportRow {
                    intention: i,
                    trials: group().count(),
                    successes: group().filter(|t| t.success).count(),
                    avg_response_time: mean(group().map(|t| t.response_time)),
                    avg_ttft: mean(group().map(|t| t.ttft)),
                }
            })
            .collect();
        BenchReport { rows, trials }
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn successes(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.successes).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    #[default]
    Markdown,
    Csv,
    JsonLines,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Markdown => "md",
            ReportFormat::Csv => "csv",
            ReportFormat::JsonLines => "jsonl",
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Markdown => "markdown",
            ReportFormat::Csv => "csv",
            ReportFormat::JsonLines => "json-lines",
        })
    }
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "csv" => Ok(ReportFormat::Csv),
            "json-lines" | "jsonl" => Ok(ReportFormat::JsonLines),
            other => Err(format!("unknown report format `{other}` (expected markdown, csv or json-lines)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("report has no rows")]
pub struct EmptyReport;

fn secs(d: Duration) -> String {
    format!("{:.2}", d.as_secs_f64())
}

fn millis(d: Duration) -> String {
    format!("{:.1}", d.as_nanos() as f64 / 1e6)
}

/// Renders `report`. Every line, including the last, ends in `\n`.
pub fn render_report(report: &BenchReport, format: ReportFormat) -> Result<String, EmptyReport> {
    if report.is_empty() {
        return Err(EmptyReport);
    }
    let mut out = String::new();
    match format {
        ReportFormat::Markdown => {
            out.push_str("| Intention | Successes | Average Response Time (s) | Average Time to First Token (ms) |\n");
            out.push_str("|---|---|---|---|\n");
            for r in &report.rows {
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} |",
                    r.intention,
                    r.successes,
                    secs(r.avg_response_time),
                    millis(r.avg_ttft)
                );
            }
        }
        ReportFormat::Csv => {
            out.push_str("intention,successes,avg_response_time_s,avg_ttft_ms\n");
            for r in &report.rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    r.intention,
                    r.successes,
                    secs(r.avg_response_time),
                    millis(r.avg_ttft)
                );
            }
        }
        ReportFormat::JsonLines => {
            for t in &report.trials {
                out.push_str(&serde_json::to_string(t).expect("trial records always serialize"));
                out.push('\n');
            }
        }
    }
    Ok(out)
}
