use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::consent::ConsentPolicy;
use crate::executor::Limits;
use crate::function_table::FunctionTable;
use crate::harness::{default_corpus, load_corpus, HarnessError, ReportFormat};
use crate::llm::{
    Backend, GenerationParams, HttpBackend, HttpConfig, MockBackend, ReplayBackend, Timing, TimingMode,
};
use crate::prompting::Intention;
use crate::stubs::{stub_table, StubConfig};

/// Prefix of environment variables that override config keys, e.g.
/// `INTENTFLOW_MODEL` for `model`.
pub const ENV_PREFIX: &str = "INTENTFLOW_";

const DEFAULT_MOCK_REPLY: &str = "print_screen(\"hello from the mock backend\")";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackendKind {
    Http,
    #[default]
    Replay,
    Mock,
}

impl fmt::Display for BackendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BackendKind::Http => "http",
            BackendKind::Replay => "replay",
            BackendKind::Mock => "mock",
        })
    }
}

impl FromStr for BackendKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "http" => Ok(BackendKind::Http),
            "replay" => Ok(BackendKind::Replay),
            "mock" => Ok(BackendKind::Mock),
            other => Err(format!("unknown backend `{other}` (expected http, replay or mock)")),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {}: {source}", .path.display())]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config file {}: {message}", .path.display())]
    Parse { path: PathBuf, message: String },
    #[error("invalid value for {key}: {message}")]
    Invalid { key: String, message: String },
    #[error("the {0} backend requires `{1}` to be set")]
    Missing(BackendKind, &'static str),
    #[error("cannot load function table {}: {message}", .path.display())]
    Table { path: PathBuf, message: String },
    #[error(transparent)]
    Corpus(#[from] HarnessError),
}

fn invalid(key: &str, message: impl fmt::Display) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        message: message.to_string(),
    }
}

/// One source of settings. Later layers override earlier ones key by key.
///
/// There is deliberately no field for an API key: the HTTP backend reads it
/// from the environment variable named by `credential_env`.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub backend: Option<BackendKind>,
    pub endpoint: Option<String>,
    pub model: Option<String>,
    pub credential_env: Option<String>,
    pub temperature: Option<f64>,
    pub max_tokens: Option<u32>,
    pub timeout_ms: Option<u64>,
    pub fixtures: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
    pub table: Option<PathBuf>,
    pub consent: Option<ConsentPolicy>,
    pub trials: Option<usize>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
    pub max_steps: Option<u64>,
    pub max_list_len: Option<usize>,
    pub max_string_len: Option<usize>,
    pub ask_question_reply: Option<String>,
    pub shell_reply: Option<String>,
    pub mock_reply: Option<String>,
    pub mock_ttft_ms: Option<f64>,
    pub mock_total_ms: Option<f64>,
    pub mock_real_time: Option<bool>,
}

macro_rules! merge_fields {
    ($dst:ident, $src:ident, $($f:ident),* $(,)?) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f; } )*
    };
}

macro_rules! env_fields {
    ($layer:ident, $get:ident, $($f:ident),* $(,)?) => {
        $( $layer.$f = env_value($get, stringify!($f))?; )*
    };
}

fn env_value<T>(get: &dyn Fn(&str) -> Option<String>, key: &str) -> Result<Option<T>, ConfigError>
where
    T: FromStr,
    T::Err: fmt::Display,
{
    let var = format!("{ENV_PREFIX}{}", key.to_ascii_uppercase());
    match get(&var) {
        None => Ok(None),
        Some(raw) => raw.trim().parse().map(Some).map_err(|e| invalid(&var, e)),
    }
}

impl ConfigLayer {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self, ConfigError> {
        let mut layer: ConfigLayer = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e.message().to_string(),
        })?;
        // paths in a config file are relative to the file
        if let Some(base) = path.parent() {
            for p in [&mut layer.fixtures, &mut layer.corpus, &mut layer.table].into_iter().flatten() {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        Ok(layer)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        ConfigLayer::from_toml(&text, path)
    }

    /// Reads `INTENTFLOW_<KEY>` overrides through `get`.
    pub fn from_env(get: &dyn Fn(&str) -> Option<String>) -> Result<Self, ConfigError> {
        let mut layer = ConfigLayer::default();
        env_fields!(
            layer, get, backend, endpoint, model, credential_env, temperature, max_tokens, timeout_ms, fixtures,
            corpus, table, consent, trials, format, out, max_steps, max_list_len, max_string_len,
            ask_question_reply, shell_reply, mock_reply, mock_ttft_ms, mock_total_ms, mock_real_time,
        );
        Ok(layer)
    }

    pub fn merge(&mut self, other: ConfigLayer) {
        merge_fields!(
            self, other, backend, endpoint, model, credential_env, temperature, max_tokens, timeout_ms, fixtures,
            corpus, table, consent, trials, format, out, max_steps, max_list_len, max_string_len,
            ask_question_reply, shell_reply, mock_reply, mock_ttft_ms, mock_total_ms, mock_real_time,
        );
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MockSettings {
    pub reply: String,
    pub timing: Timing,
    pub mode: TimingMode,
}

/// Fully resolved settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub backend: BackendKind,
    pub http: HttpConfig,
    pub params: GenerationParams,
    pub fixtures: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
    pub table: Option<PathBuf>,
    pub consent: ConsentPolicy,
    pub trials: usize,
    pub formats: Vec<ReportFormat>,
    pub out: Option<PathBuf>,
    pub limits: Limits,
    pub stubs: StubConfig,
    pub mock: MockSettings,
}

fn parse_formats(s: &str) -> Result<Vec<ReportFormat>, ConfigError> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let f: ReportFormat = part.parse().map_err(|e| invalid("format", e))?;
        if !out.contains(&f) {
            out.push(f);
        }
    }
    if out.is_empty() {
        return Err(invalid("format", "no format given"));
    }
    Ok(out)
}

impl Config {
    pub fn resolve(layer: ConfigLayer) -> Result<Self, ConfigError> {
        let defaults = GenerationParams::default();
        let http_defaults = HttpConfig::default();
        let params = GenerationParams {
            model: layer.model.unwrap_or(defaults.model),
            temperature: layer.temperature.unwrap_or(defaults.temperature),
            max_tokens: layer.max_tokens.unwrap_or(defaults.max_tokens),
            timeout: layer.timeout_ms.map(Duration::from_millis).unwrap_or(defaults.timeout),
        };
        params.validate().map_err(|e| invalid(e.field, e.reason))?;

        let base_limits = Limits::default();
        let limits = Limits::new(
            layer.max_steps.unwrap_or(base_limits.max_steps),
            layer.max_list_len.unwrap_or(base_limits.max_list_len),
            layer.max_string_len.unwrap_or(base_limits.max_string_len),
        )
        .map_err(|e| invalid(e.0, "must be positive"))?;

        let trials = layer.trials.unwrap_or(5);
        if trials == 0 {
            return Err(invalid("trials", "must be at least 1"));
        }

        let ttft = layer.mock_ttft_ms.unwrap_or(0.0);
        let total = layer.mock_total_ms.unwrap_or(ttft);
        if !(ttft.is_finite() && total.is_finite() && ttft >= 0.0 && total >= ttft) {
            return Err(invalid("mock_ttft_ms", "mock timings must satisfy 0 <= ttft <= total"));
        }

        let config = Config {
            backend: layer.backend.unwrap_or_default(),
            http: HttpConfig {
                endpoint: layer.endpoint.unwrap_or(http_defaults.endpoint),
                credential_env: layer.credential_env.unwrap_or(http_defaults.credential_env),
            },
            params,
            fixtures: layer.fixtures,
            corpus: layer.corpus,
            table: layer.table,
            consent: layer.consent.unwrap_or(ConsentPolicy::AutoDeny),
            trials,
            formats: parse_formats(layer.format.as_deref().unwrap_or("markdown"))?,
            out: layer.out,
            limits,
            stubs: StubConfig {
                ask_question_reply: layer.ask_question_reply.unwrap_or_default(),
                shell_reply: layer.shell_reply.unwrap_or_default(),
            },
            mock: MockSettings {
                reply: layer.mock_reply.unwrap_or_else(|| DEFAULT_MOCK_REPLY.to_string()),
                timing: Timing::from_ms(ttft, total),
                mode: if layer.mock_real_time.unwrap_or(false) {
                    TimingMode::RealTime
                } else {
                    TimingMode::Simulated
                },
            },
        };
        Ok(config)
    }

    /// Checks that the selected backend has what it needs.
    pub fn check_backend(&self) -> Result<(), ConfigError> {
        match self.backend {
            BackendKind::Replay if self.fixtures.is_none() => Err(ConfigError::Missing(self.backend, "fixtures")),
            BackendKind::Http if self.http.endpoint.trim().is_empty() => {
                Err(ConfigError::Missing(self.backend, "endpoint"))
            }
            BackendKind::Http if self.http.credential_env.trim().is_empty() => {
                Err(ConfigError::Missing(self.backend, "credential_env"))
            }
            _ => Ok(()),
        }
    }

    pub fn build_backend(&self) -> Result<Box<dyn Backend>, ConfigError> {
        self.check_backend()?;
        Ok(match self.backend {
            BackendKind::Http => Box::new(HttpBackend::new(self.http.clone())),
            BackendKind::Replay => Box::new(ReplayBackend::open(
                self.fixtures.clone().expect("validated: replay has fixtures"),
            )),
            BackendKind::Mock => Box::new(
                MockBackend::new(self.mock.reply.clone())
                    .timing(self.mock.timing)
                    .mode(self.mock.mode),
            ),
        })
    }

    pub fn function_table(&self) -> Result<FunctionTable, ConfigError> {
        match &self.table {
            None => Ok(stub_table(&self.stubs)),
            Some(path) => load_table(path),
        }
    }

    pub fn intentions(&self) -> Result<Vec<Intention>, ConfigError> {
        match &self.corpus {
            None => Ok(default_corpus()),
            Some(path) => Ok(load_corpus(path)?),
        }
    }
}

/// Loads a table from a file of signature lines. Handlers are no-ops.
pub fn load_table(path: &Path) -> Result<FunctionTable, ConfigError> {
    let table_err = |message: String| ConfigError::Table {
        path: path.to_path_buf(),
        message,
    };
    let text = fs::read_to_string(path).map_err(|e| table_err(e.to_string()))?;
    FunctionTable::from_doc_lines(&text).map_err(|e| table_err(e.to_string()))
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use super::*;

    fn env(pairs: &[(&str, &str)]) -> impl Fn(&str) -> Option<String> {
        let map: HashMap<String, String> = pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        move |k| map.get(k).cloned()
    }

    #[test]
    fn layering_order() {
        let mut layer =
            ConfigLayer::from_toml("backend = \"mock\"\nmodel = \"a\"\ntrials = 3\n", Path::new("c.toml")).unwrap();
        layer.merge(ConfigLayer::from_env(&env(&[("INTENTFLOW_MODEL", "b")])).unwrap());
        layer.merge(ConfigLayer {
            trials: Some(1),
            ..Default::default()
        });
        let cfg = Config::resolve(layer).unwrap();
        assert_eq!(cfg.backend, BackendKind::Mock);
        assert_eq!(cfg.params.model, "b");
        assert_eq!(cfg.trials, 1);
    }

    #[test]
    fn defaults() {
        let cfg = Config::resolve(ConfigLayer {
            fixtures: Some("f".into()),
            ..Default::default()
        })
        .unwrap();
        assert_eq!(cfg.backend, BackendKind::Replay);
        assert_eq!(cfg.params, GenerationParams::default());
        assert_eq!(cfg.consent, ConsentPolicy::AutoDeny);
        assert_eq!(cfg.trials, 5);
        assert_eq!(cfg.formats, [ReportFormat::Markdown]);
        assert_eq!(cfg.http.credential_env, "OPENAI_API_KEY");
    }

    #[test]
    fn replay_requires_fixtures() {
        let err = Config::resolve(ConfigLayer::default()).unwrap().check_backend().unwrap_err();
        assert!(matches!(err, ConfigError::Missing(BackendKind::Replay, "fixtures")));
    }

    #[test]
    fn credential_keys_are_rejected() {
        let err = ConfigLayer::from_toml("api_key = \"sk-123\"", Path::new("c.toml")).unwrap_err();
        assert!(matches!(err, ConfigError::Parse { .. }));
    }

    #[test]
    fn relative_paths_follow_the_file() {
        let layer = ConfigLayer::from_toml("fixtures = \"fx\"\ncorpus = \"/abs/c.txt\"", Path::new("/etc/app/c.toml"))
            .unwrap();
        assert_eq!(layer.fixtures.as_deref(), Some(Path::new("/etc/app/fx")));
        assert_eq!(layer.corpus.as_deref(), Some(Path::new("/abs/c.txt")));
    }

    #[test]
    fn env_values_are_typed() {
        let layer = ConfigLayer::from_env(&env(&[
            ("INTENTFLOW_TRIALS", "2"),
            ("INTENTFLOW_CONSENT", "auto-allow"),
            ("INTENTFLOW_MOCK_REAL_TIME", "true"),
        ]))
        .unwrap();
        assert_eq!(layer.trials, Some(2));
        assert_eq!(layer.consent, Some(ConsentPolicy::AutoAllow));
        assert_eq!(layer.mock_real_time, Some(true));
        let err = ConfigLayer::from_env(&env(&[("INTENTFLOW_TRIALS", "many")])).unwrap_err();
        assert!(err.to_string().contains("INTENTFLOW_TRIALS"), "{err}");
    }

    #[test]
    fn invalid_values() {
        let resolve = |layer: ConfigLayer| {
            Config::resolve(ConfigLayer {
                backend: Some(BackendKind::Mock),
                ..layer
            })
        };
        assert!(resolve(ConfigLayer { trials: Some(0), ..Default::default() }).is_err());
        assert!(resolve(ConfigLayer { max_steps: Some(0), ..Default::default() }).is_err());
        assert!(resolve(ConfigLayer { max_tokens: Some(0), ..Default::default() }).is_err());
        assert!(resolve(ConfigLayer { format: Some("xml".into()), ..Default::default() }).is_err());
        assert!(resolve(ConfigLayer {
            mock_ttft_ms: Some(10.0),
            mock_total_ms: Some(5.0),
            ..Default::default()
        })
        .is_err());
        let cfg = resolve(ConfigLayer { format: Some("csv, markdown,csv".into()), ..Default::default() }).unwrap();
        assert_eq!(cfg.formats, [ReportFormat::Csv, ReportFormat::Markdown]);
    }
}
