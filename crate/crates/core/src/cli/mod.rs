//! Command-line front end: `run`, `bench`, `repl`, `render-prompt`, `trace`.
//!
//! Commands write to the streams in [`Io`] and return a process exit code:
//! 0 on success, 1 when generated code failed in a classified way, 2 on
//! configuration or I/O errors.

mod commands;
mod config;

use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::consent::ConsentPolicy;

pub use commands::{cmd_bench, cmd_render_prompt, cmd_repl, cmd_run, cmd_trace};
pub use config::{load_table, BackendKind, Config, ConfigError, ConfigLayer, MockSettings, ENV_PREFIX};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// The streams a command talks to.
pub struct Io<'a> {
    pub input: &'a mut dyn BufRead,
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

#[derive(Debug, Parser)]
#[command(name = "intentflow", version, about = "Turn natural-language intentions into sandboxed programs")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML config file (also INTENTFLOW_CONFIG)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// http, replay or mock
    #[arg(long, global = true)]
    pub backend: Option<BackendKind>,
    /// Model name for the http backend
    #[arg(long, global = true)]
    pub model: Option<String>,
    /// Fixture directory for the replay backend
    #[arg(long, global = true)]
    pub fixtures: Option<PathBuf>,
    /// Trials per intention
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// auto-allow, auto-deny or interactive
    #[arg(long, global = true)]
    pub consent: Option<ConsentPolicy>,
    /// markdown, csv or json-lines; repeat or comma-separate for several
    #[arg(long, global = true)]
    pub format: Vec<String>,
    /// Output file (or directory when several formats are requested)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate and execute code for one intention
    Run {
        intention: String,
        /// Fixture trial to replay
        #[arg(long, default_value_t = 1)]
        trial: usize,
    },
    /// Run the benchmark protocol over a corpus
    Bench {
        /// One intention per line; defaults to the built-in corpus
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Record generations as fixtures into this directory
        #[arg(long)]
        record: Option<PathBuf>,
        /// Allow recording into a non-empty directory
        #[arg(long)]
        force: bool,
    },
    /// Interactive loop: intention, review, approve, execute
    Repl,
    /// Print the prompt that would be sent for an intention
    RenderPrompt {
        intention: String,
        /// File of `function NAME(...): TYPE` lines to use instead of the stubs
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Dump the syntax tree of a program, optionally executing it
    Trace {
        file: PathBuf,
        #[arg(long)]
        execute: bool,
    },
}

impl GlobalArgs {
    fn layer(&self) -> ConfigLayer {
        ConfigLayer {
            backend: self.backend,
            model: self.model.clone(),
            fixtures: self.fixtures.clone(),
            trials: self.trials,
            consent: self.consent,
            format: (!self.format.is_empty()).then(|| self.format.join(",")),
            out: self.out.clone(),
            ..Default::default()
        }
    }
}

/// Builds the effective config: file, then environment, then flags.
pub fn load_config(global: &GlobalArgs, env: &dyn Fn(&str) -> Option<String>) -> Result<Config, ConfigError> {
    let mut layer = ConfigLayer::default();
    let path = global
        .config
        .clone()
        .or_else(|| env(&format!("{ENV_PREFIX}CONFIG")).map(PathBuf::from));
    if let Some(path) = path {
        layer.merge(ConfigLayer::from_file(&path)?);
    }
    layer.merge(ConfigLayer::from_env(env)?);
    layer.merge(global.layer());
    Config::resolve(layer)
}

/// Parses `args` and runs the selected command.
pub fn main_with<I, T>(args: I, env: &dyn Fn(&str) -> Option<String>, io: &mut Io<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let sink: &mut dyn Write = if e.use_stderr() { &mut *io.err } else { &mut *io.out };
            let _ = write!(sink, "{}", e.render());
            return e.exit_code();
        }
    };
    let cfg = match load_config(&cli.global, env) {
        Ok(cfg) => cfg,
        Err(e) => {
            let _ = writeln!(io.err, "error: {e}");
            return EXIT_CONFIG;
        }
    };
    match cli.command {
        Command::Run { intention, trial } => cmd_run(&cfg, &intention, trial, io),
        Command::Bench { corpus, record, force } => {
            let cfg = Config {
                corpus: corpus.or(cfg.corpus.clone()),
                ..cfg
            };
            cmd_bench(&cfg, record.as_deref(), force, io)
        }
        Command::Repl => cmd_repl(&cfg, io),
        Command::RenderPrompt { intention, table } => cmd_render_prompt(&cfg, &intention, table.as_deref(), io),
        Command::Trace { file, execute } => cmd_trace(&cfg, &file, execute, io),
    }
}
