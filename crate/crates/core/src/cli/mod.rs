//! The `dressing-lab` command-line front end.
//!
//! ```text
//! dressing-lab <chain|top|bands|monodromy|oscillator|families|check>
//!     [--config FILE] [--set KEY=VALUE]... [--out DIR] [--threads N] [--check]
//! ```
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 failed checks (always for `check`, for other commands with `--check`).

pub mod check;
pub mod commands;
pub mod config;
pub mod output;
pub mod svg;

use std::ffi::OsString;
use std::io::{IsTerminal, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use output::OutputBundle;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<config::ConfigError> for CliError {
    fn from(e: config::ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        match e {
            crate::Error::Config(m) => CliError::Config(m),
            e => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "dressing-lab", version, about = "Matrix dressing chains, tops and band spectra")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override a config entry, e.g. `--set pendulum.h=100`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Directory for the output files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for grid scans (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Exit with status 4 when an embedded check fails.
    #[arg(long, global = true)]
    pub check: bool,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Eq)]
pub enum Command {
    /// Integrate the period-one chain and report Lax conservation.
    Chain,
    /// Integrate a rigid-body top (default: the Fig 1 pendulum).
    Top,
    /// Band table and SVG for a potential source.
    Bands,
    /// Monodromy multipliers on a λ grid.
    Monodromy,
    /// Matrix oscillator: potential, eigenfunctions, shooting spectrum.
    Oscillator,
    /// Checks of the explicit families.
    Families,
    /// Run the acceptance criteria.
    Check {
        /// Comma-separated criterion ids.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Chain => "chain",
            Command::Top => "top",
            Command::Bands => "bands",
            Command::Monodromy => "monodromy",
            Command::Oscillator => "oscillator",
            Command::Families => "families",
            Command::Check { .. } => "check",
        }
    }
}

/// Build the bundle for a parsed command line.
pub fn execute(cli: &Cli) -> Result<OutputBundle, CliError> {
    let mut overrides = cli.set.clone();
    if let Command::Check { only } = &cli.command {
        if !only.is_empty() {
            let ids: Vec<String> = only.iter().map(|i| i.to_string()).collect();
            overrides.push(format!("only=[{}]", ids.join(",")));
        }
    }
    let v = config::load(cli.config.as_deref(), &overrides)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Chain => commands::chain(v),
        Command::Top => commands::top(v),
        Command::Bands => commands::bands(v),
        Command::Monodromy => commands::monodromy(v),
        Command::Oscillator => commands::oscillator(v),
        Command::Families => commands::families(v),
        Command::Check { .. } => commands::check(v),
    })
}

fn colour(out: bool) -> bool {
    out && std::env::var_os("NO_COLOR").is_none_or(|v| v.is_empty())
}

/// Run with explicit arguments, writing the summary to `stdout` and
/// diagnostics to `stderr`. Returns the exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write, tty: bool) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = if code == 0 { write!(stdout, "{}", e.render()) } else { write!(stderr, "{}", e.render()) };
            return code;
        }
    };
    if cli.threads == Some(0) {
        let _ = writeln!(stderr, "config error: --threads must be positive");
        return 2;
    }
    let bundle = match execute(&cli) {
        Ok(b) => b,
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            return e.exit_code();
        }
    };
    let paint = colour(tty);
    for n in &bundle.notes {
        let _ = writeln!(stdout, "{n}");
    }
    for c in &bundle.checks {
        let tag = match (c.pass, paint) {
            (true, true) => "\x1b[32mPASS\x1b[0m",
            (false, true) => "\x1b[31mFAIL\x1b[0m",
            (true, false) => "PASS",
            (false, false) => "FAIL",
        };
        let rel = if c.upper { "<=" } else { ">" };
        let _ = writeln!(stdout, "{tag} {}: {:.3e} {rel} {:.1e}", c.name, c.value, c.tolerance);
    }
    if let Some(dir) = &cli.out {
        if let Err(e) = bundle.write(dir) {
            let _ = writeln!(stderr, "config error: cannot write {}: {e}", dir.display());
            return 2;
        }
    }
    let enforce = cli.check || matches!(cli.command, Command::Check { .. });
    if enforce && !bundle.all_pass() {
        4
    } else {
        0
    }
}

pub fn main() -> i32 {
    let tty = std::io::stdout().is_terminal();
    run_with(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr(), tty)
}
