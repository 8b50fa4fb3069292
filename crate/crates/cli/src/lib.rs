//! Command-line driver: training runs, three-way comparisons and the exact
//! game oracles.
//!
//! Every command is a library function so tests can call it directly;
//! [`run_from_args`] adds argument parsing and maps errors to exit codes.

mod compare;
mod config;
mod oracle;
mod train;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dualmcts::eval::EvalError;
use dualmcts::game::oracle::OracleError;
use dualmcts::net::NetError;
use dualmcts::training::{Algorithm, TrainError};
use thiserror::Error;

pub use compare::{cmd_compare, CompareOutcome};
pub use config::{Overrides, RunConfig};
pub use oracle::{cmd_oracle, OracleReport};
pub use train::{cmd_train, train_run, RunManifest, StepRecord};

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NON_FINITE: i32 = 3;
pub const EXIT_ORACLE_BUDGET: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("non-finite training state: {0}")]
    NonFinite(String),
    #[error(transparent)]
    OracleBudget(OracleError),
    #[error("simulation budgets differ between algorithms: {0}")]
    Parity(String),
    #[error(transparent)]
    Train(TrainError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Net(NetError),
    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::NonFinite(_) => EXIT_NON_FINITE,
            CliError::OracleBudget(_) => EXIT_ORACLE_BUDGET,
            _ => EXIT_FAILURE,
        }
    }

    pub(crate) fn io(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> CliError {
        let context = context.into();
        move |source| CliError::Io { context, source }
    }
}

impl From<TrainError> for CliError {
    fn from(e: TrainError) -> Self {
        match e {
            TrainError::Config(msg) => CliError::Config(msg),
            TrainError::Game(g) => CliError::Config(g.to_string()),
            TrainError::Net(n) => n.into(),
            other => CliError::Train(other),
        }
    }
}

impl From<NetError> for CliError {
    fn from(e: NetError) -> Self {
        match e {
            NetError::NonFinite(what) => CliError::NonFinite(what),
            other => CliError::Net(other),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "dualmcts", version, about = "Dual MCTS, MPV-MCTS and AlphaZero self-play training")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train one algorithm, writing metrics, checkpoints and a manifest.
    Train(TrainArgs),
    /// Train all three algorithms under equal simulation budgets.
    Compare(CompareArgs),
    /// Solve a game position exactly.
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Alphazero,
    Mpv,
    Dual,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Alphazero => Algorithm::AlphaZero,
            AlgoArg::Mpv => Algorithm::Mpv,
            AlgoArg::Dual => Algorithm::Dual,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GameArg {
    Nim,
    Hsr,
    Connect4,
}

impl GameArg {
    pub fn name(self) -> &'static str {
        match self {
            GameArg::Nim => "nim",
            GameArg::Hsr => "hsr",
            GameArg::Connect4 => "connect4",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[arg(long, value_enum)]
    pub algo: Option<AlgoArg>,
    #[arg(long, value_enum)]
    pub game: Option<GameArg>,
    /// TOML run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_steps: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[arg(long, value_enum)]
    pub game: GameArg,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_steps: Option<u64>,
    /// Small-tree budget for dual and MPV; AlphaZero gets the sum.
    #[arg(long)]
    pub b_sub: Option<u32>,
    #[arg(long)]
    pub b_full: Option<u32>,
    /// Subset of algorithms to run (default: all three).
    #[arg(long, value_enum, value_delimiter = ',')]
    pub algos: Vec<AlgoArg>,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[arg(long, value_enum)]
    pub game: GameArg,
    /// HSR jars.
    #[arg(long)]
    pub k: Option<u32>,
    /// HSR tests.
    #[arg(long)]
    pub q: Option<u32>,
    /// HSR rungs.
    #[arg(long)]
    pub n: Option<u32>,
    /// Nim stones removable per move.
    #[arg(long)]
    pub max_take: Option<u32>,
    #[arg(long)]
    pub pile: Option<u32>,
    #[arg(long)]
    pub rows: Option<u32>,
    #[arg(long)]
    pub cols: Option<u32>,
    #[arg(long)]
    pub connect: Option<u32>,
    /// Positions the solver may memoize before giving up.
    #[arg(long, default_value_t = dualmcts::game::oracle::DEFAULT_NODE_BUDGET)]
    pub budget: usize,
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Train(a) => cmd_train(a).map(|_| ()),
        Command::Compare(a) => cmd_compare(a).map(|_| ()),
        Command::Oracle(a) => cmd_oracle(a).map(|r| println!("{r}")),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
