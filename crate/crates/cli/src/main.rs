//! `tactics`: batch runs over tactic-sequence corpora.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 transport error.

mod commands;
mod http;
mod io_util;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "tactics",
    version,
    about = "Encode, analyze, and mine tactic-sequence templates over empathic-response corpora"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode span-annotated responses into collapsed tactic sequences
    Encode(EncodeArgs),
    /// Descriptives, tactic prevalence, and prevalence rank correlations
    Stats(StatsArgs),
    /// Evaluate a nested pattern ladder (across/within coverage table)
    Match(MatchArgs),
    /// Discover a template ladder by greedy beam search
    Mine(MineArgs),
    /// Generate a synthetic corpus planted from a pattern
    Synth(SynthArgs),
    /// Tag responses with tactics via the model gateway
    Tag(TagArgs),
    /// Generate empathic responses to posts via the model gateway
    Respond(RespondArgs),
    /// Krippendorff's alpha from a rater,item_id,tactic,present CSV
    Irr(IrrArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GroupByArg {
    Writer,
    Study,
    None,
}

impl From<GroupByArg> for tactics_core::coverage::GroupBy {
    fn from(g: GroupByArg) -> Self {
        match g {
            GroupByArg::Writer => Self::Writer,
            GroupByArg::Study => Self::Study,
            GroupByArg::None => Self::None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Md,
}

#[derive(Args)]
struct EncodeArgs {
    /// Corpus JSONL (annotated, pre-encoded, or mixed)
    #[arg(long)]
    corpus: PathBuf,
    /// Output path (default stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: logical CPUs)
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, value_enum, default_value = "writer")]
    group_by: GroupByArg,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Also report Pearson correlations on raw prevalences
    #[arg(long)]
    pearson: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MatchArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Ladder file: one pattern per line, nested top to bottom
    #[arg(long)]
    patterns: PathBuf,
    #[arg(long, value_enum, default_value = "writer")]
    group_by: GroupByArg,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Evaluate with the exhaustive derivation oracle instead of the
    /// production matcher (fixture regeneration; short sequences only)
    #[arg(long)]
    oracle: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MineArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Pooling for the mined group(s); `none` mines the whole corpus at once
    #[arg(long, value_enum, default_value = "none")]
    group_by: GroupByArg,
    /// Beam width
    #[arg(long)]
    beam: Option<usize>,
    #[arg(long)]
    max_atoms: Option<usize>,
    #[arg(long)]
    max_set_size: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Miner config file (TOML, or JSON with .json extension)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Start the search from this prefix pattern instead of the empty one
    #[arg(long)]
    seed_pattern: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Planted pattern, e.g. '^X?[PV]+ [XE]? [AIP]+'
    #[arg(long)]
    pattern: String,
    /// Number of sequences
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Probability of an opening-set-breaking prefix letter
    #[arg(long, default_value_t = 0.0)]
    prefix_noise: f64,
    /// Geometric continuation probability of the random tail
    #[arg(long, default_value_t = 0.0)]
    tail: f64,
    /// Expansion bound for `+` atoms
    #[arg(long, default_value_t = 4)]
    max_repeat: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TagArgs {
    /// Corpus JSONL; every record must carry text
    #[arg(long)]
    corpus: PathBuf,
    /// Prompt template with a {response} placeholder
    #[arg(long)]
    prompt: Option<PathBuf>,
    /// Gateway config file (TOML, or JSON with .json extension)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Use the offline mock transport; no network access
    #[arg(long)]
    mock: bool,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RespondArgs {
    /// Posts JSONL: {"id": ..., "text": ...} per line
    #[arg(long)]
    corpus: PathBuf,
    /// Prompt template with a {post} placeholder
    #[arg(long)]
    prompt: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Use the offline mock transport; no network access
    #[arg(long)]
    mock: bool,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct IrrArgs {
    /// Ratings CSV with header rater,item_id,tactic,present
    #[arg(long)]
    ratings: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Error with its process exit code.
#[derive(Debug)]
pub enum AppError {
    Usage(String),
    Data(String),
    Transport(String),
}

impl AppError {
    fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) => 1,
            AppError::Data(_) => 2,
            AppError::Transport(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            AppError::Usage(m) | AppError::Data(m) | AppError::Transport(m) => m,
        }
    }
}

fn main() {
    std::process::exit(run(std::env::args_os()));
}

fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            eprint!("{e}");
            return 1;
        }
    };
    let result = match cli.command {
        Command::Encode(args) => commands::encode::run(args),
        Command::Stats(args) => commands::stats::run(args),
        Command::Match(args) => commands::match_cmd::run(args),
        Command::Mine(args) => commands::mine::run(args),
        Command::Synth(args) => commands::synth::run(args),
        Command::Tag(args) => commands::tag::run(args),
        Command::Respond(args) => commands::respond::run(args),
        Command::Irr(args) => commands::irr::run(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}
