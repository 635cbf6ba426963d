//! `moodco`: batch front end for mood scoring, feature selection, coherence
//! and post-group comparisons.
//!
//! Exit status: 0 success, 1 configuration error, 2 data or statistics error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use moodco::mood::TiePolicy;
use moodco::pipeline::CoherenceUnit;

use config::{Format, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Data(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "moodco", version, about = "Lexicon-based mood indicators and post/comment emotional coherence")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand; each overrides the matching config key.
#[derive(Debug, Args)]
struct GlobalArgs {
    /// Config file (key = value); falls back to $MOODCO_CONFIG.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Lexicon file; the bundled micro-lexicon when unset.
    #[arg(long, global = true, value_name = "PATH")]
    lexicon: Option<PathBuf>,
    /// Category bindings file; the bundled bindings when unset.
    #[arg(long, global = true, value_name = "PATH")]
    bindings: Option<PathBuf>,
    /// JSON-Lines corpus.
    #[arg(long, global = true, value_name = "PATH")]
    corpus: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    empathy_threshold: Option<f64>,
    /// neutral, positive or negative.
    #[arg(long, global = true)]
    tie_policy: Option<TiePolicy>,
    /// comment or post_mean.
    #[arg(long, global = true)]
    coherence_unit: Option<CoherenceUnit>,
    #[arg(long, short = 'o', global = true, value_name = "DIR")]
    output_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for per-profile work; output does not depend on it.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    /// Also score text posts that received no comments.
    #[arg(long, global = true)]
    include_uncommented: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score every eligible post and comment: scores.csv and score_summary.json.
    Score,
    /// Select discriminating features from a labeled sample: selected_features.json.
    SelectFeatures(commands::SelectArgs),
    /// Per-profile coherence, pooled table and empathy comparison: coherence.json.
    Coherence(commands::CoherenceArgs),
    /// Negative vs positive and neutral vs emotional posts: post_comparisons.json.
    ComparePosts,
    /// Write a synthetic contagion corpus.
    Generate(commands::GenerateArgs),
    /// One feature row per post: features.csv.
    FeaturesDump,
}

fn resolve(global: &GlobalArgs) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(global.config.as_deref())?;
    if let Some(p) = &global.lexicon {
        cfg.lexicon_path = Some(p.clone());
    }
    if let Some(p) = &global.bindings {
        cfg.bindings_path = Some(p.clone());
    }
    if let Some(p) = &global.corpus {
        cfg.corpus_path = Some(p.clone());
    }
    if let Some(s) = global.seed {
        cfg.seed = s;
    }
    if let Some(a) = global.alpha {
        cfg.alpha = a;
    }
    if let Some(t) = global.empathy_threshold {
        cfg.empathy_threshold = t;
    }
    if let Some(t) = global.tie_policy {
        cfg.tie_policy = t;
    }
    if let Some(u) = global.coherence_unit {
        cfg.coherence_unit = u;
    }
    if let Some(d) = &global.output_dir {
        cfg.output_dir = d.clone();
    }
    if let Some(f) = global.format {
        cfg.format = f;
    }
    if global.include_uncommented {
        cfg.require_comments = false;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn set_jobs(jobs: Option<usize>) -> Result<(), CliError> {
    let Some(n) = jobs else { return Ok(()) };
    if n == 0 {
        return Err(CliError::Config("--jobs must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot start {n} worker threads: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = resolve(&cli.global)?;
    set_jobs(cli.global.jobs)?;
    match cli.command {
        Command::Score => commands::score_cmd(&cfg),
        Command::SelectFeatures(args) => commands::select_features_cmd(&cfg, &args),
        Command::Coherence(args) => commands::coherence_cmd(&cfg, &args),
        Command::ComparePosts => commands::compare_posts_cmd(&cfg),
        Command::Generate(args) => commands::generate_cmd(&cfg, &args),
        Command::FeaturesDump => commands::features_dump_cmd(&cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("moodco: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
