use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use histnero::training::Mode;

#[derive(Debug, Parser)]
#[command(name = "histnero", version, about = "Historical NER pipeline: corpus tools, agreement, TF-IDF and a domain-adversarial tagger")]
pub struct Cli {
    /// TOML file with optional [train], [model] and [split] tables. Flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sentence, token and entity counts per label and region.
    Stats(StatsArgs),
    /// Check every document for annotation problems; exits 1 if any are found.
    Validate(ValidateArgs),
    /// Convert between corpus formats.
    Convert(ConvertArgs),
    /// Stratified train/valid/test split.
    Split(SplitArgs),
    /// Inter-annotator agreement between two annotations of the same documents.
    Iaa(IaaArgs),
    /// Top-k TF-IDF terms per region.
    Tfidf(TfidfArgs),
    /// Train a tagger.
    Train(TrainArgs),
    /// Evaluate a saved tagger.
    Eval(EvalArgs),
    /// Train one tagger per region and score it on every region.
    Crossregion(CrossregionArgs),
    /// Write one mean feature vector per sentence as TSV.
    ExportEmbeddings(ExportArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// JSONL corpus, or a directory holding the public release.
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Also write stats.json here.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Also write violations.json here.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Brat,
    Jsonl,
    Histnero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Jsonl,
    Conll,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long, value_enum)]
    pub from: InputFormat,
    #[arg(long, value_enum)]
    pub to: OutputFormat,
    /// A `.txt` file (with its `.ann` beside it) or a directory of pairs for
    /// brat; a file for jsonl; the release directory for histnero.
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// Region of every brat document.
    #[arg(long)]
    pub region: Option<String>,
    /// Publication year of every brat document.
    #[arg(long)]
    pub year: Option<u16>,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct IaaArgs {
    /// First annotation layer.
    #[command(flatten)]
    pub input: InputArgs,
    /// Second annotation layer over the same documents.
    #[arg(long, value_name = "PATH")]
    pub against: PathBuf,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TfidfArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Use raw counts instead of ln(1 + count).
    #[arg(long)]
    pub raw_tf: bool,
    /// File with one stopword per line.
    #[arg(long, value_name = "FILE")]
    pub stopwords: Option<PathBuf>,
    /// Also write tfidf.tsv here.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

/// Hyperparameter overrides shared by the training commands.
#[derive(Debug, Default, Args)]
pub struct TrainFlags {
    #[arg(long)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub batch: Option<usize>,
    #[arg(long)]
    pub clip: Option<f64>,
    #[arg(long)]
    pub weight_decay: Option<f64>,
    /// Seeds initialization, shuffling and the split.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub vocab_size: Option<usize>,
    #[arg(long)]
    pub embed_dim: Option<usize>,
    #[arg(long)]
    pub hidden_dim: Option<usize>,
    #[arg(long)]
    pub window: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// JSON split file with `train`, `valid` and `test` sentence keys.
    #[arg(long, value_name = "FILE")]
    pub split_file: Option<PathBuf>,
    /// Extra unlabeled sentences; they only train the discriminator path.
    #[arg(long, value_name = "FILE")]
    pub unlabeled: Option<PathBuf>,
    #[command(flatten)]
    pub flags: TrainFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Subset {
    All,
    Train,
    Valid,
    Test,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Checkpoint written by `train`.
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub split_file: Option<PathBuf>,
    /// Defaults to `test` when a split is available, otherwise `all`.
    #[arg(long, value_enum)]
    pub subset: Option<Subset>,
}

#[derive(Debug, Args)]
pub struct CrossregionArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub split_file: Option<PathBuf>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[command(flatten)]
    pub flags: TrainFlags,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}
