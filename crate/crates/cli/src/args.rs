use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "knowref", version, about = "Build and evaluate two-candidate pronoun resolution corpora")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Seed for labeling draws and the random resolver. Falls back to the
    /// config file, then KNOWREF_SEED, then 0.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads for per-record stages; output order is unchanged.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// TOML file whose keys mirror the long flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Where to write the run manifest. Defaults to `<output>.manifest.json`
    /// for commands that write an output file.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Clean and split raw text, keeping sentences that pass the length and
    /// shape filter.
    Ingest(IngestArgs),
    /// Run the connective and antecedent filters over sentence lines.
    Mine(MineArgs),
    /// Attach gender-heuristic labels, optionally neutralizing the giveaway.
    Label(LabelArgs),
    /// Emit each instance followed by its switched copy.
    Augment(AugmentArgs),
    /// Emit aligned original and switched files.
    Pair(PairArgs),
    /// Run a resolver and write one prediction line per instance.
    Resolve(ResolveArgs),
    /// Score predictions against a labeled corpus.
    Evaluate(EvaluateArgs),
    /// Score the agreement between predictions on original and switched
    /// files.
    Consistency(ConsistencyArgs),
    /// Pronoun-gender and answer-position rates of a corpus.
    Stats(CorpusArgs),
    /// Fleiss' kappa (and optionally majority accuracy) for a label matrix.
    Kappa(KappaArgs),
    /// Compare heuristic labels with a human-annotated sample.
    Qc(QcArgs),
    /// Run the annotation HTTP service.
    Serve(ServeArgs),
    /// Check every record of a corpus file.
    Validate(CorpusArgs),
    /// Train a part-of-speech tagger from `word_TAG` lines.
    TrainTagger(TrainTaggerArgs),
    /// Train an n-gram model for the substitution resolver.
    TrainLm(TrainLmArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Style {
    Plain,
    WikiExtract,
    Subtitles,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// A text file or a directory of them (read in name order).
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum)]
    pub style: Option<Style>,
    #[arg(long)]
    pub min_tokens: Option<usize>,
    #[arg(long)]
    pub max_tokens: Option<usize>,
    /// Log of `id<TAB>stage<TAB>reason` lines for dropped sentences.
    #[arg(long)]
    pub rejections: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MineArgs {
    /// Sentence lines `id<TAB>text`.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub rejections: Option<PathBuf>,
    /// Source tag stored on each instance; defaults to the input file stem.
    #[arg(long)]
    pub source: Option<String>,
    /// Pre-tagged `word_TAG` stream used instead of the statistical tagger.
    #[arg(long)]
    pub tagged: Option<PathBuf>,
    /// Tagger model written by `train-tagger`.
    #[arg(long)]
    pub tagger_model: Option<PathBuf>,
    /// Name lexicon (`name<TAB>M|F[<TAB>count]`) for the person test.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long)]
    pub min_tokens: Option<usize>,
    #[arg(long)]
    pub max_tokens: Option<usize>,
    /// Comma-separated connective list.
    #[arg(long, value_delimiter = ',')]
    pub connectives: Option<Vec<String>>,
}

#[derive(Debug, Args)]
pub struct LabelArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Replace the candidate whose gender gives the answer away.
    #[arg(long)]
    pub neutralize: bool,
    /// Log of `id<TAB>reason` lines for instances left unlabeled.
    #[arg(long)]
    pub abstentions: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AugmentArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Log of instances that could not be switched.
    #[arg(long)]
    pub skipped: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out_original: PathBuf,
    #[arg(long)]
    pub out_switched: PathBuf,
    #[arg(long)]
    pub skipped: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ResolverKind {
    Random,
    First,
    Second,
    GenderRule,
    Ngram,
    External,
}

#[derive(Debug, Args)]
pub struct ResolveArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum)]
    pub resolver: ResolverKind,
    /// N-gram model for `ngram`.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Prediction file for `external`.
    #[arg(long)]
    pub predictions: Option<PathBuf>,
    /// Adapter program for `external`; records go to its stdin.
    #[arg(long, num_args = 1.., allow_hyphen_values = true)]
    pub command: Option<Vec<String>>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub predictions: PathBuf,
    /// Treat an instance without a prediction as an error.
    #[arg(long)]
    pub strict: bool,
    /// Also write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConsistencyArgs {
    #[arg(long)]
    pub original: PathBuf,
    #[arg(long)]
    pub switched: PathBuf,
    #[arg(long)]
    pub pred_original: PathBuf,
    #[arg(long)]
    pub pred_switched: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    #[arg(long)]
    pub corpus: PathBuf,
}

#[derive(Debug, Args)]
pub struct KappaArgs {
    /// Either a JSON matrix `{"raters": R, "rows": [[n1, n2, n3, n4], ...]}`
    /// or whitespace-separated rows of four counts.
    #[arg(long)]
    pub matrix: PathBuf,
    /// Raters per item; inferred from the first row when absent.
    #[arg(long)]
    pub raters: Option<u32>,
    /// One gold label (1 or 2) per row, for majority accuracy.
    #[arg(long)]
    pub gold: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QcArgs {
    /// Heuristically labeled corpus.
    #[arg(long)]
    pub corpus: PathBuf,
    /// `id<TAB>label` lines with labels 1, 2, neither or unclear.
    #[arg(long)]
    pub annotations: PathBuf,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub store: PathBuf,
    #[arg(long)]
    pub port: Option<u16>,
    #[arg(long)]
    pub host: Option<String>,
    /// Matching labels needed to accept an item.
    #[arg(long)]
    pub threshold: Option<u32>,
    /// Labels collected per item.
    #[arg(long)]
    pub annotators: Option<u32>,
}

#[derive(Debug, Args)]
pub struct TrainTaggerArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub epochs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TrainLmArgs {
    /// Plain text, one sentence per line (an `id<TAB>` prefix is dropped).
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long)]
    pub k: Option<f64>,
}
