use std::path::{Path, PathBuf};

use affect_core::normalize::NormalizationPlan;
use affect_core::personality::{DEFAULT_RANK, DEFAULT_SAMPLE_SIZE, DEFAULT_VOCAB_SIZE};
use affect_core::textprep::DEFAULT_MIN_DOC_FREQ;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::CliError;

/// Environment variable naming a directory searched for lexicon and model
/// paths that do not exist relative to the working directory.
pub const DATA_DIR_ENV: &str = "AFFECT_DATA_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "affect",
    version,
    about = "Lexicon scoring and personality prediction for short informal text"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Score documents against one lexicon.
    Score(ScoreArgs),
    /// Rank documents under every lexicon of a group.
    Rank(RankArgs),
    /// Osgood evaluation / activity / potency profiles.
    Osgood(OsgoodArgs),
    /// Fit both pole models of a trait and save the classifier.
    Train(TrainArgs),
    /// Classify documents with a saved classifier.
    Predict(PredictArgs),
    /// Train/test evaluation of one or more traits.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    /// `.csv` files are CSV, anything else plain text.
    Auto,
    Text,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Tsv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionArg {
    Highest,
    Lowest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisArg {
    Evaluation,
    Activity,
    Potency,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleArg {
    Larger,
    Smaller,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CorpusArgs {
    /// Corpus file: one document per line, or CSV with a header row.
    #[arg(long, visible_alias = "corpus")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    pub input_format: InputFormat,
    /// CSV column holding document ids.
    #[arg(long, default_value = "id")]
    pub id_column: String,
    /// CSV column holding document text.
    #[arg(long, default_value = "text")]
    pub text_column: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "tsv")]
    pub format: OutputFormat,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Run manifest path; defaults to `<output>.manifest.json`.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RankingArgs {
    /// Pipeline: `raw` or a comma list of log, digamma|plain, zscore.
    #[arg(long, default_value = "raw")]
    pub pipeline: String,
    /// Drop tokens found in fewer documents than this.
    #[arg(long, default_value_t = 1)]
    pub min_doc_freq: usize,
    /// Keep only the first N documents of each ranking.
    #[arg(long)]
    pub top: Option<usize>,
    #[arg(long, value_enum, default_value = "highest")]
    pub direction: DirectionArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScoreArgs {
    /// Bundled lexicon name (`wish`, `preference`) or a lexicon file path.
    #[arg(long)]
    pub lexicon: String,
    /// Category to read from a word-category-flag file; without it the file
    /// is read as word-weight.
    #[arg(long)]
    pub category: Option<String>,
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub ranking: RankingArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RankArgs {
    /// Group name: bundled `desire`, `wishes`, `preferences`, or `emotions` /
    /// `mood` once an NRC file is given.
    #[arg(long)]
    pub group: String,
    /// NRC-style word-category-flag file to add to the registry.
    #[arg(long)]
    pub lexicon_file: Option<PathBuf>,
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub ranking: RankingArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OsgoodArgs {
    /// Four-column file: word, evaluation, activity, potency loadings.
    #[arg(long)]
    pub dims: PathBuf,
    /// Axis that orders the output.
    #[arg(long, value_enum, default_value = "evaluation")]
    pub axis: AxisArg,
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub ranking: RankingArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    /// Retained SVD rank.
    #[arg(long, default_value_t = DEFAULT_RANK)]
    pub k: usize,
    /// Documents sampled per pole.
    #[arg(long, default_value_t = DEFAULT_SAMPLE_SIZE)]
    pub sample_size: usize,
    /// Most frequent words kept per pole.
    #[arg(long, default_value_t = DEFAULT_VOCAB_SIZE)]
    pub vocab_size: usize,
    #[arg(long, default_value_t = DEFAULT_MIN_DOC_FREQ)]
    pub min_doc_freq: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Which norm change claims a document.
    #[arg(long, value_enum, default_value = "larger")]
    pub rule: RuleArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TrainArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// CSV label column to model.
    #[arg(long = "trait")]
    pub trait_name: String,
    #[arg(long)]
    pub model_dir: PathBuf,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PredictArgs {
    #[arg(long)]
    pub model_dir: PathBuf,
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Trait to evaluate; repeatable. Every label column when omitted.
    #[arg(long = "trait")]
    pub traits: Vec<String>,
    #[arg(long, default_value_t = 0.2)]
    pub test_fraction: f64,
    /// Extra seeds whose runs are averaged alongside `--seed`.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Vec<u64>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// A validated command line.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub command: Command,
}

/// Resolves `path` against the working directory, then against the data
/// directory named by [`DATA_DIR_ENV`].
pub fn resolve_path(path: &Path) -> Option<PathBuf> {
    if path.exists() {
        return Some(path.to_path_buf());
    }
    if path.is_relative() {
        if let Some(dir) = std::env::var_os(DATA_DIR_ENV) {
            let candidate = Path::new(&dir).join(path);
            if candidate.exists() {
                return Some(candidate);
            }
        }
    }
    None
}

fn require(path: &Path, what: &str) -> Result<PathBuf, CliError> {
    resolve_path(path).ok_or_else(|| CliError::Validation(format!("{what} not found: {}", path.display())))
}

fn positive(value: usize, name: &str) -> Result<(), CliError> {
    if value == 0 {
        Err(CliError::Validation(format!("--{name} must be positive")))
    } else {
        Ok(())
    }
}

fn check_ranking(r: &mut RankingArgs) -> Result<(), CliError> {
    NormalizationPlan::parse(&r.pipeline).map_err(|e| CliError::Validation(e.to_string()))?;
    positive(r.min_doc_freq, "min-doc-freq")?;
    if let Some(k) = r.top {
        positive(k, "top")?;
    }
    Ok(())
}

fn check_model(m: &ModelArgs) -> Result<(), CliError> {
    positive(m.k, "k")?;
    positive(m.sample_size, "sample-size")?;
    positive(m.vocab_size, "vocab-size")?;
    positive(m.min_doc_freq, "min-doc-freq")
}

impl RunConfig {
    /// Checks numeric parameters and pipeline syntax, and resolves every
    /// input path.
    pub fn validate(mut command: Command) -> Result<Self, CliError> {
        match &mut command {
            Command::Score(a) => {
                a.corpus.input = require(&a.corpus.input, "input")?;
                check_ranking(&mut a.ranking)?;
                if affect_core::lexicons::bundled_lexicons().get(&a.lexicon).is_err() {
                    a.lexicon = require(Path::new(&a.lexicon), "lexicon")?.display().to_string();
                }
            }
            Command::Rank(a) => {
                a.corpus.input = require(&a.corpus.input, "input")?;
                check_ranking(&mut a.ranking)?;
                if let Some(f) = &a.lexicon_file {
                    a.lexicon_file = Some(require(f, "lexicon file")?);
                }
            }
            Command::Osgood(a) => {
                a.corpus.input = require(&a.corpus.input, "input")?;
                a.dims = require(&a.dims, "dimension file")?;
                check_ranking(&mut a.ranking)?;
            }
            Command::Train(a) => {
                a.corpus.input = require(&a.corpus.input, "corpus")?;
                check_model(&a.model)?;
            }
            Command::Predict(a) => {
                a.corpus.input = require(&a.corpus.input, "input")?;
                a.model_dir = require(&a.model_dir, "model directory")?;
            }
            Command::Evaluate(a) => {
                a.corpus.input = require(&a.corpus.input, "corpus")?;
                check_model(&a.model)?;
                if !(a.test_fraction > 0.0 && a.test_fraction < 1.0) {
                    return Err(CliError::Validation("--test-fraction must lie in (0, 1)".into()));
                }
            }
        }
        Ok(RunConfig { command })
    }
}
