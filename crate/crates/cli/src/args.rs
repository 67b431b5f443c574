use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use treeattrib_core::harness::ModelKind;
use treeattrib_core::trainer::MaxFeatures;
use treeattrib_core::{LossKind, TrainConfig};

pub const DEFAULT_SEED: u64 = 42;

/// Train tree ensembles and compare CFC and SHAP attributions.
///
/// Options can also come from a key=value file given with --config. Keys
/// before any `[section]` apply to every subcommand that accepts them; keys
/// under `[train]`, `[compare-local]` and so on apply to that subcommand
/// only. Flags on the command line always win over the file.
#[derive(Debug, Parser)]
#[command(name = "treeattrib", version, propagate_version = true)]
pub struct Cli {
    /// Key=value options file; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Worker threads for training and attribution [default: all cores].
    #[arg(long, global = true, env = "TREEATTRIB_THREADS", value_name = "N")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a forest or boosted ensemble and save it as JSON.
    #[command(args_override_self = true)]
    Train(TrainArgs),
    /// Write per-instance CFC and/or SHAP attribution tables.
    #[command(args_override_self = true)]
    Explain(ExplainArgs),
    /// Correlate local SHAP and CFC scores feature by feature.
    #[command(name = "compare-local", args_override_self = true)]
    CompareLocal(CompareLocalArgs),
    /// Correlate retrained-subset test loss with total subset importance.
    #[command(name = "subset-power", args_override_self = true)]
    SubsetPower(SubsetPowerArgs),
    /// Check a saved model against every structural invariant.
    #[command(name = "validate-model", args_override_self = true)]
    ValidateModel(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Forest,
    Boosted,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Forest => ModelKind::Forest,
            ModelArg::Boosted => ModelKind::Boosted,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Cfc,
    Shap,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LossArg {
    Logloss,
    F1,
}

impl From<LossArg> for LossKind {
    fn from(l: LossArg) -> Self {
        match l {
            LossArg::Logloss => LossKind::LogLoss,
            LossArg::F1 => LossKind::OneMinusF1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Tsv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Tab- or comma-delimited file with a header row.
    #[arg(long, value_name = "FILE")]
    pub data: PathBuf,

    /// Binary target column.
    #[arg(long, default_value = "target", value_name = "NAME")]
    pub target: String,
}

/// Trainer hyperparameters. Unset values fall back to the defaults of the
/// chosen model kind.
#[derive(Debug, Clone, Args)]
pub struct TrainerFlags {
    /// Trees in the ensemble [default: 100].
    #[arg(long, value_name = "N")]
    pub n_trees: Option<usize>,

    /// Maximum tree depth, or `none` [default: none for forest, 3 for boosted].
    #[arg(long, value_name = "N|none", value_parser = parse_depth)]
    pub max_depth: Option<Depth>,

    /// Smallest node that may be split [default: 2].
    #[arg(long, value_name = "N")]
    pub min_samples_split: Option<usize>,

    /// Smallest allowed leaf [default: 1].
    #[arg(long, value_name = "N")]
    pub min_samples_leaf: Option<usize>,

    /// Features tried per split: all, sqrt or a count [default: sqrt for forest, all for boosted].
    #[arg(long, value_name = "all|sqrt|N", value_parser = parse_max_features)]
    pub max_features: Option<MaxFeatures>,

    /// Boosting shrinkage [default: 0.1].
    #[arg(long, value_name = "RATE")]
    pub learning_rate: Option<f64>,

    /// Bootstrap rows per forest tree [default: true].
    #[arg(long, value_name = "BOOL", action = clap::ArgAction::Set)]
    pub bootstrap: Option<bool>,
}

impl TrainerFlags {
    pub fn resolve(&self, kind: ModelKind, seed: u64) -> TrainConfig {
        let base = kind.default_train_config();
        TrainConfig {
            n_trees: self.n_trees.unwrap_or(base.n_trees),
            max_depth: self.max_depth.map_or(base.max_depth, |d| d.0),
            min_samples_split: self.min_samples_split.unwrap_or(base.min_samples_split),
            min_samples_leaf: self.min_samples_leaf.unwrap_or(base.min_samples_leaf),
            max_features: self.max_features.unwrap_or(base.max_features),
            learning_rate: self.learning_rate.unwrap_or(base.learning_rate),
            bootstrap: self.bootstrap.unwrap_or(base.bootstrap),
            seed,
        }
    }
}

/// Depth limit where `None` means unlimited.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Depth(pub Option<usize>);

fn parse_depth(s: &str) -> Result<Depth, String> {
    if s == "none" {
        return Ok(Depth(None));
    }
    s.parse::<usize>()
        .map(|d| Depth(Some(d)))
        .map_err(|_| format!("expected a depth or `none`, got `{s}`"))
}

fn parse_max_features(s: &str) -> Result<MaxFeatures, String> {
    s.parse().map_err(|e: treeattrib_core::Error| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,

    /// Ensemble type.
    #[arg(long, value_enum, default_value_t = ModelArg::Forest)]
    pub model: ModelArg,

    /// Where to write the model JSON.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,

    #[command(flatten)]
    pub trainer: TrainerFlags,

    /// Master seed for every random draw.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct ExplainArgs {
    /// Model JSON written by `train`.
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,

    /// Instances to explain; columns are matched to the model's features by
    /// name and any others are ignored.
    #[arg(long, value_name = "FILE")]
    pub data: PathBuf,

    /// Attribution method. `both` writes OUT.cfc.tsv and OUT.shap.tsv.
    #[arg(long, value_enum, default_value_t = MethodArg::Both)]
    pub method: MethodArg,

    /// Output table path, or `-` for standard output (single method only).
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct StudyArgs {
    #[command(flatten)]
    pub data: DataArgs,

    /// Ensemble type trained for the study.
    #[arg(long, value_enum, default_value_t = ModelArg::Forest)]
    pub model_kind: ModelArg,

    #[command(flatten)]
    pub trainer: TrainerFlags,

    /// Report path, or `-` for standard output.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,

    /// Report format.
    #[arg(long, value_enum, default_value_t = FormatArg::Tsv)]
    pub format: FormatArg,

    /// Master seed for every random draw.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct CompareLocalArgs {
    #[command(flatten)]
    pub study: StudyArgs,

    /// Share of total global SHAP importance the kept features must reach.
    #[arg(long, default_value_t = 0.8, value_name = "FRACTION")]
    pub filter: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SubsetPowerArgs {
    #[command(flatten)]
    pub study: StudyArgs,

    /// Random feature subsets to retrain on.
    #[arg(long, default_value_t = 1000, value_name = "N")]
    pub n_subsets: usize,

    /// Test loss of the retrained models.
    #[arg(long, value_enum, default_value_t = LossArg::Logloss)]
    pub loss: LossArg,

    /// Fraction of rows held out for testing (stratified).
    #[arg(long, default_value_t = 0.3, value_name = "FRACTION")]
    pub test_fraction: f64,

    /// Also write one row per sampled subset to this file.
    #[arg(long, value_name = "FILE")]
    pub samples_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    /// Model JSON to check.
    #[arg(value_name = "MODEL")]
    pub model: PathBuf,
}
