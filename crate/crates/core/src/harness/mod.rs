//! The two comparison studies between SHAP and CFC scores.
//!
//! * [`local_correlation_study`]: per feature, how linearly related the
//!   local SHAP and CFC scores are across instances, with an importance
//!   filter that keeps the features making up a given share of the total.
//! * [`subset_power_study`]: how well the summed global importance of a
//!   random feature subset tracks the test loss of a model retrained on it.

mod local;
pub mod metrics;
mod report;
mod subset;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::attribution::FeatureSubset;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::trainer::{fit_gbt, fit_random_forest, TrainConfig};
use crate::tree::Ensemble;

pub use local::{compare_model_locally, filter_kept, local_correlation_study};
pub use metrics::{f1_score, log_loss, pearson_r, r_squared};
pub use report::{
    read_report, render_report, write_report, write_samples, ReportFormat, TABLE_HEADER,
};
pub use subset::{sample_feature_subset, subset_power_study};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Forest,
    Boosted,
}

impl ModelKind {
    pub fn default_train_config(self) -> TrainConfig {
        match self {
            ModelKind::Forest => TrainConfig::forest_defaults(),
            ModelKind::Boosted => TrainConfig::boosting_defaults(),
        }
    }

    pub fn train(self, ds: &Dataset, config: &TrainConfig) -> Result<Ensemble> {
        match self {
            ModelKind::Forest => fit_random_forest(ds, config),
            ModelKind::Boosted => fit_gbt(ds, config),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Forest => "forest",
            ModelKind::Boosted => "boosted",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "forest" => Ok(ModelKind::Forest),
            "boosted" => Ok(ModelKind::Boosted),
            other => Err(Error::Config(format!("unknown model kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossKind {
    LogLoss,
    OneMinusF1,
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LossKind::LogLoss => "log-loss",
            LossKind::OneMinusF1 => "one-minus-f1",
        })
    }
}

impl FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "logloss" | "log-loss" => Ok(LossKind::LogLoss),
            "f1" | "one-minus-f1" => Ok(LossKind::OneMinusF1),
            other => Err(Error::Config(format!("unknown loss `{other}`"))),
        }
    }
}

impl LossKind {
    /// Loss of class-1 probabilities `p` against labels `y`.
    pub fn evaluate(self, y: &[u8], p: &[f64]) -> Result<f64> {
        match self {
            LossKind::LogLoss => log_loss(y, p),
            LossKind::OneMinusF1 => {
                let hard: Vec<u8> = p.iter().map(|&v| metrics::threshold(v)).collect();
                Ok(1.0 - f1_score(y, &hard)?)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub seed: u64,
    pub model_kind: ModelKind,
    pub train_config: TrainConfig,
    pub test_fraction: f64,
    pub n_subsets: usize,
    pub filter_fraction: f64,
    pub loss: LossKind,
}

impl StudyConfig {
    /// Defaults for `model_kind`; the trainer seed follows `seed`.
    pub fn new(model_kind: ModelKind, seed: u64) -> Self {
        Self {
            seed,
            model_kind,
            train_config: TrainConfig {
                seed,
                ..model_kind.default_train_config()
            },
            test_fraction: 0.3,
            n_subsets: 1000,
            filter_fraction: 0.8,
            loss: LossKind::LogLoss,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.train_config.validate()?;
        if !(self.filter_fraction > 0.0 && self.filter_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "filter fraction must lie in (0, 1], got {}",
                self.filter_fraction
            )));
        }
        if self.n_subsets == 0 {
            return Err(Error::Config("n_subsets must be at least 1".into()));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::Config(format!(
                "test fraction must lie in (0, 1), got {}",
                self.test_fraction
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StudyKind {
    LocalCorrelation,
    SubsetPower,
}

impl fmt::Display for StudyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StudyKind::LocalCorrelation => "local-correlation",
            StudyKind::SubsetPower => "subset-power",
        })
    }
}

/// Correlation that may be undefined (constant input or a single point).
/// Serialized as a number, or the string `"nan"` when undefined.
pub type Correlation = Option<f64>;

mod nan_as_string {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => x.serialize(s),
            None => s.serialize_str("nan"),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum NumOrNan {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        match NumOrNan::deserialize(d)? {
            NumOrNan::Num(x) => Ok(Some(x)),
            NumOrNan::Str(s) if s == "nan" => Ok(None),
            NumOrNan::Str(s) => Err(serde::de::Error::custom(format!(
                "expected a number or \"nan\", got {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureCorrelation {
    /// 1-based position when sorted by global SHAP importance.
    pub rank: usize,
    pub feature: String,
    pub index: usize,
    #[serde(with = "nan_as_string")]
    pub pearson_r: Correlation,
    #[serde(with = "nan_as_string")]
    pub r_squared: Correlation,
    pub global_shap: f64,
    pub global_cfc: f64,
    pub kept_by_filter: bool,
}

impl FeatureCorrelation {
    pub fn is_undefined(&self) -> bool {
        self.pearson_r.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyLevel {
    #[serde(with = "nan_as_string")]
    pub corr_shap_loss: Correlation,
    #[serde(with = "nan_as_string")]
    pub corr_cfc_loss: Correlation,
    pub loss: LossKind,
    pub n_subsets: usize,
    /// Subsets whose retraining failed and were left out.
    pub n_skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetSample {
    pub subset: FeatureSubset,
    pub k: usize,
    pub retrained_loss: f64,
    pub total_importance_shap: f64,
    pub total_importance_cfc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub study: StudyKind,
    pub dataset: String,
    /// Rows whose local attributions fed the per-feature statistics.
    pub n_instances: usize,
    pub config: StudyConfig,
    pub notes: Vec<String>,
    pub per_feature: Vec<FeatureCorrelation>,
    pub study_level: Option<StudyLevel>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub samples: Vec<SubsetSample>,
}

impl Serialize for FeatureSubset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("FeatureSubset", 2)?;
        st.serialize_field("universe", &self.universe())?;
        st.serialize_field("members", &self.to_vec())?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for FeatureSubset {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            universe: usize,
            members: Vec<usize>,
        }
        let raw = Raw::deserialize(d)?;
        if let Some(&bad) = raw.members.iter().find(|&&m| m >= raw.universe) {
            return Err(serde::de::Error::custom(format!(
                "member {bad} outside universe of {}",
                raw.universe
            )));
        }
        Ok(FeatureSubset::from_indices(raw.universe, raw.members))
    }
}
