//! Desk-scale CART, random forest and gradient boosting, plus MDI.

mod cart;
mod forest;
mod gbt;
mod mdi;
mod sampling;
pub mod split;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use cart::fit_cart;
pub use forest::fit_random_forest;
pub use gbt::{fit_gbt, fit_gbt_traced};
pub use mdi::mdi_importance;
pub use sampling::train_test_split;
pub use split::{best_split, gini, Criterion, SplitCandidate};

/// Candidate features examined at each node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum MaxFeatures {
    All,
    /// `floor(sqrt(d))`, at least one.
    Sqrt,
    Count(usize),
}

impl fmt::Display for MaxFeatures {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaxFeatures::All => f.write_str("all"),
            MaxFeatures::Sqrt => f.write_str("sqrt"),
            MaxFeatures::Count(k) => write!(f, "{k}"),
        }
    }
}

impl FromStr for MaxFeatures {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(MaxFeatures::All),
            "sqrt" => Ok(MaxFeatures::Sqrt),
            n => match n.parse::<usize>() {
                Ok(k) if k >= 1 => Ok(MaxFeatures::Count(k)),
                _ => Err(Error::Config(format!(
                    "max_features must be `all`, `sqrt` or a positive count, got `{n}`"
                ))),
            },
        }
    }
}

impl From<MaxFeatures> for String {
    fn from(m: MaxFeatures) -> String {
        m.to_string()
    }
}

impl TryFrom<String> for MaxFeatures {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub n_trees: usize,
    /// `None` grows until the sample limits or purity stop it.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    pub max_features: MaxFeatures,
    /// Shrinkage per boosting round; ignored by forests.
    pub learning_rate: f64,
    /// Forests only: draw each tree's rows with replacement. Disabling it is
    /// mostly useful to compare a one-tree forest against plain CART.
    pub bootstrap: bool,
    pub seed: u64,
}

impl TrainConfig {
    pub fn forest_defaults() -> Self {
        Self {
            n_trees: 100,
            max_depth: None,
            min_samples_split: 2,
            min_samples_leaf: 1,
            max_features: MaxFeatures::Sqrt,
            learning_rate: 0.1,
            bootstrap: true,
            seed: 42,
        }
    }

    pub fn boosting_defaults() -> Self {
        Self {
            n_trees: 100,
            max_depth: Some(3),
            min_samples_split: 2,
            min_samples_leaf: 1,
            max_features: MaxFeatures::All,
            learning_rate: 0.1,
            bootstrap: false,
            seed: 42,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::Config("n_trees must be at least 1".into()));
        }
        if self.max_depth == Some(0) {
            return Err(Error::Config("max_depth must be at least 1".into()));
        }
        if self.min_samples_leaf == 0 {
            return Err(Error::Config("min_samples_leaf must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(Error::Config(format!(
                "learning_rate must lie in (0, 1], got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }
}
