//! Local feature attributions for tree ensembles.
//!
//! Trains random forests and gradient-boosted trees on binary tabular
//! data, explains predictions with conditional feature contributions (CFC)
//! and exact path-dependent Shapley values (SHAP), and runs two studies
//! comparing the methods.

pub mod attribution;
pub mod dataset;
pub mod error;
pub mod harness;
pub mod model_io;
pub mod rng;
pub mod synthetic;
pub mod trainer;
pub mod tree;

pub use attribution::{
    cfc_ensemble, cfc_tree, explain, expvalue_conditional, global_importance, shap_bruteforce,
    shap_ensemble, shap_tree, AttributionResult, FeatureSubset, Method,
};
pub use dataset::{load_dataset, load_instances, Dataset};
pub use error::{Error, Result};
pub use harness::{CorrelationReport, LossKind, ModelKind, StudyConfig};
pub use model_io::{load_model, save_model};
pub use trainer::{MaxFeatures, TrainConfig};
pub use tree::{Ensemble, EnsembleKind, OutputSpace, Tree, TreeNode};
