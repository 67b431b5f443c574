//! Per-instance feature attributions for tree ensembles.
//!
//! Two methods share the same path-dependent conditional expectation (node
//! values estimated from training covers):
//!
//! * conditional feature contributions (CFC), which credit each split on the
//!   decision path with the change in node value, i.e. a single feature
//!   ordering fixed by the path;
//! * Shapley values, which average the same marginal changes over all
//!   feature orderings. [`shap_tree`] is polynomial; [`shap_bruteforce`]
//!   enumerates coalitions and serves as its oracle.
//!
//! Ensemble attributions are in the raw output space: averaged over trees
//! for forests, summed (plus `base_score`) for boosting.

mod bruteforce;
mod cfc;
mod conditional;
mod subset;
mod table;
mod treeshap;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::tree::{Ensemble, EnsembleKind, OutputSpace};

pub use bruteforce::{shap_bruteforce, ORACLE_MAX_FEATURES};
pub use cfc::{cfc_tree, decision_path, DecisionPath, Direction, PathStep};
pub use conditional::expvalue_conditional;
pub use subset::FeatureSubset;
pub use table::{read_table, write_table};
pub use treeshap::shap_tree;

use treeshap::TreeShape;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Cfc,
    Shap,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Cfc => "cfc",
            Method::Shap => "shap",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cfc" => Ok(Method::Cfc),
            "shap" => Ok(Method::Shap),
            other => Err(Error::Config(format!(
                "unknown attribution method `{other}`"
            ))),
        }
    }
}

/// Instances × features attribution matrix with its intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributionResult {
    pub method: Method,
    pub base_value: f64,
    pub output_space: OutputSpace,
    pub feature_names: Vec<String>,
    /// Row-major, `n_instances * feature_names.len()` values.
    phi: Vec<f64>,
}

impl AttributionResult {
    pub fn new(
        method: Method,
        base_value: f64,
        output_space: OutputSpace,
        feature_names: Vec<String>,
        phi: Vec<f64>,
    ) -> Result<Self> {
        let d = feature_names.len();
        if (d == 0 && !phi.is_empty()) || (d > 0 && !phi.len().is_multiple_of(d)) {
            return Err(Error::InputShape(format!(
                "{} attribution values do not fill rows of {d} features",
                phi.len()
            )));
        }
        Ok(Self {
            method,
            base_value,
            output_space,
            feature_names,
            phi,
        })
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn n_instances(&self) -> usize {
        if self.n_features() == 0 {
            0
        } else {
            self.phi.len() / self.n_features()
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let d = self.n_features();
        &self.phi[i * d..(i + 1) * d]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_instances()).map(|i| self.row(i)[j]).collect()
    }

    /// `base_value + Σ phi` for instance `i`.
    pub fn reconstructed_output(&self, i: usize) -> f64 {
        self.base_value + self.row(i).iter().sum::<f64>()
    }
}

fn check_rows<R: AsRef<[f64]>>(ens: &Ensemble, rows: &[R]) -> Result<()> {
    let d = ens.n_features();
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.as_ref().len() != d) {
        return Err(Error::InputShape(format!(
            "instance {i} has {} values but the model has {d} features",
            r.as_ref().len()
        )));
    }
    Ok(())
}

fn attribute<R, F>(
    ens: &Ensemble,
    rows: &[R],
    method: Method,
    per_tree: F,
) -> Result<AttributionResult>
where
    R: AsRef<[f64]> + Sync,
    F: Fn(usize, &[f64], &mut [f64]) -> Result<()> + Sync,
{
    check_rows(ens, rows)?;
    let d = ens.n_features();
    let n_trees = ens.trees().len() as f64;
    // Rows run in parallel; within a row trees accumulate in fixed order.
    let per_row: Vec<Vec<f64>> = rows
        .par_iter()
        .map(|row| {
            let x = row.as_ref();
            let mut phi = vec![0.0; d];
            for t in 0..ens.trees().len() {
                per_tree(t, x, &mut phi)?;
            }
            if ens.kind() == EnsembleKind::ForestAverage {
                for v in &mut phi {
                    *v /= n_trees;
                }
            }
            Ok(phi)
        })
        .collect::<Result<_>>()?;
    AttributionResult::new(
        method,
        ens.expected_value(),
        ens.raw_output_space(),
        ens.feature_names().to_vec(),
        per_row.concat(),
    )
}

/// Conditional feature contributions for every row of `rows`.
pub fn cfc_ensemble<R: AsRef<[f64]> + Sync>(
    ens: &Ensemble,
    rows: &[R],
) -> Result<AttributionResult> {
    attribute(ens, rows, Method::Cfc, |t, x, phi| {
        cfc::cfc_tree_into(&ens.trees()[t], x, phi)
    })
}

/// Path-dependent Shapley values for every row of `rows`.
pub fn shap_ensemble<R: AsRef<[f64]> + Sync>(
    ens: &Ensemble,
    rows: &[R],
) -> Result<AttributionResult> {
    let shapes: Vec<TreeShape> = ens.trees().iter().map(TreeShape::of).collect();
    attribute(ens, rows, Method::Shap, |t, x, phi| {
        treeshap::shap_tree_into(&ens.trees()[t], shapes[t], x, phi)
    })
}

pub fn explain<R: AsRef<[f64]> + Sync>(
    ens: &Ensemble,
    rows: &[R],
    method: Method,
) -> Result<AttributionResult> {
    match method {
        Method::Cfc => cfc_ensemble(ens, rows),
        Method::Shap => shap_ensemble(ens, rows),
    }
}

/// Mean absolute attribution per feature.
pub fn global_importance(ar: &AttributionResult) -> Result<Vec<f64>> {
    let n = ar.n_instances();
    if n == 0 {
        return Err(Error::UndefinedInput("global importance of zero instances"));
    }
    let mut totals = vec![0.0; ar.n_features()];
    for i in 0..n {
        for (t, v) in totals.iter_mut().zip(ar.row(i)) {
            *t += v.abs();
        }
    }
    Ok(totals.into_iter().map(|t| t / n as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{Tree, TreeNode};

    fn t1() -> Tree {
        Tree::new(
            vec![
                TreeNode::split(0, 0.5, 1, 2, 100, 0.44),
                TreeNode::leaf(0.2, 60),
                TreeNode::leaf(0.8, 40),
            ],
            0,
        )
        .unwrap()
    }

    fn t2() -> Tree {
        Tree::new(
            vec![
                TreeNode::split(0, 0.5, 1, 2, 100, 0.75),
                TreeNode::split(1, 0.5, 3, 4, 50, 0.5),
                TreeNode::leaf(1.0, 50),
                TreeNode::leaf(0.0, 25),
                TreeNode::leaf(1.0, 25),
            ],
            0,
        )
        .unwrap()
    }

    fn names(d: usize) -> Vec<String> {
        (0..d).map(|i| format!("f{i}")).collect()
    }

    #[test]
    fn mixed_forest_cfc() {
        let ens = Ensemble::forest(vec![t1(), t2()], names(2)).unwrap();
        let ar = cfc_ensemble(&ens, &[[0.3, 0.7]]).unwrap();
        assert!((ar.base_value - 0.595).abs() < 1e-15);
        assert!((ar.row(0)[0] + 0.245).abs() < 1e-15);
        assert!((ar.row(0)[1] - 0.25).abs() < 1e-15);
        assert!((ar.reconstructed_output(0) - ens.predict_raw(&[0.3, 0.7]).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn duplicated_trees_match_single_tree() {
        let one = Ensemble::forest(vec![t2()], names(2)).unwrap();
        let two = Ensemble::forest(vec![t2(), t2()], names(2)).unwrap();
        let x = [[0.3, 0.7]];
        assert_eq!(
            cfc_ensemble(&one, &x).unwrap().row(0),
            cfc_ensemble(&two, &x).unwrap().row(0)
        );
        let shap = shap_ensemble(&two, &x).unwrap();
        assert!((shap.row(0)[0] + 0.125).abs() < 1e-15);
        assert!((shap.row(0)[1] - 0.375).abs() < 1e-15);
    }

    #[test]
    fn single_feature_forest_cfc_equals_shap() {
        let ens = Ensemble::forest(vec![t1()], names(1)).unwrap();
        let rows = [[0.7], [0.1]];
        let c = cfc_ensemble(&ens, &rows).unwrap();
        let s = shap_ensemble(&ens, &rows).unwrap();
        assert_eq!(c.row(0), s.row(0));
        assert_eq!(c.row(1), s.row(1));
        assert!((c.row(0)[0] - 0.36).abs() < 1e-15);
    }

    #[test]
    fn zero_boosted_tree_gives_base_score() {
        let ens = Ensemble::new(
            EnsembleKind::BoostedSum,
            -0.4,
            OutputSpace::Probability,
            names(2),
            vec![Tree::single_leaf(0.0, 9)],
        )
        .unwrap();
        let ar = cfc_ensemble(&ens, &[[1.0, 2.0]]).unwrap();
        assert_eq!(ar.base_value, -0.4);
        assert_eq!(ar.row(0), &[0.0, 0.0]);
        assert_eq!(ar.output_space, OutputSpace::LogOdds);
    }

    #[test]
    fn wrong_width_rows_are_rejected() {
        let ens = Ensemble::forest(vec![t2()], names(2)).unwrap();
        assert!(matches!(
            cfc_ensemble(&ens, &[vec![0.1]]),
            Err(Error::InputShape(_))
        ));
    }

    #[test]
    fn global_importance_is_mean_absolute() {
        let ar = AttributionResult::new(
            Method::Shap,
            0.0,
            OutputSpace::Probability,
            names(2),
            vec![0.2, 0.0, -0.4, 0.0],
        )
        .unwrap();
        let g = global_importance(&ar).unwrap();
        assert!((g[0] - 0.3).abs() < 1e-15);
        assert_eq!(g[1], 0.0);
        let single = AttributionResult::new(
            Method::Cfc,
            0.0,
            OutputSpace::Probability,
            names(1),
            vec![-0.7],
        )
        .unwrap();
        assert_eq!(global_importance(&single).unwrap(), vec![0.7]);
        let empty =
            AttributionResult::new(Method::Cfc, 0.0, OutputSpace::Probability, names(1), vec![])
                .unwrap();
        assert!(global_importance(&empty).is_err());
    }
}
