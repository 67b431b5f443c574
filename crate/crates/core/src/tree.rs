//! Node-array trees and the two ensemble aggregations.
//!
//! Every node carries its training `cover` (number of training samples
//! reaching it) and `value` (mean model output over those samples). The
//! attribution code relies on both, so [`Tree::new`] refuses trees whose
//! covers do not add up or whose internal values are not the cover-weighted
//! mean of their children.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute/relative slack allowed between a node value and its children's mean.
pub const VALUE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Internal {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        cover: u64,
        value: f64,
        /// Training-time impurity decrease of the split, when known.
        impurity_decrease: Option<f64>,
    },
    Leaf {
        cover: u64,
        value: f64,
    },
}

impl TreeNode {
    pub fn leaf(value: f64, cover: u64) -> Self {
        TreeNode::Leaf { cover, value }
    }

    pub fn split(
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        cover: u64,
        value: f64,
    ) -> Self {
        TreeNode::Internal {
            feature,
            threshold,
            left,
            right,
            cover,
            value,
            impurity_decrease: None,
        }
    }

    #[inline]
    pub fn cover(&self) -> u64 {
        match *self {
            TreeNode::Internal { cover, .. } | TreeNode::Leaf { cover, .. } => cover,
        }
    }

    #[inline]
    pub fn value(&self) -> f64 {
        match *self {
            TreeNode::Internal { value, .. } | TreeNode::Leaf { value, .. } => value,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, TreeNode::Leaf { .. })
    }

    pub(crate) fn scale_value(&mut self, c: f64) {
        match self {
            TreeNode::Internal { value, .. } | TreeNode::Leaf { value, .. } => *value *= c,
        }
    }
}

/// Routing rule shared by prediction and attribution: strictly below goes left.
#[inline]
pub fn goes_left(x: f64, threshold: f64) -> bool {
    x < threshold
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: Vec<TreeNode>,
    root: usize,
}

impl Tree {
    pub fn new(nodes: Vec<TreeNode>, root: usize) -> Result<Self> {
        let tree = Self { nodes, root };
        tree.check()
            .map_err(|(node, reason)| Error::NodeValidation {
                tree: 0,
                node: node as i64,
                reason,
            })?;
        Ok(tree)
    }

    pub(crate) fn new_unchecked(nodes: Vec<TreeNode>, root: usize) -> Self {
        Self { nodes, root }
    }

    pub fn single_leaf(value: f64, cover: u64) -> Self {
        Self {
            nodes: vec![TreeNode::leaf(value, cover)],
            root: 0,
        }
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.root
    }

    #[inline]
    pub fn node(&self, id: usize) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn root_node(&self) -> &TreeNode {
        &self.nodes[self.root]
    }

    /// Base value: expected output over the training samples.
    pub fn root_value(&self) -> f64 {
        self.root_node().value()
    }

    /// Index of the leaf reached by `x`.
    pub fn leaf_index(&self, x: &[f64]) -> Result<usize> {
        let mut id = self.root;
        loop {
            match self.nodes[id] {
                TreeNode::Leaf { .. } => return Ok(id),
                TreeNode::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    let v = feature_value(x, feature)?;
                    id = if goes_left(v, threshold) { left } else { right };
                }
            }
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        Ok(self.nodes[self.leaf_index(x)?].value())
    }

    /// Sorted distinct features that appear in any split.
    pub fn features_used(&self) -> Vec<usize> {
        let mut features: Vec<usize> = self
            .nodes
            .iter()
            .filter_map(|n| match n {
                TreeNode::Internal { feature, .. } => Some(*feature),
                TreeNode::Leaf { .. } => None,
            })
            .collect();
        features.sort_unstable();
        features.dedup();
        features
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        let mut best = 0;
        let mut stack = vec![(self.root, 0usize)];
        while let Some((id, d)) = stack.pop() {
            match self.nodes[id] {
                TreeNode::Leaf { .. } => best = best.max(d),
                TreeNode::Internal { left, right, .. } => {
                    stack.push((left, d + 1));
                    stack.push((right, d + 1));
                }
            }
        }
        best
    }

    pub fn has_impurity_decreases(&self) -> bool {
        self.nodes.iter().all(|n| match n {
            TreeNode::Internal {
                impurity_decrease, ..
            } => impurity_decrease.is_some(),
            TreeNode::Leaf { .. } => true,
        })
    }

    /// Copy with every node value multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Tree {
        let mut nodes = self.nodes.clone();
        for n in &mut nodes {
            n.scale_value(c);
        }
        Tree::new_unchecked(nodes, self.root)
    }

    /// Verifies the structural and cover/value invariants. On failure returns
    /// the offending node index and a reason.
    pub(crate) fn check(&self) -> std::result::Result<(), (usize, String)> {
        let n = self.nodes.len();
        if n == 0 {
            return Err((0, "tree has no nodes".into()));
        }
        if self.root >= n {
            return Err((self.root, format!("root id out of range ({n} nodes)")));
        }
        let mut parents = vec![0u32; n];
        for (id, node) in self.nodes.iter().enumerate() {
            if node.cover() == 0 {
                return Err((id, "cover must be at least 1".into()));
            }
            if !node.value().is_finite() {
                return Err((id, "value is not finite".into()));
            }
            if let TreeNode::Internal {
                threshold,
                left,
                right,
                cover,
                value,
                impurity_decrease,
                ..
            } = *node
            {
                if !threshold.is_finite() {
                    return Err((id, "threshold is not finite".into()));
                }
                for child in [left, right] {
                    if child >= n {
                        return Err((id, format!("child id {child} is dangling")));
                    }
                    if child == self.root {
                        return Err((id, "root is referenced as a child".into()));
                    }
                    parents[child] += 1;
                }
                let (lc, rc) = (self.nodes[left].cover(), self.nodes[right].cover());
                if lc + rc != cover {
                    return Err((
                        id,
                        format!("cover {cover} differs from children covers {lc} + {rc}"),
                    ));
                }
                let mean = (lc as f64 * self.nodes[left].value()
                    + rc as f64 * self.nodes[right].value())
                    / cover as f64;
                if (mean - value).abs() > VALUE_TOLERANCE * value.abs().max(1.0) {
                    return Err((
                        id,
                        format!("value {value} differs from cover-weighted child mean {mean}"),
                    ));
                }
                if let Some(dec) = impurity_decrease {
                    if !(dec.is_finite() && dec >= 0.0) {
                        return Err((
                            id,
                            format!("impurity decrease {dec} is negative or not finite"),
                        ));
                    }
                }
            }
        }
        if let Some(id) = (0..n).find(|&id| id != self.root && parents[id] != 1) {
            return Err((
                id,
                format!("referenced {} times, expected once", parents[id]),
            ));
        }
        // With one parent per non-root node, full reachability rules out cycles.
        let mut seen = vec![false; n];
        let mut stack = vec![self.root];
        let mut reached = 0;
        while let Some(id) = stack.pop() {
            if std::mem::replace(&mut seen[id], true) {
                return Err((id, "cycle detected".into()));
            }
            reached += 1;
            if let TreeNode::Internal { left, right, .. } = self.nodes[id] {
                stack.push(left);
                stack.push(right);
            }
        }
        if reached != n {
            let orphan = seen.iter().position(|s| !s).unwrap_or(0);
            return Err((orphan, "node is not reachable from the root".into()));
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn feature_value(x: &[f64], feature: usize) -> Result<f64> {
    x.get(feature).copied().ok_or_else(|| {
        Error::InputShape(format!(
            "tree splits on feature {feature} but the instance has {} values",
            x.len()
        ))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleKind {
    /// Mean of tree outputs (random forest).
    ForestAverage,
    /// `base_score` plus the sum of tree outputs (gradient boosting margin).
    BoostedSum,
}

impl EnsembleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EnsembleKind::ForestAverage => "forest-average",
            EnsembleKind::BoostedSum => "boosted-sum",
        }
    }
}

impl FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "forest-average" => Ok(EnsembleKind::ForestAverage),
            "boosted-sum" => Ok(EnsembleKind::BoostedSum),
            other => Err(Error::UnknownKind(other.to_string())),
        }
    }
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputSpace {
    Probability,
    LogOdds,
}

impl OutputSpace {
    pub fn as_str(self) -> &'static str {
        match self {
            OutputSpace::Probability => "probability",
            OutputSpace::LogOdds => "log-odds",
        }
    }
}

impl FromStr for OutputSpace {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "probability" => Ok(OutputSpace::Probability),
            "log-odds" => Ok(OutputSpace::LogOdds),
            other => Err(Error::UnknownOutputSpace(other.to_string())),
        }
    }
}

impl fmt::Display for OutputSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    kind: EnsembleKind,
    base_score: f64,
    output_space: OutputSpace,
    feature_names: Vec<String>,
    trees: Vec<Tree>,
}

impl Ensemble {
    pub fn new(
        kind: EnsembleKind,
        base_score: f64,
        output_space: OutputSpace,
        feature_names: Vec<String>,
        trees: Vec<Tree>,
    ) -> Result<Self> {
        if trees.is_empty() {
            return Err(Error::InvalidModel("ensemble has no trees".into()));
        }
        if !base_score.is_finite() {
            return Err(Error::InvalidModel(format!(
                "base_score {base_score} is not finite"
            )));
        }
        if kind == EnsembleKind::ForestAverage && base_score != 0.0 {
            return Err(Error::InvalidModel(
                "forest-average ensembles must have base_score 0".into(),
            ));
        }
        let d = feature_names.len();
        for (t, tree) in trees.iter().enumerate() {
            tree.check()
                .map_err(|(node, reason)| Error::NodeValidation {
                    tree: t,
                    node: node as i64,
                    reason,
                })?;
            if let Some(&f) = tree.features_used().last() {
                if f >= d {
                    return Err(Error::InvalidModel(format!(
                        "tree {t} splits on feature {f} but the model declares {d} features"
                    )));
                }
            }
        }
        Ok(Self {
            kind,
            base_score,
            output_space,
            feature_names,
            trees,
        })
    }

    /// Forest-average ensemble in probability space.
    pub fn forest(trees: Vec<Tree>, feature_names: Vec<String>) -> Result<Self> {
        Self::new(
            EnsembleKind::ForestAverage,
            0.0,
            OutputSpace::Probability,
            feature_names,
            trees,
        )
    }

    pub fn kind(&self) -> EnsembleKind {
        self.kind
    }

    pub fn base_score(&self) -> f64 {
        self.base_score
    }

    /// Space of [`Ensemble::predict`].
    pub fn output_space(&self) -> OutputSpace {
        self.output_space
    }

    /// Space in which trees add up exactly and attributions are expressed:
    /// probability for forests, log-odds margin for boosting.
    pub fn raw_output_space(&self) -> OutputSpace {
        match self.kind {
            EnsembleKind::ForestAverage => OutputSpace::Probability,
            EnsembleKind::BoostedSum => OutputSpace::LogOdds,
        }
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    /// Combines per-tree quantities (in tree order) per the ensemble kind.
    pub(crate) fn aggregate(&self, per_tree: impl Iterator<Item = f64>) -> f64 {
        let sum: f64 = per_tree.sum();
        match self.kind {
            EnsembleKind::ForestAverage => sum / self.trees.len() as f64,
            EnsembleKind::BoostedSum => self.base_score + sum,
        }
    }

    /// Mean of tree outputs for forests; margin for boosting.
    pub fn predict_raw(&self, x: &[f64]) -> Result<f64> {
        let mut values = Vec::with_capacity(self.trees.len());
        for tree in &self.trees {
            values.push(tree.predict(x)?);
        }
        Ok(self.aggregate(values.into_iter()))
    }

    /// Prediction in the ensemble's declared output space.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        let raw = self.predict_raw(x)?;
        Ok(match (self.kind, self.output_space) {
            (EnsembleKind::BoostedSum, OutputSpace::Probability) => sigmoid(raw),
            _ => raw,
        })
    }

    /// Class-1 probability regardless of the declared output space.
    pub fn predict_proba(&self, x: &[f64]) -> Result<f64> {
        let raw = self.predict_raw(x)?;
        Ok(match self.kind {
            EnsembleKind::ForestAverage => raw,
            EnsembleKind::BoostedSum => sigmoid(raw),
        })
    }

    /// Attribution base value: aggregated root values, in raw output space.
    pub fn expected_value(&self) -> f64 {
        self.aggregate(self.trees.iter().map(Tree::root_value))
    }

    pub fn has_training_metadata(&self) -> bool {
        self.trees.iter().all(Tree::has_impurity_decreases)
    }
}
