//! JSON model documents.
//!
//! ```text
//! {"kind": "forest-average" | "boosted-sum", "base_score": f64,
//!  "output_space": "probability" | "log-odds", "feature_names": [...],
//!  "trees": [{"root": id, "nodes": [{"id", "feature", "threshold",
//!             "left", "right", "cover", "value"}]}]}
//! ```
//!
//! Leaves carry `null` for feature, threshold and children. Models written by
//! the trainer additionally store `impurity_decrease` on internal nodes, which
//! MDI needs. Floats are written in shortest round-trip form and parsed with
//! correct rounding, so a save/load cycle is bit-exact.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{Ensemble, Tree, TreeNode};

#[derive(Debug, Serialize, Deserialize)]
struct ModelDoc {
    kind: String,
    base_score: f64,
    output_space: String,
    feature_names: Vec<String>,
    trees: Vec<TreeDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TreeDoc {
    root: i64,
    nodes: Vec<NodeDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeDoc {
    id: i64,
    feature: Option<i64>,
    threshold: Option<f64>,
    left: Option<i64>,
    right: Option<i64>,
    cover: u64,
    value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    impurity_decrease: Option<f64>,
}

pub fn to_json(ens: &Ensemble) -> String {
    let doc = ModelDoc {
        kind: ens.kind().as_str().to_string(),
        base_score: ens.base_score(),
        output_space: ens.output_space().as_str().to_string(),
        feature_names: ens.feature_names().to_vec(),
        trees: ens.trees().iter().map(tree_doc).collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("model document serializes");
    out.push('\n');
    out
}

fn tree_doc(tree: &Tree) -> TreeDoc {
    let nodes = tree
        .nodes()
        .iter()
        .enumerate()
        .map(|(id, node)| match *node {
            TreeNode::Internal {
                feature,
                threshold,
                left,
                right,
                cover,
                value,
                impurity_decrease,
            } => NodeDoc {
                id: id as i64,
                feature: Some(feature as i64),
                threshold: Some(threshold),
                left: Some(left as i64),
                right: Some(right as i64),
                cover,
                value,
                impurity_decrease,
            },
            TreeNode::Leaf { cover, value } => NodeDoc {
                id: id as i64,
                feature: None,
                threshold: None,
                left: None,
                right: None,
                cover,
                value,
                impurity_decrease: None,
            },
        })
        .collect();
    TreeDoc {
        root: tree.root() as i64,
        nodes,
    }
}

/// Parses and validates a model document. `origin` is used in error messages.
pub fn from_json(text: &str, origin: &Path) -> Result<Ensemble> {
    let doc: ModelDoc = serde_json::from_str(text).map_err(|source| Error::Json {
        path: origin.to_path_buf(),
        source,
    })?;
    let kind = doc.kind.parse()?;
    let output_space = doc.output_space.parse()?;
    let mut trees = Vec::with_capacity(doc.trees.len());
    for (t, tree) in doc.trees.iter().enumerate() {
        trees.push(tree_from_doc(t, tree)?);
    }
    Ensemble::new(kind, doc.base_score, output_space, doc.feature_names, trees).map_err(|e| {
        // Report node errors with the ids used in the document.
        match e {
            Error::NodeValidation { tree, node, reason } => Error::NodeValidation {
                tree,
                node: doc.trees[tree]
                    .nodes
                    .get(node as usize)
                    .map_or(node, |n| n.id),
                reason,
            },
            other => other,
        }
    })
}

fn tree_from_doc(t: usize, doc: &TreeDoc) -> Result<Tree> {
    let fail = |node: i64, reason: String| Error::NodeValidation {
        tree: t,
        node,
        reason,
    };
    let mut index = HashMap::with_capacity(doc.nodes.len());
    for (i, n) in doc.nodes.iter().enumerate() {
        if index.insert(n.id, i).is_some() {
            return Err(fail(n.id, "duplicate node id".into()));
        }
    }
    let lookup = |owner: i64, id: i64| {
        index
            .get(&id)
            .copied()
            .ok_or_else(|| fail(owner, format!("child id {id} is dangling")))
    };
    let root = index
        .get(&doc.root)
        .copied()
        .ok_or_else(|| fail(doc.root, "root id does not name a node".into()))?;

    let mut nodes = Vec::with_capacity(doc.nodes.len());
    for n in &doc.nodes {
        let node = match (n.feature, n.threshold, n.left, n.right) {
            (None, None, None, None) => {
                if n.impurity_decrease.is_some() {
                    return Err(fail(n.id, "leaf carries an impurity decrease".into()));
                }
                TreeNode::Leaf {
                    cover: n.cover,
                    value: n.value,
                }
            }
            (Some(feature), Some(threshold), Some(left), Some(right)) => {
                if feature < 0 {
                    return Err(fail(n.id, format!("negative feature index {feature}")));
                }
                TreeNode::Internal {
                    feature: feature as usize,
                    threshold,
                    left: lookup(n.id, left)?,
                    right: lookup(n.id, right)?,
                    cover: n.cover,
                    value: n.value,
                    impurity_decrease: n.impurity_decrease,
                }
            }
            _ => {
                return Err(fail(
                    n.id,
                    "feature, threshold and children must be all set or all null".into(),
                ))
            }
        };
        nodes.push(node);
    }
    Ok(Tree::new_unchecked(nodes, root))
}

pub fn save_model(ens: &Ensemble, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_json(ens)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Ensemble> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_json(&text, path)
}
