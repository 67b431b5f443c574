use crate::attribution::FeatureSubset;
use crate::error::Result;
use crate::tree::{feature_value, goes_left, Tree, TreeNode};

/// Path-dependent estimate of `E[f(x) | x_S]` for one tree.
///
/// Splits on features in `known` follow `x`; splits on any other feature
/// average both branches weighted by their training covers.
pub fn expvalue_conditional(tree: &Tree, x: &[f64], known: &FeatureSubset) -> Result<f64> {
    expvalue_with(tree, x, &|f| known.contains(f))
}

pub(crate) fn expvalue_with(tree: &Tree, x: &[f64], known: &dyn Fn(usize) -> bool) -> Result<f64> {
    recurse(tree, tree.root(), x, known)
}

fn recurse(tree: &Tree, id: usize, x: &[f64], known: &dyn Fn(usize) -> bool) -> Result<f64> {
    match *tree.node(id) {
        TreeNode::Leaf { value, .. } => Ok(value),
        TreeNode::Internal {
            feature,
            threshold,
            left,
            right,
            cover,
            ..
        } => {
            if known(feature) {
                let next = if goes_left(feature_value(x, feature)?, threshold) {
                    left
                } else {
                    right
                };
                recurse(tree, next, x, known)
            } else {
                let lc = tree.node(left).cover() as f64;
                let rc = tree.node(right).cover() as f64;
                Ok(
                    (lc * recurse(tree, left, x, known)? + rc * recurse(tree, right, x, known)?)
                        / cover as f64,
                )
            }
        }
    }
}
