//! Exact path-dependent Shapley values in polynomial time.
//!
//! A depth-first walk keeps, for the features seen so far on the way down,
//! the fraction of training cover that flows along the path when the feature
//! is unknown (`zero_fraction`) or known (`one_fraction`, 0 or 1), together
//! with permutation weights over coalition sizes. At each leaf the weights of
//! every path feature are "unwound" to get its Shapley weight. A feature
//! split on twice is unwound and re-extended so each feature appears once.
//! Runtime is O(leaves · depth²) per tree and instance.

use crate::attribution::cfc::cfc_tree_into;
use crate::error::Result;
use crate::tree::{feature_value, goes_left, Tree, TreeNode};

#[derive(Debug, Clone, Copy)]
struct PathElement {
    /// `None` for the sentinel at the bottom of every path.
    feature: Option<usize>,
    zero_fraction: f64,
    one_fraction: f64,
    weight: f64,
}

/// Per-tree facts reused across instances.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TreeShape {
    distinct_features: usize,
}

impl TreeShape {
    pub fn of(tree: &Tree) -> Self {
        Self {
            distinct_features: tree.features_used().len(),
        }
    }
}

/// Shapley values of one tree for `x`, one entry per value of `x`.
///
/// They sum to `f(x)` minus the cover-weighted mean leaf value (the root
/// value for a consistent tree).
pub fn shap_tree(tree: &Tree, x: &[f64]) -> Result<Vec<f64>> {
    let mut phi = vec![0.0; x.len()];
    shap_tree_into(tree, TreeShape::of(tree), x, &mut phi)?;
    Ok(phi)
}

/// Adds the tree's Shapley values into `phi`.
pub(crate) fn shap_tree_into(
    tree: &Tree,
    shape: TreeShape,
    x: &[f64],
    phi: &mut [f64],
) -> Result<()> {
    match shape.distinct_features {
        0 => Ok(()),
        // With one player there is one ordering: the Shapley value is the
        // full change from the base value, which is also the CFC.
        1 => cfc_tree_into(tree, x, phi),
        _ => {
            let mut walk = Walk { tree, x, phi };
            walk.recurse(tree.root(), &[], 1.0, 1.0, None)
        }
    }
}

struct Walk<'a> {
    tree: &'a Tree,
    x: &'a [f64],
    phi: &'a mut [f64],
}

impl Walk<'_> {
    fn recurse(
        &mut self,
        node: usize,
        parent_path: &[PathElement],
        zero_fraction: f64,
        one_fraction: f64,
        feature: Option<usize>,
    ) -> Result<()> {
        let mut path = Vec::with_capacity(parent_path.len() + 1);
        path.extend_from_slice(parent_path);
        extend(&mut path, zero_fraction, one_fraction, feature);

        match *self.tree.node(node) {
            TreeNode::Leaf { value, .. } => {
                for i in 1..path.len() {
                    let w = unwound_sum(&path, i);
                    let el = path[i];
                    if let Some(f) = el.feature {
                        self.phi[f] += w * (el.one_fraction - el.zero_fraction) * value;
                    }
                }
                Ok(())
            }
            TreeNode::Internal {
                feature: split,
                threshold,
                left,
                right,
                cover,
                ..
            } => {
                let (hot, cold) = if goes_left(feature_value(self.x, split)?, threshold) {
                    (left, right)
                } else {
                    (right, left)
                };
                let cover = cover as f64;
                let hot_fraction = self.tree.node(hot).cover() as f64 / cover;
                let cold_fraction = self.tree.node(cold).cover() as f64 / cover;

                let (mut incoming_zero, mut incoming_one) = (1.0, 1.0);
                if let Some(k) = path.iter().position(|el| el.feature == Some(split)) {
                    incoming_zero = path[k].zero_fraction;
                    incoming_one = path[k].one_fraction;
                    unwind(&mut path, k);
                }
                self.recurse(
                    hot,
                    &path,
                    hot_fraction * incoming_zero,
                    incoming_one,
                    Some(split),
                )?;
                self.recurse(cold, &path, cold_fraction * incoming_zero, 0.0, Some(split))
            }
        }
    }
}

/// Appends a feature to the path, updating the coalition-size weights.
fn extend(
    path: &mut Vec<PathElement>,
    zero_fraction: f64,
    one_fraction: f64,
    feature: Option<usize>,
) {
    let depth = path.len();
    path.push(PathElement {
        feature,
        zero_fraction,
        one_fraction,
        weight: if depth == 0 { 1.0 } else { 0.0 },
    });
    let denom = (depth + 1) as f64;
    for i in (0..depth).rev() {
        path[i + 1].weight += one_fraction * path[i].weight * (i + 1) as f64 / denom;
        path[i].weight = zero_fraction * path[i].weight * (depth - i) as f64 / denom;
    }
}

/// Inverse of [`extend`] for the element at `index`; removes it.
fn unwind(path: &mut Vec<PathElement>, index: usize) {
    let depth = path.len() - 1;
    let PathElement {
        zero_fraction,
        one_fraction,
        ..
    } = path[index];
    let denom = (depth + 1) as f64;
    let mut next_one_portion = path[depth].weight;
    for i in (0..depth).rev() {
        if one_fraction != 0.0 {
            let tmp = path[i].weight;
            path[i].weight = next_one_portion * denom / ((i + 1) as f64 * one_fraction);
            next_one_portion = tmp - path[i].weight * zero_fraction * (depth - i) as f64 / denom;
        } else {
            path[i].weight = path[i].weight * denom / (zero_fraction * (depth - i) as f64);
        }
    }
    for i in index..depth {
        path[i].feature = path[i + 1].feature;
        path[i].zero_fraction = path[i + 1].zero_fraction;
        path[i].one_fraction = path[i + 1].one_fraction;
    }
    path.pop();
}

/// Total weight the path would carry with element `index` unwound, without
/// modifying it.
fn unwound_sum(path: &[PathElement], index: usize) -> f64 {
    let depth = path.len() - 1;
    let PathElement {
        zero_fraction,
        one_fraction,
        ..
    } = path[index];
    let mut total = 0.0;
    if one_fraction != 0.0 {
        let mut next_one_portion = path[depth].weight;
        for i in (0..depth).rev() {
            let tmp = next_one_portion / ((i + 1) as f64 * one_fraction);
            total += tmp;
            next_one_portion = path[i].weight - tmp * zero_fraction * (depth - i) as f64;
        }
    } else {
        for i in (0..depth).rev() {
            total += path[i].weight / (zero_fraction * (depth - i) as f64);
        }
    }
    total * (depth + 1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

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

    #[test]
    fn t2_values() {
        let phi = shap_tree(&t2(), &[0.3, 0.7]).unwrap();
        assert!((phi[0] + 0.125).abs() < 1e-15, "{phi:?}");
        assert!((phi[1] - 0.375).abs() < 1e-15, "{phi:?}");
    }

    #[test]
    fn single_leaf_is_zero() {
        assert_eq!(
            shap_tree(&Tree::single_leaf(0.7, 3), &[1.0]).unwrap(),
            vec![0.0]
        );
    }

    #[test]
    fn repeated_split_feature_keeps_local_accuracy() {
        let t = Tree::new(
            vec![
                TreeNode::split(0, 0.5, 1, 2, 8, 0.5),
                TreeNode::split(0, 0.25, 3, 4, 4, 0.25),
                TreeNode::split(1, 0.5, 5, 6, 4, 0.75),
                TreeNode::leaf(0.0, 2),
                TreeNode::leaf(0.5, 2),
                TreeNode::leaf(1.0, 2),
                TreeNode::leaf(0.5, 2),
            ],
            0,
        )
        .unwrap();
        for x in [[0.1, 0.0], [0.3, 0.9], [0.8, 0.1], [0.8, 0.9]] {
            let phi = shap_tree(&t, &x).unwrap();
            let total: f64 = phi.iter().sum();
            assert!((t.root_value() + total - t.predict(&x).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn extend_then_unwind_restores_weights() {
        let mut path = Vec::new();
        extend(&mut path, 1.0, 1.0, None);
        extend(&mut path, 0.4, 1.0, Some(3));
        extend(&mut path, 0.7, 0.0, Some(5));
        let before: Vec<f64> = path.iter().map(|e| e.weight).collect();
        extend(&mut path, 0.3, 1.0, Some(8));
        unwind(&mut path, 3);
        for (a, b) in before.iter().zip(&path) {
            assert!((a - b.weight).abs() < 1e-14);
        }
    }
}
