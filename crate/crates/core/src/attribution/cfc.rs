use crate::error::Result;
use crate::tree::{feature_value, goes_left, Tree, TreeNode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Left,
    Right,
}

/// One internal node on a decision path and the branch taken from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathStep {
    pub node: usize,
    pub feature: usize,
    pub direction: Direction,
    /// Node reached by following `direction`.
    pub child: usize,
}

/// Root-to-leaf route of one instance; empty for a single-leaf tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionPath {
    pub steps: Vec<PathStep>,
    pub leaf: usize,
}

pub fn decision_path(tree: &Tree, x: &[f64]) -> Result<DecisionPath> {
    let mut steps = Vec::new();
    let mut id = tree.root();
    while let TreeNode::Internal {
        feature,
        threshold,
        left,
        right,
        ..
    } = *tree.node(id)
    {
        let (direction, child) = if goes_left(feature_value(x, feature)?, threshold) {
            (Direction::Left, left)
        } else {
            (Direction::Right, right)
        };
        steps.push(PathStep {
            node: id,
            feature,
            direction,
            child,
        });
        id = child;
    }
    Ok(DecisionPath { steps, leaf: id })
}

/// Conditional feature contributions of one tree: every edge on the decision
/// path credits its parent's split feature with the change in node value.
///
/// Returns the root value and one contribution per entry of `x`; they sum to
/// `leaf value - root value` up to rounding.
pub fn cfc_tree(tree: &Tree, x: &[f64]) -> Result<(f64, Vec<f64>)> {
    let mut phi = vec![0.0; x.len()];
    cfc_tree_into(tree, x, &mut phi)?;
    Ok((tree.root_value(), phi))
}

/// Adds the tree's contributions into `phi`.
pub(crate) fn cfc_tree_into(tree: &Tree, x: &[f64], phi: &mut [f64]) -> Result<()> {
    for step in decision_path(tree, x)?.steps {
        phi[step.feature] += tree.node(step.child).value() - tree.node(step.node).value();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::TreeNode;

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
    fn t2_path_and_contributions() {
        let path = decision_path(&t2(), &[0.3, 0.7]).unwrap();
        assert_eq!(path.leaf, 4);
        assert_eq!(
            path.steps
                .iter()
                .map(|s| (s.node, s.feature, s.direction))
                .collect::<Vec<_>>(),
            vec![(0, 0, Direction::Left), (1, 1, Direction::Right)]
        );
        let (base, phi) = cfc_tree(&t2(), &[0.3, 0.7]).unwrap();
        assert_eq!(base, 0.75);
        assert_eq!(phi, vec![-0.25, 0.5]);
    }

    #[test]
    fn single_leaf_has_no_contributions() {
        let (base, phi) = cfc_tree(&Tree::single_leaf(0.3, 5), &[1.0, 2.0]).unwrap();
        assert_eq!(base, 0.3);
        assert_eq!(phi, vec![0.0, 0.0]);
    }

    #[test]
    fn repeated_feature_accumulates_every_edge() {
        // f0@0.5 then f0@0.25 on the left branch.
        let t = Tree::new(
            vec![
                TreeNode::split(0, 0.5, 1, 2, 8, 0.5),
                TreeNode::split(0, 0.25, 3, 4, 4, 0.25),
                TreeNode::leaf(0.75, 4),
                TreeNode::leaf(0.0, 2),
                TreeNode::leaf(0.5, 2),
            ],
            0,
        )
        .unwrap();
        let (_, phi) = cfc_tree(&t, &[0.1]).unwrap();
        assert_eq!(phi, vec![(0.25 - 0.5) + (0.0 - 0.25)]);
    }
}
