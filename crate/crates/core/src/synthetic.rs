//! Random trees and datasets for tests and benchmarks.

use rand::Rng;

use crate::dataset::Dataset;
use crate::tree::{sigmoid, Tree, TreeNode};

/// Shape of the trees drawn by [`random_tree`].
#[derive(Debug, Clone, Copy)]
pub struct TreeShapeSpec {
    /// Split features are drawn from `0..n_features`.
    pub n_features: usize,
    pub max_depth: usize,
    /// Chance that an internal position below the root becomes a leaf early.
    pub early_leaf: f64,
    /// Draw thresholds from a coarse grid so instances hit them exactly.
    pub grid_thresholds: bool,
}

impl TreeShapeSpec {
    pub fn new(n_features: usize, max_depth: usize) -> Self {
        Self {
            n_features,
            max_depth,
            early_leaf: 0.2,
            grid_thresholds: false,
        }
    }
}

/// Grid used for thresholds and instance values when exact ties are wanted.
pub const GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// A consistent tree: integer covers that add up and internal values equal
/// to the cover-weighted mean of the children. Leaf values lie in [-1, 1).
pub fn random_tree<R: Rng>(rng: &mut R, spec: TreeShapeSpec) -> Tree {
    let mut nodes = Vec::new();
    let cover = rng.gen_range(2..500u64);
    grow(rng, spec, &mut nodes, cover, 0);
    Tree::new(nodes, 0).expect("generated tree is consistent")
}

fn grow<R: Rng>(
    rng: &mut R,
    spec: TreeShapeSpec,
    nodes: &mut Vec<TreeNode>,
    cover: u64,
    depth: usize,
) -> (usize, f64) {
    let id = nodes.len();
    let stop = depth >= spec.max_depth
        || cover < 2
        || spec.n_features == 0
        || (depth > 0 && rng.gen_bool(spec.early_leaf));
    if stop {
        let value = rng.gen_range(-1.0..1.0);
        nodes.push(TreeNode::leaf(value, cover));
        return (id, value);
    }
    nodes.push(TreeNode::leaf(0.0, cover));
    let feature = rng.gen_range(0..spec.n_features);
    let threshold = if spec.grid_thresholds {
        GRID[rng.gen_range(1..GRID.len() - 1)]
    } else {
        rng.gen::<f64>()
    };
    let left_cover = rng.gen_range(1..cover);
    let (left, lv) = grow(rng, spec, nodes, left_cover, depth + 1);
    let (right, rv) = grow(rng, spec, nodes, cover - left_cover, depth + 1);
    let value = (lv * left_cover as f64 + rv * (cover - left_cover) as f64) / cover as f64;
    nodes[id] = TreeNode::split(feature, threshold, left, right, cover, value);
    (id, value)
}

/// An instance with values in [0, 1]; a quarter of the coordinates come from
/// [`GRID`].
pub fn random_instance<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    (0..d)
        .map(|_| {
            if rng.gen_bool(0.25) {
                GRID[rng.gen_range(0..GRID.len())]
            } else {
                rng.gen::<f64>()
            }
        })
        .collect()
}

/// Features uniform on [0, 1); labels drawn from a logistic model on the
/// first `informative` features. Both classes always occur.
pub fn random_dataset<R: Rng>(rng: &mut R, n: usize, d: usize, informative: usize) -> Dataset {
    assert!(n >= 2, "need room for both classes");
    let weights: Vec<f64> = (0..d)
        .map(|j| {
            if j < informative {
                rng.gen_range(-6.0..6.0)
            } else {
                0.0
            }
        })
        .collect();
    let mut rows = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let row: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
        let margin: f64 = row.iter().zip(&weights).map(|(x, w)| w * (x - 0.5)).sum();
        let label = match i {
            0 => 0,
            1 => 1,
            _ => u8::from(rng.gen::<f64>() < sigmoid(margin)),
        };
        rows.push(row);
        y.push(label);
    }
    let names = (0..d).map(|j| format!("x{j}")).collect();
    Dataset::new("synthetic", names, rows, y).expect("generated dataset is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;

    #[test]
    fn generated_trees_respect_shape() {
        let mut rng = seeded_rng(1);
        for _ in 0..200 {
            let t = random_tree(&mut rng, TreeShapeSpec::new(3, 4));
            assert!(t.depth() <= 4);
            assert!(t.features_used().iter().all(|&f| f < 3));
        }
        let ds = random_dataset(&mut rng, 30, 4, 2);
        assert_eq!(ds.class_counts().0 + ds.class_counts().1, 30);
        assert!(ds.class_counts().0 > 0 && ds.class_counts().1 > 0);
    }
}
