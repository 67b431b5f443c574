use rand::Rng;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::{stream_rng, StreamRng};
use crate::trainer::split::{best_split, Criterion};
use crate::trainer::{MaxFeatures, TrainConfig};
use crate::tree::{Tree, TreeNode};

/// Greedy depth-first tree growth over a (possibly repeated) row sample.
pub(crate) struct Grower<'a> {
    pub data: &'a Dataset,
    pub targets: &'a [f64],
    pub criterion: Criterion,
    pub config: &'a TrainConfig,
    /// Multiplier applied to node means (learning rate for boosting).
    pub value_scale: f64,
}

impl Grower<'_> {
    pub fn grow(&self, rows: Vec<usize>, rng: &mut StreamRng) -> Tree {
        let mut nodes = Vec::new();
        self.grow_node(rows, 0, rng, &mut nodes);
        Tree::new_unchecked(nodes, 0)
    }

    fn grow_node(
        &self,
        rows: Vec<usize>,
        depth: usize,
        rng: &mut StreamRng,
        nodes: &mut Vec<TreeNode>,
    ) -> usize {
        let id = nodes.len();
        let cover = rows.len() as u64;
        let sum: f64 = rows.iter().map(|&r| self.targets[r]).sum();
        let value = self.value_scale * (sum / rows.len() as f64);
        nodes.push(TreeNode::leaf(value, cover));

        let depth_ok = self.config.max_depth.is_none_or(|m| depth < m);
        if !depth_ok || rows.len() < self.config.min_samples_split.max(2) || self.is_pure(&rows) {
            return id;
        }
        let features = self.candidate_features(rng);
        let Some(split) = best_split(
            self.data,
            self.targets,
            &rows,
            &features,
            self.criterion,
            self.config.min_samples_leaf,
        ) else {
            return id;
        };

        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .into_iter()
            .partition(|&r| self.data.value(r, split.feature) < split.threshold);
        debug_assert_eq!(left_rows.len(), split.left_count);
        let left = self.grow_node(left_rows, depth + 1, rng, nodes);
        let right = self.grow_node(right_rows, depth + 1, rng, nodes);
        nodes[id] = TreeNode::Internal {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
            cover,
            value,
            impurity_decrease: Some(split.impurity_decrease),
        };
        id
    }

    fn is_pure(&self, rows: &[usize]) -> bool {
        let first = self.targets[rows[0]];
        rows.iter().all(|&r| self.targets[r] == first)
    }

    /// Ascending candidate features; draws from `rng` only when subsampling.
    fn candidate_features(&self, rng: &mut StreamRng) -> Vec<usize> {
        let d = self.data.n_features();
        let k = self.config.max_features.resolve(d);
        let mut all: Vec<usize> = (0..d).collect();
        if k >= d {
            return all;
        }
        for i in 0..k {
            let j = i + rng.gen_range(0..(d - i) as u64) as usize;
            all.swap(i, j);
        }
        all.truncate(k);
        all.sort_unstable();
        all
    }
}

impl MaxFeatures {
    /// Number of candidate features per node out of `d`.
    pub fn resolve(self, d: usize) -> usize {
        match self {
            MaxFeatures::All => d,
            MaxFeatures::Sqrt => ((d as f64).sqrt().floor() as usize).max(1).min(d),
            MaxFeatures::Count(k) => k.min(d),
        }
    }
}

pub(crate) fn labels_as_targets(ds: &Dataset) -> Vec<f64> {
    ds.labels().iter().map(|&v| f64::from(v)).collect()
}

pub(crate) fn check_trainable(ds: &Dataset) -> Result<()> {
    if ds.n_rows() < 2 {
        return Err(Error::Training(format!(
            "need at least 2 rows to train, got {}",
            ds.n_rows()
        )));
    }
    Ok(())
}

/// Single classification tree on all rows; node values are class-1 fractions.
pub fn fit_cart(ds: &Dataset, config: &TrainConfig) -> Result<Tree> {
    config.validate()?;
    check_trainable(ds)?;
    let targets = labels_as_targets(ds);
    let grower = Grower {
        data: ds,
        targets: &targets,
        criterion: Criterion::Gini,
        config,
        value_scale: 1.0,
    };
    let mut rng = stream_rng(config.seed, 0);
    Ok(grower.grow((0..ds.n_rows()).collect(), &mut rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::Ensemble;

    fn ds(rows: Vec<Vec<f64>>, y: Vec<u8>) -> Dataset {
        let d = rows[0].len();
        Dataset::new("t", (0..d).map(|i| format!("f{i}")).collect(), rows, y).unwrap()
    }

    fn cfg() -> TrainConfig {
        TrainConfig {
            max_features: MaxFeatures::All,
            ..TrainConfig::forest_defaults()
        }
    }

    #[test]
    fn pure_dataset_is_single_leaf() {
        let t = fit_cart(
            &ds(vec![vec![1.0], vec![2.0], vec![3.0]], vec![0, 0, 0]),
            &cfg(),
        )
        .unwrap();
        assert_eq!(t.nodes().len(), 1);
        assert_eq!(t.root_value(), 0.0);
    }

    #[test]
    fn separable_data_gives_a_stump() {
        let t = fit_cart(
            &ds(
                vec![vec![1.0], vec![2.0], vec![3.0], vec![4.0]],
                vec![0, 0, 1, 1],
            ),
            &cfg(),
        )
        .unwrap();
        assert_eq!(t.depth(), 1);
        match *t.root_node() {
            TreeNode::Internal {
                threshold,
                left,
                right,
                ..
            } => {
                assert_eq!(threshold, 2.5);
                assert_eq!(t.node(left).value(), 0.0);
                assert_eq!(t.node(right).value(), 1.0);
            }
            _ => panic!("expected a split"),
        }
    }

    #[test]
    fn xor_grid_depth_two_is_perfect() {
        // Duplicate the XOR corners with a tilt so the first split has positive gain.
        let data = ds(
            vec![
                vec![0.0, 0.0],
                vec![0.0, 1.0],
                vec![1.0, 0.0],
                vec![1.0, 1.0],
                vec![0.0, 0.0],
            ],
            vec![0, 1, 1, 0, 0],
        );
        let config = TrainConfig {
            max_depth: Some(2),
            ..cfg()
        };
        let t = fit_cart(&data, &config).unwrap();
        assert!(t.depth() <= 2);
        for i in 0..data.n_rows() {
            assert_eq!(t.predict(data.row(i)).unwrap(), f64::from(data.labels()[i]));
        }
    }

    #[test]
    fn grown_trees_satisfy_node_invariants() {
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![(i * 7 % 13) as f64, (i * 5 % 11) as f64, (i % 3) as f64])
            .collect();
        let y = (0..40)
            .map(|i| u8::from((i * 7 % 13) + (i % 3) > 7))
            .collect();
        let data = ds(rows, y);
        let t = fit_cart(&data, &cfg()).unwrap();
        Ensemble::forest(vec![t.clone()], data.feature_names().to_vec()).unwrap();
        assert!(t.has_impurity_decreases());
        // Root value is the mean prediction over the training rows.
        let mean: f64 = data.rows().map(|r| t.predict(r).unwrap()).sum::<f64>() / 40.0;
        assert!((mean - t.root_value()).abs() < 1e-12);
    }

    #[test]
    fn too_few_rows() {
        assert!(matches!(
            fit_cart(&ds(vec![vec![1.0]], vec![0]), &cfg()),
            Err(Error::Training(_))
        ));
    }

    #[test]
    fn max_features_resolution() {
        assert_eq!(MaxFeatures::Sqrt.resolve(9), 3);
        assert_eq!(MaxFeatures::Sqrt.resolve(10), 3);
        assert_eq!(MaxFeatures::Sqrt.resolve(1), 1);
        assert_eq!(MaxFeatures::Count(20).resolve(4), 4);
        assert_eq!(MaxFeatures::All.resolve(0), 0);
    }
}
