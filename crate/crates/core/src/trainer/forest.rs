use rand::Rng;
use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::Result;
use crate::rng::stream_rng;
use crate::trainer::cart::{check_trainable, labels_as_targets, Grower};
use crate::trainer::split::Criterion;
use crate::trainer::TrainConfig;
use crate::tree::Ensemble;

/// Bagged CART trees averaged in probability space.
///
/// Tree `t` draws its bootstrap rows and per-node feature candidates from
/// ChaCha stream `t` of `config.seed`, so the forest is identical for any
/// number of worker threads.
pub fn fit_random_forest(ds: &Dataset, config: &TrainConfig) -> Result<Ensemble> {
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
    let n = ds.n_rows();
    let trees = (0..config.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(config.seed, t as u64);
            let rows: Vec<usize> = if config.bootstrap {
                (0..n)
                    .map(|_| rng.gen_range(0..n as u64) as usize)
                    .collect()
            } else {
                (0..n).collect()
            };
            grower.grow(rows, &mut rng)
        })
        .collect();
    Ensemble::forest(trees, ds.feature_names().to_vec())
}
