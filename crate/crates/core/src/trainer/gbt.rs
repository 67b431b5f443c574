use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::harness::metrics::log_loss;
use crate::rng::stream_rng;
use crate::trainer::cart::{check_trainable, Grower};
use crate::trainer::split::Criterion;
use crate::trainer::TrainConfig;
use crate::tree::{sigmoid, Ensemble, EnsembleKind, OutputSpace};

/// Gradient boosting on the logistic loss.
///
/// The margin starts at the log-odds of the class-1 prevalence. Each round
/// fits a variance-criterion regression tree to the residuals `y - p` and
/// adds it scaled by the learning rate; node values are stored in that
/// scaled log-odds space. Predictions are exposed as probabilities.
pub fn fit_gbt(ds: &Dataset, config: &TrainConfig) -> Result<Ensemble> {
    fit_gbt_traced(ds, config).map(|(ens, _)| ens)
}

/// Like [`fit_gbt`], also returning the training log loss before any tree
/// (index 0) and after each round.
pub fn fit_gbt_traced(ds: &Dataset, config: &TrainConfig) -> Result<(Ensemble, Vec<f64>)> {
    config.validate()?;
    check_trainable(ds)?;
    let (zeros, ones) = ds.class_counts();
    if zeros == 0 || ones == 0 {
        return Err(Error::Training(
            "boosting needs both classes: the base log-odds of a single-class dataset is infinite"
                .into(),
        ));
    }
    let prevalence = ones as f64 / ds.n_rows() as f64;
    let base_score = (prevalence / (1.0 - prevalence)).ln();
    let labels = ds.labels();

    let mut margins = vec![base_score; ds.n_rows()];
    let mut residuals = vec![0.0; ds.n_rows()];
    let mut trace = Vec::with_capacity(config.n_trees + 1);
    let mut trees = Vec::with_capacity(config.n_trees);
    let rows: Vec<usize> = (0..ds.n_rows()).collect();
    let probs = |m: &[f64]| m.iter().map(|&z| sigmoid(z)).collect::<Vec<_>>();
    trace.push(log_loss(labels, &probs(&margins))?);

    for round in 0..config.n_trees {
        for ((r, &m), &y) in residuals.iter_mut().zip(&margins).zip(labels) {
            *r = f64::from(y) - sigmoid(m);
        }
        let grower = Grower {
            data: ds,
            targets: &residuals,
            criterion: Criterion::Variance,
            config,
            value_scale: config.learning_rate,
        };
        let mut rng = stream_rng(config.seed, round as u64);
        let tree = grower.grow(rows.clone(), &mut rng);
        for (i, m) in margins.iter_mut().enumerate() {
            *m += tree.predict(ds.row(i))?;
        }
        trees.push(tree);
        trace.push(log_loss(labels, &probs(&margins))?);
    }
    let ens = Ensemble::new(
        EnsembleKind::BoostedSum,
        base_score,
        OutputSpace::Probability,
        ds.feature_names().to_vec(),
        trees,
    )?;
    Ok((ens, trace))
}
