use rand::Rng;
use rayon::prelude::*;

use crate::attribution::FeatureSubset;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::harness::local::FeatureStats;
use crate::harness::metrics::pearson_r;
use crate::harness::{CorrelationReport, StudyConfig, StudyKind, StudyLevel, SubsetSample};
use crate::rng::{stream_rng, SUBSET_STREAM_BASE};
use crate::trainer::train_test_split;

/// Largest tolerated share of subsets whose retraining fails.
pub const MAX_SKIP_FRACTION: f64 = 0.1;

/// Draws the cardinality `k` uniformly from `0..=d`, then `k` distinct
/// features uniformly.
pub fn sample_feature_subset<R: Rng>(d: usize, rng: &mut R) -> FeatureSubset {
    let k = rng.gen_range(0..=d as u64) as usize;
    let mut pool: Vec<usize> = (0..d).collect();
    for i in 0..k {
        let j = i + rng.gen_range(0..(d - i) as u64) as usize;
        pool.swap(i, j);
    }
    FeatureSubset::from_indices(d, pool[..k].iter().copied())
}

/// Correlates retrained-model test loss with the total importance of random
/// feature subsets.
///
/// The full model is trained on the training split once; its global SHAP
/// and CFC scores, computed on the test split, stay fixed. Each subset's
/// model reuses the full model's hyperparameters and is scored on the test
/// split; an empty subset predicts the training prevalence.
pub fn subset_power_study(ds: &Dataset, config: &StudyConfig) -> Result<CorrelationReport> {
    config.validate()?;
    let (train, test) = train_test_split(ds, config.test_fraction, config.seed)?;
    let full = config.model_kind.train(&train, &config.train_config)?;
    let test_rows: Vec<&[f64]> = test.rows().collect();
    let stats = FeatureStats::compute(&full, &test_rows, config.filter_fraction)?;

    let d = ds.n_features();
    let prevalence = train.prevalence();
    let outcomes: Vec<Result<SubsetSample>> = (0..config.n_subsets)
        .into_par_iter()
        .map(|idx| {
            let mut rng = stream_rng(config.seed, SUBSET_STREAM_BASE + idx as u64);
            let subset = sample_feature_subset(d, &mut rng);
            let columns = subset.to_vec();
            let probs: Vec<f64> = if columns.is_empty() {
                vec![prevalence; test.n_rows()]
            } else {
                let sub_test = test.select_columns(&columns);
                let model = config
                    .model_kind
                    .train(&train.select_columns(&columns), &config.train_config)?;
                sub_test
                    .rows()
                    .map(|r| model.predict_proba(r))
                    .collect::<Result<_>>()?
            };
            let retrained_loss = config.loss.evaluate(test.labels(), &probs)?;
            Ok(SubsetSample {
                k: columns.len(),
                retrained_loss,
                total_importance_shap: columns.iter().map(|&c| stats.global_shap[c]).sum(),
                total_importance_cfc: columns.iter().map(|&c| stats.global_cfc[c]).sum(),
                subset,
            })
        })
        .collect();

    let mut samples = Vec::with_capacity(outcomes.len());
    let mut n_skipped = 0;
    let mut first_failure = None;
    for outcome in outcomes {
        match outcome {
            Ok(s) => samples.push(s),
            Err(e) => {
                n_skipped += 1;
                first_failure.get_or_insert(e);
            }
        }
    }
    if n_skipped as f64 > MAX_SKIP_FRACTION * config.n_subsets as f64 {
        return Err(Error::Study(format!(
            "{n_skipped} of {} subset retrainings failed; first failure: {}",
            config.n_subsets,
            first_failure.map_or_else(String::new, |e| e.to_string())
        )));
    }

    let losses: Vec<f64> = samples.iter().map(|s| s.retrained_loss).collect();
    let shap_totals: Vec<f64> = samples.iter().map(|s| s.total_importance_shap).collect();
    let cfc_totals: Vec<f64> = samples.iter().map(|s| s.total_importance_cfc).collect();
    let study_level = StudyLevel {
        corr_shap_loss: pearson_r(&shap_totals, &losses)?,
        corr_cfc_loss: pearson_r(&cfc_totals, &losses)?,
        loss: config.loss,
        n_subsets: config.n_subsets,
        n_skipped,
    };
    Ok(CorrelationReport {
        study: StudyKind::SubsetPower,
        dataset: ds.name().to_string(),
        n_instances: test.n_rows(),
        config: config.clone(),
        notes: vec![
            "retrained subset models reuse the full model's hyperparameters verbatim".into(),
            "global importances are mean absolute local scores of the full model on the test split"
                .into(),
        ],
        per_feature: stats.per_feature,
        study_level: Some(study_level),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;

    #[test]
    fn single_feature_law() {
        let mut rng = seeded_rng(3);
        let draws = 20_000;
        let empty = (0..draws)
            .filter(|_| sample_feature_subset(1, &mut rng).is_empty())
            .count();
        let share = empty as f64 / draws as f64;
        assert!((share - 0.5).abs() < 0.02, "{share}");
    }

    #[test]
    fn sampling_is_reproducible() {
        let a: Vec<_> = {
            let mut rng = seeded_rng(11);
            (0..50)
                .map(|_| sample_feature_subset(7, &mut rng))
                .collect()
        };
        let b: Vec<_> = {
            let mut rng = seeded_rng(11);
            (0..50)
                .map(|_| sample_feature_subset(7, &mut rng))
                .collect()
        };
        assert_eq!(a, b);
        assert!(a.iter().all(|s| s.universe() == 7));
    }
}
