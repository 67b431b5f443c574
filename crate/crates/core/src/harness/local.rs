use crate::attribution::{cfc_ensemble, global_importance, shap_ensemble};
use crate::dataset::Dataset;
use crate::error::Result;
use crate::harness::metrics::{pearson_r, r_squared};
use crate::harness::{CorrelationReport, FeatureCorrelation, StudyConfig, StudyKind};
use crate::tree::Ensemble;

/// Trains the configured model on all of `ds` and compares local SHAP and
/// CFC scores feature by feature over every row.
pub fn local_correlation_study(ds: &Dataset, config: &StudyConfig) -> Result<CorrelationReport> {
    config.validate()?;
    let model = config.model_kind.train(ds, &config.train_config)?;
    let rows: Vec<&[f64]> = ds.rows().collect();
    let stats = FeatureStats::compute(&model, &rows, config.filter_fraction)?;
    Ok(CorrelationReport {
        study: StudyKind::LocalCorrelation,
        dataset: ds.name().to_string(),
        n_instances: rows.len(),
        config: config.clone(),
        notes: Vec::new(),
        per_feature: stats.per_feature,
        study_level: None,
        samples: Vec::new(),
    })
}

/// Per-feature SHAP and CFC comparison for an already trained model over
/// `rows`, ranked by global SHAP importance.
pub fn compare_model_locally<R: AsRef<[f64]> + Sync>(
    model: &Ensemble,
    rows: &[R],
    filter_fraction: f64,
) -> Result<Vec<FeatureCorrelation>> {
    if !(filter_fraction > 0.0 && filter_fraction <= 1.0) {
        return Err(crate::error::Error::Config(format!(
            "filter fraction must lie in (0, 1], got {filter_fraction}"
        )));
    }
    Ok(FeatureStats::compute(model, rows, filter_fraction)?.per_feature)
}

pub(crate) struct FeatureStats {
    /// Ranked by global SHAP importance.
    pub per_feature: Vec<FeatureCorrelation>,
    /// Indexed by feature.
    pub global_shap: Vec<f64>,
    pub global_cfc: Vec<f64>,
}

impl FeatureStats {
    pub fn compute<R: AsRef<[f64]> + Sync>(
        model: &Ensemble,
        rows: &[R],
        filter_fraction: f64,
    ) -> Result<Self> {
        let shap = shap_ensemble(model, rows)?;
        let cfc = cfc_ensemble(model, rows)?;
        let global_shap = global_importance(&shap)?;
        let global_cfc = global_importance(&cfc)?;
        let kept = filter_kept(&global_shap, filter_fraction);

        let order = importance_order(&global_shap);
        let mut per_feature = Vec::with_capacity(order.len());
        for (pos, &j) in order.iter().enumerate() {
            let r = pearson_r(&shap.column(j), &cfc.column(j))?;
            per_feature.push(FeatureCorrelation {
                rank: pos + 1,
                feature: model.feature_names()[j].clone(),
                index: j,
                pearson_r: r,
                r_squared: r_squared(r),
                global_shap: global_shap[j],
                global_cfc: global_cfc[j],
                kept_by_filter: kept[j],
            });
        }
        Ok(Self {
            per_feature,
            global_shap,
            global_cfc,
        })
    }
}

/// Feature indices by decreasing importance, ties by index.
fn importance_order(importance: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..importance.len()).collect();
    order.sort_by(|&a, &b| importance[b].total_cmp(&importance[a]).then(a.cmp(&b)));
    order
}

/// Marks the shortest importance-ranked prefix whose total reaches
/// `fraction` of the overall importance. Zero-importance features are never
/// kept.
pub fn filter_kept(importance: &[f64], fraction: f64) -> Vec<bool> {
    let order = importance_order(importance);
    // Summing in rank order makes the full prefix hit the total exactly.
    let total: f64 = order.iter().map(|&j| importance[j]).sum();
    let target = fraction * total;
    let mut kept = vec![false; importance.len()];
    let mut cumulative = 0.0;
    for &j in &order {
        if importance[j] <= 0.0 || (cumulative >= target && cumulative > 0.0) {
            break;
        }
        kept[j] = true;
        cumulative += importance[j];
    }
    kept
}
