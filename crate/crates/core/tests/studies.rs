use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use treeattrib_core::harness::{
    compare_model_locally, local_correlation_study, render_report, subset_power_study, ModelKind,
    ReportFormat, StudyConfig, TABLE_HEADER,
};
use treeattrib_core::synthetic::random_dataset;
use treeattrib_core::{Dataset, Ensemble, LossKind, MaxFeatures, TrainConfig, Tree, TreeNode};

fn one_informative(n: usize, seed: u64) -> Dataset {
    random_dataset(&mut ChaCha8Rng::seed_from_u64(seed), n, 5, 1)
}

#[test]
fn stump_model_gives_r_one_and_undefined_rest() {
    // y = [x0 >= 0.5]; a depth-1 single tree splits only on x0.
    let rows: Vec<Vec<f64>> = (0..40)
        .map(|i| vec![i as f64 / 40.0, (i * 7 % 11) as f64, 1.0])
        .collect();
    let y = (0..40).map(|i| u8::from(i >= 20)).collect();
    let ds = Dataset::new("stump", vec!["a".into(), "b".into(), "c".into()], rows, y).unwrap();
    let config = StudyConfig {
        train_config: TrainConfig {
            n_trees: 1,
            max_depth: Some(1),
            max_features: MaxFeatures::All,
            bootstrap: false,
            ..TrainConfig::forest_defaults()
        },
        ..StudyConfig::new(ModelKind::Forest, 1)
    };
    let report = local_correlation_study(&ds, &config).unwrap();
    let by_name = |n: &str| report.per_feature.iter().find(|f| f.feature == n).unwrap();
    assert_eq!(by_name("a").pearson_r, Some(1.0));
    assert_eq!(by_name("a").r_squared, Some(1.0));
    assert!(by_name("b").is_undefined());
    assert!(by_name("c").is_undefined());
    assert!(!by_name("b").kept_by_filter && !by_name("c").kept_by_filter);
    assert_eq!(report.per_feature[0].feature, "a");
}

#[test]
fn full_filter_keeps_every_nonzero_feature() {
    let ds = one_informative(80, 5);
    let config = StudyConfig {
        filter_fraction: 1.0,
        train_config: TrainConfig {
            n_trees: 20,
            ..TrainConfig::forest_defaults()
        },
        ..StudyConfig::new(ModelKind::Forest, 3)
    };
    let report = local_correlation_study(&ds, &config).unwrap();
    for f in &report.per_feature {
        assert_eq!(f.kept_by_filter, f.global_shap > 0.0, "{f:?}");
        if let Some(r) = f.pearson_r {
            assert!((f.r_squared.unwrap() - r * r).abs() <= 1e-12);
        }
    }
}

#[test]
fn duplicated_tree_forest_matches_single_tree() {
    let tree = Tree::new(
        vec![
            TreeNode::split(0, 0.5, 1, 2, 10, 0.4),
            TreeNode::split(1, 0.5, 3, 4, 5, 0.2),
            TreeNode::leaf(0.6, 5),
            TreeNode::leaf(0.0, 3),
            TreeNode::leaf(0.5, 2),
        ],
        0,
    )
    .unwrap();
    let names = vec!["p".to_string(), "q".to_string()];
    let one = Ensemble::forest(vec![tree.clone()], names.clone()).unwrap();
    let two = Ensemble::forest(vec![tree.clone(), tree.clone()], names.clone()).unwrap();
    let three = Ensemble::forest(vec![tree.clone(), tree.clone(), tree], names).unwrap();
    let rows: Vec<Vec<f64>> = (0..12)
        .map(|i| vec![(i % 4) as f64 / 3.0, (i % 3) as f64 / 2.0])
        .collect();
    let single = compare_model_locally(&one, &rows, 0.8).unwrap();
    // Halving a doubled value is exact.
    assert_eq!(single, compare_model_locally(&two, &rows, 0.8).unwrap());
    // Dividing a tripled value by three may round.
    for (a, b) in single
        .iter()
        .zip(compare_model_locally(&three, &rows, 0.8).unwrap())
    {
        assert_eq!(
            (a.rank, a.index, a.kept_by_filter),
            (b.rank, b.index, b.kept_by_filter)
        );
        assert!((a.pearson_r.unwrap() - b.pearson_r.unwrap()).abs() <= 1e-12);
        assert!((a.global_shap - b.global_shap).abs() <= 1e-12);
        assert!((a.global_cfc - b.global_cfc).abs() <= 1e-12);
    }
}

#[test]
fn one_informative_feature_gives_negative_correlations() {
    let ds = one_informative(200, 11);
    for loss in [LossKind::LogLoss, LossKind::OneMinusF1] {
        let config = StudyConfig {
            n_subsets: 200,
            loss,
            train_config: TrainConfig {
                n_trees: 30,
                ..TrainConfig::forest_defaults()
            },
            ..StudyConfig::new(ModelKind::Forest, 7)
        };
        let report = subset_power_study(&ds, &config).unwrap();
        let level = report.study_level.as_ref().unwrap();
        assert!(level.corr_shap_loss.unwrap() < 0.0, "{loss}: {level:?}");
        assert!(level.corr_cfc_loss.unwrap() < 0.0, "{loss}: {level:?}");
        assert_eq!(level.n_skipped, 0);
        assert_eq!(report.samples.len(), 200);
        for s in &report.samples {
            assert_eq!(s.k, s.subset.len());
            if s.k == 0 {
                assert_eq!(s.total_importance_shap, 0.0);
                assert_eq!(s.total_importance_cfc, 0.0);
            }
        }
    }
}

#[test]
fn single_subset_correlation_is_undefined() {
    let ds = one_informative(60, 2);
    let config = StudyConfig {
        n_subsets: 1,
        train_config: TrainConfig {
            n_trees: 5,
            ..TrainConfig::boosting_defaults()
        },
        ..StudyConfig::new(ModelKind::Boosted, 1)
    };
    let report = subset_power_study(&ds, &config).unwrap();
    let level = report.study_level.unwrap();
    assert_eq!(level.corr_shap_loss, None);
    assert_eq!(level.corr_cfc_loss, None);
}

#[test]
fn studies_are_reproducible() {
    let ds = one_informative(90, 4);
    let config = StudyConfig {
        n_subsets: 40,
        train_config: TrainConfig {
            n_trees: 10,
            ..TrainConfig::forest_defaults()
        },
        ..StudyConfig::new(ModelKind::Forest, 99)
    };
    let render = || {
        let r = subset_power_study(&ds, &config).unwrap();
        render_report(&r, ReportFormat::Structured).unwrap()
    };
    assert_eq!(render(), render());
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    assert_eq!(pool.install(render), render());
}

#[test]
fn empty_report_renders_header_only_table() {
    let ds = one_informative(30, 1);
    let config = StudyConfig {
        train_config: TrainConfig {
            n_trees: 2,
            ..TrainConfig::forest_defaults()
        },
        ..StudyConfig::new(ModelKind::Forest, 1)
    };
    let mut report = local_correlation_study(&ds, &config).unwrap();
    report.per_feature.clear();
    let text = render_report(&report, ReportFormat::Delimited).unwrap();
    assert!(text.ends_with(&format!("{TABLE_HEADER}\n")), "{text}");
}
