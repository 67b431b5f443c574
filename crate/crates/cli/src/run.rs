use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use treeattrib_core::attribution::{explain, write_table, Method};
use treeattrib_core::harness::{
    local_correlation_study, render_report, subset_power_study, write_samples, CorrelationReport,
    ModelKind, ReportFormat, StudyConfig,
};
use treeattrib_core::{load_dataset, load_instances, load_model, save_model, Error};

use crate::args::{
    Cli, Command, CompareLocalArgs, ExplainArgs, FormatArg, MethodArg, StudyArgs, SubsetPowerArgs,
    TrainArgs, ValidateArgs,
};

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_STUDY: u8 = 3;

/// Usage problems that clap cannot see, such as `-` with two tables.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

pub fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if cause.is::<Usage>() {
            return EXIT_USAGE;
        }
        if let Some(err) = cause.downcast_ref::<Error>() {
            return match err {
                Error::Config(_) => EXIT_USAGE,
                Error::Training(_) | Error::Study(_) => EXIT_STUDY,
                _ => EXIT_VALIDATION,
            };
        }
    }
    EXIT_VALIDATION
}

pub fn run(cli: Cli) -> Result<()> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Usage("--threads must be at least 1".into()).into());
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().context("starting worker pool")?;
    pool.install(|| match cli.command {
        Command::Train(a) => train(a),
        Command::Explain(a) => explain_cmd(a),
        Command::CompareLocal(a) => compare_local(a),
        Command::SubsetPower(a) => subset_power(a),
        Command::ValidateModel(a) => validate(a),
    })
}

fn is_stdout(path: &Path) -> bool {
    path.as_os_str() == "-"
}

fn write_output(path: &Path, text: &str) -> Result<()> {
    if is_stdout(path) {
        io::stdout().write_all(text.as_bytes())?;
        return Ok(());
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn train(a: TrainArgs) -> Result<()> {
    let ds = load_dataset(&a.data.data, &a.data.target)?;
    let kind = ModelKind::from(a.model);
    let config = a.trainer.resolve(kind, a.seed);
    config.validate()?;
    let model = kind.train(&ds, &config)?;
    save_model(&model, &a.out)?;
    eprintln!(
        "trained {kind} of {} trees on {} rows x {} features (seed {}) -> {}",
        model.trees().len(),
        ds.n_rows(),
        ds.n_features(),
        a.seed,
        a.out.display()
    );
    Ok(())
}

fn suffixed(out: &Path, method: Method) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(format!(".{method}.tsv"));
    PathBuf::from(name)
}

fn explain_cmd(a: ExplainArgs) -> Result<()> {
    let targets: Vec<(Method, PathBuf)> = match a.method {
        MethodArg::Cfc => vec![(Method::Cfc, a.out.clone())],
        MethodArg::Shap => vec![(Method::Shap, a.out.clone())],
        MethodArg::Both => {
            if is_stdout(&a.out) {
                return Err(
                    Usage("--method both writes two files; give a path, not `-`".into()).into(),
                );
            }
            vec![
                (Method::Cfc, suffixed(&a.out, Method::Cfc)),
                (Method::Shap, suffixed(&a.out, Method::Shap)),
            ]
        }
    };
    let model = load_model(&a.model)?;
    let rows = load_instances(&a.data, model.feature_names())?;
    for (method, path) in targets {
        let ar = explain(&model, &rows, method)?;
        let mut buf = Vec::new();
        write_table(&ar, &mut buf)?;
        write_output(&path, std::str::from_utf8(&buf)?)?;
        if !is_stdout(&path) {
            eprintln!("{method}: {} rows -> {}", ar.n_instances(), path.display());
        }
    }
    Ok(())
}

fn study_config(s: &StudyArgs) -> StudyConfig {
    let kind = ModelKind::from(s.model_kind);
    StudyConfig {
        train_config: s.trainer.resolve(kind, s.seed),
        ..StudyConfig::new(kind, s.seed)
    }
}

fn emit_report(report: &CorrelationReport, s: &StudyArgs) -> Result<()> {
    let format = match s.format {
        FormatArg::Tsv => ReportFormat::Delimited,
        FormatArg::Json => ReportFormat::Structured,
    };
    write_output(&s.out, &render_report(report, format)?)
}

fn compare_local(a: CompareLocalArgs) -> Result<()> {
    let ds = load_dataset(&a.study.data.data, &a.study.data.target)?;
    let config = StudyConfig {
        filter_fraction: a.filter,
        ..study_config(&a.study)
    };
    let report = local_correlation_study(&ds, &config)?;
    emit_report(&report, &a.study)?;
    let kept = report
        .per_feature
        .iter()
        .filter(|f| f.kept_by_filter)
        .count();
    eprintln!(
        "{}: {} features, {kept} kept by the {} filter",
        report.dataset,
        report.per_feature.len(),
        a.filter
    );
    Ok(())
}

fn subset_power(a: SubsetPowerArgs) -> Result<()> {
    let ds = load_dataset(&a.study.data.data, &a.study.data.target)?;
    let config = StudyConfig {
        n_subsets: a.n_subsets,
        loss: a.loss.into(),
        test_fraction: a.test_fraction,
        ..study_config(&a.study)
    };
    let report = subset_power_study(&ds, &config)?;
    emit_report(&report, &a.study)?;
    if let Some(path) = &a.samples_out {
        let file = File::create(path).with_context(|| format!("writing {}", path.display()))?;
        let mut out = BufWriter::new(file);
        write_samples(&report, &mut out).with_context(|| format!("writing {}", path.display()))?;
        out.flush()?;
    }
    let level = report
        .study_level
        .as_ref()
        .ok_or_else(|| anyhow!("study produced no study-level result"))?;
    let show = |c: Option<f64>| c.map_or_else(|| "nan".to_string(), |v| format!("{v:.4}"));
    eprintln!(
        "{}: corr(shap, loss) = {}, corr(cfc, loss) = {}, {} of {} subsets skipped",
        report.dataset,
        show(level.corr_shap_loss),
        show(level.corr_cfc_loss),
        level.n_skipped,
        level.n_subsets
    );
    Ok(())
}

fn validate(a: ValidateArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    println!(
        "{}: valid {} model, {} trees, {} features, expected value {}",
        a.model.display(),
        model.kind(),
        model.trees().len(),
        model.n_features(),
        model.expected_value()
    );
    Ok(())
}
