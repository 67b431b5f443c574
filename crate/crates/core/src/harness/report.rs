use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::harness::{Correlation, CorrelationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    /// `#` metadata lines, a tab-separated per-feature table and a
    /// `# study-level` footer.
    Delimited,
    /// Pretty-printed JSON.
    Structured,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tsv" | "delimited" => Ok(ReportFormat::Delimited),
            "json" | "structured" => Ok(ReportFormat::Structured),
            other => Err(Error::Config(format!("unknown report format `{other}`"))),
        }
    }
}

fn corr(c: Correlation) -> String {
    c.map_or_else(|| "nan".to_string(), |v| v.to_string())
}

pub const TABLE_HEADER: &str =
    "rank\tfeature\tindex\tpearson_r\tr_squared\tr_undefined\tglobal_shap\tglobal_cfc\tkept_by_filter";

fn render_delimited(report: &CorrelationReport) -> Result<String> {
    let config = serde_json::to_string(&report.config).map_err(|e| Error::Config(e.to_string()))?;
    let mut s = String::new();
    // Writing to a String cannot fail.
    let _ = writeln!(s, "# study={}", report.study);
    let _ = writeln!(s, "# dataset={}", report.dataset);
    let _ = writeln!(s, "# n_instances={}", report.n_instances);
    let _ = writeln!(s, "# seed={}", report.config.seed);
    let _ = writeln!(s, "# config={config}");
    for note in &report.notes {
        let _ = writeln!(s, "# note={note}");
    }
    let _ = writeln!(s, "{TABLE_HEADER}");
    for f in &report.per_feature {
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            f.rank,
            f.feature,
            f.index,
            corr(f.pearson_r),
            corr(f.r_squared),
            f.is_undefined(),
            f.global_shap,
            f.global_cfc,
            f.kept_by_filter
        );
    }
    if let Some(level) = &report.study_level {
        let _ = writeln!(s, "# study-level");
        let _ = writeln!(s, "# loss={}", level.loss);
        let _ = writeln!(s, "# corr_shap_loss={}", corr(level.corr_shap_loss));
        let _ = writeln!(s, "# corr_cfc_loss={}", corr(level.corr_cfc_loss));
        let _ = writeln!(s, "# n_subsets={}", level.n_subsets);
        let _ = writeln!(s, "# n_skipped={}", level.n_skipped);
    }
    Ok(s)
}

/// Renders `report` in `format`.
pub fn render_report(report: &CorrelationReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Delimited => render_delimited(report),
        ReportFormat::Structured => {
            let mut text =
                serde_json::to_string_pretty(report).map_err(|e| Error::Config(e.to_string()))?;
            text.push('\n');
            Ok(text)
        }
    }
}

pub fn write_report(report: &CorrelationReport, format: ReportFormat, path: &Path) -> Result<()> {
    let text = render_report(report, format)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Reads a report written in the structured format.
pub fn read_report(path: &Path) -> Result<CorrelationReport> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    })
}

/// One row per sampled subset: `k`, loss, both importance totals and the
/// comma-separated member indices.
pub fn write_samples<W: Write>(report: &CorrelationReport, mut out: W) -> io::Result<()> {
    writeln!(
        out,
        "k\tretrained_loss\ttotal_importance_shap\ttotal_importance_cfc\tmembers"
    )?;
    for s in &report.samples {
        let members: Vec<String> = s.subset.iter().map(|m| m.to_string()).collect();
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            s.k,
            s.retrained_loss,
            s.total_importance_shap,
            s.total_importance_cfc,
            members.join(",")
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attribution::FeatureSubset;
    use crate::harness::{
        FeatureCorrelation, LossKind, ModelKind, StudyConfig, StudyKind, StudyLevel, SubsetSample,
    };

    fn report() -> CorrelationReport {
        CorrelationReport {
            study: StudyKind::SubsetPower,
            dataset: "toy".into(),
            n_instances: 3,
            config: StudyConfig::new(ModelKind::Boosted, 5),
            notes: vec!["a note".into()],
            per_feature: vec![
                FeatureCorrelation {
                    rank: 1,
                    feature: "a".into(),
                    index: 1,
                    pearson_r: Some(0.5),
                    r_squared: Some(0.25),
                    global_shap: 0.3,
                    global_cfc: 0.1 + 0.2,
                    kept_by_filter: true,
                },
                FeatureCorrelation {
                    rank: 2,
                    feature: "b".into(),
                    index: 0,
                    pearson_r: None,
                    r_squared: None,
                    global_shap: 0.0,
                    global_cfc: 0.0,
                    kept_by_filter: false,
                },
            ],
            study_level: Some(StudyLevel {
                corr_shap_loss: Some(-0.9),
                corr_cfc_loss: None,
                loss: LossKind::LogLoss,
                n_subsets: 2,
                n_skipped: 0,
            }),
            samples: vec![SubsetSample {
                subset: FeatureSubset::from_indices(2, [1, 0]),
                k: 2,
                retrained_loss: 0.4,
                total_importance_shap: 0.3,
                total_importance_cfc: 0.3,
            }],
        }
    }

    #[test]
    fn structured_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        let r = report();
        write_report(&r, ReportFormat::Structured, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.contains("\"pearson_r\": \"nan\""));
        assert_eq!(read_report(&path).unwrap(), r);
    }

    #[test]
    fn delimited_layout() {
        let text = render_report(&report(), ReportFormat::Delimited).unwrap();
        assert!(text.starts_with("# study=subset-power\n# dataset=toy\n"));
        assert!(text.contains(&format!("\n{TABLE_HEADER}\n")));
        assert!(text.contains("\n2\tb\t0\tnan\tnan\ttrue\t0\t0\tfalse\n"));
        assert!(text.ends_with("# corr_cfc_loss=nan\n# n_subsets=2\n# n_skipped=0\n"));
    }

    #[test]
    fn samples_table() {
        let mut buf = Vec::new();
        write_samples(&report(), &mut buf).unwrap();
        assert!(String::from_utf8(buf)
            .unwrap()
            .ends_with("2\t0.4\t0.3\t0.3\t0,1\n"));
    }

    #[test]
    fn missing_file_names_path() {
        let err = read_report(Path::new("/nonexistent/report.json")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/report.json"));
    }
}
