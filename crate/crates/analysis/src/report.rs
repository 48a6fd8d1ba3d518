use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use tagbench_perturb::{PerturbationSpec, RewireKind};

use crate::{
    accuracy, perturbation_curve, point_biserial, AnalysisError, CorrelationResult, CurveTable,
    PredictionRecord, Result,
};

/// Run-level metadata carried into the report.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ReportMeta {
    pub dataset: String,
    pub model_tag: String,
    pub seed: u64,
    pub config_digest: String,
    pub started_at: String,
    pub finished_at: String,
    pub generator_version: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AccuracyRow {
    pub style: String,
    pub context: String,
    pub accuracy: f64,
    pub n: usize,
    pub unparsable_rate: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub style: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<CorrelationResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RewireRow {
    pub strategy: RewireKind,
    pub style: String,
    pub accuracy: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub meta: ReportMeta,
    pub accuracy: Vec<AccuracyRow>,
    pub correlations: Vec<CorrelationRow>,
    pub curves: CurveTable,
    pub rewires: Vec<RewireRow>,
}

/// Assemble the report: per-(style, context) accuracy and unparsable rate,
/// per-style homophily/correctness correlation over unperturbed records with
/// a defined ratio, drop/add curves, and per-strategy rewire accuracies.
pub fn build_report(records: &[PredictionRecord], meta: ReportMeta) -> Result<ExperimentReport> {
    if records.is_empty() {
        return Err(AnalysisError::Argument(
            "cannot build a report from zero records".into(),
        ));
    }

    let mut by_style_context: BTreeMap<(String, String), Vec<&PredictionRecord>> = BTreeMap::new();
    for record in records {
        by_style_context
            .entry((record.style.to_string(), record.context.to_string()))
            .or_default()
            .push(record);
    }
    let mut accuracy_rows = Vec::new();
    for ((style, context), group) in &by_style_context {
        let owned: Vec<PredictionRecord> = group.iter().map(|&r| r.clone()).collect();
        let unparsable = group
            .iter()
            .filter(|r| r.parsed.label().is_none())
            .count();
        accuracy_rows.push(AccuracyRow {
            style: style.clone(),
            context: context.clone(),
            accuracy: accuracy(&owned)?,
            n: group.len(),
            unparsable_rate: unparsable as f64 / group.len() as f64,
        });
    }

    let mut by_style: BTreeMap<String, (Vec<f64>, Vec<bool>)> = BTreeMap::new();
    for record in records {
        if record.perturbation.is_some() {
            continue;
        }
        if let Some(h) = record.homophily {
            let entry = by_style.entry(record.style.to_string()).or_default();
            entry.0.push(h);
            entry.1.push(record.correct);
        }
    }
    let styles: std::collections::BTreeSet<String> =
        records.iter().map(|r| r.style.to_string()).collect();
    let mut correlations = Vec::new();
    for style in styles {
        match by_style.get(&style) {
            Some((values, flags)) => match point_biserial(values, flags) {
                Ok(result) => correlations.push(CorrelationRow {
                    style,
                    result: Some(result),
                    skipped: None,
                }),
                Err(e) => correlations.push(CorrelationRow {
                    style,
                    result: None,
                    skipped: Some(e.to_string()),
                }),
            },
            None => correlations.push(CorrelationRow {
                style,
                result: None,
                skipped: Some("no unperturbed records with a defined homophily ratio".into()),
            }),
        }
    }

    let curves = perturbation_curve(records)?;

    let mut rewire_groups: BTreeMap<(String, String), Vec<PredictionRecord>> = BTreeMap::new();
    for record in records {
        if let Some(PerturbationSpec::Rewire { rewire }) = record.perturbation {
            rewire_groups
                .entry((rewire.to_string(), record.style.to_string()))
                .or_default()
                .push(record.clone());
        }
    }
    let mut rewires = Vec::new();
    for ((strategy, style), group) in rewire_groups {
        let strategy = match strategy.as_str() {
            "random" => RewireKind::Random,
            "extreme" => RewireKind::Extreme,
            _ => RewireKind::Path,
        };
        rewires.push(RewireRow {
            strategy,
            style,
            accuracy: accuracy(&group)?,
            n: group.len(),
        });
    }

    Ok(ExperimentReport {
        meta,
        accuracy: accuracy_rows,
        correlations,
        curves,
        rewires,
    })
}

/// One TSV per drop/add mode, columns `mode p accuracy n`, rows sorted by p.
pub fn write_curve_tsvs(table: &CurveTable, dir: &Path) -> Result<()> {
    let modes: std::collections::BTreeSet<String> =
        table.rows.iter().map(|r| r.mode.to_string()).collect();
    for mode in modes {
        let path = dir.join(format!("curve_{mode}.tsv"));
        let mut file = std::fs::File::create(&path).map_err(|e| AnalysisError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        writeln!(file, "mode\tp\taccuracy\tn").map_err(|e| AnalysisError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        for row in table.rows.iter().filter(|r| r.mode.to_string() == mode) {
            writeln!(file, "{}\t{}\t{}\t{}", row.mode, row.p, row.accuracy, row.n).map_err(
                |e| AnalysisError::Io {
                    path: path.display().to_string(),
                    source: e,
                },
            )?;
        }
    }
    Ok(())
}
