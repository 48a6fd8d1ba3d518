use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use tagbench_backend::ParsedLabel;
use tagbench_perturb::PerturbationSpec;
use tagbench_prompt::{PromptStyle, TextContext};

use crate::{AnalysisError, Result};

/// One prediction outcome, as streamed to the records JSONL file.
///
/// Field order is the serialization order; replays must reproduce these
/// lines byte-for-byte, so no volatile data (timestamps, latencies) lives
/// here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub node_id: String,
    pub style: PromptStyle,
    pub context: TextContext,
    #[serde(default)]
    pub perturbation: Option<PerturbationSpec>,
    /// 1 for single-stage styles, 2 for the attention prediction stage.
    pub stage: u8,
    pub raw_text: String,
    pub parsed: ParsedLabel,
    pub correct: bool,
    #[serde(default)]
    pub homophily: Option<f64>,
}

impl PredictionRecord {
    /// Resume/dedupe key.
    pub fn work_key(&self) -> String {
        format!(
            "{}|{}|{}|{}|{}",
            self.node_id,
            self.style,
            self.context,
            self.perturbation
                .map(|p| p.to_string())
                .unwrap_or_else(|| "none".into()),
            self.stage
        )
    }
}

pub fn write_records(path: &Path, records: &[PredictionRecord]) -> Result<()> {
    let mut file = std::fs::File::create(path).map_err(|e| AnalysisError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    for record in records {
        let line = serde_json::to_string(record).expect("record serializes");
        writeln!(file, "{line}").map_err(|e| AnalysisError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
    }
    Ok(())
}

pub fn read_records(path: &Path) -> Result<Vec<PredictionRecord>> {
    let file = std::fs::File::open(path).map_err(|e| AnalysisError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let mut records = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| AnalysisError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(
            serde_json::from_str(&line).map_err(|e| AnalysisError::Parse {
                path: path.display().to_string(),
                line: lineno + 1,
                message: e.to_string(),
            })?,
        );
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tagbench_perturb::{DropMode, DropSpec};

    #[test]
    fn record_round_trip() {
        let record = PredictionRecord {
            node_id: "n1".into(),
            style: PromptStyle::khop_title(1),
            context: TextContext::Scarce,
            perturbation: Some(PerturbationSpec::Drop(DropSpec::new(
                DropMode::DropSame,
                0.5,
                7,
            ))),
            stage: 1,
            raw_text: "cs.LG".into(),
            parsed: ParsedLabel::Label(2),
            correct: true,
            homophily: Some(0.4),
        };
        let json = serde_json::to_string(&record).unwrap();
        let back: PredictionRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, record);
        assert!(json.contains(r#""style":"1-hop-title""#));
        assert!(json.contains(r#""mode":"drop_same""#));
    }
}
