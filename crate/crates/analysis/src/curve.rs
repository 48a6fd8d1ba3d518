use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use tagbench_perturb::{DropMode, PerturbationSpec};

use crate::{accuracy, PredictionRecord, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub mode: DropMode,
    pub p: f64,
    pub accuracy: f64,
    pub n: usize,
}

/// Accuracy as a function of the drop/add fraction, one curve per mode.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CurveTable {
    pub rows: Vec<CurveRow>,
    /// Records without a drop/add perturbation, excluded from the curves.
    pub excluded_records: usize,
}

impl CurveTable {
    pub fn rows_for(&self, mode: DropMode) -> Vec<&CurveRow> {
        self.rows.iter().filter(|r| r.mode == mode).collect()
    }

    pub fn accuracy_at(&self, mode: DropMode, p: f64) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.mode == mode && (r.p - p).abs() < 1e-12)
            .map(|r| r.accuracy)
    }
}

/// Group records by `(mode, p)` and compute per-group accuracy; `p` values
/// are sorted ascending within each mode.
pub fn perturbation_curve(records: &[PredictionRecord]) -> Result<CurveTable> {
    let mut groups: BTreeMap<(String, u64), Vec<&PredictionRecord>> = BTreeMap::new();
    let mut excluded = 0usize;
    for record in records {
        match record.perturbation {
            Some(PerturbationSpec::Drop(spec)) => {
                groups
                    .entry((spec.mode.to_string(), spec.p.to_bits()))
                    .or_default()
                    .push(record);
            }
            _ => excluded += 1,
        }
    }

    let mut rows = Vec::with_capacity(groups.len());
    for ((_, p_bits), group) in &groups {
        let spec = match group[0].perturbation {
            Some(PerturbationSpec::Drop(spec)) => spec,
            _ => unreachable!("grouped on drop perturbations"),
        };
        let owned: Vec<PredictionRecord> = group.iter().map(|&r| r.clone()).collect();
        rows.push(CurveRow {
            mode: spec.mode,
            p: f64::from_bits(*p_bits),
            accuracy: accuracy(&owned)?,
            n: group.len(),
        });
    }
    rows.sort_by(|a, b| {
        a.mode
            .to_string()
            .cmp(&b.mode.to_string())
            .then(a.p.partial_cmp(&b.p).expect("p is never NaN"))
    });
    Ok(CurveTable {
        rows,
        excluded_records: excluded,
    })
}
