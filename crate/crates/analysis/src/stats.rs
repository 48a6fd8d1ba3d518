use serde::{Deserialize, Serialize};

use crate::{AnalysisError, PredictionRecord, Result};

/// Fraction of correct records.
pub fn accuracy(records: &[PredictionRecord]) -> Result<f64> {
    if records.is_empty() {
        return Err(AnalysisError::Argument(
            "accuracy of an empty record set".into(),
        ));
    }
    let correct = records.iter().filter(|r| r.correct).count();
    Ok(correct as f64 / records.len() as f64)
}

/// Point-biserial correlation with its two-sided p-value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub r: f64,
    pub p_value: f64,
    pub n: usize,
}

/// Correlation between a continuous variable and a binary flag.
///
/// `r = (M1 - M0) / s_n * sqrt(n1 * n0 / n^2)` with class means `M1`, `M0`
/// and the population standard deviation `s_n`; identical to the Pearson
/// correlation of the values against a 0/1 indicator. The two-sided p-value
/// comes from `t = r * sqrt((n - 2) / (1 - r^2))` with `n - 2` degrees of
/// freedom, evaluated through the regularized incomplete beta function.
pub fn point_biserial(values: &[f64], flags: &[bool]) -> Result<CorrelationResult> {
    if values.len() != flags.len() {
        return Err(AnalysisError::Argument(format!(
            "length mismatch: {} values vs {} flags",
            values.len(),
            flags.len()
        )));
    }
    let n = values.len();
    if n < 3 {
        return Err(AnalysisError::Argument(format!(
            "need at least 3 samples, got {n}"
        )));
    }
    let n1 = flags.iter().filter(|&&f| f).count();
    let n0 = n - n1;
    if n1 == 0 || n0 == 0 {
        return Err(AnalysisError::UndefinedCorrelation(
            "flags contain a single class".into(),
        ));
    }

    let mean = values.iter().sum::<f64>() / n as f64;
    let variance = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    if variance == 0.0 {
        return Err(AnalysisError::UndefinedCorrelation(
            "values have zero variance".into(),
        ));
    }
    let s_n = variance.sqrt();

    let mean1 = values
        .iter()
        .zip(flags)
        .filter(|(_, &f)| f)
        .map(|(v, _)| v)
        .sum::<f64>()
        / n1 as f64;
    let mean0 = values
        .iter()
        .zip(flags)
        .filter(|(_, &f)| !f)
        .map(|(v, _)| v)
        .sum::<f64>()
        / n0 as f64;

    let r = (mean1 - mean0) / s_n * ((n1 as f64 * n0 as f64) / (n as f64 * n as f64)).sqrt();
    let r = r.clamp(-1.0, 1.0);

    let df = (n - 2) as f64;
    let p_value = if (1.0 - r * r) <= 0.0 {
        0.0
    } else {
        let t = r * (df / (1.0 - r * r)).sqrt();
        // two-sided: P(|T| >= |t|) = I_{df/(df+t^2)}(df/2, 1/2)
        statrs::function::beta::beta_reg(df / 2.0, 0.5, df / (df + t * t)).clamp(0.0, 1.0)
    };

    Ok(CorrelationResult { r, p_value, n })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(correct: bool) -> PredictionRecord {
        PredictionRecord {
            node_id: "n".into(),
            style: tagbench_prompt::PromptStyle::zero_shot(),
            context: tagbench_prompt::TextContext::Scarce,
            perturbation: None,
            stage: 1,
            raw_text: String::new(),
            parsed: tagbench_backend::ParsedLabel::Unparsable {
                reason: "test".into(),
            },
            correct,
            homophily: None,
        }
    }

    #[test]
    fn accuracy_basics() {
        let all: Vec<_> = (0..4).map(|_| record(true)).collect();
        assert_eq!(accuracy(&all).unwrap(), 1.0);
        let mixed: Vec<_> = [true, true, true, false].map(record).to_vec();
        assert_eq!(accuracy(&mixed).unwrap(), 0.75);
        assert!(accuracy(&[]).is_err());
    }

    #[test]
    fn perfect_separation_is_exactly_one() {
        let result =
            point_biserial(&[0.0, 0.0, 1.0, 1.0], &[false, false, true, true]).unwrap();
        assert_eq!(result.r, 1.0);
        assert_eq!(result.p_value, 0.0);
    }

    #[test]
    fn single_class_or_zero_variance_is_undefined() {
        assert!(matches!(
            point_biserial(&[0.1, 0.2, 0.3], &[true, true, true]),
            Err(AnalysisError::UndefinedCorrelation(_))
        ));
        assert!(matches!(
            point_biserial(&[0.5, 0.5, 0.5, 0.5], &[true, false, true, false]),
            Err(AnalysisError::UndefinedCorrelation(_))
        ));
    }

    #[test]
    fn matches_known_t_distribution_point() {
        // r = 0 exactly: symmetric values, balanced flags
        let result = point_biserial(
            &[1.0, 2.0, 1.0, 2.0],
            &[true, false, false, true],
        )
        .unwrap();
        assert!(result.r.abs() < 1e-15);
        assert!((result.p_value - 1.0).abs() < 1e-12);
    }
}
