use crate::{PaperStub, PipelineError, Result};

/// Uniform seeded sample of `n` papers published within `[year_min,
/// year_max]`, in sample order.
pub fn select_seeds(
    corpus: &[PaperStub],
    year_min: i32,
    year_max: i32,
    n: usize,
    seed: u64,
) -> Result<Vec<PaperStub>> {
    let candidates: Vec<&PaperStub> = corpus
        .iter()
        .filter(|p| (year_min..=year_max).contains(&p.year))
        .collect();
    if n > candidates.len() {
        return Err(PipelineError::Argument(format!(
            "requested {n} seeds but only {} candidates in {year_min}..={year_max}",
            candidates.len()
        )));
    }
    let mut rng = tagbench_core::derived_rng("seed-select", "", seed);
    let chosen = rand::seq::index::sample(&mut rng, candidates.len(), n);
    Ok(chosen.iter().map(|i| candidates[i].clone()).collect())
}
