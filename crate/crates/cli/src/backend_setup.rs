use std::path::Path;
use std::sync::Arc;

use tagbench_backend::{
    CachedBackend, DecodingParams, KeywordOracle, MajorityVoteOracle, Predictor, RemoteBackend,
    RemoteBackendConfig, RetryPolicy,
};
use tagbench_prompt::DatasetProfile;

use crate::config::BackendSection;
use crate::{CliError, Result};

/// Instantiate the configured predictor, cache-wrapped when a cache path is
/// set. Returns the predictor, its model tag and the decoding parameters.
pub fn build_backend(
    section: &BackendSection,
    profile: &DatasetProfile,
    output_dir: &Path,
) -> Result<(Arc<dyn Predictor>, String, DecodingParams)> {
    let decoding = DecodingParams {
        temperature: section.temperature.unwrap_or(0.0),
        max_output_tokens: section.max_output_tokens.unwrap_or(500),
    };
    let model_tag = section
        .model_tag
        .clone()
        .unwrap_or_else(|| format!("{}-oracle", section.kind));

    let inner: Arc<dyn Predictor> = match section.kind.as_str() {
        "majority_vote" => {
            let fallback = section
                .fallback_label
                .clone()
                .or_else(|| profile.label_vocab.first().cloned())
                .ok_or_else(|| {
                    CliError::Runtime("majority-vote oracle needs a non-empty vocabulary".into())
                })?;
            Arc::new(MajorityVoteOracle::new(&fallback))
        }
        "keyword" => {
            let map = section
                .keywords
                .clone()
                .expect("validated: keyword oracle has a keyword map");
            Arc::new(KeywordOracle::new(map))
        }
        "remote" => {
            let remote = RemoteBackend::new(RemoteBackendConfig {
                endpoint: section.endpoint.clone().expect("validated"),
                credential_env: section.credential_env.clone().expect("validated"),
                timeout_ms: section.timeout_ms.unwrap_or(60_000),
                retry: RetryPolicy {
                    max_attempts: section.retry_max_attempts.unwrap_or(3),
                    base_delay_ms: section.retry_base_delay_ms.unwrap_or(200),
                },
                max_in_flight: section.concurrency.unwrap_or(4),
            })
            .map_err(CliError::runtime)?;
            Arc::new(remote)
        }
        other => return Err(CliError::Runtime(format!("unknown backend kind {other}"))),
    };

    let backend: Arc<dyn Predictor> = match &section.cache {
        Some(path) => {
            let resolved = if path.is_absolute() {
                path.clone()
            } else {
                output_dir.join(path)
            };
            if let Some(parent) = resolved.parent() {
                std::fs::create_dir_all(parent).map_err(CliError::runtime)?;
            }
            Arc::new(CachedBackend::new(inner, &resolved).map_err(CliError::runtime)?)
        }
        None => inner,
    };

    Ok((backend, model_tag, decoding))
}
