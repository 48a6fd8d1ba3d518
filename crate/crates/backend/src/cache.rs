use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{BackendError, Origin, Predictor, PredictorRequest, RawResponse, Result};

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Replay key: hash of everything that determines a remote reply. Any
/// change to the model tag, decoding parameters or prompt text invalidates
/// the cached transcript.
pub fn cache_key(request: &PredictorRequest) -> String {
    let mut hasher = Sha256::new();
    hasher.update(b"tagbench-cache-v1\0");
    hasher.update(request.model_tag.as_bytes());
    hasher.update([0u8]);
    hasher.update(request.decoding.temperature.to_le_bytes());
    hasher.update(request.decoding.max_output_tokens.to_le_bytes());
    hasher.update((request.system_text.len() as u64).to_le_bytes());
    hasher.update(request.system_text.as_bytes());
    for user in &request.user_texts {
        hasher.update((user.len() as u64).to_le_bytes());
        hasher.update(user.as_bytes());
    }
    hex(&hasher.finalize())
}

/// Audit digest of the message payload alone (system plus user texts).
pub fn request_digest(request: &PredictorRequest) -> String {
    let mut texts = vec![request.system_text.as_str()];
    texts.extend(request.user_texts.iter().map(|s| s.as_str()));
    let json = serde_json::to_string(&texts).expect("strings always serialize");
    hex(&Sha256::digest(json.as_bytes()))
}

#[derive(Serialize, Deserialize)]
struct CacheLine {
    key: String,
    request_digest: String,
    response: String,
    ts: String,
}

/// Append-only JSONL transcript store. Entries written later win on key
/// collisions, so re-recording a transcript is an append, not an edit.
pub struct TranscriptCache {
    path: PathBuf,
    entries: HashMap<String, String>,
}

impl TranscriptCache {
    pub fn open(path: &Path) -> Result<Self> {
        let mut entries = HashMap::new();
        match File::open(path) {
            Ok(file) => {
                for line in BufReader::new(file).lines() {
                    let line = line.map_err(|e| BackendError::CacheIo {
                        path: path.display().to_string(),
                        source: e,
                    })?;
                    if line.trim().is_empty() {
                        continue;
                    }
                    let parsed: CacheLine =
                        serde_json::from_str(&line).map_err(|e| BackendError::Config(format!(
                            "corrupt cache line in {}: {e}",
                            path.display()
                        )))?;
                    entries.insert(parsed.key, parsed.response);
                }
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => {
                return Err(BackendError::CacheIo {
                    path: path.display().to_string(),
                    source: e,
                })
            }
        }
        Ok(Self {
            path: path.to_path_buf(),
            entries,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|s| s.as_str())
    }

    pub fn insert(&mut self, key: String, digest: String, response: String) -> Result<()> {
        let line = CacheLine {
            key: key.clone(),
            request_digest: digest,
            response: response.clone(),
            ts: chrono::Utc::now().to_rfc3339(),
        };
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(|e| BackendError::CacheIo {
                path: self.path.display().to_string(),
                source: e,
            })?;
        let json = serde_json::to_string(&line).expect("cache line serializes");
        writeln!(file, "{json}").map_err(|e| BackendError::CacheIo {
            path: self.path.display().to_string(),
            source: e,
        })?;
        self.entries.insert(key, response);
        Ok(())
    }
}

/// Cache-wrapping predictor: consults the transcript first, forwards misses
/// to the inner backend and persists the reply. Persistence is serialized
/// through a single writer lock.
pub struct CachedBackend {
    inner: Arc<dyn Predictor>,
    cache: Mutex<TranscriptCache>,
}

impl CachedBackend {
    pub fn new(inner: Arc<dyn Predictor>, cache_path: &Path) -> Result<Self> {
        Ok(Self {
            inner,
            cache: Mutex::new(TranscriptCache::open(cache_path)?),
        })
    }
}

impl Predictor for CachedBackend {
    fn complete(&self, request: &PredictorRequest) -> Result<RawResponse> {
        let key = cache_key(request);
        {
            let cache = self.cache.lock().expect("cache lock");
            if let Some(text) = cache.get(&key) {
                return Ok(RawResponse {
                    text: text.to_string(),
                    origin: Origin::Cache,
                    latency_ms: None,
                });
            }
        }
        let response = self.inner.complete(request)?;
        let mut cache = self.cache.lock().expect("cache lock");
        if cache.get(&key).is_none() {
            cache.insert(key, request_digest(request), response.text.clone())?;
        }
        Ok(response)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Canned(&'static str);
    impl Predictor for Canned {
        fn complete(&self, _request: &PredictorRequest) -> Result<RawResponse> {
            Ok(RawResponse {
                text: self.0.to_string(),
                origin: Origin::Live,
                latency_ms: Some(1),
            })
        }
    }

    fn request(text: &str) -> PredictorRequest {
        PredictorRequest::new("m", "sys".into(), vec![text.to_string()])
    }

    #[test]
    fn key_covers_all_request_fields() {
        let base = request("hello");
        let mut other_model = base.clone();
        other_model.model_tag = "m2".into();
        let mut other_temp = base.clone();
        other_temp.decoding.temperature = 0.5;
        let mut other_user = base.clone();
        other_user.user_texts = vec!["hellp".into()];
        let mut two_stage = base.clone();
        two_stage.user_texts.push("again".into());

        let k = cache_key(&base);
        for variant in [&other_model, &other_temp, &other_user, &two_stage] {
            assert_ne!(k, cache_key(variant));
        }
        assert_eq!(k, cache_key(&base.clone()));
    }

    #[test]
    fn hit_returns_cache_origin_and_identical_text() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        let backend = CachedBackend::new(Arc::new(Canned("cs.LG")), &path).unwrap();
        let first = backend.complete(&request("q")).unwrap();
        assert_eq!(first.origin, Origin::Live);
        let second = backend.complete(&request("q")).unwrap();
        assert_eq!(second.origin, Origin::Cache);
        assert_eq!(second.text, first.text);

        // a fresh handle over the same file replays too
        let reopened = CachedBackend::new(Arc::new(Canned("DIFFERENT")), &path).unwrap();
        let third = reopened.complete(&request("q")).unwrap();
        assert_eq!(third.origin, Origin::Cache);
        assert_eq!(third.text, "cs.LG");
    }

    #[test]
    fn cache_file_shape() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        let backend = CachedBackend::new(Arc::new(Canned("yes")), &path).unwrap();
        backend.complete(&request("q")).unwrap();
        let line = std::fs::read_to_string(&path).unwrap();
        let value: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
        for field in ["key", "request_digest", "response", "ts"] {
            assert!(value.get(field).is_some(), "missing {field}");
        }
        assert_eq!(value["response"], "yes");
    }
}
