use std::cell::RefCell;
use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::time::{Duration, Instant};

use serde::Deserialize;

use crate::{PaperStub, PipelineError, Result};

/// Metadata lookup backend for the construction pipeline.
///
/// `search_by_title` returns candidates ranked most-plausible first; the
/// builder accepts the first candidate passing the match policy and
/// attributes every search call to the paper whose references are being
/// resolved (at most `BuildOptions::search_budget` per paper).
pub trait Resolver {
    fn lookup_by_id(&self, id: &str) -> Result<Option<PaperStub>>;
    fn search_by_title(&self, title: &str) -> Result<Vec<PaperStub>>;
}

#[derive(Deserialize)]
struct CorpusLine {
    #[serde(default)]
    id: Option<String>,
    title: String,
    year: i32,
    #[serde(default)]
    refs: Vec<String>,
}

/// Offline resolver over a JSONL corpus of
/// `{"id": str|null, "title": str, "year": int, "refs": [str...]}` lines.
/// Title search ranks the whole corpus by normalized edit distance,
/// breaking ties by corpus order, and returns the closest few.
pub struct ScriptedResolver {
    papers: Vec<PaperStub>,
    by_id: HashMap<String, usize>,
    search_results: usize,
}

impl ScriptedResolver {
    pub fn from_stubs(stubs: Vec<PaperStub>) -> Self {
        let mut by_id = HashMap::new();
        for (i, stub) in stubs.iter().enumerate() {
            if let Some(id) = &stub.arxiv_id {
                by_id.insert(id.clone(), i);
            }
        }
        Self {
            papers: stubs,
            by_id,
            search_results: 5,
        }
    }

    pub fn from_jsonl(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| PipelineError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let mut stubs = Vec::new();
        for (lineno, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| PipelineError::Io {
                path: path.display().to_string(),
                source: e,
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let raw: CorpusLine =
                serde_json::from_str(&line).map_err(|e| PipelineError::Parse {
                    path: path.display().to_string(),
                    line: lineno + 1,
                    message: e.to_string(),
                })?;
            stubs.push(PaperStub {
                arxiv_id: raw.id,
                title: raw.title,
                year: raw.year,
                raw_reference_strings: raw.refs,
            });
        }
        Ok(Self::from_stubs(stubs))
    }

    pub fn papers(&self) -> &[PaperStub] {
        &self.papers
    }
}

impl Resolver for ScriptedResolver {
    fn lookup_by_id(&self, id: &str) -> Result<Option<PaperStub>> {
        Ok(self.by_id.get(id).map(|&i| self.papers[i].clone()))
    }

    fn search_by_title(&self, title: &str) -> Result<Vec<PaperStub>> {
        let mut scored: Vec<(f64, usize)> = self
            .papers
            .iter()
            .enumerate()
            .map(|(i, p)| (crate::normalized_levenshtein(&p.title, title), i))
            .collect();
        scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        Ok(scored
            .into_iter()
            .take(self.search_results)
            .map(|(_, i)| self.papers[i].clone())
            .collect())
    }
}

/// Token-bucket rate limiter: `rate` acquisitions per second with burst
/// capacity `capacity`.
pub struct TokenBucket {
    capacity: f64,
    rate: f64,
    state: RefCell<(f64, Instant)>,
}

impl TokenBucket {
    pub fn new(rate: f64, capacity: usize) -> Self {
        Self {
            capacity: capacity as f64,
            rate,
            state: RefCell::new((capacity as f64, Instant::now())),
        }
    }

    /// Block until one token is available, then take it.
    pub fn acquire(&self) {
        loop {
            let wait = {
                let mut state = self.state.borrow_mut();
                let (ref mut tokens, ref mut last) = *state;
                let now = Instant::now();
                *tokens = (*tokens + now.duration_since(*last).as_secs_f64() * self.rate)
                    .min(self.capacity);
                *last = now;
                if *tokens >= 1.0 {
                    *tokens -= 1.0;
                    return;
                }
                Duration::from_secs_f64((1.0 - *tokens) / self.rate)
            };
            std::thread::sleep(wait);
        }
    }
}

/// Configuration of the HTTP metadata resolver.
///
/// `search_url` and `lookup_url` carry a `{query}` placeholder replaced by
/// the percent-encoded title or id. Both endpoints are expected to return a
/// JSON array of `{"id", "title", "year", "refs"}` objects.
#[derive(Debug, Clone, Deserialize)]
pub struct HttpResolverConfig {
    pub search_url: String,
    pub lookup_url: String,
    /// Requests per second granted by the token bucket.
    #[serde(default = "default_rate")]
    pub requests_per_second: f64,
    #[serde(default = "default_timeout_ms")]
    pub timeout_ms: u64,
    #[serde(default = "default_attempts")]
    pub max_attempts: u32,
}

fn default_rate() -> f64 {
    3.0
}

fn default_timeout_ms() -> u64 {
    10_000
}

fn default_attempts() -> u32 {
    3
}

/// Resolver backed by an HTTP metadata endpoint, rate limited and retried.
pub struct HttpResolver {
    config: HttpResolverConfig,
    bucket: TokenBucket,
    agent: ureq::Agent,
}

impl HttpResolver {
    pub fn new(config: HttpResolverConfig) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_millis(config.timeout_ms)))
            .http_status_as_error(false)
            .build()
            .into();
        Self {
            bucket: TokenBucket::new(config.requests_per_second, 1),
            config,
            agent,
        }
    }

    fn fetch(&self, url_template: &str, query: &str) -> Result<Vec<PaperStub>> {
        let url = url_template.replace("{query}", &percent_encode(query));
        let mut last_error = String::new();
        for attempt in 0..self.config.max_attempts {
            if attempt > 0 {
                std::thread::sleep(Duration::from_millis(100 << attempt));
            }
            self.bucket.acquire();
            match self.agent.get(&url).call() {
                Ok(mut response) => {
                    let status = response.status().as_u16();
                    if (200..300).contains(&status) {
                        let body = response.body_mut().read_to_string().map_err(|e| {
                            PipelineError::Transport(format!("body read failed: {e}"))
                        })?;
                        let lines: Vec<CorpusLine> =
                            serde_json::from_str(&body).map_err(|e| {
                                PipelineError::Transport(format!("bad resolver payload: {e}"))
                            })?;
                        return Ok(lines
                            .into_iter()
                            .map(|raw| PaperStub {
                                arxiv_id: raw.id,
                                title: raw.title,
                                year: raw.year,
                                raw_reference_strings: raw.refs,
                            })
                            .collect());
                    }
                    if !(status == 429 || (500..600).contains(&status)) {
                        return Err(PipelineError::Transport(format!(
                            "resolver returned status {status}"
                        )));
                    }
                    last_error = format!("status {status}");
                }
                Err(e) => last_error = e.to_string(),
            }
        }
        Err(PipelineError::Transport(format!(
            "retries exhausted: {last_error}"
        )))
    }
}

impl Resolver for HttpResolver {
    fn lookup_by_id(&self, id: &str) -> Result<Option<PaperStub>> {
        let mut results = self.fetch(&self.config.lookup_url, id)?;
        Ok(if results.is_empty() {
            None
        } else {
            Some(results.swap_remove(0))
        })
    }

    fn search_by_title(&self, title: &str) -> Result<Vec<PaperStub>> {
        self.fetch(&self.config.search_url, title)
    }
}

fn percent_encode(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for byte in s.bytes() {
        match byte {
            b'A'..=b'Z' | b'a'..=b'z' | b'0'..=b'9' | b'-' | b'_' | b'.' | b'~' => {
                out.push(byte as char)
            }
            _ => out.push_str(&format!("%{byte:02X}")),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stub(id: Option<&str>, title: &str) -> PaperStub {
        PaperStub {
            arxiv_id: id.map(|s| s.to_string()),
            title: title.to_string(),
            year: 2023,
            raw_reference_strings: vec![],
        }
    }

    #[test]
    fn scripted_lookup_and_search() {
        let resolver = ScriptedResolver::from_stubs(vec![
            stub(Some("2301.00001"), "Deep Graph Learning"),
            stub(None, "Shallow Tree Methods"),
        ]);
        assert!(resolver.lookup_by_id("2301.00001").unwrap().is_some());
        assert!(resolver.lookup_by_id("9999.99999").unwrap().is_none());
        let hits = resolver.search_by_title("deep graph learning").unwrap();
        assert_eq!(hits[0].title, "Deep Graph Learning");
    }

    #[test]
    fn token_bucket_enforces_rate() {
        let bucket = TokenBucket::new(50.0, 1);
        let start = Instant::now();
        for _ in 0..4 {
            bucket.acquire();
        }
        // 3 refills at 50/s after the initial burst token
        assert!(start.elapsed() >= Duration::from_millis(50));
    }

    #[test]
    fn percent_encoding() {
        assert_eq!(percent_encode("a b/c"), "a%20b%2Fc");
    }
}
