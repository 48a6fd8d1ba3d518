use std::sync::{Condvar, Mutex};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::{BackendError, Origin, Predictor, PredictorRequest, RawResponse, Result};

/// Exponential backoff policy for transient failures (connect errors,
/// HTTP 429 and 5xx).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 3,
            base_delay_ms: 200,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct RemoteBackendConfig {
    /// Chat-completions URL, e.g. `https://host/v1/chat/completions`.
    pub endpoint: String,
    /// Name of the environment variable holding the bearer credential.
    pub credential_env: String,
    #[serde(default = "default_timeout_ms")]
    pub timeout_ms: u64,
    #[serde(default)]
    pub retry: RetryPolicy,
    /// Upper bound on concurrent in-flight requests.
    #[serde(default = "default_in_flight")]
    pub max_in_flight: usize,
}

fn default_timeout_ms() -> u64 {
    60_000
}

fn default_in_flight() -> usize {
    4
}

struct Gate {
    available: Mutex<usize>,
    signal: Condvar,
}

impl Gate {
    fn new(slots: usize) -> Self {
        Self {
            available: Mutex::new(slots.max(1)),
            signal: Condvar::new(),
        }
    }

    fn enter(&self) -> GateGuard<'_> {
        let mut available = self.available.lock().expect("gate lock");
        while *available == 0 {
            available = self.signal.wait(available).expect("gate wait");
        }
        *available -= 1;
        GateGuard { gate: self }
    }
}

struct GateGuard<'a> {
    gate: &'a Gate,
}

impl Drop for GateGuard<'_> {
    fn drop(&mut self) {
        *self.gate.available.lock().expect("gate lock") += 1;
        self.gate.signal.notify_one();
    }
}

/// Chat-completions client. Each user stage is one HTTP request; multi-stage
/// requests thread prior assistant replies back as conversation history and
/// return the final assistant text.
pub struct RemoteBackend {
    config: RemoteBackendConfig,
    credential: String,
    agent: ureq::Agent,
    gate: Gate,
}

impl RemoteBackend {
    pub fn new(config: RemoteBackendConfig) -> Result<Self> {
        let credential = std::env::var(&config.credential_env).map_err(|_| {
            BackendError::Config(format!(
                "credential environment variable {} is not set",
                config.credential_env
            ))
        })?;
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_millis(config.timeout_ms)))
            .http_status_as_error(false)
            .build()
            .into();
        Ok(Self {
            gate: Gate::new(config.max_in_flight),
            config,
            credential,
            agent,
        })
    }

    fn post_once(&self, body: &serde_json::Value) -> std::result::Result<String, TransientOrFatal> {
        let response = self
            .agent
            .post(&self.config.endpoint)
            .header("Authorization", &format!("Bearer {}", self.credential))
            .send_json(body);
        let mut response = match response {
            Ok(r) => r,
            Err(e) => return Err(TransientOrFatal::Transient(e.to_string())),
        };
        let status = response.status().as_u16();
        let text = response
            .body_mut()
            .read_to_string()
            .map_err(|e| TransientOrFatal::Transient(format!("body read failed: {e}")))?;
        if status == 429 || (500..600).contains(&status) {
            return Err(TransientOrFatal::Transient(format!("status {status}")));
        }
        if !(200..300).contains(&status) {
            return Err(TransientOrFatal::Fatal(BackendError::Endpoint {
                status,
                body: text,
            }));
        }
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| TransientOrFatal::Fatal(BackendError::Payload(e.to_string())))?;
        value["choices"][0]["message"]["content"]
            .as_str()
            .map(|s| s.to_string())
            .ok_or_else(|| {
                TransientOrFatal::Fatal(BackendError::Payload(
                    "missing choices[0].message.content".into(),
                ))
            })
    }

    fn post_with_retries(&self, body: &serde_json::Value) -> Result<String> {
        let policy = self.config.retry;
        let mut last = String::new();
        for attempt in 0..policy.max_attempts.max(1) {
            if attempt > 0 {
                std::thread::sleep(Duration::from_millis(
                    policy.base_delay_ms << (attempt - 1),
                ));
            }
            match self.post_once(body) {
                Ok(text) => return Ok(text),
                Err(TransientOrFatal::Fatal(e)) => return Err(e),
                Err(TransientOrFatal::Transient(message)) => last = message,
            }
        }
        Err(BackendError::Transport {
            attempts: policy.max_attempts.max(1),
            message: last,
        })
    }
}

enum TransientOrFatal {
    Transient(String),
    Fatal(BackendError),
}

impl Predictor for RemoteBackend {
    fn complete(&self, request: &PredictorRequest) -> Result<RawResponse> {
        let _slot = self.gate.enter();
        let started = Instant::now();
        let mut messages = vec![json!({"role": "system", "content": request.system_text})];
        let mut final_text = String::new();
        for user in &request.user_texts {
            messages.push(json!({"role": "user", "content": user}));
            let body = json!({
                "model": request.model_tag,
                "messages": messages,
                "temperature": request.decoding.temperature,
                "max_tokens": request.decoding.max_output_tokens,
            });
            final_text = self.post_with_retries(&body)?;
            messages.push(json!({"role": "assistant", "content": final_text}));
        }
        Ok(RawResponse {
            text: final_text,
            origin: Origin::Live,
            latency_ms: Some(started.elapsed().as_millis() as u64),
        })
    }
}
