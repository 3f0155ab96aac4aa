//! Chat-completion client, response parsing, and offline mock.
//!
//! The client speaks the common chat-completion JSON shape over blocking
//! HTTP. Transient failures (connect errors, timeouts, HTTP 5xx and 429)
//! retry with exponential backoff and jitter; other HTTP errors fail fast.
//! Reply parsing is total: it strips any <think> reasoning block, then scans
//! for the last case-insensitive whole-word occurrence of an allowed option.
//! A reply matching no option is a recorded parse failure, not an error.

use rand::Rng;
use regex::Regex;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::time::Duration;

use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::prompt::PromptBundle;
use crate::shortlist::{rank_all, CentroidModel};

/// Where and how to reach the model endpoint.
///
/// The API key is kept out of both `Debug` output and serialization so it
/// cannot leak through logs or reports.
#[derive(Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct EndpointConfig {
    /// Full URL of the chat-completions route.
    pub url: String,
    pub model: String,
    #[serde(skip_serializing, default)]
    pub api_key: Option<String>,
    pub temperature: f64,
    pub max_tokens: u32,
    pub timeout_ms: u64,
    pub max_attempts: u32,
    /// First backoff delay; doubles per retry. Set to 0 in tests.
    pub backoff_base_ms: u64,
    /// Worker bound when a live endpoint serves a whole evaluation.
    pub max_in_flight: usize,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        EndpointConfig {
            url: "http://localhost:8000/v1/chat/completions".to_string(),
            model: "local".to_string(),
            api_key: None,
            temperature: 0.0,
            max_tokens: 1024,
            timeout_ms: 30_000,
            max_attempts: 3,
            backoff_base_ms: 1000,
            max_in_flight: 4,
        }
    }
}

impl fmt::Debug for EndpointConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EndpointConfig")
            .field("url", &self.url)
            .field("model", &self.model)
            .field(
                "api_key",
                &self.api_key.as_ref().map(|_| "<redacted>"),
            )
            .field("temperature", &self.temperature)
            .field("max_tokens", &self.max_tokens)
            .field("timeout_ms", &self.timeout_ms)
            .field("max_attempts", &self.max_attempts)
            .field("backoff_base_ms", &self.backoff_base_ms)
            .field("max_in_flight", &self.max_in_flight)
            .finish()
    }
}

/// Outcome of one classification call, network or mock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub query_id: String,
    /// The matched option string, or None on parse failure.
    pub predicted: Option<String>,
    pub raw_response: String,
    pub attempt_count: u32,
    pub prompt_tokens_estimated: usize,
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: [ChatMessage<'a>; 1],
    temperature: f64,
    max_tokens: u32,
}

#[derive(Serialize)]
struct ChatMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatResponseMessage,
}

#[derive(Deserialize)]
struct ChatResponseMessage {
    content: String,
}

/// Remove <think>...</think> blocks, including an unclosed trailing block.
fn strip_think(raw: &str) -> String {
    let closed = Regex::new(r"(?is)<think>.*?</think>").unwrap();
    let stripped = closed.replace_all(raw, " ");
    match stripped.to_lowercase().find("<think>") {
        Some(at) => stripped[..at].to_string(),
        None => stripped.into_owned(),
    }
}

/// Find the allowed option the reply settles on: the match ending last wins,
/// so a correction like "not OOK, GMSK" resolves to GMSK.
pub fn parse_response(raw: &str, options: &[String]) -> Option<String> {
    let text = strip_think(raw);
    let mut best: Option<(usize, usize, &String)> = None;
    for option in options {
        let pattern = format!(r"(?i)\b{}\b", regex::escape(option));
        let re = Regex::new(&pattern).ok()?;
        for m in re.find_iter(&text) {
            let candidate = (m.end(), m.end() - m.start(), option);
            if best.as_ref().is_none_or(|b| (candidate.0, candidate.1) > (b.0, b.1)) {
                best = Some(candidate);
            }
        }
    }
    best.map(|(_, _, option)| option.clone())
}

fn retryable_status(status: u16) -> bool {
    status == 429 || (500..=599).contains(&status)
}

/// Send the prompt to the configured endpoint and parse the reply.
///
/// Retries only transient failures, up to `max_attempts`, sleeping
/// `backoff_base_ms * 2^(attempt-1)` plus jitter between tries. Exhausted
/// retries and non-retryable HTTP errors surface as transport errors with
/// the attempt count.
pub fn classify(config: &EndpointConfig, bundle: &PromptBundle) -> Result<ClassificationResult> {
    if config.max_attempts == 0 {
        return Err(Error::invalid("max_attempts must be at least 1"));
    }
    let client = reqwest::blocking::Client::builder()
        .timeout(Duration::from_millis(config.timeout_ms))
        .build()
        .map_err(|e| Error::Transport {
            attempts: 0,
            reason: format!("client construction failed: {e}"),
        })?;
    let request = ChatRequest {
        model: &config.model,
        messages: [ChatMessage {
            role: "user",
            content: &bundle.text,
        }],
        temperature: config.temperature,
        max_tokens: config.max_tokens,
    };

    let mut last_reason = String::new();
    for attempt in 1..=config.max_attempts {
        let mut req = client.post(&config.url).json(&request);
        if let Some(key) = &config.api_key {
            req = req.bearer_auth(key);
        }
        match req.send() {
            Ok(response) => {
                let status = response.status().as_u16();
                if retryable_status(status) {
                    last_reason = format!("HTTP {status}");
                } else if !response.status().is_success() {
                    return Err(Error::Transport {
                        attempts: attempt,
                        reason: format!("HTTP {status}"),
                    });
                } else {
                    let body: ChatResponse =
                        response.json().map_err(|e| Error::Transport {
                            attempts: attempt,
                            reason: format!("malformed response body: {e}"),
                        })?;
                    let raw = body
                        .choices
                        .first()
                        .map(|c| c.message.content.clone())
                        .ok_or_else(|| Error::Transport {
                            attempts: attempt,
                            reason: "response had no choices".to_string(),
                        })?;
                    let predicted = parse_response(&raw, &bundle.options);
                    return Ok(ClassificationResult {
                        query_id: bundle.query_id.clone(),
                        predicted,
                        raw_response: raw,
                        attempt_count: attempt,
                        prompt_tokens_estimated: bundle.estimated_tokens,
                    });
                }
            }
            Err(e) if e.is_timeout() || e.is_connect() || e.is_request() => {
                last_reason = e.to_string();
            }
            Err(e) => {
                return Err(Error::Transport {
                    attempts: attempt,
                    reason: e.to_string(),
                });
            }
        }
        if attempt < config.max_attempts {
            let base = config.backoff_base_ms.saturating_mul(1 << (attempt - 1));
            let jitter = if config.backoff_base_ms == 0 {
                0
            } else {
                rand::thread_rng().gen_range(0..=config.backoff_base_ms / 4 + 1)
            };
            std::thread::sleep(Duration::from_millis(base + jitter));
        }
    }
    Err(Error::Transport {
        attempts: config.max_attempts,
        reason: last_reason,
    })
}

/// Deterministic offline stand-ins for the endpoint.
#[derive(Debug, Clone)]
pub enum MockPolicy {
    /// Always answer with the first listed option.
    FirstOption,
    /// Always answer with this text, whether or not it is an option.
    Fixed(String),
    /// Answer with the nearest-centroid label among the listed options.
    Centroid(CentroidModel),
}

/// Produce a classification without any network traffic. The synthesized
/// reply includes a <think> block and runs through the real parser, so the
/// mock exercises the same code path as a live call.
pub fn mock_classify(
    bundle: &PromptBundle,
    policy: &MockPolicy,
    query_features: Option<&FeatureVector>,
) -> ClassificationResult {
    let answer: String = match policy {
        MockPolicy::FirstOption => bundle.options[0].clone(),
        MockPolicy::Fixed(text) => text.clone(),
        MockPolicy::Centroid(model) => match query_features {
            Some(fv) => rank_all(model, fv)
                .into_iter()
                .map(|(label, _)| label.as_str().to_string())
                .find(|name| bundle.options.contains(name))
                .unwrap_or_else(|| bundle.options[0].clone()),
            None => bundle.options[0].clone(),
        },
    };
    let raw = format!("<think>comparing token patterns against the worked examples</think>\n{answer}");
    let predicted = parse_response(&raw, &bundle.options);
    ClassificationResult {
        query_id: bundle.query_id.clone(),
        predicted,
        raw_response: raw,
        attempt_count: 1,
        prompt_tokens_estimated: bundle.estimated_tokens,
    }
}
