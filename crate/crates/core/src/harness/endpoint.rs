use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use super::transcript::TranscriptRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn user(content: impl Into<String>) -> Self {
        ChatMessage {
            role: Role::User,
            content: content.into(),
        }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        ChatMessage {
            role: Role::Assistant,
            content: content.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum EndpointError {
    #[error("request failed: {0}")]
    Transport(String),
    #[error("endpoint returned HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("malformed completion response: {0}")]
    Malformed(String),
    #[error("invalid endpoint configuration: {0}")]
    Config(String),
    #[error("prompt {index} does not match the stored transcript")]
    TranscriptMismatch { index: usize },
    #[error("transcript exhausted after {0} exchanges")]
    EndOfTranscript(usize),
}

/// A chat-completion service. The full conversation is passed on every call.
pub trait ChatEndpoint {
    fn complete(&mut self, messages: &[ChatMessage]) -> Result<String, EndpointError>;

    /// Failed attempts so far, including ones later recovered by a retry.
    fn failed_attempts(&self) -> usize {
        0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointConfig {
    pub base_url: String,
    #[serde(default = "default_chat_path")]
    pub chat_path: String,
    pub model: String,
    #[serde(default)]
    pub temperature: f64,
    #[serde(default = "default_timeout")]
    pub timeout: Duration,
    #[serde(default = "default_retries")]
    pub retries: u32,
    /// Base delay of the exponential backoff between retries.
    #[serde(default = "default_backoff")]
    pub backoff: Duration,
    /// Minimum spacing between consecutive requests.
    #[serde(default = "default_min_interval")]
    pub min_interval: Duration,
    /// Name of the environment variable holding the bearer token.
    #[serde(default)]
    pub api_key_env: Option<String>,
    #[serde(default)]
    pub system_prompt: Option<String>,
}

fn default_chat_path() -> String {
    "/chat/completions".into()
}
fn default_timeout() -> Duration {
    Duration::from_secs(120)
}
fn default_retries() -> u32 {
    3
}
fn default_backoff() -> Duration {
    Duration::from_millis(500)
}
fn default_min_interval() -> Duration {
    Duration::from_secs(1)
}

impl EndpointConfig {
    pub fn new(base_url: impl Into<String>, model: impl Into<String>) -> Self {
        EndpointConfig {
            base_url: base_url.into(),
            chat_path: default_chat_path(),
            model: model.into(),
            temperature: 0.0,
            timeout: default_timeout(),
            retries: default_retries(),
            backoff: default_backoff(),
            min_interval: default_min_interval(),
            api_key_env: Some("OPENAI_API_KEY".into()),
            system_prompt: None,
        }
    }

    pub fn url(&self) -> String {
        format!(
            "{}/{}",
            self.base_url.trim_end_matches('/'),
            self.chat_path.trim_start_matches('/')
        )
    }

    pub fn validate(&self) -> Result<(), EndpointError> {
        if !self.temperature.is_finite() || self.temperature < 0.0 {
            return Err(EndpointError::Config(format!(
                "temperature must be >= 0, got {}",
                self.temperature
            )));
        }
        if self.model.is_empty() {
            return Err(EndpointError::Config("model name is empty".into()));
        }
        Ok(())
    }

    /// Request body for one completion call.
    pub fn request_body(&self, messages: &[ChatMessage]) -> Value {
        let mut all = Vec::with_capacity(messages.len() + 1);
        if let Some(system) = &self.system_prompt {
            all.push(ChatMessage {
                role: Role::System,
                content: system.clone(),
            });
        }
        all.extend_from_slice(messages);
        json!({
            "model": self.model,
            "temperature": self.temperature,
            "messages": all,
        })
    }
}

/// Content of the first choice of a chat-completion response body.
pub fn extract_content(body: &Value) -> Result<String, EndpointError> {
    body.pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| EndpointError::Malformed("missing choices[0].message.content".into()))
}

/// Blocking HTTP client for an OpenAI-style chat-completions endpoint.
pub struct HttpEndpoint {
    config: EndpointConfig,
    client: reqwest::blocking::Client,
    api_key: Option<String>,
    last_request: Option<Instant>,
    failures: usize,
}

impl HttpEndpoint {
    pub fn new(config: EndpointConfig) -> Result<Self, EndpointError> {
        config.validate()?;
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| EndpointError::Config(e.to_string()))?;
        let api_key = config
            .api_key_env
            .as_deref()
            .and_then(|name| std::env::var(name).ok())
            .filter(|k| !k.is_empty());
        Ok(HttpEndpoint {
            config,
            client,
            api_key,
            last_request: None,
            failures: 0,
        })
    }

    pub fn config(&self) -> &EndpointConfig {
        &self.config
    }

    fn pace(&mut self) {
        if let Some(last) = self.last_request {
            let elapsed = last.elapsed();
            if elapsed < self.config.min_interval {
                thread::sleep(self.config.min_interval - elapsed);
            }
        }
        self.last_request = Some(Instant::now());
    }

    fn send_once(&mut self, body: &Value) -> Result<String, EndpointError> {
        self.pace();
        let mut req = self.client.post(self.config.url()).json(body);
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(|e| EndpointError::Transport(e.to_string()))?;
        let status = resp.status();
        let text = resp.text().map_err(|e| EndpointError::Transport(e.to_string()))?;
        if !status.is_success() {
            return Err(EndpointError::Status {
                status: status.as_u16(),
                body: text,
            });
        }
        let json: Value = serde_json::from_str(&text).map_err(|e| EndpointError::Malformed(e.to_string()))?;
        extract_content(&json)
    }
}

impl ChatEndpoint for HttpEndpoint {
    fn complete(&mut self, messages: &[ChatMessage]) -> Result<String, EndpointError> {
        let body = self.config.request_body(messages);
        let mut attempt = 0u32;
        loop {
            match self.send_once(&body) {
                Ok(content) => return Ok(content),
                Err(e) => {
                    self.failures += 1;
                    let retryable = !matches!(e, EndpointError::Status { status, .. } if (400..500).contains(&status) && status != 429);
                    if attempt >= self.config.retries || !retryable {
                        return Err(e);
                    }
                    thread::sleep(self.config.backoff * 2u32.saturating_pow(attempt));
                    attempt += 1;
                }
            }
        }
    }

    fn failed_attempts(&self) -> usize {
        self.failures
    }
}

/// Serves the responses of a stored run in order, checking each prompt
/// against the one recorded at the same position.
#[derive(Debug, Clone)]
pub struct ReplayEndpoint {
    records: Vec<TranscriptRecord>,
    next: usize,
}

impl ReplayEndpoint {
    pub fn new(records: Vec<TranscriptRecord>) -> Self {
        ReplayEndpoint { records, next: 0 }
    }

    pub fn position(&self) -> usize {
        self.next
    }
}

impl ChatEndpoint for ReplayEndpoint {
    fn complete(&mut self, messages: &[ChatMessage]) -> Result<String, EndpointError> {
        let index = self.next;
        let record = self.records.get(index).ok_or(EndpointError::EndOfTranscript(index))?;
        let prompt = messages
            .iter()
            .rev()
            .find(|m| m.role == Role::User)
            .map(|m| m.content.as_str())
            .unwrap_or_default();
        if prompt != record.prompt {
            return Err(EndpointError::TranscriptMismatch { index });
        }
        self.next += 1;
        Ok(record.response.clone())
    }
}
