use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChatRole {
    System,
    User,
    Assistant,
}

impl ChatRole {
    pub fn as_str(self) -> &'static str {
        match self {
            ChatRole::System => "system",
            ChatRole::User => "user",
            ChatRole::Assistant => "assistant",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: ChatRole,
    pub content: String,
}

impl ChatMessage {
    pub fn system(content: impl Into<String>) -> Self {
        ChatMessage {
            role: ChatRole::System,
            content: content.into(),
        }
    }

    pub fn user(content: impl Into<String>) -> Self {
        ChatMessage {
            role: ChatRole::User,
            content: content.into(),
        }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        ChatMessage {
            role: ChatRole::Assistant,
            content: content.into(),
        }
    }
}

fn default_temperature() -> f64 {
    1.0
}

fn default_retries() -> u32 {
    3
}

fn default_timeout() -> u64 {
    60
}

fn default_backoff() -> u64 {
    500
}

/// Connection and sampling settings for one chat-completion model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProviderConfig {
    /// Provider id: `openai`, `anthropic`, `mock`, `echo`, or any id registered in a [`ProviderRegistry`].
    pub provider: String,
    pub model: String,
    /// Overrides the provider's default endpoint.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endpoint: Option<String>,
    /// Environment variable holding the API key; defaults to `DISPUTEBENCH_<PROVIDER>_KEY`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub credential_env: Option<String>,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top_p: Option<f64>,
    #[serde(default = "default_retries")]
    pub max_retries: u32,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
    /// First retry delay; doubles on each further attempt.
    #[serde(default = "default_backoff")]
    pub backoff_ms: u64,
}

impl ProviderConfig {
    pub fn new(provider: impl Into<String>, model: impl Into<String>) -> Self {
        ProviderConfig {
            provider: provider.into(),
            model: model.into(),
            endpoint: None,
            credential_env: None,
            temperature: default_temperature(),
            top_p: None,
            max_retries: default_retries(),
            timeout_secs: default_timeout(),
            backoff_ms: default_backoff(),
        }
    }

    pub fn validate(&self) -> Result<(), ProviderError> {
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(ProviderError::Config(format!(
                "temperature {} must be >= 0",
                self.temperature
            )));
        }
        if let Some(p) = self.top_p {
            if !(0.0..=1.0).contains(&p) {
                return Err(ProviderError::Config(format!("top_p {p} outside [0, 1]")));
            }
        }
        if self.provider.trim().is_empty() {
            return Err(ProviderError::Config("empty provider id".into()));
        }
        Ok(())
    }

    pub fn credential_var(&self) -> String {
        self.credential_env.clone().unwrap_or_else(|| {
            let id: String = self
                .provider
                .chars()
                .map(|c| {
                    if c.is_ascii_alphanumeric() {
                        c.to_ascii_uppercase()
                    } else {
                        '_'
                    }
                })
                .collect();
            format!("DISPUTEBENCH_{id}_KEY")
        })
    }

    /// Reads the API key from the environment.
    pub fn credential(&self) -> Result<String, ProviderError> {
        let var = self.credential_var();
        match std::env::var(&var) {
            Ok(key) if !key.trim().is_empty() => Ok(key),
            _ => Err(ProviderError::Auth(format!("environment variable {var} is not set"))),
        }
    }

    /// Retry delay before attempt `attempt + 1` (1-based `attempt`), capped at 30 s.
    pub fn backoff(&self, attempt: u32) -> Duration {
        let factor = 1u64 << (attempt.saturating_sub(1)).min(16);
        Duration::from_millis(self.backoff_ms.saturating_mul(factor).min(30_000))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProviderError {
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("rate limited")]
    RateLimited { retry_after: Option<Duration> },
    #[error("server error {status}: {message}")]
    Server { status: u16, message: String },
    #[error("request rejected with status {status}: {message}")]
    Client { status: u16, message: String },
    #[error("request timed out")]
    Timeout,
    #[error("malformed provider response: {0}")]
    Malformed(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("invalid provider configuration: {0}")]
    Config(String),
}

impl ProviderError {
    /// Rate limits, 5xx responses, timeouts and transport failures are retried.
    pub fn retryable(&self) -> bool {
        matches!(
            self,
            ProviderError::RateLimited { .. }
                | ProviderError::Server { .. }
                | ProviderError::Timeout
                | ProviderError::Transport(_)
        )
    }
}

/// A single reply from a provider.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reply {
    pub text: String,
    pub request_id: Option<String>,
}

/// One chat-completion backend. `send` makes exactly one attempt; retries live in [`complete`].
/// Implementations are shared across concurrently running dialogues.
pub trait ChatProvider: Send + Sync {
    fn send(&self, config: &ProviderConfig, messages: &[ChatMessage]) -> Result<Reply, ProviderError>;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttemptRecord {
    pub attempt: u32,
    pub request_id: Option<String>,
    pub error: Option<ProviderError>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion {
    pub text: String,
    pub request_id: Option<String>,
    pub attempts: Vec<AttemptRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{error} (after {} attempt(s))", attempts.len())]
pub struct CompletionError {
    pub error: ProviderError,
    pub attempts: Vec<AttemptRecord>,
}

/// Sends `messages`, retrying transient failures up to `config.max_retries` times with exponential backoff.
pub fn complete(
    provider: &dyn ChatProvider,
    config: &ProviderConfig,
    messages: &[ChatMessage],
) -> Result<Completion, CompletionError> {
    complete_with_sleep(provider, config, messages, &std::thread::sleep)
}

/// [`complete`] with an injectable sleep (tests pass a no-op).
pub fn complete_with_sleep(
    provider: &dyn ChatProvider,
    config: &ProviderConfig,
    messages: &[ChatMessage],
    sleep: &dyn Fn(Duration),
) -> Result<Completion, CompletionError> {
    let mut attempts = Vec::new();
    if let Err(error) = config.validate() {
        return Err(CompletionError { error, attempts });
    }
    let mut attempt = 0;
    loop {
        attempt += 1;
        match provider.send(config, messages) {
            Ok(reply) => {
                log::debug!(
                    "{}/{} attempt {attempt}: ok, request id {}",
                    config.provider,
                    config.model,
                    reply.request_id.as_deref().unwrap_or("-")
                );
                attempts.push(AttemptRecord {
                    attempt,
                    request_id: reply.request_id.clone(),
                    error: None,
                });
                return Ok(Completion {
                    text: reply.text,
                    request_id: reply.request_id,
                    attempts,
                });
            }
            Err(error) => {
                log::warn!("{}/{} attempt {attempt}: {error}", config.provider, config.model);
                attempts.push(AttemptRecord {
                    attempt,
                    request_id: None,
                    error: Some(error.clone()),
                });
                if !error.retryable() || attempt > config.max_retries {
                    return Err(CompletionError { error, attempts });
                }
                let mut delay = config.backoff(attempt);
                if let ProviderError::RateLimited {
                    retry_after: Some(after),
                } = error
                {
                    delay = delay.max(after);
                }
                sleep(delay);
            }
        }
    }
}

/// Provider implementations by id.
#[derive(Clone, Default)]
pub struct ProviderRegistry {
    providers: BTreeMap<String, Arc<dyn ChatProvider>>,
}

impl ProviderRegistry {
    pub fn new() -> Self {
        ProviderRegistry::default()
    }

    /// `openai` (and `openai-compatible`), `anthropic`, `mock` and `echo`.
    pub fn with_defaults() -> Self {
        let mut r = ProviderRegistry::new();
        let openai: Arc<dyn ChatProvider> = Arc::new(super::http::OpenAiCompatible::new());
        r.register("openai", openai.clone());
        r.register("openai-compatible", openai);
        r.register("anthropic", Arc::new(super::http::Anthropic::new()));
        r.register("mock", Arc::new(super::mock::ModelNameProvider));
        r.register("echo", Arc::new(super::mock::EchoProvider));
        r
    }

    pub fn register(&mut self, id: impl Into<String>, provider: Arc<dyn ChatProvider>) {
        self.providers.insert(id.into(), provider);
    }

    pub fn get(&self, id: &str) -> Result<Arc<dyn ChatProvider>, ProviderError> {
        self.providers
            .get(id)
            .cloned()
            .ok_or_else(|| ProviderError::Config(format!("unknown provider {id:?}")))
    }

    /// True when the provider needs an API key (remote HTTP providers).
    pub fn needs_credential(id: &str) -> bool {
        matches!(id, "openai" | "openai-compatible" | "anthropic")
    }
}

impl std::fmt::Debug for ProviderRegistry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.providers.keys()).finish()
    }
}
