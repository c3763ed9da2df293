use std::time::Duration;

use serde_json::{json, Value};

use super::provider::{ChatMessage, ChatProvider, ChatRole, ProviderConfig, ProviderError, Reply};

const OPENAI_ENDPOINT: &str = "https://api.openai.com/v1/chat/completions";
const ANTHROPIC_ENDPOINT: &str = "https://api.anthropic.com/v1/messages";
const ANTHROPIC_VERSION: &str = "2023-06-01";
const ANTHROPIC_MAX_TOKENS: u32 = 1024;

fn agent(config: &ProviderConfig) -> ureq::Agent {
    ureq::Agent::new_with_config(
        ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(config.timeout_secs.max(1))))
            .http_status_as_error(false)
            .build(),
    )
}

fn transport_error(e: ureq::Error) -> ProviderError {
    match e {
        ureq::Error::Timeout(_) => ProviderError::Timeout,
        other => ProviderError::Transport(other.to_string()),
    }
}

fn header(resp: &ureq::http::Response<ureq::Body>, name: &str) -> Option<String> {
    resp.headers()
        .get(name)
        .and_then(|v| v.to_str().ok())
        .map(str::to_string)
}

/// Maps an HTTP response to a reply body or a typed error.
fn check_status(
    mut resp: ureq::http::Response<ureq::Body>,
    id_header: &str,
) -> Result<(Value, Option<String>), ProviderError> {
    let status = resp.status().as_u16();
    let request_id = header(&resp, id_header);
    if status == 200 {
        let body: Value = resp
            .body_mut()
            .read_json()
            .map_err(|e| ProviderError::Malformed(e.to_string()))?;
        return Ok((body, request_id));
    }
    let retry_after = header(&resp, "retry-after")
        .and_then(|v| v.trim().parse::<f64>().ok())
        .map(Duration::from_secs_f64);
    let message = resp.body_mut().read_to_string().unwrap_or_default();
    let message: String = message.chars().take(500).collect();
    Err(match status {
        401 | 403 => ProviderError::Auth(message),
        429 => ProviderError::RateLimited { retry_after },
        408 => ProviderError::Timeout,
        500..=599 => ProviderError::Server { status, message },
        _ => ProviderError::Client { status, message },
    })
}

/// Chat Completions API (OpenAI and compatible servers).
#[derive(Debug, Default)]
pub struct OpenAiCompatible;

impl OpenAiCompatible {
    pub fn new() -> Self {
        OpenAiCompatible
    }

    pub fn payload(config: &ProviderConfig, messages: &[ChatMessage]) -> Value {
        let mut body = json!({
            "model": config.model,
            "temperature": config.temperature,
            "messages": messages
                .iter()
                .map(|m| json!({"role": m.role.as_str(), "content": m.content}))
                .collect::<Vec<_>>(),
        });
        if let Some(p) = config.top_p {
            body["top_p"] = json!(p);
        }
        body
    }

    pub fn parse_reply(body: &Value) -> Result<String, ProviderError> {
        body.pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| ProviderError::Malformed("missing choices[0].message.content".into()))
    }
}

impl ChatProvider for OpenAiCompatible {
    fn send(&self, config: &ProviderConfig, messages: &[ChatMessage]) -> Result<Reply, ProviderError> {
        let key = config.credential()?;
        let url = config.endpoint.as_deref().unwrap_or(OPENAI_ENDPOINT);
        let resp = agent(config)
            .post(url)
            .header("Authorization", &format!("Bearer {key}"))
            .send_json(Self::payload(config, messages))
            .map_err(transport_error)?;
        let (body, header_id) = check_status(resp, "x-request-id")?;
        let request_id = header_id.or_else(|| body.get("id").and_then(Value::as_str).map(str::to_string));
        Ok(Reply {
            text: Self::parse_reply(&body)?,
            request_id,
        })
    }
}

/// Anthropic Messages API; system messages go into the top-level `system` field.
#[derive(Debug, Default)]
pub struct Anthropic;

impl Anthropic {
    pub fn new() -> Self {
        Anthropic
    }

    pub fn payload(config: &ProviderConfig, messages: &[ChatMessage]) -> Value {
        let system: Vec<&str> = messages
            .iter()
            .filter(|m| m.role == ChatRole::System)
            .map(|m| m.content.as_str())
            .collect();
        let turns: Vec<Value> = messages
            .iter()
            .filter(|m| m.role != ChatRole::System)
            .map(|m| json!({"role": m.role.as_str(), "content": m.content}))
            .collect();
        let mut body = json!({
            "model": config.model,
            "max_tokens": ANTHROPIC_MAX_TOKENS,
            "temperature": config.temperature,
            "messages": turns,
        });
        if !system.is_empty() {
            body["system"] = json!(system.join("\n\n"));
        }
        if let Some(p) = config.top_p {
            body["top_p"] = json!(p);
        }
        body
    }

    pub fn parse_reply(body: &Value) -> Result<String, ProviderError> {
        let blocks = body
            .get("content")
            .and_then(Value::as_array)
            .ok_or_else(|| ProviderError::Malformed("missing content array".into()))?;
        let text: Vec<&str> = blocks
            .iter()
            .filter(|b| b.get("type").and_then(Value::as_str) == Some("text"))
            .filter_map(|b| b.get("text").and_then(Value::as_str))
            .collect();
        if text.is_empty() {
            return Err(ProviderError::Malformed("no text block in content".into()));
        }
        Ok(text.concat())
    }
}

impl ChatProvider for Anthropic {
    fn send(&self, config: &ProviderConfig, messages: &[ChatMessage]) -> Result<Reply, ProviderError> {
        let key = config.credential()?;
        let url = config.endpoint.as_deref().unwrap_or(ANTHROPIC_ENDPOINT);
        let resp = agent(config)
            .post(url)
            .header("x-api-key", &key)
            .header("anthropic-version", ANTHROPIC_VERSION)
            .send_json(Self::payload(config, messages))
            .map_err(transport_error)?;
        let (body, header_id) = check_status(resp, "request-id")?;
        let request_id = header_id.or_else(|| body.get("id").and_then(Value::as_str).map(str::to_string));
        Ok(Reply {
            text: Self::parse_reply(&body)?,
            request_id,
        })
    }
}
