use std::sync::Mutex;

use super::provider::{ChatMessage, ChatProvider, ChatRole, ProviderConfig, ProviderError, Reply};

/// Replies with the last user message.
#[derive(Debug, Default)]
pub struct EchoProvider;

impl ChatProvider for EchoProvider {
    fn send(&self, _config: &ProviderConfig, messages: &[ChatMessage]) -> Result<Reply, ProviderError> {
        let text = messages
            .iter()
            .rev()
            .find(|m| m.role == ChatRole::User)
            .map(|m| m.content.clone())
            .unwrap_or_default();
        Ok(Reply { text, request_id: None })
    }
}

/// Replies with the configured model name, e.g. `--model Facts` for a constant annotator.
#[derive(Debug, Default)]
pub struct ModelNameProvider;

impl ChatProvider for ModelNameProvider {
    fn send(&self, config: &ProviderConfig, _messages: &[ChatMessage]) -> Result<Reply, ProviderError> {
        Ok(Reply {
            text: config.model.clone(),
            request_id: None,
        })
    }
}

/// Plays back a fixed sequence of results; the last entry repeats once the script is exhausted.
#[derive(Debug)]
pub struct ScriptedProvider {
    script: Vec<Result<String, ProviderError>>,
    next: Mutex<usize>,
    seen: Mutex<Vec<Vec<ChatMessage>>>,
}

impl ScriptedProvider {
    pub fn new(script: Vec<Result<String, ProviderError>>) -> Self {
        assert!(!script.is_empty(), "script needs at least one entry");
        ScriptedProvider {
            script,
            next: Mutex::new(0),
            seen: Mutex::new(Vec::new()),
        }
    }

    pub fn replies<S: Into<String>>(replies: impl IntoIterator<Item = S>) -> Self {
        ScriptedProvider::new(replies.into_iter().map(|s| Ok(s.into())).collect())
    }

    pub fn calls(&self) -> usize {
        *self.next.lock().expect("not poisoned")
    }

    /// Message lists received so far.
    pub fn requests(&self) -> Vec<Vec<ChatMessage>> {
        self.seen.lock().expect("not poisoned").clone()
    }
}

impl ChatProvider for ScriptedProvider {
    fn send(&self, _config: &ProviderConfig, messages: &[ChatMessage]) -> Result<Reply, ProviderError> {
        self.seen.lock().expect("not poisoned").push(messages.to_vec());
        let mut next = self.next.lock().expect("not poisoned");
        let i = (*next).min(self.script.len() - 1);
        *next += 1;
        self.script[i].clone().map(|text| Reply {
            text,
            request_id: Some(format!("mock-{}", *next)),
        })
    }
}

/// Wraps a closure; handy for content-dependent fixtures.
pub struct FnProvider<F>(pub F);

impl<F> ChatProvider for FnProvider<F>
where
    F: Fn(&[ChatMessage]) -> Result<String, ProviderError> + Send + Sync,
{
    fn send(&self, _config: &ProviderConfig, messages: &[ChatMessage]) -> Result<Reply, ProviderError> {
        (self.0)(messages).map(|text| Reply { text, request_id: None })
    }
}
