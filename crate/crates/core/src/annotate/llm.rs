//! Model-backed IRP labeling through the chat gateway.

use super::AnnotateError;
use crate::corpus::{Dialogue, IrpStrategy};
use crate::gateway::{complete, ChatMessage, ChatProvider, ProviderConfig};

pub const DEFINITIONS: &str = include_str!("../../data/irp_definitions.txt");
pub const DEFAULT_TEMPLATE: &str = include_str!("../../data/annotation_prompt.txt");

const PLACEHOLDERS: [&str; 4] = ["{definitions}", "{conversation}", "{segment}", "{speaker}"];

/// Annotation prompt with `{definitions}`, `{conversation}`, `{segment}` and `{speaker}` placeholders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationPrompt {
    template: String,
    definitions: String,
}

impl Default for AnnotationPrompt {
    fn default() -> Self {
        AnnotationPrompt {
            template: DEFAULT_TEMPLATE.to_string(),
            definitions: DEFINITIONS.trim_end().to_string(),
        }
    }
}

impl AnnotationPrompt {
    /// A custom template; `{segment}` is required, the other placeholders are optional.
    pub fn new(template: impl Into<String>, definitions: impl Into<String>) -> Result<Self, AnnotateError> {
        let template = template.into();
        if !template.contains("{segment}") {
            return Err(AnnotateError::Template("template has no {segment} placeholder".into()));
        }
        Ok(AnnotationPrompt {
            template,
            definitions: definitions.into(),
        })
    }

    pub fn render(&self, conversation: &str, segment: &str, speaker: &str) -> String {
        // single pass, so placeholder-like text inside the values is left alone
        let mut out = String::with_capacity(self.template.len() + conversation.len());
        let mut rest = self.template.as_str();
        while let Some(pos) = rest.find('{') {
            out.push_str(&rest[..pos]);
            let tail = &rest[pos..];
            match PLACEHOLDERS.iter().find(|p| tail.starts_with(**p)) {
                Some(p) => {
                    out.push_str(match *p {
                        "{definitions}" => &self.definitions,
                        "{conversation}" => conversation,
                        "{segment}" => segment,
                        _ => speaker,
                    });
                    rest = &tail[p.len()..];
                }
                None => {
                    out.push('{');
                    rest = &tail[1..];
                }
            }
        }
        out.push_str(rest);
        out
    }
}

fn squash(s: &str) -> String {
    s.chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect()
}

/// Reads a strategy label from a model reply: the first non-empty line, ignoring case, spacing,
/// punctuation and a leading "Label:"/"Strategy:". Anything else yields `None`.
pub fn parse_label(reply: &str) -> Option<IrpStrategy> {
    let line = reply.lines().map(str::trim).find(|l| !l.is_empty())?;
    let mut key = squash(line);
    for prefix in ["label", "strategy", "answer"] {
        if let Some(rest) = key.strip_prefix(prefix) {
            if !rest.is_empty() {
                key = rest.to_string();
            }
        }
    }
    IrpStrategy::ALL
        .into_iter()
        .find(|s| squash(s.name()) == key || squash(s.short_name()) == key)
}

/// Plain-text transcript used inside the annotation prompt.
pub fn render_conversation(dialogue: &Dialogue) -> String {
    dialogue
        .turns
        .iter()
        .map(|t| format!("{}: {}", t.speaker, t.text.replace('\n', " ")))
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Debug, Clone, PartialEq)]
pub struct LlmAnnotation {
    pub dialogue: Dialogue,
    pub warnings: Vec<String>,
    pub calls: usize,
}

/// Labels every segment with one model call (plus one retry on an unusable reply, after which
/// the segment becomes Residual and a warning is recorded).
pub fn annotate_llm(
    dialogue: &Dialogue,
    provider: &dyn ChatProvider,
    config: &ProviderConfig,
    prompt: &AnnotationPrompt,
) -> Result<LlmAnnotation, AnnotateError> {
    let conversation = render_conversation(dialogue);
    let mut out = dialogue.clone();
    let mut warnings = Vec::new();
    let mut calls = 0;
    for turn in &mut out.turns {
        let speaker = turn.speaker.name();
        for (si, seg) in turn.segments.iter_mut().enumerate() {
            let user = prompt.render(&conversation, &seg.text, speaker);
            let mut messages = vec![ChatMessage::user(user)];
            let mut label = None;
            for attempt in 0..2 {
                calls += 1;
                let reply = complete(provider, config, &messages).map_err(|e| AnnotateError::Provider {
                    dialogue: dialogue.id.clone(),
                    turn: turn.index,
                    segment: si,
                    message: e.to_string(),
                })?;
                label = parse_label(&reply.text);
                if label.is_some() {
                    break;
                }
                if attempt == 0 {
                    messages.push(ChatMessage::assistant(reply.text.clone()));
                    messages.push(ChatMessage::user(
                        "That is not one of the strategy names. Reply with exactly one name from the list.",
                    ));
                } else {
                    let w = format!(
                        "{} turn {} segment {si}: unusable label {:?}; using Residual",
                        dialogue.id,
                        turn.index,
                        reply.text.trim()
                    );
                    log::warn!("{w}");
                    warnings.push(w);
                }
            }
            seg.strategy = Some(label.unwrap_or(IrpStrategy::Residual));
        }
    }
    Ok(LlmAnnotation {
        dialogue: out,
        warnings,
        calls,
    })
}
