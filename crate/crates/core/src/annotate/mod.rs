//! Utterance segmentation, IRP labeling and annotation quality measures.

mod eval;
mod llm;
mod rules;
mod segment;

pub use eval::{
    a_kappa, classification_report, report_from_confusion, AnnotationJudgment, ClassScore, ClassificationReport,
    ConfusionMatrix, A_KAPPA_CHANCE_AGREEMENT,
};
pub use llm::{
    annotate_llm, parse_label, render_conversation, AnnotationPrompt, LlmAnnotation, DEFAULT_TEMPLATE, DEFINITIONS,
};
pub use rules::{annotate_rules, classify_segment};
pub use segment::{has_verb, segment_utterance};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnnotateError {
    #[error("no judgments given")]
    NoJudgments,
    #[error("item {item} has {found} annotator verdicts; at least 2 are needed")]
    TooFewAnnotators { item: String, found: usize },
    #[error("no labeled segments to evaluate")]
    NoSegments,
    #[error("predicted and gold corpora do not line up: {0}")]
    IdMismatch(String),
    #[error("dialogue {dialogue}, turn {turn}, segment {segment} is not annotated")]
    Unannotated {
        dialogue: String,
        turn: usize,
        segment: usize,
    },
    #[error("dialogue {dialogue}, turn {turn}, segment {segment}: provider failed: {message}")]
    Provider {
        dialogue: String,
        turn: usize,
        segment: usize,
        message: String,
    },
    #[error("invalid annotation template: {0}")]
    Template(String),
}
