//! Line-delimited JSON corpus reading and writing.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value};

use super::dialogue::{Dialogue, DialogueError, DialogueMeta, RoleMap, Segment, Source, Turn};
use super::taxonomy::{IrpStrategy, UnknownStrategy};
use super::traits::{HumanScores, PersonalityProfile, Trait, TraitProfile};
use crate::negotiation::{Action, ActionKind, ImportanceWeights, IssueAllocation, Outcome};

#[derive(Debug, thiserror::Error)]
pub enum RecordError {
    #[error("malformed record: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{source} (turn {turn}, segment {segment})")]
    UnknownStrategy {
        source: UnknownStrategy,
        turn: usize,
        segment: usize,
    },
    #[error("{role} profile: {reason}")]
    Profile { role: &'static str, reason: String },
    #[error("turn {0} is a submit action without an offer")]
    MissingOffer(usize),
    #[error("turn {0} carries an offer but is not a submit action")]
    UnexpectedOffer(usize),
    #[error(transparent)]
    Invalid(#[from] DialogueError),
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("line {line}: {source}")]
    Record { line: usize, source: RecordError },
}

impl CorpusError {
    pub fn line(&self) -> Option<usize> {
        match self {
            CorpusError::Record { line, .. } => Some(*line),
            CorpusError::Io { .. } => None,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDialogue {
    id: String,
    source: Source,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    profiles: Option<RoleMap<Map<String, Value>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    importance: Option<RoleMap<ImportanceWeights>>,
    turns: Vec<RawTurn>,
    outcome: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<DialogueMeta>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTurn {
    index: usize,
    speaker: super::dialogue::Role,
    text: String,
    action: ActionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    offer: Option<IssueAllocation>,
    segments: Vec<RawSegment>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSegment {
    text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    strategy: Option<String>,
}

/// Parses and validates one corpus line.
pub fn parse_dialogue_line(line: &str) -> Result<Dialogue, RecordError> {
    let dialogue = parse_unvalidated(line)?;
    dialogue.validate()?;
    Ok(dialogue)
}

/// Parses a record without checking dialogue invariants (used for unfinished transcripts in checkpoints).
pub fn parse_unvalidated(line: &str) -> Result<Dialogue, RecordError> {
    let raw: RawDialogue = serde_json::from_str(line)?;
    let profiles = match raw.profiles {
        None => None,
        Some(p) => Some(RoleMap::new(
            parse_profile(&p.buyer, raw.source).map_err(|reason| RecordError::Profile { role: "Buyer", reason })?,
            parse_profile(&p.seller, raw.source).map_err(|reason| RecordError::Profile { role: "Seller", reason })?,
        )),
    };
    let mut turns = Vec::with_capacity(raw.turns.len());
    for (position, t) in raw.turns.into_iter().enumerate() {
        let action = match (t.action, t.offer) {
            (ActionKind::Submit, Some(offer)) => Action::Submit(offer),
            (ActionKind::Submit, None) => return Err(RecordError::MissingOffer(position)),
            (_, Some(_)) => return Err(RecordError::UnexpectedOffer(position)),
            (ActionKind::Message, None) => Action::Message,
            (ActionKind::Accept, None) => Action::Accept,
            (ActionKind::Reject, None) => Action::Reject,
            (ActionKind::WalkAway, None) => Action::WalkAway,
        };
        let mut segments = Vec::with_capacity(t.segments.len());
        for (segment, s) in t.segments.into_iter().enumerate() {
            let strategy = match s.strategy {
                None => None,
                Some(label) => {
                    Some(
                        IrpStrategy::parse_lenient(&label).map_err(|source| RecordError::UnknownStrategy {
                            source,
                            turn: position,
                            segment,
                        })?,
                    )
                }
            };
            segments.push(Segment { text: s.text, strategy });
        }
        turns.push(Turn {
            index: t.index,
            speaker: t.speaker,
            text: t.text,
            action,
            segments,
        });
    }
    let dialogue = Dialogue {
        id: raw.id,
        source: raw.source,
        profiles,
        importance: raw.importance,
        turns,
        outcome: raw.outcome,
        meta: raw.meta,
    };
    Ok(dialogue)
}

/// Trait values arrive either as six-point integers or as human 1-5 decimals.
///
/// A decimal literal always denotes a human score; integer literals are six-point
/// levels unless the record comes from a human corpus and every value lies in [1, 5].
fn parse_profile(map: &Map<String, Value>, source: Source) -> Result<TraitProfile, String> {
    if let Some(key) = map.keys().find(|k| Trait::from_code(k).is_none()) {
        return Err(format!("unexpected trait key {key:?}"));
    }
    let mut numbers: Vec<&Number> = Vec::with_capacity(5);
    for t in Trait::ALL {
        match map.get(t.code()) {
            Some(Value::Number(n)) => numbers.push(n),
            Some(other) => return Err(format!("trait {t} is not a number: {other}")),
            None => return Err(format!("missing trait {t}")),
        }
    }
    let values: Vec<f64> = numbers.iter().map(|n| n.as_f64().unwrap_or(f64::NAN)).collect();
    let all_integer = numbers.iter().all(|n| n.is_i64() || n.is_u64());
    let in_human_range = values.iter().all(|v| (1.0..=5.0).contains(v));
    let human = !all_integer || (source == Source::HumanCorpus && in_human_range);
    if human {
        let scores = [values[0], values[1], values[2], values[3], values[4]];
        return HumanScores::new(scores)
            .map(TraitProfile::Human)
            .map_err(|e| e.to_string());
    }
    let mut levels = [0i8; 5];
    for (slot, n) in levels.iter_mut().zip(&numbers) {
        *slot = n
            .as_i64()
            .and_then(|v| i8::try_from(v).ok())
            .ok_or_else(|| format!("trait level {n} out of range"))?;
    }
    PersonalityProfile::from_values(levels)
        .map(TraitProfile::Levels)
        .map_err(|e| e.to_string())
}

fn profile_to_map(profile: &TraitProfile) -> Map<String, Value> {
    let mut map = Map::new();
    for t in Trait::ALL {
        let v = match profile {
            TraitProfile::Levels(p) => Value::from(p.get(t).value()),
            TraitProfile::Human(h) => Value::from(h.get(t)),
        };
        map.insert(t.code().to_string(), v);
    }
    map
}

/// Serializes one dialogue to a single JSON line (no trailing newline).
pub fn dialogue_to_line(dialogue: &Dialogue) -> String {
    let raw = RawDialogue {
        id: dialogue.id.clone(),
        source: dialogue.source,
        profiles: dialogue.profiles.as_ref().map(|p| p.as_ref().map(profile_to_map)),
        importance: dialogue.importance,
        turns: dialogue
            .turns
            .iter()
            .map(|t| RawTurn {
                index: t.index,
                speaker: t.speaker,
                text: t.text.clone(),
                action: t.action.kind(),
                offer: t.action.offer().copied(),
                segments: t
                    .segments
                    .iter()
                    .map(|s| RawSegment {
                        text: s.text.clone(),
                        strategy: s.strategy.map(|x| x.name().to_string()),
                    })
                    .collect(),
            })
            .collect(),
        outcome: dialogue.outcome.clone(),
        meta: dialogue.meta.clone(),
    };
    serde_json::to_string(&raw).expect("dialogue records always serialize")
}

/// Reads a corpus, failing on the first invalid record.
pub fn read_corpus<R: BufRead>(reader: R) -> Result<Vec<Dialogue>, CorpusError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| CorpusError::Io {
            path: PathBuf::from("<reader>"),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let dialogue = parse_dialogue_line(&line).map_err(|source| CorpusError::Record { line: i + 1, source })?;
        out.push(dialogue);
    }
    Ok(out)
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<Dialogue>, CorpusError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_corpus(BufReader::new(file)).map_err(|e| match e {
        CorpusError::Io { source, .. } => CorpusError::Io {
            path: path.to_path_buf(),
            source,
        },
        other => other,
    })
}

/// Valid dialogues plus every rejected line, for corpora that should be screened rather than refused.
#[derive(Debug, Default)]
pub struct LoadReport {
    pub dialogues: Vec<Dialogue>,
    pub rejected: Vec<(usize, RecordError)>,
}

pub fn load_corpus_report(path: impl AsRef<Path>) -> Result<LoadReport, CorpusError> {
    let path = path.as_ref();
    let io_err = |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    };
    let reader = BufReader::new(File::open(path).map_err(io_err)?);
    let mut report = LoadReport::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        match parse_dialogue_line(&line) {
            Ok(d) => report.dialogues.push(d),
            Err(e) => report.rejected.push((i + 1, e)),
        }
    }
    Ok(report)
}

pub fn write_corpus_to<W: Write>(dialogues: &[Dialogue], mut writer: W) -> io::Result<()> {
    for d in dialogues {
        writer.write_all(dialogue_to_line(d).as_bytes())?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}

pub fn write_corpus(dialogues: &[Dialogue], path: impl AsRef<Path>) -> Result<(), CorpusError> {
    let path = path.as_ref();
    let io_err = |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    write_corpus_to(dialogues, BufWriter::new(file)).map_err(io_err)
}
