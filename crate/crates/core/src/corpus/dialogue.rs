use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use super::taxonomy::IrpStrategy;
use super::traits::TraitProfile;
use crate::negotiation::{
    apply_action, score, Action, ImportanceWeights, NegotiationState, Outcome, OutcomeError, OutcomeKind, Termination,
    TransitionError, DEFAULT_MAX_ROUNDS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    Buyer,
    Seller,
}

impl Role {
    pub const BOTH: [Role; 2] = [Role::Buyer, Role::Seller];

    pub fn partner(self) -> Role {
        match self {
            Role::Buyer => Role::Seller,
            Role::Seller => Role::Buyer,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Role::Buyer => "Buyer",
            Role::Seller => "Seller",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One value per role, serialized as `{"Buyer": .., "Seller": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoleMap<T> {
    #[serde(rename = "Buyer")]
    pub buyer: T,
    #[serde(rename = "Seller")]
    pub seller: T,
}

impl<T> RoleMap<T> {
    pub fn new(buyer: T, seller: T) -> Self {
        RoleMap { buyer, seller }
    }

    pub fn from_fn(mut f: impl FnMut(Role) -> T) -> Self {
        RoleMap {
            buyer: f(Role::Buyer),
            seller: f(Role::Seller),
        }
    }

    pub fn map<U>(self, mut f: impl FnMut(T) -> U) -> RoleMap<U> {
        RoleMap {
            buyer: f(self.buyer),
            seller: f(self.seller),
        }
    }

    pub fn as_ref(&self) -> RoleMap<&T> {
        RoleMap {
            buyer: &self.buyer,
            seller: &self.seller,
        }
    }
}

impl<T> Index<Role> for RoleMap<T> {
    type Output = T;
    fn index(&self, role: Role) -> &T {
        match role {
            Role::Buyer => &self.buyer,
            Role::Seller => &self.seller,
        }
    }
}

impl<T> IndexMut<Role> for RoleMap<T> {
    fn index_mut(&mut self, role: Role) -> &mut T {
        match role {
            Role::Buyer => &mut self.buyer,
            Role::Seller => &mut self.seller,
        }
    }
}

/// A subject-verb unit of an utterance, optionally carrying its IRP label.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Segment {
    pub text: String,
    pub strategy: Option<IrpStrategy>,
}

impl Segment {
    pub fn new(text: impl Into<String>) -> Self {
        Segment {
            text: text.into(),
            strategy: None,
        }
    }

    pub fn labeled(text: impl Into<String>, strategy: IrpStrategy) -> Self {
        Segment {
            text: text.into(),
            strategy: Some(strategy),
        }
    }
}

/// One message in the transcript.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Turn {
    pub index: usize,
    pub speaker: Role,
    pub text: String,
    pub action: Action,
    pub segments: Vec<Segment>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    HumanCorpus,
    Simulated,
}

/// Per-agent provenance recorded by the simulator.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentMeta {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provider: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub persona_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub importance_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub adjectives: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system_prompt: Option<String>,
}

/// Transcript metadata: seeds, limits and agent provenance.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DialogueMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_rounds: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opener: Option<Role>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agents: Option<RoleMap<AgentMeta>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dialogue {
    pub id: String,
    pub source: Source,
    pub profiles: Option<RoleMap<TraitProfile>>,
    pub importance: Option<RoleMap<ImportanceWeights>>,
    pub turns: Vec<Turn>,
    pub outcome: Outcome,
    pub meta: Option<DialogueMeta>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DialogueError {
    #[error("dialogue id is empty")]
    EmptyId,
    #[error("turn index {found} at position {position} (indices must run 0, 1, 2, ...)")]
    IndexGap { position: usize, found: usize },
    #[error("non-alternating turns at index {0}")]
    NonAlternating(usize),
    #[error("empty segment text at turn {turn}, segment {segment}")]
    EmptySegment { turn: usize, segment: usize },
    #[error("message turn {0} has no segments")]
    MissingSegments(usize),
    #[error("{turns} turns exceed the limit of {max_rounds} rounds")]
    TooManyRounds { turns: usize, max_rounds: u32 },
    #[error("invalid outcome: {0}")]
    Outcome(#[from] OutcomeError),
    #[error("illegal action at turn {turn}: {error}")]
    IllegalAction { turn: usize, error: TransitionError },
    #[error("turns continue after the negotiation ended at turn {0}")]
    TurnsAfterEnd(usize),
    #[error("outcome {recorded:?} does not match the transcript, which ends in {replayed}")]
    OutcomeMismatch { recorded: OutcomeKind, replayed: String },
    #[error("recorded {role} score {recorded} differs from the computed {computed}")]
    ScoreMismatch { role: Role, recorded: f64, computed: f64 },
    #[error("simulated dialogue is missing {0}")]
    MissingField(&'static str),
}

const SCORE_TOLERANCE: f64 = 1e-9;

impl Dialogue {
    pub fn max_rounds(&self) -> u32 {
        self.meta
            .as_ref()
            .and_then(|m| m.max_rounds)
            .unwrap_or(DEFAULT_MAX_ROUNDS)
    }

    pub fn segments(&self) -> impl Iterator<Item = (&Turn, &Segment)> {
        self.turns.iter().flat_map(|t| t.segments.iter().map(move |s| (t, s)))
    }

    /// True when every segment carries a strategy label.
    pub fn is_annotated(&self) -> bool {
        self.segments().all(|(_, s)| s.strategy.is_some())
    }

    /// Checks every structural invariant of the transcript model.
    pub fn validate(&self) -> Result<(), DialogueError> {
        if self.id.is_empty() {
            return Err(DialogueError::EmptyId);
        }
        for (position, turn) in self.turns.iter().enumerate() {
            if turn.index != position {
                return Err(DialogueError::IndexGap {
                    position,
                    found: turn.index,
                });
            }
            if position > 0 && self.turns[position - 1].speaker == turn.speaker {
                return Err(DialogueError::NonAlternating(position));
            }
            for (i, seg) in turn.segments.iter().enumerate() {
                if seg.text.trim().is_empty() {
                    return Err(DialogueError::EmptySegment {
                        turn: position,
                        segment: i,
                    });
                }
            }
            if turn.segments.is_empty() && turn.action.is_message() {
                return Err(DialogueError::MissingSegments(position));
            }
        }
        let capped = self.source == Source::Simulated || self.meta.as_ref().is_some_and(|m| m.max_rounds.is_some());
        if capped && self.turns.len() > 2 * self.max_rounds() as usize {
            return Err(DialogueError::TooManyRounds {
                turns: self.turns.len(),
                max_rounds: self.max_rounds(),
            });
        }
        self.outcome.validate()?;
        if self.source == Source::Simulated {
            if self.profiles.is_none() {
                return Err(DialogueError::MissingField("profiles"));
            }
            if self.importance.is_none() {
                return Err(DialogueError::MissingField("importance"));
            }
        }
        self.check_terminal_consistency()?;
        self.check_scores()
    }

    fn check_terminal_consistency(&self) -> Result<(), DialogueError> {
        let structured = self.turns.iter().any(|t| !t.action.is_message());
        if self.source == Source::HumanCorpus && !structured {
            return Ok(());
        }
        let Some(first) = self.turns.first() else {
            if self.source == Source::Simulated {
                return Err(DialogueError::OutcomeMismatch {
                    recorded: self.outcome.kind,
                    replayed: "an empty transcript".into(),
                });
            }
            return Ok(());
        };
        let max_rounds = if self.source == Source::Simulated {
            self.max_rounds()
        } else {
            // human transcripts are not bound by the simulator's cap
            u32::MAX / 2
        };
        let mut state = NegotiationState::new(first.speaker, max_rounds)
            .map_err(|error| DialogueError::IllegalAction { turn: 0, error })?;
        for turn in &self.turns {
            if state.is_terminal() {
                return Err(DialogueError::TurnsAfterEnd(turn.index.saturating_sub(1)));
            }
            state = apply_action(&state, turn.action).map_err(|error| DialogueError::IllegalAction {
                turn: turn.index,
                error,
            })?;
        }
        let mismatch = |replayed: String| DialogueError::OutcomeMismatch {
            recorded: self.outcome.kind,
            replayed,
        };
        match state.termination() {
            None if self.source == Source::Simulated => Err(mismatch("an unfinished negotiation".into())),
            None => Ok(()),
            Some(Termination::Agreement { acceptor, allocation }) => {
                let ok = self.outcome.kind == OutcomeKind::Agreement
                    && self.outcome.acceptor == Some(*acceptor)
                    && self.outcome.allocation.as_ref().is_none_or(|a| a == allocation)
                    && (self.source == Source::HumanCorpus || self.outcome.allocation.is_some());
                if ok {
                    Ok(())
                } else {
                    Err(mismatch(format!("agreement accepted by {acceptor}")))
                }
            }
            Some(Termination::WalkAway { walker }) => {
                if self.outcome.kind == OutcomeKind::WalkAway && self.outcome.walker == Some(*walker) {
                    Ok(())
                } else {
                    Err(mismatch(format!("walk-away by {walker}")))
                }
            }
            Some(Termination::NoAgreement) => {
                if self.outcome.kind == OutcomeKind::NoAgreement {
                    Ok(())
                } else {
                    Err(mismatch("no agreement at the round cap".into()))
                }
            }
        }
    }

    fn check_scores(&self) -> Result<(), DialogueError> {
        let (Some(importance), Some(allocation), Some(scores)) =
            (&self.importance, &self.outcome.allocation, &self.outcome.scores)
        else {
            return Ok(());
        };
        if self.source != Source::Simulated {
            return Ok(());
        }
        for role in Role::BOTH {
            let computed = score(allocation, &importance[role], role);
            if (computed - scores[role]).abs() > SCORE_TOLERANCE {
                return Err(DialogueError::ScoreMismatch {
                    role,
                    recorded: scores[role],
                    computed,
                });
            }
        }
        Ok(())
    }
}
