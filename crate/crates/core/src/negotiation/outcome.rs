use serde::{Deserialize, Serialize};

use super::issues::{score, ImportanceWeights, IssueAllocation};
use super::state::{NegotiationState, OutcomeKind, Termination};
use crate::corpus::{Role, RoleMap};

// weights sum to 100 only up to floating-point rounding
const SCORE_ROUNDING: f64 = 1e-6;

/// Final result of a dialogue plus the per-party outcome variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outcome {
    pub kind: OutcomeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub acceptor: Option<Role>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub walker: Option<Role>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allocation: Option<IssueAllocation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scores: Option<RoleMap<f64>>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OutcomeError {
    #[error("outcome requested for a negotiation that has not ended")]
    NotTerminal,
    #[error("agreement outcome needs an acceptor")]
    MissingAcceptor,
    #[error("agreement outcome needs scores for both parties")]
    MissingScores,
    #[error("walk-away outcome needs the walking party")]
    MissingWalker,
    #[error("{0} outcome must not carry {1}")]
    UnexpectedField(OutcomeKind, &'static str),
    #[error("score {0} outside [0, 100]")]
    ScoreOutOfRange(f64),
}

impl Outcome {
    pub fn agreement(acceptor: Role, allocation: IssueAllocation, weights: &RoleMap<ImportanceWeights>) -> Self {
        let scores = RoleMap::from_fn(|role| score(&allocation, &weights[role], role));
        Outcome {
            kind: OutcomeKind::Agreement,
            acceptor: Some(acceptor),
            walker: None,
            allocation: Some(allocation),
            scores: Some(scores),
        }
    }

    pub fn walk_away(walker: Role) -> Self {
        Outcome {
            kind: OutcomeKind::WalkAway,
            acceptor: None,
            walker: Some(walker),
            allocation: None,
            scores: None,
        }
    }

    pub fn no_agreement() -> Self {
        Outcome {
            kind: OutcomeKind::NoAgreement,
            acceptor: None,
            walker: None,
            allocation: None,
            scores: None,
        }
    }

    /// 1 if `role` accepted the final offer.
    pub fn accept(&self, role: Role) -> u8 {
        u8::from(self.kind == OutcomeKind::Agreement && self.acceptor == Some(role))
    }

    /// 0 if `role` walked away, 1 otherwise.
    pub fn not_walk_away(&self, role: Role) -> u8 {
        u8::from(!(self.kind == OutcomeKind::WalkAway && self.walker == Some(role)))
    }

    /// Payoff for `role`; present only for agreements.
    pub fn score(&self, role: Role) -> Option<f64> {
        self.scores.as_ref().map(|s| s[role])
    }

    pub fn validate(&self) -> Result<(), OutcomeError> {
        let unexpected = |field| Err(OutcomeError::UnexpectedField(self.kind, field));
        match self.kind {
            OutcomeKind::Agreement => {
                if self.acceptor.is_none() {
                    return Err(OutcomeError::MissingAcceptor);
                }
                let Some(scores) = &self.scores else {
                    return Err(OutcomeError::MissingScores);
                };
                for s in [scores.buyer, scores.seller] {
                    if !(-SCORE_ROUNDING..=100.0 + SCORE_ROUNDING).contains(&s) {
                        return Err(OutcomeError::ScoreOutOfRange(s));
                    }
                }
                if self.walker.is_some() {
                    return unexpected("walker");
                }
            }
            OutcomeKind::WalkAway | OutcomeKind::NoAgreement => {
                if self.kind == OutcomeKind::WalkAway && self.walker.is_none() {
                    return Err(OutcomeError::MissingWalker);
                }
                if self.kind == OutcomeKind::NoAgreement && self.walker.is_some() {
                    return unexpected("walker");
                }
                if self.acceptor.is_some() {
                    return unexpected("acceptor");
                }
                if self.allocation.is_some() {
                    return unexpected("allocation");
                }
                if self.scores.is_some() {
                    return unexpected("scores");
                }
            }
        }
        Ok(())
    }
}

/// Derives the outcome of a finished negotiation; scores are computed only for agreements.
pub fn outcome_of(state: &NegotiationState, weights: &RoleMap<ImportanceWeights>) -> Result<Outcome, OutcomeError> {
    match state.termination() {
        None => Err(OutcomeError::NotTerminal),
        Some(Termination::Agreement { acceptor, allocation }) => {
            Ok(Outcome::agreement(*acceptor, *allocation, weights))
        }
        Some(Termination::WalkAway { walker }) => Ok(Outcome::walk_away(*walker)),
        Some(Termination::NoAgreement) => Ok(Outcome::no_agreement()),
    }
}
