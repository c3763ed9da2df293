use serde::{Deserialize, Serialize};

use super::action::Action;
use super::issues::IssueAllocation;
use crate::corpus::Role;

pub const DEFAULT_MAX_ROUNDS: u32 = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutcomeKind {
    Agreement,
    WalkAway,
    NoAgreement,
}

impl std::fmt::Display for OutcomeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OutcomeKind::Agreement => "agreement",
            OutcomeKind::WalkAway => "walk-away",
            OutcomeKind::NoAgreement => "no-agreement",
        })
    }
}

/// How a finished negotiation ended and who ended it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Agreement {
        acceptor: Role,
        allocation: IssueAllocation,
    },
    WalkAway {
        walker: Role,
    },
    NoAgreement,
}

impl Termination {
    pub fn kind(&self) -> OutcomeKind {
        match self {
            Termination::Agreement { .. } => OutcomeKind::Agreement,
            Termination::WalkAway { .. } => OutcomeKind::WalkAway,
            Termination::NoAgreement => OutcomeKind::NoAgreement,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransitionError {
    #[error("negotiation already ended")]
    Terminal,
    #[error("{0} cannot accept or reject: no standing offer")]
    NoStandingOffer(Role),
    #[error("{0} cannot accept or reject its own offer")]
    OwnOffer(Role),
    #[error("max rounds must be at least 1")]
    ZeroRounds,
}

/// Offer currently on the table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StandingOffer {
    pub by: Role,
    pub allocation: IssueAllocation,
}

/// Dispute negotiation state. Transitions are pure: [`apply_action`] returns a new value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegotiationState {
    history: Vec<(Role, Action)>,
    standing_offer: Option<StandingOffer>,
    to_move: Role,
    opener: Role,
    max_rounds: u32,
    termination: Option<Termination>,
}

impl NegotiationState {
    pub fn new(opener: Role, max_rounds: u32) -> Result<Self, TransitionError> {
        if max_rounds == 0 {
            return Err(TransitionError::ZeroRounds);
        }
        Ok(NegotiationState {
            history: Vec::new(),
            standing_offer: None,
            to_move: opener,
            opener,
            max_rounds,
            termination: None,
        })
    }

    pub fn history(&self) -> &[(Role, Action)] {
        &self.history
    }

    pub fn standing_offer(&self) -> Option<&StandingOffer> {
        self.standing_offer.as_ref()
    }

    /// Standing offer made by the partner of `role`, which `role` may accept.
    pub fn offer_for(&self, role: Role) -> Option<&IssueAllocation> {
        self.standing_offer
            .as_ref()
            .filter(|o| o.by != role)
            .map(|o| &o.allocation)
    }

    pub fn to_move(&self) -> Role {
        self.to_move
    }

    pub fn opener(&self) -> Role {
        self.opener
    }

    pub fn max_rounds(&self) -> u32 {
        self.max_rounds
    }

    pub fn turns_taken(&self) -> usize {
        self.history.len()
    }

    /// Rounds in which both parties have spoken.
    pub fn completed_rounds(&self) -> u32 {
        (self.history.len() / 2) as u32
    }

    /// 1-based round of the next move (or of the last move once terminal).
    pub fn round(&self) -> u32 {
        if self.is_terminal() && !self.history.is_empty() {
            ((self.history.len() - 1) / 2 + 1) as u32
        } else {
            (self.history.len() / 2 + 1) as u32
        }
    }

    pub fn is_terminal(&self) -> bool {
        self.termination.is_some()
    }

    pub fn termination(&self) -> Option<&Termination> {
        self.termination.as_ref()
    }

    /// Checks whether `action` is legal for the party to move.
    pub fn check(&self, action: &Action) -> Result<(), TransitionError> {
        if self.is_terminal() {
            return Err(TransitionError::Terminal);
        }
        if matches!(action, Action::Accept | Action::Reject) {
            match &self.standing_offer {
                None => return Err(TransitionError::NoStandingOffer(self.to_move)),
                Some(o) if o.by == self.to_move => return Err(TransitionError::OwnOffer(self.to_move)),
                Some(_) => {}
            }
        }
        Ok(())
    }
}

/// Applies the move of the party whose turn it is.
pub fn apply_action(state: &NegotiationState, action: Action) -> Result<NegotiationState, TransitionError> {
    state.check(&action)?;
    let actor = state.to_move;
    let mut next = state.clone();
    next.history.push((actor, action));
    next.to_move = actor.partner();
    match action {
        Action::Message => {}
        Action::Submit(allocation) => {
            next.standing_offer = Some(StandingOffer { by: actor, allocation });
        }
        Action::Reject => next.standing_offer = None,
        Action::Accept => {
            let allocation = state.standing_offer.expect("checked above").allocation;
            next.termination = Some(Termination::Agreement {
                acceptor: actor,
                allocation,
            });
        }
        Action::WalkAway => next.termination = Some(Termination::WalkAway { walker: actor }),
    }
    if next.termination.is_none() && next.completed_rounds() >= next.max_rounds {
        next.termination = Some(Termination::NoAgreement);
    }
    Ok(next)
}

/// Replays a sequence of actions from a fresh state.
pub fn replay<I>(opener: Role, max_rounds: u32, actions: I) -> Result<NegotiationState, TransitionError>
where
    I: IntoIterator<Item = Action>,
{
    let mut state = NegotiationState::new(opener, max_rounds)?;
    for action in actions {
        state = apply_action(&state, action)?;
    }
    Ok(state)
}
