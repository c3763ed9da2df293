//! Dispute negotiation protocol: action grammar, state machine, outcomes and payoffs.

mod action;
mod issues;
mod outcome;
mod state;

pub use action::{
    parse_action, strip_action_lines, Action, ActionKind, MalformedOffer, ACCEPT_TOKEN, REJECT_TOKEN, SUBMISSION_TOKEN,
    WALK_AWAY_TOKEN,
};
pub use issues::{
    score, ApologyLevel, ImportanceWeights, Issue, IssueAllocation, RefundLevel, ReviewLevel, WeightsError,
};
pub use outcome::{outcome_of, Outcome, OutcomeError};
pub use state::{
    apply_action, replay, NegotiationState, OutcomeKind, StandingOffer, Termination, TransitionError,
    DEFAULT_MAX_ROUNDS,
};
