//! Simulation and analysis toolkit for personality-conditioned dispute negotiations.
//!
//! The crate is organized along the pipeline:
//!
//! * [`corpus`]: transcript data model, IRP strategy taxonomy and JSONL corpus I/O.
//! * [`negotiation`]: the SUBMISSION / ACCEPT-DEAL / REJECT-DEAL / WALK-AWAY state machine and payoffs.
//! * [`persona`]: Big Five profile sampling, adjective persona prompts and issue importance.
//! * [`gateway`]: chat-completion providers, scripted agents and the simulation driver.
//! * [`annotate`]: utterance segmentation, IRP labeling and annotation quality measures.
//! * [`metrics`]: per-speaker strategic-behavior metrics and temporal stage profiles.
//! * [`stats`]: OLS with robust errors, logistic regression and simple-effect contrasts.

pub mod annotate;
pub mod corpus;
pub mod gateway;
pub mod metrics;
pub mod negotiation;
pub mod persona;
pub mod stats;

pub use corpus::{Dialogue, IrpCategory, IrpStrategy, Role, RoleMap};
pub use negotiation::{Action, ImportanceWeights, IssueAllocation, Outcome};
