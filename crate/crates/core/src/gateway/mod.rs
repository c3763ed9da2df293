//! Chat-completion providers, scripted agents and the simulation driver.

mod http;
mod mock;
mod prompt;
mod provider;
mod scripted;
mod sim;

pub use http::{Anthropic, OpenAiCompatible};
pub use mock::{EchoProvider, FnProvider, ModelNameProvider, ScriptedProvider};
pub use prompt::{build_agent_prompt, malformed_offer_cue, Scenario, OPENING_CUE};
pub use provider::{
    complete, complete_with_sleep, AttemptRecord, ChatMessage, ChatProvider, ChatRole, Completion, CompletionError,
    ProviderConfig, ProviderError, ProviderRegistry, Reply,
};
pub use scripted::{
    concession_offer, lines_for, scripted_agent_respond, AcceptRule, OfferRule, ScriptedContext, ScriptedPolicy,
};
pub use sim::{
    dialogue_seed, resume, run_batch, run_simulation, AgentSpec, BatchError, BatchOutput, Checkpoint, SimulationConfig,
    SimulationError,
};
