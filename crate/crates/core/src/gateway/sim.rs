//! Simulation driver: alternates two agents over the negotiation protocol and records the transcript.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::prompt::{build_agent_prompt, malformed_offer_cue, Scenario, OPENING_CUE};
use super::provider::{complete, ChatMessage, CompletionError, ProviderConfig, ProviderRegistry};
use super::scripted::{scripted_agent_respond, ScriptedContext, ScriptedPolicy};
use crate::annotate::segment_utterance;
use crate::corpus::{
    dialogue_to_line, parse_unvalidated, AgentMeta, Dialogue, DialogueMeta, PersonalityProfile, Role, RoleMap, Segment,
    Source, Turn,
};
use crate::negotiation::{
    apply_action, outcome_of, parse_action, strip_action_lines, Action, ImportanceWeights, NegotiationState, Outcome,
    DEFAULT_MAX_ROUNDS,
};
use crate::persona::{
    assign_importance, build_persona_prompt, sample_profile, AdjectiveLexicon, PersonaError, PersonaPrompt,
    TraitDistribution,
};

/// Who plays one side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AgentSpec {
    /// A fixed rule table.
    Scripted { policy: ScriptedPolicy },
    /// A rule table derived from the agent's own personality profile.
    PersonaScripted,
    /// A chat-completion model.
    Llm { config: ProviderConfig },
}

impl AgentSpec {
    fn policy(&self, profile: &PersonalityProfile) -> Option<ScriptedPolicy> {
        match self {
            AgentSpec::Scripted { policy } => Some(policy.clone()),
            AgentSpec::PersonaScripted => Some(ScriptedPolicy::for_profile(profile)),
            AgentSpec::Llm { .. } => None,
        }
    }
}

/// Everything needed to run one dialogue; (config, seed) determines a scripted dialogue completely.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub id: String,
    pub seed: u64,
    pub opener: Role,
    pub max_rounds: u32,
    pub scenario: Scenario,
    pub agents: RoleMap<AgentSpec>,
    pub profiles: RoleMap<PersonalityProfile>,
    pub importance: RoleMap<ImportanceWeights>,
    pub personas: RoleMap<PersonaPrompt>,
    pub persona_seeds: RoleMap<u64>,
    pub importance_seeds: RoleMap<u64>,
}

/// Per-dialogue seed `index` derived from a root seed (one ChaCha stream per dialogue).
pub fn dialogue_seed(root: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(root);
    rng.set_stream(index);
    rng.next_u64()
}

impl SimulationConfig {
    /// Samples both profiles, persona texts and importance weights from `seed`.
    pub fn sample(
        id: impl Into<String>,
        seed: u64,
        agents: RoleMap<AgentSpec>,
        distribution: &TraitDistribution,
        lexicon: &AdjectiveLexicon,
        scenario: Scenario,
    ) -> Result<Self, PersonaError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let profile_seeds = RoleMap::from_fn(|_| rng.next_u64());
        let persona_seeds = RoleMap::from_fn(|_| rng.next_u64());
        let importance_seeds = RoleMap::from_fn(|_| rng.next_u64());
        let profiles = RoleMap::new(
            sample_profile(distribution, profile_seeds.buyer)?,
            sample_profile(distribution, profile_seeds.seller)?,
        );
        let personas = RoleMap::new(
            build_persona_prompt(&profiles.buyer, lexicon, persona_seeds.buyer)?,
            build_persona_prompt(&profiles.seller, lexicon, persona_seeds.seller)?,
        );
        let importance = RoleMap::from_fn(|role| assign_importance(&profiles[role], role, importance_seeds[role]));
        Ok(SimulationConfig {
            id: id.into(),
            seed,
            opener: Role::Buyer,
            max_rounds: DEFAULT_MAX_ROUNDS,
            scenario,
            agents,
            profiles,
            importance,
            personas,
            persona_seeds,
            importance_seeds,
        })
    }

    pub fn system_prompt(&self, role: Role) -> String {
        build_agent_prompt(
            role,
            &self.personas[role],
            &self.scenario,
            &self.importance[role],
            self.max_rounds,
        )
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimulationError {
    #[error("dialogue {id}: provider failed for the {role} at turn {turn}: {error}")]
    Provider {
        id: String,
        role: Role,
        turn: usize,
        error: CompletionError,
        checkpoint: Box<Checkpoint>,
    },
    #[error("dialogue {0}: invalid configuration: {1}")]
    Config(String, String),
    #[error("dialogue {0}: internal protocol error: {1}")]
    Protocol(String, String),
    #[error("checkpoint does not belong to dialogue {0}")]
    CheckpointMismatch(String),
}

/// Resumable state of an aborted dialogue: the transcript so far plus the provider call that failed.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub id: String,
    pub seed: u64,
    pub partial: Dialogue,
    pub pending_role: Role,
    pub pending_messages: Vec<ChatMessage>,
    pub error: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCheckpoint {
    checkpoint: String,
    seed: u64,
    pending_role: Role,
    pending_messages: Vec<ChatMessage>,
    error: String,
    partial: Value,
}

impl Checkpoint {
    pub fn to_line(&self) -> String {
        let raw = RawCheckpoint {
            checkpoint: self.id.clone(),
            seed: self.seed,
            pending_role: self.pending_role,
            pending_messages: self.pending_messages.clone(),
            error: self.error.clone(),
            partial: serde_json::from_str(&dialogue_to_line(&self.partial)).expect("dialogue line is JSON"),
        };
        serde_json::to_string(&raw).expect("checkpoint serializes")
    }

    pub fn from_line(line: &str) -> Result<Self, String> {
        let raw: RawCheckpoint = serde_json::from_str(line).map_err(|e| e.to_string())?;
        let partial = parse_unvalidated(&raw.partial.to_string()).map_err(|e| e.to_string())?;
        Ok(Checkpoint {
            id: raw.checkpoint,
            seed: raw.seed,
            partial,
            pending_role: raw.pending_role,
            pending_messages: raw.pending_messages,
            error: raw.error,
        })
    }
}

fn agent_meta(config: &SimulationConfig, role: Role) -> AgentMeta {
    let (kind, provider, model, policy) = match &config.agents[role] {
        AgentSpec::Scripted { policy } => ("scripted", None, None, Some(policy.name.clone())),
        AgentSpec::PersonaScripted => ("scripted", None, None, Some("persona".to_string())),
        AgentSpec::Llm { config } => ("llm", Some(config.provider.clone()), Some(config.model.clone()), None),
    };
    AgentMeta {
        kind: kind.into(),
        provider,
        model,
        policy,
        persona_seed: Some(config.persona_seeds[role]),
        importance_seed: Some(config.importance_seeds[role]),
        adjectives: config.personas[role].adjectives.clone(),
        system_prompt: Some(config.system_prompt(role)),
    }
}

fn shell(config: &SimulationConfig, turns: Vec<Turn>, outcome: Outcome) -> Dialogue {
    Dialogue {
        id: config.id.clone(),
        source: Source::Simulated,
        profiles: Some(config.profiles.map(Into::into)),
        importance: Some(config.importance),
        turns,
        outcome,
        meta: Some(DialogueMeta {
            seed: Some(config.seed),
            max_rounds: Some(config.max_rounds),
            opener: Some(config.opener),
            agents: Some(RoleMap::from_fn(|role| agent_meta(config, role))),
        }),
    }
}

/// Chat history as seen by `role`: own turns are assistant messages, the partner's are user messages.
fn chat_history(config: &SimulationConfig, role: Role, turns: &[Turn]) -> Vec<ChatMessage> {
    let mut messages = vec![ChatMessage::system(config.system_prompt(role))];
    if config.opener == role {
        messages.push(ChatMessage::user(OPENING_CUE));
    }
    for t in turns {
        messages.push(if t.speaker == role {
            ChatMessage::assistant(t.text.clone())
        } else {
            ChatMessage::user(t.text.clone())
        });
    }
    messages
}

fn make_turn(index: usize, speaker: Role, text: String, action: Action) -> Turn {
    let mut segments = segment_utterance(&strip_action_lines(&text));
    if segments.is_empty() && action.is_message() {
        let fallback = text.trim();
        segments.push(Segment::new(if fallback.is_empty() {
            "(no message)"
        } else {
            fallback
        }));
    }
    Turn {
        index,
        speaker,
        text,
        action,
        segments,
    }
}

/// Reads the action from `text`; illegal Accept/Reject (nothing to answer) becomes a Message.
fn legal_action(state: &NegotiationState, action: Action) -> Action {
    if state.check(&action).is_ok() {
        action
    } else {
        log::warn!(
            "{:?} by {} is not legal here; recorded as a message",
            action.kind(),
            state.to_move()
        );
        Action::Message
    }
}

/// Runs one dialogue from the start.
pub fn run_simulation(config: &SimulationConfig, registry: &ProviderRegistry) -> Result<Dialogue, SimulationError> {
    continue_simulation(config, registry, Vec::new())
}

/// Continues an aborted dialogue from its checkpoint.
pub fn resume(
    config: &SimulationConfig,
    registry: &ProviderRegistry,
    checkpoint: &Checkpoint,
) -> Result<Dialogue, SimulationError> {
    if checkpoint.id != config.id || checkpoint.seed != config.seed {
        return Err(SimulationError::CheckpointMismatch(config.id.clone()));
    }
    continue_simulation(config, registry, checkpoint.partial.turns.clone())
}

fn continue_simulation(
    config: &SimulationConfig,
    registry: &ProviderRegistry,
    mut turns: Vec<Turn>,
) -> Result<Dialogue, SimulationError> {
    let protocol = |e: String| SimulationError::Protocol(config.id.clone(), e);
    let mut state = NegotiationState::new(config.opener, config.max_rounds)
        .map_err(|e| SimulationError::Config(config.id.clone(), e.to_string()))?;
    for t in &turns {
        state = apply_action(&state, t.action).map_err(|e| protocol(e.to_string()))?;
    }
    let policies = RoleMap::from_fn(|role| config.agents[role].policy(&config.profiles[role]));
    let providers = RoleMap::from_fn(|role| match &config.agents[role] {
        AgentSpec::Llm { config: pc } => Some(registry.get(&pc.provider).map(|p| (p, pc.clone()))),
        _ => None,
    });
    let providers = RoleMap::new(
        providers
            .buyer
            .transpose()
            .map_err(|e| SimulationError::Config(config.id.clone(), e.to_string()))?,
        providers
            .seller
            .transpose()
            .map_err(|e| SimulationError::Config(config.id.clone(), e.to_string()))?,
    );

    while !state.is_terminal() {
        let role = state.to_move();
        let index = turns.len();
        let (text, action) = if let Some(policy) = &policies[role] {
            let ctx = ScriptedContext {
                weights: &config.importance[role],
                partner_text: turns.last().map(|t| t.text.as_str()),
                seed: config.seed ^ role_salt(role),
            };
            let text = scripted_agent_respond(policy, &state, &ctx);
            let action = parse_action(&text).map_err(|e| protocol(e.to_string()))?;
            (text, action)
        } else {
            let (provider, pc) = providers[role].as_ref().expect("llm agent has a provider");
            let mut messages = chat_history(config, role, &turns);
            let call = |messages: &[ChatMessage]| {
                complete(provider.as_ref(), pc, messages).map_err(|error| SimulationError::Provider {
                    id: config.id.clone(),
                    role,
                    turn: index,
                    checkpoint: Box::new(Checkpoint {
                        id: config.id.clone(),
                        seed: config.seed,
                        partial: shell(config, turns.clone(), Outcome::no_agreement()),
                        pending_role: role,
                        pending_messages: messages.to_vec(),
                        error: error.to_string(),
                    }),
                    error,
                })
            };
            let mut text = call(&messages)?.text;
            let action = match parse_action(&text) {
                Ok(a) => a,
                Err(bad) => {
                    log::info!(
                        "{}: malformed offer at turn {index} ({bad}); asking once more",
                        config.id
                    );
                    messages.push(ChatMessage::assistant(text.clone()));
                    messages.push(ChatMessage::user(malformed_offer_cue(&bad.to_string())));
                    text = call(&messages)?.text;
                    parse_action(&text).unwrap_or_else(|bad| {
                        log::warn!(
                            "{}: offer still malformed at turn {index} ({bad}); kept as a message",
                            config.id
                        );
                        Action::Message
                    })
                }
            };
            (text, legal_action(&state, action))
        };
        state = apply_action(&state, action).map_err(|e| protocol(e.to_string()))?;
        turns.push(make_turn(index, role, text, action));
    }
    let outcome = outcome_of(&state, &config.importance).map_err(|e| protocol(e.to_string()))?;
    let dialogue = shell(config, turns, outcome);
    dialogue.validate().map_err(|e| protocol(e.to_string()))?;
    Ok(dialogue)
}

// keeps the two sides' canned-text streams apart
fn role_salt(role: Role) -> u64 {
    match role {
        Role::Buyer => 0,
        Role::Seller => 0x9e37_79b9_7f4a_7c15,
    }
}

/// Result of a batch: finished dialogues and checkpoints, both ordered by dialogue id.
#[derive(Debug, Default)]
pub struct BatchOutput {
    pub dialogues: Vec<Dialogue>,
    pub checkpoints: Vec<Checkpoint>,
    pub failures: Vec<SimulationError>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BatchError {
    #[error("parallelism must be at least 1")]
    ZeroParallelism,
    #[error("duplicate dialogue id {0}")]
    DuplicateId(String),
}

/// Runs dialogues on up to `parallelism` threads. Failed dialogues are collected, not fatal.
pub fn run_batch(
    configs: &[SimulationConfig],
    registry: &ProviderRegistry,
    parallelism: usize,
) -> Result<BatchOutput, BatchError> {
    if parallelism == 0 {
        return Err(BatchError::ZeroParallelism);
    }
    let mut ids: Vec<&str> = configs.iter().map(|c| c.id.as_str()).collect();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(BatchError::DuplicateId(w[0].to_string()));
    }
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<(usize, Result<Dialogue, SimulationError>)>> = Mutex::new(Vec::with_capacity(configs.len()));
    std::thread::scope(|scope| {
        for _ in 0..parallelism.min(configs.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(config) = configs.get(i) else { break };
                let result = run_simulation(config, registry);
                if let Err(e) = &result {
                    log::error!("{e}");
                }
                results.lock().expect("no worker panicked").push((i, result));
            });
        }
    });
    let mut results = results.into_inner().expect("no worker panicked");
    results.sort_by(|a, b| configs[a.0].id.cmp(&configs[b.0].id));
    let mut out = BatchOutput::default();
    for (_, result) in results {
        match result {
            Ok(d) => out.dialogues.push(d),
            Err(SimulationError::Provider {
                checkpoint,
                id,
                role,
                turn,
                error,
            }) => {
                out.checkpoints.push((*checkpoint).clone());
                out.failures.push(SimulationError::Provider {
                    id,
                    role,
                    turn,
                    error,
                    checkpoint,
                });
            }
            Err(e) => out.failures.push(e),
        }
    }
    Ok(out)
}
