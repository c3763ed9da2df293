//! Deterministic rule-table negotiators used in place of live models.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::annotate::{classify_segment, segment_utterance};
use crate::corpus::{IrpCategory, IrpStrategy, PersonalityProfile, Role, Trait};
use crate::negotiation::{
    score, strip_action_lines, ImportanceWeights, IssueAllocation, NegotiationState, ACCEPT_TOKEN, REJECT_TOKEN,
    WALK_AWAY_TOKEN,
};

/// When a standing offer is accepted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum AcceptRule {
    Never,
    Any,
    /// Accept when the offer scores at least the current aspiration, which falls linearly
    /// from `start` in round 1 to `end` in the last round.
    Aspiration {
        start: f64,
        end: f64,
    },
}

/// When the agent puts a deal on the table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum OfferRule {
    Never,
    /// Submit the agent's best possible deal on its first turn only.
    Open,
    /// Submit the cheapest deal that still meets the current aspiration, starting in round
    /// `first_round` and then every `every` rounds.
    Concede {
        first_round: u32,
        every: u32,
    },
}

/// A deterministic rule table: (round, standing offer, partner's last move) -> action + canned text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptedPolicy {
    pub name: String,
    pub accept: AcceptRule,
    pub offer: OfferRule,
    /// Walk away on the first turn in this round or later.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub walk_at_round: Option<u32>,
    /// Reject unacceptable offers instead of ignoring them when not countering.
    #[serde(default)]
    pub reject: bool,
    /// Relative preference for each strategy in free text, in [`IrpStrategy::ALL`] order.
    pub tone: [f64; 9],
    /// Probability of answering in the same IRP category as the partner's last turn.
    pub reciprocity: f64,
    /// Most sentences per message.
    pub max_sentences: usize,
}

impl ScriptedPolicy {
    fn base(name: &str) -> Self {
        ScriptedPolicy {
            name: name.into(),
            accept: AcceptRule::Never,
            offer: OfferRule::Never,
            walk_at_round: None,
            reject: false,
            tone: [1.0; 9],
            reciprocity: 0.3,
            max_sentences: 2,
        }
    }

    /// Accepts any standing offer, otherwise talks.
    pub fn accept_any() -> Self {
        ScriptedPolicy {
            accept: AcceptRule::Any,
            ..ScriptedPolicy::base("accept-any")
        }
    }

    /// Never submits, accepts, rejects or walks.
    pub fn message_only() -> Self {
        ScriptedPolicy::base("message-only")
    }

    pub fn walk_at_round(round: u32) -> Self {
        ScriptedPolicy {
            walk_at_round: Some(round),
            ..ScriptedPolicy::base(&format!("walk-at-round-{round}"))
        }
    }

    /// Opens with its best deal, then accepts anything.
    pub fn open_offer() -> Self {
        ScriptedPolicy {
            accept: AcceptRule::Any,
            offer: OfferRule::Open,
            ..ScriptedPolicy::base("open-offer")
        }
    }

    /// Linear concession from 90 to 40 points, countering every other round.
    pub fn concession() -> Self {
        ScriptedPolicy {
            accept: AcceptRule::Aspiration { start: 90.0, end: 40.0 },
            offer: OfferRule::Concede {
                first_round: 2,
                every: 2,
            },
            reject: true,
            ..ScriptedPolicy::base("concession")
        }
    }

    /// Derives aspiration, pacing, walk-away behavior and tone from a personality profile.
    ///
    /// Agreeable agents aim lower and concede sooner; neurotic, disagreeable agents walk out;
    /// extraverts talk more and propose earlier; conscientious agents stick to facts and process.
    pub fn for_profile(profile: &PersonalityProfile) -> Self {
        let v = |t: Trait| profile.get(t).value() as f64;
        let (ext, agr, con, neu, ope) = (
            v(Trait::Extraversion),
            v(Trait::Agreeableness),
            v(Trait::Conscientiousness),
            v(Trait::Neuroticism),
            v(Trait::Openness),
        );
        let start = (88.0 - 3.0 * agr + 1.5 * neu).clamp(60.0, 100.0);
        let end = (42.0 - 5.0 * agr + 2.0 * neu - 1.5 * ope).clamp(15.0, 75.0);
        let first_round = (3.0 - 0.5 * ext).round().clamp(1.0, 5.0) as u32;
        let every = if con >= 2.0 { 3 } else { 2 };
        let walk_at_round = (neu >= 2.0 && agr <= -2.0).then(|| (9.0 - 2.0 * (neu - agr - 4.0)).max(3.0) as u32);
        let e = |x: f64| (x / 3.0).exp();
        let mut tone = [0.0; 9];
        for s in IrpStrategy::ALL {
            tone[s.index()] = match s {
                IrpStrategy::Proposal => e(0.5 * ext + 0.4 * ope),
                IrpStrategy::Concession => e(0.8 * agr - 0.3 * neu),
                IrpStrategy::Interests => e(0.5 * agr + 0.3 * neu),
                IrpStrategy::PositiveExpectations => e(0.7 * agr + 0.4 * ext - 0.5 * neu),
                IrpStrategy::Facts => e(0.6 * con),
                IrpStrategy::Procedural => e(0.5 * con - 0.2 * ope),
                IrpStrategy::Power => e(0.9 * neu - 0.9 * agr) * 0.6,
                IrpStrategy::Rights => e(0.5 * neu - 0.4 * agr + 0.3 * con) * 0.8,
                IrpStrategy::Residual => 0.5,
            };
        }
        ScriptedPolicy {
            name: "persona".into(),
            accept: AcceptRule::Aspiration { start, end },
            offer: OfferRule::Concede { first_round, every },
            walk_at_round,
            reject: agr < 0.0,
            tone,
            reciprocity: (0.35 + 0.05 * agr).clamp(0.1, 0.6),
            max_sentences: if ext > 0.0 { 3 } else { 2 },
        }
    }

    /// Aspiration level in `round` (1-based) of a `max_rounds` negotiation; `None` without an aspiration rule.
    pub fn aspiration(&self, round: u32, max_rounds: u32) -> Option<f64> {
        match self.accept {
            AcceptRule::Aspiration { start, end } => {
                let span = max_rounds.saturating_sub(1).max(1) as f64;
                let progress = (round.saturating_sub(1) as f64 / span).min(1.0);
                Some(start - (start - end) * progress)
            }
            _ => None,
        }
    }

    fn accepts(&self, own_score: f64, round: u32, max_rounds: u32) -> bool {
        match self.accept {
            AcceptRule::Never => false,
            AcceptRule::Any => true,
            AcceptRule::Aspiration { .. } => own_score >= self.aspiration(round, max_rounds).unwrap_or(f64::INFINITY),
        }
    }

    fn offer_due(&self, state: &NegotiationState, role: Role) -> bool {
        match self.offer {
            OfferRule::Never => false,
            OfferRule::Open => !state.history().iter().any(|(r, _)| *r == role),
            OfferRule::Concede { first_round, every } => {
                let round = state.round();
                round >= first_round && (round - first_round).is_multiple_of(every.max(1))
            }
        }
    }
}

/// What the agent knows beyond the protocol state.
#[derive(Debug, Clone, Copy)]
pub struct ScriptedContext<'a> {
    pub weights: &'a ImportanceWeights,
    /// Free text of the partner's previous turn, if any.
    pub partner_text: Option<&'a str>,
    /// Dialogue seed; each turn draws from its own stream.
    pub seed: u64,
}

/// The cheapest deal (for this agent) that still scores at least `aspiration`; ties keep enumeration order.
pub fn concession_offer(weights: &ImportanceWeights, role: Role, aspiration: f64) -> IssueAllocation {
    IssueAllocation::all()
        .into_iter()
        .map(|a| (score(&a, weights, role), a))
        .filter(|(s, _)| *s >= aspiration)
        .min_by(|x, y| x.0.total_cmp(&y.0))
        .map(|(_, a)| a)
        .unwrap_or_else(|| IssueAllocation::most_favorable(role))
}

/// Produces the next turn for the party to move. The text always parses to the chosen action.
pub fn scripted_agent_respond(policy: &ScriptedPolicy, state: &NegotiationState, ctx: &ScriptedContext) -> String {
    debug_assert!(!state.is_terminal());
    let role = state.to_move();
    let round = state.round();
    let max_rounds = state.max_rounds();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    rng.set_stream(state.turns_taken() as u64);

    if policy.walk_at_round.is_some_and(|r| round >= r) {
        return WALK_AWAY_TOKEN.to_string();
    }
    if let Some(offer) = state.offer_for(role) {
        if policy.accepts(score(offer, ctx.weights, role), round, max_rounds) {
            return ACCEPT_TOKEN.to_string();
        }
    }
    if policy.offer_due(state, role) {
        let allocation = match policy.offer {
            OfferRule::Open => IssueAllocation::most_favorable(role),
            _ => concession_offer(ctx.weights, role, policy.aspiration(round, max_rounds).unwrap_or(100.0)),
        };
        let lead = pick_line(&mut rng, IrpStrategy::Proposal, role);
        return format!("{lead}\n{}", allocation.to_submission_line());
    }
    if policy.reject && state.offer_for(role).is_some() {
        let strategy = if policy.tone[IrpStrategy::Power.index()] > policy.tone[IrpStrategy::Rights.index()] {
            IrpStrategy::Power
        } else {
            IrpStrategy::Rights
        };
        return format!("{REJECT_TOKEN}\n{}", pick_line(&mut rng, strategy, role));
    }
    compose_message(policy, state, ctx, &mut rng)
}

fn compose_message(
    policy: &ScriptedPolicy,
    state: &NegotiationState,
    ctx: &ScriptedContext,
    rng: &mut ChaCha8Rng,
) -> String {
    let role = state.to_move();
    let mut lines: Vec<&'static str> = Vec::new();
    if state.turns_taken() == 0 {
        lines.push(pick_line(rng, IrpStrategy::Procedural, role));
    }
    let partner = ctx.partner_text.and_then(dominant_category);
    let n = rng.random_range(1..=policy.max_sentences.max(1));
    let mut guard = 0;
    while lines.len() < n + usize::from(state.turns_taken() == 0) && guard < 20 {
        guard += 1;
        let mirror = partner.is_some() && rng.random_bool(policy.reciprocity.clamp(0.0, 1.0));
        let strategy = match (mirror, partner) {
            (true, Some(c)) => draw_strategy(rng, &policy.tone, |s| s.category() == c),
            _ => draw_strategy(rng, &policy.tone, |_| true),
        };
        let line = pick_line(rng, strategy, role);
        if !lines.contains(&line) {
            lines.push(line);
        }
    }
    lines.join(" ")
}

fn draw_strategy(rng: &mut ChaCha8Rng, tone: &[f64; 9], admit: impl Fn(IrpStrategy) -> bool) -> IrpStrategy {
    let weights: Vec<f64> = IrpStrategy::ALL
        .iter()
        .map(|s| if admit(*s) { tone[s.index()].max(0.0) } else { 0.0 })
        .collect();
    let total: f64 = weights.iter().sum();
    if total <= 0.0 || !total.is_finite() {
        return IrpStrategy::Residual;
    }
    let mut x = rng.random::<f64>() * total;
    for (s, w) in IrpStrategy::ALL.iter().zip(&weights) {
        if x < *w {
            return *s;
        }
        x -= w;
    }
    *IrpStrategy::ALL
        .iter()
        .rev()
        .zip(weights.iter().rev())
        .find(|(_, w)| **w > 0.0)
        .expect("positive total")
        .0
}

/// Most frequent IRP category among the rule labels of `text`, ties going to the earlier category.
fn dominant_category(text: &str) -> Option<IrpCategory> {
    let mut counts = [0usize; 4];
    for seg in segment_utterance(&strip_action_lines(text)) {
        let c = classify_segment(&seg.text).category();
        counts[IrpCategory::ALL.iter().position(|x| *x == c).expect("known category")] += 1;
    }
    let best = *counts.iter().max()?;
    (best > 0).then(|| IrpCategory::ALL[counts.iter().position(|c| *c == best).expect("max exists")])
}

fn pick_line(rng: &mut ChaCha8Rng, strategy: IrpStrategy, role: Role) -> &'static str {
    let (shared, own) = lines_for(strategy, role);
    let i = rng.random_range(0..shared.len() + own.len());
    if i < shared.len() {
        shared[i]
    } else {
        own[i - shared.len()]
    }
}

/// Canned sentences per strategy: lines either party can say, then role-specific ones.
/// Each sentence is a single segment that the rule annotator labels with its strategy.
pub fn lines_for(strategy: IrpStrategy, role: Role) -> (&'static [&'static str], &'static [&'static str]) {
    use IrpStrategy::*;
    let buyer = role == Role::Buyer;
    match strategy {
        Procedural => (
            &[
                "Hello, let's talk about what happened.",
                "Let's discuss the refund first.",
                "Can we take this one issue at a time?",
                "Let me think about the next issue.",
                "Hi, I would like to go through each issue with you.",
            ],
            &[],
        ),
        Interests => (
            &[
                "This matters a lot to me.",
                "I am really disappointed with how this went.",
            ],
            if buyer {
                &[
                    "I need my money back because the jersey was a gift.",
                    "I am worried about wasting more money on this.",
                ]
            } else {
                &[
                    "My reputation as a seller is important to me.",
                    "A bad review is hurting my small business.",
                ]
            },
        ),
        PositiveExpectations => (
            &[
                "I am confident we can work this out.",
                "We both want to resolve this quickly.",
                "I think we can find a solution together.",
            ],
            &[],
        ),
        Proposal => (
            &[
                "Here is my offer.",
                "How does that sound to you?",
                "I propose the following deal.",
            ],
            if buyer {
                &[
                    "Would you accept a partial refund?",
                    "I can give you a better review if you pay me back.",
                ]
            } else {
                &[
                    "How about a partial refund?",
                    "I can give you a partial refund if you remove your review.",
                ]
            },
        ),
        Concession => (
            &[
                "You're right, I can accept part of that.",
                "On second thought, I'm willing to move a little.",
            ],
            if buyer {
                &["Ok fine, I will take back my review instead."]
            } else {
                &["Ok fine, I will send a partial refund instead."]
            },
        ),
        Facts => (
            &["The listing showed a different photo."],
            if buyer {
                &["The jersey I received was torn.", "The package arrived two weeks late."]
            } else {
                &[
                    "The item was shipped in perfect condition.",
                    "The tracking shows it was delivered on time.",
                ]
            },
        ),
        Rights => (
            &["That is not fair to me."],
            if buyer {
                &[
                    "I am entitled to a refund for a damaged item.",
                    "The platform guarantee covers this.",
                ]
            } else {
                &[
                    "According to the policy, returns require the original tags.",
                    "The return window has already closed.",
                ]
            },
        ),
        Power => (
            &["This is ridiculous.", "You are a liar."],
            if buyer {
                &[
                    "I will report you to the platform.",
                    "I will tell everyone about this scam.",
                ]
            } else {
                &["Your review is fake.", "I will report your account to the platform."]
            },
        ),
        Residual => (&["Thank you for your time.", "Okay.", "Understood."], &[]),
    }
}
