use crate::corpus::{Dialogue, IrpStrategy};

// Cue phrases, matched against lowercase word tokens. A trailing `*` matches any word with that prefix.
const POWER: &[&str] = &[
    "liar",
    "lie",
    "lied",
    "lying",
    "lies",
    "crook",
    "scam*",
    "fraud*",
    "cheat*",
    "thief",
    "steal*",
    "stole",
    "dishonest",
    "report you",
    "i will report",
    "i'll report",
    "lawyer",
    "sue",
    "court",
    "negative things",
    "warn others",
    "warn everyone",
    "tell everyone",
    "expose",
    "or else",
    "regret",
    "threat*",
    "ruin",
    "chargeback",
    "my bank",
    "last chance",
    "ashamed",
    "shame on",
    "pathetic",
    "ridiculous",
    "insult*",
    "fake",
];
const RIGHTS: &[&str] = &[
    "policy",
    "policies",
    "according to",
    "fair",
    "unfair",
    "fairness",
    "rule",
    "rules",
    "terms",
    "entitled",
    "my right",
    "your right",
    "rights",
    "law",
    "laws",
    "legal",
    "illegal",
    "guarantee*",
    "warranty",
    "obligat*",
    "supposed to",
    "return window",
    "protection",
    "standard practice",
    "by law",
];
const GREETING: &[&str] = &[
    "hello",
    "hi",
    "hey",
    "greetings",
    "good morning",
    "good afternoon",
    "good evening",
    "dear",
];
const PROCESS: &[&str] = &[
    "talk about",
    "discuss",
    "let's start",
    "let us start",
    "one at a time",
    "one issue",
    "next issue",
    "move on",
    "step by step",
    "go through",
    "each issue",
    "agenda",
    "let me think",
    "first let's",
];
const CONCESSION: &[&str] = &[
    "ok fine",
    "okay fine",
    "fine i will",
    "fine i'll",
    "instead",
    "you're right",
    "you are right",
    "i can agree",
    "i agree to",
    "i'll agree",
    "i will agree",
    "i accept",
    "i'll accept",
    "i can accept",
    "i'm willing to",
    "i am willing to",
    "i'll go with",
    "i can live with",
    "changed my mind",
    "on second thought",
    "meet you halfway",
    "we agree on",
    "i'll take back",
    "i will take back",
];
const PROPOSAL: &[&str] = &[
    "offer",
    "offers",
    "propose*",
    "proposal",
    "how about",
    "what if",
    "how does that sound",
    "would you accept",
    "i can give",
    "i'll give",
    "i will give",
    "i could give",
    "if you",
    "in exchange",
    "in return",
    "deal",
    "settle for",
    "compromise",
    "suggest*",
    "counteroffer",
    "half the money",
];
const POSITIVE: &[&str] = &[
    "both",
    "together",
    "work this out",
    "work it out",
    "common",
    "same page",
    "mutual*",
    "win win",
    "we all",
    "each other",
    "confident",
    "resolve this",
    "conclude",
    "good outcome",
    "find a solution",
    "we can get there",
];
const INTERESTS: &[&str] = &[
    "want*",
    "need*",
    "concern*",
    "because",
    "important",
    "understand",
    "worried",
    "worry",
    "care",
    "matters",
    "hope",
    "frustrat*",
    "upset",
    "disappoint*",
    "feel*",
    "reputation",
    "gift",
    "expected",
    "hurting",
    "costing",
];
const RESIDUAL: &[&str] = &[
    "sorry",
    "apologies",
    "apologize for",
    "thank*",
    "thanks",
    "ok",
    "okay",
    "sure",
    "alright",
    "yes",
    "no",
    "great",
    "fine",
    "sounds good",
    "got it",
    "understood",
    "appreciate*",
];
const FACTS: &[&str] = &[
    "product",
    "item",
    "jersey",
    "shirt",
    "listing",
    "order",
    "package",
    "box",
    "shipping",
    "shipped",
    "delivered",
    "delivery",
    "arrived",
    "website",
    "description",
    "described",
    "photo*",
    "picture*",
    "bought",
    "purchased",
    "paid",
    "sent",
    "received",
    "size",
    "condition",
    "damaged",
    "broken",
    "torn",
    "tracking",
    "tag",
    "price",
    "processed",
    "signature",
    "replica",
    "authentic",
    "marked",
    "used",
];

fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .replace('\u{2019}', "'")
        .split(|c: char| !(c.is_alphanumeric() || c == '\''))
        .filter(|t| !t.is_empty())
        .map(|t| t.trim_matches('\'').to_string())
        .filter(|t| !t.is_empty())
        .collect()
}

fn word_matches(pattern: &str, token: &str) -> bool {
    match pattern.strip_suffix('*') {
        Some(prefix) => token.starts_with(prefix),
        None => pattern == token,
    }
}

fn contains_cue(tokens: &[String], cues: &[&str]) -> bool {
    cues.iter().any(|cue| {
        let words: Vec<&str> = cue.split(' ').collect();
        tokens
            .windows(words.len())
            .any(|w| w.iter().zip(&words).all(|(t, p)| word_matches(p, t)))
    })
}

/// Keyword classifier for one segment. Always returns a label.
///
/// Cues are checked in priority order: Power, Rights, greetings and process talk (Procedural), Concession,
/// Proposal, Positive Expectations, Interests, courtesy markers (Residual), situation talk or questions (Facts).
/// Anything else is Residual.
pub fn classify_segment(text: &str) -> IrpStrategy {
    let tokens = tokenize(text);
    let has = |cues: &[&str]| contains_cue(&tokens, cues);
    if has(POWER) {
        IrpStrategy::Power
    } else if has(RIGHTS) {
        IrpStrategy::Rights
    } else if has(GREETING) || has(PROCESS) {
        IrpStrategy::Procedural
    } else if has(CONCESSION) {
        IrpStrategy::Concession
    } else if has(PROPOSAL) {
        IrpStrategy::Proposal
    } else if has(POSITIVE) {
        IrpStrategy::PositiveExpectations
    } else if has(INTERESTS) {
        IrpStrategy::Interests
    } else if has(RESIDUAL) {
        IrpStrategy::Residual
    } else if has(FACTS) || text.trim_end().ends_with('?') {
        IrpStrategy::Facts
    } else {
        IrpStrategy::Residual
    }
}

/// Labels every segment with [`classify_segment`]; existing labels are overwritten.
pub fn annotate_rules(dialogue: &Dialogue) -> Dialogue {
    let mut out = dialogue.clone();
    for turn in &mut out.turns {
        for seg in &mut turn.segments {
            seg.strategy = Some(classify_segment(&seg.text));
        }
    }
    out
}
