use crate::corpus::Segment;

// Closed verb lexicon; anything else is judged by suffix.
const VERBS: &[&str] = &[
    "am",
    "is",
    "are",
    "was",
    "were",
    "be",
    "been",
    "being",
    "have",
    "has",
    "had",
    "do",
    "does",
    "did",
    "will",
    "would",
    "can",
    "could",
    "shall",
    "should",
    "may",
    "might",
    "must",
    "want",
    "need",
    "give",
    "gave",
    "take",
    "took",
    "remove",
    "keep",
    "kept",
    "apologize",
    "apologise",
    "refund",
    "think",
    "thought",
    "know",
    "knew",
    "say",
    "said",
    "get",
    "got",
    "make",
    "made",
    "go",
    "went",
    "see",
    "saw",
    "like",
    "hope",
    "agree",
    "accept",
    "offer",
    "understand",
    "understood",
    "believe",
    "feel",
    "felt",
    "send",
    "sent",
    "ship",
    "buy",
    "bought",
    "pay",
    "paid",
    "sell",
    "sold",
    "write",
    "wrote",
    "leave",
    "left",
    "call",
    "lie",
    "lied",
    "let",
    "put",
    "tell",
    "told",
    "come",
    "came",
    "find",
    "found",
    "try",
    "ask",
    "work",
    "help",
    "mean",
    "meant",
    "read",
    "expect",
    "wish",
    "return",
    "talk",
    "stand",
    "change",
    "deserve",
    "owe",
    "post",
    "delete",
    "drop",
    "consider",
    "fix",
    "report",
    "receive",
    "arrive",
    "look",
    "hear",
    "heard",
    "settle",
    "deal",
    "cancel",
];

// Contractions that carry a verb ("I'll", "won't", "it's", ...).
const VERB_CLITICS: &[&str] = &["'ll", "'re", "'m", "'ve", "'d", "'s", "n't"];

fn is_verb_like(token: &str) -> bool {
    let t = token.to_lowercase().replace('\u{2019}', "'");
    if t.is_empty() {
        return false;
    }
    if VERBS.contains(&t.as_str()) || VERB_CLITICS.iter().any(|c| t.len() > c.len() && t.ends_with(c)) {
        return true;
    }
    let n = t.chars().count();
    (n > 4 && (t.ends_with("ed") || t.ends_with("ing"))) || (n > 5 && (t.ends_with("ize") || t.ends_with("ise")))
}

/// True when `text` contains at least one verb-like word.
pub fn has_verb(text: &str) -> bool {
    text.split(|c: char| !(c.is_alphanumeric() || c == '\'' || c == '\u{2019}'))
        .any(is_verb_like)
}

/// Byte ranges of sentences: a run of `.`, `!` or `?` closes a sentence when followed by whitespace or the end.
fn sentence_spans(text: &str) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if !matches!(c, '.' | '!' | '?') {
            continue;
        }
        let mut end = i + c.len_utf8();
        while let Some(&(j, d)) = chars.peek() {
            if matches!(d, '.' | '!' | '?') {
                end = j + d.len_utf8();
                chars.next();
            } else {
                break;
            }
        }
        let boundary = match chars.peek() {
            None => true,
            Some(&(_, d)) => d.is_whitespace(),
        };
        if boundary {
            spans.push((start, end));
            start = end;
        }
    }
    if start < text.len() {
        spans.push((start, text.len()));
    }
    spans
}

/// Candidate clause boundaries inside a sentence: the split offset within `sentence`.
fn clause_boundaries(sentence: &str) -> Vec<usize> {
    let lower = sentence.to_ascii_lowercase();
    let bytes = lower.as_bytes();
    let mut cuts = Vec::new();
    for (i, &b) in bytes.iter().enumerate() {
        if b == b';' {
            // keep the semicolon with the left clause
            cuts.push(i + 1);
            continue;
        }
        if !b.is_ascii_whitespace() || i + 1 >= bytes.len() {
            continue;
        }
        let rest = &lower[i + 1..];
        for word in ["and", "but", "-"] {
            if rest.starts_with(word) && rest[word.len()..].starts_with(|c: char| c.is_whitespace()) {
                // the connector starts the right clause
                cuts.push(i + 1);
            }
        }
    }
    cuts
}

/// Splits an utterance into clause-level segments.
///
/// Splits at sentence terminators, then at `and`, `but`, ` - ` and `;` when both the clause so far and the rest of
/// the sentence contain a verb-like word. Whitespace around segments is trimmed; nothing else is lost or reordered.
pub fn segment_utterance(text: &str) -> Vec<Segment> {
    let mut out = Vec::new();
    for (s, e) in sentence_spans(text) {
        let sentence = &text[s..e];
        let mut start = 0;
        for cut in clause_boundaries(sentence) {
            if cut <= start || cut >= sentence.len() {
                continue;
            }
            if has_verb(&sentence[start..cut]) && has_verb(&sentence[cut..]) {
                push_trimmed(&mut out, &sentence[start..cut]);
                start = cut;
            }
        }
        push_trimmed(&mut out, &sentence[start..]);
    }
    out
}

fn push_trimmed(out: &mut Vec<Segment>, piece: &str) {
    let piece = piece.trim();
    if !piece.is_empty() {
        out.push(Segment::new(piece));
    }
}
