use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::issues::{ApologyLevel, Issue, IssueAllocation, RefundLevel, ReviewLevel};

pub const SUBMISSION_TOKEN: &str = "SUBMISSION:";
pub const ACCEPT_TOKEN: &str = "ACCEPT-DEAL";
pub const REJECT_TOKEN: &str = "REJECT-DEAL";
pub const WALK_AWAY_TOKEN: &str = "WALK-AWAY";

/// What a turn does to the negotiation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    Message,
    Submit(IssueAllocation),
    Accept,
    Reject,
    WalkAway,
}

/// Action discriminant as stored in corpus records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActionKind {
    Message,
    Submit,
    Accept,
    Reject,
    WalkAway,
}

impl Action {
    pub fn kind(&self) -> ActionKind {
        match self {
            Action::Message => ActionKind::Message,
            Action::Submit(_) => ActionKind::Submit,
            Action::Accept => ActionKind::Accept,
            Action::Reject => ActionKind::Reject,
            Action::WalkAway => ActionKind::WalkAway,
        }
    }

    pub fn offer(&self) -> Option<&IssueAllocation> {
        match self {
            Action::Submit(offer) => Some(offer),
            _ => None,
        }
    }

    pub fn is_message(&self) -> bool {
        matches!(self, Action::Message)
    }
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ActionKind::Message => "message",
            ActionKind::Submit => "submit",
            ActionKind::Accept => "accept",
            ActionKind::Reject => "reject",
            ActionKind::WalkAway => "walk-away",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MalformedOffer {
    #[error("SUBMISSION is not followed by a JSON object: {0}")]
    NotAnObject(String),
    #[error("SUBMISSION is missing issue {0}")]
    MissingIssue(&'static str),
    #[error("SUBMISSION has unexpected key {0:?}")]
    UnexpectedKey(String),
    #[error("SUBMISSION has unrecognized value {value:?} for issue {issue}")]
    InvalidValue { issue: &'static str, value: String },
}

/// Characters stripped around a bare action token (markdown emphasis, quotes, trailing period).
const TOKEN_DECORATION: &[char] = &['*', '`', '"', '\'', '.', '!', '_'];

/// Reads the first action token in `text`, scanning line by line.
///
/// Lines starting with `SUBMISSION:` carry a five-key JSON object; `ACCEPT-DEAL`,
/// `REJECT-DEAL` and `WALK-AWAY` must stand alone on their line. Anything else is
/// a plain message. Tokens are case-sensitive.
pub fn parse_action(text: &str) -> Result<Action, MalformedOffer> {
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let trimmed = line.trim_start();
        if let Some(rest) = trimmed.strip_prefix(SUBMISSION_TOKEN) {
            // the object may continue onto following lines
            let start = offset + (line.len() - trimmed.len()) + SUBMISSION_TOKEN.len();
            debug_assert_eq!(&text[start..start + rest.len()], rest);
            return parse_offer(&text[start..]).map(Action::Submit);
        }
        let bare = line.trim().trim_matches(TOKEN_DECORATION).trim();
        match bare {
            ACCEPT_TOKEN => return Ok(Action::Accept),
            REJECT_TOKEN => return Ok(Action::Reject),
            WALK_AWAY_TOKEN => return Ok(Action::WalkAway),
            _ => {}
        }
        offset += line.len();
    }
    Ok(Action::Message)
}

/// Removes action-token lines, leaving the free-text part of a message.
pub fn strip_action_lines(text: &str) -> String {
    let mut kept = Vec::new();
    let mut lines = text.lines();
    while let Some(line) = lines.next() {
        let trimmed = line.trim_start();
        if trimmed.starts_with(SUBMISSION_TOKEN) {
            // drop the rest of the object when it spans several lines
            let mut depth = brace_depth(trimmed);
            while depth > 0 {
                match lines.next() {
                    Some(next) => depth += brace_depth(next),
                    None => break,
                }
            }
            continue;
        }
        let bare = line.trim().trim_matches(TOKEN_DECORATION).trim();
        if matches!(bare, ACCEPT_TOKEN | REJECT_TOKEN | WALK_AWAY_TOKEN) {
            continue;
        }
        kept.push(line);
    }
    kept.join("\n").trim().to_string()
}

fn brace_depth(line: &str) -> i32 {
    line.chars().fold(0, |d, c| match c {
        '{' => d + 1,
        '}' => d - 1,
        _ => d,
    })
}

fn parse_offer(rest: &str) -> Result<IssueAllocation, MalformedOffer> {
    let mut stream = serde_json::Deserializer::from_str(rest).into_iter::<Value>();
    let object = match stream.next() {
        Some(Ok(Value::Object(map))) => map,
        Some(Ok(other)) => return Err(MalformedOffer::NotAnObject(other.to_string())),
        Some(Err(e)) => return Err(MalformedOffer::NotAnObject(e.to_string())),
        None => return Err(MalformedOffer::NotAnObject(String::new())),
    };
    if let Some(key) = object.keys().find(|k| Issue::from_code(k).is_none()) {
        return Err(MalformedOffer::UnexpectedKey(key.clone()));
    }
    let value_of = |issue: Issue| -> Result<String, MalformedOffer> {
        match object.get(issue.code()) {
            None => Err(MalformedOffer::MissingIssue(issue.code())),
            Some(Value::String(s)) => Ok(normalize_value(s)),
            Some(other) => Err(MalformedOffer::InvalidValue {
                issue: issue.code(),
                value: other.to_string(),
            }),
        }
    };
    let invalid = |issue: Issue, value: String| MalformedOffer::InvalidValue {
        issue: issue.code(),
        value,
    };

    // check presence of every key before interpreting any value
    for issue in Issue::ALL {
        value_of(issue)?;
    }
    let refund = {
        let v = value_of(Issue::Refund)?;
        match v.as_str() {
            "none" | "no" | "no refund" | "0" => RefundLevel::None,
            "full" | "full refund" => RefundLevel::Full,
            "partial" | "partial refund" | "half" => RefundLevel::Partial,
            _ => return Err(invalid(Issue::Refund, v)),
        }
    };
    let review = |issue: Issue| -> Result<ReviewLevel, MalformedOffer> {
        let v = value_of(issue)?;
        if v.contains("not remove") || v.contains("keep") || v.contains("don't remove") {
            Ok(ReviewLevel::Keep)
        } else if v.contains("remove") {
            Ok(ReviewLevel::Remove)
        } else {
            Err(invalid(issue, v))
        }
    };
    let apology = |issue: Issue| -> Result<ApologyLevel, MalformedOffer> {
        let v = value_of(issue)?;
        if v.contains("not apologize") || v.contains("no apology") {
            Ok(ApologyLevel::NotApologize)
        } else if v.contains("apologize") || v == "apology" {
            Ok(ApologyLevel::Apologize)
        } else {
            Err(invalid(issue, v))
        }
    };
    Ok(IssueAllocation {
        refund,
        seller_review: review(Issue::SellerReview)?,
        buyer_review: review(Issue::BuyerReview)?,
        seller_apology: apology(Issue::SellerApology)?,
        buyer_apology: apology(Issue::BuyerApology)?,
    })
}

fn normalize_value(raw: &str) -> String {
    raw.trim()
        .to_lowercase()
        .replace(['-', '_'], " ")
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}
