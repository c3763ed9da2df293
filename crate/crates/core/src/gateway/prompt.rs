use serde::{Deserialize, Serialize};

use crate::corpus::Role;
use crate::negotiation::{ImportanceWeights, Issue, ACCEPT_TOKEN, REJECT_TOKEN, SUBMISSION_TOKEN, WALK_AWAY_TOKEN};
use crate::persona::PersonaPrompt;

/// Background story told to each side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub buyer: String,
    pub seller: String,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            buyer: "You ordered a signed replica basketball jersey from an online shop as a birthday present. \
                    It came late, the lettering was peeling and the size was not the one you chose. When you \
                    asked for your money back the seller was slow and unhelpful, so you posted a one-star \
                    review. The seller has now left a negative review on your buyer profile as well."
                .into(),
            seller: "You run a small online shop selling sports memorabilia. A customer bought a signed replica \
                     jersey, claims it arrived damaged and in the wrong size, and demanded a full refund. Your \
                     records show the correct size was shipped. The customer then posted a one-star review \
                     that is costing you sales, so you left a negative review on their buyer profile."
                .into(),
        }
    }
}

impl Scenario {
    pub fn story(&self, role: Role) -> &str {
        match role {
            Role::Buyer => &self.buyer,
            Role::Seller => &self.seller,
        }
    }
}

fn issue_options(issue: Issue) -> &'static str {
    match issue {
        Issue::Refund => "\"full\", \"partial\" or \"None\"",
        Issue::SellerReview | Issue::BuyerReview => "\"remove\" or \"keep\"",
        Issue::SellerApology | Issue::BuyerApology => "\"apologize\" or \"not apologize\"",
    }
}

fn issue_description(issue: Issue) -> &'static str {
    match issue {
        Issue::Refund => "how much of the purchase price the seller pays back",
        Issue::SellerReview => "whether the buyer takes down the negative review of the seller",
        Issue::BuyerReview => "whether the seller takes down the negative review of the buyer",
        Issue::SellerApology => "whether the seller apologizes to the buyer",
        Issue::BuyerApology => "whether the buyer apologizes to the seller",
    }
}

/// System prompt for one negotiating agent: persona, story, rules, issues, point values and action tokens.
pub fn build_agent_prompt(
    role: Role,
    persona: &PersonaPrompt,
    scenario: &Scenario,
    weights: &ImportanceWeights,
    max_rounds: u32,
) -> String {
    let partner = role.partner();
    let mut out = String::new();
    out.push_str("# Personality\n");
    out.push_str(&persona.text);
    out.push_str(" Let these traits shape how you talk and decide throughout.\n\n");

    out.push_str("# Story\n");
    out.push_str(scenario.story(role));
    out.push_str("\n\n# Instructions\n");
    out.push_str(&format!(
        "You are the {role}. You are chatting with the {partner} to settle this dispute. Write short, natural \
         chat messages in the first person. Never mention that you are an AI or that you were given a \
         personality or point values.\n\n"
    ));

    out.push_str("# Issues to resolve\n");
    for (i, issue) in Issue::ALL.iter().enumerate() {
        out.push_str(&format!(
            "{}. {} ({}): {}; options {}.\n",
            i + 1,
            issue.label(),
            issue.code(),
            issue_description(*issue),
            issue_options(*issue)
        ));
    }

    out.push_str("\n# Issues Importance\n");
    out.push_str("Points you earn when an issue is settled fully in your favor (a partial refund earns half):\n");
    for issue in Issue::ALL {
        out.push_str(&format!(
            "- {} ({}): {:.2}\n",
            issue.label(),
            issue.code(),
            weights.get(issue)
        ));
    }
    out.push_str("Aim for as many points as you can, but remember that no deal earns you nothing.\n\n");

    out.push_str("# Strategy & Behavior Rules\n");
    out.push_str(
        "- Talk about several issues together; trading one for another often helps both sides.\n\
         - Keep your point values private.\n\
         - Put a complete deal on the table once you see one you could live with.\n\
         - React to what the other side actually says.\n\n",
    );

    out.push_str("# Actions\n");
    out.push_str(&format!(
        "Besides ordinary messages you can use these tokens, each on its own line:\n\
         - {SUBMISSION_TOKEN} followed by a JSON object with all five issue codes, for example\n  {}\n\
         - {ACCEPT_TOKEN} to accept the deal the {partner} submitted last.\n\
         - {REJECT_TOKEN} to turn down the deal the {partner} submitted last.\n\
         - {WALK_AWAY_TOKEN} to end the negotiation without a deal.\n\
         The negotiation ends with no agreement after {max_rounds} rounds.\n",
        crate::negotiation::IssueAllocation::most_favorable(role).to_submission_line()
    ));
    out
}

/// First user message for the opening agent.
pub const OPENING_CUE: &str = "The chat has started. Send your first message.";

/// Follow-up after an unreadable SUBMISSION line.
pub fn malformed_offer_cue(error: &str) -> String {
    format!(
        "Your {SUBMISSION_TOKEN} line could not be read ({error}). Send your message again with a \
         {SUBMISSION_TOKEN} line holding a JSON object with exactly the keys REF, SNR, BNR, SAP and BAP."
    )
}
