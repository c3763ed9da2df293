use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::Role;

/// The five negotiated issues of the jersey dispute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Issue {
    Refund,
    SellerReview,
    BuyerReview,
    SellerApology,
    BuyerApology,
}

impl Issue {
    pub const ALL: [Issue; 5] = [
        Issue::Refund,
        Issue::SellerReview,
        Issue::BuyerReview,
        Issue::SellerApology,
        Issue::BuyerApology,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Issue::Refund => "REF",
            Issue::SellerReview => "SNR",
            Issue::BuyerReview => "BNR",
            Issue::SellerApology => "SAP",
            Issue::BuyerApology => "BAP",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Issue::Refund => "Refund",
            Issue::SellerReview => "Seller Negative Review",
            Issue::BuyerReview => "Buyer Negative Review",
            Issue::SellerApology => "Seller Apology",
            Issue::BuyerApology => "Buyer Apology",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_code(code: &str) -> Option<Issue> {
        Issue::ALL.into_iter().find(|i| i.code() == code)
    }

    /// The apology issue whose apology `role` receives.
    pub fn apology_received_by(role: Role) -> Issue {
        match role {
            Role::Buyer => Issue::SellerApology,
            Role::Seller => Issue::BuyerApology,
        }
    }
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RefundLevel {
    Full,
    Partial,
    None,
}

/// Whether a negative review is taken down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReviewLevel {
    Remove,
    Keep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ApologyLevel {
    Apologize,
    NotApologize,
}

/// A complete deal: one level for each of the five issues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IssueAllocation {
    #[serde(rename = "REF")]
    pub refund: RefundLevel,
    #[serde(rename = "SNR")]
    pub seller_review: ReviewLevel,
    #[serde(rename = "BNR")]
    pub buyer_review: ReviewLevel,
    #[serde(rename = "SAP")]
    pub seller_apology: ApologyLevel,
    #[serde(rename = "BAP")]
    pub buyer_apology: ApologyLevel,
}

impl IssueAllocation {
    /// Every one of the 48 possible allocations, in a fixed order.
    pub fn all() -> Vec<IssueAllocation> {
        let mut out = Vec::with_capacity(48);
        for refund in [RefundLevel::Full, RefundLevel::Partial, RefundLevel::None] {
            for seller_review in [ReviewLevel::Remove, ReviewLevel::Keep] {
                for buyer_review in [ReviewLevel::Remove, ReviewLevel::Keep] {
                    for seller_apology in [ApologyLevel::Apologize, ApologyLevel::NotApologize] {
                        for buyer_apology in [ApologyLevel::Apologize, ApologyLevel::NotApologize] {
                            out.push(IssueAllocation {
                                refund,
                                seller_review,
                                buyer_review,
                                seller_apology,
                                buyer_apology,
                            });
                        }
                    }
                }
            }
        }
        out
    }

    /// The allocation that gives `role` full credit on every issue.
    pub fn most_favorable(role: Role) -> IssueAllocation {
        match role {
            Role::Buyer => IssueAllocation {
                refund: RefundLevel::Full,
                seller_review: ReviewLevel::Remove,
                buyer_review: ReviewLevel::Keep,
                seller_apology: ApologyLevel::Apologize,
                buyer_apology: ApologyLevel::NotApologize,
            },
            Role::Seller => IssueAllocation {
                refund: RefundLevel::None,
                seller_review: ReviewLevel::Keep,
                buyer_review: ReviewLevel::Remove,
                seller_apology: ApologyLevel::NotApologize,
                buyer_apology: ApologyLevel::Apologize,
            },
        }
    }

    /// Credit in [0, 1] that `role` earns on `issue` under this allocation.
    pub fn credit(&self, role: Role, issue: Issue) -> f64 {
        let buyer_credit = match issue {
            Issue::Refund => match self.refund {
                RefundLevel::Full => 1.0,
                RefundLevel::Partial => 0.5,
                RefundLevel::None => 0.0,
            },
            Issue::SellerReview => bool_credit(self.seller_review == ReviewLevel::Remove),
            Issue::BuyerReview => bool_credit(self.buyer_review == ReviewLevel::Keep),
            Issue::SellerApology => bool_credit(self.seller_apology == ApologyLevel::Apologize),
            Issue::BuyerApology => bool_credit(self.buyer_apology == ApologyLevel::NotApologize),
        };
        match role {
            Role::Buyer => buyer_credit,
            Role::Seller => 1.0 - buyer_credit,
        }
    }

    /// Human-readable value of one issue, as used in SUBMISSION lines.
    pub fn value_label(&self, issue: Issue) -> &'static str {
        match issue {
            Issue::Refund => match self.refund {
                RefundLevel::Full => "full",
                RefundLevel::Partial => "partial",
                RefundLevel::None => "None",
            },
            Issue::SellerReview => review_label(self.seller_review),
            Issue::BuyerReview => review_label(self.buyer_review),
            Issue::SellerApology => apology_label(self.seller_apology),
            Issue::BuyerApology => apology_label(self.buyer_apology),
        }
    }

    /// Renders the offer as a `SUBMISSION:` line.
    pub fn to_submission_line(&self) -> String {
        let body: Vec<String> = Issue::ALL
            .iter()
            .map(|i| format!("\"{}\": \"{}\"", i.code(), self.value_label(*i)))
            .collect();
        format!("SUBMISSION: {{{}}}", body.join(", "))
    }
}

fn bool_credit(favorable: bool) -> f64 {
    if favorable {
        1.0
    } else {
        0.0
    }
}

fn review_label(level: ReviewLevel) -> &'static str {
    match level {
        ReviewLevel::Remove => "remove",
        ReviewLevel::Keep => "keep",
    }
}

fn apology_label(level: ApologyLevel) -> &'static str {
    match level {
        ApologyLevel::Apologize => "apologize",
        ApologyLevel::NotApologize => "not apologize",
    }
}

const WEIGHT_SUM: f64 = 100.0;
const WEIGHT_SUM_TOLERANCE: f64 = 1e-6;

/// Per-issue importance, normalized so the five weights sum to 100.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWeights", into = "RawWeights")]
pub struct ImportanceWeights {
    weights: [f64; 5],
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WeightsError {
    #[error("importance weights must be finite and nonnegative (issue {issue} = {value})")]
    Negative { issue: Issue, value: f64 },
    #[error("importance weights must sum to 100 (sum = {0})")]
    NotNormalized(f64),
    #[error("importance weights sum to zero and cannot be normalized")]
    ZeroTotal,
}

impl ImportanceWeights {
    /// Validates already-normalized weights.
    pub fn new(weights: [f64; 5]) -> Result<Self, WeightsError> {
        check_nonnegative(&weights)?;
        let sum: f64 = weights.iter().sum();
        if (sum - WEIGHT_SUM).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(WeightsError::NotNormalized(sum));
        }
        Ok(ImportanceWeights { weights })
    }

    /// Rescales nonnegative raw weights to sum to 100.
    pub fn normalized(raw: [f64; 5]) -> Result<Self, WeightsError> {
        check_nonnegative(&raw)?;
        let sum: f64 = raw.iter().sum();
        if sum <= 0.0 {
            return Err(WeightsError::ZeroTotal);
        }
        Ok(ImportanceWeights {
            weights: raw.map(|w| w * WEIGHT_SUM / sum),
        })
    }

    pub fn equal() -> Self {
        ImportanceWeights { weights: [20.0; 5] }
    }

    pub fn get(&self, issue: Issue) -> f64 {
        self.weights[issue.index()]
    }

    pub fn as_array(&self) -> [f64; 5] {
        self.weights
    }
}

fn check_nonnegative(weights: &[f64; 5]) -> Result<(), WeightsError> {
    for (issue, &value) in Issue::ALL.iter().zip(weights) {
        if !value.is_finite() || value < 0.0 {
            return Err(WeightsError::Negative { issue: *issue, value });
        }
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWeights {
    #[serde(rename = "REF")]
    refund: f64,
    #[serde(rename = "SNR")]
    seller_review: f64,
    #[serde(rename = "BNR")]
    buyer_review: f64,
    #[serde(rename = "SAP")]
    seller_apology: f64,
    #[serde(rename = "BAP")]
    buyer_apology: f64,
}

impl TryFrom<RawWeights> for ImportanceWeights {
    type Error = WeightsError;
    fn try_from(r: RawWeights) -> Result<Self, Self::Error> {
        ImportanceWeights::new([
            r.refund,
            r.seller_review,
            r.buyer_review,
            r.seller_apology,
            r.buyer_apology,
        ])
    }
}

impl From<ImportanceWeights> for RawWeights {
    fn from(w: ImportanceWeights) -> Self {
        let [refund, seller_review, buyer_review, seller_apology, buyer_apology] = w.weights;
        RawWeights {
            refund,
            seller_review,
            buyer_review,
            seller_apology,
            buyer_apology,
        }
    }
}

/// Payoff in [0, 100]: the inner product of per-issue credit and importance.
///
/// The weights type only admits vectors summing to 100, so the result is
/// bounded by construction (up to floating-point rounding).
pub fn score(allocation: &IssueAllocation, weights: &ImportanceWeights, role: Role) -> f64 {
    Issue::ALL
        .iter()
        .map(|&issue| weights.get(issue) * allocation.credit(role, issue))
        .sum()
}
