use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{PersonalityProfile, Role, Trait};
use crate::negotiation::{ImportanceWeights, Issue};

/// Agreeableness slope applied to the importance of receiving an apology.
pub const AGREEABLENESS_APOLOGY_SLOPE: f64 = 2.13;
/// Raw weight of the received-apology issue at a (hypothetical) agreeableness of zero.
pub const APOLOGY_BASE_WEIGHT: f64 = 20.0;
/// Raw weights of the other issues are drawn uniformly from this range.
pub const RANDOM_WEIGHT_RANGE: (f64, f64) = (5.0, 40.0);
pub const RAW_WEIGHT_FLOOR: f64 = 1.0;

/// Unnormalized issue weights, in [`Issue::ALL`] order.
pub fn raw_importance(profile: &PersonalityProfile, role: Role, seed: u64) -> [f64; 5] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let apology = Issue::apology_received_by(role);
    let agreeableness = profile.get(Trait::Agreeableness).value() as f64;
    Issue::ALL.map(|issue| {
        let raw = if issue == apology {
            APOLOGY_BASE_WEIGHT + AGREEABLENESS_APOLOGY_SLOPE * agreeableness
        } else {
            rng.random_range(RANDOM_WEIGHT_RANGE.0..=RANDOM_WEIGHT_RANGE.1)
        };
        raw.max(RAW_WEIGHT_FLOOR)
    })
}

/// Issue importance for one party: the apology it receives scales with agreeableness,
/// the other issues are random; the result sums to 100.
pub fn assign_importance(profile: &PersonalityProfile, role: Role, seed: u64) -> ImportanceWeights {
    ImportanceWeights::normalized(raw_importance(profile, role, seed)).expect("raw weights are floored at 1")
}
