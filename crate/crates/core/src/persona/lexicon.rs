use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::PersonaError;
use crate::corpus::{PersonalityProfile, Polarity, Trait, TraitLevel};

pub const ADJECTIVES_PER_TRAIT: usize = 3;

/// A bipolar adjective marker: the low-pole word and the high-pole word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjectivePair {
    pub low: String,
    pub high: String,
}

/// Bipolar adjective markers for each trait.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjectiveLexicon {
    pairs: [Vec<AdjectivePair>; 5],
}

impl AdjectiveLexicon {
    pub fn new(pairs: [Vec<AdjectivePair>; 5]) -> Result<Self, PersonaError> {
        for (t, list) in Trait::ALL.iter().zip(&pairs) {
            if list.len() < ADJECTIVES_PER_TRAIT {
                return Err(PersonaError::TooFewPairs {
                    t: *t,
                    found: list.len(),
                });
            }
            if list.iter().any(|p| p.low.trim().is_empty() || p.high.trim().is_empty()) {
                return Err(PersonaError::EmptyAdjective(*t));
            }
        }
        Ok(AdjectiveLexicon { pairs })
    }

    /// The bundled 70-pair lexicon (14 pairs per trait).
    pub fn builtin() -> Self {
        AdjectiveLexicon::from_json_str(include_str!("../../data/lexicon.json")).expect("bundled lexicon is valid")
    }

    /// Reads `{"EXT": [["low", "high"], ...], ...}`.
    pub fn from_json_str(text: &str) -> Result<Self, PersonaError> {
        let raw: BTreeMap<String, Vec<(String, String)>> =
            serde_json::from_str(text).map_err(|e| PersonaError::Parse(e.to_string()))?;
        let mut pairs: [Vec<AdjectivePair>; 5] = Default::default();
        for (key, list) in raw {
            let t = Trait::from_code(&key).ok_or_else(|| PersonaError::Parse(format!("unknown trait {key:?}")))?;
            pairs[t.index()] = list
                .into_iter()
                .map(|(low, high)| AdjectivePair { low, high })
                .collect();
        }
        AdjectiveLexicon::new(pairs)
    }

    pub fn pairs(&self, t: Trait) -> &[AdjectivePair] {
        &self.pairs[t.index()]
    }

    pub fn total_pairs(&self) -> usize {
        self.pairs.iter().map(Vec::len).sum()
    }
}

/// Persona description plus the adjectives it was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PersonaPrompt {
    pub text: String,
    pub adjectives: Vec<String>,
}

/// Surface form of an adjective at a trait level: "very" for degree 3, "a bit" for degree 1.
pub fn render_adjective(pair: &AdjectivePair, level: TraitLevel) -> String {
    let word = match level.polarity() {
        Polarity::High => &pair.high,
        Polarity::Low => &pair.low,
    };
    match level.degree() {
        3 => format!("very {word}"),
        1 => format!("a bit {word}"),
        _ => word.clone(),
    }
}

/// Builds a 15-adjective persona description (three seeded pairs per trait).
pub fn build_persona_prompt(
    profile: &PersonalityProfile,
    lexicon: &AdjectiveLexicon,
    seed: u64,
) -> Result<PersonaPrompt, PersonaError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adjectives = Vec::with_capacity(5 * ADJECTIVES_PER_TRAIT);
    for t in Trait::ALL {
        let pairs = lexicon.pairs(t);
        if pairs.len() < ADJECTIVES_PER_TRAIT {
            return Err(PersonaError::TooFewPairs { t, found: pairs.len() });
        }
        for i in rand::seq::index::sample(&mut rng, pairs.len(), ADJECTIVES_PER_TRAIT) {
            adjectives.push(render_adjective(&pairs[i], profile.get(t)));
        }
    }
    let (last, rest) = adjectives.split_last().expect("fifteen adjectives");
    let text = format!("You are {}, and {}.", rest.join(", "), last);
    Ok(PersonaPrompt { text, adjectives })
}
