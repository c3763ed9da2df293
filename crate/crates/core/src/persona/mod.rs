//! Personality profiles, adjective persona prompts and issue importance.

mod distribution;
mod importance;
mod lexicon;

pub use distribution::{map_human_to_level, sample_profile, sample_profile_with, LevelMapping, TraitDistribution};
pub use importance::{
    assign_importance, raw_importance, AGREEABLENESS_APOLOGY_SLOPE, APOLOGY_BASE_WEIGHT, RANDOM_WEIGHT_RANGE,
    RAW_WEIGHT_FLOOR,
};
pub use lexicon::{
    build_persona_prompt, render_adjective, AdjectiveLexicon, AdjectivePair, PersonaPrompt, ADJECTIVES_PER_TRAIT,
};

use crate::corpus::Trait;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PersonaError {
    #[error("histogram for {0} has no positive weight or a negative weight")]
    DegenerateHistogram(Trait),
    #[error("human trait score {0} outside [1, 5]")]
    HumanScoreOutOfRange(f64),
    #[error("lexicon has {found} adjective pairs for {t}; at least 3 are needed")]
    TooFewPairs { t: Trait, found: usize },
    #[error("lexicon has an empty adjective for {0}")]
    EmptyAdjective(Trait),
    #[error("cannot parse persona data: {0}")]
    Parse(String),
}
