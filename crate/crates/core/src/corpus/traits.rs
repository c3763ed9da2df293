use std::fmt;

use serde::{Deserialize, Serialize};

/// Big Five trait, in the column order used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Trait {
    #[serde(rename = "EXT")]
    Extraversion,
    #[serde(rename = "AGR")]
    Agreeableness,
    #[serde(rename = "CON")]
    Conscientiousness,
    #[serde(rename = "NEU")]
    Neuroticism,
    #[serde(rename = "OPE")]
    Openness,
}

impl Trait {
    pub const ALL: [Trait; 5] = [
        Trait::Extraversion,
        Trait::Agreeableness,
        Trait::Conscientiousness,
        Trait::Neuroticism,
        Trait::Openness,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Trait::Extraversion => "EXT",
            Trait::Agreeableness => "AGR",
            Trait::Conscientiousness => "CON",
            Trait::Neuroticism => "NEU",
            Trait::Openness => "OPE",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_code(code: &str) -> Option<Trait> {
        Trait::ALL.into_iter().find(|t| t.code() == code)
    }
}

impl fmt::Display for Trait {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Low,
    High,
}

/// A point on the six-point polarity-degree scale: -3, -2, -1, +1, +2, +3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub struct TraitLevel(i8);

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("trait level must be one of -3, -2, -1, 1, 2, 3 (got {0})")]
pub struct InvalidTraitLevel(pub i64);

impl TraitLevel {
    pub const ALL: [TraitLevel; 6] = [
        TraitLevel(-3),
        TraitLevel(-2),
        TraitLevel(-1),
        TraitLevel(1),
        TraitLevel(2),
        TraitLevel(3),
    ];

    pub fn new(value: i8) -> Result<Self, InvalidTraitLevel> {
        match value {
            -3..=-1 | 1..=3 => Ok(TraitLevel(value)),
            other => Err(InvalidTraitLevel(other.into())),
        }
    }

    pub fn from_parts(polarity: Polarity, degree: u8) -> Result<Self, InvalidTraitLevel> {
        if !(1..=3).contains(&degree) {
            return Err(InvalidTraitLevel(degree.into()));
        }
        let d = degree as i8;
        Ok(TraitLevel(match polarity {
            Polarity::High => d,
            Polarity::Low => -d,
        }))
    }

    pub fn value(self) -> i8 {
        self.0
    }

    pub fn polarity(self) -> Polarity {
        if self.0 > 0 {
            Polarity::High
        } else {
            Polarity::Low
        }
    }

    /// Intensity 1 (slight), 2 (moderate) or 3 (strong).
    pub fn degree(self) -> u8 {
        self.0.unsigned_abs()
    }

    /// Index into [`TraitLevel::ALL`].
    pub fn index(self) -> usize {
        match self.0 {
            v if v < 0 => (v + 3) as usize,
            v => (v + 2) as usize,
        }
    }
}

impl TryFrom<i8> for TraitLevel {
    type Error = InvalidTraitLevel;
    fn try_from(value: i8) -> Result<Self, Self::Error> {
        TraitLevel::new(value)
    }
}

impl From<TraitLevel> for i8 {
    fn from(level: TraitLevel) -> i8 {
        level.0
    }
}

impl fmt::Display for TraitLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.0)
    }
}

/// Six-point levels for all five traits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PersonalityProfile {
    levels: [TraitLevel; 5],
}

impl PersonalityProfile {
    pub fn new(levels: [TraitLevel; 5]) -> Self {
        PersonalityProfile { levels }
    }

    pub fn uniform(level: TraitLevel) -> Self {
        PersonalityProfile { levels: [level; 5] }
    }

    pub fn from_values(values: [i8; 5]) -> Result<Self, InvalidTraitLevel> {
        let mut levels = [TraitLevel(1); 5];
        for (slot, v) in levels.iter_mut().zip(values) {
            *slot = TraitLevel::new(v)?;
        }
        Ok(PersonalityProfile { levels })
    }

    pub fn get(&self, t: Trait) -> TraitLevel {
        self.levels[t.index()]
    }

    pub fn set(&mut self, t: Trait, level: TraitLevel) {
        self.levels[t.index()] = level;
    }

    pub fn levels(&self) -> [TraitLevel; 5] {
        self.levels
    }
}

/// Human-corpus trait scores on the original 1-5 decimal scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HumanScores {
    scores: [f64; 5],
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("human trait score must lie in [1, 5] (got {0})")]
pub struct InvalidHumanScore(pub f64);

impl HumanScores {
    pub fn new(scores: [f64; 5]) -> Result<Self, InvalidHumanScore> {
        for s in scores {
            if !(1.0..=5.0).contains(&s) {
                return Err(InvalidHumanScore(s));
            }
        }
        Ok(HumanScores { scores })
    }

    pub fn get(&self, t: Trait) -> f64 {
        self.scores[t.index()]
    }

    pub fn scores(&self) -> [f64; 5] {
        self.scores
    }
}

/// Which trait representation a record carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraitScale {
    SixPoint,
    HumanDecimal,
}

/// A participant's traits, in whichever representation the source provides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TraitProfile {
    Levels(PersonalityProfile),
    Human(HumanScores),
}

impl TraitProfile {
    pub fn scale(&self) -> TraitScale {
        match self {
            TraitProfile::Levels(_) => TraitScale::SixPoint,
            TraitProfile::Human(_) => TraitScale::HumanDecimal,
        }
    }

    /// Numeric value used as a regression predictor.
    pub fn value(&self, t: Trait) -> f64 {
        match self {
            TraitProfile::Levels(p) => p.get(t).value() as f64,
            TraitProfile::Human(h) => h.get(t),
        }
    }

    pub fn values(&self) -> [f64; 5] {
        Trait::ALL.map(|t| self.value(t))
    }

    pub fn levels(&self) -> Option<&PersonalityProfile> {
        match self {
            TraitProfile::Levels(p) => Some(p),
            TraitProfile::Human(_) => None,
        }
    }
}

impl From<PersonalityProfile> for TraitProfile {
    fn from(p: PersonalityProfile) -> Self {
        TraitProfile::Levels(p)
    }
}

impl From<HumanScores> for TraitProfile {
    fn from(h: HumanScores) -> Self {
        TraitProfile::Human(h)
    }
}
