use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// One of the nine IRP conflict-resolution strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IrpStrategy {
    Proposal,
    Concession,
    Interests,
    PositiveExpectations,
    Facts,
    Procedural,
    Power,
    Rights,
    Residual,
}

/// Coarse grouping of the strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IrpCategory {
    Cooperative,
    Neutral,
    Competitive,
    Residual,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown IRP strategy label {0:?}")]
pub struct UnknownStrategy(pub String);

impl IrpStrategy {
    pub const ALL: [IrpStrategy; 9] = [
        IrpStrategy::Proposal,
        IrpStrategy::Concession,
        IrpStrategy::Interests,
        IrpStrategy::PositiveExpectations,
        IrpStrategy::Facts,
        IrpStrategy::Procedural,
        IrpStrategy::Power,
        IrpStrategy::Rights,
        IrpStrategy::Residual,
    ];

    pub const COUNT: usize = 9;

    /// Canonical, case-sensitive label used in corpus files.
    pub fn name(self) -> &'static str {
        match self {
            IrpStrategy::Proposal => "Proposal",
            IrpStrategy::Concession => "Concession",
            IrpStrategy::Interests => "Interests",
            IrpStrategy::PositiveExpectations => "PositiveExpectations",
            IrpStrategy::Facts => "Facts",
            IrpStrategy::Procedural => "Procedural",
            IrpStrategy::Power => "Power",
            IrpStrategy::Rights => "Rights",
            IrpStrategy::Residual => "Residual",
        }
    }

    /// Five-letter abbreviation used on figure axes ("Propo", "Conce", ...).
    pub fn short_name(self) -> &'static str {
        &self.name()[..5]
    }

    /// Position of the strategy in [`IrpStrategy::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn category(self) -> IrpCategory {
        category_of(self)
    }

    /// Accepts the canonical name or the five-letter abbreviation, both case-sensitive.
    pub fn parse_lenient(label: &str) -> Result<Self, UnknownStrategy> {
        IrpStrategy::ALL
            .into_iter()
            .find(|s| s.name() == label || s.short_name() == label)
            .ok_or_else(|| UnknownStrategy(label.to_string()))
    }
}

/// Maps a strategy to its category.
pub fn category_of(strategy: IrpStrategy) -> IrpCategory {
    use IrpStrategy::*;
    match strategy {
        Proposal | Concession | Interests | PositiveExpectations => IrpCategory::Cooperative,
        Facts | Procedural => IrpCategory::Neutral,
        Power | Rights => IrpCategory::Competitive,
        Residual => IrpCategory::Residual,
    }
}

impl IrpCategory {
    pub const ALL: [IrpCategory; 4] = [
        IrpCategory::Cooperative,
        IrpCategory::Neutral,
        IrpCategory::Competitive,
        IrpCategory::Residual,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IrpCategory::Cooperative => "Cooperative",
            IrpCategory::Neutral => "Neutral",
            IrpCategory::Competitive => "Competitive",
            IrpCategory::Residual => "Residual",
        }
    }

    pub fn members(self) -> impl Iterator<Item = IrpStrategy> {
        IrpStrategy::ALL.into_iter().filter(move |s| s.category() == self)
    }
}

impl fmt::Display for IrpStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for IrpCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IrpStrategy {
    type Err = UnknownStrategy;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        IrpStrategy::parse_lenient(s)
    }
}

impl Serialize for IrpStrategy {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for IrpStrategy {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let label = String::deserialize(deserializer)?;
        label.parse().map_err(serde::de::Error::custom)
    }
}
