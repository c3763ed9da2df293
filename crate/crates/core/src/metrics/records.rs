use super::strategic::{deescalation_ratio, escalation_ratio, irp_ratio, irp_reciprocity, strategy_counts};
use super::MetricsError;
use crate::corpus::{Dialogue, IrpCategory, IrpStrategy, Role, Source, Trait, TraitLevel, TraitProfile, TraitScale};

/// Missing-value marker used in exported tables.
pub const MISSING: &str = "NA";

/// One row of the analysis table: a participant in a dialogue with its outcome and behavior measures.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeakerRecord {
    pub dialogue_id: String,
    pub source: Source,
    pub role: Role,
    /// Effect code of the role: Buyer -1, Seller +1.
    pub position: i8,
    pub self_traits: TraitProfile,
    pub partner_traits: TraitProfile,
    pub score: Option<f64>,
    pub accept: u8,
    pub not_walk_away: u8,
    pub coop_ratio: Option<f64>,
    pub comp_ratio: Option<f64>,
    pub coop_recip: Option<f64>,
    pub comp_recip: Option<f64>,
    pub escalation: Option<f64>,
    pub deescalation: Option<f64>,
    pub strategy_counts: [u64; IrpStrategy::COUNT],
}

/// Dependent variables in table order.
pub const DV_NAMES: [&str; 9] = [
    "score",
    "accept",
    "not_walk_away",
    "coop_ratio",
    "comp_ratio",
    "coop_recip",
    "comp_recip",
    "escalation",
    "deescalation",
];

pub fn position_code(role: Role) -> i8 {
    match role {
        Role::Buyer => -1,
        Role::Seller => 1,
    }
}

impl SpeakerRecord {
    /// Value of a dependent variable by its [`DV_NAMES`] name.
    pub fn dv(&self, name: &str) -> Option<f64> {
        match name {
            "score" => self.score,
            "accept" => Some(self.accept as f64),
            "not_walk_away" => Some(self.not_walk_away as f64),
            "coop_ratio" => self.coop_ratio,
            "comp_ratio" => self.comp_ratio,
            "coop_recip" => self.coop_recip,
            "comp_recip" => self.comp_recip,
            "escalation" => self.escalation,
            "deescalation" => self.deescalation,
            _ => None,
        }
    }

    pub fn csv_header() -> Vec<String> {
        let mut h: Vec<String> = ["dialogue_id", "source", "role", "position", "trait_scale"]
            .map(String::from)
            .to_vec();
        for prefix in ["self", "partner"] {
            h.extend(Trait::ALL.iter().map(|t| format!("{prefix}_{}", t.code())));
        }
        h.extend(DV_NAMES.map(String::from));
        h.extend(IrpStrategy::ALL.iter().map(|s| format!("n_{}", s.name())));
        h
    }

    /// Row matching [`SpeakerRecord::csv_header`]; missing values are written as [`MISSING`].
    pub fn csv_row(&self) -> Vec<String> {
        let source = match self.source {
            Source::HumanCorpus => "human-corpus",
            Source::Simulated => "simulated",
        };
        let scale = match self.self_traits.scale() {
            TraitScale::SixPoint => "six-point",
            TraitScale::HumanDecimal => "human-decimal",
        };
        let mut row = vec![
            self.dialogue_id.clone(),
            source.to_string(),
            self.role.name().to_string(),
            self.position.to_string(),
            scale.to_string(),
        ];
        for profile in [&self.self_traits, &self.partner_traits] {
            row.extend(profile.values().iter().map(|v| v.to_string()));
        }
        row.extend(DV_NAMES.iter().map(|n| fmt_opt(self.dv(n))));
        row.extend(self.strategy_counts.iter().map(|c| c.to_string()));
        row
    }
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| MISSING.to_string(), |x| x.to_string())
}

/// Two records per dialogue (Buyer first), with every behavior measure computed from the annotations.
pub fn build_speaker_records(corpus: &[Dialogue]) -> Result<Vec<SpeakerRecord>, MetricsError> {
    let mut out = Vec::with_capacity(2 * corpus.len());
    for d in corpus {
        let profiles = d
            .profiles
            .as_ref()
            .ok_or_else(|| MetricsError::MissingProfiles(d.id.clone()))?;
        for role in Role::BOTH {
            out.push(SpeakerRecord {
                dialogue_id: d.id.clone(),
                source: d.source,
                role,
                position: position_code(role),
                self_traits: profiles[role],
                partner_traits: profiles[role.partner()],
                score: d.outcome.score(role),
                accept: d.outcome.accept(role),
                not_walk_away: d.outcome.not_walk_away(role),
                coop_ratio: irp_ratio(d, role, IrpCategory::Cooperative)?,
                comp_ratio: irp_ratio(d, role, IrpCategory::Competitive)?,
                coop_recip: irp_reciprocity(d, role, IrpCategory::Cooperative)?,
                comp_recip: irp_reciprocity(d, role, IrpCategory::Competitive)?,
                escalation: escalation_ratio(d, role)?,
                deescalation: deescalation_ratio(d, role)?,
                strategy_counts: strategy_counts(d, role)?,
            });
        }
    }
    Ok(out)
}

/// Cut-off defining a "high" trait.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TraitThreshold {
    /// Six-point level at or above the given level.
    LevelAtLeast(TraitLevel),
    /// Human 1-5 score strictly above the given value.
    HumanAbove(f64),
}

impl TraitThreshold {
    /// Level +2 ("moderate") for six-point profiles, 3.5 for human scores.
    pub fn default_for(scale: TraitScale) -> Self {
        match scale {
            TraitScale::SixPoint => TraitThreshold::LevelAtLeast(TraitLevel::new(2).expect("valid level")),
            TraitScale::HumanDecimal => TraitThreshold::HumanAbove(3.5),
        }
    }

    pub fn scale(&self) -> TraitScale {
        match self {
            TraitThreshold::LevelAtLeast(_) => TraitScale::SixPoint,
            TraitThreshold::HumanAbove(_) => TraitScale::HumanDecimal,
        }
    }

    pub fn admits(&self, profile: &TraitProfile, t: Trait) -> Result<bool, MetricsError> {
        match (self, profile) {
            (TraitThreshold::LevelAtLeast(min), TraitProfile::Levels(p)) => Ok(p.get(t) >= *min),
            (TraitThreshold::HumanAbove(cut), TraitProfile::Human(h)) => Ok(h.get(t) > *cut),
            _ => Err(MetricsError::ThresholdMismatch {
                threshold: self.scale(),
                record: profile.scale(),
            }),
        }
    }
}

/// Records whose own `t` trait clears the threshold.
pub fn high_trait_filter(
    records: &[SpeakerRecord],
    t: Trait,
    threshold: TraitThreshold,
) -> Result<Vec<SpeakerRecord>, MetricsError> {
    let mut out = Vec::new();
    for r in records {
        if threshold.admits(&r.self_traits, t)? {
            out.push(r.clone());
        }
    }
    Ok(out)
}

/// Like [`high_trait_filter`], choosing the default threshold for each record's trait scale.
pub fn high_trait_filter_default(records: &[SpeakerRecord], t: Trait) -> Vec<SpeakerRecord> {
    records
        .iter()
        .filter(|r| {
            TraitThreshold::default_for(r.self_traits.scale())
                .admits(&r.self_traits, t)
                .expect("threshold matches the record scale")
        })
        .cloned()
        .collect()
}
