//! Per-speaker strategic-behavior measures, outcome variables and stage profiles.

mod heatmap;
mod records;
mod strategic;

pub use heatmap::{trait_heatmap, HeatmapRow};
pub use records::{
    build_speaker_records, fmt_opt, high_trait_filter, high_trait_filter_default, position_code, SpeakerRecord,
    TraitThreshold, DV_NAMES, MISSING,
};
pub use strategic::{
    deescalation_ratio, escalation_ratio, irp_ratio, irp_reciprocity, normalize_row, stage_bins, stage_counts,
    stage_distribution, strategy_counts, IrpTarget, StageCounts, StageDistribution,
};

use crate::corpus::TraitScale;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("dialogue {dialogue}, turn {turn}, segment {segment} is not annotated")]
    Unannotated {
        dialogue: String,
        turn: usize,
        segment: usize,
    },
    #[error("dialogue {0} has no personality profiles")]
    MissingProfiles(String),
    #[error("a {threshold:?} threshold cannot be applied to a {record:?} profile")]
    ThresholdMismatch { threshold: TraitScale, record: TraitScale },
    #[error("the number of stages must be at least 1")]
    ZeroStages,
}

#[cfg(test)]
mod tests;
