use super::records::{SpeakerRecord, TraitThreshold};
use super::strategic::normalize_row;
use super::MetricsError;
use crate::corpus::{IrpStrategy, Trait, TraitScale};

/// Pooled strategy shares of the speakers scoring high on one trait.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapRow {
    pub group: Trait,
    pub speakers: usize,
    pub counts: [u64; IrpStrategy::COUNT],
    /// Percentages in taxonomy order; `None` when the group used no segments.
    pub shares: Option<[f64; IrpStrategy::COUNT]>,
}

/// One row per trait: segment counts summed over high-trait speakers, normalized to 100.
///
/// `threshold` picks the cut-off for each record's trait scale.
pub fn trait_heatmap(
    records: &[SpeakerRecord],
    threshold: impl Fn(TraitScale) -> TraitThreshold,
) -> Result<Vec<HeatmapRow>, MetricsError> {
    let mut rows = Vec::with_capacity(5);
    for t in Trait::ALL {
        let mut counts = [0u64; IrpStrategy::COUNT];
        let mut speakers = 0;
        for r in records {
            let cut = threshold(r.self_traits.scale());
            if cut.admits(&r.self_traits, t)? {
                speakers += 1;
                for (c, x) in counts.iter_mut().zip(&r.strategy_counts) {
                    *c += x;
                }
            }
        }
        rows.push(HeatmapRow {
            group: t,
            speakers,
            counts,
            shares: normalize_row(&counts),
        });
    }
    Ok(rows)
}
