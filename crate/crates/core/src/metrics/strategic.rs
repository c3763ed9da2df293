use std::ops::Range;

use super::MetricsError;
use crate::corpus::{Dialogue, IrpCategory, IrpStrategy, Role, Turn};

/// What an IRP ratio counts: a whole category or a single strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IrpTarget {
    Category(IrpCategory),
    Strategy(IrpStrategy),
}

impl IrpTarget {
    fn matches(self, s: IrpStrategy) -> bool {
        match self {
            IrpTarget::Category(c) => s.category() == c,
            IrpTarget::Strategy(t) => s == t,
        }
    }
}

impl From<IrpCategory> for IrpTarget {
    fn from(c: IrpCategory) -> Self {
        IrpTarget::Category(c)
    }
}

impl From<IrpStrategy> for IrpTarget {
    fn from(s: IrpStrategy) -> Self {
        IrpTarget::Strategy(s)
    }
}

/// Labels of a turn's segments, failing on the first unlabeled one.
pub(crate) fn turn_labels<'a>(
    dialogue: &'a Dialogue,
    turn: &'a Turn,
) -> impl Iterator<Item = Result<IrpStrategy, MetricsError>> + 'a {
    turn.segments.iter().enumerate().map(move |(k, s)| {
        s.strategy.ok_or_else(|| MetricsError::Unannotated {
            dialogue: dialogue.id.clone(),
            turn: turn.index,
            segment: k,
        })
    })
}

/// Per-strategy segment counts of one speaker.
pub fn strategy_counts(dialogue: &Dialogue, speaker: Role) -> Result<[u64; IrpStrategy::COUNT], MetricsError> {
    let mut counts = [0; IrpStrategy::COUNT];
    for turn in dialogue.turns.iter().filter(|t| t.speaker == speaker) {
        for label in turn_labels(dialogue, turn) {
            counts[label?.index()] += 1;
        }
    }
    Ok(counts)
}

fn percent(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| 100.0 * num as f64 / den as f64)
}

/// Share (0-100) of the speaker's segments that fall under `target`; `None` if the speaker has no segments.
pub fn irp_ratio(
    dialogue: &Dialogue,
    speaker: Role,
    target: impl Into<IrpTarget>,
) -> Result<Option<f64>, MetricsError> {
    let target = target.into();
    let counts = strategy_counts(dialogue, speaker)?;
    let hits = IrpStrategy::ALL
        .iter()
        .filter(|s| target.matches(**s))
        .map(|s| counts[s.index()])
        .sum();
    Ok(percent(hits, counts.iter().sum()))
}

/// Set of categories present in a turn's segments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
struct CategorySet([bool; 4]);

impl CategorySet {
    fn of(dialogue: &Dialogue, turn: &Turn) -> Result<Self, MetricsError> {
        let mut set = CategorySet::default();
        for label in turn_labels(dialogue, turn) {
            set.0[category_slot(label?.category())] = true;
        }
        Ok(set)
    }

    fn contains(self, c: IrpCategory) -> bool {
        self.0[category_slot(c)]
    }

    /// Turns without any Competitive segment (including segment-less turns) are non-competitive.
    fn competitive(self) -> bool {
        self.contains(IrpCategory::Competitive)
    }
}

fn category_slot(c: IrpCategory) -> usize {
    IrpCategory::ALL.iter().position(|x| *x == c).expect("listed")
}

/// (partner turn, speaker reply) pairs; the partner's last turn has no reply and is skipped.
fn reply_pairs(dialogue: &Dialogue, speaker: Role) -> Result<Vec<(CategorySet, CategorySet)>, MetricsError> {
    let mut pairs = Vec::new();
    for w in dialogue.turns.windows(2) {
        if w[0].speaker == speaker.partner() && w[1].speaker == speaker {
            pairs.push((CategorySet::of(dialogue, &w[0])?, CategorySet::of(dialogue, &w[1])?));
        }
    }
    Ok(pairs)
}

/// Share of partner turns using category `x` that the speaker answers with `x` in the next turn.
pub fn irp_reciprocity(dialogue: &Dialogue, speaker: Role, x: IrpCategory) -> Result<Option<f64>, MetricsError> {
    let pairs = reply_pairs(dialogue, speaker)?;
    let relevant = pairs.iter().filter(|(p, _)| p.contains(x));
    let den = relevant.clone().count() as u64;
    let num = relevant.filter(|(_, r)| r.contains(x)).count() as u64;
    Ok(percent(num, den))
}

/// Share of the partner's non-competitive turns that the speaker answers competitively.
pub fn escalation_ratio(dialogue: &Dialogue, speaker: Role) -> Result<Option<f64>, MetricsError> {
    let pairs = reply_pairs(dialogue, speaker)?;
    let den = pairs.iter().filter(|(p, _)| !p.competitive()).count() as u64;
    let num = pairs
        .iter()
        .filter(|(p, r)| !p.competitive() && r.competitive())
        .count() as u64;
    Ok(percent(num, den))
}

/// Share of the partner's competitive turns that the speaker answers non-competitively.
pub fn deescalation_ratio(dialogue: &Dialogue, speaker: Role) -> Result<Option<f64>, MetricsError> {
    let pairs = reply_pairs(dialogue, speaker)?;
    let den = pairs.iter().filter(|(p, _)| p.competitive()).count() as u64;
    let num = pairs
        .iter()
        .filter(|(p, r)| p.competitive() && !r.competitive())
        .count() as u64;
    Ok(percent(num, den))
}

/// Splits `n_turns` into `n_stages` contiguous bins; earlier bins take the remainder.
pub fn stage_bins(n_turns: usize, n_stages: usize) -> Vec<Range<usize>> {
    let (base, extra) = (n_turns / n_stages.max(1), n_turns % n_stages.max(1));
    let mut start = 0;
    (0..n_stages)
        .map(|i| {
            let len = base + usize::from(i < extra);
            let r = start..start + len;
            start += len;
            r
        })
        .collect()
}

/// Per-stage strategy counts, summable across dialogues.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageCounts {
    pub counts: Vec<[u64; IrpStrategy::COUNT]>,
}

impl StageCounts {
    pub fn zeros(n_stages: usize) -> Self {
        StageCounts {
            counts: vec![[0; IrpStrategy::COUNT]; n_stages],
        }
    }

    pub fn add(&mut self, other: &StageCounts) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    pub fn distribution(&self) -> StageDistribution {
        StageDistribution {
            rows: self.counts.iter().map(normalize_row).collect(),
        }
    }
}

/// Row-normalized percentages; `None` when the row has no segments.
pub fn normalize_row(row: &[u64; IrpStrategy::COUNT]) -> Option<[f64; IrpStrategy::COUNT]> {
    let total: u64 = row.iter().sum();
    (total > 0).then(|| row.map(|c| 100.0 * c as f64 / total as f64))
}

/// Strategy shares per dialogue stage (rows) and strategy (columns, taxonomy order).
#[derive(Debug, Clone, PartialEq)]
pub struct StageDistribution {
    pub rows: Vec<Option<[f64; IrpStrategy::COUNT]>>,
}

/// Counts segments per stage. Stages partition the dialogue's turns; `speaker` restricts which segments count.
pub fn stage_counts(dialogue: &Dialogue, speaker: Option<Role>, n_stages: usize) -> Result<StageCounts, MetricsError> {
    if n_stages == 0 {
        return Err(MetricsError::ZeroStages);
    }
    let mut out = StageCounts::zeros(n_stages);
    for (stage, range) in stage_bins(dialogue.turns.len(), n_stages).into_iter().enumerate() {
        for turn in &dialogue.turns[range] {
            if speaker.is_some_and(|s| s != turn.speaker) {
                continue;
            }
            for label in turn_labels(dialogue, turn) {
                out.counts[stage][label?.index()] += 1;
            }
        }
    }
    Ok(out)
}

pub fn stage_distribution(
    dialogue: &Dialogue,
    speaker: Option<Role>,
    n_stages: usize,
) -> Result<StageDistribution, MetricsError> {
    Ok(stage_counts(dialogue, speaker, n_stages)?.distribution())
}
