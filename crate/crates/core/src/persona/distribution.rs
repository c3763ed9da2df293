use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::PersonaError;
use crate::corpus::{PersonalityProfile, Trait, TraitLevel};

/// Per-trait histogram over the six levels, in [`TraitLevel::ALL`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct TraitDistribution {
    weights: [[f64; 6]; 5],
    human_scores: Option<[Vec<f64>; 5]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistributionFile {
    weights: BTreeMap<String, Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    human_scores: Option<BTreeMap<String, Vec<f64>>>,
}

impl TraitDistribution {
    pub fn new(weights: [[f64; 6]; 5]) -> Result<Self, PersonaError> {
        for (t, hist) in Trait::ALL.iter().zip(&weights) {
            if hist.iter().any(|w| !w.is_finite() || *w < 0.0) {
                return Err(PersonaError::DegenerateHistogram(*t));
            }
            if hist.iter().sum::<f64>() <= 0.0 {
                return Err(PersonaError::DegenerateHistogram(*t));
            }
        }
        Ok(TraitDistribution {
            weights,
            human_scores: None,
        })
    }

    pub fn uniform() -> Self {
        TraitDistribution {
            weights: [[1.0; 6]; 5],
            human_scores: None,
        }
    }

    /// Histogram built by mapping raw 1-5 human scores onto the six levels.
    pub fn from_human_scores(scores: [Vec<f64>; 5], mapping: &LevelMapping) -> Result<Self, PersonaError> {
        let mut weights = [[0.0; 6]; 5];
        for (hist, column) in weights.iter_mut().zip(&scores) {
            for &s in column {
                hist[mapping.map(s)?.index()] += 1.0;
            }
        }
        let mut dist = TraitDistribution::new(weights)?;
        dist.human_scores = Some(scores);
        Ok(dist)
    }

    pub fn weights(&self, t: Trait) -> &[f64; 6] {
        &self.weights[t.index()]
    }

    pub fn human_scores(&self, t: Trait) -> Option<&[f64]> {
        self.human_scores.as_ref().map(|s| s[t.index()].as_slice())
    }

    /// Normalized probabilities for one trait.
    pub fn probabilities(&self, t: Trait) -> [f64; 6] {
        let hist = self.weights(t);
        let total: f64 = hist.iter().sum();
        hist.map(|w| w / total)
    }

    pub fn from_json_str(text: &str) -> Result<Self, PersonaError> {
        let file: DistributionFile = serde_json::from_str(text).map_err(|e| PersonaError::Parse(e.to_string()))?;
        let mut weights = [[0.0; 6]; 5];
        for (key, hist) in &file.weights {
            let t = Trait::from_code(key).ok_or_else(|| PersonaError::Parse(format!("unknown trait {key:?}")))?;
            weights[t.index()] = hist
                .as_slice()
                .try_into()
                .map_err(|_| PersonaError::Parse(format!("{key}: expected 6 weights, found {}", hist.len())))?;
        }
        for t in Trait::ALL {
            if !file.weights.contains_key(t.code()) {
                return Err(PersonaError::Parse(format!("missing trait {t}")));
            }
        }
        let mut dist = TraitDistribution::new(weights)?;
        if let Some(raw) = file.human_scores {
            let mut scores: [Vec<f64>; 5] = Default::default();
            for (key, column) in raw {
                let t = Trait::from_code(&key).ok_or_else(|| PersonaError::Parse(format!("unknown trait {key:?}")))?;
                if let Some(bad) = column.iter().find(|s| !(1.0..=5.0).contains(*s)) {
                    return Err(PersonaError::HumanScoreOutOfRange(*bad));
                }
                scores[t.index()] = column;
            }
            dist.human_scores = Some(scores);
        }
        Ok(dist)
    }

    pub fn to_json_string(&self) -> String {
        let weights = Trait::ALL
            .iter()
            .map(|t| (t.code().to_string(), self.weights(*t).to_vec()))
            .collect();
        let human_scores = self.human_scores.as_ref().map(|s| {
            Trait::ALL
                .iter()
                .map(|t| (t.code().to_string(), s[t.index()].clone()))
                .collect()
        });
        serde_json::to_string_pretty(&DistributionFile { weights, human_scores }).expect("serializable")
    }
}

/// Draws each trait independently from its histogram; deterministic in `seed`.
pub fn sample_profile(dist: &TraitDistribution, seed: u64) -> Result<PersonalityProfile, PersonaError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_profile_with(dist, &mut rng)
}

pub fn sample_profile_with<R: rand::Rng + ?Sized>(
    dist: &TraitDistribution,
    rng: &mut R,
) -> Result<PersonalityProfile, PersonaError> {
    let mut profile = PersonalityProfile::uniform(TraitLevel::ALL[3]);
    for t in Trait::ALL {
        let index = WeightedIndex::new(dist.weights(t)).map_err(|_| PersonaError::DegenerateHistogram(t))?;
        profile.set(t, TraitLevel::ALL[index.sample(rng)]);
    }
    Ok(profile)
}

/// How human 1-5 scores are binned onto the six-point scale.
#[derive(Debug, Clone, PartialEq)]
pub enum LevelMapping {
    /// Six equal-width, left-closed bins over [1, 5].
    EqualWidth,
    /// Left-closed bins bounded by five ascending cut points.
    Quantile { cutpoints: [f64; 5] },
}

impl LevelMapping {
    /// Sextile cut points of a human score sample (linear interpolation between order statistics).
    pub fn quantile_from(scores: &[f64]) -> Result<Self, PersonaError> {
        if scores.is_empty() {
            return Err(PersonaError::Parse(
                "quantile mapping needs a non-empty score sample".into(),
            ));
        }
        if let Some(bad) = scores.iter().find(|s| !(1.0..=5.0).contains(*s)) {
            return Err(PersonaError::HumanScoreOutOfRange(*bad));
        }
        let mut sorted = scores.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let cutpoints = [1, 2, 3, 4, 5].map(|k| {
            let h = (n - 1) as f64 * k as f64 / 6.0;
            let lo = h.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
        });
        Ok(LevelMapping::Quantile { cutpoints })
    }

    pub fn map(&self, score: f64) -> Result<TraitLevel, PersonaError> {
        match self {
            LevelMapping::EqualWidth => map_human_to_level(score),
            LevelMapping::Quantile { cutpoints } => {
                if !(1.0..=5.0).contains(&score) {
                    return Err(PersonaError::HumanScoreOutOfRange(score));
                }
                let bin = cutpoints.iter().filter(|c| score >= **c).count();
                Ok(TraitLevel::ALL[bin])
            }
        }
    }
}

/// Equal-width binning of a 1-5 score: [1, 1.667) -> -3, ..., [4.333, 5] -> +3.
pub fn map_human_to_level(score: f64) -> Result<TraitLevel, PersonaError> {
    if !(1.0..=5.0).contains(&score) {
        return Err(PersonaError::HumanScoreOutOfRange(score));
    }
    let bin = (((score - 1.0) * 3.0 / 2.0).floor() as usize).min(5);
    Ok(TraitLevel::ALL[bin])
}
