use std::collections::BTreeMap;

use super::AnnotateError;
use crate::corpus::{Dialogue, IrpStrategy};

/// Binary correct/incorrect verdicts of several annotators on one predicted label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationJudgment {
    pub item: String,
    pub verdicts: Vec<bool>,
}

impl AnnotationJudgment {
    pub fn new(item: impl Into<String>, verdicts: Vec<bool>) -> Self {
        AnnotationJudgment {
            item: item.into(),
            verdicts,
        }
    }
}

/// Chance agreement of two raters on a binary verdict with no prevalence assumption.
pub const A_KAPPA_CHANCE_AGREEMENT: f64 = 0.5;

/// A-Kappa agreement over binary verdicts.
///
/// Observed agreement is the mean over items of the fraction of agreeing annotator pairs; chance agreement is
/// fixed at 1/2 rather than estimated from the (possibly very skewed) verdict marginals, so perfect agreement
/// scores 1 at any prevalence. Result: `(P_o - 1/2) / (1 - 1/2)`, in [-1, 1].
pub fn a_kappa(judgments: &[AnnotationJudgment]) -> Result<f64, AnnotateError> {
    if judgments.is_empty() {
        return Err(AnnotateError::NoJudgments);
    }
    let mut observed = 0.0;
    for j in judgments {
        let m = j.verdicts.len();
        if m < 2 {
            return Err(AnnotateError::TooFewAnnotators {
                item: j.item.clone(),
                found: m,
            });
        }
        let yes = j.verdicts.iter().filter(|v| **v).count();
        let no = m - yes;
        let agreeing = yes * yes.saturating_sub(1) + no * no.saturating_sub(1);
        observed += agreeing as f64 / (m * (m - 1)) as f64;
    }
    observed /= judgments.len() as f64;
    Ok((observed - A_KAPPA_CHANCE_AGREEMENT) / (1.0 - A_KAPPA_CHANCE_AGREEMENT))
}

/// Counts indexed by (gold, predicted) strategy.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConfusionMatrix {
    counts: [[u64; IrpStrategy::COUNT]; IrpStrategy::COUNT],
}

impl ConfusionMatrix {
    pub fn from_pairs<I: IntoIterator<Item = (IrpStrategy, IrpStrategy)>>(pairs: I) -> Self {
        let mut m = ConfusionMatrix::default();
        for (gold, pred) in pairs {
            m.add(gold, pred, 1);
        }
        m
    }

    pub fn add(&mut self, gold: IrpStrategy, pred: IrpStrategy, n: u64) {
        self.counts[gold.index()][pred.index()] += n;
    }

    pub fn get(&self, gold: IrpStrategy, pred: IrpStrategy) -> u64 {
        self.counts[gold.index()][pred.index()]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..IrpStrategy::COUNT).map(|i| self.counts[i][i]).sum()
    }

    /// Gold occurrences of `s`.
    pub fn support(&self, s: IrpStrategy) -> u64 {
        self.counts[s.index()].iter().sum()
    }

    pub fn predicted(&self, s: IrpStrategy) -> u64 {
        self.counts.iter().map(|row| row[s.index()]).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassScore {
    pub strategy: IrpStrategy,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    /// One entry per strategy that occurs in the gold or the predicted labels, in taxonomy order.
    pub per_class: Vec<ClassScore>,
    pub macro_f1: f64,
    pub weighted_f1: f64,
    pub accuracy: f64,
    pub confusion: ConfusionMatrix,
    pub warnings: Vec<String>,
}

impl ClassificationReport {
    pub fn class(&self, s: IrpStrategy) -> Option<&ClassScore> {
        self.per_class.iter().find(|c| c.strategy == s)
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Precision, recall and F1 per class from a confusion matrix.
///
/// Classes with no gold support (but some predictions) get F1 = 0 and a warning; they count towards the macro mean.
pub fn report_from_confusion(confusion: ConfusionMatrix) -> Result<ClassificationReport, AnnotateError> {
    let total = confusion.total();
    if total == 0 {
        return Err(AnnotateError::NoSegments);
    }
    let mut per_class = Vec::new();
    let mut warnings = Vec::new();
    for s in IrpStrategy::ALL {
        let support = confusion.support(s);
        let predicted = confusion.predicted(s);
        if support == 0 && predicted == 0 {
            continue;
        }
        let tp = confusion.get(s, s);
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, support);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        if support == 0 {
            let msg = format!("{s} has no gold support; its F1 is set to 0");
            log::warn!("{msg}");
            warnings.push(msg);
        }
        per_class.push(ClassScore {
            strategy: s,
            precision,
            recall,
            f1,
            support,
        });
    }
    let macro_f1 = per_class.iter().map(|c| c.f1).sum::<f64>() / per_class.len() as f64;
    let weighted_f1 = per_class.iter().map(|c| c.f1 * c.support as f64).sum::<f64>() / total as f64;
    Ok(ClassificationReport {
        per_class,
        macro_f1,
        weighted_f1,
        accuracy: confusion.trace() as f64 / total as f64,
        confusion,
        warnings,
    })
}

/// Compares predicted against gold labels, segment by segment.
///
/// Dialogues are matched by id; every matched dialogue must have the same turns and segment counts, and every
/// segment in both corpora must be labeled.
pub fn classification_report(pred: &[Dialogue], gold: &[Dialogue]) -> Result<ClassificationReport, AnnotateError> {
    let index = |corpus: &[Dialogue]| -> Result<BTreeMap<String, usize>, AnnotateError> {
        let mut map = BTreeMap::new();
        for (i, d) in corpus.iter().enumerate() {
            if map.insert(d.id.clone(), i).is_some() {
                return Err(AnnotateError::IdMismatch(format!("duplicate dialogue id {}", d.id)));
            }
        }
        Ok(map)
    };
    let pred_ids = index(pred)?;
    let gold_ids = index(gold)?;
    if pred_ids.keys().ne(gold_ids.keys()) {
        let missing: Vec<_> = gold_ids.keys().filter(|k| !pred_ids.contains_key(*k)).collect();
        let extra: Vec<_> = pred_ids.keys().filter(|k| !gold_ids.contains_key(*k)).collect();
        return Err(AnnotateError::IdMismatch(format!(
            "missing predictions for {missing:?}; unexpected predictions for {extra:?}"
        )));
    }
    let mut confusion = ConfusionMatrix::default();
    for (id, &gi) in &gold_ids {
        let (g, p) = (&gold[gi], &pred[pred_ids[id]]);
        if g.turns.len() != p.turns.len() {
            return Err(AnnotateError::IdMismatch(format!("{id}: turn counts differ")));
        }
        for (gt, pt) in g.turns.iter().zip(&p.turns) {
            if gt.segments.len() != pt.segments.len() {
                return Err(AnnotateError::IdMismatch(format!(
                    "{id}: segment counts differ at turn {}",
                    gt.index
                )));
            }
            for (k, (gs, ps)) in gt.segments.iter().zip(&pt.segments).enumerate() {
                let unlabeled = || AnnotateError::Unannotated {
                    dialogue: id.clone(),
                    turn: gt.index,
                    segment: k,
                };
                confusion.add(
                    gs.strategy.ok_or_else(unlabeled)?,
                    ps.strategy.ok_or_else(unlabeled)?,
                    1,
                );
            }
        }
    }
    report_from_confusion(confusion)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use IrpStrategy::*;

    #[test]
    fn perfect_agreement_any_prevalence() {
        for m in 2..6 {
            let all_yes: Vec<_> = (0..10)
                .map(|i| AnnotationJudgment::new(i.to_string(), vec![true; m]))
                .collect();
            assert_eq!(a_kappa(&all_yes).unwrap(), 1.0);
            let mixed: Vec<_> = (0..10)
                .map(|i| AnnotationJudgment::new(i.to_string(), vec![i % 7 == 0; m]))
                .collect();
            assert_eq!(a_kappa(&mixed).unwrap(), 1.0);
        }
    }

    #[test]
    fn preconditions() {
        assert!(matches!(
            a_kappa(&[AnnotationJudgment::new("x", vec![true])]),
            Err(AnnotateError::TooFewAnnotators { found: 1, .. })
        ));
        assert_eq!(a_kappa(&[]), Err(AnnotateError::NoJudgments));
    }

    #[test]
    fn two_raters_hand_computed() {
        // agree, agree, disagree, agree -> P_o = 3/4 -> 0.5
        let j = [
            AnnotationJudgment::new("a", vec![true, true]),
            AnnotationJudgment::new("b", vec![false, false]),
            AnnotationJudgment::new("c", vec![true, false]),
            AnnotationJudgment::new("d", vec![true, true]),
        ];
        assert_abs_diff_eq!(a_kappa(&j).unwrap(), 0.5, epsilon = 1e-15);
        // three raters, 2 yes 1 no: 1 of 3 pairs agree
        let j = [AnnotationJudgment::new("a", vec![true, true, false])];
        assert_abs_diff_eq!(a_kappa(&j).unwrap(), 2.0 * (1.0 / 3.0) - 1.0, epsilon = 1e-15);
    }

    #[test]
    fn independent_raters_match_expectation() {
        // independent raters with P(correct) = p agree with probability p^2 + (1-p)^2
        let mut rng = ChaCha8Rng::seed_from_u64(2014);
        for p in [0.5, 0.8, 0.95] {
            let judgments: Vec<_> = (0..10_000)
                .map(|i| AnnotationJudgment::new(i.to_string(), (0..3).map(|_| rng.random_bool(p)).collect()))
                .collect();
            let expected = 2.0 * (p * p + (1.0 - p) * (1.0 - p)) - 1.0;
            let got = a_kappa(&judgments).unwrap();
            assert!((got - expected).abs() < 0.05, "p={p}: {got} vs {expected}");
        }
    }

    #[test]
    fn three_class_fixture() {
        let (a, b, c) = (Proposal, Facts, Power);
        let m = ConfusionMatrix::from_pairs([(a, a), (a, a), (a, b), (b, b), (c, c)]);
        let r = report_from_confusion(m).unwrap();
        assert_abs_diff_eq!(r.accuracy, 0.8, epsilon = 1e-15);
        // A: P = 2/2, R = 2/3; B: P = 1/2, R = 1/1; C: P = R = 1
        assert_abs_diff_eq!(r.class(a).unwrap().f1, 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(r.class(b).unwrap().f1, 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.class(c).unwrap().f1, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.macro_f1, (0.8 + 2.0 / 3.0 + 1.0) / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.weighted_f1, (3.0 * 0.8 + 2.0 / 3.0 + 1.0) / 5.0, epsilon = 1e-12);
        assert_eq!(r.per_class.len(), 3);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn zero_support_class() {
        let m = ConfusionMatrix::from_pairs([(Facts, Facts), (Facts, Rights)]);
        let r = report_from_confusion(m).unwrap();
        assert_eq!(r.class(Rights).unwrap().f1, 0.0);
        assert_eq!(r.warnings.len(), 1);
        assert_abs_diff_eq!(r.macro_f1, (2.0 / 3.0) / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn identity_gives_one() {
        let pairs: Vec<_> = IrpStrategy::ALL.iter().flat_map(|s| [(*s, *s), (*s, *s)]).collect();
        let r = report_from_confusion(ConfusionMatrix::from_pairs(pairs)).unwrap();
        assert_eq!(r.macro_f1, 1.0);
        assert_eq!(r.weighted_f1, 1.0);
        assert_eq!(r.accuracy, 1.0);
        assert!(r.per_class.iter().all(|c| c.f1 == 1.0));
    }

    proptest::proptest! {
        #[test]
        fn f1_identities(pairs in proptest::collection::vec((0usize..9, 0usize..9), 1..200)) {
            let m = ConfusionMatrix::from_pairs(pairs.iter().map(|(g, p)| (IrpStrategy::ALL[*g], IrpStrategy::ALL[*p])));
            let r = report_from_confusion(m.clone()).unwrap();
            let hits = pairs.iter().filter(|(g, p)| g == p).count();
            proptest::prop_assert!((r.accuracy - hits as f64 / pairs.len() as f64).abs() < 1e-12);
            let max = r.per_class.iter().map(|c| c.f1).fold(f64::MIN, f64::max);
            let min = r.per_class.iter().map(|c| c.f1).fold(f64::MAX, f64::min);
            proptest::prop_assert!(r.macro_f1 <= max + 1e-12 && r.macro_f1 >= min - 1e-12);
            proptest::prop_assert_eq!(m.total() as usize, pairs.len());
        }
    }
}
