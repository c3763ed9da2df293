use super::*;
use crate::corpus::{
    Dialogue, HumanScores, IrpCategory, IrpStrategy, PersonalityProfile, Role, RoleMap, Segment, Source, Trait,
    TraitLevel, TraitProfile, Turn,
};
use crate::negotiation::{Action, Outcome};
use proptest::prelude::*;
use IrpStrategy::*;

/// Alternating dialogue opened by `opener`; each inner list is one turn's segment labels.
fn toy(opener: Role, turns: &[Vec<IrpStrategy>]) -> Dialogue {
    let mut speaker = opener;
    let turns = turns
        .iter()
        .enumerate()
        .map(|(i, labels)| {
            let t = Turn {
                index: i,
                speaker,
                text: String::new(),
                action: if labels.is_empty() {
                    Action::WalkAway
                } else {
                    Action::Message
                },
                segments: labels.iter().map(|s| Segment::labeled("x", *s)).collect(),
            };
            speaker = speaker.partner();
            t
        })
        .collect();
    Dialogue {
        id: "toy".into(),
        source: Source::HumanCorpus,
        profiles: Some(RoleMap::new(
            PersonalityProfile::from_values([1, 2, 3, -1, -2]).unwrap().into(),
            PersonalityProfile::from_values([-3, -2, -1, 1, 2]).unwrap().into(),
        )),
        importance: None,
        turns,
        outcome: Outcome::no_agreement(),
        meta: None,
    }
}

#[test]
fn ratio_examples() {
    let d = toy(
        Role::Buyer,
        &[vec![Proposal, Facts], vec![Residual], vec![Power, Proposal]],
    );
    assert_eq!(
        irp_ratio(&d, Role::Buyer, IrpCategory::Cooperative).unwrap(),
        Some(50.0)
    );
    assert_eq!(
        irp_ratio(&d, Role::Buyer, IrpCategory::Competitive).unwrap(),
        Some(25.0)
    );
    assert_eq!(irp_ratio(&d, Role::Buyer, Proposal).unwrap(), Some(50.0));
    let all_coop = toy(Role::Buyer, &[vec![Proposal, Interests], vec![Facts], vec![Concession]]);
    assert_eq!(
        irp_ratio(&all_coop, Role::Buyer, IrpCategory::Cooperative).unwrap(),
        Some(100.0)
    );
    let silent = toy(Role::Buyer, &[vec![Facts]]);
    assert_eq!(
        irp_ratio(&silent, Role::Seller, IrpCategory::Cooperative).unwrap(),
        None
    );
}

#[test]
fn unannotated_is_an_error() {
    let mut d = toy(Role::Buyer, &[vec![Facts], vec![Power]]);
    d.turns[1].segments[0].strategy = None;
    assert!(matches!(
        irp_ratio(&d, Role::Seller, IrpCategory::Competitive),
        Err(MetricsError::Unannotated {
            turn: 1,
            segment: 0,
            ..
        })
    ));
    assert!(escalation_ratio(&d, Role::Seller).is_err());
}

#[test]
fn reciprocity_examples() {
    // partner (Buyer) competitive twice; speaker replies competitive then cooperative
    let d = toy(Role::Buyer, &[vec![Power], vec![Rights], vec![Power], vec![Proposal]]);
    assert_eq!(
        irp_reciprocity(&d, Role::Seller, IrpCategory::Competitive).unwrap(),
        Some(50.0)
    );
    let calm = toy(Role::Buyer, &[vec![Facts], vec![Power], vec![Proposal], vec![Power]]);
    assert_eq!(
        irp_reciprocity(&calm, Role::Seller, IrpCategory::Competitive).unwrap(),
        None
    );
    let mirror = toy(
        Role::Buyer,
        &[
            vec![Power, Proposal],
            vec![Rights, Interests],
            vec![Proposal],
            vec![Concession],
        ],
    );
    assert_eq!(
        irp_reciprocity(&mirror, Role::Seller, IrpCategory::Competitive).unwrap(),
        Some(100.0)
    );
    assert_eq!(
        irp_reciprocity(&mirror, Role::Seller, IrpCategory::Cooperative).unwrap(),
        Some(100.0)
    );
}

#[test]
fn escalation_examples() {
    // partner Facts, Proposal, Power; speaker replies Power, Facts, Facts
    let d = toy(
        Role::Buyer,
        &[
            vec![Facts],
            vec![Power],
            vec![Proposal],
            vec![Facts],
            vec![Power],
            vec![Facts],
        ],
    );
    assert_eq!(escalation_ratio(&d, Role::Seller).unwrap(), Some(50.0));
    assert_eq!(deescalation_ratio(&d, Role::Seller).unwrap(), Some(100.0));
    let gentle = toy(Role::Buyer, &[vec![Facts], vec![Proposal], vec![Power], vec![Facts]]);
    assert_eq!(escalation_ratio(&gentle, Role::Seller).unwrap(), Some(0.0));
    let hostile = toy(Role::Buyer, &[vec![Power], vec![Rights], vec![Power], vec![Power]]);
    assert_eq!(escalation_ratio(&hostile, Role::Seller).unwrap(), None);
    assert_eq!(deescalation_ratio(&hostile, Role::Seller).unwrap(), Some(0.0));
    assert_eq!(deescalation_ratio(&gentle, Role::Buyer).unwrap(), None);
}

#[test]
fn last_partner_turn_has_no_reply() {
    // the Buyer's final Power turn is never answered and must not enter the denominator
    let d = toy(Role::Buyer, &[vec![Power], vec![Power], vec![Power]]);
    assert_eq!(
        irp_reciprocity(&d, Role::Seller, IrpCategory::Competitive).unwrap(),
        Some(100.0)
    );
    assert_eq!(deescalation_ratio(&d, Role::Seller).unwrap(), Some(0.0));
}

#[test]
fn segmentless_turns_are_non_competitive() {
    let d = toy(Role::Buyer, &[vec![Facts], vec![Power], vec![]]);
    assert_eq!(deescalation_ratio(&d, Role::Buyer).unwrap(), Some(100.0));
}

#[test]
fn stage_bin_sizes() {
    let sizes = |n, k| stage_bins(n, k).iter().map(|r| r.len()).collect::<Vec<_>>();
    assert_eq!(sizes(10, 5), [2, 2, 2, 2, 2]);
    assert_eq!(sizes(7, 5), [2, 2, 1, 1, 1]);
    assert_eq!(sizes(3, 5), [1, 1, 1, 0, 0]);
    assert_eq!(stage_bins(7, 5)[2], 4..5);
}

#[test]
fn stage_rows() {
    let d = toy(Role::Buyer, &vec![vec![Facts, Facts]; 10]);
    let dist = stage_distribution(&d, None, 5).unwrap();
    for row in &dist.rows {
        let row = row.unwrap();
        assert_eq!(row[Facts.index()], 100.0);
        assert_eq!(row.iter().sum::<f64>(), 100.0);
    }
    let short = toy(Role::Buyer, &[vec![Facts], vec![Power, Proposal, Residual]]);
    let dist = stage_distribution(&short, None, 3).unwrap();
    assert!(dist.rows[2].is_none());
    let seller_only = stage_distribution(&short, Some(Role::Seller), 2).unwrap();
    assert!(seller_only.rows[0].is_none());
    assert!((seller_only.rows[1].unwrap()[Power.index()] - 100.0 / 3.0).abs() < 1e-12);
    assert_eq!(stage_distribution(&short, None, 0), Err(MetricsError::ZeroStages));
}

#[test]
fn records_per_dialogue() {
    let mut d = toy(Role::Buyer, &[vec![Facts], vec![Power], vec![]]);
    d.outcome = Outcome::walk_away(Role::Buyer);
    let records = build_speaker_records(&[d.clone(), d.clone()]).unwrap();
    assert_eq!(records.len(), 4);
    assert_eq!(records[0].role, Role::Buyer);
    assert_eq!(records[0].position, -1);
    assert_eq!(records[1].position, 1);
    assert!(records.iter().all(|r| r.score.is_none()));
    assert_eq!(records[0].not_walk_away, 0);
    assert_eq!(records[1].not_walk_away, 1);
    assert_eq!(records[0].self_traits, records[1].partner_traits);
    assert_eq!(records[0].csv_row().len(), SpeakerRecord::csv_header().len());
    assert!(records[0].csv_row().contains(&"NA".to_string()));
    d.profiles = None;
    assert_eq!(
        build_speaker_records(&[d]),
        Err(MetricsError::MissingProfiles("toy".into()))
    );
}

#[test]
fn high_trait_thresholds() {
    let mut d = toy(Role::Buyer, &[vec![Facts], vec![Facts]]);
    let records = build_speaker_records(std::slice::from_ref(&d)).unwrap();
    // Buyer AGR = +2, Seller AGR = -2
    let kept = high_trait_filter(
        &records,
        Trait::Agreeableness,
        TraitThreshold::default_for(crate::corpus::TraitScale::SixPoint),
    )
    .unwrap();
    assert_eq!(kept.len(), 1);
    assert_eq!(kept[0].role, Role::Buyer);
    let three = TraitThreshold::LevelAtLeast(TraitLevel::new(3).unwrap());
    assert!(three
        .admits(
            &PersonalityProfile::uniform(TraitLevel::new(3).unwrap()).into(),
            Trait::Agreeableness
        )
        .unwrap());

    d.profiles = Some(RoleMap::new(
        TraitProfile::Human(HumanScores::new([3.0, 3.5, 3.0, 3.0, 3.0]).unwrap()),
        TraitProfile::Human(HumanScores::new([3.0, 3.6, 3.0, 3.0, 3.0]).unwrap()),
    ));
    let human = build_speaker_records(&[d]).unwrap();
    let kept = high_trait_filter(&human, Trait::Agreeableness, TraitThreshold::HumanAbove(3.5)).unwrap();
    assert_eq!(kept.len(), 1);
    assert_eq!(kept[0].role, Role::Seller);
    assert!(matches!(
        high_trait_filter(
            &human,
            Trait::Agreeableness,
            TraitThreshold::default_for(crate::corpus::TraitScale::SixPoint)
        ),
        Err(MetricsError::ThresholdMismatch { .. })
    ));
    assert_eq!(high_trait_filter_default(&human, Trait::Agreeableness).len(), 1);
}

// Independent recount: explicit loops over turn indices, no shared helpers.
fn brute(d: &Dialogue, speaker: Role) -> [Option<f64>; 6] {
    let comp = |s: IrpStrategy| matches!(s, Power | Rights);
    let coop = |s: IrpStrategy| matches!(s, Proposal | Concession | Interests | PositiveExpectations);
    let (mut total, mut n_coop, mut n_comp) = (0u64, 0u64, 0u64);
    for t in &d.turns {
        if t.speaker != speaker {
            continue;
        }
        for s in &t.segments {
            let s = s.strategy.unwrap();
            total += 1;
            n_coop += coop(s) as u64;
            n_comp += comp(s) as u64;
        }
    }
    let pct = |a: u64, b: u64| {
        if b == 0 {
            None
        } else {
            Some(100.0 * a as f64 / b as f64)
        }
    };
    let has = |i: usize, f: &dyn Fn(IrpStrategy) -> bool| d.turns[i].segments.iter().any(|s| f(s.strategy.unwrap()));
    let mut c = [0u64; 8];
    for i in 0..d.turns.len().saturating_sub(1) {
        if d.turns[i].speaker == speaker || d.turns[i + 1].speaker != speaker {
            continue;
        }
        let (p_coop, p_comp) = (has(i, &coop), has(i, &comp));
        let (r_coop, r_comp) = (has(i + 1, &coop), has(i + 1, &comp));
        if p_coop {
            c[0] += 1;
            c[1] += r_coop as u64;
        }
        if p_comp {
            c[2] += 1;
            c[3] += r_comp as u64;
            c[6] += 1;
            c[7] += !r_comp as u64;
        } else {
            c[4] += 1;
            c[5] += r_comp as u64;
        }
    }
    [
        pct(n_coop, total),
        pct(n_comp, total),
        pct(c[1], c[0]),
        pct(c[3], c[2]),
        pct(c[5], c[4]),
        pct(c[7], c[6]),
    ]
}

fn fast(d: &Dialogue, speaker: Role) -> [Option<f64>; 6] {
    [
        irp_ratio(d, speaker, IrpCategory::Cooperative).unwrap(),
        irp_ratio(d, speaker, IrpCategory::Competitive).unwrap(),
        irp_reciprocity(d, speaker, IrpCategory::Cooperative).unwrap(),
        irp_reciprocity(d, speaker, IrpCategory::Competitive).unwrap(),
        escalation_ratio(d, speaker).unwrap(),
        deescalation_ratio(d, speaker).unwrap(),
    ]
}

fn arb_dialogue() -> impl Strategy<Value = Dialogue> {
    let turn = proptest::collection::vec((0usize..9).prop_map(|i| IrpStrategy::ALL[i]), 0..=4);
    (any::<bool>(), proptest::collection::vec(turn, 0..=12))
        .prop_map(|(b, turns)| toy(if b { Role::Buyer } else { Role::Seller }, &turns))
}

proptest! {
    #[test]
    fn metrics_match_brute_force(d in arb_dialogue()) {
        for role in Role::BOTH {
            prop_assert_eq!(fast(&d, role), brute(&d, role));
        }
    }

    #[test]
    fn category_ratios_add_to_hundred(d in arb_dialogue()) {
        for role in Role::BOTH {
            let parts: Vec<_> = IrpCategory::ALL.iter().map(|c| irp_ratio(&d, role, *c).unwrap()).collect();
            if parts[0].is_some() {
                let sum: f64 = parts.iter().map(|p| p.unwrap()).sum();
                prop_assert!((sum - 100.0).abs() < 1e-9);
            } else {
                prop_assert!(parts.iter().all(Option::is_none));
            }
        }
    }

    #[test]
    fn stage_rows_sum_to_hundred(d in arb_dialogue(), k in 1usize..8) {
        let bins = stage_bins(d.turns.len(), k);
        prop_assert_eq!(bins.iter().map(|r| r.len()).sum::<usize>(), d.turns.len());
        prop_assert!(bins.windows(2).all(|w| w[0].len() >= w[1].len() && w[0].end == w[1].start));
        for row in stage_distribution(&d, None, k).unwrap().rows.into_iter().flatten() {
            prop_assert!((row.iter().sum::<f64>() - 100.0).abs() < 1e-9);
        }
    }
}
