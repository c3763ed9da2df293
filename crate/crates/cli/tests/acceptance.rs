//! Acceptance harness: one PASS/FAIL line per criterion, non-zero exit on any failure.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use disputebench_core::annotate::{
    a_kappa, annotate_rules, classification_report, classify_segment, report_from_confusion, segment_utterance,
    AnnotationJudgment, ConfusionMatrix,
};
use disputebench_core::corpus::{
    Dialogue, IrpCategory, IrpStrategy, PersonalityProfile, Role, Segment, Source, Trait, TraitLevel, Turn,
};
use disputebench_core::metrics::{deescalation_ratio, escalation_ratio, irp_ratio, irp_reciprocity, SpeakerRecord};
use disputebench_core::negotiation::{
    outcome_of, parse_action, replay, score, Action, ApologyLevel, ImportanceWeights, Issue, IssueAllocation,
    OutcomeKind, RefundLevel, ReviewLevel, Termination, DEFAULT_MAX_ROUNDS,
};
use disputebench_core::persona::{
    assign_importance, raw_importance, render_adjective, sample_profile_with, AdjectivePair, TraitDistribution,
    AGREEABLENESS_APOLOGY_SLOPE,
};
use disputebench_core::stats::{
    build_design, interaction_column, logit_fit, ols_fit, self_column, simple_effects, Coding, DesignMatrix,
    DesignOptions, Robust, StatsError,
};
use disputebench_core::Outcome;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

// ---------------------------------------------------------------- C1

fn random_dialogue(rng: &mut ChaCha8Rng, id: usize) -> Dialogue {
    let n_turns = rng.random_range(0..=12);
    let opener = if rng.random_bool(0.5) {
        Role::Buyer
    } else {
        Role::Seller
    };
    let turns = (0..n_turns)
        .map(|index| {
            let speaker = if index % 2 == 0 { opener } else { opener.partner() };
            let segments = (0..rng.random_range(0..=4))
                .map(|k| Segment::labeled(format!("s{k}"), IrpStrategy::ALL[rng.random_range(0..9)]))
                .collect();
            Turn {
                index,
                speaker,
                text: String::new(),
                action: Action::Message,
                segments,
            }
        })
        .collect();
    Dialogue {
        id: format!("r{id}"),
        source: Source::Simulated,
        profiles: None,
        importance: None,
        turns,
        outcome: Outcome::no_agreement(),
        meta: None,
    }
}

fn has(turn: &Turn, c: IrpCategory) -> bool {
    turn.segments
        .iter()
        .any(|s| s.strategy.map(|x| x.category()) == Some(c))
}

/// Recount from scratch: (numerator, denominator) pairs for the six per-speaker metrics.
fn recount(d: &Dialogue, me: Role) -> [(u64, u64); 6] {
    let mut out = [(0, 0); 6];
    for t in d.turns.iter().filter(|t| t.speaker == me) {
        for s in &t.segments {
            let c = s.strategy.unwrap().category();
            out[0].1 += 1;
            out[1].1 += 1;
            out[0].0 += u64::from(c == IrpCategory::Cooperative);
            out[1].0 += u64::from(c == IrpCategory::Competitive);
        }
    }
    for i in 1..d.turns.len() {
        let (prev, cur) = (&d.turns[i - 1], &d.turns[i]);
        if cur.speaker != me || prev.speaker == me {
            continue;
        }
        for (slot, c) in [(2, IrpCategory::Cooperative), (3, IrpCategory::Competitive)] {
            if has(prev, c) {
                out[slot].1 += 1;
                out[slot].0 += u64::from(has(cur, c));
            }
        }
        let prev_comp = has(prev, IrpCategory::Competitive);
        let cur_comp = has(cur, IrpCategory::Competitive);
        if prev_comp {
            out[5].1 += 1;
            out[5].0 += u64::from(!cur_comp);
        } else {
            out[4].1 += 1;
            out[4].0 += u64::from(cur_comp);
        }
    }
    out
}

fn c1_metric_oracle() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for i in 0..1000 {
        let d = random_dialogue(&mut rng, i);
        for me in Role::BOTH {
            let fast = [
                irp_ratio(&d, me, IrpCategory::Cooperative),
                irp_ratio(&d, me, IrpCategory::Competitive),
                irp_reciprocity(&d, me, IrpCategory::Cooperative),
                irp_reciprocity(&d, me, IrpCategory::Competitive),
                escalation_ratio(&d, me),
                deescalation_ratio(&d, me),
            ];
            for (k, (got, (num, den))) in fast.into_iter().zip(recount(&d, me)).enumerate() {
                let got = got.map_err(|e| e.to_string())?;
                let want = (den > 0).then(|| 100.0 * num as f64 / den as f64);
                let ok = match (got, want) {
                    (None, None) => true,
                    (Some(a), Some(b)) => (a - b).abs() <= 1e-12,
                    _ => false,
                };
                ensure!(ok, "dialogue {i} {me:?} metric {k}: got {got:?}, recount {num}/{den}");
            }
        }
    }
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(10), "took {took:?}");
    Ok(())
}

// ---------------------------------------------------------------- C2

fn allocation(v: [&str; 5]) -> IssueAllocation {
    let review = |s: &str| {
        if s == "remove" {
            ReviewLevel::Remove
        } else {
            ReviewLevel::Keep
        }
    };
    let apology = |s: &str| {
        if s == "apologize" {
            ApologyLevel::Apologize
        } else {
            ApologyLevel::NotApologize
        }
    };
    IssueAllocation {
        refund: match v[0] {
            "full" => RefundLevel::Full,
            "partial" => RefundLevel::Partial,
            _ => RefundLevel::None,
        },
        seller_review: review(v[1]),
        buyer_review: review(v[2]),
        seller_apology: apology(v[3]),
        buyer_apology: apology(v[4]),
    }
}

/// Moves one issue a step towards `role`'s preferred level; `None` if it is already there.
fn favorable_flip(a: &IssueAllocation, role: Role, issue: Issue) -> Option<IssueAllocation> {
    let mut b = *a;
    let buyer = role == Role::Buyer;
    match issue {
        Issue::Refund => {
            b.refund = match (a.refund, buyer) {
                (RefundLevel::None, true) => RefundLevel::Partial,
                (RefundLevel::Partial, true) => RefundLevel::Full,
                (RefundLevel::Full, false) => RefundLevel::Partial,
                (RefundLevel::Partial, false) => RefundLevel::None,
                _ => return None,
            }
        }
        Issue::SellerReview => b.seller_review = if buyer { ReviewLevel::Remove } else { ReviewLevel::Keep },
        Issue::BuyerReview => b.buyer_review = if buyer { ReviewLevel::Keep } else { ReviewLevel::Remove },
        Issue::SellerApology => {
            b.seller_apology = if buyer {
                ApologyLevel::Apologize
            } else {
                ApologyLevel::NotApologize
            }
        }
        Issue::BuyerApology => {
            b.buyer_apology = if buyer {
                ApologyLevel::NotApologize
            } else {
                ApologyLevel::Apologize
            }
        }
    }
    (b != *a).then_some(b)
}

fn c2_score_contract() -> Check {
    use Role::{Buyer, Seller};
    let fixture: [([f64; 5], [&str; 5], Role, f64); 20] = [
        (
            [40.0, 25.0, 10.0, 20.0, 5.0],
            ["partial", "remove", "remove", "apologize", "not-apologize"],
            Buyer,
            70.0,
        ),
        (
            [40.0, 25.0, 10.0, 20.0, 5.0],
            ["partial", "remove", "remove", "apologize", "not-apologize"],
            Seller,
            30.0,
        ),
        (
            [12.5, 12.5, 25.0, 25.0, 25.0],
            ["partial", "keep", "remove", "not-apologize", "apologize"],
            Buyer,
            6.25,
        ),
        (
            [50.0, 10.0, 10.0, 20.0, 10.0],
            ["full", "keep", "keep", "apologize", "not-apologize"],
            Buyer,
            90.0,
        ),
        (
            [12.5, 12.5, 25.0, 25.0, 25.0],
            ["full", "remove", "remove", "not-apologize", "not-apologize"],
            Buyer,
            50.0,
        ),
        (
            [30.0, 30.0, 10.0, 15.0, 15.0],
            ["full", "remove", "remove", "not-apologize", "apologize"],
            Buyer,
            60.0,
        ),
        (
            [20.0, 20.0, 20.0, 20.0, 20.0],
            ["full", "remove", "remove", "apologize", "apologize"],
            Seller,
            40.0,
        ),
        (
            [5.0, 35.0, 15.0, 25.0, 20.0],
            ["full", "remove", "remove", "apologize", "not-apologize"],
            Seller,
            15.0,
        ),
        (
            [20.0, 20.0, 20.0, 20.0, 20.0],
            ["partial", "keep", "remove", "apologize", "not-apologize"],
            Buyer,
            50.0,
        ),
        (
            [5.0, 35.0, 15.0, 25.0, 20.0],
            ["partial", "remove", "keep", "apologize", "not-apologize"],
            Seller,
            2.5,
        ),
        (
            [5.0, 35.0, 15.0, 25.0, 20.0],
            ["partial", "keep", "remove", "not-apologize", "not-apologize"],
            Buyer,
            22.5,
        ),
        (
            [20.0, 20.0, 20.0, 20.0, 20.0],
            ["partial", "remove", "keep", "not-apologize", "apologize"],
            Seller,
            50.0,
        ),
        (
            [5.0, 35.0, 15.0, 25.0, 20.0],
            ["partial", "remove", "keep", "apologize", "apologize"],
            Buyer,
            77.5,
        ),
        (
            [20.0, 20.0, 20.0, 20.0, 20.0],
            ["full", "keep", "keep", "not-apologize", "not-apologize"],
            Seller,
            40.0,
        ),
        (
            [20.0, 20.0, 20.0, 20.0, 20.0],
            ["none", "keep", "keep", "apologize", "not-apologize"],
            Buyer,
            60.0,
        ),
        (
            [50.0, 10.0, 10.0, 20.0, 10.0],
            ["partial", "keep", "remove", "not-apologize", "not-apologize"],
            Buyer,
            35.0,
        ),
        (
            [5.0, 35.0, 15.0, 25.0, 20.0],
            ["none", "keep", "keep", "apologize", "apologize"],
            Buyer,
            40.0,
        ),
        (
            [5.0, 35.0, 15.0, 25.0, 20.0],
            ["partial", "remove", "remove", "apologize", "not-apologize"],
            Buyer,
            82.5,
        ),
        (
            [50.0, 10.0, 10.0, 20.0, 10.0],
            ["none", "keep", "keep", "not-apologize", "not-apologize"],
            Buyer,
            20.0,
        ),
        (
            [20.0, 20.0, 20.0, 20.0, 20.0],
            ["none", "remove", "keep", "not-apologize", "apologize"],
            Buyer,
            40.0,
        ),
    ];
    for (i, (w, a, role, want)) in fixture.iter().enumerate() {
        let weights = ImportanceWeights::new(*w).map_err(|e| e.to_string())?;
        let got = score(&allocation(*a), &weights, *role);
        ensure!((got - want).abs() <= 1e-12, "case {i}: {got} != {want}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let all = IssueAllocation::all();
    let mut flips = 0;
    while flips < 10_000 {
        let raw = [(); 5].map(|_| rng.random_range(0.1..10.0));
        let weights = ImportanceWeights::normalized(raw).map_err(|e| e.to_string())?;
        let a = all[rng.random_range(0..all.len())];
        let role = Role::BOTH[rng.random_range(0..2)];
        let issue = Issue::ALL[rng.random_range(0..5)];
        let Some(b) = favorable_flip(&a, role, issue) else {
            continue;
        };
        flips += 1;
        let (before, after) = (score(&a, &weights, role), score(&b, &weights, role));
        ensure!(
            after >= before,
            "flip of {issue} for {role:?} lowered {before} to {after}"
        );
        ensure!((0.0..=100.0 + 1e-9).contains(&after), "score {after} out of range");
    }
    Ok(())
}

// ---------------------------------------------------------------- C3

fn c3_state_machine() -> Check {
    let lines = [
        "Please take down the review you posted about me, and I would like an apology too.",
        "My review stays up; you were the one who was rude first.",
        "The description changed after I paid.",
        "The description was the same the whole time.",
        "Let's find something in the middle.",
        "I could take my review down if yours goes too.",
        "An apology matters most to me.",
        "What I care about is an apology from you.",
        "Shall we both delete our reviews?",
        "I can apologize if your review comes down.",
        "Then I will drop the money question.",
        "Fine, I will apologize, but your review has to go.",
        "Agreed, both reviews go and you apologize.",
        r#"SUBMISSION: {"REF": "None", "SNR": "remove", "BNR": "remove", "SAP": "apologize", "BAP": "not apologize"}"#,
        "ACCEPT-DEAL",
    ];
    let actions = lines
        .iter()
        .map(|l| parse_action(l).map_err(|e| format!("{l}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    let state = replay(Role::Buyer, DEFAULT_MAX_ROUNDS, actions).map_err(|e| e.to_string())?;
    let want = IssueAllocation {
        refund: RefundLevel::None,
        seller_review: ReviewLevel::Remove,
        buyer_review: ReviewLevel::Remove,
        seller_apology: ApologyLevel::Apologize,
        buyer_apology: ApologyLevel::NotApologize,
    };
    ensure!(
        state.termination()
            == Some(&Termination::Agreement {
                acceptor: Role::Buyer,
                allocation: want
            }),
        "example ends in {:?}",
        state.termination()
    );
    let weights = disputebench_core::RoleMap::new(ImportanceWeights::equal(), ImportanceWeights::equal());
    let outcome = outcome_of(&state, &weights).map_err(|e| e.to_string())?;
    ensure!(
        outcome.kind == OutcomeKind::Agreement && outcome.allocation == Some(want),
        "outcome {outcome:?}"
    );

    let state = replay(Role::Buyer, DEFAULT_MAX_ROUNDS, vec![Action::Message; 50]).map_err(|e| e.to_string())?;
    ensure!(
        state.termination() == Some(&Termination::NoAgreement),
        "50 messages end in {:?}",
        state.termination()
    );
    ensure!(
        state.completed_rounds() == 25,
        "{} rounds completed",
        state.completed_rounds()
    );
    let outcome = outcome_of(&state, &weights).map_err(|e| e.to_string())?;
    ensure!(outcome.kind == OutcomeKind::NoAgreement, "outcome {outcome:?}");
    ensure!(
        replay(Role::Buyer, DEFAULT_MAX_ROUNDS, vec![Action::Message; 51]).is_err(),
        "a 51st turn was accepted"
    );
    Ok(())
}

// ---------------------------------------------------------------- C4

fn names(p: usize) -> Vec<String> {
    std::iter::once("CONST".to_string())
        .chain((1..p).map(|j| format!("x{j}")))
        .collect()
}

/// Solves X'X b = X'y by Gauss-Jordan elimination with partial pivoting.
fn normal_equations(x: &DMatrix<f64>, y: &DVector<f64>) -> Vec<f64> {
    let p = x.ncols();
    let mut a = vec![vec![0.0; p + 1]; p];
    for i in 0..p {
        for j in 0..p {
            a[i][j] = (0..x.nrows()).map(|r| x[(r, i)] * x[(r, j)]).sum();
        }
        a[i][p] = (0..x.nrows()).map(|r| x[(r, i)] * y[r]).sum();
    }
    for col in 0..p {
        let pivot = (col..p)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        for r in 0..p {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=p {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    (0..p).map(|i| a[i][p] / a[i][i]).collect()
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u: f64 = rng.random_range(f64::EPSILON..1.0);
    let v: f64 = rng.random();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

fn random_design(rng: &mut ChaCha8Rng, n: usize, p: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, p, |_, j| if j == 0 { 1.0 } else { gaussian(rng) * (j as f64) })
}

fn c4_ols() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for case in 0..100 {
        let p = rng.random_range(2..=12);
        let n = rng.random_range(p + 5..=200);
        let x = random_design(&mut rng, n, p);
        let y = DVector::from_fn(n, |_, _| 3.0 * gaussian(&mut rng) + 1.0);
        let d = DesignMatrix::new("y", names(p), x.clone(), y.clone()).map_err(|e| e.to_string())?;
        let fit = ols_fit(&d, Robust::Hc1).map_err(|e| e.to_string())?;
        for (c, o) in fit.coefficients.iter().zip(normal_equations(&x, &y)) {
            ensure!(
                (c.estimate - o).abs() <= 1e-8 * o.abs().max(1.0),
                "case {case} {}: {} vs oracle {o}",
                c.name,
                c.estimate
            );
        }
        let resid = &y - &fit.fitted;
        let xte = x.transpose() * resid;
        ensure!(xte.amax() < 1e-8, "case {case}: |X'e| = {}", xte.amax());
    }

    // planted recovery: mean estimate over replications vs truth, in Monte-Carlo standard errors
    let beta = [2.0, -1.5, 0.75, 0.0, 3.0];
    let (n, reps) = (120, 400);
    let x = random_design(&mut rng, n, beta.len());
    let mut draws = vec![Vec::with_capacity(reps); beta.len()];
    for _ in 0..reps {
        let y = DVector::from_fn(n, |i, _| {
            (0..beta.len()).map(|j| x[(i, j)] * beta[j]).sum::<f64>() + 2.0 * gaussian(&mut rng)
        });
        let d = DesignMatrix::new("y", names(beta.len()), x.clone(), y).map_err(|e| e.to_string())?;
        let fit = ols_fit(&d, Robust::Hc1).map_err(|e| e.to_string())?;
        for (j, c) in fit.coefficients.iter().enumerate() {
            draws[j].push(c.estimate);
        }
    }
    for (j, v) in draws.iter().enumerate() {
        let m = v.iter().sum::<f64>() / reps as f64;
        let sd = (v.iter().map(|b| (b - m).powi(2)).sum::<f64>() / (reps - 1) as f64).sqrt();
        let mcse = sd / (reps as f64).sqrt();
        ensure!(
            (m - beta[j]).abs() < 3.0 * mcse,
            "coefficient {j}: mean {m} vs {} (MC SE {mcse})",
            beta[j]
        );
    }
    Ok(())
}

// ---------------------------------------------------------------- C5

fn c5_logit() -> Check {
    let mut rows = Vec::new();
    for (x, y, count) in [(0.0, 1.0, 30), (0.0, 0.0, 70), (1.0, 1.0, 60), (1.0, 0.0, 40)] {
        rows.extend(std::iter::repeat_n((x, y), count));
    }
    let x = DMatrix::from_fn(rows.len(), 2, |i, j| if j == 0 { 1.0 } else { rows[i].0 });
    let y = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.1));
    let d = DesignMatrix::new("y", names(2), x.clone(), y.clone()).map_err(|e| e.to_string())?;
    let fit = logit_fit(&d).map_err(|e| e.to_string())?;
    let slope = fit.coefficients[1].estimate;
    ensure!((slope - 3.5f64.ln()).abs() < 1e-6, "slope {slope}");
    let score_eq = x.transpose() * (&y - &fit.fitted);
    ensure!(score_eq.amax() < 1e-6, "2x2 score {}", score_eq.amax());

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..20 {
        let x = random_design(&mut rng, 200, 4);
        let y = DVector::from_fn(200, |i, _| {
            let eta = -0.2 + 0.7 * x[(i, 1)] - 0.3 * x[(i, 2)];
            f64::from(rng.random_bool(1.0 / (1.0 + (-eta).exp())))
        });
        let d = DesignMatrix::new("y", names(4), x.clone(), y.clone()).map_err(|e| e.to_string())?;
        let fit = logit_fit(&d).map_err(|e| e.to_string())?;
        let s = x.transpose() * (&y - &fit.fitted);
        ensure!(s.amax() < 1e-6, "case {case}: score {}", s.amax());
    }

    let x = DMatrix::from_fn(40, 2, |i, j| if j == 0 { 1.0 } else { i as f64 });
    let y = DVector::from_fn(40, |i, _| f64::from(i >= 20));
    let d = DesignMatrix::new("y", names(2), x, y).map_err(|e| e.to_string())?;
    match logit_fit(&d) {
        Err(StatsError::Separation(_)) => Ok(()),
        other => Err(format!("separated data gave {other:?}")),
    }
}

// ---------------------------------------------------------------- C6

fn synthetic_records(rng: &mut ChaCha8Rng, dialogues: usize) -> Vec<SpeakerRecord> {
    let mut out = Vec::new();
    for d in 0..dialogues {
        let profiles =
            [0, 1].map(|_| PersonalityProfile::new([(); 5].map(|_| TraitLevel::ALL[rng.random_range(0..6)])));
        for (k, role) in Role::BOTH.into_iter().enumerate() {
            let (me, partner) = (profiles[k], profiles[1 - k]);
            let seller = f64::from(role == Role::Seller);
            let agr = me.get(Trait::Agreeableness).value() as f64;
            let y = 50.0 + 2.0 * agr + 3.0 * seller * agr + 5.0 * seller + 4.0 * gaussian(rng);
            out.push(SpeakerRecord {
                dialogue_id: format!("d{d}"),
                source: Source::Simulated,
                role,
                position: if role == Role::Buyer { -1 } else { 1 },
                self_traits: me.into(),
                partner_traits: partner.into(),
                score: Some(y),
                accept: 1,
                not_walk_away: 1,
                coop_ratio: None,
                comp_ratio: None,
                coop_recip: None,
                comp_recip: None,
                escalation: None,
                deescalation: None,
                strategy_counts: [0; 9],
            });
        }
    }
    out
}

fn c6_coding() -> Check {
    ensure!(
        Coding::Effect.code(Role::Buyer) == -1.0 && Coding::Effect.code(Role::Seller) == 1.0,
        "effect codes"
    );
    ensure!(
        Coding::Dummy.code(Role::Buyer) == 0.0 && Coding::Dummy.code(Role::Seller) == 1.0,
        "dummy codes"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let records = synthetic_records(&mut rng, 300);
    for coding in [Coding::Effect, Coding::Dummy] {
        let options = DesignOptions {
            coding,
            standardize: false,
            interactions: true,
        };
        let design = build_design(&records, "score", options).map_err(|e| e.to_string())?;
        let pos = design.column_index("POSITION").ok_or("no POSITION column")?;
        for (i, r) in records.iter().enumerate() {
            ensure!(design.x[(i, pos)] == coding.code(r.role), "{coding:?} row {i} POSITION");
        }
        let fit = ols_fit(&design, Robust::Hc1).map_err(|e| e.to_string())?;
        for t in Trait::ALL {
            let b = fit.coefficient(&self_column(t)).ok_or("missing main effect")?.estimate;
            let g = fit
                .coefficient(&interaction_column(t))
                .ok_or("missing interaction")?
                .estimate;
            let [buyer, seller] = simple_effects(&fit, t).map_err(|e| e.to_string())?;
            let (cb, cs) = (coding.code(Role::Buyer), coding.code(Role::Seller));
            ensure!(buyer.name == format!("Buyer@POS={cb}"), "name {}", buyer.name);
            ensure!(seller.name == format!("Seller@POS={cs}"), "name {}", seller.name);
            ensure!(
                seller.estimate == b + g,
                "{coding:?} {t:?}: Seller {} != {b} + {g}",
                seller.estimate
            );
            let want_buyer = if coding == Coding::Dummy { b } else { b - g };
            ensure!(
                buyer.estimate == want_buyer,
                "{coding:?} {t:?}: Buyer {} != {want_buyer}",
                buyer.estimate
            );
        }
        if coding == Coding::Dummy {
            // planted: AGR effect 2 for the Buyer, 2 + 3 for the Seller
            let [buyer, seller] = simple_effects(&fit, Trait::Agreeableness).map_err(|e| e.to_string())?;
            ensure!(
                (buyer.estimate - 2.0).abs() < 3.0 * buyer.se,
                "Buyer AGR {}",
                buyer.estimate
            );
            ensure!(
                (seller.estimate - 5.0).abs() < 3.0 * seller.se,
                "Seller AGR {}",
                seller.estimate
            );
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- C7

fn c7_annotation() -> Check {
    use IrpStrategy::*;
    let mut m = ConfusionMatrix::default();
    m.add(Proposal, Proposal, 3);
    m.add(Proposal, Facts, 1);
    m.add(Facts, Facts, 2);
    m.add(Facts, Proposal, 1);
    m.add(Power, Power, 2);
    let r = report_from_confusion(m).map_err(|e| e.to_string())?;
    let want = [(Proposal, 0.75), (Facts, 2.0 / 3.0), (Power, 1.0)];
    for (s, f1) in want {
        let got = r.class(s).ok_or("missing class")?.f1;
        ensure!((got - f1).abs() < 1e-12, "{s:?} F1 {got} != {f1}");
    }
    let macro_f1 = (0.75 + 2.0 / 3.0 + 1.0) / 3.0;
    ensure!((r.macro_f1 - macro_f1).abs() < 1e-12, "macro F1 {}", r.macro_f1);
    ensure!((r.accuracy - 7.0 / 9.0).abs() < 1e-12, "accuracy {}", r.accuracy);

    let corpus = table_one_corpus();
    let labeled: Vec<Dialogue> = corpus.iter().map(annotate_rules).collect();
    ensure!(
        labeled.iter().all(Dialogue::is_annotated),
        "rule annotator left segments unlabeled"
    );
    let r = classification_report(&labeled, &labeled).map_err(|e| e.to_string())?;
    ensure!(r.macro_f1 == 1.0, "self-agreement macro F1 {}", r.macro_f1);

    let examples = [
        (
            "The best offer I can give you is a partial refund, how does that sound?",
            Proposal,
        ),
        ("Ok fine, I will give you a refund instead.", Concession),
        ("I understand you want this refund because of your nephew", Interests),
        (
            "You and I both want to conclude this conversation well.",
            PositiveExpectations,
        ),
        ("The product you bought was not from my website.", Facts),
        ("Hello, can we please talk about this issue?", Procedural),
        ("You are a liar, I will write more negative things about you!", Power),
        ("According to the policy, I cannot give you a refund", Rights),
        ("I am sorry", Residual),
    ];
    for (text, want) in examples {
        let got = classify_segment(text);
        ensure!(got == want, "{text:?} -> {got:?}, expected {want:?}");
    }
    Ok(())
}

fn table_one_corpus() -> Vec<Dialogue> {
    let fixture = include_str!("../../core/tests/fixtures/utterances.txt");
    let lines: Vec<&str> = fixture.lines().filter(|l| !l.trim().is_empty()).collect();
    lines
        .chunks(6)
        .enumerate()
        .map(|(i, chunk)| {
            let turns = chunk
                .iter()
                .enumerate()
                .map(|(index, text)| {
                    let mut segments = segment_utterance(text);
                    if segments.is_empty() {
                        segments.push(Segment::new(*text));
                    }
                    Turn {
                        index,
                        speaker: if index % 2 == 0 { Role::Buyer } else { Role::Seller },
                        text: text.to_string(),
                        action: Action::Message,
                        segments,
                    }
                })
                .collect();
            Dialogue {
                id: format!("u{i}"),
                source: Source::HumanCorpus,
                profiles: None,
                importance: None,
                turns,
                outcome: Outcome::no_agreement(),
                meta: None,
            }
        })
        .collect()
}

// ---------------------------------------------------------------- C8

fn c8_a_kappa() -> Check {
    for prevalence in [0.01, 0.2, 0.5, 0.9, 1.0] {
        let items: Vec<AnnotationJudgment> = (0..1000)
            .map(|i| {
                let v = (i as f64) < prevalence * 1000.0;
                AnnotationJudgment::new(format!("i{i}"), vec![v, v, v])
            })
            .collect();
        let k = a_kappa(&items).map_err(|e| e.to_string())?;
        ensure!(
            (k - 1.0).abs() < 1e-12,
            "perfect agreement at prevalence {prevalence}: {k}"
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for q in [0.5, 0.7, 0.9, 0.97] {
        let items: Vec<AnnotationJudgment> = (0..10_000)
            .map(|i| AnnotationJudgment::new(format!("i{i}"), vec![rng.random_bool(q), rng.random_bool(q)]))
            .collect();
        let k = a_kappa(&items).map_err(|e| e.to_string())?;
        // two independent raters agree with probability q^2 + (1-q)^2; chance level is 1/2
        let p_o = q * q + (1.0 - q) * (1.0 - q);
        let expected = (p_o - 0.5) / 0.5;
        ensure!((k - expected).abs() <= 0.05, "q = {q}: {k} vs expected {expected}");
    }
    Ok(())
}

// ---------------------------------------------------------------- C9

fn c9_persona() -> Check {
    let pair = AdjectivePair {
        low: "quiet".into(),
        high: "talkative".into(),
    };
    let want = [
        "very quiet",
        "quiet",
        "a bit quiet",
        "a bit talkative",
        "talkative",
        "very talkative",
    ];
    for (level, w) in TraitLevel::ALL.iter().zip(want) {
        let got = render_adjective(&pair, *level);
        ensure!(got == w, "level {}: {got:?}", level.value());
    }

    let target = [
        [1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
        [6.0, 5.0, 4.0, 3.0, 2.0, 1.0],
        [1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
        [0.5, 3.0, 0.0, 2.0, 8.0, 1.5],
        [10.0, 1.0, 1.0, 1.0, 1.0, 10.0],
    ];
    let dist = TraitDistribution::new(target).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let draws = 100_000;
    let mut counts = [[0u64; 6]; 5];
    for _ in 0..draws {
        let p = sample_profile_with(&dist, &mut rng).map_err(|e| e.to_string())?;
        for t in Trait::ALL {
            counts[t.index()][p.get(t).index()] += 1;
        }
    }
    for t in Trait::ALL {
        let w = target[t.index()];
        let total: f64 = w.iter().sum();
        let tv: f64 = (0..6)
            .map(|k| (counts[t.index()][k] as f64 / draws as f64 - w[k] / total).abs())
            .sum::<f64>()
            / 2.0;
        ensure!(tv < 0.02, "{t:?}: TV distance {tv}");
    }

    ensure!(
        AGREEABLENESS_APOLOGY_SLOPE == 2.13,
        "slope {AGREEABLENESS_APOLOGY_SLOPE}"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..2000 {
        let mut p = PersonalityProfile::new([(); 5].map(|_| TraitLevel::ALL[rng.random_range(0..6)]));
        let role = Role::BOTH[rng.random_range(0..2)];
        let seed = rng.random();
        let w = assign_importance(&p, role, seed);
        let sum: f64 = w.as_array().iter().sum();
        ensure!((sum - 100.0).abs() <= 1e-9, "weights sum to {sum}");

        let apology = Issue::apology_received_by(role).index();
        let base = raw_importance(&p, role, seed);
        let a0 = p.get(Trait::Agreeableness).value() as f64;
        let other = TraitLevel::ALL[rng.random_range(0..6)];
        p.set(Trait::Agreeableness, other);
        let moved = raw_importance(&p, role, seed);
        let delta = 2.13 * (other.value() as f64 - a0);
        ensure!(
            (moved[apology] - base[apology] - delta).abs() < 1e-12,
            "apology weight moved {} for an agreeableness change giving {delta}",
            moved[apology] - base[apology]
        );
        for i in (0..5).filter(|i| *i != apology) {
            ensure!(moved[i] == base[i], "issue {i} depends on agreeableness");
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- C10

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_disputebench")
}

fn run(args: &[&str]) -> Result<(), String> {
    let out = Command::new(bin()).args(args).output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(())
}

/// simulate -> annotate -> analyze into `dir`; returns the data files keyed by name (configs excluded,
/// since they record paths and parallelism).
fn pipeline(dir: &Path, seed: u64, parallelism: usize) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let p = |name: &str| dir.join(name).to_string_lossy().into_owned();
    let (seed, par) = (seed.to_string(), parallelism.to_string());
    run(&[
        "simulate",
        "--scripted",
        "--n",
        "100",
        "--seed",
        &seed,
        "--parallelism",
        &par,
        "--out",
        &p("sim.jsonl"),
    ])?;
    run(&[
        "annotate",
        "--input",
        &p("sim.jsonl"),
        "--out",
        &p("labeled.jsonl"),
        "--annotator",
        "rules",
    ])?;
    run(&["analyze", "--input", &p("labeled.jsonl"), "--out-dir", &p("analysis")])?;
    let mut files = BTreeMap::new();
    let mut stack: Vec<PathBuf> = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).map_err(|e| e.to_string())? {
            let path = entry.map_err(|e| e.to_string())?.path();
            if path.is_dir() {
                stack.push(path);
            } else if !path.to_string_lossy().ends_with("config.toml") {
                let key = path.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                files.insert(key, std::fs::read(&path).map_err(|e| e.to_string())?);
            }
        }
    }
    Ok(files)
}

fn check_rows_sum(path: &Path, first_share: usize) -> Check {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let mut rows = 0;
    for line in text.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        if cells[first_share..].contains(&"NA") {
            continue;
        }
        let sum: f64 = cells[first_share..].iter().map(|c| c.parse::<f64>().unwrap()).sum();
        ensure!(
            (sum - 100.0).abs() <= 1e-9,
            "{}: row {line:?} sums to {sum}",
            path.display()
        );
        rows += 1;
    }
    ensure!(rows > 0, "{} has no complete rows", path.display());
    Ok(())
}

fn c10_end_to_end() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let start = Instant::now();
    let a = pipeline(&tmp.path().join("a"), 42, 1)?;
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(60), "pipeline took {took:?}");
    let b = pipeline(&tmp.path().join("b"), 42, 1)?;
    let c = pipeline(&tmp.path().join("c"), 42, 4)?;
    for (name, other) in [("repeat", &b), ("parallelism 4", &c)] {
        ensure!(
            a.keys().eq(other.keys()),
            "{name}: file sets differ: {:?} vs {:?}",
            a.keys().collect::<Vec<_>>(),
            other.keys().collect::<Vec<_>>()
        );
        for (file, bytes) in &a {
            ensure!(bytes == &other[file], "{name}: {file} differs");
        }
    }
    for needed in [
        "sim.jsonl",
        "labeled.jsonl",
        "analysis/regressions.csv",
        "analysis/heatmap.csv",
    ] {
        ensure!(a.contains_key(needed), "missing output {needed}");
    }
    let analysis = tmp.path().join("a/analysis");
    check_rows_sum(&analysis.join("heatmap.csv"), 3)?;
    check_rows_sum(&analysis.join("stages.csv"), 3)?;
    Ok(())
}

// ----------------------------------------------------------------

fn main() {
    let criteria: [Criterion; 10] = [
        ("C1 metric-oracle equivalence", c1_metric_oracle),
        ("C2 score contract", c2_score_contract),
        ("C3 state-machine conformance", c3_state_machine),
        ("C4 OLS correctness", c4_ols),
        ("C5 logit correctness", c5_logit),
        ("C6 coding conventions", c6_coding),
        ("C7 annotation evaluation", c7_annotation),
        ("C8 A-Kappa", c8_a_kappa),
        ("C9 persona pipeline", c9_persona),
        ("C10 end-to-end determinism", c10_end_to_end),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(()) => println!("PASS {name} ({secs:.2}s)"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name} ({secs:.2}s): {why}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
