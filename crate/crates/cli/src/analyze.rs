use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Result};
use clap::Args;
use serde::{Deserialize, Serialize};

use disputebench_core::corpus::{load_corpus, Dialogue, IrpStrategy, Role, Trait, TraitLevel, TraitScale};
use disputebench_core::metrics::{
    build_speaker_records, stage_counts, trait_heatmap, SpeakerRecord, StageCounts, TraitThreshold, DV_NAMES,
};
use disputebench_core::stats::{
    regression_battery, simple_effect_rows, simple_effects, Coding, DesignOptions, RegressionResult, Robust,
    SIMPLE_EFFECT_HEADER,
};

use crate::config::{resolve, save, Flags};
use crate::write_csv;

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    /// Annotated corpus.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Directory for the output tables.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Position coding for the main models: effect (Buyer -1, Seller +1) or dummy (Buyer 0, Seller 1).
    #[arg(long, value_parser = ["effect", "dummy"])]
    pub coding: Option<String>,
    /// Covariance for OLS models: hc1 or none.
    #[arg(long, value_parser = ["hc1", "none"])]
    pub robust: Option<String>,
    /// z-score trait predictors (true/false).
    #[arg(long)]
    pub standardize: Option<bool>,
    /// Also fit trait x position interactions under both codings and report simple effects.
    #[arg(long)]
    pub role_contingent: bool,
    /// Number of temporal stages.
    #[arg(long)]
    pub stages: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeConfig {
    pub input: PathBuf,
    pub out_dir: PathBuf,
    pub coding: Coding,
    pub robust: Robust,
    pub standardize: bool,
    pub role_contingent: bool,
    pub stages: usize,
    /// Six-point level at or above which a trait counts as high.
    pub high_level: i8,
    /// Human 1-5 score above which a trait counts as high.
    pub high_human: f64,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        AnalyzeConfig {
            input: PathBuf::from("annotated.jsonl"),
            out_dir: PathBuf::from("analysis"),
            coding: Coding::Effect,
            robust: Robust::Hc1,
            standardize: true,
            role_contingent: false,
            stages: 5,
            high_level: 2,
            high_human: 3.5,
        }
    }
}

impl AnalyzeArgs {
    pub fn resolve(&self, file: Option<&Path>) -> Result<AnalyzeConfig> {
        let mut f = Flags::default();
        f.set("input", self.input.as_ref().map(|p| p.display().to_string()))
            .set("out_dir", self.out_dir.as_ref().map(|p| p.display().to_string()))
            .set("coding", self.coding.clone())
            .set("robust", self.robust.clone())
            .set("standardize", self.standardize)
            .set("role_contingent", self.role_contingent.then_some(true))
            .set("stages", self.stages.map(|s| s as i64));
        let cfg: AnalyzeConfig = resolve(&AnalyzeConfig::default(), file, "analyze", f.0)?;
        if cfg.stages == 0 {
            bail!("stages must be at least 1");
        }
        TraitLevel::new(cfg.high_level)?;
        Ok(cfg)
    }
}

/// Table label of one regression run.
fn spec_rows(
    variant: &str,
    results: &[(String, Result<RegressionResult, disputebench_core::stats::StatsError>)],
) -> (Vec<Vec<String>>, Vec<Vec<String>>) {
    let mut rows = Vec::new();
    let mut diagnostics = Vec::new();
    for (dv, r) in results {
        match r {
            Ok(res) => {
                for row in res.csv_rows() {
                    rows.push(std::iter::once(variant.to_string()).chain(row).collect());
                }
                for w in &res.warnings {
                    diagnostics.push(vec![
                        variant.into(),
                        dv.clone(),
                        res.coding.name().into(),
                        "warning".into(),
                        w.clone(),
                    ]);
                }
            }
            Err(e) => diagnostics.push(vec![
                variant.into(),
                dv.clone(),
                String::new(),
                "error".into(),
                e.to_string(),
            ]),
        }
    }
    (rows, diagnostics)
}

pub fn regression_header() -> Vec<&'static str> {
    std::iter::once("variant").chain(RegressionResult::CSV_HEADER).collect()
}

fn strategy_header(lead: &[&'static str]) -> Vec<&'static str> {
    lead.iter()
        .copied()
        .chain(IrpStrategy::ALL.iter().map(|s| s.name()))
        .collect()
}

fn fmt_share(v: Option<f64>) -> String {
    v.map(|x| x.to_string())
        .unwrap_or_else(|| disputebench_core::metrics::MISSING.to_string())
}

fn stage_rows(corpus: &[Dialogue], n: usize) -> Result<Vec<Vec<String>>> {
    let mut rows = Vec::new();
    for (label, speaker) in [
        ("all", None),
        ("Buyer", Some(Role::Buyer)),
        ("Seller", Some(Role::Seller)),
    ] {
        let mut total = StageCounts::zeros(n);
        for d in corpus {
            total.add(&stage_counts(d, speaker, n)?);
        }
        let dist = total.distribution();
        for (i, (counts, shares)) in total.counts.iter().zip(&dist.rows).enumerate() {
            let mut row = vec![
                label.to_string(),
                (i + 1).to_string(),
                counts.iter().sum::<u64>().to_string(),
            ];
            row.extend((0..IrpStrategy::COUNT).map(|k| fmt_share(shares.map(|s| s[k]))));
            rows.push(row);
        }
    }
    Ok(rows)
}

pub fn run(args: &AnalyzeArgs, config: Option<&Path>) -> Result<()> {
    let cfg = args.resolve(config)?;
    let corpus = load_corpus(&cfg.input)?;
    fs::create_dir_all(&cfg.out_dir)?;
    save(&cfg, "analyze", &cfg.out_dir.join("config.toml"))?;
    let out = |name: &str| cfg.out_dir.join(name);

    let records = build_speaker_records(&corpus)?;
    let header = SpeakerRecord::csv_header();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    write_csv(
        &out("records.csv"),
        &header,
        &records.iter().map(SpeakerRecord::csv_row).collect::<Vec<_>>(),
    )?;

    let main = DesignOptions {
        coding: cfg.coding,
        standardize: cfg.standardize,
        interactions: false,
    };
    let (mut rows, mut diagnostics) = spec_rows("main", &regression_battery(&records, &DV_NAMES, main, cfg.robust));
    let mut effects = Vec::new();
    if cfg.role_contingent {
        for coding in [Coding::Effect, Coding::Dummy] {
            let options = DesignOptions {
                coding,
                standardize: cfg.standardize,
                interactions: true,
            };
            let results = regression_battery(&records, &DV_NAMES, options, cfg.robust);
            let (r, d) = spec_rows("interaction", &results);
            rows.extend(r);
            diagnostics.extend(d);
            for (dv, res) in &results {
                let Ok(res) = res else { continue };
                for t in Trait::ALL {
                    match simple_effects(res, t) {
                        Ok(e) => effects.extend(simple_effect_rows(res, t, &e)),
                        Err(e) => diagnostics.push(vec![
                            "simple-effect".into(),
                            dv.clone(),
                            coding.name().into(),
                            "error".into(),
                            format!("{}: {e}", t.code()),
                        ]),
                    }
                }
            }
        }
    }
    write_csv(&out("regressions.csv"), &regression_header(), &rows)?;
    write_csv(
        &out("diagnostics.csv"),
        &["variant", "dv", "coding", "kind", "message"],
        &diagnostics,
    )?;
    if cfg.role_contingent {
        write_csv(&out("simple_effects.csv"), &SIMPLE_EFFECT_HEADER, &effects)?;
    } else if out("simple_effects.csv").exists() {
        fs::remove_file(out("simple_effects.csv"))?;
    }

    let level = TraitLevel::new(cfg.high_level)?;
    let human = cfg.high_human;
    let heat = trait_heatmap(&records, |scale| match scale {
        TraitScale::SixPoint => TraitThreshold::LevelAtLeast(level),
        TraitScale::HumanDecimal => TraitThreshold::HumanAbove(human),
    })?;
    let heat_rows: Vec<Vec<String>> = heat
        .iter()
        .map(|r| {
            let mut row = vec![
                format!("high_{}", r.group.code()),
                r.speakers.to_string(),
                r.counts.iter().sum::<u64>().to_string(),
            ];
            row.extend((0..IrpStrategy::COUNT).map(|k| fmt_share(r.shares.map(|s| s[k]))));
            row
        })
        .collect();
    write_csv(
        &out("heatmap.csv"),
        &strategy_header(&["group", "speakers", "segments"]),
        &heat_rows,
    )?;
    write_csv(
        &out("stages.csv"),
        &strategy_header(&["speaker", "stage", "segments"]),
        &stage_rows(&corpus, cfg.stages)?,
    )?;

    let failed = diagnostics.iter().filter(|d| d[3] == "error").count();
    println!(
        "{} speaker records; {} coefficient rows; {} model error(s) listed in diagnostics.csv",
        records.len(),
        rows.len(),
        failed
    );
    Ok(())
}
