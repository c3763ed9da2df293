use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;

use crate::write_csv;

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Analysis output directories (at least two), e.g. a human corpus and a simulated one.
    #[arg(long = "input", required = true, num_args = 1..)]
    pub inputs: Vec<PathBuf>,
    /// Names for the inputs, in order; defaults to the directory names.
    #[arg(long, value_delimiter = ',')]
    pub labels: Vec<String>,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Significance level used for the overlap listing.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
}

/// `*`, `**`, `***` for p below .05, .01 and .001 (strict).
pub fn stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

/// (variant, dv, coding) identifies one fitted model.
type ModelKey = (String, String, String);

#[derive(Debug, Clone)]
struct Row {
    iv: String,
    beta: String,
    p: f64,
}

struct Table {
    order: Vec<ModelKey>,
    models: BTreeMap<ModelKey, Vec<Row>>,
}

fn read_regressions(dir: &Path) -> Result<Table> {
    let path = dir.join("regressions.csv");
    let mut reader = csv::Reader::from_path(&path).with_context(|| format!("reading {}", path.display()))?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .with_context(|| format!("{}: missing column {name}", path.display()))
    };
    let (variant, dv, iv, beta, p, coding) = (
        col("variant")?,
        col("dv")?,
        col("iv")?,
        col("beta")?,
        col("p")?,
        col("coding")?,
    );
    let mut order = Vec::new();
    let mut models: BTreeMap<ModelKey, Vec<Row>> = BTreeMap::new();
    for rec in reader.records() {
        let rec = rec?;
        let key = (rec[variant].to_string(), rec[dv].to_string(), rec[coding].to_string());
        if !models.contains_key(&key) {
            order.push(key.clone());
        }
        let pv: f64 = rec[p]
            .parse()
            .with_context(|| format!("{}: bad p value {:?}", path.display(), &rec[p]))?;
        models.entry(key).or_default().push(Row {
            iv: rec[iv].to_string(),
            beta: rec[beta].to_string(),
            p: pv,
        });
    }
    Ok(Table { order, models })
}

fn significant(rows: &[Row], alpha: f64) -> BTreeSet<String> {
    rows.iter()
        .filter(|r| r.iv != "CONST" && r.p < alpha)
        .map(|r| r.iv.clone())
        .collect()
}

fn join(set: &BTreeSet<String>) -> String {
    set.iter().cloned().collect::<Vec<_>>().join(" ")
}

pub fn run(args: &ReportArgs) -> Result<()> {
    if args.inputs.len() < 2 {
        bail!("report needs at least two analysis directories");
    }
    let labels: Vec<String> = if args.labels.is_empty() {
        args.inputs
            .iter()
            .enumerate()
            .map(|(i, p)| {
                p.file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_else(|| format!("input{}", i + 1))
            })
            .collect()
    } else if args.labels.len() == args.inputs.len() {
        args.labels.clone()
    } else {
        bail!("{} labels for {} inputs", args.labels.len(), args.inputs.len());
    };
    if labels.iter().collect::<BTreeSet<_>>().len() != labels.len() {
        bail!("input labels must be distinct; pass --labels");
    }
    let tables: Vec<Table> = args.inputs.iter().map(|d| read_regressions(d)).collect::<Result<_>>()?;

    let mut notes = String::new();
    let shared: Vec<ModelKey> = tables[0]
        .order
        .iter()
        .filter(|k| tables.iter().all(|t| t.models.contains_key(*k)))
        .cloned()
        .collect();
    for (label, t) in labels.iter().zip(&tables) {
        for key in &t.order {
            if !shared.contains(key) {
                writeln!(
                    notes,
                    "dropped: {} {} ({}) appears only in some inputs, e.g. {label}",
                    key.1, key.0, key.2
                )?;
            }
        }
    }

    let mut header = vec!["variant".to_string(), "dv".into(), "iv".into(), "coding".into()];
    for l in &labels {
        header.extend([format!("{l}_beta"), format!("{l}_p"), format!("{l}_stars")]);
    }
    let mut comparison = Vec::new();
    let mut overlap = Vec::new();
    let mut totals = (0usize, 0usize);
    for key in &shared {
        let ivs: Vec<String> = tables[0].models[key]
            .iter()
            .map(|r| r.iv.clone())
            .filter(|iv| tables.iter().all(|t| t.models[key].iter().any(|r| &r.iv == iv)))
            .collect();
        for iv in &ivs {
            let mut row = vec![key.0.clone(), key.1.clone(), iv.clone(), key.2.clone()];
            for t in &tables {
                let r = t.models[key].iter().find(|r| &r.iv == iv).expect("filtered above");
                row.extend([r.beta.clone(), r.p.to_string(), stars(r.p).to_string()]);
            }
            comparison.push(row);
        }
        let sets: Vec<BTreeSet<String>> = tables
            .iter()
            .map(|t| {
                let rows: Vec<Row> = t.models[key].iter().filter(|r| ivs.contains(&r.iv)).cloned().collect();
                significant(&rows, args.alpha)
            })
            .collect();
        let both = sets
            .iter()
            .skip(1)
            .fold(sets[0].clone(), |acc, s| acc.intersection(s).cloned().collect());
        let any: BTreeSet<String> = sets.iter().flatten().cloned().collect();
        let pct = if any.is_empty() {
            100.0
        } else {
            100.0 * both.len() as f64 / any.len() as f64
        };
        totals.0 += both.len();
        totals.1 += any.len();
        let mut row = vec![key.0.clone(), key.1.clone(), key.2.clone()];
        row.extend(sets.iter().map(join));
        row.extend([join(&both), pct.to_string()]);
        overlap.push(row);
    }
    std::fs::create_dir_all(&args.out_dir)?;
    let header_ref: Vec<&str> = header.iter().map(String::as_str).collect();
    write_csv(&args.out_dir.join("comparison.csv"), &header_ref, &comparison)?;
    let mut oh = vec!["variant".to_string(), "dv".into(), "coding".into()];
    oh.extend(labels.iter().map(|l| format!("{l}_significant")));
    oh.extend(["shared".to_string(), "overlap_pct".into()]);
    let oh_ref: Vec<&str> = oh.iter().map(String::as_str).collect();
    write_csv(&args.out_dir.join("overlap.csv"), &oh_ref, &overlap)?;

    let overall = if totals.1 == 0 {
        100.0
    } else {
        100.0 * totals.0 as f64 / totals.1 as f64
    };
    let mut summary = format!(
        "compared {} models across {}; significant predictors (p < {}) overlap {:.1}% overall\n",
        shared.len(),
        labels.join(", "),
        args.alpha,
        overall
    );
    summary.push_str(&notes);
    std::fs::write(args.out_dir.join("report.txt"), &summary)?;
    print!("{summary}");
    Ok(())
}
