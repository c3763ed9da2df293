use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use disputebench_core::annotate::{annotate_llm, annotate_rules, AnnotationPrompt, DEFINITIONS};
use disputebench_core::corpus::{load_corpus, write_corpus, Dialogue, IrpStrategy};
use disputebench_core::gateway::{ProviderConfig, ProviderRegistry};

use crate::config::{resolve, save, Flags};
use crate::{sidecar, write_csv};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Annotator {
    Rules,
    Llm,
}

#[derive(Debug, Clone, Args)]
pub struct AnnotateArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub annotator: Option<Annotator>,
    /// Relabel segments that already carry a strategy.
    #[arg(long)]
    pub reannotate: bool,
    #[arg(long)]
    pub provider: Option<String>,
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub parallelism: Option<usize>,
    /// Prompt template file with {definitions}, {conversation}, {segment} and {speaker} placeholders.
    #[arg(long)]
    pub template: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnotateConfig {
    pub input: PathBuf,
    pub out: PathBuf,
    pub annotator: Annotator,
    pub reannotate: bool,
    pub parallelism: usize,
    pub template: String,
    pub provider: ProviderConfig,
}

impl Default for AnnotateConfig {
    fn default() -> Self {
        AnnotateConfig {
            input: PathBuf::from("corpus.jsonl"),
            out: PathBuf::from("annotated.jsonl"),
            annotator: Annotator::Rules,
            reannotate: false,
            parallelism: 1,
            template: "builtin".into(),
            provider: ProviderConfig::new("openai", "gpt-4o"),
        }
    }
}

impl AnnotateArgs {
    pub fn resolve(&self, file: Option<&Path>) -> Result<AnnotateConfig> {
        let mut f = Flags::default();
        f.set("input", self.input.as_ref().map(|p| p.display().to_string()))
            .set("out", self.out.as_ref().map(|p| p.display().to_string()))
            .set(
                "annotator",
                self.annotator.map(|a| match a {
                    Annotator::Rules => "rules",
                    Annotator::Llm => "llm",
                }),
            )
            .set("reannotate", self.reannotate.then_some(true))
            .set("parallelism", self.parallelism.map(|p| p as i64))
            .set("template", self.template.clone())
            .set_in("provider", "provider", self.provider.clone())
            .set_in("provider", "model", self.model.clone());
        let cfg: AnnotateConfig = resolve(&AnnotateConfig::default(), file, "annotate", f.0)?;
        if cfg.parallelism == 0 {
            bail!("parallelism must be at least 1");
        }
        Ok(cfg)
    }
}

/// Labeled-segment counts per strategy.
pub fn coverage(corpus: &[Dialogue]) -> (usize, usize, [usize; IrpStrategy::COUNT]) {
    let mut counts = [0; IrpStrategy::COUNT];
    let mut total = 0;
    let mut labeled = 0;
    for d in corpus {
        for (_, s) in d.segments() {
            total += 1;
            if let Some(x) = s.strategy {
                labeled += 1;
                counts[x.index()] += 1;
            }
        }
    }
    (total, labeled, counts)
}

fn write_coverage(path: &Path, corpus: &[Dialogue]) -> Result<String> {
    let (total, labeled, counts) = coverage(corpus);
    let mut rows = vec![vec!["all".to_string(), labeled.to_string(), total.to_string()]];
    for s in IrpStrategy::ALL {
        rows.push(vec![
            s.name().to_string(),
            counts[s.index()].to_string(),
            total.to_string(),
        ]);
    }
    write_csv(path, &["strategy", "segments", "total_segments"], &rows)?;
    let pct = if total == 0 {
        100.0
    } else {
        100.0 * labeled as f64 / total as f64
    };
    Ok(format!("{labeled}/{total} segments labeled ({pct:.1}%)"))
}

fn load_prompt(source: &str) -> Result<AnnotationPrompt> {
    if source == "builtin" {
        return Ok(AnnotationPrompt::default());
    }
    let text = std::fs::read_to_string(source).with_context(|| format!("reading template {source}"))?;
    Ok(AnnotationPrompt::new(text, DEFINITIONS.trim_end())?)
}

fn label_llm(cfg: &AnnotateConfig, corpus: &[Dialogue], registry: &ProviderRegistry) -> Result<Vec<Dialogue>> {
    cfg.provider.validate()?;
    if ProviderRegistry::needs_credential(&cfg.provider.provider) {
        cfg.provider.credential()?;
    }
    let provider = registry.get(&cfg.provider.provider)?;
    let prompt = load_prompt(&cfg.template)?;
    let next = AtomicUsize::new(0);
    let results = Mutex::new(vec![None; corpus.len()]);
    std::thread::scope(|scope| {
        for _ in 0..cfg.parallelism.min(corpus.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(d) = corpus.get(i) else { break };
                let r = annotate_llm(d, provider.as_ref(), &cfg.provider, &prompt);
                results.lock().expect("no worker panicked")[i] = Some(r);
            });
        }
    });
    let mut out = Vec::with_capacity(corpus.len());
    let mut failed = Vec::new();
    for (d, r) in corpus.iter().zip(results.into_inner().expect("no worker panicked")) {
        match r.expect("every dialogue processed") {
            Ok(a) => {
                for w in &a.warnings {
                    eprintln!("warning: {w}");
                }
                out.push(a.dialogue);
            }
            Err(e) => {
                eprintln!("failed: {e}");
                failed.push(d.id.clone());
                out.push(d.clone());
            }
        }
    }
    if !failed.is_empty() {
        bail!(
            "{} dialogue(s) could not be annotated: {}",
            failed.len(),
            failed.join(", ")
        );
    }
    Ok(out)
}

pub fn run(args: &AnnotateArgs, config: Option<&Path>, registry: &ProviderRegistry) -> Result<()> {
    let cfg = args.resolve(config)?;
    let corpus = load_corpus(&cfg.input)?;
    save(&cfg, "annotate", &sidecar(&cfg.out, "config.toml"))?;
    let already = !corpus.is_empty() && corpus.iter().all(Dialogue::is_annotated);
    let labeled = if already && !cfg.reannotate {
        println!("input is already annotated; copying it unchanged (pass --reannotate to relabel)");
        corpus
    } else {
        match cfg.annotator {
            Annotator::Rules => corpus.iter().map(annotate_rules).collect(),
            Annotator::Llm => label_llm(&cfg, &corpus, registry)?,
        }
    };
    for d in &labeled {
        d.validate()
            .with_context(|| format!("annotated dialogue {} is invalid", d.id))?;
    }
    write_corpus(&labeled, &cfg.out)?;
    println!("{}", write_coverage(&sidecar(&cfg.out, "coverage.csv"), &labeled)?);
    Ok(())
}
