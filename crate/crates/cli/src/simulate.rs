use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::{Deserialize, Serialize};

use disputebench_core::corpus::{load_corpus, write_corpus, Dialogue, Role, RoleMap};
use disputebench_core::gateway::{
    dialogue_seed, resume, run_batch, AgentSpec, Checkpoint, ProviderConfig, ProviderRegistry, Scenario,
    SimulationConfig,
};
use disputebench_core::negotiation::{OutcomeKind, DEFAULT_MAX_ROUNDS};
use disputebench_core::persona::{AdjectiveLexicon, TraitDistribution};

use crate::config::{resolve, save, Flags};
use crate::sidecar;

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Output corpus (JSON lines).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Number of dialogues.
    #[arg(long)]
    pub n: Option<usize>,
    /// Root seed; every dialogue seed is derived from it.
    #[arg(long, value_parser = clap::value_parser!(u64).range(..=i64::MAX as u64))]
    pub seed: Option<u64>,
    /// Use deterministic personality-driven scripted agents instead of a model.
    #[arg(long)]
    pub scripted: bool,
    /// Provider id for live runs (openai, openai-compatible, anthropic, mock, echo).
    #[arg(long)]
    pub provider: Option<String>,
    /// Model name for live runs.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub parallelism: Option<usize>,
    #[arg(long)]
    pub max_rounds: Option<u32>,
    /// Trait histogram file (JSON); "uniform" for equal weights.
    #[arg(long)]
    pub distribution: Option<String>,
    /// Resume the dialogues stored in this checkpoint file and merge them into the output corpus.
    #[arg(long)]
    pub resume: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub out: PathBuf,
    pub n: usize,
    pub seed: u64,
    pub scripted: bool,
    pub parallelism: usize,
    pub max_rounds: u32,
    pub opener: Role,
    pub id_prefix: String,
    pub distribution: String,
    pub lexicon: String,
    pub scenario: Scenario,
    pub buyer: ProviderConfig,
    pub seller: ProviderConfig,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig {
            out: PathBuf::from("corpus.jsonl"),
            n: 10,
            seed: 0,
            scripted: false,
            parallelism: 1,
            max_rounds: DEFAULT_MAX_ROUNDS,
            opener: Role::Buyer,
            id_prefix: "sim".into(),
            distribution: "uniform".into(),
            lexicon: "builtin".into(),
            scenario: Scenario::default(),
            buyer: ProviderConfig::new("openai", "gpt-4o"),
            seller: ProviderConfig::new("openai", "gpt-4o"),
        }
    }
}

impl SimulateArgs {
    pub fn resolve(&self, file: Option<&Path>) -> Result<SimulateConfig> {
        let mut f = Flags::default();
        f.set("out", self.out.as_ref().map(|p| p.display().to_string()))
            .set("n", self.n.map(|n| n as i64))
            .set("seed", self.seed.map(|s| s as i64))
            .set("scripted", self.scripted.then_some(true))
            .set("parallelism", self.parallelism.map(|p| p as i64))
            .set("max_rounds", self.max_rounds.map(i64::from))
            .set("distribution", self.distribution.clone());
        for role in ["buyer", "seller"] {
            f.set_in(role, "provider", self.provider.clone())
                .set_in(role, "model", self.model.clone());
        }
        let cfg: SimulateConfig = resolve(&SimulateConfig::default(), file, "simulate", f.0)?;
        if cfg.parallelism == 0 {
            bail!("parallelism must be at least 1");
        }
        if cfg.max_rounds == 0 {
            bail!("max_rounds must be at least 1");
        }
        Ok(cfg)
    }
}

fn load_distribution(source: &str) -> Result<TraitDistribution> {
    if source == "uniform" {
        return Ok(TraitDistribution::uniform());
    }
    let text = fs::read_to_string(source).with_context(|| format!("reading trait distribution {source}"))?;
    Ok(TraitDistribution::from_json_str(&text)?)
}

fn load_lexicon(source: &str) -> Result<AdjectiveLexicon> {
    if source == "builtin" {
        return Ok(AdjectiveLexicon::builtin());
    }
    let text = fs::read_to_string(source).with_context(|| format!("reading lexicon {source}"))?;
    Ok(AdjectiveLexicon::from_json_str(&text)?)
}

/// Per-dialogue configurations, fully determined by the resolved config.
pub fn build_configs(cfg: &SimulateConfig) -> Result<Vec<SimulationConfig>> {
    let distribution = load_distribution(&cfg.distribution)?;
    let lexicon = load_lexicon(&cfg.lexicon)?;
    let agents = if cfg.scripted {
        RoleMap::new(AgentSpec::PersonaScripted, AgentSpec::PersonaScripted)
    } else {
        RoleMap::new(
            AgentSpec::Llm {
                config: cfg.buyer.clone(),
            },
            AgentSpec::Llm {
                config: cfg.seller.clone(),
            },
        )
    };
    let width = cfg.n.saturating_sub(1).to_string().len().max(4);
    (0..cfg.n)
        .map(|i| {
            let id = format!("{}-{i:0width$}", cfg.id_prefix);
            let mut c = SimulationConfig::sample(
                id,
                dialogue_seed(cfg.seed, i as u64),
                agents.clone(),
                &distribution,
                &lexicon,
                cfg.scenario.clone(),
            )?;
            c.opener = cfg.opener;
            c.max_rounds = cfg.max_rounds;
            Ok(c)
        })
        .collect()
}

/// Fails early when a live provider has no credential.
pub fn check_credentials(cfg: &SimulateConfig) -> Result<()> {
    if cfg.scripted || cfg.n == 0 {
        return Ok(());
    }
    for (role, pc) in [("buyer", &cfg.buyer), ("seller", &cfg.seller)] {
        pc.validate()?;
        if ProviderRegistry::needs_credential(&pc.provider) {
            pc.credential()
                .with_context(|| format!("{role} agent ({}) cannot authenticate", pc.provider))?;
        }
    }
    Ok(())
}

fn summarize(dialogues: &[Dialogue]) -> String {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for kind in [OutcomeKind::Agreement, OutcomeKind::WalkAway, OutcomeKind::NoAgreement] {
        counts.insert(kind.to_string(), 0);
    }
    for d in dialogues {
        *counts.entry(d.outcome.kind.to_string()).or_default() += 1;
    }
    let parts: Vec<String> = counts.iter().map(|(k, v)| format!("{k}: {v}")).collect();
    format!("{} dialogues ({})", dialogues.len(), parts.join(", "))
}

fn write_checkpoints(path: &Path, checkpoints: &[Checkpoint]) -> Result<()> {
    if checkpoints.is_empty() {
        if path.exists() {
            fs::remove_file(path)?;
        }
        return Ok(());
    }
    let text: String = checkpoints.iter().map(|c| c.to_line() + "\n").collect();
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn run(args: &SimulateArgs, config: Option<&Path>, registry: &ProviderRegistry) -> Result<()> {
    let cfg = args.resolve(config)?;
    check_credentials(&cfg)?;
    let configs = build_configs(&cfg)?;
    let checkpoint_path = sidecar(&cfg.out, "checkpoints.jsonl");
    save(&cfg, "simulate", &sidecar(&cfg.out, "config.toml"))?;

    if let Some(resume_path) = &args.resume {
        return run_resume(&cfg, &configs, resume_path, &checkpoint_path, registry);
    }

    let out = run_batch(&configs, registry, cfg.parallelism)?;
    write_corpus(&out.dialogues, &cfg.out)?;
    write_checkpoints(&checkpoint_path, &out.checkpoints)?;
    println!("{}", summarize(&out.dialogues));
    for f in &out.failures {
        eprintln!("failed: {f}");
    }
    if !out.checkpoints.is_empty() {
        println!(
            "{} dialogue(s) checkpointed to {}; rerun with --resume",
            out.checkpoints.len(),
            checkpoint_path.display()
        );
    }
    Ok(())
}

fn run_resume(
    cfg: &SimulateConfig,
    configs: &[SimulationConfig],
    resume_path: &Path,
    checkpoint_path: &Path,
    registry: &ProviderRegistry,
) -> Result<()> {
    let text = fs::read_to_string(resume_path).with_context(|| format!("reading {}", resume_path.display()))?;
    let mut corpus: BTreeMap<String, Dialogue> = if cfg.out.exists() {
        load_corpus(&cfg.out)?.into_iter().map(|d| (d.id.clone(), d)).collect()
    } else {
        BTreeMap::new()
    };
    let mut remaining = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let cp = Checkpoint::from_line(line).map_err(anyhow::Error::msg)?;
        let Some(sc) = configs.iter().find(|c| c.id == cp.id) else {
            bail!("checkpoint {} is not part of this configuration", cp.id);
        };
        match resume(sc, registry, &cp) {
            Ok(d) => {
                corpus.insert(d.id.clone(), d);
            }
            Err(disputebench_core::gateway::SimulationError::Provider { checkpoint, .. }) => {
                remaining.push(*checkpoint)
            }
            Err(e) => return Err(e.into()),
        }
    }
    let dialogues: Vec<Dialogue> = corpus.into_values().collect();
    write_corpus(&dialogues, &cfg.out)?;
    write_checkpoints(checkpoint_path, &remaining)?;
    println!("{}; {} still checkpointed", summarize(&dialogues), remaining.len());
    Ok(())
}
