//! Layered run configuration: built-in defaults, then a TOML file section, then command-line flags.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use toml::{Table, Value};

fn merge(base: &mut Table, overlay: Table) {
    for (k, v) in overlay {
        match (base.get_mut(&k), v) {
            (Some(Value::Table(b)), Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// Reads `[section]` of a TOML config file.
pub fn read_section(path: &Path, section: &str) -> Result<Table> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut doc: Table = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    match doc.remove(section) {
        Some(Value::Table(t)) => Ok(t),
        Some(_) => bail!("{}: [{section}] must be a table", path.display()),
        None => Ok(Table::new()),
    }
}

/// Resolves a fully explicit configuration.
pub fn resolve<T: Serialize + DeserializeOwned>(
    defaults: &T,
    file: Option<&Path>,
    section: &str,
    flags: Table,
) -> Result<T> {
    let mut table = Table::try_from(defaults).context("serializing defaults")?;
    if let Some(path) = file {
        merge(&mut table, read_section(path, section)?);
    }
    merge(&mut table, flags);
    Value::Table(table)
        .try_into()
        .with_context(|| format!("invalid [{section}] configuration"))
}

/// Writes the resolved configuration under `[section]`, so it can be passed back with `--config`.
/// Missing parent directories are created; the config is the first file every subcommand writes.
pub fn save<T: Serialize>(config: &T, section: &str, path: &Path) -> Result<()> {
    let mut doc = Table::new();
    doc.insert(section.to_string(), Value::Table(Table::try_from(config)?));
    let text = toml::to_string(&doc)?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Helper for building the flag overlay.
#[derive(Default)]
pub struct Flags(pub Table);

impl Flags {
    pub fn set<V: Into<Value>>(&mut self, key: &str, value: Option<V>) -> &mut Self {
        if let Some(v) = value {
            self.0.insert(key.to_string(), v.into());
        }
        self
    }

    pub fn set_in<V: Into<Value>>(&mut self, table: &str, key: &str, value: Option<V>) -> &mut Self {
        if let Some(v) = value {
            let entry = self
                .0
                .entry(table.to_string())
                .or_insert_with(|| Value::Table(Table::new()));
            if let Value::Table(t) = entry {
                t.insert(key.to_string(), v.into());
            }
        }
        self
    }
}
