//! TOML run configuration with dotted `--set key=value` overrides.
//!
//! Each subcommand reads one top-level table. A top-level `seed` applies to
//! every table that does not set its own; `--seed` overrides both.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};
use toml::{Table, Value};

use crate::error::{CliError, CliResult};

pub fn load(path: Option<&Path>, sets: &[String]) -> CliResult<Table> {
    let mut table = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            text.parse::<Table>().map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
        }
        None => Table::new(),
    };
    for s in sets {
        apply_set(&mut table, s)?;
    }
    Ok(table)
}

/// `a.b.c=v`; `v` is read as a TOML value when it parses as one, else as a string.
pub fn apply_set(table: &mut Table, assignment: &str) -> CliResult<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override '{assignment}' is not key=value")))?;
    let path: Vec<&str> = key.trim().split('.').map(str::trim).collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(CliError::Config(format!("bad override key '{key}'")));
    }
    let value = parse_value(raw.trim());
    let (last, parents) = path.split_last().expect("split yields at least one part");
    let mut cur = table;
    for p in parents {
        let entry = cur.entry(p.to_string()).or_insert_with(|| Value::Table(Table::new()));
        cur = match entry {
            Value::Table(t) => t,
            _ => return Err(CliError::Config(format!("override '{key}': '{p}' is not a table"))),
        };
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

fn parse_value(raw: &str) -> Value {
    format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

/// Deserializes table `name` (missing means all defaults) after seeding it.
pub fn section<T: DeserializeOwned>(table: &Table, name: &str, cli_seed: Option<u64>) -> CliResult<T> {
    let mut sec = match table.get(name) {
        Some(Value::Table(t)) => t.clone(),
        Some(_) => return Err(CliError::Config(format!("'{name}' must be a table"))),
        None => Table::new(),
    };
    let global = match table.get("seed") {
        Some(Value::Integer(s)) if *s >= 0 => Some(*s),
        Some(v) => return Err(CliError::Config(format!("seed must be a nonnegative integer, got {v}"))),
        None => None,
    };
    if let Some(s) = cli_seed {
        let s = i64::try_from(s).map_err(|_| CliError::Config(format!("seed {s} exceeds i64")))?;
        sec.insert("seed".into(), Value::Integer(s));
    } else if let (Some(s), false) = (global, sec.contains_key("seed")) {
        sec.insert("seed".into(), Value::Integer(s));
    }
    Value::Table(sec).try_into().map_err(|e: toml::de::Error| CliError::Config(format!("[{name}]: {}", e.message())))
}

/// `sha256:` over the canonical JSON of the resolved configuration.
pub fn config_hash<C: Serialize>(command: &str, cfg: &C) -> String {
    let json = serde_json::to_string(cfg).expect("configs serialize");
    let mut h = Sha256::new();
    h.update(command.as_bytes());
    h.update([0u8]);
    h.update(json.as_bytes());
    let digest = h.finalize();
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

/// Run metadata attached to every output.
#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub tool: String,
    pub command: String,
    pub seed: u64,
    pub config_hash: String,
    /// Resolved configuration, written as TOML next to the outputs for re-runs.
    pub config_file: String,
    pub provenance: Vec<String>,
}

impl Meta {
    pub fn new<C: Serialize>(command: &str, section: &str, seed: u64, cfg: &C, provenance: Vec<String>) -> Self {
        Self {
            tool: format!("nfb {}", env!("CARGO_PKG_VERSION")),
            command: command.to_string(),
            seed,
            config_hash: config_hash(command, cfg),
            config_file: format!("{section}.config.toml"),
            provenance,
        }
    }

    /// `# key: value` lines for CSV and PGM headers.
    pub fn header_lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("tool: {}", self.tool),
            format!("command: {}", self.command),
            format!("seed: {}", self.seed),
            format!("config_hash: {}", self.config_hash),
            format!("config: {}", self.config_file),
        ];
        lines.extend(self.provenance.iter().map(|p| format!("provenance: {p}")));
        lines
    }
}

pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> CliResult<Self> {
        std::fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(Self { root: root.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write(&self, name: &str, contents: &str) -> CliResult<PathBuf> {
        let path = self.path(name);
        std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }

    /// CSV preceded by the metadata as `#` comment lines.
    pub fn write_csv(&self, name: &str, meta: &Meta, body: &str) -> CliResult<PathBuf> {
        let mut out = String::new();
        for line in meta.header_lines() {
            out.push_str("# ");
            out.push_str(&line);
            out.push('\n');
        }
        out.push_str(body);
        self.write(name, &out)
    }

    pub fn write_json<V: Serialize>(&self, name: &str, value: &V) -> CliResult<PathBuf> {
        let text = serde_json::to_string_pretty(value).expect("reports serialize");
        self.write(name, &(text + "\n"))
    }

    /// The resolved section as a standalone config file under `[section]`.
    pub fn write_config<C: Serialize>(&self, meta: &Meta, section: &str, cfg: &C) -> CliResult<PathBuf> {
        let mut root = Table::new();
        let value = Value::try_from(cfg).map_err(|e| CliError::Config(format!("cannot encode config: {e}")))?;
        root.insert(section.to_string(), value);
        let mut text = String::new();
        for line in meta.header_lines() {
            text.push_str("# ");
            text.push_str(&line);
            text.push('\n');
        }
        text.push_str(&toml::to_string(&root).map_err(|e| CliError::Config(format!("cannot encode config: {e}")))?);
        self.write(&meta.config_file, &text)
    }
}
