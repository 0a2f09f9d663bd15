//! The config file: TOML, every key optional.
//!
//! ```toml
//! system = "NACT-PriNSA"        # a preset name
//! schemata = ["Axiom5a", "Axiom6c"]  # or a custom list (overrides `system`)
//! gsa_chain_bound = 2
//! max_steps = 50000
//! max_equality_depth = 4
//! max_term_size = 200
//! count = 1000
//! ledger = "ledger.jsonl"
//! format = "text"               # or "jsonl"
//! epsilon = 0.001
//! window = 100
//! ```
//!
//! Command-line flags win over `NACT_MAX_STEPS` / `NACT_LEDGER`, which win
//! over the file, which wins over the defaults.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use nact::prover::ProofBudget;
use nact::schema::{SchemaId, SystemSpec};
use serde::Deserialize;

pub const DEFAULT_SYSTEM: &str = "NACT-PriNSA";
pub const DEFAULT_COUNT: usize = 1000;
pub const DEFAULT_LEDGER: &str = "ledger.jsonl";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Jsonl,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub system: Option<String>,
    pub schemata: Option<Vec<String>>,
    pub gsa_chain_bound: Option<u32>,
    pub max_steps: Option<u64>,
    pub max_equality_depth: Option<u32>,
    pub max_term_size: Option<usize>,
    pub count: Option<usize>,
    pub ledger: Option<PathBuf>,
    pub format: Option<Format>,
    pub epsilon: Option<f64>,
    pub window: Option<usize>,
}

impl Config {
    pub fn load(path: &Path) -> anyhow::Result<Config> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("in {}", path.display()))
    }

    /// The system named on the command line, else the config's.
    pub fn system(&self, flag: Option<&str>) -> anyhow::Result<SystemSpec> {
        let mut spec = match (flag, &self.schemata) {
            (Some(name), _) => preset(name)?,
            (None, Some(ids)) => {
                let ids = ids.iter().map(|s| s.parse::<SchemaId>()).collect::<Result<Vec<_>, _>>();
                SystemSpec::custom("custom", ids.map_err(anyhow::Error::msg)?)
            }
            (None, None) => preset(self.system.as_deref().unwrap_or(DEFAULT_SYSTEM))?,
        };
        if let Some(b) = self.gsa_chain_bound {
            spec.gsa_chain_bound = b;
        }
        Ok(spec)
    }

    pub fn budget(&self, flag: Option<u64>) -> anyhow::Result<ProofBudget> {
        let env = match std::env::var("NACT_MAX_STEPS") {
            Ok(v) => Some(v.parse::<u64>().with_context(|| format!("NACT_MAX_STEPS={v}"))?),
            Err(_) => None,
        };
        let mut b = ProofBudget::default();
        if let Some(steps) = flag.or(env).or(self.max_steps) {
            b.max_steps = steps;
        }
        if let Some(d) = self.max_equality_depth {
            b.max_equality_depth = d;
        }
        if let Some(s) = self.max_term_size {
            b.max_term_size = s;
        }
        Ok(b)
    }

    pub fn ledger(&self, flag: Option<PathBuf>) -> PathBuf {
        flag.or_else(|| std::env::var_os("NACT_LEDGER").map(PathBuf::from))
            .or_else(|| self.ledger.clone())
            .unwrap_or_else(|| PathBuf::from(DEFAULT_LEDGER))
    }
}

fn preset(name: &str) -> anyhow::Result<SystemSpec> {
    match SystemSpec::preset(name) {
        Some(s) => Ok(s),
        None => bail!("unknown system `{name}` (see `nact systems`)"),
    }
}
