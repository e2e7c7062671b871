//! Experiment configuration files and the paths they reference.

use std::path::{Path, PathBuf};

use anyhow::Context;
use nmcond::adversary::AdversaryScript;
use nmcond::condenser::{require_valid, ParameterProfile};
use nmcond::distoracle::SourceSpec;
use nmcond::primitives::registry::{HashFamily, Registry};
use nmcond::protocol::ProtocolId;
use nmcond::seedtree::SeedTree;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const EXPERIMENT_SCHEMA: &str = "nmcond.experiment/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: String,
    pub name: String,
    /// A built-in profile name or a path to a profile file.
    pub profile: String,
    #[serde(default)]
    pub registry: Option<String>,
    #[serde(default)]
    pub seed: Option<String>,
    #[serde(default)]
    pub run: Option<RunSection>,
    #[serde(default)]
    pub attack_suite: Option<SuiteSection>,
    #[serde(default)]
    pub oracle: Option<OracleSection>,
}

/// A script given by built-in id or inline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScriptRef {
    Builtin(String),
    Inline(AdversaryScript),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub protocol: ProtocolId,
    pub source: SourceSpec,
    #[serde(default)]
    pub script: Option<ScriptRef>,
    pub runs: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteSection {
    pub protocols: Vec<ProtocolId>,
    pub source: SourceSpec,
    /// Restricts the built-in suite to these ids; all scripts when absent.
    #[serde(default)]
    pub scripts: Option<Vec<String>>,
    #[serde(default)]
    pub extra_scripts: Vec<AdversaryScript>,
    #[serde(default)]
    pub baselines: Option<String>,
    /// Sampling trials; exact enumeration when absent.
    #[serde(default)]
    pub trials: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    pub queries: Vec<OracleQuery>,
    #[serde(default)]
    pub baselines: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "query", rename_all = "snake_case", deny_unknown_fields)]
pub enum OracleQuery {
    /// Inner-product non-malleable extractor over every flat k-source and
    /// every fixed-point-free adversary.
    NmExt { id: String, n: usize, m: usize, k: u32 },
    /// nm_cond of a profile over every flat k-source of its source length.
    NmCond { id: String, k: u32, k_prime: u32, literal_cap: u64 },
    StrongExt {
        id: String,
        hash: HashFamily,
        n: usize,
        d: usize,
        m: usize,
        k: u32,
        cap: u64,
        extra: u64,
        seed: u64,
    },
    Mac { id: String, v: usize, chunks: usize },
    EditCode { id: String, repeat: usize, msg_len: usize },
    TopHeavy { id: String, max_m: usize },
    MinEntropy { id: String, source: SourceSpec },
}

impl OracleQuery {
    pub fn id(&self) -> &str {
        match self {
            OracleQuery::NmExt { id, .. }
            | OracleQuery::NmCond { id, .. }
            | OracleQuery::StrongExt { id, .. }
            | OracleQuery::Mac { id, .. }
            | OracleQuery::EditCode { id, .. }
            | OracleQuery::TopHeavy { id, .. }
            | OracleQuery::MinEntropy { id, .. } => id,
        }
    }
}

/// A loaded configuration with its directory, against which relative paths
/// resolve.
pub struct Loaded {
    pub config: ExperimentConfig,
    pub dir: PathBuf,
    pub profile: ParameterProfile,
}

impl Loaded {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))
            .map_err(CliError::Usage)?;
        let config: ExperimentConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))
            .map_err(CliError::Usage)?;
        if config.schema != EXPERIMENT_SCHEMA {
            return Err(CliError::usage(format!("config schema {:?}, expected {EXPERIMENT_SCHEMA}", config.schema)));
        }
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let profile = load_profile(&config.profile, &dir)?;
        // Profiles are checked before any command touches them.
        require_valid(&profile).map_err(|e| CliError::Violation(e.to_string()))?;
        Ok(Loaded { config, dir, profile })
    }

    pub fn resolve(&self, rel: &str) -> PathBuf {
        self.dir.join(rel)
    }

    pub fn seed(&self, flag: Option<&str>) -> Result<SeedTree, CliError> {
        match flag.or(self.config.seed.as_deref()) {
            Some(hex) => SeedTree::from_hex(hex).map_err(|e| CliError::usage(format!("seed: {e}"))),
            None => Err(CliError::usage("no seed: pass --seed or set \"seed\" in the config")),
        }
    }

    pub fn registry(&self) -> Result<Registry, CliError> {
        let Some(rel) = &self.config.registry else {
            return Err(CliError::usage("config names no registry"));
        };
        read_registry(&self.resolve(rel))
    }
}

pub fn read_registry(path: &Path) -> Result<Registry, CliError> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading registry {}", path.display()))
        .map_err(CliError::Usage)?;
    Registry::from_json(&text).map_err(|e| CliError::usage(e.to_string()))
}

fn load_profile(name: &str, dir: &Path) -> Result<ParameterProfile, CliError> {
    if let Ok(p) = ParameterProfile::by_name(name) {
        return Ok(p);
    }
    let path = dir.join(name);
    let text = std::fs::read_to_string(&path)
        .with_context(|| format!("profile {name:?} is neither built in nor readable"))
        .map_err(CliError::Usage)?;
    serde_json::from_str(&text)
        .with_context(|| format!("parsing profile {}", path.display()))
        .map_err(CliError::Usage)
}

pub fn section<'a, T>(s: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
    s.as_ref().ok_or_else(|| CliError::usage(format!("config has no \"{name}\" section")))
}
