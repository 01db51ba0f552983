//! Service configuration: a JSON file with environment overrides.
//!
//! ```json
//! {
//!   "listen": "127.0.0.1:8080",
//!   "corpora": ["fixtures/builtin-corpus.json"],
//!   "storage_dir": "var/dispo",
//!   "soundness": { "low_max": 2, "high_min": 4, "neutral_policy": "indeterminate", "combinator": "all" },
//!   "labels": { "legality": { "negative": "law defying" } },
//!   "randomize_sessions": false
//! }
//! ```
//!
//! Relative paths resolve against the directory holding the config file.
//! `DISPO_LISTEN` and `DISPO_STORAGE_DIR` override the file.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use dispo_core::elicitation::PoleLabelOverrides;
use dispo_core::{Corpus, PoleLabelTable, SoundnessConfig, Store, StoreOptions};
use serde::Deserialize;

pub const ENV_LISTEN: &str = "DISPO_LISTEN";
pub const ENV_STORAGE_DIR: &str = "DISPO_STORAGE_DIR";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid listen address {0:?}")]
    Listen(String),
    #[error(transparent)]
    Core(#[from] dispo_core::Error),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default = "default_listen")]
    listen: String,
    #[serde(default)]
    corpora: Vec<PathBuf>,
    #[serde(default = "default_storage")]
    storage_dir: PathBuf,
    #[serde(default)]
    soundness: SoundnessConfig,
    #[serde(default)]
    labels: PoleLabelOverrides,
    #[serde(default)]
    randomize_sessions: bool,
}

fn default_listen() -> String {
    "127.0.0.1:8080".into()
}

fn default_storage() -> PathBuf {
    "dispo-data".into()
}

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub listen: SocketAddr,
    /// Empty means the built-in corpus.
    pub corpora: Vec<PathBuf>,
    pub storage_dir: PathBuf,
    pub soundness: SoundnessConfig,
    pub labels: PoleLabelTable,
    pub randomize_sessions: bool,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            listen: default_listen().parse().expect("valid default"),
            corpora: Vec::new(),
            storage_dir: default_storage(),
            soundness: SoundnessConfig::default(),
            labels: PoleLabelTable::default(),
            randomize_sessions: false,
        }
    }
}

impl ServiceConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.into(),
            source,
        })?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")), |k| {
            std::env::var(k).ok()
        })
        .map_err(|e| match e {
            ConfigError::Parse { message, .. } => ConfigError::Parse {
                path: path.into(),
                message,
            },
            other => other,
        })
    }

    /// Parses config text; `env` supplies override variables.
    pub fn parse(
        text: &str,
        base: &Path,
        env: impl Fn(&str) -> Option<String>,
    ) -> Result<Self, ConfigError> {
        let file: ConfigFile = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            path: PathBuf::new(),
            message: e.to_string(),
        })?;
        let resolve = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };
        let listen_text = env(ENV_LISTEN).unwrap_or(file.listen);
        let listen = listen_text
            .parse()
            .map_err(|_| ConfigError::Listen(listen_text.clone()))?;
        let storage_dir = env(ENV_STORAGE_DIR)
            .map(PathBuf::from)
            .unwrap_or_else(|| resolve(file.storage_dir));
        Ok(Self {
            listen,
            corpora: file.corpora.into_iter().map(resolve).collect(),
            storage_dir,
            soundness: file.soundness,
            labels: PoleLabelTable::default().with_overrides(&file.labels),
            randomize_sessions: file.randomize_sessions,
        })
    }

    pub fn load_corpora(&self) -> Result<Vec<Corpus>, ConfigError> {
        if self.corpora.is_empty() {
            return Ok(vec![dispo_core::builtin_corpus()]);
        }
        self.corpora
            .iter()
            .map(|p| Ok(Corpus::load_file(p)?))
            .collect()
    }

    pub fn store_options(&self) -> StoreOptions {
        StoreOptions {
            soundness: self.soundness,
            labels: self.labels.clone(),
            randomize_sessions: self.randomize_sessions,
        }
    }

    /// Loads corpora and opens the file-backed store.
    pub fn open_store(&self) -> Result<Store, ConfigError> {
        Ok(Store::open(
            &self.storage_dir,
            self.load_corpora()?,
            self.store_options(),
        )?)
    }
}
