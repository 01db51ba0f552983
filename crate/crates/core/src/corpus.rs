//! Scenario corpora: loading, validation and serialization.
//!
//! A corpus file is either a bare JSON array of scenario records or an
//! object `{"id": ..., "scenarios": [...]}`. TOML files use the object form.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Violation};
use crate::model::{validate_scenario, RawScenario, Scenario};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    id: String,
    scenarios: Vec<Scenario>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Json,
    Toml,
}

impl CorpusFormat {
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => Self::Toml,
            _ => Self::Json,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorpusError {
    Parse {
        message: String,
    },
    DuplicateScenarioId {
        id: String,
        first: usize,
        second: usize,
    },
    InvalidScenario {
        index: usize,
        id: Option<String>,
        violation: Violation,
    },
}

impl CorpusError {
    /// Path of the offending element, e.g. `scenarios[1].polarity`.
    pub fn path(&self) -> String {
        match self {
            Self::Parse { .. } => "$".into(),
            Self::DuplicateScenarioId { second, .. } => format!("scenarios[{second}].id"),
            Self::InvalidScenario {
                index, violation, ..
            } => format!("scenarios[{index}].{}", violation.path()),
        }
    }
}

impl fmt::Display for CorpusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Parse { message } => write!(f, "parse error: {message}"),
            Self::DuplicateScenarioId { id, first, second } => {
                write!(f, "scenarios[{second}]: duplicate scenario id {id:?} (first at scenarios[{first}])")
            }
            Self::InvalidScenario {
                index,
                id,
                violation,
            } => match id {
                Some(id) => write!(f, "scenarios[{index}] ({id}): {violation}"),
                None => write!(f, "scenarios[{index}]: {violation}"),
            },
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CorpusDocument {
    Bare(Vec<RawScenario>),
    Named {
        id: Option<String>,
        scenarios: Vec<RawScenario>,
    },
}

#[derive(Serialize)]
struct CorpusOut<'a> {
    id: &'a str,
    scenarios: Vec<RawScenario>,
}

impl Corpus {
    pub fn new(id: impl Into<String>, scenarios: Vec<Scenario>) -> Result<Self, Vec<CorpusError>> {
        let corpus = Self {
            id: id.into(),
            scenarios,
        };
        let dups = corpus.duplicate_ids();
        if dups.is_empty() {
            Ok(corpus)
        } else {
            Err(dups)
        }
    }

    fn duplicate_ids(&self) -> Vec<CorpusError> {
        let mut seen: HashMap<&str, usize> = HashMap::new();
        let mut errs = Vec::new();
        for (i, s) in self.scenarios.iter().enumerate() {
            if let Some(&first) = seen.get(s.id()) {
                errs.push(CorpusError::DuplicateScenarioId {
                    id: s.id().to_owned(),
                    first,
                    second: i,
                });
            } else {
                seen.insert(s.id(), i);
            }
        }
        errs
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn scenarios(&self) -> &[Scenario] {
        &self.scenarios
    }

    pub fn len(&self) -> usize {
        self.scenarios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenarios.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Scenario> {
        self.scenarios.iter().find(|s| s.id() == id)
    }

    pub fn to_json(&self) -> Vec<u8> {
        let out = CorpusOut {
            id: &self.id,
            scenarios: self.scenarios.iter().map(Scenario::to_raw).collect(),
        };
        serde_json::to_vec_pretty(&out).expect("corpus serializes")
    }

    pub fn load_file(path: &Path) -> crate::error::Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        let fallback = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("corpus");
        load_corpus(&bytes, CorpusFormat::from_path(path), fallback).map_err(Error::Corpus)
    }
}

/// Parses and validates a corpus, collecting every violation. `fallback_id`
/// names corpora given as a bare array.
pub fn load_corpus(
    bytes: &[u8],
    format: CorpusFormat,
    fallback_id: &str,
) -> Result<Corpus, Vec<CorpusError>> {
    let parsed: Result<CorpusDocument, String> = match format {
        CorpusFormat::Json => serde_json::from_slice(bytes).map_err(|e| e.to_string()),
        CorpusFormat::Toml => std::str::from_utf8(bytes)
            .map_err(|e| e.to_string())
            .and_then(|s| toml::from_str(s).map_err(|e| e.to_string())),
    };
    let (id, raws) = match parsed {
        Ok(CorpusDocument::Bare(raws)) => (fallback_id.to_owned(), raws),
        Ok(CorpusDocument::Named { id, scenarios }) => {
            (id.unwrap_or_else(|| fallback_id.to_owned()), scenarios)
        }
        Err(message) => return Err(vec![CorpusError::Parse { message }]),
    };

    let mut errs = Vec::new();
    let mut scenarios = Vec::with_capacity(raws.len());
    for (index, raw) in raws.iter().enumerate() {
        match validate_scenario(raw) {
            Ok(s) => scenarios.push((index, s)),
            Err(violations) => {
                errs.extend(
                    violations
                        .into_iter()
                        .map(|violation| CorpusError::InvalidScenario {
                            index,
                            id: raw.id.clone(),
                            violation,
                        }),
                )
            }
        }
    }
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (index, raw) in raws.iter().enumerate() {
        let Some(sid) = raw.id.as_ref().filter(|s| !s.trim().is_empty()) else {
            continue;
        };
        if let Some(&first) = seen.get(sid) {
            errs.push(CorpusError::DuplicateScenarioId {
                id: sid.clone(),
                first,
                second: index,
            });
        } else {
            seen.insert(sid.clone(), index);
        }
    }

    if errs.is_empty() {
        Ok(Corpus {
            id,
            scenarios: scenarios.into_iter().map(|(_, s)| s).collect(),
        })
    } else {
        Err(errs)
    }
}

pub fn serialize_corpus(c: &Corpus) -> Vec<u8> {
    c.to_json()
}

const BUILTIN_CORPUS: &str = include_str!("../../../fixtures/builtin-corpus.json");

/// The built-in two-scenario corpus (`postoffice`, `fruits`).
pub fn builtin_corpus() -> Corpus {
    load_corpus(BUILTIN_CORPUS.as_bytes(), CorpusFormat::Json, "builtin")
        .expect("bundled corpus is valid")
}
