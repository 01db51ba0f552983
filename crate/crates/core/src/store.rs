//! Corpora, sessions and profiles behind one handle, optionally persisted
//! to a directory:
//!
//! ```text
//! <dir>/profiles/<agent>.json   one profile document per agent
//! <dir>/sessions/<id>.json      resumable session state
//! ```
//!
//! Mutations of one agent's profile are serialized under that agent's lock;
//! submissions to one session are serialized under the session's lock
//! (always taken before the profile lock). Reads of other agents and
//! sessions proceed in parallel.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, MutexGuard};

use crate::corpus::Corpus;
use crate::elicitation::PoleLabelTable;
use crate::error::{Error, Result};
use crate::model::{AgentId, Feedback, Scenario};
use crate::profile::{Prediction, Profile};
use crate::scalar::Scalar;
use crate::session::{Session, SessionExport, Submission};
use crate::soundness::SoundnessConfig;

#[derive(Debug, Clone, Default)]
pub struct StoreOptions {
    pub soundness: SoundnessConfig,
    pub labels: PoleLabelTable,
    pub randomize_sessions: bool,
}

type Slot<T> = Arc<Mutex<T>>;

#[derive(Debug)]
pub struct Store {
    dir: Option<PathBuf>,
    corpora: BTreeMap<String, Arc<Corpus>>,
    options: StoreOptions,
    profiles: Mutex<HashMap<AgentId, Slot<Profile>>>,
    sessions: Mutex<HashMap<String, Slot<Session>>>,
    session_counter: AtomicU64,
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

impl Store {
    pub fn in_memory(corpora: Vec<Corpus>, options: StoreOptions) -> Result<Self> {
        Self::build(None, corpora, options)
    }

    /// Opens (creating if needed) a store rooted at `dir`.
    pub fn open(
        dir: impl Into<PathBuf>,
        corpora: Vec<Corpus>,
        options: StoreOptions,
    ) -> Result<Self> {
        let dir = dir.into();
        for sub in ["profiles", "sessions"] {
            let p = dir.join(sub);
            std::fs::create_dir_all(&p).map_err(|e| Error::io(&p, e))?;
        }
        Self::build(Some(dir), corpora, options)
    }

    fn build(dir: Option<PathBuf>, corpora: Vec<Corpus>, options: StoreOptions) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut scenario_owner: HashMap<String, String> = HashMap::new();
        for c in corpora {
            for s in c.scenarios() {
                if let Some(other) = scenario_owner.insert(s.id().to_owned(), c.id().to_owned()) {
                    return Err(Error::Config(format!(
                        "scenario id {:?} appears in corpora {other:?} and {:?}",
                        s.id(),
                        c.id()
                    )));
                }
            }
            let id = c.id().to_owned();
            if map.insert(id.clone(), Arc::new(c)).is_some() {
                return Err(Error::Config(format!("corpus id {id:?} loaded twice")));
            }
        }
        let store = Self {
            dir,
            corpora: map,
            options,
            profiles: Mutex::new(HashMap::new()),
            sessions: Mutex::new(HashMap::new()),
            session_counter: AtomicU64::new(0),
        };
        store
            .session_counter
            .store(store.highest_session_number()?, Ordering::SeqCst);
        Ok(store)
    }

    fn highest_session_number(&self) -> Result<u64> {
        let Some(dir) = &self.dir else { return Ok(0) };
        let sessions = dir.join("sessions");
        let entries = std::fs::read_dir(&sessions).map_err(|e| Error::io(&sessions, e))?;
        Ok(entries
            .filter_map(|e| e.ok())
            .filter_map(|e| {
                let name = e.file_name().into_string().ok()?;
                name.strip_prefix("session-")?
                    .strip_suffix(".json")?
                    .parse::<u64>()
                    .ok()
            })
            .max()
            .unwrap_or(0))
    }

    pub fn options(&self) -> &StoreOptions {
        &self.options
    }

    pub fn soundness(&self) -> &SoundnessConfig {
        &self.options.soundness
    }

    pub fn labels(&self) -> &PoleLabelTable {
        &self.options.labels
    }

    pub fn corpora(&self) -> impl Iterator<Item = &Corpus> {
        self.corpora.values().map(|c| c.as_ref())
    }

    pub fn corpus(&self, id: &str) -> Option<&Corpus> {
        self.corpora.get(id).map(|c| c.as_ref())
    }

    pub fn scenarios(&self) -> impl Iterator<Item = &Scenario> {
        self.corpora().flat_map(|c| c.scenarios().iter())
    }

    pub fn scenario(&self, id: &str) -> Option<&Scenario> {
        self.corpora().find_map(|c| c.get(id))
    }

    fn profile_path(&self, agent: &AgentId) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| {
            d.join("profiles")
                .join(format!("{}.json", encode_file_name(agent.as_str())))
        })
    }

    fn session_path(&self, id: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| {
            d.join("sessions")
                .join(format!("{}.json", encode_file_name(id)))
        })
    }

    /// The agent's profile slot, loaded from disk if persisted. With
    /// `create`, a missing profile is created empty.
    fn profile_slot(&self, agent: &AgentId, create: bool) -> Result<Option<Slot<Profile>>> {
        let mut profiles = lock(&self.profiles);
        if let Some(slot) = profiles.get(agent) {
            return Ok(Some(slot.clone()));
        }
        let loaded = match self.profile_path(agent) {
            Some(path) if path.exists() => {
                let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
                let p = Profile::from_json(&bytes)?;
                if p.agent() != agent {
                    return Err(Error::SchemaViolation {
                        path: "$.agent".into(),
                        message: format!("profile file for {agent} names agent {}", p.agent()),
                    });
                }
                Some(p)
            }
            _ => None,
        };
        let profile = match (loaded, create) {
            (Some(p), _) => p,
            (None, true) => {
                let p = Profile::new(agent.clone());
                self.persist_profile(&p)?;
                p
            }
            (None, false) => return Ok(None),
        };
        let slot = Arc::new(Mutex::new(profile));
        profiles.insert(agent.clone(), slot.clone());
        Ok(Some(slot))
    }

    fn persist_profile(&self, p: &Profile) -> Result<()> {
        match self.profile_path(p.agent()) {
            Some(path) => write_atomic(&path, &p.to_json()),
            None => Ok(()),
        }
    }

    fn persist_session(&self, s: &Session) -> Result<()> {
        match self.session_path(s.id()) {
            Some(path) => write_atomic(&path, &s.to_json()),
            None => Ok(()),
        }
    }

    pub fn profile(&self, agent: &AgentId) -> Result<Option<Profile>> {
        Ok(self
            .profile_slot(agent, false)?
            .map(|slot| lock(&slot).clone()))
    }

    /// The agent's profile, or an empty one if none exists.
    pub fn profile_or_empty(&self, agent: &AgentId) -> Result<Profile> {
        Ok(self
            .profile(agent)?
            .unwrap_or_else(|| Profile::new(agent.clone())))
    }

    pub fn predict<T: Scalar>(
        &self,
        agent: &AgentId,
        scenario: &Scenario,
    ) -> Result<Prediction<T>> {
        Ok(self.profile_or_empty(agent)?.predict(scenario))
    }

    fn session_slot(&self, id: &str) -> Result<Slot<Session>> {
        let mut sessions = lock(&self.sessions);
        if let Some(slot) = sessions.get(id) {
            return Ok(slot.clone());
        }
        let not_found = || Error::NotFound {
            kind: "session",
            id: id.to_owned(),
        };
        let path = self
            .session_path(id)
            .filter(|p| p.exists())
            .ok_or_else(not_found)?;
        let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
        let session = Session::from_json(&bytes)?;
        if session.id() != id {
            return Err(not_found());
        }
        let slot = Arc::new(Mutex::new(session));
        sessions.insert(id.to_owned(), slot.clone());
        Ok(slot)
    }

    /// Starts a session for `agent` on `corpus` (the first corpus when
    /// `None`).
    pub fn start_session(&self, agent: &AgentId, corpus: Option<&str>) -> Result<Session> {
        let corpus = match corpus {
            Some(id) => self.corpus(id).ok_or_else(|| Error::NotFound {
                kind: "corpus",
                id: id.to_owned(),
            })?,
            None => self.corpora().next().ok_or_else(|| Error::NotFound {
                kind: "corpus",
                id: String::new(),
            })?,
        };
        let n = self.session_counter.fetch_add(1, Ordering::SeqCst) + 1;
        let id = format!("session-{n}");
        let session = if self.options.randomize_sessions {
            Session::shuffled(id, agent.clone(), corpus, n)
        } else {
            Session::new(id, agent.clone(), corpus)
        };
        self.profile_slot(agent, true)?;
        self.persist_session(&session)?;
        lock(&self.sessions).insert(
            session.id().to_owned(),
            Arc::new(Mutex::new(session.clone())),
        );
        Ok(session)
    }

    pub fn session(&self, id: &str) -> Result<Session> {
        let slot = self.session_slot(id)?;
        let session = lock(&slot).clone();
        Ok(session)
    }

    pub fn session_corpus(&self, session: &Session) -> Result<&Corpus> {
        self.corpus(session.corpus_id())
            .ok_or_else(|| Error::NotFound {
                kind: "corpus",
                id: session.corpus_id().to_owned(),
            })
    }

    /// Submits feedback to a session and records any elicited dispositions
    /// into the agent's profile.
    pub fn submit(&self, session_id: &str, feedback: Feedback) -> Result<(Submission, Session)> {
        let slot = self.session_slot(session_id)?;
        let mut session = lock(&slot);
        let corpus = self.session_corpus(&session)?;

        let mut next = session.clone();
        let submission = next.submit(corpus, feedback, self.soundness())?;
        let record = next
            .collected()
            .last()
            .expect("submit appends a record")
            .clone();

        let profile_slot = self.profile_slot(next.agent(), true)?.expect("created");
        let mut profile = lock(&profile_slot);
        let mut updated = profile.clone();
        updated.ingest(
            record.feedback.reference(),
            &record.feedback.scenario,
            &record.verdict,
            &record.dispositions,
        )?;
        self.persist_profile(&updated)?;
        self.persist_session(&next)?;
        *profile = updated;
        *session = next.clone();
        Ok((submission, next))
    }

    pub fn export(&self, session_id: &str) -> Result<SessionExport> {
        let slot = self.session_slot(session_id)?;
        let export = lock(&slot).export();
        Ok(export)
    }

    /// Re-applies an exported session to the agent's profile. Every record
    /// must reproduce under this store's soundness configuration.
    pub fn replay(&self, export: &SessionExport) -> Result<Profile> {
        let corpus = self.corpus(&export.corpus).ok_or_else(|| Error::NotFound {
            kind: "corpus",
            id: export.corpus.clone(),
        })?;
        if let Some(&i) = export.reevaluate(corpus, self.soundness())?.first() {
            return Err(Error::SchemaViolation {
                path: format!("$.records[{i}]"),
                message: "record does not reproduce under the current soundness configuration"
                    .into(),
            });
        }
        let slot = self.profile_slot(&export.agent, true)?.expect("created");
        let mut profile = lock(&slot);
        let mut updated = profile.clone();
        for r in &export.records {
            updated.ingest(
                r.feedback.reference(),
                &r.feedback.scenario,
                &r.verdict,
                &r.dispositions,
            )?;
        }
        self.persist_profile(&updated)?;
        *profile = updated.clone();
        Ok(updated)
    }
}

/// Keeps `[A-Za-z0-9_-]`, percent-escapes every other byte.
fn encode_file_name(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for b in s.bytes() {
        if b.is_ascii_alphanumeric() || b == b'-' || b == b'_' {
            out.push(b as char);
        } else {
            out.push_str(&format!("%{b:02X}"));
        }
    }
    out
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("json.tmp");
    std::fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}
