//! Questionnaire sessions: one agent answering a corpus one scenario at a
//! time, plus the export format used for offline re-analysis and replay.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::elicitation::{elicit, Disposition};
use crate::error::{Error, Result};
use crate::model::{AgentId, Feedback, Scenario};
use crate::soundness::{sound, SoundnessConfig, SoundnessVerdict};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub feedback: Feedback,
    pub verdict: SoundnessVerdict,
    pub dispositions: Vec<Disposition>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Session {
    id: String,
    agent: AgentId,
    corpus: String,
    /// Presentation order as indices into the corpus.
    order: Vec<usize>,
    cursor: usize,
    collected: Vec<SessionRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Next<'a> {
    Scenario(&'a Scenario),
    Done,
}

impl<'a> Next<'a> {
    pub fn scenario(self) -> Option<&'a Scenario> {
        match self {
            Self::Scenario(s) => Some(s),
            Self::Done => None,
        }
    }
}

/// What a submission produced, for immediate display.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Submission {
    pub verdict: SoundnessVerdict,
    pub dispositions: Vec<Disposition>,
    pub cursor: usize,
}

impl Session {
    /// A session presenting scenarios in corpus order.
    pub fn new(id: impl Into<String>, agent: AgentId, corpus: &Corpus) -> Self {
        Self {
            id: id.into(),
            agent,
            corpus: corpus.id().to_owned(),
            order: (0..corpus.len()).collect(),
            cursor: 0,
            collected: Vec::new(),
        }
    }

    /// A session with a seeded random presentation order.
    pub fn shuffled(id: impl Into<String>, agent: AgentId, corpus: &Corpus, seed: u64) -> Self {
        let mut s = Self::new(id, agent, corpus);
        s.order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        s
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn agent(&self) -> &AgentId {
        &self.agent
    }

    pub fn corpus_id(&self) -> &str {
        &self.corpus
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.cursor >= self.order.len()
    }

    pub fn collected(&self) -> &[SessionRecord] {
        &self.collected
    }

    fn check_corpus(&self, corpus: &Corpus) -> Result<()> {
        if corpus.id() != self.corpus || corpus.len() != self.order.len() {
            return Err(Error::NotFound {
                kind: "corpus",
                id: self.corpus.clone(),
            });
        }
        Ok(())
    }

    pub fn next_scenario<'c>(&self, corpus: &'c Corpus) -> Result<Next<'c>> {
        self.check_corpus(corpus)?;
        Ok(match self.order.get(self.cursor) {
            Some(&i) => Next::Scenario(&corpus.scenarios()[i]),
            None => Next::Done,
        })
    }

    /// Judges `f` against the current scenario, elicits on a sound verdict
    /// and advances the cursor. The caller records the dispositions into
    /// the agent's profile.
    pub fn submit(
        &mut self,
        corpus: &Corpus,
        f: Feedback,
        cfg: &SoundnessConfig,
    ) -> Result<Submission> {
        let scenario = match self.next_scenario(corpus)? {
            Next::Scenario(s) => s,
            Next::Done => return Err(Error::SessionComplete(self.id.clone())),
        };
        if f.agent != self.agent {
            return Err(Error::WrongAgent {
                expected: self.agent.to_string(),
                got: f.agent.to_string(),
            });
        }
        if f.scenario != scenario.id() {
            return Err(Error::WrongScenario {
                expected: scenario.id().to_owned(),
                got: f.scenario.clone(),
            });
        }
        let verdict = sound(scenario, f.response, &f.justification, cfg);
        let dispositions = elicit(&self.agent, scenario, &f, &verdict)?;
        self.collected.push(SessionRecord {
            feedback: f,
            verdict: verdict.clone(),
            dispositions: dispositions.clone(),
        });
        self.cursor += 1;
        Ok(Submission {
            verdict,
            dispositions,
            cursor: self.cursor,
        })
    }

    pub fn export(&self) -> SessionExport {
        SessionExport {
            schema: SESSION_EXPORT_SCHEMA.into(),
            session: self.id.clone(),
            agent: self.agent.clone(),
            corpus: self.corpus.clone(),
            records: self.collected.clone(),
        }
    }

    pub fn to_json(&self) -> Vec<u8> {
        serde_json::to_vec_pretty(self).expect("session serializes")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_slice(bytes);
        let s: Session = serde_path_to_error::deserialize(de).map_err(Error::schema)?;
        if s.collected.len() != s.cursor || s.cursor > s.order.len() {
            return Err(Error::SchemaViolation {
                path: "$.cursor".into(),
                message:
                    "cursor must equal the number of collected records and not exceed the corpus"
                        .into(),
            });
        }
        Ok(s)
    }
}

pub const SESSION_EXPORT_SCHEMA: &str = "dispo.session-export/1";

/// Every (feedback, verdict, dispositions) triple collected by a session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionExport {
    pub schema: String,
    pub session: String,
    pub agent: AgentId,
    pub corpus: String,
    pub records: Vec<SessionRecord>,
}

impl SessionExport {
    pub fn to_json(&self) -> Vec<u8> {
        serde_json::to_vec_pretty(self).expect("export serializes")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_slice(bytes);
        let e: SessionExport = serde_path_to_error::deserialize(de).map_err(Error::schema)?;
        if e.schema != SESSION_EXPORT_SCHEMA {
            return Err(Error::SchemaViolation {
                path: "$.schema".into(),
                message: format!("expected {SESSION_EXPORT_SCHEMA:?}, found {:?}", e.schema),
            });
        }
        Ok(e)
    }

    /// Recomputes each record's verdict and dispositions against `corpus`.
    /// Returns the indices of records whose stored outcome differs.
    pub fn reevaluate(&self, corpus: &Corpus, cfg: &SoundnessConfig) -> Result<Vec<usize>> {
        let mut diverging = Vec::new();
        for (i, r) in self.records.iter().enumerate() {
            let s = corpus
                .get(&r.feedback.scenario)
                .ok_or_else(|| Error::NotFound {
                    kind: "scenario",
                    id: r.feedback.scenario.clone(),
                })?;
            let verdict = sound(s, r.feedback.response, &r.feedback.justification, cfg);
            let dispositions = elicit(&self.agent, s, &r.feedback, &verdict)?;
            if verdict != r.verdict || dispositions != r.dispositions {
                diverging.push(i);
            }
        }
        Ok(diverging)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::builtin_corpus;
    use crate::model::{Justification, Response};
    use crate::soundness::Verdict;

    fn agent() -> AgentId {
        AgentId::new("a").unwrap()
    }

    fn fb(scenario: &str, r: Response, j: [u8; 4]) -> Feedback {
        Feedback::new(agent(), scenario, r, Justification::from_array(j))
    }

    #[test]
    fn walk_through_builtin_corpus() {
        let c = builtin_corpus();
        let cfg = SoundnessConfig::default();
        let mut s = Session::new("s1", agent(), &c);
        assert_eq!(
            s.next_scenario(&c).unwrap().scenario().unwrap().id(),
            "postoffice"
        );

        let err = s
            .submit(&c, fb("fruits", Response::Yes, [1, 1, 1, 1]), &cfg)
            .unwrap_err();
        assert!(matches!(err, Error::WrongScenario { .. }));

        let sub = s
            .submit(&c, fb("postoffice", Response::Yes, [4, 1, 1, 1]), &cfg)
            .unwrap();
        assert_eq!(sub.verdict.overall, Verdict::Sound);
        assert_eq!(sub.cursor, 1);

        let sub = s
            .submit(&c, fb("fruits", Response::Yes, [1, 1, 1, 4]), &cfg)
            .unwrap();
        assert_eq!(sub.verdict.overall, Verdict::Unsound);
        assert!(sub.dispositions.is_empty());
        assert_eq!(s.next_scenario(&c).unwrap(), Next::Done);

        let err = s
            .submit(&c, fb("fruits", Response::Yes, [1, 1, 1, 1]), &cfg)
            .unwrap_err();
        assert!(matches!(err, Error::SessionComplete(_)));

        let export = s.export();
        assert_eq!(export.records.len(), 2);
        assert!(export.reevaluate(&c, &cfg).unwrap().is_empty());
        let back = SessionExport::from_json(&export.to_json()).unwrap();
        assert_eq!(back, export);
    }

    #[test]
    fn empty_corpus_is_done_immediately() {
        let c =
            crate::corpus::load_corpus(b"[]", crate::corpus::CorpusFormat::Json, "empty").unwrap();
        let s = Session::new("s", agent(), &c);
        assert_eq!(s.next_scenario(&c).unwrap(), Next::Done);
        assert!(s.export().records.is_empty());
    }

    #[test]
    fn wrong_agent() {
        let c = builtin_corpus();
        let mut s = Session::new("s", agent(), &c);
        let mut f = fb("postoffice", Response::Yes, [4, 1, 1, 1]);
        f.agent = AgentId::new("b").unwrap();
        assert!(matches!(
            s.submit(&c, f, &SoundnessConfig::default()),
            Err(Error::WrongAgent { .. })
        ));
        assert_eq!(s.cursor(), 0);
    }

    #[test]
    fn shuffle_is_seeded_permutation() {
        let c = builtin_corpus();
        let a = Session::shuffled("s", agent(), &c, 7);
        let b = Session::shuffled("s", agent(), &c, 7);
        assert_eq!(a, b);
        let mut order = a.order.clone();
        order.sort();
        assert_eq!(order, vec![0, 1]);
    }

    #[test]
    fn persisted_session_resumes() {
        let c = builtin_corpus();
        let mut s = Session::new("s", agent(), &c);
        s.submit(
            &c,
            fb("postoffice", Response::No, [1, 1, 1, 1]),
            &SoundnessConfig::default(),
        )
        .unwrap();
        let back = Session::from_json(&s.to_json()).unwrap();
        assert_eq!(
            back.next_scenario(&c).unwrap().scenario().unwrap().id(),
            "fruits"
        );
    }
}
