//! Per-agent repertoire of dispositions, aggregation into summaries, and
//! category-level prediction.
//!
//! Observations are append-only. Conflicting observations are kept side by
//! side; disagreement shows up as `consistency < 1` or a tie.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::elicitation::{Disposition, Pole};
use crate::error::{Error, Result};
use crate::model::{
    category_of, AgentId, Category, Dimension, FeedbackRef, ParameterId, Polarity, Response,
    Scenario,
};
use crate::scalar::Scalar;
use crate::soundness::{SoundnessVerdict, Verdict};

pub type RepertoireKey = (Dimension, Category);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum AuditEntry {
    /// A feedback was judged; present for every verdict, sound or not.
    Assessed {
        feedback: FeedbackRef,
        scenario: String,
        verdict: Verdict,
    },
    /// A disposition was appended to the repertoire.
    Recorded {
        feedback: FeedbackRef,
        dimension: Dimension,
        category: Category,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    agent: AgentId,
    repertoire: BTreeMap<RepertoireKey, Vec<Disposition>>,
    audit: Vec<AuditEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DominantPole {
    Positive,
    Negative,
    Tied,
}

impl DominantPole {
    pub fn pole(self) -> Option<Pole> {
        match self {
            Self::Positive => Some(Pole::Positive),
            Self::Negative => Some(Pole::Negative),
            Self::Tied => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispositionSummary<T> {
    pub dominant_pole: DominantPole,
    pub mean_grade: T,
    pub support: usize,
    pub consistency: T,
    pub positive: usize,
    pub negative: usize,
}

impl<T: Scalar> DispositionSummary<T> {
    /// Aggregates a non-empty list of observations.
    pub fn from_observations(obs: &[Disposition]) -> Option<Self> {
        if obs.is_empty() {
            return None;
        }
        let support = obs.len();
        let positive = obs.iter().filter(|d| d.pole == Pole::Positive).count();
        let negative = support - positive;
        let dominant_pole = match positive.cmp(&negative) {
            std::cmp::Ordering::Greater => DominantPole::Positive,
            std::cmp::Ordering::Less => DominantPole::Negative,
            std::cmp::Ordering::Equal => DominantPole::Tied,
        };
        let grade_sum: usize = obs.iter().map(|d| d.grade.get() as usize).sum();
        Some(Self {
            dominant_pole,
            mean_grade: T::ratio(grade_sum, support),
            support,
            consistency: T::ratio(positive.max(negative), support),
            positive,
            negative,
        })
    }

    /// Vote weight: consistency × support.
    pub fn weight(&self) -> T {
        self.consistency.clone() * T::from_count(self.support)
    }

    pub fn to_f64(&self) -> DispositionSummary<f64> {
        DispositionSummary {
            dominant_pole: self.dominant_pole,
            mean_grade: self.mean_grade.to_f64_lossy(),
            support: self.support,
            consistency: self.consistency.to_f64_lossy(),
            positive: self.positive,
            negative: self.negative,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PredictedResponse {
    Yes,
    No,
    Abstain,
}

impl From<Response> for PredictedResponse {
    fn from(r: Response) -> Self {
        match r {
            Response::Yes => Self::Yes,
            Response::No => Self::No,
        }
    }
}

impl PredictedResponse {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Yes => "yes",
            Self::No => "no",
            Self::Abstain => "abstain",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Vote<T> {
    pub parameter: ParameterId,
    pub dimension: Dimension,
    pub polarity: Polarity,
    pub summary: DispositionSummary<T>,
    /// `None` when the summary is tied and casts no vote.
    pub vote: Option<Response>,
    pub weight: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction<T> {
    pub response: PredictedResponse,
    /// Winning weight over total weight; zero when abstaining.
    pub confidence: T,
    pub category: Category,
    pub rationale: Vec<Vote<T>>,
}

impl<T: Scalar> Prediction<T> {
    pub fn to_f64(&self) -> Prediction<f64> {
        Prediction {
            response: self.response,
            confidence: self.confidence.to_f64_lossy(),
            category: self.category,
            rationale: self
                .rationale
                .iter()
                .map(|v| Vote {
                    parameter: v.parameter,
                    dimension: v.dimension,
                    polarity: v.polarity,
                    summary: v.summary.to_f64(),
                    vote: v.vote,
                    weight: v.weight.to_f64_lossy(),
                })
                .collect(),
        }
    }
}

/// Response a summary's pole implies for a scenario with `polarity`.
pub fn vote_for(pole: Pole, polarity: Polarity) -> Response {
    match (pole, polarity) {
        (Pole::Positive, Polarity::Aligned) | (Pole::Negative, Polarity::Opposed) => Response::Yes,
        (Pole::Positive, Polarity::Opposed) | (Pole::Negative, Polarity::Aligned) => Response::No,
    }
}

impl Profile {
    pub fn new(agent: AgentId) -> Self {
        Self {
            agent,
            repertoire: BTreeMap::new(),
            audit: Vec::new(),
        }
    }

    pub fn agent(&self) -> &AgentId {
        &self.agent
    }

    pub fn repertoire(&self) -> &BTreeMap<RepertoireKey, Vec<Disposition>> {
        &self.repertoire
    }

    pub fn audit(&self) -> &[AuditEntry] {
        &self.audit
    }

    pub fn observations(&self, dimension: Dimension, category: Category) -> &[Disposition] {
        self.repertoire
            .get(&(dimension, category))
            .map_or(&[], Vec::as_slice)
    }

    pub fn is_empty(&self) -> bool {
        self.repertoire.is_empty() && self.audit.is_empty()
    }

    /// Appends `d` under its (dimension, stimulus) key.
    pub fn record(&mut self, d: Disposition) -> Result<()> {
        if d.agent != self.agent {
            return Err(Error::AgentMismatch {
                expected: self.agent.to_string(),
                found: d.agent.to_string(),
            });
        }
        self.audit.push(AuditEntry::Recorded {
            feedback: d.provenance.feedback.clone(),
            dimension: d.dimension,
            category: d.stimulus,
        });
        self.repertoire
            .entry((d.dimension, d.stimulus))
            .or_default()
            .push(d);
        Ok(())
    }

    /// Audits a judged feedback and records whatever it elicited.
    pub fn ingest(
        &mut self,
        feedback: FeedbackRef,
        scenario: &str,
        verdict: &SoundnessVerdict,
        dispositions: &[Disposition],
    ) -> Result<()> {
        if let Some(d) = dispositions.iter().find(|d| d.agent != self.agent) {
            return Err(Error::AgentMismatch {
                expected: self.agent.to_string(),
                found: d.agent.to_string(),
            });
        }
        self.audit.push(AuditEntry::Assessed {
            feedback,
            scenario: scenario.to_owned(),
            verdict: verdict.overall,
        });
        for d in dispositions {
            self.record(d.clone())?;
        }
        Ok(())
    }

    pub fn summarize<T: Scalar>(
        &self,
        dimension: Dimension,
        category: Category,
    ) -> Option<DispositionSummary<T>> {
        DispositionSummary::from_observations(self.observations(dimension, category))
    }

    pub fn summaries<T: Scalar>(&self) -> Vec<(RepertoireKey, DispositionSummary<T>)> {
        self.repertoire
            .iter()
            .filter_map(|(k, obs)| DispositionSummary::from_observations(obs).map(|s| (*k, s)))
            .collect()
    }

    /// Predicts the agent's response to `s` from summaries in its category.
    pub fn predict<T: Scalar>(&self, s: &Scenario) -> Prediction<T> {
        let category = category_of(s);
        let mut rationale = Vec::new();
        let (mut yes, mut no) = (T::zero(), T::zero());
        for (&p, &polarity) in s.polarities() {
            let dimension = p.dimension();
            let Some(summary) = self.summarize::<T>(dimension, category) else {
                continue;
            };
            let vote = summary
                .dominant_pole
                .pole()
                .map(|pole| vote_for(pole, polarity));
            let weight = if vote.is_some() {
                summary.weight()
            } else {
                T::zero()
            };
            match vote {
                Some(Response::Yes) => yes = yes + weight.clone(),
                Some(Response::No) => no = no + weight.clone(),
                None => {}
            }
            rationale.push(Vote {
                parameter: p,
                dimension,
                polarity,
                summary,
                vote,
                weight,
            });
        }
        let total = yes.clone() + no.clone();
        let (response, confidence) = if total.is_zero() || yes == no {
            (PredictedResponse::Abstain, T::zero())
        } else if yes > no {
            (PredictedResponse::Yes, yes / total)
        } else {
            (PredictedResponse::No, no / total)
        };
        Prediction {
            response,
            confidence,
            category,
            rationale,
        }
    }

    pub fn to_json(&self) -> Vec<u8> {
        serde_json::to_vec_pretty(&ProfileDocument::from(self)).expect("profile serializes")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_slice(bytes);
        let doc: ProfileDocument = serde_path_to_error::deserialize(de).map_err(Error::schema)?;
        doc.try_into()
    }
}

/// Functional form of [`Profile::record`].
pub fn record(mut p: Profile, d: Disposition) -> Result<Profile> {
    p.record(d)?;
    Ok(p)
}

pub fn summarize<T: Scalar>(
    p: &Profile,
    dimension: Dimension,
    category: Category,
) -> Option<DispositionSummary<T>> {
    p.summarize(dimension, category)
}

pub fn predict<T: Scalar>(p: &Profile, s: &Scenario) -> Prediction<T> {
    p.predict(s)
}

pub fn serialize_profile(p: &Profile) -> Vec<u8> {
    p.to_json()
}

pub fn deserialize_profile(bytes: &[u8]) -> Result<Profile> {
    Profile::from_json(bytes)
}

pub const PROFILE_SCHEMA: &str = "dispo.profile/1";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileDocument {
    schema: String,
    agent: AgentId,
    repertoire: Vec<RepertoireEntry>,
    audit: Vec<AuditEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RepertoireEntry {
    dimension: Dimension,
    category: Category,
    observations: Vec<Disposition>,
}

impl From<&Profile> for ProfileDocument {
    fn from(p: &Profile) -> Self {
        Self {
            schema: PROFILE_SCHEMA.into(),
            agent: p.agent.clone(),
            repertoire: p
                .repertoire
                .iter()
                .map(|(&(dimension, category), obs)| RepertoireEntry {
                    dimension,
                    category,
                    observations: obs.clone(),
                })
                .collect(),
            audit: p.audit.clone(),
        }
    }
}

impl TryFrom<ProfileDocument> for Profile {
    type Error = Error;

    fn try_from(doc: ProfileDocument) -> Result<Self> {
        let violation = |path: String, message: String| Error::SchemaViolation { path, message };
        if doc.schema != PROFILE_SCHEMA {
            return Err(violation(
                "$.schema".into(),
                format!("expected {PROFILE_SCHEMA:?}, found {:?}", doc.schema),
            ));
        }
        let mut repertoire = BTreeMap::new();
        for (i, entry) in doc.repertoire.into_iter().enumerate() {
            let key = (entry.dimension, entry.category);
            if entry.observations.is_empty() {
                return Err(violation(
                    format!("$.repertoire[{i}].observations"),
                    "must be non-empty".into(),
                ));
            }
            for (j, d) in entry.observations.iter().enumerate() {
                let path = format!("$.repertoire[{i}].observations[{j}]");
                if d.agent != doc.agent {
                    return Err(violation(
                        format!("{path}.agent"),
                        format!("expected {}, found {}", doc.agent, d.agent),
                    ));
                }
                if (d.dimension, d.stimulus) != key {
                    return Err(violation(
                        path,
                        "disposition does not match its repertoire key".into(),
                    ));
                }
            }
            if repertoire.insert(key, entry.observations).is_some() {
                return Err(violation(
                    format!("$.repertoire[{i}]"),
                    "duplicate (dimension, category) entry".into(),
                ));
            }
        }
        Ok(Profile {
            agent: doc.agent,
            repertoire,
            audit: doc.audit,
        })
    }
}
