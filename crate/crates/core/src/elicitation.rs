//! Turning sound feedback into graded stimulus–manifestation rules.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    AgentId, Category, Dimension, Feedback, FeedbackRef, Response, ScaleValue, Scenario,
};
use crate::soundness::{combine, expected_band, SoundnessVerdict, ValueBand, Verdict};

/// Which end of a dimension the agent manifests. `Positive` is the high end
/// (altruistic, law abiding, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pole {
    Positive,
    Negative,
}

impl Pole {
    pub fn flip(self) -> Self {
        match self {
            Self::Positive => Self::Negative,
            Self::Negative => Self::Positive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Manifestation {
    WouldAct,
    WouldRefrain,
}

impl From<Response> for Manifestation {
    fn from(r: Response) -> Self {
        match r {
            Response::Yes => Self::WouldAct,
            Response::No => Self::WouldRefrain,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Provenance {
    pub scenario: String,
    pub feedback: FeedbackRef,
}

/// A graded disposition: when in a scenario of category `stimulus`, the
/// agent manifests `pole` on `dimension` to degree `grade`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Disposition {
    pub agent: AgentId,
    pub dimension: Dimension,
    pub stimulus: Category,
    pub pole: Pole,
    pub grade: ScaleValue,
    pub manifestation: Manifestation,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoleLabels {
    pub positive: String,
    pub negative: String,
}

/// Human-readable names for each (dimension, pole). Always total.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct PoleLabelTable(BTreeMap<Dimension, PoleLabels>);

impl Default for PoleLabelTable {
    fn default() -> Self {
        let pair = |p: &str, n: &str| PoleLabels {
            positive: p.into(),
            negative: n.into(),
        };
        Self(BTreeMap::from([
            (Dimension::Goodwill, pair("altruistic", "non-altruistic")),
            (Dimension::SelfServingness, pair("egoistic", "non-egoistic")),
            (
                Dimension::Pragmatism,
                pair("experience-driven", "experience-indifferent"),
            ),
            (Dimension::Legality, pair("law abiding", "law defying")),
        ]))
    }
}

/// Partial label overrides as found in configuration files.
pub type PoleLabelOverrides = BTreeMap<Dimension, PartialPoleLabels>;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialPoleLabels {
    pub positive: Option<String>,
    pub negative: Option<String>,
}

impl PoleLabelTable {
    pub fn label(&self, dimension: Dimension, pole: Pole) -> &str {
        let labels = &self.0[&dimension];
        match pole {
            Pole::Positive => &labels.positive,
            Pole::Negative => &labels.negative,
        }
    }

    pub fn with_overrides(mut self, overrides: &PoleLabelOverrides) -> Self {
        for (dim, o) in overrides {
            let entry = self.0.get_mut(dim).expect("table is total");
            if let Some(p) = &o.positive {
                entry.positive = p.clone();
            }
            if let Some(n) = &o.negative {
                entry.negative = n.clone();
            }
        }
        self
    }
}

impl<'de> Deserialize<'de> for PoleLabelTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let overrides = PoleLabelOverrides::deserialize(d)?;
        Ok(PoleLabelTable::default().with_overrides(&overrides))
    }
}

/// Pole expressed by answering `response` on a parameter with `polarity`.
pub fn pole_for(response: Response, polarity: crate::model::Polarity) -> Pole {
    match expected_band(response, polarity) {
        ValueBand::High => Pole::Positive,
        _ => Pole::Negative,
    }
}

/// Checks that `verdict` was computed for `s` and `f`.
fn verdict_matches(s: &Scenario, f: &Feedback, verdict: &SoundnessVerdict) -> bool {
    if f.scenario != s.id() || verdict.per_parameter.len() != s.press().len() {
        return false;
    }
    let per_param_ok = s.polarities().iter().all(|(p, &pol)| {
        verdict.per_parameter.get(p).is_some_and(|pv| {
            pv.value == f.justification.get(*p) && pv.expected == expected_band(f.response, pol)
        })
    });
    per_param_ok
        && combine(
            verdict.per_parameter.values().map(|v| v.verdict),
            verdict.combinator,
        ) == verdict.overall
}

/// Elicits one disposition per pressed parameter when the feedback is sound.
///
/// Under the `any` combinator only parameters that are individually sound
/// produce a disposition.
pub fn elicit(
    agent: &AgentId,
    s: &Scenario,
    f: &Feedback,
    verdict: &SoundnessVerdict,
) -> Result<Vec<Disposition>> {
    if &f.agent != agent {
        return Err(Error::AgentMismatch {
            expected: agent.to_string(),
            found: f.agent.to_string(),
        });
    }
    if !verdict_matches(s, f, verdict) {
        return Err(Error::VerdictMismatch {
            scenario: s.id().to_owned(),
        });
    }
    if verdict.overall != Verdict::Sound {
        return Ok(Vec::new());
    }
    let provenance = Provenance {
        scenario: s.id().to_owned(),
        feedback: f.reference(),
    };
    Ok(s.polarities()
        .iter()
        .filter(|(p, _)| verdict.per_parameter[*p].verdict == Verdict::Sound)
        .map(|(&p, &pol)| Disposition {
            agent: agent.clone(),
            dimension: p.dimension(),
            stimulus: s.category(),
            pole: pole_for(f.response, pol),
            grade: f.justification.get(p),
            manifestation: f.response.into(),
            provenance: provenance.clone(),
        })
        .collect())
}

/// Renders the counterfactual conditional characterising `d`.
pub fn render_counterfactual(d: &Disposition, labels: &PoleLabelTable) -> String {
    Counterfactual {
        disposition: d,
        labels,
    }
    .to_string()
}

struct Counterfactual<'a> {
    disposition: &'a Disposition,
    labels: &'a PoleLabelTable,
}

impl fmt::Display for Counterfactual<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.disposition;
        let verb = match d.manifestation {
            Manifestation::WouldAct => "take",
            Manifestation::WouldRefrain => "refrain from",
        };
        write!(
            f,
            "if {agent} were in a scenario of category {cat}, {agent} would {verb} the action ({label}, grade {grade}/5)",
            agent = d.agent,
            cat = d.stimulus,
            label = self.labels.label(d.dimension, d.pole),
            grade = d.grade,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_scenario, Justification, ParameterId, RawScenario};
    use crate::soundness::{sound, Combinator, SoundnessConfig};

    fn scenario(id: &str, press: &[(&str, &str)]) -> Scenario {
        validate_scenario(&RawScenario {
            id: Some(id.into()),
            setting: Some("x".into()),
            problem: Some("x".into()),
            action: Some("x".into()),
            press: Some(press.iter().map(|(p, _)| p.to_string()).collect()),
            polarity: Some(
                press
                    .iter()
                    .map(|(p, v)| (p.to_string(), v.to_string()))
                    .collect(),
            ),
        })
        .unwrap()
    }

    fn run(s: &Scenario, r: Response, j: [u8; 4]) -> Vec<Disposition> {
        let a = AgentId::new("a").unwrap();
        let f = Feedback::new(a.clone(), s.id(), r, Justification::from_array(j));
        let v = sound(s, r, &f.justification, &SoundnessConfig::default());
        elicit(&a, s, &f, &v).unwrap()
    }

    #[test]
    fn fruits_branches() {
        let fruits = scenario("fruits", &[("P4", "opposed")]);
        let labels = PoleLabelTable::default();

        let defy = run(&fruits, Response::Yes, [1, 1, 1, 1]);
        assert_eq!(defy.len(), 1);
        let d = &defy[0];
        assert_eq!(
            (d.dimension, d.pole, d.grade.get(), d.manifestation),
            (
                Dimension::Legality,
                Pole::Negative,
                1,
                Manifestation::WouldAct
            )
        );
        assert_eq!(d.stimulus, Category::from_params([ParameterId::P4]));
        assert_eq!(labels.label(d.dimension, d.pole), "law defying");
        assert_eq!(
            render_counterfactual(d, &labels),
            "if a were in a scenario of category {P4}, a would take the action (law defying, grade 1/5)"
        );

        let abide = run(&fruits, Response::No, [1, 1, 1, 4]);
        assert_eq!(abide.len(), 1);
        assert_eq!(
            (abide[0].pole, abide[0].manifestation),
            (Pole::Positive, Manifestation::WouldRefrain)
        );
        assert_eq!(
            render_counterfactual(&abide[0], &labels),
            "if a were in a scenario of category {P4}, a would refrain from the action (law abiding, grade 4/5)"
        );

        assert!(run(&fruits, Response::Yes, [1, 1, 1, 4]).is_empty());
    }

    #[test]
    fn postoffice_altruistic() {
        let post = scenario("postoffice", &[("P1", "aligned")]);
        let ds = run(&post, Response::Yes, [5, 1, 1, 1]);
        assert_eq!(ds.len(), 1);
        assert_eq!(
            (ds[0].dimension, ds[0].pole, ds[0].grade.get()),
            (Dimension::Goodwill, Pole::Positive, 5)
        );
        assert_eq!(
            PoleLabelTable::default().label(ds[0].dimension, ds[0].pole),
            "altruistic"
        );
    }

    #[test]
    fn one_disposition_per_pressed_parameter() {
        let s = scenario("multi", &[("P1", "aligned"), ("P4", "opposed")]);
        let ds = run(&s, Response::Yes, [5, 3, 3, 2]);
        assert_eq!(ds.len(), 2);
        assert_eq!(ds[0].dimension, Dimension::Goodwill);
        assert_eq!(ds[1].grade.get(), 2);
        assert!(run(&s, Response::Yes, [5, 3, 3, 3]).is_empty());
    }

    #[test]
    fn any_combinator_elicits_only_sound_parameters() {
        let s = scenario("multi", &[("P1", "aligned"), ("P4", "opposed")]);
        let a = AgentId::new("a").unwrap();
        let f = Feedback::new(
            a.clone(),
            "multi",
            Response::Yes,
            Justification::from_array([5, 1, 1, 5]),
        );
        let cfg = SoundnessConfig::default().with_combinator(Combinator::Any);
        let v = sound(&s, f.response, &f.justification, &cfg);
        assert!(v.is_sound());
        let ds = elicit(&a, &s, &f, &v).unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds[0].dimension, Dimension::Goodwill);
    }

    #[test]
    fn verdict_mismatch() {
        let s = scenario("fruits", &[("P4", "opposed")]);
        let a = AgentId::new("a").unwrap();
        let f = Feedback::new(
            a.clone(),
            "fruits",
            Response::Yes,
            Justification::from_array([1, 1, 1, 1]),
        );
        let other = Feedback {
            response: Response::No,
            ..f.clone()
        };
        let v = sound(
            &s,
            other.response,
            &other.justification,
            &SoundnessConfig::default(),
        );
        assert!(matches!(
            elicit(&a, &s, &f, &v),
            Err(Error::VerdictMismatch { .. })
        ));

        let post = scenario("postoffice", &[("P1", "aligned")]);
        let v = sound(
            &post,
            f.response,
            &f.justification,
            &SoundnessConfig::default(),
        );
        assert!(matches!(
            elicit(&a, &s, &f, &v),
            Err(Error::VerdictMismatch { .. })
        ));
    }

    #[test]
    fn label_overrides_merge() {
        let o: PoleLabelOverrides =
            serde_json::from_str(r#"{"legality":{"negative":"rule breaker"}}"#).unwrap();
        let t = PoleLabelTable::default().with_overrides(&o);
        assert_eq!(t.label(Dimension::Legality, Pole::Negative), "rule breaker");
        assert_eq!(t.label(Dimension::Legality, Pole::Positive), "law abiding");
    }
}
