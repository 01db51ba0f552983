//! Questionnaire ontology: parameters, the 1–5 scale, scenarios, feedback
//! and the category equivalence over press sets.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Violation;

/// One of the four justification parameters. Ordering is fixed (P1 < P4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ParameterId {
    P1,
    P2,
    P3,
    P4,
}

impl ParameterId {
    pub const ALL: [ParameterId; 4] = [Self::P1, Self::P2, Self::P3, Self::P4];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::P1 => "P1",
            Self::P2 => "P2",
            Self::P3 => "P3",
            Self::P4 => "P4",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "P1" | "p1" => Some(Self::P1),
            "P2" | "p2" => Some(Self::P2),
            "P3" | "p3" => Some(Self::P3),
            "P4" | "p4" => Some(Self::P4),
            _ => None,
        }
    }

    pub fn dimension(self) -> Dimension {
        match self {
            Self::P1 => Dimension::Goodwill,
            Self::P2 => Dimension::SelfServingness,
            Self::P3 => Dimension::Pragmatism,
            Self::P4 => Dimension::Legality,
        }
    }

    fn bit(self) -> u8 {
        1 << self.index()
    }
}

impl fmt::Display for ParameterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Determinable–determinate pair a parameter is graded along. Named by the
/// determinable; bijective with [`ParameterId`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Goodwill,
    SelfServingness,
    Pragmatism,
    Legality,
}

impl Dimension {
    pub const ALL: [Dimension; 4] = [
        Self::Goodwill,
        Self::SelfServingness,
        Self::Pragmatism,
        Self::Legality,
    ];

    pub fn parameter(self) -> ParameterId {
        match self {
            Self::Goodwill => ParameterId::P1,
            Self::SelfServingness => ParameterId::P2,
            Self::Pragmatism => ParameterId::P3,
            Self::Legality => ParameterId::P4,
        }
    }

    pub fn determinable(self) -> &'static str {
        match self {
            Self::Goodwill => "goodwill",
            Self::SelfServingness => "self-servingness",
            Self::Pragmatism => "pragmatism",
            Self::Legality => "legality",
        }
    }

    pub fn determinate(self) -> &'static str {
        match self {
            Self::Goodwill => "altruism",
            Self::SelfServingness => "egoism",
            Self::Pragmatism => "expertness",
            Self::Legality => "obedience",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|d| d.determinable() == s || d.key() == s)
    }

    /// snake_case identifier used in serialized documents.
    pub fn key(self) -> &'static str {
        match self {
            Self::Goodwill => "goodwill",
            Self::SelfServingness => "self_servingness",
            Self::Pragmatism => "pragmatism",
            Self::Legality => "legality",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.determinable())
    }
}

/// A point on the 1–5 interval scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct ScaleValue(u8);

impl ScaleValue {
    pub const MIN: ScaleValue = ScaleValue(1);
    pub const MAX: ScaleValue = ScaleValue(5);

    pub fn new(value: i64) -> Option<Self> {
        (1..=5).contains(&value).then_some(Self(value as u8))
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = ScaleValue> {
        (1..=5).map(ScaleValue)
    }
}

impl TryFrom<i64> for ScaleValue {
    type Error = i64;

    fn try_from(value: i64) -> Result<Self, Self::Error> {
        Self::new(value).ok_or(value)
    }
}

impl<'de> Deserialize<'de> for ScaleValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = i64::deserialize(d)?;
        ScaleValue::new(v)
            .ok_or_else(|| serde::de::Error::custom(format!("scale value {v} outside 1..5")))
    }
}

impl fmt::Display for ScaleValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Whether taking the scenario's action expresses the high (`Aligned`) or low
/// (`Opposed`) end of a pressed parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Aligned,
    Opposed,
}

impl Polarity {
    pub fn flip(self) -> Self {
        match self {
            Self::Aligned => Self::Opposed,
            Self::Opposed => Self::Aligned,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "aligned" | "Aligned" => Some(Self::Aligned),
            "opposed" | "Opposed" => Some(Self::Opposed),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Response {
    Yes,
    No,
}

impl Response {
    pub fn flip(self) -> Self {
        match self {
            Self::Yes => Self::No,
            Self::No => Self::Yes,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "yes" | "Yes" | "YES" | "y" => Some(Self::Yes),
            "no" | "No" | "NO" | "n" => Some(Self::No),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Yes => "yes",
            Self::No => "no",
        }
    }
}

impl fmt::Display for Response {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A set of parameters; the press set of a scenario and therefore its
/// category. Serialized as a sorted array of parameter ids.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Category(u8);

impl Category {
    pub const EMPTY: Category = Category(0);

    pub fn from_params<I: IntoIterator<Item = ParameterId>>(params: I) -> Self {
        Self(params.into_iter().fold(0, |acc, p| acc | p.bit()))
    }

    /// All sixteen categories, from `{}` to `{P1, P2, P3, P4}`.
    pub fn all() -> impl Iterator<Item = Category> {
        (0u8..16).map(Category)
    }

    pub fn contains(self, p: ParameterId) -> bool {
        self.0 & p.bit() != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn params(self) -> impl Iterator<Item = ParameterId> {
        ParameterId::ALL
            .into_iter()
            .filter(move |p| self.contains(*p))
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, p) in self.params().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(p.as_str())?;
        }
        f.write_str("}")
    }
}

impl Serialize for Category {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.params())
    }
}

impl<'de> Deserialize<'de> for Category {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let params = Vec::<ParameterId>::deserialize(d)?;
        Ok(Category::from_params(params))
    }
}

/// Opaque, non-empty agent identifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct AgentId(String);

impl AgentId {
    pub fn new(id: impl Into<String>) -> Option<Self> {
        let id = id.into();
        (!id.trim().is_empty()).then_some(Self(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl<'de> Deserialize<'de> for AgentId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        AgentId::new(String::deserialize(d)?)
            .ok_or_else(|| serde::de::Error::custom("agent id must be non-empty"))
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A validated scenario. Build one with [`validate_scenario`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Scenario {
    id: String,
    setting: String,
    problem: String,
    action: String,
    press: Category,
    polarity: BTreeMap<ParameterId, Polarity>,
}

impl Scenario {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn setting(&self) -> &str {
        &self.setting
    }

    pub fn problem(&self) -> &str {
        &self.problem
    }

    pub fn action(&self) -> &str {
        &self.action
    }

    pub fn press(&self) -> Category {
        self.press
    }

    pub fn polarity(&self, p: ParameterId) -> Option<Polarity> {
        self.polarity.get(&p).copied()
    }

    pub fn polarities(&self) -> &BTreeMap<ParameterId, Polarity> {
        &self.polarity
    }

    pub fn category(&self) -> Category {
        category_of(self)
    }

    /// Same scenario under a different id and with every polarity replaced
    /// by `f(parameter, polarity)`.
    pub fn with_polarity(
        &self,
        id: impl Into<String>,
        f: impl Fn(ParameterId, Polarity) -> Polarity,
    ) -> Scenario {
        Scenario {
            id: id.into(),
            polarity: self
                .polarity
                .iter()
                .map(|(&p, &pol)| (p, f(p, pol)))
                .collect(),
            ..self.clone()
        }
    }

    pub fn to_raw(&self) -> RawScenario {
        RawScenario {
            id: Some(self.id.clone()),
            setting: Some(self.setting.clone()),
            problem: Some(self.problem.clone()),
            action: Some(self.action.clone()),
            press: Some(self.press.params().map(|p| p.as_str().to_owned()).collect()),
            polarity: Some(
                self.polarity
                    .iter()
                    .map(|(p, pol)| {
                        let v = match pol {
                            Polarity::Aligned => "aligned",
                            Polarity::Opposed => "opposed",
                        };
                        (p.as_str().to_owned(), v.to_owned())
                    })
                    .collect(),
            ),
        }
    }
}

impl<'de> Deserialize<'de> for Scenario {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawScenario::deserialize(d)?;
        validate_scenario(&raw).map_err(|errs| {
            let msg: Vec<String> = errs.iter().map(ToString::to_string).collect();
            serde::de::Error::custom(msg.join("; "))
        })
    }
}

/// The category of a scenario: the class of scenarios sharing its press set.
pub fn category_of(s: &Scenario) -> Category {
    s.press
}

/// Unvalidated scenario record as it appears in corpus files and API payloads.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawScenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub setting: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub press: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polarity: Option<BTreeMap<String, String>>,
}

pub fn validate_scenario(raw: &RawScenario) -> Result<Scenario, Vec<Violation>> {
    let mut errs = Vec::new();

    let mut text = |field: &'static str, v: &Option<String>| -> String {
        match v {
            None => {
                errs.push(Violation::MissingField {
                    field: field.into(),
                });
                String::new()
            }
            Some(t) if t.trim().is_empty() => {
                errs.push(Violation::EmptyText {
                    field: field.into(),
                });
                String::new()
            }
            Some(t) => t.clone(),
        }
    };
    let id = text("id", &raw.id);
    let setting = text("setting", &raw.setting);
    let problem = text("problem", &raw.problem);
    let action = text("action", &raw.action);

    let mut press = Vec::new();
    match &raw.press {
        None => errs.push(Violation::MissingField {
            field: "press".into(),
        }),
        Some(items) => {
            for (i, item) in items.iter().enumerate() {
                match ParameterId::parse(item) {
                    Some(p) if press.contains(&p) => errs.push(Violation::DuplicateParameter {
                        field: format!("press[{i}]"),
                        parameter: p,
                    }),
                    Some(p) => press.push(p),
                    None => errs.push(Violation::UnknownParameter {
                        field: format!("press[{i}]"),
                        value: item.clone(),
                    }),
                }
            }
        }
    }
    let press = Category::from_params(press);

    let mut polarity = BTreeMap::new();
    match &raw.polarity {
        None => errs.push(Violation::MissingField {
            field: "polarity".into(),
        }),
        Some(map) => {
            for (k, v) in map {
                let Some(p) = ParameterId::parse(k) else {
                    errs.push(Violation::UnknownParameter {
                        field: format!("polarity.{k}"),
                        value: k.clone(),
                    });
                    continue;
                };
                match Polarity::parse(v) {
                    Some(pol) => {
                        polarity.insert(p, pol);
                    }
                    None => errs.push(Violation::UnknownPolarity {
                        field: format!("polarity.{k}"),
                        value: v.clone(),
                    }),
                }
            }
            let keys = Category::from_params(polarity.keys().copied());
            let unparsed = map.len() != polarity.len();
            if !unparsed && keys != press {
                errs.push(Violation::PolarityPressMismatch {
                    press,
                    polarity: keys,
                });
            }
        }
    }

    if errs.is_empty() {
        Ok(Scenario {
            id,
            setting,
            problem,
            action,
            press,
            polarity,
        })
    } else {
        Err(errs)
    }
}

/// Justification vector: a value on the scale for each of the four parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Justification([ScaleValue; 4]);

impl Justification {
    pub fn new(values: [ScaleValue; 4]) -> Self {
        Self(values)
    }

    /// Panics if any value is outside 1..5.
    pub fn from_array(values: [u8; 4]) -> Self {
        Self(values.map(|v| ScaleValue::new(v as i64).expect("scale value in 1..5")))
    }

    pub fn get(&self, p: ParameterId) -> ScaleValue {
        self.0[p.index()]
    }

    pub fn set(&mut self, p: ParameterId, v: ScaleValue) {
        self.0[p.index()] = v;
    }

    pub fn values(&self) -> [ScaleValue; 4] {
        self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = (ParameterId, ScaleValue)> + '_ {
        ParameterId::ALL.into_iter().map(|p| (p, self.get(p)))
    }

    /// Parses `P1=4,P2=1,P3=1,P4=1`.
    pub fn parse_assignments(s: &str) -> Result<Self, Vec<Violation>> {
        let mut map = BTreeMap::new();
        let mut errs = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let Some((k, v)) = part.split_once('=') else {
                errs.push(Violation::Malformed {
                    path: "justification".into(),
                    message: format!("expected P<n>=<value>, got {part:?}"),
                });
                continue;
            };
            match v.trim().parse::<i64>() {
                Ok(n) => {
                    map.insert(k.trim().to_owned(), n);
                }
                Err(_) => errs.push(Violation::Malformed {
                    path: format!("justification.{}", k.trim()),
                    message: format!("not an integer: {:?}", v.trim()),
                }),
            }
        }
        match validate_justification(&map) {
            Ok(j) if errs.is_empty() => Ok(j),
            Ok(_) => Err(errs),
            Err(more) => {
                errs.extend(more);
                Err(errs)
            }
        }
    }
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (p, v)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}={v}")?;
        }
        Ok(())
    }
}

impl Serialize for Justification {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(self.iter())
    }
}

impl<'de> Deserialize<'de> for Justification {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let map = BTreeMap::<String, i64>::deserialize(d)?;
        validate_justification(&map).map_err(|errs| {
            let msg: Vec<String> = errs.iter().map(ToString::to_string).collect();
            serde::de::Error::custom(msg.join("; "))
        })
    }
}

fn validate_justification(map: &BTreeMap<String, i64>) -> Result<Justification, Vec<Violation>> {
    let mut errs = Vec::new();
    let mut values = [None; 4];
    for (k, &v) in map {
        let Some(p) = ParameterId::parse(k) else {
            errs.push(Violation::UnknownParameter {
                field: format!("justification.{k}"),
                value: k.clone(),
            });
            continue;
        };
        match ScaleValue::new(v) {
            Some(sv) => values[p.index()] = Some(sv),
            None => errs.push(Violation::ValueOutOfRange {
                parameter: p,
                value: v,
            }),
        }
    }
    for p in ParameterId::ALL {
        if !map.keys().any(|k| ParameterId::parse(k) == Some(p)) {
            errs.push(Violation::MissingParameter { parameter: p });
        }
    }
    if errs.is_empty() {
        Ok(Justification(values.map(|v| v.expect("checked above"))))
    } else {
        Err(errs)
    }
}

/// A response and justification given by an agent on a scenario.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Feedback {
    pub agent: AgentId,
    pub scenario: String,
    pub response: Response,
    pub justification: Justification,
}

impl Feedback {
    pub fn new(
        agent: AgentId,
        scenario: impl Into<String>,
        response: Response,
        justification: Justification,
    ) -> Self {
        Self {
            agent,
            scenario: scenario.into(),
            response,
            justification,
        }
    }

    /// Canonical textual reference used in provenance and audit trails.
    pub fn reference(&self) -> FeedbackRef {
        FeedbackRef(format!(
            "{}/{}/{}/{}",
            self.agent, self.scenario, self.response, self.justification
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeedbackRef(pub String);

impl fmt::Display for FeedbackRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Unvalidated feedback record.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawFeedback {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agent: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub response: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub justification: Option<BTreeMap<String, i64>>,
}

pub fn validate_feedback(raw: &RawFeedback) -> Result<Feedback, Vec<Violation>> {
    let mut errs = Vec::new();

    let agent = match &raw.agent {
        None => {
            errs.push(Violation::MissingField {
                field: "agent".into(),
            });
            None
        }
        Some(a) => {
            let id = AgentId::new(a.clone());
            if id.is_none() {
                errs.push(Violation::EmptyText {
                    field: "agent".into(),
                });
            }
            id
        }
    };
    let scenario = match &raw.scenario {
        None => {
            errs.push(Violation::MissingField {
                field: "scenario".into(),
            });
            String::new()
        }
        Some(s) if s.trim().is_empty() => {
            errs.push(Violation::EmptyText {
                field: "scenario".into(),
            });
            String::new()
        }
        Some(s) => s.clone(),
    };
    let response = match raw.response.as_deref() {
        None => {
            errs.push(Violation::MissingField {
                field: "response".into(),
            });
            None
        }
        Some(r) => {
            let resp = match r {
                "yes" => Some(Response::Yes),
                "no" => Some(Response::No),
                _ => None,
            };
            if resp.is_none() {
                errs.push(Violation::UnknownResponse {
                    value: r.to_owned(),
                });
            }
            resp
        }
    };
    let justification = match &raw.justification {
        None => {
            errs.push(Violation::MissingField {
                field: "justification".into(),
            });
            None
        }
        Some(map) => match validate_justification(map) {
            Ok(j) => Some(j),
            Err(e) => {
                errs.extend(e);
                None
            }
        },
    };

    match (agent, response, justification) {
        (Some(agent), Some(response), Some(justification)) if errs.is_empty() => Ok(Feedback {
            agent,
            scenario,
            response,
            justification,
        }),
        _ => Err(errs),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn raw(id: &str, press: &[&str], polarity: &[(&str, &str)]) -> RawScenario {
        RawScenario {
            id: Some(id.into()),
            setting: Some("setting".into()),
            problem: Some("problem".into()),
            action: Some("act".into()),
            press: Some(press.iter().map(|s| s.to_string()).collect()),
            polarity: Some(
                polarity
                    .iter()
                    .map(|(k, v)| (k.to_string(), v.to_string()))
                    .collect(),
            ),
        }
    }

    #[test]
    fn category_of_builtin_scenarios() {
        let post = validate_scenario(&raw("postoffice", &["P1"], &[("P1", "aligned")])).unwrap();
        let fruits = validate_scenario(&raw("fruits", &["P4"], &[("P4", "opposed")])).unwrap();
        assert_eq!(category_of(&post), Category::from_params([ParameterId::P1]));
        assert_eq!(
            category_of(&fruits),
            Category::from_params([ParameterId::P4])
        );
        let empty = validate_scenario(&raw("none", &[], &[])).unwrap();
        assert_eq!(category_of(&empty), Category::EMPTY);
        assert_eq!(category_of(&empty).to_string(), "{}");
    }

    #[test]
    fn sixteen_categories() {
        let all: std::collections::BTreeSet<_> = Category::all().collect();
        assert_eq!(all.len(), 16);
        assert_eq!(Category::all().filter(|c| c.is_empty()).count(), 1);
    }

    #[test]
    fn press_order_is_irrelevant() {
        let a = validate_scenario(&raw(
            "a",
            &["P4", "P1"],
            &[("P1", "aligned"), ("P4", "opposed")],
        ))
        .unwrap();
        let b = validate_scenario(&raw(
            "b",
            &["P1", "P4"],
            &[("P1", "opposed"), ("P4", "opposed")],
        ))
        .unwrap();
        assert_eq!(category_of(&a), category_of(&b));
        assert_eq!(serde_json::to_string(&a.press()).unwrap(), r#"["P1","P4"]"#);
    }

    #[test]
    fn polarity_press_mismatch() {
        let errs = validate_scenario(&raw("x", &["P1"], &[])).unwrap_err();
        assert!(matches!(
            errs.as_slice(),
            [Violation::PolarityPressMismatch { .. }]
        ));
    }

    #[test]
    fn empty_action_is_rejected() {
        let mut r = raw("x", &[], &[]);
        r.action = Some("  ".into());
        let errs = validate_scenario(&r).unwrap_err();
        assert_eq!(
            errs,
            vec![Violation::EmptyText {
                field: "action".into()
            }]
        );
    }

    #[test]
    fn all_violations_are_reported() {
        let r = RawScenario {
            id: Some("x".into()),
            ..Default::default()
        };
        let errs = validate_scenario(&r).unwrap_err();
        assert_eq!(errs.len(), 5);
    }

    fn raw_feedback(response: &str, j: &[(&str, i64)]) -> RawFeedback {
        RawFeedback {
            agent: Some("a".into()),
            scenario: Some("postoffice".into()),
            response: Some(response.into()),
            justification: Some(j.iter().map(|(k, v)| (k.to_string(), *v)).collect()),
        }
    }

    #[test]
    fn feedback_validation() {
        let ok = validate_feedback(&raw_feedback(
            "yes",
            &[("P1", 4), ("P2", 1), ("P3", 1), ("P4", 1)],
        ))
        .unwrap();
        assert_eq!(ok.justification.get(ParameterId::P1).get(), 4);

        let errs = validate_feedback(&raw_feedback(
            "yes",
            &[("P1", 6), ("P2", 1), ("P3", 1), ("P4", 1)],
        ))
        .unwrap_err();
        assert_eq!(
            errs,
            vec![Violation::ValueOutOfRange {
                parameter: ParameterId::P1,
                value: 6
            }]
        );

        let errs = validate_feedback(&raw_feedback(
            "maybe",
            &[("P1", 1), ("P2", 1), ("P3", 1), ("P4", 1)],
        ))
        .unwrap_err();
        assert_eq!(
            errs,
            vec![Violation::UnknownResponse {
                value: "maybe".into()
            }]
        );

        let errs =
            validate_feedback(&raw_feedback("no", &[("P1", 1), ("P2", 1), ("P3", 1)])).unwrap_err();
        assert_eq!(
            errs,
            vec![Violation::MissingParameter {
                parameter: ParameterId::P4
            }]
        );
    }

    #[test]
    fn justification_assignments() {
        let j = Justification::parse_assignments("P1=1,P2=1,P3=1,P4=4").unwrap();
        assert_eq!(j, Justification::from_array([1, 1, 1, 4]));
        assert_eq!(j.to_string(), "P1=1,P2=1,P3=1,P4=4");
        assert!(Justification::parse_assignments("P1=1,P2=x,P3=1,P4=4").is_err());
    }

    #[test]
    fn dimension_pairs() {
        for d in Dimension::ALL {
            assert_eq!(d.parameter().dimension(), d);
        }
        assert_eq!(Dimension::Legality.determinate(), "obedience");
        assert_eq!(Dimension::Goodwill.determinate(), "altruism");
    }
}
