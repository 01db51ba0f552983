//! The soundness oracle: does a justification agree with the action taken?
//!
//! Each pressed parameter's value is classified into a [`ValueBand`]. The
//! response together with the scenario's polarity on that parameter fixes the
//! band a consistent justification must fall in. Per-parameter verdicts are
//! then folded with the configured [`Combinator`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Justification, ParameterId, Polarity, Response, ScaleValue, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueBand {
    Low,
    Neutral,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Sound,
    Unsound,
    Indeterminate,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Sound => "sound",
            Self::Unsound => "unsound",
            Self::Indeterminate => "indeterminate",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What a neutral value on a pressed parameter yields.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeutralPolicy {
    #[default]
    Indeterminate,
    TreatAsUnsound,
}

/// How per-parameter verdicts combine when a scenario presses several
/// parameters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Combinator {
    #[default]
    All,
    Any,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SoundnessConfigRepr", into = "SoundnessConfigRepr")]
pub struct SoundnessConfig {
    low_max: ScaleValue,
    high_min: ScaleValue,
    neutral_policy: NeutralPolicy,
    combinator: Combinator,
}

impl Default for SoundnessConfig {
    fn default() -> Self {
        Self {
            low_max: ScaleValue::new(2).unwrap(),
            high_min: ScaleValue::new(4).unwrap(),
            neutral_policy: NeutralPolicy::Indeterminate,
            combinator: Combinator::All,
        }
    }
}

impl SoundnessConfig {
    pub fn new(
        low_max: ScaleValue,
        high_min: ScaleValue,
        neutral_policy: NeutralPolicy,
        combinator: Combinator,
    ) -> Result<Self> {
        if low_max >= high_min {
            return Err(Error::Config(format!(
                "soundness low_max ({low_max}) must be below high_min ({high_min})"
            )));
        }
        Ok(Self {
            low_max,
            high_min,
            neutral_policy,
            combinator,
        })
    }

    pub fn low_max(&self) -> ScaleValue {
        self.low_max
    }

    pub fn high_min(&self) -> ScaleValue {
        self.high_min
    }

    pub fn neutral_policy(&self) -> NeutralPolicy {
        self.neutral_policy
    }

    pub fn combinator(&self) -> Combinator {
        self.combinator
    }

    pub fn with_neutral_policy(mut self, policy: NeutralPolicy) -> Self {
        self.neutral_policy = policy;
        self
    }

    pub fn with_combinator(mut self, combinator: Combinator) -> Self {
        self.combinator = combinator;
        self
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SoundnessConfigRepr {
    #[serde(default = "default_low")]
    low_max: ScaleValue,
    #[serde(default = "default_high")]
    high_min: ScaleValue,
    #[serde(default)]
    neutral_policy: NeutralPolicy,
    #[serde(default)]
    combinator: Combinator,
}

fn default_low() -> ScaleValue {
    SoundnessConfig::default().low_max
}

fn default_high() -> ScaleValue {
    SoundnessConfig::default().high_min
}

impl TryFrom<SoundnessConfigRepr> for SoundnessConfig {
    type Error = Error;

    fn try_from(r: SoundnessConfigRepr) -> Result<Self> {
        SoundnessConfig::new(r.low_max, r.high_min, r.neutral_policy, r.combinator)
    }
}

impl From<SoundnessConfig> for SoundnessConfigRepr {
    fn from(c: SoundnessConfig) -> Self {
        Self {
            low_max: c.low_max,
            high_min: c.high_min,
            neutral_policy: c.neutral_policy,
            combinator: c.combinator,
        }
    }
}

pub fn band_of(v: ScaleValue, cfg: &SoundnessConfig) -> ValueBand {
    if v <= cfg.low_max {
        ValueBand::Low
    } else if v >= cfg.high_min {
        ValueBand::High
    } else {
        ValueBand::Neutral
    }
}

/// The band a consistent justification must fall in. Never `Neutral`.
pub fn expected_band(response: Response, polarity: Polarity) -> ValueBand {
    match (response, polarity) {
        (Response::Yes, Polarity::Aligned) | (Response::No, Polarity::Opposed) => ValueBand::High,
        (Response::Yes, Polarity::Opposed) | (Response::No, Polarity::Aligned) => ValueBand::Low,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParameterVerdict {
    pub value: ScaleValue,
    pub observed: ValueBand,
    pub expected: ValueBand,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SoundnessVerdict {
    pub overall: Verdict,
    pub combinator: Combinator,
    pub per_parameter: BTreeMap<ParameterId, ParameterVerdict>,
}

impl SoundnessVerdict {
    pub fn is_sound(&self) -> bool {
        self.overall == Verdict::Sound
    }
}

pub fn parameter_verdict(
    value: ScaleValue,
    response: Response,
    polarity: Polarity,
    cfg: &SoundnessConfig,
) -> ParameterVerdict {
    let observed = band_of(value, cfg);
    let expected = expected_band(response, polarity);
    let verdict = if observed == expected {
        Verdict::Sound
    } else if observed == ValueBand::Neutral && cfg.neutral_policy == NeutralPolicy::Indeterminate {
        Verdict::Indeterminate
    } else {
        Verdict::Unsound
    };
    ParameterVerdict {
        value,
        observed,
        expected,
        verdict,
    }
}

/// Folds per-parameter verdicts. An empty input is `Sound` under both
/// combinators.
pub fn combine<I: IntoIterator<Item = Verdict>>(verdicts: I, combinator: Combinator) -> Verdict {
    let (mut sound, mut unsound, mut indeterminate, mut n) = (false, false, false, 0usize);
    for v in verdicts {
        n += 1;
        match v {
            Verdict::Sound => sound = true,
            Verdict::Unsound => unsound = true,
            Verdict::Indeterminate => indeterminate = true,
        }
    }
    if n == 0 {
        return Verdict::Sound;
    }
    match combinator {
        Combinator::All if unsound => Verdict::Unsound,
        Combinator::All if indeterminate => Verdict::Indeterminate,
        Combinator::All => Verdict::Sound,
        Combinator::Any if sound => Verdict::Sound,
        Combinator::Any if indeterminate => Verdict::Indeterminate,
        Combinator::Any => Verdict::Unsound,
    }
}

/// Judges whether `justification` is consistent with `response` in `s`.
pub fn sound(
    s: &Scenario,
    response: Response,
    justification: &Justification,
    cfg: &SoundnessConfig,
) -> SoundnessVerdict {
    let per_parameter: BTreeMap<_, _> = s
        .polarities()
        .iter()
        .map(|(&p, &pol)| {
            (
                p,
                parameter_verdict(justification.get(p), response, pol, cfg),
            )
        })
        .collect();
    SoundnessVerdict {
        overall: combine(per_parameter.values().map(|v| v.verdict), cfg.combinator),
        combinator: cfg.combinator,
        per_parameter,
    }
}
