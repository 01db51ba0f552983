//! Shared fixtures, random generators and the brute-force soundness oracle.
#![allow(dead_code)]

use std::collections::BTreeMap;

use dispo_core::{
    validate_scenario, AgentId, Feedback, Justification, ParameterId, Polarity, RawScenario,
    Response, Scenario,
};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn agent(id: &str) -> AgentId {
    AgentId::new(id).unwrap()
}

pub fn scenario(id: &str, press: &[(ParameterId, Polarity)]) -> Scenario {
    let polarity: BTreeMap<String, String> = press
        .iter()
        .map(|(p, pol)| {
            let v = match pol {
                Polarity::Aligned => "aligned",
                Polarity::Opposed => "opposed",
            };
            (p.to_string(), v.to_owned())
        })
        .collect();
    validate_scenario(&RawScenario {
        id: Some(id.into()),
        setting: Some(format!("setting of {id}")),
        problem: Some(format!("problem of {id}")),
        action: Some(format!("action of {id}")),
        press: Some(press.iter().map(|(p, _)| p.to_string()).collect()),
        polarity: Some(polarity),
    })
    .unwrap()
}

pub fn feedback(agent_id: &str, scenario: &str, r: Response, j: [u8; 4]) -> Feedback {
    Feedback::new(agent(agent_id), scenario, r, Justification::from_array(j))
}

// ---------------------------------------------------------------------------
// Brute-force oracle. Written from the rules as stated, case by case, with
// no reference to the library's band or verdict types.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleVerdict {
    Sound,
    Unsound,
    Indeterminate,
}

/// Default bounds: 1–2 low, 3 neutral, 4–5 high.
pub fn oracle_parameter(value: u8, yes: bool, aligned: bool) -> OracleVerdict {
    let is_low = value <= 2;
    let is_high = value >= 4;
    // taking an aligned action, or refusing an opposed one, calls for a high value
    let wants_high = yes == aligned;
    match (wants_high, is_low, is_high) {
        (true, _, true) => OracleVerdict::Sound,
        (false, true, _) => OracleVerdict::Sound,
        (_, false, false) => OracleVerdict::Indeterminate,
        _ => OracleVerdict::Unsound,
    }
}

pub fn oracle_fold(cases: &[OracleVerdict]) -> OracleVerdict {
    let mut out = OracleVerdict::Sound;
    for c in cases {
        match c {
            OracleVerdict::Unsound => return OracleVerdict::Unsound,
            OracleVerdict::Indeterminate => out = OracleVerdict::Indeterminate,
            OracleVerdict::Sound => {}
        }
    }
    out
}

/// All subsets of the four parameters of a given size.
pub fn subsets_of_size(k: usize) -> Vec<Vec<ParameterId>> {
    (0u8..16)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| {
            ParameterId::ALL
                .into_iter()
                .filter(|p| m & (1 << p.index()) != 0)
                .collect()
        })
        .collect()
}

/// Every value assignment in 1..=5 for `k` slots.
pub fn value_tuples(k: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| (1..=5u8).map(move |v| [t.clone(), vec![v]].concat()))
            .collect();
    }
    out
}

pub fn polarity_tuples(k: usize) -> Vec<Vec<Polarity>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                [Polarity::Aligned, Polarity::Opposed].map(|p| [t.clone(), vec![p]].concat())
            })
            .collect();
    }
    out
}

// ---------------------------------------------------------------------------
// Random instances.
// ---------------------------------------------------------------------------

const WORDS: &[&str] = &[
    "gate",
    "clerk",
    "fruit",
    "queue",
    "parc",
    "frühstück",
    "naïve",
    "line",
    "🍎",
    "\"quoted\"",
    "tab\there",
];

pub fn random_text<R: Rng>(rng: &mut R) -> String {
    let n = rng.gen_range(1..6);
    (0..n)
        .map(|_| *WORDS.choose(rng).unwrap())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn random_press<R: Rng>(rng: &mut R, non_empty: bool) -> Vec<(ParameterId, Polarity)> {
    loop {
        let mut press = Vec::new();
        for p in ParameterId::ALL {
            if rng.gen_bool(0.5) {
                press.push((
                    p,
                    if rng.gen_bool(0.5) {
                        Polarity::Aligned
                    } else {
                        Polarity::Opposed
                    },
                ));
            }
        }
        if !non_empty || !press.is_empty() {
            return press;
        }
    }
}

pub fn random_scenario<R: Rng>(rng: &mut R, id: &str, non_empty: bool) -> Scenario {
    let press = random_press(rng, non_empty);
    let raw = RawScenario {
        id: Some(id.into()),
        setting: Some(random_text(rng)),
        problem: Some(random_text(rng)),
        action: Some(random_text(rng)),
        press: Some(press.iter().map(|(p, _)| p.to_string()).collect()),
        polarity: Some(
            press
                .iter()
                .map(|(p, pol)| {
                    (
                        p.to_string(),
                        if *pol == Polarity::Aligned {
                            "aligned"
                        } else {
                            "opposed"
                        }
                        .to_owned(),
                    )
                })
                .collect(),
        ),
    };
    validate_scenario(&raw).unwrap()
}

pub fn random_justification<R: Rng>(rng: &mut R) -> [u8; 4] {
    [0; 4].map(|_| rng.gen_range(1..=5))
}

pub fn random_response<R: Rng>(rng: &mut R) -> Response {
    if rng.gen_bool(0.5) {
        Response::Yes
    } else {
        Response::No
    }
}

/// A justification that is sound for `response` on every pressed parameter
/// of `s` (non-pressed values random).
pub fn sound_justification<R: Rng>(rng: &mut R, s: &Scenario, response: Response) -> [u8; 4] {
    let mut j = random_justification(rng);
    for (&p, &pol) in s.polarities() {
        let wants_high = (response == Response::Yes) == (pol == Polarity::Aligned);
        j[p.index()] = if wants_high {
            rng.gen_range(4..=5)
        } else {
            rng.gen_range(1..=2)
        };
    }
    j
}
