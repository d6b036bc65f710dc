//! Output records shared by the CLI and the FFI layer.

use num::BigRational;
use serde::{Deserialize, Serialize};

use crate::irs::IntervalEstimate;

/// One result line. Exact values are `"p/q"` strings, Monte Carlo values are
/// decimal strings with a nonzero `radius`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub character: String,
    pub group: String,
    pub set: Option<String>,
    pub word: Option<String>,
    pub level: Option<usize>,
    pub mode: String,
    pub value: String,
    pub radius: f64,
    pub bracket: Option<String>,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    /// Command-specific payload (witness estimates, growth tables, …).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<serde_json::Value>,
}

impl Record {
    pub fn exact(character: &str, group: &str, value: &BigRational) -> Self {
        Record {
            character: character.to_string(),
            group: group.to_string(),
            set: None,
            word: None,
            level: None,
            mode: "exact".into(),
            value: value.to_string(),
            radius: 0.0,
            bracket: None,
            seed: None,
            samples: None,
            detail: None,
        }
    }

    /// A record whose value is not a character value (a shadow, a table).
    pub fn info(character: &str, group: &str, value: impl Into<String>) -> Self {
        Record {
            mode: "exact".into(),
            value: value.into(),
            ..Record::exact(character, group, &BigRational::from_integer(0.into()))
        }
    }

    pub fn estimate(character: &str, group: &str, est: &IntervalEstimate) -> Self {
        Record {
            character: character.to_string(),
            group: group.to_string(),
            set: None,
            word: None,
            level: Some(est.level),
            mode: match est.mode() {
                crate::irs::Mode::Mc => "mc".into(),
                _ => "exact".into(),
            },
            value: est.value.to_string(),
            radius: est.radius,
            bracket: Some(est.bracket.as_str().to_string()),
            seed: est.seed,
            samples: est.samples,
            detail: None,
        }
    }

    pub fn with_set(mut self, set: impl ToString) -> Self {
        self.set = Some(set.to_string());
        self
    }

    pub fn with_word(mut self, word: impl Into<String>) -> Self {
        self.word = Some(word.into());
        self
    }

    pub fn with_level(mut self, level: usize) -> Self {
        self.level = Some(level);
        self
    }

    pub fn with_detail(mut self, detail: serde_json::Value) -> Self {
        self.detail = Some(detail);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}

pub const CSV_HEADER: [&str; 12] = [
    "character", "group", "set", "word", "level", "mode", "value", "radius", "bracket", "seed", "samples", "detail",
];

/// The CSV row for `r`, in `CSV_HEADER` order. `detail` is embedded as JSON.
pub fn csv_row(r: &Record) -> Vec<String> {
    let opt = |o: &Option<String>| o.clone().unwrap_or_default();
    let num = |o: Option<u64>| o.map(|x| x.to_string()).unwrap_or_default();
    vec![
        r.character.clone(),
        r.group.clone(),
        opt(&r.set),
        opt(&r.word),
        num(r.level.map(|l| l as u64)),
        r.mode.clone(),
        r.value.clone(),
        r.radius.to_string(),
        opt(&r.bracket),
        num(r.seed),
        num(r.samples),
        r.detail.as_ref().map(|d| d.to_string()).unwrap_or_default(),
    ]
}
