//! Analyst verdicts on relation candidates.

use std::collections::BTreeMap;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::model::UnitId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accepted,
    Rejected,
}

/// Verdict on a single (parent unit, child unit) pair of a candidate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairVerdict {
    pub parent: UnitId,
    pub child: UnitId,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Decision {
    pub relation_id: String,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pair_verdicts: Vec<PairVerdict>,
    #[serde(default)]
    pub note: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<DateTime<Utc>>,
}

impl Decision {
    pub fn new(relation_id: impl Into<String>, verdict: Verdict) -> Self {
        Self { relation_id: relation_id.into(), verdict, pair_verdicts: Vec::new(), note: String::new(), timestamp: None }
    }

    pub fn accept(relation_id: impl Into<String>) -> Self {
        Self::new(relation_id, Verdict::Accepted)
    }

    pub fn reject(relation_id: impl Into<String>) -> Self {
        Self::new(relation_id, Verdict::Rejected)
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn with_pair(mut self, parent: &str, child: &str, verdict: Verdict) -> Self {
        self.pair_verdicts.push(PairVerdict { parent: parent.into(), child: child.into(), verdict });
        self
    }

    /// Same verdicts and note; timestamps are ignored.
    pub fn same_as(&self, other: &Decision) -> bool {
        self.relation_id == other.relation_id
            && self.verdict == other.verdict
            && self.pair_verdicts == other.pair_verdicts
            && self.note == other.note
    }

    /// Verdict on one pair: its own override, else the candidate verdict.
    pub fn pair_verdict(&self, parent: &str, child: &str) -> Verdict {
        self.pair_verdicts
            .iter()
            .rev()
            .find(|pv| pv.parent.as_str() == parent && pv.child.as_str() == child)
            .map_or(self.verdict, |pv| pv.verdict)
    }
}

/// Effective decisions: the latest per relation id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DecisionSet {
    latest: BTreeMap<String, Decision>,
}

impl DecisionSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_log<'a>(log: impl IntoIterator<Item = &'a Decision>) -> Self {
        let mut set = Self::new();
        for d in log {
            set.insert(d.clone());
        }
        set
    }

    pub fn insert(&mut self, decision: Decision) {
        self.latest.insert(decision.relation_id.clone(), decision);
    }

    pub fn get(&self, relation_id: &str) -> Option<&Decision> {
        self.latest.get(relation_id)
    }

    pub fn len(&self) -> usize {
        self.latest.len()
    }

    pub fn is_empty(&self) -> bool {
        self.latest.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Decision> {
        self.latest.values()
    }
}

/// Parses a JSON array of decisions.
pub fn parse_decision_log(text: &str) -> Result<Vec<Decision>, serde_json::Error> {
    serde_json::from_str(text)
}

pub fn emit_decision_log(log: &[Decision]) -> String {
    let mut out = serde_json::to_string_pretty(log).expect("decisions always serialize");
    out.push('\n');
    out
}
