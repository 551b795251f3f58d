//! Defects derived from the relation graph and the analyst's decisions.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};

use crate::decisions::{DecisionSet, Verdict};
use crate::model::{ModelId, ModelSet};
use crate::relations::{RelationCandidate, RelationGraph, RelationKind};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DefectType {
    Incomplete,
    Ambiguous,
    Incorrect,
    Redundant,
}

impl DefectType {
    pub fn as_str(self) -> &'static str {
        match self {
            DefectType::Incomplete => "incomplete",
            DefectType::Ambiguous => "ambiguous",
            DefectType::Incorrect => "incorrect",
            DefectType::Redundant => "redundant",
        }
    }
}

impl fmt::Display for DefectType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Confirmation {
    /// Needs no analyst input.
    Automatic,
    Pending,
    Confirmed,
    Dismissed,
}

impl Confirmation {
    pub fn as_str(self) -> &'static str {
        match self {
            Confirmation::Automatic => "automatic",
            Confirmation::Pending => "pending",
            Confirmation::Confirmed => "confirmed",
            Confirmation::Dismissed => "dismissed",
        }
    }

    /// Automatic and confirmed defects fail a check.
    pub fn is_failing(self) -> bool {
        matches!(self, Confirmation::Automatic | Confirmation::Confirmed)
    }
}

impl fmt::Display for Confirmation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Defect {
    pub defect_type: DefectType,
    pub models: Vec<ModelId>,
    /// Ids of the candidates behind the defect; empty for incomplete.
    pub relations: Vec<String>,
    /// Short name of the relation column, e.g. `sub-path`.
    pub relation_label: String,
    pub status: Confirmation,
    pub issue: String,
}

impl Defect {
    pub fn to_json(&self) -> Value {
        json!({
            "type": self.defect_type.as_str(),
            "models": self.models.iter().map(ModelId::as_str).collect::<Vec<_>>(),
            "relations": self.relations,
            "relation": self.relation_label,
            "status": self.status.as_str(),
            "issue": self.issue,
        })
    }
}

fn join_units<S>(c: &RelationCandidate<S>, parent_side: bool) -> String {
    let mut ids: Vec<&str> = c.pairs.iter().map(|(p, u)| if parent_side { p.as_str() } else { u.as_str() }).collect();
    ids.dedup();
    ids.join(", ")
}

/// Non-init models that are the child of no primary relation.
pub fn detect_incomplete<S: Scalar>(set: &ModelSet, graph: &RelationGraph<S>) -> Vec<Defect> {
    set.iter()
        .filter(|m| !m.is_init() && !graph.is_primary_child(m.id().as_str()))
        .map(|m| Defect {
            defect_type: DefectType::Incomplete,
            models: vec![m.id().clone()],
            relations: Vec::new(),
            relation_label: "none".into(),
            status: Confirmation::Automatic,
            issue: format!("no other model leads into the root of {}; a precondition unit is needed", m.id()),
        })
        .collect()
}

fn simple_status<S>(c: &RelationCandidate<S>, decisions: &DecisionSet) -> Option<Verdict> {
    decisions.get(&c.id).map(|d| d.verdict)
}

/// One defect per multi-preconditions candidate. Rejecting the candidate,
/// or leaving any of its pairs unaccepted, confirms it.
pub fn detect_ambiguous<S: Scalar>(graph: &RelationGraph<S>, decisions: &DecisionSet) -> Vec<Defect> {
    graph
        .by_kind(RelationKind::MultiPreconditions)
        .map(|c| {
            let status = match decisions.get(&c.id) {
                None => Confirmation::Pending,
                Some(d) if d.verdict == Verdict::Rejected => Confirmation::Confirmed,
                Some(d) => {
                    let all = c.pairs.iter().all(|(p, u)| d.pair_verdict(p.as_str(), u.as_str()) == Verdict::Accepted);
                    if all {
                        Confirmation::Dismissed
                    } else {
                        Confirmation::Confirmed
                    }
                }
            };
            Defect {
                defect_type: DefectType::Ambiguous,
                models: vec![c.parent_model.clone(), c.child_model.clone()],
                relations: vec![c.id.clone()],
                relation_label: RelationKind::MultiPreconditions.as_str().into(),
                status,
                issue: format!(
                    "{} can follow any of {} units of {} ({}); either weaken the precondition of {} or add a precondition unit that tells them apart",
                    c.child_model,
                    c.pairs.len(),
                    c.parent_model,
                    join_units(c, true),
                    c.child_model,
                ),
            }
        })
        .collect()
}

/// One defect per unordered model pair that shares non-root candidates but
/// has no primary relation either way.
pub fn detect_incorrect<S: Scalar>(graph: &RelationGraph<S>, decisions: &DecisionSet) -> Vec<Defect> {
    let mut groups: BTreeMap<(&str, &str), Vec<&RelationCandidate<S>>> = BTreeMap::new();
    for c in graph.iter().filter(|c| c.kind.is_non_root()) {
        let (a, b) = (c.parent_model.as_str(), c.child_model.as_str());
        let key = if a <= b { (a, b) } else { (b, a) };
        groups.entry(key).or_default().push(c);
    }
    groups
        .into_iter()
        .filter(|((a, b), _)| !graph.has_primary(a, b))
        .map(|(_, cands)| {
            let verdicts: Vec<_> = cands.iter().map(|c| simple_status(c, decisions)).collect();
            let status = if verdicts.contains(&Some(Verdict::Accepted)) {
                Confirmation::Confirmed
            } else if verdicts.iter().all(|v| *v == Some(Verdict::Rejected)) {
                Confirmation::Dismissed
            } else {
                Confirmation::Pending
            };
            let first = cands[0];
            let kinds: Vec<&str> = {
                let mut k: Vec<_> = cands.iter().map(|c| c.kind.as_str()).collect();
                k.dedup();
                k
            };
            Defect {
                defect_type: DefectType::Incorrect,
                models: vec![first.parent_model.clone(), first.child_model.clone()],
                relations: cands.iter().map(|c| c.id.clone()).collect(),
                relation_label: kinds.join(", "),
                status,
                issue: format!(
                    "{} and {} share behavior only away from their roots ({}); one of them may specify it wrongly",
                    first.parent_model,
                    first.child_model,
                    cands.iter().map(|c| format!("{}/{}", join_units(c, true), join_units(c, false))).collect::<Vec<_>>().join("; "),
                ),
            }
        })
        .collect()
}

/// One defect per sub-path candidate.
pub fn detect_redundant<S: Scalar>(graph: &RelationGraph<S>, decisions: &DecisionSet) -> Vec<Defect> {
    graph
        .by_kind(RelationKind::SubPath)
        .map(|c| Defect {
            defect_type: DefectType::Redundant,
            models: vec![c.parent_model.clone(), c.child_model.clone()],
            relations: vec![c.id.clone()],
            relation_label: RelationKind::SubPath.as_str().into(),
            status: match simple_status(c, decisions) {
                None => Confirmation::Pending,
                Some(Verdict::Accepted) => Confirmation::Confirmed,
                Some(Verdict::Rejected) => Confirmation::Dismissed,
            },
            issue: format!(
                "{} ({}) and {} ({}) describe the same sequence of {} behaviors",
                c.parent_model,
                join_units(c, true),
                c.child_model,
                join_units(c, false),
                c.pairs.len(),
            ),
        })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DefectReport {
    defects: Vec<Defect>,
}

/// All four detectors, rows ordered by defect type and then model ids.
pub fn defect_report<S: Scalar>(set: &ModelSet, graph: &RelationGraph<S>, decisions: &DecisionSet) -> DefectReport {
    let mut defects = detect_incomplete(set, graph);
    defects.extend(detect_ambiguous(graph, decisions));
    defects.extend(detect_incorrect(graph, decisions));
    defects.extend(detect_redundant(graph, decisions));
    defects.sort_by(|a, b| {
        (a.defect_type, &a.models, &a.relations).cmp(&(b.defect_type, &b.models, &b.relations))
    });
    DefectReport { defects }
}

impl DefectReport {
    pub fn defects(&self) -> &[Defect] {
        &self.defects
    }

    pub fn is_empty(&self) -> bool {
        self.defects.is_empty()
    }

    pub fn has_failing_defects(&self) -> bool {
        self.defects.iter().any(|d| d.status.is_failing())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "defects": self.defects.iter().map(Defect::to_json).collect::<Vec<_>>(),
            "schema_version": 1,
        })
    }

    /// Pretty JSON with sorted keys and a trailing newline.
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report always serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        const HEADERS: [&str; 5] = ["BM", "Integration Relation", "Defects Type", "Status", "Issue"];
        let rows: Vec<[String; 5]> = self
            .defects
            .iter()
            .map(|d| {
                [
                    d.models.iter().map(ModelId::as_str).collect::<Vec<_>>().join(", "),
                    d.relation_label.clone(),
                    d.defect_type.as_str().to_owned(),
                    d.status.as_str().to_owned(),
                    d.issue.clone(),
                ]
            })
            .collect();
        let mut widths = HEADERS.map(str::len);
        for row in &rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: [&str; 5]| {
            let mut s = String::new();
            for (i, cell) in cells.iter().enumerate() {
                if i + 1 == cells.len() {
                    s.push_str(cell);
                } else {
                    s.push_str(&format!("{cell:<w$} | ", w = widths[i]));
                }
            }
            s.trim_end().to_owned() + "\n"
        };
        let mut out = line(HEADERS);
        out.push_str(&line(widths.map(|w| "-".repeat(w)).each_ref().map(String::as_str)));
        for row in &rows {
            out.push_str(&line(row.each_ref().map(String::as_str)));
        }
        if rows.is_empty() {
            out.push_str("(no defects)\n");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bts::parse_bts;
    use crate::decisions::Decision;
    use crate::relations::relation_graph;
    use crate::{Rational, Strategy};

    fn analyse(text: &str, log: &[Decision]) -> DefectReport {
        let set = parse_bts(text).unwrap();
        let g = relation_graph(&set, &Strategy::<Rational>::default_strategy()).unwrap();
        defect_report(&set, &g, &DecisionSet::from_log(log))
    }

    const MP: &str = "bt p init\n  A [x]\n    B [y]\n    B [y]\nbt c\n  B [y]\n    C [z]\n";

    #[test]
    fn ambiguous_polarity() {
        let id = "p.w1,w2~c.w0#multi-preconditions";
        let status = |log: &[Decision]| {
            analyse(MP, log).defects().iter().find(|d| d.defect_type == DefectType::Ambiguous).unwrap().status
        };
        assert_eq!(status(&[]), Confirmation::Pending);
        assert_eq!(status(&[Decision::reject(id)]), Confirmation::Confirmed);
        assert_eq!(status(&[Decision::accept(id)]), Confirmation::Dismissed);
        assert_eq!(status(&[Decision::accept(id).with_pair("w2", "w0", Verdict::Rejected)]), Confirmation::Confirmed);
    }

    #[test]
    fn incomplete_and_init_exemption() {
        let r = analyse("bt a\n  A [x]\nbt b init\n  B [y]\n", &[]);
        assert_eq!(r.defects().len(), 1);
        assert_eq!(r.defects()[0].models, vec![ModelId::from("a")]);
        assert_eq!(r.defects()[0].status, Confirmation::Automatic);
        assert!(r.has_failing_defects());
        assert!(analyse("bt a init\n  A [x]\n", &[]).is_empty());
    }

    #[test]
    fn incorrect_polarity() {
        let text = "bt a init\n  R [0]\n    X [1]\nbt b init\n  Q [0]\n    X [1]\n";
        let id = "a.w1~b.w1#leaf-leaf";
        let status = |log: &[Decision]| analyse(text, log).defects()[0].status;
        assert_eq!(status(&[]), Confirmation::Pending);
        assert_eq!(status(&[Decision::accept(id)]), Confirmation::Confirmed);
        assert_eq!(status(&[Decision::reject(id)]), Confirmation::Dismissed);
        assert!(!analyse(text, &[]).has_failing_defects());
    }

    #[test]
    fn empty_report() {
        let r = DefectReport::default();
        assert_eq!(r.to_json().to_string(), r#"{"defects":[],"schema_version":1}"#);
        assert!(r.to_text().contains("(no defects)"));
    }

    #[test]
    fn text_table_has_columns() {
        let r = analyse("bt a\n  A [x]\n", &[]);
        let text = r.to_text();
        assert!(text.starts_with("BM | Integration Relation | Defects Type | Status    | Issue\n"));
        assert!(text.contains("a  | none"));
    }
}
