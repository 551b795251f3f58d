//! JSON interchange for model sets.
//!
//! ```json
//! {"models":[{"id":"b1","init":false,
//!   "units":[{"id":"w0","attrs":{"cname":"DOOR","tlink":["R1"]},"span":{...}}],
//!   "edges":[{"parent":"w0","child":"w1","etype":"sequential"}]}]}
//! ```
//!
//! Scalar attribute values are strings, set values arrays of strings. Edge
//! attributes other than `etype` go in an optional `attrs` object.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    build_model, AttributeValue, BehavioralModel, BehavioralUnit, Edge, EdgeKind, ModelError,
    ModelSet, SourceSpan, Triple,
};

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("malformed model JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("model `{model}`: {source}")]
    Model { model: String, source: ModelError },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonModelSet {
    models: Vec<JsonModel>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonModel {
    id: String,
    init: bool,
    units: Vec<JsonUnit>,
    edges: Vec<JsonEdge>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonUnit {
    id: String,
    attrs: BTreeMap<String, JsonValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    span: Option<SourceSpan>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonEdge {
    parent: String,
    child: String,
    etype: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    attrs: BTreeMap<String, JsonValue>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum JsonValue {
    Scalar(String),
    Set(Vec<String>),
}

impl From<&AttributeValue> for JsonValue {
    fn from(v: &AttributeValue) -> Self {
        match v {
            AttributeValue::Scalar(s) => JsonValue::Scalar(s.clone()),
            AttributeValue::Set(set) => JsonValue::Set(set.iter().cloned().collect()),
        }
    }
}

impl JsonValue {
    fn into_value(self) -> Result<AttributeValue, ModelError> {
        match self {
            JsonValue::Scalar(s) => Ok(AttributeValue::Scalar(s)),
            JsonValue::Set(tokens) => AttributeValue::set(tokens),
        }
    }
}

fn attrs_json<'a>(it: impl Iterator<Item = (&'a str, &'a AttributeValue)>) -> BTreeMap<String, JsonValue> {
    it.map(|(k, v)| (k.to_owned(), JsonValue::from(v))).collect()
}

fn model_json(m: &BehavioralModel) -> JsonModel {
    JsonModel {
        id: m.id().to_string(),
        init: m.is_init(),
        units: m
            .units()
            .iter()
            .map(|u| JsonUnit {
                id: u.id().to_string(),
                attrs: attrs_json(u.attributes()),
                span: u.span().cloned(),
            })
            .collect(),
        edges: m
            .triples()
            .iter()
            .map(|t| JsonEdge {
                parent: t.parent.to_string(),
                child: t.child.to_string(),
                etype: t.edge.kind.as_str().to_owned(),
                attrs: attrs_json(t.edge.extra.iter().map(|(k, v)| (k.as_str(), v))),
            })
            .collect(),
    }
}

/// Pretty-printed JSON with sorted keys.
pub fn emit_json(set: &ModelSet) -> String {
    let doc = JsonModelSet { models: set.iter().map(model_json).collect() };
    // Going through `Value` sorts object keys.
    let value = serde_json::to_value(doc).expect("model JSON is always serializable");
    let mut out = serde_json::to_string_pretty(&value).expect("value is always serializable");
    out.push('\n');
    out
}

pub fn parse_json(text: &str) -> Result<ModelSet, SchemaError> {
    let doc: JsonModelSet = serde_json::from_str(text)?;
    let mut set = ModelSet::default();
    for jm in doc.models {
        let model_err = |source| SchemaError::Model { model: jm.id.clone(), source };
        let mut units = Vec::with_capacity(jm.units.len());
        for ju in jm.units {
            let mut unit = BehavioralUnit::new(ju.id.as_str());
            for (name, value) in ju.attrs {
                let value = value.into_value().map_err(model_err)?;
                unit.set(&name, value).map_err(model_err)?;
            }
            if let Some(span) = ju.span {
                unit = unit.with_span(span);
            }
            units.push(unit);
        }
        let mut triples = Vec::with_capacity(jm.edges.len());
        for je in jm.edges {
            let kind: EdgeKind = je.etype.parse().map_err(model_err)?;
            let mut edge = Edge::new(kind);
            for (name, value) in je.attrs {
                if name.trim().is_empty() {
                    return Err(model_err(ModelError::EmptyAttributeName));
                }
                edge.extra.insert(name, value.into_value().map_err(model_err)?);
            }
            triples.push(Triple::new(je.parent.as_str(), edge, je.child.as_str()));
        }
        let model = build_model(jm.id.as_str(), jm.init, units, triples).map_err(model_err)?;
        set.push(model).map_err(model_err)?;
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bts::parse_bts;

    #[test]
    fn empty_set() {
        assert_eq!(emit_json(&ModelSet::default()).trim(), "{\n  \"models\": []\n}");
        let compact: serde_json::Value = serde_json::from_str(&emit_json(&ModelSet::default())).unwrap();
        assert_eq!(compact.to_string(), r#"{"models":[]}"#);
    }

    #[test]
    fn single_unit_round_trip() {
        let set = parse_bts("bt b0 init\n  OVEN [Idle]\n").unwrap();
        let back = parse_json(&emit_json(&set)).unwrap();
        assert_eq!(back, set);
        assert_eq!(back.models()[0].root().span(), set.models()[0].root().span());
    }

    #[test]
    fn edge_extras_survive() {
        let text = r#"{"models":[{"id":"b","init":false,
            "units":[{"id":"a","attrs":{"cname":"X"}},{"id":"c","attrs":{}}],
            "edges":[{"parent":"a","child":"c","etype":"atomic","attrs":{"time":"5s"}}]}]}"#;
        let set = parse_json(text).unwrap();
        let edge = &set.models()[0].triples()[0].edge;
        assert_eq!(edge.kind, EdgeKind::Atomic);
        assert_eq!(edge.extra.get("time"), Some(&AttributeValue::scalar("5s")));
        assert_eq!(parse_json(&emit_json(&set)).unwrap(), set);
    }

    #[test]
    fn schema_errors() {
        assert!(matches!(parse_json("{}"), Err(SchemaError::Json(_))));
        assert!(matches!(parse_json(r#"{"models":[],"extra":1}"#), Err(SchemaError::Json(_))));
        let bad_etype = r#"{"models":[{"id":"b","init":false,"units":[{"id":"a","attrs":{}},{"id":"c","attrs":{}}],
            "edges":[{"parent":"a","child":"c","etype":"sideways"}]}]}"#;
        assert!(matches!(parse_json(bad_etype), Err(SchemaError::Model { .. })));
        let dup = r#"{"models":[{"id":"b","init":false,"units":[{"id":"a","attrs":{"tlink":["R1","R1"]}}],"edges":[]}]}"#;
        assert!(matches!(
            parse_json(dup),
            Err(SchemaError::Model { source: ModelError::DuplicateSetToken(_), .. })
        ));
    }
}
