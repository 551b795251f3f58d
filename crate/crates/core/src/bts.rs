//! The `.bts` behavior tree text format.
//!
//! ```text
//! bt b1
//!   DOOR [Closed] @R1
//!     seq BUTTON ???Pushed??? @R1
//!       par LIGHT [On] @R4 rel="where(in) OVEN"
//! ```
//!
//! A model starts with `bt <id> [init]` in column 1. Unit lines are indented
//! by exactly two spaces per depth, the root at depth one. Child lines may
//! start with an edge keyword (`seq`, `par`, `atom`, `alt`; default `seq`).
//! The behavior delimiters encode the behavior type, and trailing
//! annotations carry traceability links (`@R1,R4`), status (`!implied`),
//! operator (`op=reversion:L1`), label (`label=L1`) and related components
//! (`rel="where(in) OVEN;what(on) TABLE"`). Blank lines and lines starting
//! with `#` are ignored.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::model::{
    build_model, AttributeValue, BehavioralModel, BehavioralUnit, Edge, EdgeKind, ModelError,
    ModelId, ModelSet, SourceSpan, Triple, UnitId, BNAME, BTYPE, CNAME, LABEL, OP, OP_TARGET, REL,
    STATUS, TLINK,
};

pub const STATUSES: [&str; 6] = ["original", "implied", "missing", "design", "updated", "deleted"];
pub const OPERATORS: [&str; 8] = [
    "synchronise",
    "reversion",
    "reference",
    "kill",
    "may",
    "conjunction",
    "disjunction",
    "xor",
];
pub const DEFAULT_STATUS: &str = "original";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BehaviorType {
    StateRealisation,
    Selection,
    Event,
    Guard,
    InternalInput,
    InternalOutput,
    ExternalInput,
    ExternalOutput,
}

impl BehaviorType {
    pub const ALL: [BehaviorType; 8] = [
        BehaviorType::StateRealisation,
        BehaviorType::Selection,
        BehaviorType::Event,
        BehaviorType::Guard,
        BehaviorType::InternalInput,
        BehaviorType::InternalOutput,
        BehaviorType::ExternalInput,
        BehaviorType::ExternalOutput,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BehaviorType::StateRealisation => "state-realisation",
            BehaviorType::Selection => "selection",
            BehaviorType::Event => "event",
            BehaviorType::Guard => "guard",
            BehaviorType::InternalInput => "internal-input",
            BehaviorType::InternalOutput => "internal-output",
            BehaviorType::ExternalInput => "external-input",
            BehaviorType::ExternalOutput => "external-output",
        }
    }

    /// Opening and closing delimiters in the text format.
    pub fn delimiters(self) -> (&'static str, &'static str) {
        match self {
            BehaviorType::StateRealisation => ("[", "]"),
            BehaviorType::Selection => ("?", "?"),
            BehaviorType::Event => ("??", "??"),
            BehaviorType::Guard => ("???", "???"),
            BehaviorType::InternalInput => (">", "<"),
            BehaviorType::InternalOutput => ("<", ">"),
            BehaviorType::ExternalInput => (">>", "<<"),
            BehaviorType::ExternalOutput => ("<<", ">>"),
        }
    }
}

impl FromStr for BehaviorType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BehaviorType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown behavior type `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    Indent,
    UnknownBehaviorType,
    UnknownEdgeKind,
    DuplicateModelId,
    Model(ModelError),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax => f.write_str("syntax error"),
            ParseErrorKind::Indent => f.write_str("indentation error"),
            ParseErrorKind::UnknownBehaviorType => f.write_str("unknown behavior type"),
            ParseErrorKind::UnknownEdgeKind => f.write_str("unknown edge kind"),
            ParseErrorKind::DuplicateModelId => f.write_str("duplicate model id"),
            ParseErrorKind::Model(e) => write!(f, "invalid model ({e})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {kind}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub span: SourceSpan,
    pub message: String,
}

/// Parses `.bts` text; diagnostics name the file as `<input>`.
pub fn parse_bts(text: &str) -> Result<ModelSet, ParseError> {
    parse_bts_named("<input>", text)
}

/// Parses `.bts` text, attributing spans to `file`.
pub fn parse_bts_named(file: &str, text: &str) -> Result<ModelSet, ParseError> {
    let mut set = ModelSet::default();
    let mut current: Option<ModelBuilder> = None;

    for (i, raw) in text.split('\n').enumerate() {
        let line_no = (i + 1) as u32;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let span_at = |col: usize| SourceSpan { file: file.to_owned(), line: line_no, column: col as u32 + 1 };

        if let Some(col) = line.chars().position(|c| c == '\t') {
            return Err(err(ParseErrorKind::Syntax, span_at(col), "tab characters are not allowed"));
        }
        let content = line.trim_start_matches(' ');
        if content.trim().is_empty() || content.starts_with('#') {
            continue;
        }
        let indent = line.len() - content.len();

        if indent == 0 {
            if let Some(b) = current.take() {
                finish_model(b, &mut set)?;
            }
            current = Some(parse_header(content, span_at(0), &set)?);
            continue;
        }

        let Some(builder) = current.as_mut() else {
            return Err(err(ParseErrorKind::Syntax, span_at(indent), "unit line outside of a `bt` model"));
        };
        if indent % 2 != 0 {
            return Err(err(ParseErrorKind::Indent, span_at(0), "indentation must be a multiple of two spaces"));
        }
        let depth = indent / 2;
        if depth == 1 && !builder.units.is_empty() {
            return Err(err(ParseErrorKind::Syntax, span_at(indent), "model already has a root unit"));
        }
        if depth - 1 > builder.stack.len() {
            return Err(err(ParseErrorKind::Indent, span_at(0), "indentation deeper than one level below its parent"));
        }
        builder.stack.truncate(depth - 1);

        let chars: Vec<char> = line.chars().collect();
        let mut lp = LineParser { chars, pos: indent, span: &span_at };
        let (edge_kw, mut unit) = lp.parse_unit()?;
        let parent = builder.stack.last().copied();
        let idx = builder.units.len();
        unit.set_id(UnitId::new(format!("w{idx}")));
        let unit = unit.with_span(span_at(indent));

        match parent {
            None => {
                if edge_kw.is_some() {
                    return Err(err(ParseErrorKind::Syntax, span_at(indent), "the root unit has no incoming edge keyword"));
                }
            }
            Some(p) => {
                let kind = edge_kw.unwrap_or(EdgeKind::Sequential);
                builder.triples.push(Triple::new(
                    builder.units[p].id().clone(),
                    Edge::new(kind),
                    unit.id().clone(),
                ));
                builder.child_kinds.push((p, kind, span_at(indent)));
            }
        }
        builder.units.push(unit);
        builder.stack.push(idx);
    }

    if let Some(b) = current.take() {
        finish_model(b, &mut set)?;
    }
    Ok(set)
}

fn err(kind: ParseErrorKind, span: SourceSpan, message: impl Into<String>) -> ParseError {
    ParseError { kind, span, message: message.into() }
}

struct ModelBuilder {
    id: ModelId,
    init: bool,
    span: SourceSpan,
    units: Vec<BehavioralUnit>,
    triples: Vec<Triple>,
    stack: Vec<usize>,
    child_kinds: Vec<(usize, EdgeKind, SourceSpan)>,
}

fn parse_header(content: &str, span: SourceSpan, set: &ModelSet) -> Result<ModelBuilder, ParseError> {
    let words: Vec<&str> = content.split_whitespace().collect();
    let (id, init) = match words.as_slice() {
        ["bt", id] => (*id, false),
        ["bt", id, "init"] => (*id, true),
        _ => return Err(err(ParseErrorKind::Syntax, span, "expected `bt <id> [init]`")),
    };
    if !is_identifier(id) {
        return Err(err(ParseErrorKind::Syntax, span, format!("invalid model id `{id}`")));
    }
    if set.get(id).is_some() {
        return Err(err(ParseErrorKind::DuplicateModelId, span, format!("model `{id}` is defined twice")));
    }
    Ok(ModelBuilder {
        id: ModelId::from(id),
        init,
        span,
        units: Vec::new(),
        triples: Vec::new(),
        stack: Vec::new(),
        child_kinds: Vec::new(),
    })
}

fn finish_model(b: ModelBuilder, set: &mut ModelSet) -> Result<(), ParseError> {
    if b.units.is_empty() {
        return Err(err(ParseErrorKind::Syntax, b.span, format!("model `{}` has no units", b.id)));
    }
    // Alternative flow is all-or-nothing among siblings.
    for &(parent, _, _) in &b.child_kinds {
        let siblings: Vec<_> = b.child_kinds.iter().filter(|(p, _, _)| *p == parent).collect();
        let any_alt = siblings.iter().any(|(_, k, _)| *k == EdgeKind::Alternative);
        if let Some((_, _, span)) = siblings.iter().find(|(_, k, _)| any_alt && *k != EdgeKind::Alternative) {
            return Err(err(
                ParseErrorKind::Syntax,
                span.clone(),
                "when one child edge is `alt`, every sibling edge must be `alt`",
            ));
        }
    }
    let span = b.span.clone();
    let model = build_model(b.id, b.init, b.units, b.triples)
        .map_err(|e| err(ParseErrorKind::Model(e.clone()), span.clone(), e.to_string()))?;
    set.push(model)
        .map_err(|e| err(ParseErrorKind::DuplicateModelId, span, e.to_string()))
}

fn is_identifier(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '-')
}

fn is_name_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '[' | ']' | '?' | '<' | '>' | '@' | '!' | '=' | '"' | ',' | ';' | '#')
}

fn is_delimiter_start(c: char) -> bool {
    matches!(c, '[' | '?' | '<' | '>')
}

struct LineParser<'a, F: Fn(usize) -> SourceSpan> {
    chars: Vec<char>,
    pos: usize,
    span: &'a F,
}

impl<F: Fn(usize) -> SourceSpan> LineParser<'_, F> {
    fn error(&self, kind: ParseErrorKind, at: usize, message: impl Into<String>) -> ParseError {
        err(kind, (self.span)(at), message)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn read_word(&mut self) -> (usize, String) {
        let start = self.pos;
        while self.peek().is_some_and(|c| !c.is_whitespace()) {
            self.pos += 1;
        }
        (start, self.chars[start..self.pos].iter().collect())
    }

    fn starts_with(&self, at: usize, s: &str) -> bool {
        let needle: Vec<char> = s.chars().collect();
        self.chars.len() >= at + needle.len() && self.chars[at..at + needle.len()] == needle[..]
    }

    fn parse_unit(&mut self) -> Result<(Option<EdgeKind>, BehavioralUnit), ParseError> {
        let (first_at, first) = self.read_word();
        self.skip_ws();

        let (edge, cname_at, cname) = if self.peek().is_some_and(is_delimiter_start) {
            (None, first_at, first)
        } else if let Some(kind) = EdgeKind::from_keyword(&first) {
            let (at, word) = self.read_word();
            self.skip_ws();
            (Some(kind), at, word)
        } else {
            // `xyz DOOR [Closed]` is a bad edge keyword; `DOOR {Closed}` a bad
            // behavior delimiter.
            let save = self.pos;
            let (_, _second) = self.read_word();
            self.skip_ws();
            if self.peek().is_some_and(is_delimiter_start) {
                return Err(self.error(
                    ParseErrorKind::UnknownEdgeKind,
                    first_at,
                    format!("`{first}` is not an edge keyword (seq, par, atom, alt)"),
                ));
            }
            self.pos = save;
            if self.at_end() {
                return Err(self.error(ParseErrorKind::Syntax, save, "missing behavior after component name"));
            }
            return Err(self.error(
                ParseErrorKind::UnknownBehaviorType,
                save,
                "behavior must be delimited by [], ?, ??, ???, ><, <>, >><< or <<>>",
            ));
        };

        if cname.is_empty() {
            return Err(self.error(ParseErrorKind::Syntax, cname_at, "missing component name"));
        }
        if !cname.chars().all(is_name_char) {
            return Err(self.error(ParseErrorKind::Syntax, cname_at, format!("invalid component name `{cname}`")));
        }
        if self.at_end() {
            return Err(self.error(ParseErrorKind::Syntax, self.pos, "missing behavior after component name"));
        }

        let (btype, bname) = self.parse_behavior()?;
        let mut unit = BehavioralUnit::new("")
            .with_behavior(&cname, &bname, btype.as_str());
        set_attr(&mut unit, STATUS, AttributeValue::scalar(DEFAULT_STATUS));
        self.parse_annotations(&mut unit)?;
        Ok((edge, unit))
    }

    fn parse_behavior(&mut self) -> Result<(BehaviorType, String), ParseError> {
        let start = self.pos;
        let lead = self.chars[start];
        let run = self.chars[start..].iter().take_while(|&&c| c == lead).count();
        let btype = match (lead, run) {
            ('[', _) => BehaviorType::StateRealisation,
            ('?', 1) => BehaviorType::Selection,
            ('?', 2) => BehaviorType::Event,
            ('?', 3) => BehaviorType::Guard,
            ('>', 1) => BehaviorType::InternalInput,
            ('>', 2) => BehaviorType::ExternalInput,
            ('<', 1) => BehaviorType::InternalOutput,
            ('<', 2) => BehaviorType::ExternalOutput,
            _ => {
                return Err(self.error(
                    ParseErrorKind::UnknownBehaviorType,
                    start,
                    "behavior must be delimited by [], ?, ??, ???, ><, <>, >><< or <<>>",
                ))
            }
        };
        let (open, close) = btype.delimiters();
        let body_start = start + open.chars().count();
        let close_len = close.chars().count();

        let mut at = body_start;
        let close_at = loop {
            if at + close_len > self.chars.len() {
                return Err(self.error(
                    ParseErrorKind::Syntax,
                    start,
                    format!("unterminated behavior, expected closing `{close}`"),
                ));
            }
            let after = at + close_len;
            if at > body_start
                && self.starts_with(at, close)
                && self.chars.get(after).is_none_or(|c| c.is_whitespace())
            {
                break at;
            }
            at += 1;
        };
        let name: String = self.chars[body_start..close_at].iter().collect();
        let name = name.trim();
        if name.is_empty() {
            return Err(self.error(ParseErrorKind::Syntax, start, "empty behavior name"));
        }
        self.pos = close_at + close_len;
        Ok((btype, name.to_owned()))
    }

    fn parse_annotations(&mut self, unit: &mut BehavioralUnit) -> Result<(), ParseError> {
        let mut seen: BTreeSet<&'static str> = BTreeSet::new();
        loop {
            self.skip_ws();
            if self.at_end() {
                return Ok(());
            }
            let at = self.pos;
            let mut once = |key: &'static str, this: &Self| {
                if seen.insert(key) {
                    Ok(())
                } else {
                    Err(this.error(ParseErrorKind::Syntax, at, format!("duplicate `{key}` annotation")))
                }
            };
            if self.peek() == Some('@') {
                once("@", self)?;
                self.pos += 1;
                let (_, word) = self.read_word();
                let mut tokens = BTreeSet::new();
                for token in word.split(',') {
                    if !is_identifier_token(token) {
                        return Err(self.error(ParseErrorKind::Syntax, at, format!("invalid traceability link `{token}`")));
                    }
                    if !tokens.insert(token.to_owned()) {
                        return Err(self.error(ParseErrorKind::Syntax, at, format!("duplicate traceability link `{token}`")));
                    }
                }
                set_attr(unit, TLINK, AttributeValue::Set(tokens));
            } else if self.peek() == Some('!') {
                once("!", self)?;
                self.pos += 1;
                let (_, word) = self.read_word();
                if !STATUSES.contains(&word.as_str()) {
                    return Err(self.error(
                        ParseErrorKind::Syntax,
                        at,
                        format!("unknown status `{word}` (expected one of {})", STATUSES.join(", ")),
                    ));
                }
                set_attr(unit, STATUS, AttributeValue::scalar(word));
            } else if self.starts_with(at, "op=") {
                once("op", self)?;
                self.pos += 3;
                let (_, word) = self.read_word();
                let (name, target) = match word.split_once(':') {
                    Some((n, t)) => (n, Some(t)),
                    None => (word.as_str(), None),
                };
                if !OPERATORS.contains(&name) {
                    return Err(self.error(
                        ParseErrorKind::Syntax,
                        at,
                        format!("unknown operator `{name}` (expected one of {})", OPERATORS.join(", ")),
                    ));
                }
                set_attr(unit, OP, AttributeValue::scalar(name));
                if let Some(target) = target {
                    if !is_identifier_token(target) {
                        return Err(self.error(ParseErrorKind::Syntax, at, format!("invalid operator label `{target}`")));
                    }
                    set_attr(unit, OP_TARGET, AttributeValue::scalar(target));
                }
            } else if self.starts_with(at, "label=") {
                once("label", self)?;
                self.pos += 6;
                let (_, word) = self.read_word();
                if !is_identifier_token(&word) {
                    return Err(self.error(ParseErrorKind::Syntax, at, format!("invalid label `{word}`")));
                }
                set_attr(unit, LABEL, AttributeValue::scalar(word));
            } else if self.starts_with(at, "rel=\"") {
                once("rel", self)?;
                self.pos += 5;
                let body_start = self.pos;
                while self.peek().is_some_and(|c| c != '"') {
                    self.pos += 1;
                }
                if self.at_end() {
                    return Err(self.error(ParseErrorKind::Syntax, at, "unterminated `rel=\"...\"`"));
                }
                let body: String = self.chars[body_start..self.pos].iter().collect();
                self.pos += 1;
                if self.peek().is_some_and(|c| !c.is_whitespace()) {
                    return Err(self.error(ParseErrorKind::Syntax, self.pos, "expected whitespace after `rel=\"...\"`"));
                }
                let mut rels = BTreeSet::new();
                for part in body.split(';') {
                    let token = canonical_relation(part)
                        .map_err(|m| self.error(ParseErrorKind::Syntax, at, m))?;
                    if !rels.insert(token.clone()) {
                        return Err(self.error(ParseErrorKind::Syntax, at, format!("duplicate relation `{token}`")));
                    }
                }
                set_attr(unit, REL, AttributeValue::Set(rels));
            } else {
                let (_, word) = self.read_word();
                return Err(self.error(ParseErrorKind::Syntax, at, format!("unexpected `{word}`")));
            }
        }
    }
}

fn set_attr(unit: &mut BehavioralUnit, name: &str, value: AttributeValue) {
    // Names here are non-empty constants.
    let _ = unit.set(name, value);
}

fn is_identifier_token(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

/// Canonicalizes a related-node token `qualifier(preposition) COMPONENT`:
/// qualifier and preposition lower-cased, single spaces.
pub fn canonical_relation(raw: &str) -> Result<String, String> {
    let raw = raw.trim();
    let bad = || format!("invalid relation `{raw}`, expected `qualifier(preposition) COMPONENT`");
    let (qualifier, rest) = raw.split_once('(').ok_or_else(bad)?;
    let (preposition, component) = rest.split_once(')').ok_or_else(bad)?;
    let qualifier = qualifier.trim();
    let preposition = preposition.trim();
    let component = component.split_whitespace().collect::<Vec<_>>().join(" ");
    let word = |s: &str| !s.is_empty() && s.chars().all(char::is_alphabetic);
    if !word(qualifier) || !word(preposition) || component.is_empty() || component.contains(['"', ';', '(', ')']) {
        return Err(bad());
    }
    Ok(format!("{}({}) {}", qualifier.to_lowercase(), preposition.to_lowercase(), component))
}

/// Canonical text for a model set: two-space indentation, explicit edge
/// keywords, annotations in fixed order, sets sorted.
///
/// Attributes with no text syntax (possible only for models loaded from
/// JSON) are not written.
pub fn emit_bts(set: &ModelSet) -> String {
    let mut out = String::new();
    for (i, model) in set.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&emit_model(model));
    }
    out
}

pub fn emit_model(model: &BehavioralModel) -> String {
    let mut out = format!("bt {}{}\n", model.id(), if model.is_init() { " init" } else { "" });
    emit_unit(model, model.root_index(), 1, None, &mut out);
    out
}

fn emit_unit(model: &BehavioralModel, idx: usize, depth: usize, edge: Option<EdgeKind>, out: &mut String) {
    let unit = &model.units()[idx];
    out.push_str(&"  ".repeat(depth));
    if let Some(kind) = edge {
        out.push_str(kind.keyword());
        out.push(' ');
    }
    out.push_str(&unit_line(unit));
    out.push('\n');
    for &c in model.children_of(idx) {
        let child_id = model.units()[c].id();
        let kind = model
            .triples()
            .iter()
            .find(|t| &t.child == child_id)
            .map(|t| t.edge.kind)
            .unwrap_or(EdgeKind::Sequential);
        emit_unit(model, c, depth + 1, Some(kind), out);
    }
}

fn unit_line(unit: &BehavioralUnit) -> String {
    let text = |name: &str| unit.get(name).map(value_text).unwrap_or_default();
    let cname = text(CNAME);
    let btype = unit
        .scalar(BTYPE)
        .and_then(|s| s.parse::<BehaviorType>().ok())
        .unwrap_or(BehaviorType::StateRealisation);
    let (open, close) = btype.delimiters();
    let mut line = format!("{} {open}{}{close}", cname, text(BNAME));

    if let Some(AttributeValue::Set(links)) = unit.get(TLINK) {
        if !links.is_empty() {
            line.push_str(" @");
            line.push_str(&links.iter().cloned().collect::<Vec<_>>().join(","));
        }
    }
    if let Some(status) = unit.scalar(STATUS) {
        if status != DEFAULT_STATUS {
            line.push_str(" !");
            line.push_str(status);
        }
    }
    if let Some(op) = unit.scalar(OP) {
        line.push_str(" op=");
        line.push_str(op);
        if let Some(target) = unit.scalar(OP_TARGET) {
            line.push(':');
            line.push_str(target);
        }
    }
    if let Some(label) = unit.scalar(LABEL) {
        line.push_str(" label=");
        line.push_str(label);
    }
    if let Some(value) = unit.get(REL) {
        let tokens = value.tokens();
        if !tokens.is_empty() {
            line.push_str(" rel=\"");
            line.push_str(&tokens.into_iter().collect::<Vec<_>>().join(";"));
            line.push('"');
        }
    }
    line
}

fn value_text(v: &AttributeValue) -> String {
    match v {
        AttributeValue::Scalar(s) => s.clone(),
        AttributeValue::Set(set) => set.iter().cloned().collect::<Vec<_>>().join(","),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Position;

    fn set_of(tokens: &[&str]) -> AttributeValue {
        AttributeValue::set(tokens.iter().copied()).unwrap()
    }

    #[test]
    fn door_button_example() {
        let set = parse_bts("bt b1\n  DOOR [Closed] @R1\n    seq BUTTON ???Pushed??? @R1\n").unwrap();
        let m = set.get("b1").unwrap();
        assert!(!m.is_init());
        let root = m.root();
        assert_eq!(root.scalar(CNAME), Some("DOOR"));
        assert_eq!(root.scalar(BNAME), Some("Closed"));
        assert_eq!(root.scalar(BTYPE), Some("state-realisation"));
        assert_eq!(root.get(TLINK), Some(&set_of(&["R1"])));
        assert_eq!(root.scalar(STATUS), Some("original"));
        assert_eq!(root.get(REL), Some(&AttributeValue::empty()));
        assert_eq!(m.triples().len(), 1);
        assert_eq!(m.triples()[0].edge.kind, EdgeKind::Sequential);
        assert_eq!(m.units()[1].scalar(BTYPE), Some("guard"));
        assert_eq!(m.units()[1].span().unwrap().line, 3);
    }

    #[test]
    fn minimal_init_model() {
        let set = parse_bts("bt b0 init\n  OVEN [Idle]\n").unwrap();
        let m = set.get("b0").unwrap();
        assert!(m.is_init());
        assert_eq!(m.root().get(TLINK), Some(&AttributeValue::empty()));
    }

    #[test]
    fn parallel_edge_with_relation() {
        let text = "bt b4\n  OVEN [Cooking]\n    par LIGHT [On] @R4 rel=\"where(in) OVEN\"\n";
        let m = parse_bts(text).unwrap().get("b4").unwrap().clone();
        assert_eq!(m.triples()[0].edge.kind, EdgeKind::Parallel);
        assert_eq!(m.units()[1].get(REL), Some(&set_of(&["where(in) OVEN"])));
    }

    #[test]
    fn all_behavior_delimiters() {
        let text = "bt b\n  A [s]\n    B ?sel?\n    C ??ev??\n    D ???g???\n    E >ii<\n    F <io>\n    G >>ei<<\n    H <<eo>>\n";
        let m = parse_bts(text).unwrap().models()[0].clone();
        let types: Vec<_> = m.units().iter().map(|u| u.scalar(BTYPE).unwrap().to_owned()).collect();
        let expected: Vec<_> = BehaviorType::ALL.iter().map(|t| t.as_str().to_owned()).collect();
        assert_eq!(types, expected);
    }

    #[test]
    fn behavior_names_keep_spaces_and_parentheses() {
        let m = parse_bts("bt b\n  OVEN [Cooking(1 min)] @R2\n").unwrap().models()[0].clone();
        assert_eq!(m.root().scalar(BNAME), Some("Cooking(1 min)"));
    }

    #[test]
    fn annotations() {
        let text = "bt b\n  A [x] @R4,R1 !implied op=reversion:L1 label=L2 rel=\"Where(In) OVEN; what(on)  TABLE TOP\"\n";
        let m = parse_bts(text).unwrap().models()[0].clone();
        let u = m.root();
        assert_eq!(u.get(TLINK), Some(&set_of(&["R1", "R4"])));
        assert_eq!(u.scalar(STATUS), Some("implied"));
        assert_eq!(u.scalar(OP), Some("reversion"));
        assert_eq!(u.scalar(OP_TARGET), Some("L1"));
        assert_eq!(u.scalar(LABEL), Some("L2"));
        assert_eq!(u.get(REL), Some(&set_of(&["what(on) TABLE TOP", "where(in) OVEN"])));
        let emitted = emit_bts(&parse_bts(text).unwrap());
        assert_eq!(
            emitted,
            "bt b\n  A [x] @R1,R4 !implied op=reversion:L1 label=L2 rel=\"what(on) TABLE TOP;where(in) OVEN\"\n"
        );
    }

    #[test]
    fn implied_status_is_emitted() {
        let emitted = emit_bts(&parse_bts("bt b\n  A [x] !implied\n").unwrap());
        assert!(emitted.contains("!implied"));
    }

    #[test]
    fn tlinks_emitted_sorted() {
        let emitted = emit_bts(&parse_bts("bt b\n  A [x] @R4,R1\n").unwrap());
        assert!(emitted.contains("@R1,R4"));
    }

    #[test]
    fn edge_kinds_and_default() {
        let text = "bt b\n  A [x]\n    B [y]\n    par C [z]\n      atom D [w]\n";
        let m = parse_bts(text).unwrap().models()[0].clone();
        let kinds: Vec<_> = m.triples().iter().map(|t| t.edge.kind).collect();
        assert_eq!(kinds, [EdgeKind::Sequential, EdgeKind::Parallel, EdgeKind::Atomic]);
        assert_eq!(m.position_at(3), Position::Leaf);
    }

    fn kind_of(text: &str) -> ParseErrorKind {
        parse_bts(text).unwrap_err().kind
    }

    #[test]
    fn error_kinds() {
        assert_eq!(kind_of("bt b\n\tA [x]\n"), ParseErrorKind::Syntax);
        assert_eq!(kind_of("bt b\n   A [x]\n"), ParseErrorKind::Indent);
        assert_eq!(kind_of("bt b\n  A [x]\n      B [y]\n"), ParseErrorKind::Indent);
        assert_eq!(kind_of("bt b\n  A {x}\n"), ParseErrorKind::UnknownBehaviorType);
        assert_eq!(kind_of("bt b\n  A ????x????\n"), ParseErrorKind::UnknownBehaviorType);
        assert_eq!(kind_of("bt b\n  A [x]\n    sequ B [y]\n"), ParseErrorKind::UnknownEdgeKind);
        assert_eq!(kind_of("bt b\n  A [x]\nbt b\n  B [y]\n"), ParseErrorKind::DuplicateModelId);
        assert_eq!(kind_of("bt b\n  A [x\n"), ParseErrorKind::Syntax);
        assert_eq!(kind_of("bt b\n  A [x] !sleepy\n"), ParseErrorKind::Syntax);
        assert_eq!(kind_of("bt b\n  A [x] op=teleport\n"), ParseErrorKind::Syntax);
        assert_eq!(kind_of("bt b\n  A [x] rel=\"nowhere OVEN\"\n"), ParseErrorKind::Syntax);
        assert_eq!(kind_of("bt b\n  A [x]\n  B [y]\n"), ParseErrorKind::Syntax);
        assert_eq!(kind_of("bt b\n  seq A [x]\n"), ParseErrorKind::Syntax);
        assert_eq!(kind_of("  A [x]\n"), ParseErrorKind::Syntax);
        assert_eq!(kind_of("bt b\n"), ParseErrorKind::Syntax);
        assert_eq!(kind_of("bt\n"), ParseErrorKind::Syntax);
        assert_eq!(kind_of("bt b\n  A [x] @R1 @R2\n"), ParseErrorKind::Syntax);
        assert_eq!(kind_of("bt b\n  A\n"), ParseErrorKind::Syntax);
    }

    #[test]
    fn mixed_alternative_siblings_rejected() {
        let e = parse_bts("bt b\n  A [x]\n    alt B [y]\n    seq C [z]\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Syntax);
        assert_eq!(e.span.line, 4);
        assert!(parse_bts("bt b\n  A [x]\n    alt B [y]\n    alt C [z]\n").is_ok());
    }

    #[test]
    fn spans_point_at_the_problem() {
        let e = parse_bts("bt b\n  A [x]\n    B [y] !bogus\n").unwrap_err();
        assert_eq!((e.span.line, e.span.column), (3, 11));
        assert_eq!(e.span.file, "<input>");
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let set = parse_bts("# header\n\nbt a\n  # note\n  A [x]\n\nbt b init\n  B [y]\n").unwrap();
        assert_eq!(set.len(), 2);
    }

    #[test]
    fn crlf_input() {
        assert!(parse_bts("bt b\r\n  A [x]\r\n    B [y]\r\n").is_ok());
    }
}
