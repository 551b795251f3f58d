//! Behavioral models: attributes, units, typed edges and the validated tree.

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const CNAME: &str = "cname";
pub const BNAME: &str = "bname";
pub const BTYPE: &str = "btype";
pub const TLINK: &str = "tlink";
pub const STATUS: &str = "status";
pub const REL: &str = "rel";
pub const OP: &str = "op";
pub const OP_TARGET: &str = "op_target";
pub const LABEL: &str = "label";
pub const ETYPE: &str = "etype";

/// Attributes every unit carries, possibly with an empty-set value.
pub const CANONICAL_ATTRIBUTES: [&str; 6] = [CNAME, BNAME, BTYPE, TLINK, STATUS, REL];

/// Canonical attributes plus the optional operator and label attributes.
pub const KNOWN_ATTRIBUTES: [&str; 9] = [CNAME, BNAME, BTYPE, TLINK, STATUS, REL, OP, OP_TARGET, LABEL];

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s)
            }
        }

        impl Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }
    };
}

string_id!(
    /// Identifier of a unit, unique within its model.
    UnitId
);
string_id!(
    /// Identifier of a model, unique within a model set.
    ModelId
);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("model has no units")]
    EmptyModel,
    #[error("duplicate unit id `{0}`")]
    DuplicateUnit(UnitId),
    #[error("edge references unknown unit `{0}`")]
    DanglingReference(UnitId),
    #[error("unit `{0}` has more than one parent")]
    DuplicateChildEdge(UnitId),
    #[error("cycle through unit `{0}`")]
    Cycle(UnitId),
    #[error("every unit has a parent; no root")]
    NoRoot,
    #[error("multiple roots: {}", join_ids(.0))]
    MultipleRoots(Vec<UnitId>),
    #[error("unknown unit `{0}`")]
    UnknownUnit(UnitId),
    #[error("attribute name is empty")]
    EmptyAttributeName,
    #[error("duplicate token `{0}` in set value")]
    DuplicateSetToken(String),
    #[error("duplicate model id `{0}`")]
    DuplicateModelId(ModelId),
    #[error("unknown edge type `{0}`")]
    UnknownEdgeKind(String),
}

fn join_ids(ids: &[UnitId]) -> String {
    ids.iter().map(UnitId::as_str).collect::<Vec<_>>().join(", ")
}

/// Value of an attribute: a single token or a finite set of tokens.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AttributeValue {
    Scalar(String),
    Set(BTreeSet<String>),
}

impl AttributeValue {
    pub fn empty() -> Self {
        AttributeValue::Set(BTreeSet::new())
    }

    pub fn scalar(value: impl Into<String>) -> Self {
        AttributeValue::Scalar(value.into())
    }

    /// Builds a set value, rejecting repeated tokens.
    pub fn set<I, T>(tokens: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = T>,
        T: Into<String>,
    {
        let mut set = BTreeSet::new();
        for token in tokens {
            let token = token.into();
            if !set.insert(token.clone()) {
                return Err(ModelError::DuplicateSetToken(token));
            }
        }
        Ok(AttributeValue::Set(set))
    }

    /// The single token of a scalar or singleton set.
    pub fn as_scalar(&self) -> Option<&str> {
        match self {
            AttributeValue::Scalar(s) => Some(s),
            AttributeValue::Set(set) if set.len() == 1 => set.iter().next().map(String::as_str),
            AttributeValue::Set(_) => None,
        }
    }

    /// All tokens; a scalar is a one-token set.
    pub fn tokens(&self) -> BTreeSet<&str> {
        match self {
            AttributeValue::Scalar(s) => std::iter::once(s.as_str()).collect(),
            AttributeValue::Set(set) => set.iter().map(String::as_str).collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, AttributeValue::Set(set) if set.is_empty())
    }
}

/// A named value on a unit or edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub value: AttributeValue,
}

impl Attribute {
    pub fn new(name: impl Into<String>, value: AttributeValue) -> Result<Self, ModelError> {
        let name = name.into().trim().to_owned();
        if name.is_empty() {
            return Err(ModelError::EmptyAttributeName);
        }
        Ok(Self { name, value })
    }
}

/// Location of a parsed unit, for diagnostics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceSpan {
    pub file: String,
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

/// One unit of component behavior: a node of a behavior tree.
#[derive(Debug, Clone)]
pub struct BehavioralUnit {
    id: UnitId,
    attrs: BTreeMap<String, AttributeValue>,
    span: Option<SourceSpan>,
}

// Spans are diagnostics only; two units are equal when their ids and
// attributes are.
impl PartialEq for BehavioralUnit {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id && self.attrs == other.attrs
    }
}

impl Eq for BehavioralUnit {}

impl BehavioralUnit {
    /// A unit holding the six canonical attributes, all empty.
    pub fn new(id: impl Into<UnitId>) -> Self {
        let attrs = CANONICAL_ATTRIBUTES
            .iter()
            .map(|name| ((*name).to_owned(), AttributeValue::empty()))
            .collect();
        Self { id: id.into(), attrs, span: None }
    }

    pub fn with(mut self, name: &str, value: AttributeValue) -> Result<Self, ModelError> {
        self.set(name, value)?;
        Ok(self)
    }

    /// Shorthand for the three identifying attributes.
    pub fn with_behavior(self, cname: &str, bname: &str, btype: &str) -> Self {
        let mut unit = self;
        unit.attrs.insert(CNAME.into(), AttributeValue::scalar(cname));
        unit.attrs.insert(BNAME.into(), AttributeValue::scalar(bname));
        unit.attrs.insert(BTYPE.into(), AttributeValue::scalar(btype));
        unit
    }

    pub fn with_span(mut self, span: SourceSpan) -> Self {
        self.span = Some(span);
        self
    }

    pub fn set(&mut self, name: &str, value: AttributeValue) -> Result<(), ModelError> {
        let attr = Attribute::new(name, value)?;
        self.attrs.insert(attr.name, attr.value);
        Ok(())
    }

    pub fn id(&self) -> &UnitId {
        &self.id
    }

    pub fn span(&self) -> Option<&SourceSpan> {
        self.span.as_ref()
    }

    pub fn get(&self, name: &str) -> Option<&AttributeValue> {
        self.attrs.get(name)
    }

    /// The named attribute, or an empty-set attribute when absent.
    pub fn attribute(&self, name: &str) -> Attribute {
        Attribute {
            name: name.to_owned(),
            value: self.attrs.get(name).cloned().unwrap_or_else(AttributeValue::empty),
        }
    }

    pub fn attributes(&self) -> impl Iterator<Item = (&str, &AttributeValue)> {
        self.attrs.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn scalar(&self, name: &str) -> Option<&str> {
        self.attrs.get(name).and_then(AttributeValue::as_scalar)
    }

    pub(crate) fn set_id(&mut self, id: UnitId) {
        self.id = id;
    }
}

/// Control-flow type of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKind {
    Sequential,
    Parallel,
    Atomic,
    Alternative,
}

impl EdgeKind {
    pub const ALL: [EdgeKind; 4] = [
        EdgeKind::Sequential,
        EdgeKind::Parallel,
        EdgeKind::Atomic,
        EdgeKind::Alternative,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::Sequential => "sequential",
            EdgeKind::Parallel => "parallel",
            EdgeKind::Atomic => "atomic",
            EdgeKind::Alternative => "alternative",
        }
    }

    /// The DSL keyword introducing a child line.
    pub fn keyword(self) -> &'static str {
        match self {
            EdgeKind::Sequential => "seq",
            EdgeKind::Parallel => "par",
            EdgeKind::Atomic => "atom",
            EdgeKind::Alternative => "alt",
        }
    }

    pub fn from_keyword(kw: &str) -> Option<Self> {
        EdgeKind::ALL.into_iter().find(|k| k.keyword() == kw)
    }
}

impl FromStr for EdgeKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EdgeKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| ModelError::UnknownEdgeKind(s.to_owned()))
    }
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Flow of control between a parent and a child unit.
///
/// Attributes other than the edge type are carried along but never analysed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub kind: EdgeKind,
    pub extra: BTreeMap<String, AttributeValue>,
}

impl Edge {
    pub fn new(kind: EdgeKind) -> Self {
        Self { kind, extra: BTreeMap::new() }
    }

    pub fn sequential() -> Self {
        Self::new(EdgeKind::Sequential)
    }

    pub fn attributes(&self) -> Vec<Attribute> {
        let mut out = vec![Attribute {
            name: ETYPE.to_owned(),
            value: AttributeValue::scalar(self.kind.as_str()),
        }];
        out.extend(self.extra.iter().map(|(name, value)| Attribute {
            name: name.clone(),
            value: value.clone(),
        }));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triple {
    pub parent: UnitId,
    pub edge: Edge,
    pub child: UnitId,
}

impl Triple {
    pub fn new(parent: impl Into<UnitId>, edge: Edge, child: impl Into<UnitId>) -> Self {
        Self { parent: parent.into(), edge, child: child.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Position {
    Root,
    Branch,
    Leaf,
}

impl Position {
    pub fn as_str(self) -> &'static str {
        match self {
            Position::Root => "root",
            Position::Branch => "branch",
            Position::Leaf => "leaf",
        }
    }
}

/// A validated tree of behavioral units. Immutable once built.
#[derive(Debug, Clone)]
pub struct BehavioralModel {
    id: ModelId,
    is_init: bool,
    units: Vec<BehavioralUnit>,
    triples: Vec<Triple>,
    root: usize,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    positions: Vec<Position>,
    index: HashMap<UnitId, usize>,
}

impl PartialEq for BehavioralModel {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
            && self.is_init == other.is_init
            && self.units == other.units
            && self.triples == other.triples
    }
}

impl Eq for BehavioralModel {}

/// Validates units and parent/child triples into a model.
///
/// The root is inferred as the unique unit that never appears as a child.
pub fn build_model(
    model_id: impl Into<ModelId>,
    is_init: bool,
    units: Vec<BehavioralUnit>,
    triples: Vec<Triple>,
) -> Result<BehavioralModel, ModelError> {
    if units.is_empty() {
        return Err(ModelError::EmptyModel);
    }
    let mut index = HashMap::with_capacity(units.len());
    for (i, unit) in units.iter().enumerate() {
        if index.insert(unit.id.clone(), i).is_some() {
            return Err(ModelError::DuplicateUnit(unit.id.clone()));
        }
    }

    let n = units.len();
    let mut parent = vec![None; n];
    let mut children = vec![Vec::new(); n];
    for t in &triples {
        let p = *index.get(&t.parent).ok_or_else(|| ModelError::DanglingReference(t.parent.clone()))?;
        let c = *index.get(&t.child).ok_or_else(|| ModelError::DanglingReference(t.child.clone()))?;
        if p == c {
            return Err(ModelError::Cycle(t.child.clone()));
        }
        if parent[c].is_some() {
            return Err(ModelError::DuplicateChildEdge(t.child.clone()));
        }
        parent[c] = Some(p);
        children[p].push(c);
    }

    // Each unit has at most one parent, so walking parent links either
    // reaches a root or revisits a unit.
    let mut state = vec![0u8; n]; // 0 unvisited, 1 on current walk, 2 known acyclic
    for start in 0..n {
        let mut walk = Vec::new();
        let mut cur = Some(start);
        while let Some(u) = cur {
            match state[u] {
                2 => break,
                1 => return Err(ModelError::Cycle(units[u].id.clone())),
                _ => {
                    state[u] = 1;
                    walk.push(u);
                    cur = parent[u];
                }
            }
        }
        for u in walk {
            state[u] = 2;
        }
    }

    let roots: Vec<usize> = (0..n).filter(|&u| parent[u].is_none()).collect();
    let root = match roots.as_slice() {
        [] => return Err(ModelError::NoRoot),
        [r] => *r,
        many => return Err(ModelError::MultipleRoots(many.iter().map(|&u| units[u].id.clone()).collect())),
    };

    let positions = (0..n)
        .map(|u| {
            if u == root {
                Position::Root
            } else if children[u].is_empty() {
                Position::Leaf
            } else {
                Position::Branch
            }
        })
        .collect();

    Ok(BehavioralModel {
        id: model_id.into(),
        is_init,
        units,
        triples,
        root,
        parent,
        children,
        positions,
        index,
    })
}

impl BehavioralModel {
    pub fn id(&self) -> &ModelId {
        &self.id
    }

    pub fn is_init(&self) -> bool {
        self.is_init
    }

    pub fn units(&self) -> &[BehavioralUnit] {
        &self.units
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn root(&self) -> &BehavioralUnit {
        &self.units[self.root]
    }

    pub fn root_index(&self) -> usize {
        self.root
    }

    pub fn unit(&self, id: &str) -> Option<&BehavioralUnit> {
        self.index.get(id).map(|&i| &self.units[i])
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Position of the unit at `idx` (an index into [`units`](Self::units)).
    pub fn position_at(&self, idx: usize) -> Position {
        self.positions[idx]
    }

    pub fn parent_of(&self, idx: usize) -> Option<usize> {
        self.parent[idx]
    }

    pub fn children_of(&self, idx: usize) -> &[usize] {
        &self.children[idx]
    }

    /// Intermediate units (the set N of the model).
    pub fn branches(&self) -> impl Iterator<Item = &BehavioralUnit> {
        self.units_at(Position::Branch)
    }

    /// Leaf units (the set L of the model).
    pub fn leaves(&self) -> impl Iterator<Item = &BehavioralUnit> {
        self.units_at(Position::Leaf)
    }

    fn units_at(&self, pos: Position) -> impl Iterator<Item = &BehavioralUnit> {
        self.units.iter().zip(&self.positions).filter(move |(_, p)| **p == pos).map(|(u, _)| u)
    }

    /// Index chains following parent-to-child links, `min_len` units or
    /// longer. Chains are grouped by start unit in unit order, and within one
    /// start unit listed in depth-first preorder.
    pub fn chains(&self, min_len: usize) -> Vec<Vec<usize>> {
        let min_len = min_len.max(1);
        let mut out = Vec::new();
        let mut chain = Vec::new();
        for start in 0..self.units.len() {
            self.extend_chain(start, min_len, &mut chain, &mut out);
        }
        out
    }

    fn extend_chain(&self, u: usize, min_len: usize, chain: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        chain.push(u);
        if chain.len() >= min_len {
            out.push(chain.clone());
        }
        for &c in &self.children[u] {
            self.extend_chain(c, min_len, chain, out);
        }
        chain.pop();
    }

    /// Splits the model back into its construction inputs.
    pub fn into_parts(self) -> (ModelId, bool, Vec<BehavioralUnit>, Vec<Triple>) {
        (self.id, self.is_init, self.units, self.triples)
    }
}

pub fn position_of(model: &BehavioralModel, unit_id: &str) -> Result<Position, ModelError> {
    model
        .index_of(unit_id)
        .map(|i| model.position_at(i))
        .ok_or_else(|| ModelError::UnknownUnit(UnitId::from(unit_id)))
}

/// Every downward chain of at least `min_len` units, as unit ids.
pub fn downward_paths(model: &BehavioralModel, min_len: usize) -> Vec<Vec<UnitId>> {
    model
        .chains(min_len)
        .into_iter()
        .map(|c| c.into_iter().map(|i| model.units[i].id.clone()).collect())
        .collect()
}

/// An ordered collection of models with unique ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ModelSet {
    models: Vec<BehavioralModel>,
}

impl ModelSet {
    pub fn new(models: Vec<BehavioralModel>) -> Result<Self, ModelError> {
        let mut set = ModelSet::default();
        for m in models {
            set.push(m)?;
        }
        Ok(set)
    }

    pub fn push(&mut self, model: BehavioralModel) -> Result<(), ModelError> {
        if self.get(model.id.as_str()).is_some() {
            return Err(ModelError::DuplicateModelId(model.id.clone()));
        }
        self.models.push(model);
        Ok(())
    }

    /// Appends every model of `other`, rejecting id clashes.
    pub fn extend(&mut self, other: ModelSet) -> Result<(), ModelError> {
        for m in other.models {
            self.push(m)?;
        }
        Ok(())
    }

    pub fn models(&self) -> &[BehavioralModel] {
        &self.models
    }

    pub fn get(&self, id: &str) -> Option<&BehavioralModel> {
        self.models.iter().find(|m| m.id.as_str() == id)
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.models.iter().position(|m| m.id.as_str() == id)
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BehavioralModel> {
        self.models.iter()
    }

    /// Non-fatal observations about the set, e.g. no initialisation model.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.models.is_empty() && !self.models.iter().any(|m| m.is_init) {
            out.push(
                "no model is marked `init`; every model without a primary parent is reported incomplete"
                    .to_owned(),
            );
        }
        out
    }
}

impl<'a> IntoIterator for &'a ModelSet {
    type Item = &'a BehavioralModel;
    type IntoIter = std::slice::Iter<'a, BehavioralModel>;

    fn into_iter(self) -> Self::IntoIter {
        self.models.iter()
    }
}
