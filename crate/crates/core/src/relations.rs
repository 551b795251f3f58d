//! Integration relations between models.
//!
//! A primary relation pairs some unit of a parent model with the root of a
//! child model. On top of those sit the special relations: several parent
//! units matching one child root (multi-preconditions), runs of three or
//! more pointwise-equivalent units along downward chains (sub-path), and
//! equivalent pairs that involve no root at all (non-root).

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::model::{BehavioralModel, ModelError, ModelId, ModelSet, Position, UnitId};
use crate::scalar::Scalar;
use crate::similarity::{case_folded_match, check_units, prepared_similarity, PreparedUnit, SimilarityError};
use crate::strategy::Strategy;

/// Shortest chain length that counts as a sub-path.
pub const MIN_SUB_PATH: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelationKind {
    RootRoot,
    BranchRoot,
    LeafRoot,
    MultiPreconditions,
    SubPath,
    BranchBranch,
    LeafBranch,
    LeafLeaf,
}

impl RelationKind {
    pub const ALL: [RelationKind; 8] = [
        RelationKind::RootRoot,
        RelationKind::BranchRoot,
        RelationKind::LeafRoot,
        RelationKind::MultiPreconditions,
        RelationKind::SubPath,
        RelationKind::BranchBranch,
        RelationKind::LeafBranch,
        RelationKind::LeafLeaf,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RelationKind::RootRoot => "root-root",
            RelationKind::BranchRoot => "branch-root",
            RelationKind::LeafRoot => "leaf-root",
            RelationKind::MultiPreconditions => "multi-preconditions",
            RelationKind::SubPath => "sub-path",
            RelationKind::BranchBranch => "branch-branch",
            RelationKind::LeafBranch => "leaf-branch",
            RelationKind::LeafLeaf => "leaf-leaf",
        }
    }

    pub fn is_primary(self) -> bool {
        matches!(self, RelationKind::RootRoot | RelationKind::BranchRoot | RelationKind::LeafRoot)
    }

    pub fn is_non_root(self) -> bool {
        matches!(self, RelationKind::BranchBranch | RelationKind::LeafBranch | RelationKind::LeafLeaf)
    }

    /// Kinds whose detection does not depend on which model is the parent.
    pub fn is_symmetric(self) -> bool {
        matches!(
            self,
            RelationKind::RootRoot | RelationKind::SubPath | RelationKind::BranchBranch | RelationKind::LeafLeaf
        )
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelationKind {
    type Err = RelationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| RelationError::UnknownKind(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelationError {
    #[error("model `{0}` cannot be related to itself")]
    SelfPair(ModelId),
    #[error("sub-path length must be at least {MIN_SUB_PATH}, got {0}")]
    MinLength(usize),
    #[error("unknown relation kind `{0}`")]
    UnknownKind(String),
    #[error("`{0}` is not the root of the child model")]
    NotPrimary(UnitId),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
}

/// A parent unit equivalent to the child model's root.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimaryPair<S> {
    pub parent: UnitId,
    pub child: UnitId,
    pub similarity: S,
}

/// Two aligned chains, equivalent position by position.
#[derive(Debug, Clone, PartialEq)]
pub struct SubPathMatch<S> {
    pub parent: Vec<UnitId>,
    pub child: Vec<UnitId>,
    pub similarity: Vec<S>,
}

/// An equivalent pair of non-root units, already oriented so that `kind`
/// reads parent-first. `reoriented` is set when the models were swapped to
/// get there (a branch of the first model against a leaf of the second).
#[derive(Debug, Clone, PartialEq)]
pub struct NonRootPair<S> {
    pub parent_model: ModelId,
    pub parent: UnitId,
    pub child_model: ModelId,
    pub child: UnitId,
    pub kind: RelationKind,
    pub reoriented: bool,
    pub similarity: S,
}

/// Similarity and equivalence of every unit pair of two models.
struct PairTable<S> {
    sims: Vec<S>,
    eq: Vec<bool>,
    cols: usize,
}

impl<S: Scalar> PairTable<S> {
    fn new(
        p1: &[PreparedUnit],
        p2: &[PreparedUnit],
        strategy: &Strategy<S>,
    ) -> Result<Self, SimilarityError> {
        let mut sims = Vec::with_capacity(p1.len() * p2.len());
        for a in p1 {
            for b in p2 {
                sims.push(prepared_similarity(a, b, strategy)?);
            }
        }
        let eq = sims.iter().map(|s| *s >= *strategy.alpha()).collect();
        Ok(Self { sims, eq, cols: p2.len() })
    }

    fn build(b1: &BehavioralModel, b2: &BehavioralModel, strategy: &Strategy<S>) -> Result<Self, RelationError> {
        let units: Vec<_> = b1.units().iter().chain(b2.units()).collect();
        check_units(&units, strategy)?;
        Ok(Self::new(&prepare(b1, strategy), &prepare(b2, strategy), strategy)?)
    }

    fn eq(&self, i: usize, j: usize) -> bool {
        self.eq[i * self.cols + j]
    }

    fn sim(&self, i: usize, j: usize) -> S {
        self.sims[i * self.cols + j].clone()
    }
}

fn prepare<S: Scalar>(model: &BehavioralModel, strategy: &Strategy<S>) -> Vec<PreparedUnit> {
    model.units().iter().map(|u| PreparedUnit::new(u, strategy)).collect()
}

fn distinct(b1: &BehavioralModel, b2: &BehavioralModel) -> Result<(), RelationError> {
    if b1.id() == b2.id() {
        Err(RelationError::SelfPair(b1.id().clone()))
    } else {
        Ok(())
    }
}

fn uid(model: &BehavioralModel, idx: usize) -> UnitId {
    model.units()[idx].id().clone()
}

fn primary_indices<S: Scalar>(b1: &BehavioralModel, b2: &BehavioralModel, t: &PairTable<S>) -> Vec<usize> {
    let root = b2.root_index();
    (0..b1.len()).filter(|&i| t.eq(i, root)).collect()
}

fn primary_kind(pos: Position) -> RelationKind {
    match pos {
        Position::Root => RelationKind::RootRoot,
        Position::Branch => RelationKind::BranchRoot,
        Position::Leaf => RelationKind::LeafRoot,
    }
}

/// Every unit of `b1` equivalent to the root of `b2`, in unit order.
pub fn primary_relations<S: Scalar>(
    b1: &BehavioralModel,
    b2: &BehavioralModel,
    strategy: &Strategy<S>,
) -> Result<Vec<PrimaryPair<S>>, RelationError> {
    distinct(b1, b2)?;
    let t = PairTable::build(b1, b2, strategy)?;
    let root = b2.root_index();
    Ok(primary_indices(b1, b2, &t)
        .into_iter()
        .map(|i| PrimaryPair { parent: uid(b1, i), child: uid(b2, root), similarity: t.sim(i, root) })
        .collect())
}

/// Root-root, branch-root or leaf-root, from where the parent unit sits.
pub fn classify_primary(
    parent: &str,
    child: &str,
    b1: &BehavioralModel,
    b2: &BehavioralModel,
) -> Result<RelationKind, RelationError> {
    let c = b2.index_of(child).ok_or_else(|| ModelError::UnknownUnit(child.into()))?;
    if c != b2.root_index() {
        return Err(RelationError::NotPrimary(child.into()));
    }
    let p = b1.index_of(parent).ok_or_else(|| ModelError::UnknownUnit(parent.into()))?;
    Ok(primary_kind(b1.position_at(p)))
}

/// Whether at least two distinct units of `b1` match the root of `b2`.
pub fn multi_preconditions<S: Scalar>(
    b1: &BehavioralModel,
    b2: &BehavioralModel,
    strategy: &Strategy<S>,
) -> Result<bool, RelationError> {
    Ok(primary_relations(b1, b2, strategy)?.len() >= 2)
}

fn sub_paths<S: Scalar>(
    b1: &BehavioralModel,
    b2: &BehavioralModel,
    t: &PairTable<S>,
    min_len: usize,
) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    for i in 0..b1.len() {
        for j in 0..b2.len() {
            if !t.eq(i, j) {
                continue;
            }
            // Only start where the pair cannot be extended upward.
            if let (Some(pi), Some(pj)) = (b1.parent_of(i), b2.parent_of(j)) {
                if t.eq(pi, pj) {
                    continue;
                }
            }
            let mut chain = vec![(i, j)];
            extend_down(b1, b2, t, min_len, &mut chain, &mut out);
        }
    }
    out.sort();
    out
}

fn extend_down<S: Scalar>(
    b1: &BehavioralModel,
    b2: &BehavioralModel,
    t: &PairTable<S>,
    min_len: usize,
    chain: &mut Vec<(usize, usize)>,
    out: &mut Vec<(Vec<usize>, Vec<usize>)>,
) {
    let (i, j) = *chain.last().expect("chain is never empty");
    let mut extended = false;
    for &ci in b1.children_of(i) {
        for &cj in b2.children_of(j) {
            if t.eq(ci, cj) {
                extended = true;
                chain.push((ci, cj));
                extend_down(b1, b2, t, min_len, chain, out);
                chain.pop();
            }
        }
    }
    if !extended && chain.len() >= min_len {
        out.push(chain.iter().copied().unzip());
    }
}

/// Maximal pairs of aligned, pointwise-equivalent downward chains of at
/// least `min_len` units.
pub fn sub_path_relations<S: Scalar>(
    b1: &BehavioralModel,
    b2: &BehavioralModel,
    strategy: &Strategy<S>,
    min_len: usize,
) -> Result<Vec<SubPathMatch<S>>, RelationError> {
    distinct(b1, b2)?;
    if min_len < MIN_SUB_PATH {
        return Err(RelationError::MinLength(min_len));
    }
    let t = PairTable::build(b1, b2, strategy)?;
    Ok(sub_paths(b1, b2, &t, min_len)
        .into_iter()
        .map(|(p, c)| SubPathMatch {
            similarity: p.iter().zip(&c).map(|(&i, &j)| t.sim(i, j)).collect(),
            parent: p.iter().map(|&i| uid(b1, i)).collect(),
            child: c.iter().map(|&j| uid(b2, j)).collect(),
        })
        .collect())
}

struct RawNonRoot {
    i: usize,
    j: usize,
    kind: RelationKind,
    reoriented: bool,
}

fn non_root_raw<S: Scalar>(b1: &BehavioralModel, b2: &BehavioralModel, t: &PairTable<S>) -> Vec<RawNonRoot> {
    let mut out = Vec::new();
    for i in 0..b1.len() {
        for j in 0..b2.len() {
            if !t.eq(i, j) {
                continue;
            }
            let (kind, reoriented) = match (b1.position_at(i), b2.position_at(j)) {
                (Position::Root, _) | (_, Position::Root) => continue,
                (Position::Branch, Position::Branch) => (RelationKind::BranchBranch, false),
                (Position::Leaf, Position::Branch) => (RelationKind::LeafBranch, false),
                (Position::Leaf, Position::Leaf) => (RelationKind::LeafLeaf, false),
                (Position::Branch, Position::Leaf) => (RelationKind::LeafBranch, true),
            };
            out.push(RawNonRoot { i, j, kind, reoriented });
        }
    }
    out
}

/// All equivalent pairs of non-root units between `b1` and `b2`.
pub fn non_root_relations<S: Scalar>(
    b1: &BehavioralModel,
    b2: &BehavioralModel,
    strategy: &Strategy<S>,
) -> Result<Vec<NonRootPair<S>>, RelationError> {
    distinct(b1, b2)?;
    let t = PairTable::build(b1, b2, strategy)?;
    Ok(non_root_raw(b1, b2, &t)
        .into_iter()
        .map(|r| {
            let (pm, p, cm, c) = if r.reoriented {
                (b2.id(), uid(b2, r.j), b1.id(), uid(b1, r.i))
            } else {
                (b1.id(), uid(b1, r.i), b2.id(), uid(b2, r.j))
            };
            NonRootPair {
                parent_model: pm.clone(),
                parent: p,
                child_model: cm.clone(),
                child: c,
                kind: r.kind,
                reoriented: r.reoriented,
                similarity: t.sim(r.i, r.j),
            }
        })
        .collect())
}

/// One reported relation.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationCandidate<S> {
    pub id: String,
    pub kind: RelationKind,
    pub parent_model: ModelId,
    pub child_model: ModelId,
    pub pairs: Vec<(UnitId, UnitId)>,
    pub similarity: Vec<S>,
    /// Set for leaf-branch candidates found as branch-leaf.
    pub reoriented: bool,
    /// Some component or behavior name matched only after case folding.
    pub case_folded: bool,
    key: (usize, usize, RelationKind, Vec<(usize, usize)>),
}

fn candidate_id(kind: RelationKind, pm: &ModelId, cm: &ModelId, pairs: &[(UnitId, UnitId)]) -> String {
    let side = |f: fn(&(UnitId, UnitId)) -> &UnitId| {
        let mut ids: Vec<&str> = Vec::new();
        for p in pairs {
            let id = f(p).as_str();
            if ids.last() != Some(&id) {
                ids.push(id);
            }
        }
        ids.join(",")
    };
    format!("{pm}.{}~{cm}.{}#{kind}", side(|p| &p.0), side(|p| &p.1))
}

impl<S: Scalar> RelationCandidate<S> {
    fn new(
        kind: RelationKind,
        set_idx: (usize, usize),
        parent: &BehavioralModel,
        child: &BehavioralModel,
        idx_pairs: Vec<(usize, usize)>,
        sims: Vec<S>,
        reoriented: bool,
    ) -> Self {
        let pairs: Vec<(UnitId, UnitId)> = idx_pairs.iter().map(|&(p, c)| (uid(parent, p), uid(child, c))).collect();
        let case_folded = idx_pairs
            .iter()
            .any(|&(p, c)| case_folded_match(&parent.units()[p], &child.units()[c]));
        Self {
            id: candidate_id(kind, parent.id(), child.id(), &pairs),
            kind,
            parent_model: parent.id().clone(),
            child_model: child.id().clone(),
            pairs,
            similarity: sims,
            reoriented,
            case_folded,
            key: (set_idx.0, set_idx.1, kind, idx_pairs),
        }
    }

    fn notes(&self) -> Vec<&'static str> {
        let mut notes = Vec::new();
        if self.reoriented {
            notes.push("reoriented");
        }
        if self.case_folded {
            notes.push("case-folded");
        }
        notes
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "id": self.id,
            "kind": self.kind.as_str(),
            "parent": self.parent_model.as_str(),
            "child": self.child_model.as_str(),
            "pairs": self.pairs.iter().map(|(p, c)| [p.as_str(), c.as_str()]).collect::<Vec<_>>(),
            "similarity": self.similarity.iter().map(Scalar::to_f64).collect::<Vec<_>>(),
        });
        let notes = self.notes();
        if !notes.is_empty() {
            v["notes"] = json!(notes);
        }
        v
    }
}

/// All relation candidates of a model set, in deterministic order: parent
/// model, child model, kind, then unit positions.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationGraph<S> {
    candidates: Vec<RelationCandidate<S>>,
}

impl<S> Default for RelationGraph<S> {
    fn default() -> Self {
        Self { candidates: Vec::new() }
    }
}

impl<S: Scalar> RelationGraph<S> {
    pub fn candidates(&self) -> &[RelationCandidate<S>] {
        &self.candidates
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, RelationCandidate<S>> {
        self.candidates.iter()
    }

    pub fn get(&self, id: &str) -> Option<&RelationCandidate<S>> {
        self.candidates.iter().find(|c| c.id == id)
    }

    pub fn by_kind(&self, kind: RelationKind) -> impl Iterator<Item = &RelationCandidate<S>> {
        self.candidates.iter().filter(move |c| c.kind == kind)
    }

    pub fn between<'a>(&'a self, parent: &'a str, child: &'a str) -> impl Iterator<Item = &'a RelationCandidate<S>> {
        self.candidates
            .iter()
            .filter(move |c| c.parent_model.as_str() == parent && c.child_model.as_str() == child)
    }

    /// Whether a primary relation joins the two models in either direction.
    pub fn has_primary(&self, a: &str, b: &str) -> bool {
        self.between(a, b).chain(self.between(b, a)).any(|c| c.kind.is_primary())
    }

    /// Whether `model` is the child of some primary relation. Root-root
    /// candidates are stored once per model pair, so both ends count.
    pub fn is_primary_child(&self, model: &str) -> bool {
        self.candidates.iter().any(|c| {
            c.kind.is_primary()
                && (c.child_model.as_str() == model
                    || (c.kind == RelationKind::RootRoot && c.parent_model.as_str() == model))
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "relations": self.candidates.iter().map(RelationCandidate::to_json).collect::<Vec<_>>(),
            "schema_version": 1,
        })
    }
}

impl<'a, S> IntoIterator for &'a RelationGraph<S> {
    type Item = &'a RelationCandidate<S>;
    type IntoIter = std::slice::Iter<'a, RelationCandidate<S>>;

    fn into_iter(self) -> Self::IntoIter {
        self.candidates.iter()
    }
}

fn ordered_pair_candidates<S: Scalar>(
    set: &ModelSet,
    (a, b): (usize, usize),
    t: &PairTable<S>,
) -> Vec<RelationCandidate<S>> {
    let (b1, b2) = (&set.models()[a], &set.models()[b]);
    let forward = b1.id().as_str() < b2.id().as_str();
    let mut out = Vec::new();

    let root = b2.root_index();
    let parents = primary_indices(b1, b2, t);
    for &i in &parents {
        let kind = primary_kind(b1.position_at(i));
        if kind.is_symmetric() && !forward {
            continue;
        }
        out.push(RelationCandidate::new(kind, (a, b), b1, b2, vec![(i, root)], vec![t.sim(i, root)], false));
    }
    if parents.len() >= 2 {
        out.push(RelationCandidate::new(
            RelationKind::MultiPreconditions,
            (a, b),
            b1,
            b2,
            parents.iter().map(|&i| (i, root)).collect(),
            parents.iter().map(|&i| t.sim(i, root)).collect(),
            false,
        ));
    }

    if forward {
        for (p, c) in sub_paths(b1, b2, t, MIN_SUB_PATH) {
            let sims = p.iter().zip(&c).map(|(&i, &j)| t.sim(i, j)).collect();
            let pairs = p.into_iter().zip(c).collect();
            out.push(RelationCandidate::new(RelationKind::SubPath, (a, b), b1, b2, pairs, sims, false));
        }
    }

    for r in non_root_raw(b1, b2, t) {
        if r.kind.is_symmetric() && !forward {
            continue;
        }
        let c = if r.reoriented {
            RelationCandidate::new(r.kind, (b, a), b2, b1, vec![(r.j, r.i)], vec![t.sim(r.i, r.j)], true)
        } else {
            RelationCandidate::new(r.kind, (a, b), b1, b2, vec![(r.i, r.j)], vec![t.sim(r.i, r.j)], false)
        };
        out.push(c);
    }
    out
}

/// Runs every detector over every ordered pair of distinct models.
///
/// Symmetric kinds are kept once per model pair, with the smaller model id
/// as parent. A leaf-branch pair found from both sides keeps the unflagged
/// orientation. Non-root pairs that lie aligned inside a reported sub-path
/// between the same two models are folded into that sub-path.
pub fn relation_graph<S: Scalar>(set: &ModelSet, strategy: &Strategy<S>) -> Result<RelationGraph<S>, RelationError> {
    let all_units: Vec<_> = set.iter().flat_map(|m| m.units()).collect();
    check_units(&all_units, strategy)?;
    let prepared: Vec<Vec<PreparedUnit>> = set.iter().map(|m| prepare(m, strategy)).collect();

    let n = set.len();
    let ordered: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b))).collect();
    let found: Vec<Vec<RelationCandidate<S>>> = ordered
        .par_iter()
        .map(|&(a, b)| {
            let t = PairTable::new(&prepared[a], &prepared[b], strategy)?;
            Ok(ordered_pair_candidates(set, (a, b), &t))
        })
        .collect::<Result<_, SimilarityError>>()?;

    let mut merged: BTreeMap<String, RelationCandidate<S>> = BTreeMap::new();
    for c in found.into_iter().flatten() {
        match merged.get(&c.id) {
            Some(existing) if !existing.reoriented || c.reoriented => {}
            _ => {
                merged.insert(c.id.clone(), c);
            }
        }
    }

    let mut aligned: HashSet<(&ModelId, &UnitId, &ModelId, &UnitId)> = HashSet::new();
    for c in merged.values().filter(|c| c.kind == RelationKind::SubPath) {
        for (p, u) in &c.pairs {
            aligned.insert((&c.parent_model, p, &c.child_model, u));
            aligned.insert((&c.child_model, u, &c.parent_model, p));
        }
    }
    let subsumed: HashSet<String> = merged
        .values()
        .filter(|c| c.kind.is_non_root())
        .filter(|c| {
            let (p, u) = &c.pairs[0];
            aligned.contains(&(&c.parent_model, p, &c.child_model, u))
        })
        .map(|c| c.id.clone())
        .collect();

    let mut candidates: Vec<_> = merged.into_values().filter(|c| !subsumed.contains(&c.id)).collect();
    candidates.sort_by(|x, y| x.key.cmp(&y.key));
    Ok(RelationGraph { candidates })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bts::parse_bts;
    use crate::Rational;

    fn set(text: &str) -> ModelSet {
        parse_bts(text).unwrap()
    }

    fn strategy() -> Strategy<Rational> {
        Strategy::default_strategy()
    }

    #[test]
    fn kind_names_round_trip() {
        for k in RelationKind::ALL {
            assert_eq!(k.as_str().parse::<RelationKind>(), Ok(k));
        }
        assert!("branch-leaf".parse::<RelationKind>().is_err());
    }

    #[test]
    fn branch_root_and_self_pair() {
        let s = set("bt b6\n  POWER [On]\n    DOOR [Closed]\n      LIGHT [Off]\nbt b1\n  DOOR [Closed]\n    BUTTON ??Pushed??\n");
        let (b6, b1) = (&s.models()[0], &s.models()[1]);
        let pairs = primary_relations(b6, b1, &strategy()).unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].parent.as_str(), "w1");
        assert_eq!(classify_primary("w1", "w0", b6, b1), Ok(RelationKind::BranchRoot));
        assert_eq!(classify_primary("w1", "w1", b6, b1), Err(RelationError::NotPrimary("w1".into())));
        assert_eq!(primary_relations(b6, b6, &strategy()), Err(RelationError::SelfPair("b6".into())));
        assert!(primary_relations(b1, b6, &strategy()).unwrap().is_empty());
    }

    #[test]
    fn two_matching_branches_are_multi_preconditions() {
        let s = set("bt p\n  A [x]\n    B [y]\n    B [y]\nbt c\n  B [y]\n    C [z]\n");
        let (p, c) = (&s.models()[0], &s.models()[1]);
        assert!(multi_preconditions(p, c, &strategy()).unwrap());
        assert!(!multi_preconditions(c, p, &strategy()).unwrap());
    }

    #[test]
    fn identical_chains_give_one_maximal_sub_path() {
        let text = "bt a\n  A [1]\n    B [2]\n      C [3]\n        D [4]\nbt b\n  A [1]\n    B [2]\n      C [3]\n        D [4]\n";
        let s = set(text);
        let (a, b) = (&s.models()[0], &s.models()[1]);
        let subs = sub_path_relations(a, b, &strategy(), 3).unwrap();
        assert_eq!(subs.len(), 1);
        assert_eq!(subs[0].parent.len(), 4);
        assert_eq!(sub_path_relations(a, b, &strategy(), 2), Err(RelationError::MinLength(2)));

        let two = set("bt a\n  A [1]\n    B [2]\nbt b\n  A [1]\n    B [2]\n");
        assert!(sub_path_relations(&two.models()[0], &two.models()[1], &strategy(), 3).unwrap().is_empty());

        // Duplicate model: root-root plus the full sub-path; the inner pairs
        // are folded into the sub-path.
        let g = relation_graph(&s, &strategy()).unwrap();
        let kinds: Vec<_> = g.iter().map(|c| c.kind).collect();
        assert_eq!(kinds, vec![RelationKind::RootRoot, RelationKind::SubPath]);
        assert_eq!(g.candidates()[1].id, "a.w0,w1,w2,w3~b.w0,w1,w2,w3#sub-path");
    }

    #[test]
    fn branch_leaf_is_reported_as_leaf_branch() {
        let s = set("bt a\n  R [0]\n    X [1]\n      Y [2]\nbt b\n  Q [0]\n    X [1]\n");
        let (a, b) = (&s.models()[0], &s.models()[1]);
        let raw = non_root_relations(a, b, &strategy()).unwrap();
        assert_eq!(raw.len(), 1);
        assert_eq!(raw[0].kind, RelationKind::LeafBranch);
        assert!(raw[0].reoriented);
        assert_eq!(raw[0].parent_model.as_str(), "b");
        let g = relation_graph(&s, &strategy()).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.candidates()[0].id, "b.w1~a.w1#leaf-branch");
        assert!(!g.candidates()[0].reoriented);
    }

    #[test]
    fn leaf_leaf_kept_once() {
        let s = set("bt b\n  R [0]\n    X [1]\nbt a\n  Q [0]\n    X [1]\n");
        let g = relation_graph(&s, &strategy()).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.candidates()[0].id, "a.w1~b.w1#leaf-leaf");
    }

    #[test]
    fn single_model_graph_is_empty() {
        let s = set("bt a\n  A [1]\n    A [1]\n");
        assert!(relation_graph(&s, &strategy()).unwrap().is_empty());
    }

    #[test]
    fn case_folded_note() {
        let s = set("bt a\n  Door [closed]\nbt b\n  DOOR [Closed]\n");
        let g = relation_graph(&s, &strategy()).unwrap();
        assert_eq!(g.len(), 1);
        assert!(g.candidates()[0].case_folded);
        assert_eq!(g.to_json()["relations"][0]["notes"], json!(["case-folded"]));
    }
}
