//! Test support: seeded random model sets and brute-force reference
//! implementations of the relation detectors.

use btlint_core::model::{BNAME, BTYPE, CNAME, REL, STATUS, TLINK};
use btlint_core::{
    build_model, equivalent, position_of, AttributeValue, BehavioralModel, BehavioralUnit, Edge, EdgeKind,
    ModelId, ModelSet, Position, RelationKind, Scalar, Strategy, UnitId,
};
use btlint_core::model::Triple;
use btlint_core::relations::MIN_SUB_PATH;
use btlint_core::{classify_primary, multi_preconditions, non_root_relations, primary_relations, sub_path_relations};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Alphabets and size limits for generated models.
#[derive(Debug, Clone)]
pub struct GenConfig {
    pub max_models: usize,
    pub max_units: usize,
    pub cnames: Vec<&'static str>,
    pub bnames: Vec<&'static str>,
    pub btypes: Vec<&'static str>,
    pub tlinks: Vec<&'static str>,
    pub statuses: Vec<&'static str>,
    pub rels: Vec<&'static str>,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            max_models: 6,
            max_units: 12,
            cnames: vec!["A", "B", "C", "a"],
            bnames: vec!["x", "y"],
            btypes: vec!["state-realisation", "selection", "event"],
            tlinks: vec!["R1", "R2", "R3"],
            statuses: vec!["original", "implied"],
            rels: vec!["where(in) OVEN", "what(on) TABLE"],
        }
    }
}

fn subset(rng: &mut impl Rng, pool: &[&str]) -> AttributeValue {
    let picked: Vec<&str> = pool.iter().copied().filter(|_| rng.gen_bool(0.4)).collect();
    AttributeValue::set(picked).expect("pool has no duplicates")
}

pub fn random_unit(rng: &mut impl Rng, id: &str, cfg: &GenConfig) -> BehavioralUnit {
    let pick = |rng: &mut _, pool: &[&'static str]| *pool.choose(rng).expect("non-empty alphabet");
    let mut u = BehavioralUnit::new(id);
    let set = |u: &mut BehavioralUnit, name, v| u.set(name, v).expect("valid attribute");
    set(&mut u, CNAME, AttributeValue::scalar(pick(rng, &cfg.cnames)));
    set(&mut u, BNAME, AttributeValue::scalar(pick(rng, &cfg.bnames)));
    set(&mut u, BTYPE, AttributeValue::scalar(pick(rng, &cfg.btypes)));
    set(&mut u, STATUS, AttributeValue::scalar(pick(rng, &cfg.statuses)));
    set(&mut u, TLINK, subset(rng, &cfg.tlinks));
    set(&mut u, REL, subset(rng, &cfg.rels));
    u
}

/// A random tree with units numbered `w0, w1, ...` in preorder, the layout
/// the text parser produces.
pub fn random_model(rng: &mut impl Rng, id: &str, cfg: &GenConfig) -> BehavioralModel {
    let n = rng.gen_range(1..=cfg.max_units);
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for k in 1..n {
        children[rng.gen_range(0..k)].push(k);
    }
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![0];
    while let Some(u) = stack.pop() {
        order.push(u);
        stack.extend(children[u].iter().rev());
    }
    let mut rank = vec![0; n];
    for (r, &u) in order.iter().enumerate() {
        rank[u] = r;
    }
    let units: Vec<_> = (0..n).map(|r| random_unit(rng, &format!("w{r}"), cfg)).collect();
    let mut parent_of = vec![None; n];
    for (p, cs) in children.iter().enumerate() {
        for &c in cs {
            parent_of[rank[c]] = Some(rank[p]);
        }
    }
    // Sibling edges share one kind when it is `alt`, as the text format needs.
    let alt_parent: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.15)).collect();
    let kinds = [EdgeKind::Sequential, EdgeKind::Parallel, EdgeKind::Atomic];
    let triples = (1..n)
        .map(|c| {
            let p = parent_of[c].expect("non-root units have a parent");
            let kind = if alt_parent[p] { EdgeKind::Alternative } else { *kinds.choose(rng).unwrap() };
            Triple::new(format!("w{p}").as_str(), Edge::new(kind), format!("w{c}").as_str())
        })
        .collect();
    build_model(id, rng.gen_bool(0.2), units, triples).expect("generated tree is valid")
}

pub fn random_model_set(rng: &mut impl Rng, cfg: &GenConfig) -> ModelSet {
    let n = rng.gen_range(1..=cfg.max_models);
    let mut ids: Vec<usize> = (1..=n + 4).collect();
    ids.shuffle(rng);
    let models = ids[..n].iter().map(|i| random_model(rng, &format!("b{i}"), cfg)).collect();
    ModelSet::new(models).expect("ids are distinct")
}

fn eq<S: Scalar>(a: &BehavioralUnit, b: &BehavioralUnit, s: &Strategy<S>) -> bool {
    equivalent(a, b, s).expect("generated units compare cleanly")
}

fn pos(m: &BehavioralModel, u: &UnitId) -> Position {
    position_of(m, u.as_str()).expect("unit belongs to model")
}

/// Primary pairs by double loop: (parent unit, child root, kind).
pub fn oracle_primary<S: Scalar>(
    b1: &BehavioralModel,
    b2: &BehavioralModel,
    s: &Strategy<S>,
) -> Vec<(UnitId, UnitId, RelationKind)> {
    let mut out = Vec::new();
    for w in b1.units() {
        for r in b2.units() {
            if pos(b2, r.id()) != Position::Root || !eq(w, r, s) {
                continue;
            }
            let kind = match pos(b1, w.id()) {
                Position::Root => RelationKind::RootRoot,
                Position::Branch => RelationKind::BranchRoot,
                Position::Leaf => RelationKind::LeafRoot,
            };
            out.push((w.id().clone(), r.id().clone(), kind));
        }
    }
    out.sort();
    out
}

/// Non-root pairs, oriented parent-first:
/// (parent model, parent unit, child model, child unit, kind, reoriented).
pub type OrientedPair = (ModelId, UnitId, ModelId, UnitId, RelationKind, bool);

pub fn oracle_non_root<S: Scalar>(b1: &BehavioralModel, b2: &BehavioralModel, s: &Strategy<S>) -> Vec<OrientedPair> {
    let mut out = Vec::new();
    for w1 in b1.units() {
        for w2 in b2.units() {
            let (p1, p2) = (pos(b1, w1.id()), pos(b2, w2.id()));
            if p1 == Position::Root || p2 == Position::Root || !eq(w1, w2, s) {
                continue;
            }
            let fwd = |kind| (b1.id().clone(), w1.id().clone(), b2.id().clone(), w2.id().clone(), kind, false);
            out.push(match (p1, p2) {
                (Position::Branch, Position::Branch) => fwd(RelationKind::BranchBranch),
                (Position::Leaf, Position::Branch) => fwd(RelationKind::LeafBranch),
                (Position::Leaf, Position::Leaf) => fwd(RelationKind::LeafLeaf),
                _ => (b2.id().clone(), w2.id().clone(), b1.id().clone(), w1.id().clone(), RelationKind::LeafBranch, true),
            });
        }
    }
    out.sort();
    out
}

/// Every downward chain of at least `min_len` units, found by following the
/// model's triples directly.
pub fn oracle_chains(m: &BehavioralModel, min_len: usize) -> Vec<Vec<UnitId>> {
    let mut frontier: Vec<Vec<UnitId>> = m.units().iter().map(|u| vec![u.id().clone()]).collect();
    let mut out = Vec::new();
    while let Some(chain) = frontier.pop() {
        if chain.len() >= min_len {
            out.push(chain.clone());
        }
        let last = chain.last().unwrap();
        for t in m.triples().iter().filter(|t| &t.parent == last) {
            let mut next = chain.clone();
            next.push(t.child.clone());
            frontier.push(next);
        }
    }
    out.sort();
    out
}

fn contains_aligned(outer: &(Vec<UnitId>, Vec<UnitId>), inner: &(Vec<UnitId>, Vec<UnitId>)) -> bool {
    let (n, k) = (outer.0.len(), inner.0.len());
    k < n && (0..=n - k).any(|o| outer.0[o..o + k] == inner.0[..] && outer.1[o..o + k] == inner.1[..])
}

/// All equal-length, pointwise-equivalent chain pairs, minus those contained
/// at the same offset in a longer such pair.
pub fn oracle_sub_paths<S: Scalar>(
    b1: &BehavioralModel,
    b2: &BehavioralModel,
    s: &Strategy<S>,
    min_len: usize,
) -> Vec<(Vec<UnitId>, Vec<UnitId>)> {
    let table: std::collections::HashSet<(&UnitId, &UnitId)> = b1
        .units()
        .iter()
        .flat_map(|a| b2.units().iter().map(move |b| (a, b)))
        .filter(|(a, b)| eq(a, b, s))
        .map(|(a, b)| (a.id(), b.id()))
        .collect();
    let mut all = Vec::new();
    let chains2 = oracle_chains(b2, min_len);
    for c1 in oracle_chains(b1, min_len) {
        for c2 in &chains2 {
            if c1.len() == c2.len() && c1.iter().zip(c2).all(|(a, b)| table.contains(&(a, b))) {
                all.push((c1.clone(), c2.clone()));
            }
        }
    }
    let mut out: Vec<_> = all.iter().filter(|p| !all.iter().any(|q| contains_aligned(q, p))).cloned().collect();
    out.sort();
    out
}

pub fn oracle_multi_preconditions<S: Scalar>(b1: &BehavioralModel, b2: &BehavioralModel, s: &Strategy<S>) -> bool {
    let mut parents: Vec<_> = oracle_primary(b1, b2, s).into_iter().map(|(p, _, _)| p).collect();
    parents.dedup();
    parents.len() >= 2
}

/// The default attribute set with random integer weights, threshold and
/// fraction. At least one weight is nonzero.
pub fn random_strategy<S: Scalar>(rng: &mut impl Rng) -> Strategy<S> {
    let names = [CNAME, BNAME, BTYPE, TLINK, STATUS, REL];
    let mut weights: Vec<u32> = names.iter().map(|_| rng.gen_range(0..=10)).collect();
    if weights.iter().all(|&w| w == 0) {
        weights[rng.gen_range(0..names.len())] = 1;
    }
    let body: Vec<String> = names.iter().zip(&weights).map(|(n, w)| format!("\"{n}\": {w}")).collect();
    let alpha = f64::from(rng.gen_range(0..=20u32)) / 20.0;
    let beta = f64::from(rng.gen_range(1..=9u32)) / 10.0;
    let text = format!(
        r#"{{"weights": {{{}}}, "alpha": {alpha}, "beta": {beta},
            "xi_mode": {{"cname": "scalar", "bname": "scalar", "btype": "scalar", "status": "scalar", "tlink": "set", "rel": "set"}},
            "compat": {{"btype": {{"values": ["state-realisation", "selection", "event", "guard", "internal-input", "internal-output", "external-input", "external-output"],
                                    "pairs": [["state-realisation", "selection"], ["event", "guard"]]}}}}}}"#,
        body.join(", ")
    );
    Strategy::from_json(&text).expect("generated strategy is valid")
}

/// Number of ordered model pairs (times detector) where a detector disagrees
/// with its oracle.
pub fn detector_discrepancies<S: Scalar>(set: &ModelSet, s: &Strategy<S>) -> usize {
    let mut discrepancies = 0;
    for b1 in set {
        for b2 in set {
            if b1.id() == b2.id() {
                continue;
            }
            let mut primary: Vec<_> = primary_relations(b1, b2, s)
                .unwrap()
                .into_iter()
                .map(|p| {
                    let kind = classify_primary(p.parent.as_str(), p.child.as_str(), b1, b2).unwrap();
                    (p.parent, p.child, kind)
                })
                .collect();
            primary.sort();
            discrepancies += usize::from(primary != oracle_primary(b1, b2, s));

            let mut non_root: Vec<_> = non_root_relations(b1, b2, s)
                .unwrap()
                .into_iter()
                .map(|p| (p.parent_model, p.parent, p.child_model, p.child, p.kind, p.reoriented))
                .collect();
            non_root.sort();
            discrepancies += usize::from(non_root != oracle_non_root(b1, b2, s));

            let mut subs: Vec<_> = sub_path_relations(b1, b2, s, MIN_SUB_PATH)
                .unwrap()
                .into_iter()
                .map(|m| (m.parent, m.child))
                .collect();
            subs.sort();
            discrepancies += usize::from(subs != oracle_sub_paths(b1, b2, s, MIN_SUB_PATH));

            discrepancies += usize::from(
                multi_preconditions(b1, b2, s).unwrap() != oracle_multi_preconditions(b1, b2, s),
            );
        }
    }
    discrepancies
}
