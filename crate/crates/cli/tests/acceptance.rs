//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use btlint_core::bts::{emit_bts, parse_bts};
use btlint_core::model::{BNAME, CNAME, REL, STATUS, TLINK};
use btlint_core::relations::MIN_SUB_PATH;
use btlint_core::{
    defect_report, equivalent, multi_preconditions, non_root_relations, primary_relations, relation_graph,
    sub_path_relations, unit_similarity, xi_set, AttributeValue, BehavioralUnit, Confirmation, Decision, DecisionSet,
    DefectType, ExactStrategy, ModelSet, Rational, RelationKind, Strategy,
};
use btlint_session::Session;
use btlint_testkit::{detector_discrepancies, random_model, random_model_set, random_strategy, random_unit, rng, GenConfig};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn fixture_set() -> ModelSet {
    parse_bts(&std::fs::read_to_string(fixture("microwave.bts")).unwrap()).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn microwave_report() -> Outcome {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_btlint"))
        .arg("check")
        .arg(fixture("microwave.bts"))
        .arg("--decisions")
        .arg(fixture("microwave.decisions.json"))
        .args(["--format", "json"])
        .env_remove("BTLINT_STRATEGY")
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(out.status.code() == Some(1), || format!("exit code {:?}", out.status.code()))?;
    let report: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let failing: BTreeSet<(String, Vec<String>)> = report["defects"]
        .as_array()
        .ok_or("no defects array")?
        .iter()
        .filter(|d| d["status"] == "automatic" || d["status"] == "confirmed")
        .map(|d| {
            let models = d["models"].as_array().unwrap().iter().map(|m| m.as_str().unwrap().to_owned()).collect();
            (d["type"].as_str().unwrap().to_owned(), models)
        })
        .collect();
    let expected: BTreeSet<(String, Vec<String>)> = [
        ("incomplete", vec!["b8"]),
        ("ambiguous", vec!["b9", "b2"]),
        ("incorrect", vec!["b10", "b8"]),
        ("redundant", vec!["b1", "b9"]),
        ("redundant", vec!["b6", "b9"]),
    ]
    .into_iter()
    .map(|(t, m)| (t.to_owned(), m.into_iter().map(str::to_owned).collect()))
    .collect();
    ensure(failing == expected, || format!("got {failing:?}"))?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("5 defects as expected, {} ms", elapsed.as_millis()))
}

fn relation_inventory() -> Outcome {
    let g = relation_graph(&fixture_set(), &ExactStrategy::default_strategy()).map_err(|e| e.to_string())?;
    let found = |kind: RelationKind, a: &str, b: &str| {
        g.iter().any(|c| {
            c.kind == kind
                && ((c.parent_model.as_str(), c.child_model.as_str()) == (a, b)
                    || kind.is_symmetric() && (c.parent_model.as_str(), c.child_model.as_str()) == (b, a))
        })
    };
    let required = [
        (RelationKind::LeafRoot, "b7", "b4"),
        (RelationKind::RootRoot, "b7", "b3"),
        (RelationKind::RootRoot, "b7", "b5"),
        (RelationKind::BranchRoot, "b6", "b3"),
        (RelationKind::BranchRoot, "b6", "b5"),
        (RelationKind::MultiPreconditions, "b9", "b2"),
        (RelationKind::LeafBranch, "b10", "b8"),
        (RelationKind::SubPath, "b1", "b9"),
        (RelationKind::SubPath, "b6", "b9"),
    ];
    for (kind, a, b) in required {
        ensure(found(kind, a, b), || format!("missing {kind} {a}->{b}"))?;
    }
    let pairs_of = |pred: fn(RelationKind) -> bool| -> BTreeSet<(&str, &str)> {
        g.iter().filter(|c| pred(c.kind)).map(|c| (c.parent_model.as_str(), c.child_model.as_str())).collect()
    };
    let non_root = pairs_of(|k| k.is_non_root());
    ensure(non_root == [("b10", "b8")].into(), || format!("non-root {non_root:?}"))?;
    let mp = pairs_of(|k| k == RelationKind::MultiPreconditions);
    ensure(mp == [("b9", "b2")].into(), || format!("multi-preconditions {mp:?}"))?;
    let sub = pairs_of(|k| k == RelationKind::SubPath);
    ensure(sub == [("b1", "b9"), ("b6", "b9")].into(), || format!("sub-path {sub:?}"))?;
    let allowed = [
        RelationKind::RootRoot,
        RelationKind::BranchRoot,
        RelationKind::LeafRoot,
        RelationKind::MultiPreconditions,
        RelationKind::SubPath,
        RelationKind::LeafBranch,
    ];
    let stray: Vec<_> = g.iter().filter(|c| !allowed.contains(&c.kind)).map(|c| c.id.clone()).collect();
    ensure(stray.is_empty(), || format!("unexpected kinds {stray:?}"))?;
    Ok(format!("{} candidates, all required present", g.len()))
}

fn worked_example() -> Outcome {
    let door = |id: &str, tlink: &str| {
        BehavioralUnit::new(id)
            .with_behavior("DOOR", "Closed", "state-realisation")
            .with(TLINK, AttributeValue::set([tlink]).unwrap())
            .unwrap()
            .with(STATUS, AttributeValue::scalar("original"))
            .unwrap()
    };
    let (a, b) = (door("w3", "R6"), door("w0", "R1"));
    let s = ExactStrategy::default_strategy();
    let exact = unit_similarity(&a, &b, &s).map_err(|e| e.to_string())?;
    ensure(exact == Rational::from_integer(1), || format!("similarity {exact}"))?;
    ensure(equivalent(&a, &b, &s) == Ok(true), || "not equivalent".into())?;
    let float = unit_similarity(&a, &b, &Strategy::<f64>::default_strategy()).map_err(|e| e.to_string())?;
    ensure(float == 1.0, || format!("f64 similarity {float}"))?;
    Ok("similarity 1, equivalent at alpha 1".into())
}

fn oracle_equivalence() -> Outcome {
    let cfg = GenConfig::default();
    let mut r = rng(0xacce_0004);
    let default = ExactStrategy::default_strategy();
    let mut discrepancies = 0;
    for i in 0..2000 {
        let set = random_model_set(&mut r, &cfg);
        discrepancies += if i % 2 == 0 {
            detector_discrepancies(&set, &default)
        } else {
            let s: ExactStrategy = random_strategy(&mut r);
            detector_discrepancies(&set, &s)
        };
    }
    ensure(discrepancies == 0, || format!("{discrepancies} discrepancies"))?;
    Ok("2000 model sets, 0 discrepancies".into())
}

const CASES: usize = 1000;

fn units(r: &mut ChaCha8Rng) -> (BehavioralUnit, BehavioralUnit) {
    let cfg = GenConfig::default();
    (random_unit(r, "u", &cfg), random_unit(r, "v", &cfg))
}

fn alphas(r: &mut ChaCha8Rng) -> (ExactStrategy, ExactStrategy, ExactStrategy) {
    let s: ExactStrategy = random_strategy(r);
    let lo = r.gen_range(0..=20);
    let hi = r.gen_range(lo..=20);
    let low = s.with_alpha(Rational::new(lo, 20)).unwrap();
    let high = s.with_alpha(Rational::new(hi, 20)).unwrap();
    (s, low, high)
}

fn relations_shrink(set: &ModelSet, low: &ExactStrategy, high: &ExactStrategy) -> bool {
    set.iter().all(|b1| {
        set.iter().filter(|b2| b2.id() != b1.id()).all(|b2| {
            let primary = |s| -> BTreeSet<_> {
                primary_relations(b1, b2, s).unwrap().into_iter().map(|p| (p.parent, p.child)).collect()
            };
            let non_root = |s| -> BTreeSet<_> {
                non_root_relations(b1, b2, s).unwrap().into_iter().map(|p| (p.parent, p.child, p.kind)).collect()
            };
            let subs_low = sub_path_relations(b1, b2, low, MIN_SUB_PATH).unwrap();
            let subs_contained = sub_path_relations(b1, b2, high, MIN_SUB_PATH).unwrap().iter().all(|m| {
                let n = m.parent.len();
                subs_low.iter().filter(|l| l.parent.len() >= n).any(|l| {
                    (0..=l.parent.len() - n).any(|o| l.parent[o..o + n] == m.parent[..] && l.child[o..o + n] == m.child[..])
                })
            });
            primary(high).is_subset(&primary(low))
                && non_root(high).is_subset(&non_root(low))
                && (!multi_preconditions(b1, b2, high).unwrap() || multi_preconditions(b1, b2, low).unwrap())
                && subs_contained
        })
    })
}

fn similarity_properties() -> Outcome {
    type Property = (&'static str, fn(&mut ChaCha8Rng) -> bool);
    let properties: [Property; 7] = [
        ("symmetry", |r| {
            let s: ExactStrategy = random_strategy(r);
            let (a, b) = units(r);
            unit_similarity(&a, &b, &s).unwrap() == unit_similarity(&b, &a, &s).unwrap()
        }),
        ("range", |r| {
            let s: ExactStrategy = random_strategy(r);
            let f: Strategy<f64> = random_strategy(r);
            let (a, b) = units(r);
            let x = unit_similarity(&a, &b, &s).unwrap();
            let y = unit_similarity(&a, &b, &f).unwrap();
            x >= Rational::from_integer(0) && x <= Rational::from_integer(1) && (0.0..=1.0).contains(&y)
        }),
        ("reflexivity", |r| {
            let s: ExactStrategy = random_strategy(r);
            let (a, _) = units(r);
            unit_similarity(&a, &a, &s).unwrap() == Rational::from_integer(1) && equivalent(&a, &a, &s).unwrap()
        }),
        ("alpha-monotone equivalence", |r| {
            let (_, low, high) = alphas(r);
            let (a, b) = units(r);
            !equivalent(&a, &b, &high).unwrap() || equivalent(&a, &b, &low).unwrap()
        }),
        ("alpha-monotone relations", |r| {
            let (_, low, high) = alphas(r);
            let set = random_model_set(r, &GenConfig { max_models: 3, ..GenConfig::default() });
            relations_shrink(&set, &low, &high)
        }),
        ("weight-scale invariance", |r| {
            let s: ExactStrategy = random_strategy(r);
            let f: Strategy<f64> = random_strategy(r);
            let (a, b) = units(r);
            let k = Rational::new(r.gen_range(1..=50), r.gen_range(1..=7));
            let kf = *k.numer() as f64 / *k.denom() as f64;
            unit_similarity(&a, &b, &s).unwrap() == unit_similarity(&a, &b, &s.scaled_weights(k)).unwrap()
                && (unit_similarity(&a, &b, &f).unwrap() - unit_similarity(&a, &b, &f.scaled_weights(kf)).unwrap()).abs()
                    < 1e-12
        }),
        ("zero-weight irrelevance", |r| {
            let name = [CNAME, BNAME, TLINK, STATUS, REL][r.gen_range(0..5)];
            let s: ExactStrategy = random_strategy(r);
            let (a, b) = units(r);
            // Zeroing the only weighted attribute is rejected; nothing to check then.
            let Ok(s) = s.with_weight(name, Rational::from_integer(0)) else { return true };
            let mut changed = a.clone();
            changed.set(name, AttributeValue::scalar("something-else")).unwrap();
            unit_similarity(&a, &b, &s).unwrap() == unit_similarity(&changed, &b, &s).unwrap()
        }),
    ];
    let mut r = rng(0xacce_0005);
    let mut failures = Vec::new();
    for (name, property) in properties {
        let failed = (0..CASES).filter(|_| !property(&mut r)).count();
        if failed > 0 {
            failures.push(format!("{name}: {failed}/{CASES}"));
        }
    }
    ensure(failures.is_empty(), || failures.join(", "))?;
    let s1: BTreeSet<&str> = ["R1", "R4"].into();
    let s2: BTreeSet<&str> = ["R4", "R7"].into();
    let third = xi_set(&s1, &s2, &Rational::new(1, 2), None).map_err(|e| e.to_string())?;
    ensure(third == Rational::new(1, 3), || format!("xi_set gave {third}"))?;
    Ok(format!("{} properties x {CASES} cases, 0 failures; xi_set = 1/3", properties.len()))
}

fn round_trips() -> Outcome {
    let set = fixture_set();
    let text = emit_bts(&set);
    let again = parse_bts(&text).map_err(|e| e.to_string())?;
    ensure(again == set && emit_bts(&again) == text, || "fixture changed on round-trip".into())?;

    let cfg = GenConfig::default();
    let mut r = rng(0xacce_0006);
    for i in 0..500 {
        let set = ModelSet::new(vec![random_model(&mut r, &format!("b{i}"), &cfg)]).map_err(|e| e.to_string())?;
        let text = emit_bts(&set);
        let once = parse_bts(&text).map_err(|e| format!("{e}\n{text}"))?;
        let twice = parse_bts(&emit_bts(&once)).map_err(|e| e.to_string())?;
        ensure(once == set && twice == once, || format!("random model changed:\n{text}"))?;
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let sidecar = dir.path().join("decisions.json");
    let script = btlint_core::decisions::parse_decision_log(
        &std::fs::read_to_string(fixture("microwave.decisions.json")).unwrap(),
    )
    .map_err(|e| e.to_string())?;
    let mut live = Session::new(fixture_set(), ExactStrategy::default_strategy()).map_err(|e| e.to_string())?;
    for d in script {
        live.record_decision(d).map_err(|e| e.to_string())?;
    }
    live.save(&sidecar).map_err(|e| e.to_string())?;
    let mut restored = Session::new(fixture_set(), ExactStrategy::default_strategy()).map_err(|e| e.to_string())?;
    let stale = restored.load(&sidecar).map_err(|e| e.to_string())?;
    ensure(stale.is_empty(), || format!("stale decisions {stale:?}"))?;
    let (a, b) = (live.report(), restored.report());
    ensure(a.to_json_string() == b.to_json_string() && a.to_text() == b.to_text(), || "reports differ".into())?;
    ensure(live.decisions_json() == restored.decisions_json(), || "decision logs differ".into())?;
    Ok("fixture, 500 random models, session save/load".into())
}

fn status_of(set: &ModelSet, decisions: &DecisionSet, relation_id: &str) -> Option<(DefectType, Confirmation)> {
    let g = relation_graph(set, &ExactStrategy::default_strategy()).unwrap();
    let report = defect_report(set, &g, decisions);
    report.defects().iter().find(|d| d.relations.iter().any(|r| r == relation_id)).map(|d| (d.defect_type, d.status))
}

fn decision_polarity() -> Outcome {
    let synthetic = parse_bts(
        "bt leafy\n  P [0]\n    X [1]\nbt leafier\n  Q [0]\n    X [1]\n\
         bt forky\n  R [0]\n    Y [1]\n      S [2]\nbt forkier\n  T [0]\n    Y [1]\n      U [3]\n\
         bt tip\n  V [0]\n    Z [1]\nbt mid\n  W [0]\n    Z [1]\n      K [4]\n",
    )
    .map_err(|e| e.to_string())?;
    let mut seen = BTreeSet::new();
    for set in [fixture_set(), synthetic] {
        let g = relation_graph(&set, &ExactStrategy::default_strategy()).map_err(|e| e.to_string())?;
        for c in &g {
            let none = status_of(&set, &DecisionSet::new(), &c.id);
            let accepted = status_of(&set, &DecisionSet::from_log(&[Decision::accept(&c.id)]), &c.id);
            let rejected = status_of(&set, &DecisionSet::from_log(&[Decision::reject(&c.id)]), &c.id);
            let expected = match c.kind {
                RelationKind::MultiPreconditions => Some((
                    DefectType::Ambiguous,
                    [Confirmation::Pending, Confirmation::Dismissed, Confirmation::Confirmed],
                )),
                RelationKind::SubPath => Some((
                    DefectType::Redundant,
                    [Confirmation::Pending, Confirmation::Confirmed, Confirmation::Dismissed],
                )),
                k if k.is_non_root() => Some((
                    DefectType::Incorrect,
                    [Confirmation::Pending, Confirmation::Confirmed, Confirmation::Dismissed],
                )),
                _ => None,
            };
            let got = [none, accepted, rejected];
            match expected {
                Some((ty, statuses)) => {
                    let want = statuses.map(|s| Some((ty, s)));
                    ensure(got == want, || format!("{}: got {got:?}", c.id))?;
                }
                None => ensure(got == [None; 3], || format!("{} produced a defect", c.id))?,
            }
            seen.insert(c.kind);
        }
    }
    let missing: Vec<_> = RelationKind::ALL.iter().filter(|k| !seen.contains(k)).collect();
    ensure(missing.is_empty(), || format!("kinds not exercised: {missing:?}"))?;
    Ok(format!("{} kinds, pending/accepted/rejected each", seen.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("microwave report", microwave_report),
        ("relation inventory", relation_inventory),
        ("worked example", worked_example),
        ("oracle equivalence", oracle_equivalence),
        ("similarity properties", similarity_properties),
        ("round-trips", round_trips),
        ("decision polarity", decision_polarity),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
