use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use toposbench_core::category::{monoid_to_category, FinCategory};
use toposbench_core::finiteness::Notion;
use toposbench_core::machines::*;
use toposbench_core::{Presheaf, ToposError};

mod common;

use common::{bfs, fixture, oracle_step, random_init, random_machine};

#[test]
fn closure_matches_bfs_on_random_machines() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let budget = 10_000;
    let mut bounded = 0;
    for _ in 0..100 {
        let t = random_machine(&mut rng);
        let init = random_init(&t, &mut rng);
        let cl = tm_closure(&t, &init, budget).unwrap();
        let (reach, complete) = bfs(&t, &init, budget);
        if complete {
            bounded += 1;
            assert!(!cl.exhausted);
            assert_eq!(cl.configs, reach.into_iter().collect::<BTreeSet<_>>());
        } else {
            assert!(cl.exhausted);
            assert!(cl.configs.len() >= budget);
            // every member is an initial configuration or a successor of a member
            let succ: HashSet<Configuration> = cl.configs.iter().flat_map(|c| oracle_step(&t, c)).collect();
            assert!(cl.configs.iter().all(|c| init.contains(c) || succ.contains(c)));
        }
    }
    assert!(bounded > 0);
}

#[test]
fn empty_init_and_empty_delta() {
    let halt = fixture("tm_halt");
    assert!(tm_closure(&halt, &ConfigSet::new(), 10).unwrap().configs.is_empty());
    let init = ConfigSet::from([halt.initial(&halt.word("0110").unwrap())]);
    assert!(tm_step(&halt, init.first().unwrap()).is_empty());
    assert_eq!(tm_closure(&halt, &init, 10).unwrap().configs, init);
    assert!(matches!(tm_closure(&halt, &init, 0), Err(ToposError::Malformed(_))));
}

#[test]
fn halting_machine_computes_identity() {
    let halt = fixture("tm_halt");
    let rel = tm_computed_relation(&halt, &["0", "10", "111"], 100).unwrap();
    assert!(rel.iter().all(|(x, y)| x == y));
    assert_eq!(rel.len(), 3);
}

#[test]
fn successor_machine() {
    let t = fixture("tm_successor");
    assert!(t.is_deterministic());
    let c = t.initial(&t.word("1").unwrap());
    let next = tm_step(&t, &c);
    assert_eq!(next.len(), 1);
    let n = next.first().unwrap();
    assert_eq!((n.state, n.head), (t.q0(), 1));
    for k in 1..=5 {
        let x = "1".repeat(k);
        let rel = tm_computed_relation(&t, &[&x], 1000).unwrap();
        assert_eq!(rel, BTreeSet::from([(x.clone(), "1".repeat(k + 1))]));
    }
}

#[test]
fn branching_writer_has_two_outputs() {
    let t = fixture("tm_branch");
    let c = t.initial(&t.word("1").unwrap());
    assert_eq!(tm_step(&t, &c).len(), 2);
    let rel = tm_computed_relation(&t, &["1"], 100).unwrap();
    let outs: BTreeSet<&str> = rel.iter().map(|(_, y)| y.as_str()).collect();
    assert_eq!(outs, BTreeSet::from(["0", "1"]));
}

#[test]
fn runaway_machine_reports_exhaustion() {
    let raw: RawTm = serde_json::from_str(
        r#"{"states":["q"],"alphabet":[" ","1"],"blank":" ","q0":"q","qf":"q","delta":{"q, ":[["q","1","R"]]}}"#,
    )
    .unwrap();
    let t = TMSpec::from_raw(&raw).unwrap();
    let cl = tm_closure(&t, &ConfigSet::from([t.initial(&[])]), 50).unwrap();
    assert!(cl.exhausted);
    assert_eq!(cl.configs.len(), 50);
    assert!(matches!(
        tm_computed_relation(&t, &[""], 50),
        Err(ToposError::BudgetExhausted { .. })
    ));
}

#[test]
fn raw_round_trip_and_unknown_keys() {
    for name in ["tm_successor", "tm_halt", "tm_branch"] {
        let t = fixture(name);
        assert_eq!(TMSpec::from_raw(&t.to_raw()).unwrap(), t);
    }
    let bad = r#"{"states":["q"],"alphabet":[" "],"blank":" ","q0":"q","qf":"q","delta":{},"extra":1}"#;
    assert!(serde_json::from_str::<RawTm>(bad).is_err());
}

#[test]
fn configuration_json_round_trip() {
    let t = fixture("tm_branch");
    let c = t.initial(&t.word("101").unwrap());
    let j = c.to_json(&t);
    assert_eq!(j["tape"]["cells"], serde_json::json!(["1", "0", "1"]));
    assert_eq!(Configuration::from_json(&t, &j).unwrap(), c);
}

fn constant(base: &Arc<FinCategory>, name: &str, xs: &[&str]) -> Arc<Presheaf> {
    Arc::new(Presheaf::constant(name, base, xs))
}

fn copy_machine(raw: &RawTm, n: usize) -> Vec<TMSpec> {
    (0..n).map(|_| TMSpec::from_raw(raw).unwrap()).collect()
}

#[test]
fn internal_demo_on_trivial_base_is_classical() {
    let t = fixture("tm_successor");
    let base = Arc::new(FinCategory::trivial());
    let m = InternalMachine {
        states: constant(&base, "Q", &["q0", "qf"]),
        alphabet: constant(&base, "S", &[" ", "1"]),
        stages: vec![t.clone()],
        fin: Notion::Kuratowski,
    };
    let rep = tm_internal_demo(&m, &["11"], 1000).unwrap();
    let classical = tm_closure(&t, &ConfigSet::from([t.initial(&t.word("11").unwrap())]), 1000).unwrap();
    assert_eq!(rep.closures[0].size, classical.configs.len());
    assert!(rep.natural && rep.fin_states.verdict && rep.fin_alphabet.verdict);
    assert!(!rep.contrast);
}

#[test]
fn internal_demo_surfaces_the_figure1_mismatch() {
    let (monoid, a) = automaton_to_mset(&figure1()).unwrap();
    let base = Arc::new(monoid_to_category(&monoid));
    assert!(a.same_base(&Arc::new(Presheaf::constant("x", &base, &["x"]))));
    let raw: RawTm = serde_json::from_value(serde_json::json!({
        "states": ["q1", "q2", "q3", "q4"], "alphabet": [" ", "1"], "blank": " ", "q0": "q4", "qf": "q4",
        "delta": { "q1,1": [["q1","1","R"]], "q2,1": [["q2","1","R"]], "q3,1": [["q3","1","R"]], "q4,1": [["q4","1","R"]] }
    }))
    .unwrap();
    let m = InternalMachine {
        states: a,
        alphabet: constant(&base, "S", &[" ", "1"]),
        stages: copy_machine(&raw, 1),
        fin: Notion::Kuratowski,
    };
    let rep = tm_internal_demo(&m, &["11"], 1_000_000).unwrap();
    assert_eq!(rep.global_states, 1);
    assert!(rep.state_subobjects > 3);
    assert!(rep.contrast);
    assert!(rep.natural);
}

#[test]
fn mismatched_stage_tables_violate_equivariance() {
    let base = Arc::new(FinCategory::arrow_category());
    let mk = |target: &str| -> TMSpec {
        let raw: RawTm = serde_json::from_value(serde_json::json!({
            "states": ["p", "q"], "alphabet": [" ", "1"], "blank": " ", "q0": "p", "qf": "q",
            "delta": { "p,1": [[target, "1", "R"]] }
        }))
        .unwrap();
        TMSpec::from_raw(&raw).unwrap()
    };
    let m = InternalMachine {
        states: constant(&base, "Q", &["p", "q"]),
        alphabet: constant(&base, "S", &[" ", "1"]),
        stages: vec![mk("q"), mk("p")],
        fin: Notion::Kuratowski,
    };
    assert!(matches!(
        tm_internal_demo(&m, &["1"], 100),
        Err(ToposError::EquivarianceViolation { .. })
    ));
    let ok = InternalMachine {
        stages: vec![mk("q"), mk("q")],
        ..m
    };
    assert!(tm_internal_demo(&ok, &["1"], 100).unwrap().natural);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tape_writes_match_a_map_model(writes in prop::collection::vec((-6i64..6, 0usize..3), 0..24)) {
        let blank = 0;
        let mut c = Configuration::blank(0);
        let mut model = BTreeMap::new();
        for (p, s) in writes {
            c.write(p, s, blank);
            if s == blank { model.remove(&p); } else { model.insert(p, s); }
        }
        prop_assert_eq!(c.non_blank(blank).collect::<BTreeMap<_, _>>(), model.clone());
        let mut rebuilt = Configuration::blank(0);
        for (&p, &s) in model.iter().rev() {
            rebuilt.write(p, s, blank);
        }
        prop_assert_eq!(rebuilt, c);
    }

    #[test]
    fn closure_is_a_closure_operator(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_machine(&mut rng);
        let small = random_init(&t, &mut rng);
        let mut big = small.clone();
        big.extend(random_init(&t, &mut rng));
        let budget = 2_000;
        let cs = tm_closure(&t, &small, budget).unwrap();
        let cb = tm_closure(&t, &big, budget).unwrap();
        prop_assume!(!cs.exhausted && !cb.exhausted);
        prop_assert!(small.is_subset(&cs.configs));
        prop_assert!(cs.configs.is_subset(&cb.configs));
        prop_assert_eq!(&tm_closure(&t, &cs.configs, budget).unwrap().configs, &cs.configs);
    }

    #[test]
    fn deterministic_machines_are_single_valued(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_machine(&mut rng);
        prop_assume!(t.is_deterministic());
        for c in random_init(&t, &mut rng) {
            prop_assert!(tm_step(&t, &c).len() <= 1);
        }
    }
}
