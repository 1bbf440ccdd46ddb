//! One PASS/FAIL line per acceptance criterion. Run with `--nocapture` to see
//! them; the test fails if any criterion does.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use toposbench_core::category::{monoid_to_category, FinCategory, FinMonoid};
use toposbench_core::finiteness::{dedekind, kuratowski_witness, squire_lp, SquireVariant};
use toposbench_core::limits::{initial, terminal};
use toposbench_core::logic::{parse_formula, Mode, Signature, Universe};
use toposbench_core::machines::{tm_closure, tm_computed_relation, truncated_free_action, TMSpec};
use toposbench_core::model::Model;
use toposbench_core::nat::{enumerate_nat_trans, Filter, NatTrans, DEFAULT_BUDGET};
use toposbench_core::omega::OmegaStructure;
use toposbench_core::sample::{all_presheaves, random_presheaf};
use toposbench_core::subobject::subobject_lattice;
use toposbench_core::suite::{self, SuiteConfig, SuiteReport};
use toposbench_core::Presheaf;

mod common;

use common::{bfs, closed_subsets, fixture, oracle_step, random_init, random_machine, surjective_actions};

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn model(name: &str) -> Model {
    Model::parse(&std::fs::read_to_string(fixtures_dir().join(name)).unwrap()).unwrap()
}

fn monos(from: &Arc<Presheaf>, to: &Arc<Presheaf>) -> Vec<NatTrans> {
    enumerate_nat_trans(from, to, Filter::Mono).unwrap()
}

fn assignment(m: &NatTrans) -> BTreeMap<String, String> {
    m.describe().into_values().next().unwrap_or_default()
}

fn mapping(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

fn mono_counts() -> Outcome {
    let m = model("figure1.json");
    let a = m.presheaf("A").unwrap();
    let counts: Vec<usize> = ["B1", "B2", "B3"]
        .iter()
        .map(|b| monos(m.presheaf(b).unwrap(), a).len())
        .collect();
    let found: BTreeSet<BTreeMap<String, String>> =
        monos(m.presheaf("B3").unwrap(), a).iter().map(assignment).collect();
    let expected: BTreeSet<BTreeMap<String, String>> = [
        mapping(&[("X", "q4"), ("Y", "q3"), ("Z", "q2")]),
        mapping(&[("X", "q4"), ("Y", "q2"), ("Z", "q3")]),
    ]
    .into();
    let one = monos(m.presheaf("B1").unwrap(), a);
    let single = one.len() == 1 && assignment(&one[0]) == mapping(&[("X", "q4")]);
    Outcome {
        pass: counts == [1, 0, 2] && single && found == expected,
        detail: format!("counts {counts:?} (expected [1, 0, 2]); three-state monos {found:?}"),
    }
}

fn global_elements_and_subobjects() -> Outcome {
    let m = model("figure1.json");
    let a = m.presheaf("A").unwrap();
    let base = a.base();
    let globals = enumerate_nat_trans(&terminal(base), a, Filter::All).unwrap();
    let on_q4 = globals.len() == 1 && a.element_name(0, globals[0].apply(0, 0)) == "q4";
    let lattice: BTreeSet<Vec<(usize, usize)>> = subobject_lattice(a, DEFAULT_BUDGET)
        .unwrap()
        .iter()
        .map(|s| a.elements().filter(|&(c, x)| s.contains(c, x)).collect())
        .collect();
    let oracle = closed_subsets(a);
    let proper = lattice
        .iter()
        .filter(|s| !s.is_empty() && s.len() < a.total_size())
        .count();
    let flag = if proper == 3 {
        String::new()
    } else {
        format!(" DISCREPANCY: printed claim is 3, found {proper}")
    };
    Outcome {
        pass: on_q4 && lattice == oracle,
        detail: format!(
            "{} global element(s); |Sub(A)| = {} vs brute force {}; non-empty proper = {proper}{flag}",
            globals.len(),
            lattice.len(),
            oracle.len()
        ),
    }
}

fn omega_is_dedekind_finite() -> Outcome {
    let mut bases = vec![("0 -> 1".to_string(), Arc::new(FinCategory::arrow_category()))];
    for n in 1..=3 {
        for (i, m) in FinMonoid::all_up_to_iso(n).iter().enumerate() {
            bases.push((format!("monoid {n}.{i}"), Arc::new(monoid_to_category(m))));
        }
    }
    let mut failed = Vec::new();
    let mut by_sentence = 0;
    for (label, base) in &bases {
        let omega = OmegaStructure::new(base).unwrap().omega.clone();
        match dedekind(&omega, DEFAULT_BUDGET) {
            Ok(r) if r.finite => {
                if r.truth_value.is_some() {
                    by_sentence += 1;
                }
            }
            Ok(r) => failed.push(format!("{label}: forced at {:?}", r.stages)),
            Err(e) => failed.push(format!("{label}: {e}")),
        }
    }
    Outcome {
        pass: failed.is_empty(),
        detail: format!(
            "{} bases checked, {by_sentence} also by evaluating the sentence; failures {failed:?}",
            bases.len()
        ),
    }
}

fn kuratowski_witness_search() -> Outcome {
    let base = Arc::new(FinCategory::arrow_category());
    let candidates = all_presheaves(&base, 2, DEFAULT_BUDGET).unwrap();
    match kuratowski_witness(&candidates, DEFAULT_BUDGET).unwrap() {
        Some((w, v)) => {
            let (sub, _) = v.to_presheaf("V");
            let independent = surjective_actions(&w) && !surjective_actions(&sub);
            Outcome {
                pass: independent,
                detail: format!(
                    "{} candidates; W stages {:?}, V stages {:?}; independent check {}",
                    candidates.len(),
                    w.sizes(),
                    v.sizes(),
                    if independent { "agrees" } else { "disagrees" }
                ),
            }
        }
        None => Outcome {
            pass: false,
            detail: format!("no witness among {} candidates", candidates.len()),
        },
    }
}

fn squire_separation() -> Outcome {
    let lp = |a: &Arc<Presheaf>, p: usize| squire_lp(a, p, SquireVariant::RECORD, Mode::Direct).unwrap().finite;
    let c2 = model("chain_p2.json").presheaf("chainM").unwrap().clone();
    let c3 = model("chain_p3.json").presheaf("chainM").unwrap().clone();
    let sep2 = lp(&c2, 2) && !lp(&c2, 1);
    let sep3 = lp(&c3, 3) && !lp(&c3, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let bases = suite::sample_bases();
    let mut violations = Vec::new();
    let samples = 100;
    for i in 0..samples {
        let base = &bases[i % bases.len()];
        let a = random_presheaf(base, 2, &mut rng, &format!("S{i}"));
        let levels: Vec<bool> = (1..=3).map(|p| lp(&a, p)).collect();
        for q in 0..3 {
            for p in q..3 {
                if levels[q] && !levels[p] {
                    violations.push(format!("S{i}: L{} but not L{}", q + 1, p + 1));
                }
            }
        }
    }
    Outcome {
        pass: sep2 && sep3 && violations.is_empty(),
        detail: format!(
            "p=2 separates: {sep2}; p=3 separates: {sep3}; monotonicity on {samples} samples, violations {violations:?}"
        ),
    }
}

fn arrow_object(name: &str, stages: [&[&str]; 2], identity_action: bool) -> Arc<Presheaf> {
    let base = Arc::new(FinCategory::arrow_category());
    let carriers: BTreeMap<String, Vec<String>> = [("0", stages[0]), ("1", stages[1])]
        .iter()
        .map(|(o, xs)| (o.to_string(), xs.iter().map(|s| s.to_string()).collect()))
        .collect();
    let mut action = BTreeMap::new();
    if identity_action {
        action.insert(
            "u".to_string(),
            stages[0].iter().map(|s| (s.to_string(), s.to_string())).collect(),
        );
    }
    Arc::new(Presheaf::from_tables(name, base, &carriers, &action).unwrap())
}

fn empty_object_and_extensionality() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for a in [&["a1"][..], &["a1", "a2"][..]] {
        let x = arrow_object("X", [&[], a], false);
        let base = x.base().clone();
        let to_initial = enumerate_nat_trans(&x, &initial(&base), Filter::All).unwrap().len();
        let sig = Signature::new(base).with_ground("X", x).unwrap();
        let u = Universe::new(&sig).unwrap();
        let tv = u
            .truth(&parse_formula("~ exists x:X. x in X").unwrap(), Mode::Expand)
            .unwrap();
        pass &= tv.is_top && to_initial == 0;
        notes.push(format!(
            "|A|={}: not-exists {:?}, maps to initial {to_initial}",
            a.len(),
            tv.sieves()
        ));
    }
    let x = arrow_object("X", [&[], &["a1", "a2"]], false);
    let y = arrow_object("Y", [&["b1", "b2"], &["b1", "b2"]], true);
    let f = NatTrans::new(x.clone(), y.clone(), vec![vec![], vec![0, 0]]).unwrap();
    let g = NatTrans::new(x.clone(), y.clone(), vec![vec![], vec![1, 0]]).unwrap();
    let externally_different = f != g;
    let sig = Signature::new(x.base().clone())
        .with_ground("X", x)
        .unwrap()
        .with_ground("Y", y)
        .unwrap()
        .with_function("F", "X", "Y", f)
        .unwrap()
        .with_function("G", "X", "Y", g)
        .unwrap();
    let u = Universe::new(&sig).unwrap();
    let truth = |s: &str| u.truth(&parse_formula(s).unwrap(), Mode::Expand).unwrap();
    let equal = truth("F = G");
    let ext = truth("(forall x:X. F(x) = G(x)) => F = G");
    pass &= equal.is_top && externally_different;
    notes.push(format!(
        "F = G internally {:?}; extensionality {:?}; externally different {externally_different}",
        equal.sieves(),
        ext.sieves()
    ));
    Outcome {
        pass,
        detail: notes.join("; "),
    }
}

fn tarski_collapse() -> Outcome {
    let mut rep = SuiteReport::default();
    suite::tarski_collapse(&mut rep, 4, DEFAULT_BUDGET).unwrap();
    let total: usize = rep.checks.values().sum();
    Outcome {
        pass: rep.passed(),
        detail: format!("{total} checks; failures {:?}", rep.failures),
    }
}

fn tm_semantics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let budget = 10_000;
    let (mut exact, mut bounded, mut bad) = (0, 0, Vec::new());
    for i in 0..100 {
        let t = random_machine(&mut rng);
        let init = random_init(&t, &mut rng);
        let cl = tm_closure(&t, &init, budget).unwrap();
        let (reach, complete) = bfs(&t, &init, budget);
        if complete {
            exact += 1;
            if cl.exhausted || cl.configs != reach.into_iter().collect::<BTreeSet<_>>() {
                bad.push(i);
            }
        } else {
            bounded += 1;
            let succ: BTreeSet<_> = cl.configs.iter().flat_map(|c| oracle_step(&t, c)).collect();
            let grounded = cl.configs.iter().all(|c| init.contains(c) || succ.contains(c));
            if !cl.exhausted || cl.configs.len() < budget || !grounded {
                bad.push(i);
            }
        }
    }
    let t: TMSpec = fixture("tm_successor");
    let inputs: Vec<String> = (0..=5).map(|n| "1".repeat(n)).collect();
    let refs: Vec<&str> = inputs.iter().map(String::as_str).collect();
    let rel = tm_computed_relation(&t, &refs, 1_000).unwrap();
    let expected: BTreeSet<(String, String)> = inputs.iter().map(|w| (w.clone(), format!("{w}1"))).collect();
    Outcome {
        pass: bad.is_empty() && rel == expected,
        detail: format!(
            "{exact} exact and {bounded} budget-bound machines, mismatches {bad:?}; successor relation {rel:?}"
        ),
    }
}

fn truncated_identity() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for n in 1..=3 {
        let c = truncated_free_action(n);
        let endos = monos(&c, &c);
        let only_id = endos.len() == 1 && endos[0] == NatTrans::identity(&c);
        pass &= only_id;
        notes.push(format!("n={n}: {} mono endo(s)", endos.len()));
    }
    Outcome {
        pass,
        detail: notes.join(", "),
    }
}

fn fixture_presheaves() -> Vec<Arc<Presheaf>> {
    let mut names: Vec<PathBuf> = std::fs::read_dir(fixtures_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| {
            p.extension().is_some_and(|x| x == "json") && !p.file_name().unwrap().to_string_lossy().starts_with("tm_")
        })
        .collect();
    names.sort();
    names
        .iter()
        .flat_map(|p| {
            Model::parse(&std::fs::read_to_string(p).unwrap())
                .unwrap()
                .presheaves
                .into_values()
        })
        .collect()
}

fn structural_certification() -> Outcome {
    let config = SuiteConfig::new(SEED);
    let fixtures = fixture_presheaves();
    let first = suite::run(&config, &fixtures).unwrap();
    let second = suite::run(&config, &fixtures).unwrap();
    let total: usize = first.checks.values().sum();
    let deterministic = first == second;
    Outcome {
        pass: first.passed() && deterministic,
        detail: format!(
            "{} fixture objects + {} random; {total} checks over {} properties; deterministic {deterministic}; failures {:?}",
            fixtures.len(),
            config.random_objects,
            first.checks.len(),
            first.failures
        ),
    }
}

#[test]
fn acceptance() {
    let criteria: [(&str, Duration, fn() -> Outcome); 10] = [
        ("mono counts into the automaton", Duration::from_secs(1), mono_counts),
        (
            "global elements and sub-automata",
            Duration::from_secs(1),
            global_elements_and_subobjects,
        ),
        (
            "omega is dedekind-finite",
            Duration::from_secs(600),
            omega_is_dedekind_finite,
        ),
        (
            "non-classical kuratowski witness",
            Duration::from_secs(60),
            kuratowski_witness_search,
        ),
        (
            "squire separation and monotonicity",
            Duration::from_secs(300),
            squire_separation,
        ),
        (
            "empty non-initial object and extensionality",
            Duration::from_secs(2),
            empty_object_and_extensionality,
        ),
        ("classical collapse in sets", Duration::from_secs(60), tarski_collapse),
        (
            "turing machine closure semantics",
            Duration::from_secs(60),
            tm_semantics,
        ),
        ("truncated identity monos", Duration::from_secs(60), truncated_identity),
        (
            "structural certification",
            Duration::from_secs(600),
            structural_certification,
        ),
    ];
    let mut failed = Vec::new();
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let pass = out.pass && took <= *limit;
        let status = if pass { "PASS" } else { "FAIL" };
        println!(
            "{status} [{}] {name} ({took:.2?}, limit {limit:?}): {}",
            i + 1,
            out.detail
        );
        if !pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
