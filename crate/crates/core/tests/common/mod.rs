#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use rand::Rng;

use toposbench_core::machines::*;
use toposbench_core::Presheaf;

pub fn fixture(name: &str) -> TMSpec {
    let path = format!("{}/../../fixtures/{name}.json", env!("CARGO_MANIFEST_DIR"));
    let raw: RawTm = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    TMSpec::from_raw(&raw).unwrap()
}

pub fn random_machine(rng: &mut impl Rng) -> TMSpec {
    let nq = rng.gen_range(1..=4);
    let ns = rng.gen_range(1..=4);
    let states: Vec<String> = (0..nq).map(|i| format!("q{i}")).collect();
    let alphabet: Vec<String> = std::iter::once(" ".to_string())
        .chain((1..ns).map(|i| i.to_string()))
        .collect();
    let mut delta = BTreeMap::new();
    for q in &states {
        for s in &alphabet {
            let k = rng.gen_range(0..=2);
            let rules = (0..k)
                .map(|_| {
                    let m = if rng.gen_bool(0.5) { Move::L } else { Move::R };
                    (
                        states[rng.gen_range(0..nq)].clone(),
                        alphabet[rng.gen_range(0..ns)].clone(),
                        m,
                    )
                })
                .collect();
            delta.insert(format!("{q},{s}"), rules);
        }
    }
    let raw = RawTm {
        q0: states[0].clone(),
        qf: states[nq - 1].clone(),
        states,
        alphabet,
        blank: " ".into(),
        delta,
        fin: None,
    };
    TMSpec::from_raw(&raw).unwrap()
}

pub fn random_init(t: &TMSpec, rng: &mut impl Rng) -> ConfigSet {
    let ns = t.alphabet().len();
    (0..rng.gen_range(1..=2))
        .map(|_| {
            let word: Vec<usize> = if ns > 1 {
                (0..rng.gen_range(0..=3)).map(|_| rng.gen_range(1..ns)).collect()
            } else {
                vec![]
            };
            t.initial(&word)
        })
        .collect()
}

/// One step, written against the raw rule table.
pub fn oracle_step(t: &TMSpec, c: &Configuration) -> Vec<Configuration> {
    let blank = t.blank();
    let sym = c.symbol_at(c.head, blank);
    t.rules(c.state, sym)
        .iter()
        .map(|&(q, s, m)| {
            let mut n = c.clone();
            n.write(c.head, s, blank);
            n.state = q;
            n.head += if m == Move::L { -1 } else { 1 };
            n
        })
        .collect()
}

/// Plain queue-based reachability, stopping once `cap` configurations are known.
pub fn bfs(t: &TMSpec, init: &ConfigSet, cap: usize) -> (HashSet<Configuration>, bool) {
    let mut seen: HashSet<Configuration> = init.iter().cloned().collect();
    let mut queue: VecDeque<Configuration> = init.iter().cloned().collect();
    while let Some(c) = queue.pop_front() {
        for n in oracle_step(t, &c) {
            if seen.insert(n.clone()) {
                if seen.len() > cap {
                    return (seen, false);
                }
                queue.push_back(n);
            }
        }
    }
    (seen, true)
}

/// Subsets of the disjoint union of carriers closed under every arrow,
/// found by trying all of them.
pub fn closed_subsets(p: &Presheaf) -> BTreeSet<Vec<(usize, usize)>> {
    let base = p.base();
    let slots: Vec<(usize, usize)> = (0..base.num_objects())
        .flat_map(|c| (0..p.size(c)).map(move |x| (c, x)))
        .collect();
    let mut out = BTreeSet::new();
    for mask in 0u32..(1 << slots.len()) {
        let chosen: BTreeSet<(usize, usize)> = slots
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, s)| *s)
            .collect();
        let closed = chosen.iter().all(|&(c, x)| {
            (0..base.num_arrows())
                .filter(|&f| base.arrow(f).dom == c)
                .all(|f| chosen.contains(&(base.arrow(f).cod, p.act(f, x))))
        });
        if closed {
            out.insert(chosen.into_iter().collect());
        }
    }
    out
}

/// Kuratowski-finiteness read off the carriers: every arrow acts surjectively.
pub fn surjective_actions(p: &Presheaf) -> bool {
    let base = p.base();
    (0..base.num_arrows()).all(|f| {
        let image: BTreeSet<usize> = p.action(f).iter().copied().collect();
        image.len() == p.size(base.arrow(f).cod)
    })
}
