use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::category::{monoid_to_category, FinMonoid};
use crate::error::{Result, ToposError};
use crate::presheaf::Presheaf;

/// A complete deterministic automaton; `delta[letter][state]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    name: String,
    states: Vec<String>,
    alphabet: Vec<String>,
    delta: Vec<Vec<usize>>,
    initial: Option<usize>,
    finals: Vec<usize>,
}

/// JSON form: `delta` maps `"state,letter"` to a state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAutomaton {
    #[serde(default)]
    pub name: Option<String>,
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub delta: BTreeMap<String, String>,
    #[serde(default)]
    pub initial: Option<String>,
    #[serde(default, rename = "final")]
    pub finals: Vec<String>,
}

fn position(names: &[String], s: &str) -> Result<usize> {
    names
        .iter()
        .position(|x| x == s)
        .ok_or_else(|| ToposError::UnknownName(s.to_string()))
}

fn check_distinct(names: &[String]) -> Result<()> {
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(ToposError::DuplicateName(n.clone()));
        }
    }
    Ok(())
}

impl Automaton {
    pub fn new(name: &str, states: &[&str], alphabet: &[&str], transitions: &[(&str, &str, &str)]) -> Result<Self> {
        let raw = RawAutomaton {
            name: Some(name.to_string()),
            states: states.iter().map(|s| s.to_string()).collect(),
            alphabet: alphabet.iter().map(|s| s.to_string()).collect(),
            delta: transitions
                .iter()
                .map(|(q, a, r)| (format!("{q},{a}"), r.to_string()))
                .collect(),
            initial: None,
            finals: Vec::new(),
        };
        Self::from_raw(&raw)
    }

    pub fn from_raw(raw: &RawAutomaton) -> Result<Self> {
        check_distinct(&raw.states)?;
        check_distinct(&raw.alphabet)?;
        let mut delta = vec![vec![usize::MAX; raw.states.len()]; raw.alphabet.len()];
        for (key, target) in &raw.delta {
            let (q, a) = key
                .rsplit_once(',')
                .ok_or_else(|| ToposError::Malformed(format!("transition key `{key}` is not `state,letter`")))?;
            delta[position(&raw.alphabet, a)?][position(&raw.states, q)?] = position(&raw.states, target)?;
        }
        for (l, row) in delta.iter().enumerate() {
            if let Some(q) = row.iter().position(|&r| r == usize::MAX) {
                return Err(ToposError::Malformed(format!(
                    "no transition from `{}` on `{}`",
                    raw.states[q], raw.alphabet[l]
                )));
            }
        }
        Ok(Self {
            name: raw.name.clone().unwrap_or_else(|| "automaton".into()),
            initial: raw.initial.as_deref().map(|q| position(&raw.states, q)).transpose()?,
            finals: raw
                .finals
                .iter()
                .map(|q| position(&raw.states, q))
                .collect::<Result<_>>()?,
            states: raw.states.clone(),
            alphabet: raw.alphabet.clone(),
            delta,
        })
    }

    pub fn to_raw(&self) -> RawAutomaton {
        let mut delta = BTreeMap::new();
        for (l, row) in self.delta.iter().enumerate() {
            for (q, &r) in row.iter().enumerate() {
                delta.insert(
                    format!("{},{}", self.states[q], self.alphabet[l]),
                    self.states[r].clone(),
                );
            }
        }
        RawAutomaton {
            name: Some(self.name.clone()),
            states: self.states.clone(),
            alphabet: self.alphabet.clone(),
            delta,
            initial: self.initial.map(|q| self.states[q].clone()),
            finals: self.finals.iter().map(|&q| self.states[q].clone()).collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn step(&self, q: usize, letter: usize) -> usize {
        self.delta[letter][q]
    }

    pub fn initial(&self) -> Option<usize> {
        self.initial
    }

    pub fn finals(&self) -> &[usize] {
        &self.finals
    }
}

/// The transition monoid of `a` and its states as a right action.
/// Elements are named by their shortlex-least word, `ε` for the empty word.
pub fn automaton_to_mset(a: &Automaton) -> Result<(FinMonoid, Arc<Presheaf>)> {
    let (m, mut ps) = joint_mset(&[a])?;
    Ok((m, ps.remove(0)))
}

/// One monoid acting on all the automata at once: the transition monoid of
/// their disjoint union. Equivariant maps between the resulting presheaves
/// are exactly the letter-preserving maps between the automata.
pub fn joint_mset(automata: &[&Automaton]) -> Result<(FinMonoid, Vec<Arc<Presheaf>>)> {
    let Some(first) = automata.first() else {
        return Err(ToposError::Malformed("no automata given".into()));
    };
    let alphabet = first.alphabet.clone();
    let mut offsets = Vec::new();
    let mut total = 0;
    for a in automata {
        if a.alphabet != alphabet {
            return Err(ToposError::Malformed(format!("`{}` has a different alphabet", a.name)));
        }
        offsets.push(total);
        total += a.states.len();
    }
    let letter_fn = |l: usize| -> Vec<usize> {
        automata
            .iter()
            .zip(&offsets)
            .flat_map(|(a, &o)| a.delta[l].iter().map(move |&r| r + o))
            .collect()
    };
    let letters: Vec<Vec<usize>> = (0..alphabet.len()).map(letter_fn).collect();
    let mut funs: Vec<Vec<usize>> = vec![(0..total).collect()];
    let mut names = vec!["ε".to_string()];
    let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(funs[0].clone(), 0)]);
    let mut queue = VecDeque::from([0]);
    while let Some(i) = queue.pop_front() {
        for (l, lf) in letters.iter().enumerate() {
            // the word `w` followed by letter `l` acts as `lf ∘ f_w`
            let next: Vec<usize> = funs[i].iter().map(|&x| lf[x]).collect();
            if !index.contains_key(&next) {
                index.insert(next.clone(), funs.len());
                let w = if i == 0 { String::new() } else { names[i].clone() };
                names.push(format!("{w}{}", alphabet[l]));
                funs.push(next);
                queue.push_back(funs.len() - 1);
            }
        }
    }
    let n = funs.len();
    let mut table = vec![0; n * n];
    for u in 0..n {
        for v in 0..n {
            let uv: Vec<usize> = funs[u].iter().map(|&x| funs[v][x]).collect();
            table[u * n + v] = index[&uv];
        }
    }
    let monoid = FinMonoid::new(names, 0, table)?;
    let base = Arc::new(monoid_to_category(&monoid));
    let presheaves = automata
        .iter()
        .zip(&offsets)
        .map(|(a, &o)| {
            let action = funs
                .iter()
                .map(|f| a.states.iter().enumerate().map(|(q, _)| f[q + o] - o).collect())
                .collect();
            Presheaf::new(&a.name, base.clone(), vec![a.states.clone()], action).map(Arc::new)
        })
        .collect::<Result<_>>()?;
    Ok((monoid, presheaves))
}

/// The four-state automaton on `{a, b, c}` with `q4` absorbing.
pub fn figure1() -> Automaton {
    Automaton::new(
        "A",
        &["q1", "q2", "q3", "q4"],
        &["a", "b", "c"],
        &[
            ("q1", "a", "q2"),
            ("q2", "a", "q4"),
            ("q3", "a", "q4"),
            ("q4", "a", "q4"),
            ("q1", "b", "q2"),
            ("q2", "b", "q3"),
            ("q3", "b", "q3"),
            ("q4", "b", "q4"),
            ("q1", "c", "q3"),
            ("q2", "c", "q2"),
            ("q3", "c", "q2"),
            ("q4", "c", "q4"),
        ],
    )
    .expect("fixture")
}

/// The one-, two- and three-state automata probed for monos into [`figure1`].
pub fn figure1_probe(states: usize) -> Automaton {
    let loops = [("X", "a", "X"), ("X", "b", "X"), ("X", "c", "X")];
    let (name, qs, extra): (&str, &[&str], &[(&str, &str, &str)]) = match states {
        1 => ("B1", &["X"], &[]),
        2 => ("B2", &["X", "Y"], &[("Y", "a", "X"), ("Y", "b", "X"), ("Y", "c", "Y")]),
        3 => (
            "B3",
            &["X", "Y", "Z"],
            &[
                ("Y", "a", "X"),
                ("Y", "b", "Z"),
                ("Y", "c", "Y"),
                ("Z", "a", "X"),
                ("Z", "b", "Z"),
                ("Z", "c", "Y"),
            ],
        ),
        _ => panic!("probes have one to three states"),
    };
    let transitions: Vec<_> = loops.iter().chain(extra).copied().collect();
    Automaton::new(name, qs, &["a", "b", "c"], &transitions).expect("fixture")
}

/// `{a_1..a_n, b_1..b_n}` under `(2^[n], ∪)`: `T` sends `a_k` to `b_k` for
/// `k ∈ T` and fixes the rest.
pub fn truncated_free_action(n: usize) -> Arc<Presheaf> {
    assert!(n >= 1, "truncation needs n >= 1");
    let size = 1usize << n;
    let subset_name = |t: usize| {
        let ks: Vec<String> = (0..n)
            .filter(|k| t >> k & 1 == 1)
            .map(|k| (k + 1).to_string())
            .collect();
        format!("{{{}}}", ks.join(","))
    };
    let names = (0..size).map(subset_name).collect();
    let table = (0..size * size).map(|i| (i / size) | (i % size)).collect();
    let monoid = FinMonoid::new(names, 0, table).expect("union is a monoid");
    let base = Arc::new(monoid_to_category(&monoid));
    let carrier = (1..=n)
        .map(|k| format!("a{k}"))
        .chain((1..=n).map(|k| format!("b{k}")))
        .collect();
    let action = (0..size)
        .map(|t| {
            (0..2 * n)
                .map(|x| if x < n && t >> x & 1 == 1 { x + n } else { x })
                .collect()
        })
        .collect();
    Arc::new(Presheaf::new(format!("C{n}"), base, vec![carrier], action).expect("union action"))
}
