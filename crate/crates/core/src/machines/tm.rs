use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value as Json};

use crate::error::{Result, ToposError};
use crate::finiteness::{decide, FinMode, Notion, Verdict};
use crate::limits::terminal;
use crate::nat::{enumerate_nat_trans_within, Filter};
use crate::presheaf::Presheaf;
use crate::subobject::subobject_lattice;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Move {
    L,
    R,
}

impl Move {
    fn offset(self) -> i64 {
        match self {
            Move::L => -1,
            Move::R => 1,
        }
    }
}

type Rule = (usize, usize, Move);

/// A nondeterministic machine `(Q, Σ, q0, qf, δ)` with `δ : Q×Σ → P(Q×Σ×{L,R})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TMSpec {
    states: Vec<String>,
    alphabet: Vec<String>,
    blank: usize,
    q0: usize,
    qf: usize,
    delta: BTreeMap<(usize, usize), Vec<Rule>>,
    fin: Notion,
}

/// JSON form: `delta` maps `"state,symbol"` to `[state, symbol, "L"|"R"]` triples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTm {
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub blank: String,
    pub q0: String,
    pub qf: String,
    pub delta: BTreeMap<String, Vec<(String, String, Move)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fin: Option<String>,
}

fn lookup(names: &[String], s: &str, what: &str) -> Result<usize> {
    names
        .iter()
        .position(|x| x == s)
        .ok_or_else(|| ToposError::Malformed(format!("unknown {what} `{s}`")))
}

impl TMSpec {
    pub fn from_raw(raw: &RawTm) -> Result<Self> {
        for (i, q) in raw.states.iter().enumerate() {
            if q.contains(',') {
                return Err(ToposError::Malformed(format!("state name `{q}` contains a comma")));
            }
            if raw.states[..i].contains(q) {
                return Err(ToposError::DuplicateName(q.clone()));
            }
        }
        for (i, s) in raw.alphabet.iter().enumerate() {
            if raw.alphabet[..i].contains(s) {
                return Err(ToposError::DuplicateName(s.clone()));
            }
        }
        let st = |s: &str| lookup(&raw.states, s, "state");
        let sym = |s: &str| lookup(&raw.alphabet, s, "symbol");
        let mut delta = BTreeMap::new();
        for (key, rules) in &raw.delta {
            let (q, s) = key
                .split_once(',')
                .ok_or_else(|| ToposError::Malformed(format!("transition key `{key}` is not `state,symbol`")))?;
            let mut rs: Vec<Rule> = rules
                .iter()
                .map(|(q2, s2, m)| Ok((st(q2)?, sym(s2)?, *m)))
                .collect::<Result<_>>()?;
            rs.sort();
            rs.dedup();
            if !rs.is_empty() {
                delta.insert((st(q)?, sym(s)?), rs);
            }
        }
        Ok(Self {
            blank: sym(&raw.blank)?,
            q0: st(&raw.q0)?,
            qf: st(&raw.qf)?,
            fin: raw
                .fin
                .as_deref()
                .map(str::parse)
                .transpose()?
                .unwrap_or(Notion::Kuratowski),
            states: raw.states.clone(),
            alphabet: raw.alphabet.clone(),
            delta,
        })
    }

    pub fn to_raw(&self) -> RawTm {
        RawTm {
            states: self.states.clone(),
            alphabet: self.alphabet.clone(),
            blank: self.alphabet[self.blank].clone(),
            q0: self.states[self.q0].clone(),
            qf: self.states[self.qf].clone(),
            delta: self
                .delta
                .iter()
                .map(|(&(q, s), rs)| {
                    let rs = rs
                        .iter()
                        .map(|&(q2, s2, m)| (self.states[q2].clone(), self.alphabet[s2].clone(), m))
                        .collect();
                    (format!("{},{}", self.states[q], self.alphabet[s]), rs)
                })
                .collect(),
            fin: Some(self.fin.to_string()),
        }
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn blank(&self) -> usize {
        self.blank
    }

    pub fn q0(&self) -> usize {
        self.q0
    }

    pub fn qf(&self) -> usize {
        self.qf
    }

    pub fn fin(&self) -> Notion {
        self.fin
    }

    pub fn rules(&self, q: usize, s: usize) -> &[Rule] {
        self.delta.get(&(q, s)).map_or(&[], Vec::as_slice)
    }

    pub fn is_deterministic(&self) -> bool {
        self.delta.values().all(|rs| rs.len() <= 1)
    }

    /// Symbols of a blank-free word, one per character.
    pub fn word(&self, w: &str) -> Result<Vec<usize>> {
        w.chars()
            .map(|ch| {
                let s = lookup(&self.alphabet, &ch.to_string(), "symbol")?;
                if s == self.blank {
                    return Err(ToposError::Malformed(format!("input `{w}` contains the blank")));
                }
                Ok(s)
            })
            .collect()
    }

    /// `⟨q0, 0, w⟩`.
    pub fn initial(&self, word: &[usize]) -> Configuration {
        let mut c = Configuration::blank(self.q0);
        for (i, &s) in word.iter().enumerate() {
            c.write(i as i64, s, self.blank);
        }
        c
    }
}

/// State, head position and tape. The tape holds `cells[i]` at position
/// `offset + i` and blanks elsewhere; `cells` never starts or ends with a
/// blank, so equal tapes have equal representations.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    pub state: usize,
    pub head: i64,
    offset: i64,
    cells: Vec<usize>,
}

/// Serialized tape: `cells[i]` sits at position `offset + i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tape {
    pub offset: i64,
    pub cells: Vec<String>,
}

impl Configuration {
    /// State `q`, head at 0, blank tape.
    pub fn blank(state: usize) -> Self {
        Self {
            state,
            head: 0,
            offset: 0,
            cells: Vec::new(),
        }
    }

    pub fn symbol_at(&self, pos: i64, blank: usize) -> usize {
        let i = pos - self.offset;
        if i < 0 {
            return blank;
        }
        self.cells.get(i as usize).copied().unwrap_or(blank)
    }

    pub fn read(&self, blank: usize) -> usize {
        self.symbol_at(self.head, blank)
    }

    /// Positions and symbols of the non-blank cells.
    pub fn non_blank(&self, blank: usize) -> impl Iterator<Item = (i64, usize)> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter(move |&(_, &s)| s != blank)
            .map(|(i, &s)| (self.offset + i as i64, s))
    }

    pub fn write(&mut self, pos: i64, s: usize, blank: usize) {
        if s == blank {
            let i = pos - self.offset;
            if i < 0 || i as usize >= self.cells.len() {
                return;
            }
            self.cells[i as usize] = blank;
            while self.cells.last() == Some(&blank) {
                self.cells.pop();
            }
            let lead = self.cells.iter().take_while(|&&x| x == blank).count();
            self.cells.drain(..lead);
            self.offset = if self.cells.is_empty() {
                0
            } else {
                self.offset + lead as i64
            };
            return;
        }
        if self.cells.is_empty() {
            self.offset = pos;
            self.cells.push(s);
            return;
        }
        if pos < self.offset {
            let grow = (self.offset - pos) as usize;
            self.cells.splice(0..0, std::iter::repeat_n(blank, grow));
            self.offset = pos;
        }
        let i = (pos - self.offset) as usize;
        if i >= self.cells.len() {
            self.cells.resize(i + 1, blank);
        }
        self.cells[i] = s;
    }

    /// The tape from its first to its last non-blank cell.
    pub fn content(&self, t: &TMSpec) -> Tape {
        let cells = self.cells.iter().map(|&s| t.alphabet[s].clone()).collect();
        Tape {
            offset: self.offset,
            cells,
        }
    }

    pub fn to_json(&self, t: &TMSpec) -> Json {
        json!({ "state": t.states[self.state], "head": self.head, "tape": self.content(t) })
    }

    pub fn from_json(t: &TMSpec, j: &Json) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct RawConfig {
            state: String,
            head: i64,
            tape: Tape,
        }
        let raw: RawConfig = serde_json::from_value(j.clone()).map_err(|e| ToposError::Malformed(e.to_string()))?;
        let mut c = Configuration::blank(lookup(&t.states, &raw.state, "state")?);
        c.head = raw.head;
        for (i, s) in raw.tape.cells.iter().enumerate() {
            c.write(raw.tape.offset + i as i64, lookup(&t.alphabet, s, "symbol")?, t.blank);
        }
        Ok(c)
    }
}

pub type ConfigSet = BTreeSet<Configuration>;

/// Every successor of `c` under one application of `δ`.
pub fn tm_step(t: &TMSpec, c: &Configuration) -> ConfigSet {
    t.rules(c.state, c.read(t.blank))
        .iter()
        .map(|&(q, s, m)| {
            let mut next = c.clone();
            next.write(c.head, s, t.blank);
            next.state = q;
            next.head += m.offset();
            next
        })
        .collect()
}

/// `δ̂(init)`, or the part of it found before the budget bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Closure {
    pub configs: ConfigSet,
    pub exhausted: bool,
    pub budget: usize,
}

/// Least superset of `init` closed under `tm_step`, holding at most `budget`
/// configurations beyond `init`'s own.
pub fn tm_closure(t: &TMSpec, init: &ConfigSet, budget: usize) -> Result<Closure> {
    if budget == 0 {
        return Err(ToposError::Malformed("closure budget must be positive".into()));
    }
    let mut configs = init.clone();
    let mut frontier = init.clone();
    let mut exhausted = false;
    while !frontier.is_empty() {
        let mut fresh = ConfigSet::new();
        for c in &frontier {
            fresh.extend(tm_step(t, c).into_iter().filter(|n| !configs.contains(n)));
        }
        for c in &fresh {
            if configs.len() >= budget.max(init.len()) {
                exhausted = true;
                break;
            }
            configs.insert(c.clone());
        }
        if exhausted {
            break;
        }
        frontier = fresh;
    }
    Ok(Closure {
        configs,
        exhausted,
        budget,
    })
}

/// `{(x, y) | ⟨qf, _, y⟩ ∈ δ̂⟨q0, 0, x⟩}` over the given inputs.
pub fn tm_computed_relation(t: &TMSpec, inputs: &[&str], budget: usize) -> Result<BTreeSet<(String, String)>> {
    let mut out = BTreeSet::new();
    for &x in inputs {
        let init = ConfigSet::from([t.initial(&t.word(x)?)]);
        let cl = tm_closure(t, &init, budget)?;
        if cl.exhausted {
            return Err(ToposError::BudgetExhausted {
                what: format!("the closure on input `{x}`"),
                budget,
            });
        }
        for c in cl.configs.iter().filter(|c| c.state == t.qf) {
            out.insert((x.to_string(), c.content(t).cells.concat()));
        }
    }
    Ok(out)
}

/// Classical machines at each stage of a base, whose states and symbols
/// form presheaves `Q` and `Σ`.
#[derive(Debug, Clone)]
pub struct InternalMachine {
    pub states: Arc<Presheaf>,
    pub alphabet: Arc<Presheaf>,
    pub stages: Vec<TMSpec>,
    pub fin: Notion,
}

#[derive(Debug, Clone)]
pub struct StageClosure {
    pub stage: String,
    pub size: usize,
    pub exhausted: bool,
}

#[derive(Debug, Clone)]
pub struct InternalReport {
    pub fin_states: Verdict,
    pub fin_alphabet: Verdict,
    pub closures: Vec<StageClosure>,
    /// Every arrow carries the closure at its domain into the closure at its
    /// codomain.
    pub natural: bool,
    pub global_states: usize,
    pub state_subobjects: usize,
    /// Non-empty proper subobjects of `Q` outnumber its global elements.
    pub contrast: bool,
}

impl InternalReport {
    pub fn to_json(&self) -> Json {
        json!({
            "fin_states": self.fin_states.to_json(),
            "fin_alphabet": self.fin_alphabet.to_json(),
            "closures": self.closures.iter().map(|c| json!({
                "stage": c.stage, "size": c.size, "exhausted": c.exhausted,
            })).collect::<Vec<_>>(),
            "natural": self.natural,
            "global_states": self.global_states,
            "state_subobjects": self.state_subobjects,
            "contrast": self.contrast,
        })
    }
}

fn act_config(q: &Presheaf, s: &Presheaf, blank: usize, f: usize, c: &Configuration) -> Configuration {
    let mut out = Configuration::blank(q.act(f, c.state));
    out.head = c.head;
    for (p, x) in c.non_blank(blank) {
        out.write(p, s.act(f, x), blank);
    }
    out
}

impl InternalMachine {
    /// Stage `c` must use the carriers `Q(c)`, `Σ(c)`, and every arrow must
    /// carry each stage's table into the next.
    pub fn check(&self) -> Result<()> {
        let cat = self.states.base().clone();
        if !self.states.same_base(&self.alphabet) {
            return Err(ToposError::BaseMismatch);
        }
        if self.stages.len() != cat.num_objects() {
            return Err(ToposError::Malformed(format!(
                "{} stage machines for {} objects",
                self.stages.len(),
                cat.num_objects()
            )));
        }
        for (c, t) in self.stages.iter().enumerate() {
            if t.states != self.states.carrier(c) || t.alphabet != self.alphabet.carrier(c) {
                return Err(ToposError::Malformed(format!(
                    "machine at `{}` does not use the carriers of Q and Σ",
                    cat.objects()[c]
                )));
            }
        }
        let (q, s) = (&self.states, &self.alphabet);
        for (f, arr) in cat.arrows().iter().enumerate() {
            let (tc, td) = (&self.stages[arr.dom], &self.stages[arr.cod]);
            let violation = |detail: String| ToposError::EquivarianceViolation {
                arrow: arr.name.clone(),
                detail,
            };
            for (what, x, y, p) in [
                ("blank", tc.blank, td.blank, s),
                ("q0", tc.q0, td.q0, q),
                ("qf", tc.qf, td.qf, q),
            ] {
                if p.act(f, x) != y {
                    return Err(violation(format!("{what} is not preserved")));
                }
            }
            for qc in 0..tc.states.len() {
                for sc in 0..tc.alphabet.len() {
                    let image: BTreeSet<Rule> = tc
                        .rules(qc, sc)
                        .iter()
                        .map(|&(q2, s2, m)| (q.act(f, q2), s.act(f, s2), m))
                        .collect();
                    let there: BTreeSet<Rule> = td.rules(q.act(f, qc), s.act(f, sc)).iter().copied().collect();
                    if image != there {
                        return Err(violation(format!(
                            "δ({}, {}) is not carried to δ({}, {})",
                            tc.states[qc],
                            tc.alphabet[sc],
                            td.states[q.act(f, qc)],
                            td.alphabet[s.act(f, sc)]
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Checks the stage-wise machine, decides finiteness of `Q` and `Σ`, runs the
/// closure of each input at every stage and compares the internal and
/// external views of the state object.
pub fn tm_internal_demo(m: &InternalMachine, inputs: &[&str], budget: usize) -> Result<InternalReport> {
    m.check()?;
    let cat = m.states.base().clone();
    let mut closures = Vec::new();
    let mut sets = Vec::new();
    for (c, t) in m.stages.iter().enumerate() {
        let init: ConfigSet = inputs
            .iter()
            .map(|w| Ok(t.initial(&t.word(w)?)))
            .collect::<Result<_>>()?;
        let cl = tm_closure(t, &init, budget)?;
        closures.push(StageClosure {
            stage: cat.objects()[c].clone(),
            size: cl.configs.len(),
            exhausted: cl.exhausted,
        });
        sets.push(cl.configs);
    }
    let natural = cat.arrows().iter().enumerate().all(|(f, arr)| {
        let blank = m.stages[arr.cod].blank;
        sets[arr.dom]
            .iter()
            .all(|c| sets[arr.cod].contains(&act_config(&m.states, &m.alphabet, blank, f, c)))
    });
    let global_states = enumerate_nat_trans_within(&terminal(&cat), &m.states, Filter::All, budget)?.len();
    let state_subobjects = subobject_lattice(&m.states, budget)?.len();
    let proper = state_subobjects.saturating_sub(if m.states.total_size() == 0 { 1 } else { 2 });
    Ok(InternalReport {
        fin_states: decide(&m.states, m.fin, FinMode::Internal, budget)?,
        fin_alphabet: decide(&m.alphabet, m.fin, FinMode::Internal, budget)?,
        closures,
        natural,
        global_states,
        state_subobjects,
        contrast: proper > global_states,
    })
}

/// A random machine with at most `max_states` states and `max_symbols`
/// symbols (blank included), and up to two rules per pair.
pub fn random_tm(rng: &mut impl rand::Rng, max_states: usize, max_symbols: usize) -> TMSpec {
    let nq = rng.gen_range(1..=max_states.max(1));
    let ns = rng.gen_range(1..=max_symbols.max(1));
    let mut delta = BTreeMap::new();
    for q in 0..nq {
        for s in 0..ns {
            let mut rs: Vec<Rule> = (0..rng.gen_range(0..=2))
                .map(|_| {
                    (
                        rng.gen_range(0..nq),
                        rng.gen_range(0..ns),
                        if rng.gen_bool(0.5) { Move::L } else { Move::R },
                    )
                })
                .collect();
            rs.sort();
            rs.dedup();
            if !rs.is_empty() {
                delta.insert((q, s), rs);
            }
        }
    }
    TMSpec {
        states: (0..nq).map(|i| format!("q{i}")).collect(),
        alphabet: std::iter::once(" ".to_string())
            .chain((1..ns).map(|i| i.to_string()))
            .collect(),
        blank: 0,
        q0: 0,
        qf: nq - 1,
        delta,
        fin: Notion::Kuratowski,
    }
}
