//! Dedekind, Kuratowski and Squire `L_p` finiteness, internally and
//! externally.

use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;
use std::sync::Arc;

use serde_json::{json, Value as Json};

use crate::error::{Result, ToposError};
use crate::exponential::exponential;
use crate::limits::{coproduct, product, Product};
use crate::logic::{compile, parse_formula, Carrier, LType, Mode, Signature, TruthValue, Universe, Value};
use crate::nat::{enumerate_nat_trans_within, Filter, NatTrans, DEFAULT_BUDGET};
use crate::presheaf::Presheaf;
use crate::subobject::{subobject_lattice, Subfunctor};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Notion {
    Dedekind,
    Kuratowski,
    Lp(usize),
}

impl fmt::Display for Notion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Notion::Dedekind => write!(f, "dedekind"),
            Notion::Kuratowski => write!(f, "kuratowski"),
            Notion::Lp(p) => write!(f, "lp:{p}"),
        }
    }
}

impl std::str::FromStr for Notion {
    type Err = ToposError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dedekind" => Ok(Notion::Dedekind),
            "kuratowski" => Ok(Notion::Kuratowski),
            _ => s
                .strip_prefix("lp:")
                .and_then(|p| p.parse().ok())
                .filter(|&p| p >= 1)
                .map(Notion::Lp)
                .ok_or_else(|| ToposError::Malformed(format!("unknown finiteness notion `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FinMode {
    Internal,
    External,
}

impl fmt::Display for FinMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FinMode::Internal => "internal",
            FinMode::External => "external",
        })
    }
}

/// Outcome of a finiteness decision, serializable as a report.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub notion: Notion,
    pub mode: FinMode,
    pub object: String,
    pub verdict: bool,
    pub witness: Option<BTreeMap<String, Vec<String>>>,
    pub truth_value: Option<TruthValue>,
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn to_json(&self) -> Json {
        let mut j = json!({
            "notion": self.notion.to_string(),
            "mode": self.mode.to_string(),
            "object": self.object,
            "verdict": self.verdict,
        });
        if let Some(w) = &self.witness {
            j["witness"] = json!(w);
        }
        if let Some(tv) = &self.truth_value {
            j["truth_value"] = json!(tv.sieves());
        }
        if !self.notes.is_empty() {
            j["notes"] = json!(self.notes);
        }
        j
    }
}

/// A binary operation `host × host → host`.
#[derive(Debug, Clone)]
pub struct BinaryOp {
    pub product: Product,
    pub map: NatTrans,
}

/// Generators inside a host, with the operations to close under.
#[derive(Debug, Clone)]
pub struct ClosureSpec {
    pub host: Arc<Presheaf>,
    pub generators: Subfunctor,
    pub operations: Vec<BinaryOp>,
}

/// Least subfunctor containing the generators and closed under every
/// operation, stage by stage.
pub fn closure_subobject(spec: &ClosureSpec) -> Subfunctor {
    let host = &spec.host;
    let cat = host.base().clone();
    let n = cat.num_objects();
    let mut part: Vec<Vec<bool>> = (0..n).map(|c| vec![false; host.size(c)]).collect();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut stack: Vec<(usize, usize)> = host
        .elements()
        .filter(|&(c, x)| spec.generators.contains(c, x))
        .collect();
    while let Some((c, x)) = stack.pop() {
        if part[c][x] {
            continue;
        }
        part[c][x] = true;
        members[c].push(x);
        for &f in cat.out_of(c) {
            stack.push((cat.arrow(f).cod, host.act(f, x)));
        }
        for op in &spec.operations {
            for &y in &members[c] {
                stack.push((c, op.map.apply(c, op.product.index(c, x, y))));
                stack.push((c, op.map.apply(c, op.product.index(c, y, x))));
            }
        }
    }
    Subfunctor::new(host.clone(), part).expect("closure is action-closed")
}

/// `Ω^A` as seen by the evaluator, with the internal operations on it.
pub struct PowerObject<'s> {
    pub universe: Universe<'s>,
    pub carrier: Rc<Carrier>,
    pub a: Arc<Presheaf>,
    /// Stage of each slot of a stage-`c` family.
    slot_stage: Vec<Vec<usize>>,
}

const GROUND: &str = "A";

pub fn single_signature(a: &Arc<Presheaf>) -> Result<Signature> {
    Signature::new(a.base().clone()).with_ground(GROUND, a.clone())
}

impl<'s> PowerObject<'s> {
    pub fn new(sig: &'s Signature, budget: usize) -> Result<Self> {
        let universe = Universe::with_budget(sig, budget)?;
        let carrier = universe.carrier_of(&LType::power(LType::ground(GROUND)))?;
        let a = sig.ground(GROUND)?.clone();
        let cat = a.base().clone();
        let n = cat.num_objects();
        let slot_stage = (0..n)
            .map(|c| {
                (0..n)
                    .flat_map(|d| std::iter::repeat_n(d, cat.hom(c, d).len() * a.size(d)))
                    .collect()
            })
            .collect();
        Ok(Self {
            universe,
            carrier,
            a,
            slot_stage,
        })
    }

    pub fn host(&self) -> &Arc<Presheaf> {
        &self.carrier.presheaf
    }

    fn family(&self, c: usize, mut value: impl FnMut(usize, usize, usize) -> usize) -> usize {
        let cat = self.a.base();
        let mut fam = Vec::new();
        for d in 0..cat.num_objects() {
            for &f in cat.hom(c, d) {
                for b in 0..self.a.size(d) {
                    fam.push(Value::Idx(value(d, f, b) as u32));
                }
            }
        }
        self.carrier.index_of(c, &Value::Fam(fam.into()))
    }

    pub fn empty(&self, c: usize) -> usize {
        self.family(c, |d, _, _| self.universe.omega.bottom_index(d))
    }

    pub fn top(&self, c: usize) -> usize {
        self.family(c, |d, _, _| self.universe.omega.top_index(d))
    }

    /// The internal singleton `{a}` for `a ∈ A(c)`.
    pub fn singleton(&self, c: usize, a: usize) -> usize {
        let cat = self.a.base().clone();
        let om = &self.universe.omega;
        self.family(c, |d, f, b| {
            let fa = self.a.act(f, a);
            let mask = cat
                .out_of(d)
                .iter()
                .filter(|&&g| self.a.act(g, fa) == self.a.act(g, b))
                .fold(0u64, |m, &g| m | (1 << g));
            om.sieve_index(d, mask)
        })
    }

    /// The global element of `Ω^A` naming a subfunctor of `A`, per stage.
    pub fn name_of(&self, s: &Subfunctor) -> Vec<usize> {
        let chi = self.universe.omega.classify(s);
        (0..self.a.base().num_objects())
            .map(|c| self.family(c, |d, _, b| chi.apply(d, b)))
            .collect()
    }

    pub fn union(&self) -> Result<BinaryOp> {
        self.pointwise(|om, d, x, y| om.join(d, x, y))
    }

    pub fn intersection(&self) -> Result<BinaryOp> {
        self.pointwise(|om, d, x, y| om.meet(d, x, y))
    }

    fn pointwise(&self, op: impl Fn(&crate::omega::OmegaStructure, usize, usize, usize) -> usize) -> Result<BinaryOp> {
        let host = self.host();
        let prod = product(host, host)?;
        let om = &self.universe.omega;
        let cat = self.a.base();
        let comps = (0..cat.num_objects())
            .map(|c| {
                let vals = self.carrier.values(c);
                let mut comp = vec![0; vals.len() * vals.len()];
                for (i, vi) in vals.iter().enumerate() {
                    for (j, vj) in vals.iter().enumerate() {
                        let fam: Rc<[Value]> = match (vi, vj) {
                            (Value::Fam(x), Value::Fam(y)) => x
                                .iter()
                                .zip(y.iter())
                                .zip(&self.slot_stage[c])
                                .map(|((x, y), &d)| Value::Idx(op(om, d, x.idx(), y.idx()) as u32))
                                .collect(),
                            _ => unreachable!("power object values are families"),
                        };
                        comp[prod.index(c, i, j)] = self.carrier.index_of(c, &Value::Fam(fam));
                    }
                }
                comp
            })
            .collect();
        let map = NatTrans::new(prod.object.clone(), host.clone(), comps)?;
        Ok(BinaryOp { product: prod, map })
    }

    /// Whether the top family lies in `s` at every stage.
    pub fn contains_top(&self, s: &Subfunctor) -> bool {
        (0..self.a.base().num_objects()).all(|c| s.contains(c, self.top(c)))
    }
}

/// `K(A)` and whether `⌜id_A⌝` factors through it.
#[derive(Debug, Clone)]
pub struct KuratowskiResult {
    pub finite: bool,
    pub k: Subfunctor,
}

pub fn kuratowski(a: &Arc<Presheaf>) -> Result<KuratowskiResult> {
    kuratowski_within(a, DEFAULT_BUDGET)
}

pub fn kuratowski_within(a: &Arc<Presheaf>, budget: usize) -> Result<KuratowskiResult> {
    let sig = single_signature(a)?;
    let pw = PowerObject::new(&sig, budget)?;
    let host = pw.host().clone();
    let mut seeds = Vec::new();
    for c in 0..a.base().num_objects() {
        seeds.push((c, pw.empty(c)));
        seeds.extend((0..a.size(c)).map(|x| (c, pw.singleton(c, x))));
    }
    let spec = ClosureSpec {
        generators: Subfunctor::generated_by(&host, seeds),
        host,
        operations: vec![pw.union()?],
    };
    let k = closure_subobject(&spec);
    Ok(KuratowskiResult {
        finite: pw.contains_top(&k),
        k,
    })
}

/// The forcing condition of the defining sentence read off stage by stage:
/// every arrow acts surjectively.
pub fn kuratowski_stagewise(a: &Presheaf) -> bool {
    let cat = a.base();
    (0..cat.num_arrows()).all(|f| {
        let mut hit = vec![false; a.size(cat.arrow(f).cod)];
        a.action(f).iter().for_each(|&y| hit[y] = true);
        hit.into_iter().all(|h| h)
    })
}

/// Largest `Ω^A` the deciders materialize before using
/// [`kuratowski_stagewise`] instead.
pub const CLOSURE_CAP: usize = 50_000;

pub const KURATOWSKI_SENTENCE: &str = "forall z:P(P(A)). (empty[A] in z /\\ (forall a:A. {x:A | x = a} in z) \
     /\\ (forall y:P(A). forall w:P(A). (y in z /\\ w in z) => y union w in z)) => A in z";

/// The defining sentence evaluated directly; only tractable for tiny objects.
pub fn kuratowski_direct(a: &Arc<Presheaf>, mode: Mode) -> Result<(bool, TruthValue)> {
    let sig = single_signature(a)?;
    let u = Universe::new(&sig)?;
    let tv = u.truth(&parse_formula(KURATOWSKI_SENTENCE)?, mode)?;
    Ok((tv.is_top, tv))
}

pub const DEDEKIND_SENTENCE: &str =
    "forall f:A -> A. (forall h:A -> A. forall g:A -> A. comp(f, h) = comp(f, g) => h = g) \
     => exists k:A -> A. comp(f, k) = id[A] /\\ comp(k, f) = id[A]";

pub fn dedekind_internal(a: &Arc<Presheaf>, mode: Mode, budget: usize) -> Result<(bool, TruthValue)> {
    let sig = single_signature(a)?;
    let u = Universe::with_budget(&sig, budget)?;
    let tv = u.truth(&parse_formula(DEDEKIND_SENTENCE)?, mode)?;
    Ok((tv.is_top, tv))
}

/// Largest stage of `A^A` on which [`dedekind`] evaluates the sentence.
pub const SENTENCE_CAP: usize = 60;

/// Per stage `d`: every element of `A^A(d)` that is injective in each slot
/// has a two-sided inverse in `A^A(d)`. This is the Kripke–Joyal reading of
/// the Dedekind sentence with `mono` and `iso` unfolded.
pub fn dedekind_stagewise(a: &Arc<Presheaf>, budget: usize) -> Result<Vec<bool>> {
    let e = exponential(a, a, budget)?;
    let cat = a.base();
    let mut ok = Vec::with_capacity(cat.num_objects());
    for d in 0..cat.num_objects() {
        let slots = e.slots(d);
        let mut stage_ok = true;
        for theta in 0..e.object.size(d) {
            let fam = e.family(d, theta);
            let mut inverse = vec![usize::MAX; fam.len()];
            let mut injective = true;
            for (i, &(_, x)) in slots.iter().enumerate() {
                let y = fam[i];
                let j = i - x + y;
                if inverse[j] != usize::MAX {
                    injective = false;
                    break;
                }
                inverse[j] = x;
            }
            if !injective {
                continue;
            }
            if inverse.contains(&usize::MAX) || e.find(d, &inverse).is_none() {
                stage_ok = false;
                break;
            }
        }
        ok.push(stage_ok);
    }
    Ok((0..cat.num_objects())
        .map(|c| (0..cat.num_objects()).all(|d| cat.hom(c, d).is_empty() || ok[d]))
        .collect())
}

#[derive(Debug, Clone)]
pub struct DedekindResult {
    pub finite: bool,
    /// Whether the sentence is forced at each stage.
    pub stages: Vec<bool>,
    /// Present when the sentence itself was evaluated.
    pub truth_value: Option<TruthValue>,
}

/// Internal Dedekind-finiteness: the sentence when `A^A` is small, the
/// stage-wise reading otherwise. Both are computed when both are feasible
/// and must agree.
pub fn dedekind(a: &Arc<Presheaf>, budget: usize) -> Result<DedekindResult> {
    let stages = dedekind_stagewise(a, budget)?;
    let e = exponential(a, a, budget)?;
    let truth_value = if e.object.sizes().into_iter().max().unwrap_or(0) <= SENTENCE_CAP {
        let (_, tv) = dedekind_internal(a, Mode::Direct, budget)?;
        if tv.forced != stages {
            return Err(ToposError::Malformed(format!(
                "dedekind sentence {:?} and stage-wise reading {stages:?} disagree on {}",
                tv.forced,
                a.name()
            )));
        }
        Some(tv)
    } else {
        None
    };
    Ok(DedekindResult {
        finite: stages.iter().all(|&b| b),
        stages,
        truth_value,
    })
}

/// Every pointwise-injective endomorphism is an iso; returns a non-iso mono
/// when there is one.
pub fn dedekind_external(a: &Arc<Presheaf>, budget: usize) -> Result<(bool, Option<NatTrans>)> {
    let monos = enumerate_nat_trans_within(a, a, Filter::Mono, budget)?;
    let bad = monos.into_iter().find(|m| !m.is_iso());
    Ok((bad.is_none(), bad))
}

/// How `φ_p` is stated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiForm {
    /// `x_1, …, x_{p+1} ∈ S ⇒ ⋁_{i<j} x_i = x_j`.
    Pigeonhole,
    /// `∃x_1 … x_p ∀y (y ∈ S ⇒ ⋁ y = x_i)`, witnesses ranging over `A`.
    Covering,
    /// As `Covering`, with every witness required to lie in `S`.
    CoveringInS,
}

/// Where the generators of `L_p(A)` are taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generators {
    /// Subobjects of `A`, i.e. global elements of `Ω^A`.
    Global,
    /// Elements of `Ω^A` at any stage.
    Stagewise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SquireVariant {
    pub generators: Generators,
    pub phi: PhiForm,
}

impl SquireVariant {
    pub const RECORD: SquireVariant = SquireVariant {
        generators: Generators::Global,
        phi: PhiForm::Pigeonhole,
    };

    pub const ALL: [SquireVariant; 6] = [
        SquireVariant {
            generators: Generators::Global,
            phi: PhiForm::Pigeonhole,
        },
        SquireVariant {
            generators: Generators::Global,
            phi: PhiForm::Covering,
        },
        SquireVariant {
            generators: Generators::Global,
            phi: PhiForm::CoveringInS,
        },
        SquireVariant {
            generators: Generators::Stagewise,
            phi: PhiForm::Pigeonhole,
        },
        SquireVariant {
            generators: Generators::Stagewise,
            phi: PhiForm::Covering,
        },
        SquireVariant {
            generators: Generators::Stagewise,
            phi: PhiForm::CoveringInS,
        },
    ];
}

impl fmt::Display for SquireVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = match self.generators {
            Generators::Global => "global",
            Generators::Stagewise => "stagewise",
        };
        let p = match self.phi {
            PhiForm::Pigeonhole => "pigeonhole",
            PhiForm::Covering => "covering",
            PhiForm::CoveringInS => "covering-in-s",
        };
        write!(f, "{g}/{p}")
    }
}

/// `φ_p` with the subobject as free variable `s : P(A)`.
pub fn phi_formula(p: usize, form: PhiForm) -> String {
    let xs: Vec<String> = (1..=p + usize::from(form == PhiForm::Pigeonhole))
        .map(|i| format!("x{i}"))
        .collect();
    match form {
        PhiForm::Pigeonhole => {
            let binders: String = xs.iter().map(|x| format!("forall {x}:A. ")).collect();
            let members: Vec<String> = xs.iter().map(|x| format!("{x} in s")).collect();
            let mut eqs = Vec::new();
            for i in 0..xs.len() {
                for j in i + 1..xs.len() {
                    eqs.push(format!("{} = {}", xs[i], xs[j]));
                }
            }
            format!("{binders}({}) => ({})", members.join(" /\\ "), eqs.join(" \\/ "))
        }
        PhiForm::Covering | PhiForm::CoveringInS => {
            let binders: String = xs.iter().map(|x| format!("exists {x}:A. ")).collect();
            let eqs: Vec<String> = xs.iter().map(|x| format!("y = {x}")).collect();
            let cover = format!("(forall y:A. y in s => ({}))", eqs.join(" \\/ "));
            if form == PhiForm::Covering {
                format!("{binders}{cover}")
            } else {
                let members: Vec<String> = xs.iter().map(|x| format!("{x} in s")).collect();
                format!("{binders}({} /\\ {cover})", members.join(" /\\ "))
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct SquireResult {
    pub variant: SquireVariant,
    pub finite: bool,
    pub generators: Subfunctor,
    pub lp: Subfunctor,
}

pub fn squire_lp(a: &Arc<Presheaf>, p: usize, variant: SquireVariant, mode: Mode) -> Result<SquireResult> {
    if p == 0 {
        return Err(ToposError::Malformed("L_p needs p >= 1".into()));
    }
    let sig = single_signature(a)?;
    let pw = PowerObject::new(&sig, DEFAULT_BUDGET)?;
    let ctx = [("s".to_string(), LType::power(LType::ground(GROUND)))];
    let prog = compile(&parse_formula(&phi_formula(p, variant.phi))?, &sig, &ctx, mode)?;
    let om = &pw.universe.omega;
    let cat = a.base().clone();
    let n = cat.num_objects();
    let satisfied = |c: usize, theta: usize| -> Result<bool> {
        let v = pw.universe.eval(&prog, c, &[pw.carrier.values(c)[theta].clone()])?;
        Ok(v.idx() == om.top_index(c))
    };
    let mut seeds = Vec::new();
    match variant.generators {
        Generators::Global => {
            for s in subobject_lattice(a, DEFAULT_BUDGET)? {
                let name = pw.name_of(&s);
                let mut ok = true;
                for (c, &theta) in name.iter().enumerate() {
                    if !satisfied(c, theta)? {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    seeds.extend(name.into_iter().enumerate());
                }
            }
        }
        Generators::Stagewise => {
            for c in 0..n {
                for theta in 0..pw.host().size(c) {
                    if satisfied(c, theta)? {
                        seeds.push((c, theta));
                    }
                }
            }
        }
    }
    let host = pw.host().clone();
    let generators = Subfunctor::generated_by(&host, seeds);
    let spec = ClosureSpec {
        host,
        generators: generators.clone(),
        operations: vec![pw.union()?],
    };
    let lp = closure_subobject(&spec);
    Ok(SquireResult {
        variant,
        finite: pw.contains_top(&lp),
        generators,
        lp,
    })
}

/// The semantics of record together with every alternative reading, and the
/// alternatives that disagree with it.
pub fn squire_report(a: &Arc<Presheaf>, p: usize, mode: Mode) -> Result<(SquireResult, Vec<(SquireVariant, bool)>)> {
    let record = squire_lp(a, p, SquireVariant::RECORD, mode)?;
    let mut disagreements = Vec::new();
    for v in SquireVariant::ALL.into_iter().filter(|&v| v != SquireVariant::RECORD) {
        let r = squire_lp(a, p, v, mode)?;
        if r.finite != record.finite {
            disagreements.push((v, r.finite));
        }
    }
    Ok((record, disagreements))
}

/// Decides `notion` for `a` and packages the result.
pub fn decide(a: &Arc<Presheaf>, notion: Notion, mode: FinMode, budget: usize) -> Result<Verdict> {
    let mut v = Verdict {
        notion,
        mode,
        object: a.name().to_string(),
        verdict: false,
        witness: None,
        truth_value: None,
        notes: Vec::new(),
    };
    match (notion, mode) {
        (Notion::Dedekind, FinMode::Internal) => {
            let r = dedekind(a, budget)?;
            v.verdict = r.finite;
            if r.truth_value.is_none() {
                v.notes.push(format!(
                    "A^A exceeds {SENTENCE_CAP} elements per stage; decided stage-wise"
                ));
            }
            v.truth_value = r.truth_value;
        }
        (Notion::Dedekind, FinMode::External) => {
            let (ok, bad) = dedekind_external(a, budget)?;
            v.verdict = ok;
            if let Some(m) = bad {
                v.notes.push(format!("non-invertible mono: {:?}", m.describe()));
            }
        }
        (Notion::Kuratowski, FinMode::Internal) => {
            let stagewise = kuratowski_stagewise(a);
            match kuratowski_within(a, budget.min(CLOSURE_CAP)) {
                Ok(r) => {
                    v.verdict = r.finite;
                    v.witness = Some(r.k.listing());
                    if r.finite != stagewise {
                        v.notes.push("closure and stage-wise criterion disagree".into());
                    }
                }
                Err(ToposError::SizeBudgetExceeded { .. }) => {
                    v.verdict = stagewise;
                    v.notes.push(format!(
                        "P(A) exceeds {} elements; decided stage-wise",
                        budget.min(CLOSURE_CAP)
                    ));
                }
                Err(e) => return Err(e),
            }
            if a.total_size() <= 2 && a.base().num_arrows() <= 3 {
                let (direct, _) = kuratowski_direct(a, Mode::Direct)?;
                v.notes.push(format!("defining sentence evaluates to {direct}"));
                if direct != v.verdict {
                    v.notes.push("closure and defining sentence disagree".into());
                }
            }
        }
        (Notion::Kuratowski, FinMode::External) => {
            v.verdict = a.total_size() < usize::MAX;
            v.notes.push("every represented carrier is externally finite".into());
        }
        (Notion::Lp(p), FinMode::Internal) => {
            let (r, disagree) = squire_report(a, p, Mode::Direct)?;
            v.verdict = r.finite;
            v.witness = Some(r.lp.listing());
            for (variant, fin) in disagree {
                v.notes.push(format!("variant {variant} gives {fin}"));
            }
        }
        (Notion::Lp(_), FinMode::External) => {
            v.verdict = true;
            v.notes.push("every represented carrier is externally finite".into());
        }
    }
    Ok(v)
}

/// Outcome of the Kuratowski property checks on a sample.
#[derive(Debug, Clone, Default)]
pub struct KReport {
    pub checked: BTreeMap<String, usize>,
    pub violations: Vec<String>,
    pub exempt_noncomplemented: usize,
    /// Instances of `B ∪ C` K-finite with `B` or `C` not K-finite.
    pub union_converse_counterexamples: Vec<String>,
}

impl KReport {
    fn tick(&mut self, key: &str) {
        *self.checked.entry(key.to_string()).or_default() += 1;
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> Json {
        json!({
            "checked": self.checked,
            "violations": self.violations,
            "exempt_noncomplemented": self.exempt_noncomplemented,
            "union_converse_counterexamples": self.union_converse_counterexamples,
        })
    }
}

/// Checks the closure properties of K-finiteness on a sample sharing a base.
pub fn k_properties_suite(sample: &[Arc<Presheaf>], budget: usize) -> Result<KReport> {
    let mut rep = KReport::default();
    let Some(first) = sample.first() else {
        return Ok(rep);
    };
    let base = first.base().clone();
    let kfin = |p: &Arc<Presheaf>| -> Result<bool> { Ok(kuratowski_within(p, budget)?.finite) };
    for (name, p) in [
        ("0", crate::limits::initial(&base)),
        ("1", crate::limits::terminal(&base)),
    ] {
        rep.tick("initial-terminal");
        if !kfin(&p)? {
            rep.violations.push(format!("{name} is not K-finite"));
        }
    }
    let fin: Vec<bool> = sample.iter().map(kfin).collect::<Result<_>>()?;
    for (i, a) in sample.iter().enumerate() {
        for (j, b) in sample.iter().enumerate() {
            if fin[i] && fin[j] {
                rep.tick("sum-product");
                if !kfin(&coproduct(a, b)?.object)? {
                    rep.violations
                        .push(format!("{} + {} is not K-finite", a.name(), b.name()));
                }
                if !kfin(&product(a, b)?.object)? {
                    rep.violations
                        .push(format!("{} x {} is not K-finite", a.name(), b.name()));
                }
            }
            if fin[i] && !fin[j] {
                let epis = enumerate_nat_trans_within(a, b, Filter::Epi, budget)?;
                rep.tick("epi-image");
                if let Some(e) = epis.first() {
                    rep.violations.push(format!(
                        "epi {} -> {} from a K-finite object onto a non-K-finite one: {:?}",
                        a.name(),
                        b.name(),
                        e.describe()
                    ));
                }
            }
        }
        let subs = subobject_lattice(a, budget)?;
        let sub_fin: Vec<bool> = subs
            .iter()
            .map(|s| kfin(&s.to_presheaf("S").0))
            .collect::<Result<_>>()?;
        for (s, &sf) in subs.iter().zip(&sub_fin) {
            if !fin[i] {
                continue;
            }
            if s.is_complemented() {
                rep.tick("complemented-subobject");
                if !sf {
                    rep.violations.push(format!(
                        "complemented subobject {:?} of {} is not K-finite",
                        s.listing(),
                        a.name()
                    ));
                }
            } else {
                rep.exempt_noncomplemented += 1;
            }
        }
        for (x, (s, &sf)) in subs.iter().zip(&sub_fin).enumerate() {
            for (t, &tf) in subs.iter().zip(&sub_fin).skip(x) {
                let j = s.join(t);
                let jf = match subs.iter().position(|u| *u == j) {
                    Some(k) => sub_fin[k],
                    None => kfin(&j.to_presheaf("S").0)?,
                };
                rep.tick("union");
                if sf && tf && !jf {
                    rep.violations.push(format!(
                        "union of K-finite {:?} and {:?} in {} is not K-finite",
                        s.listing(),
                        t.listing(),
                        a.name()
                    ));
                }
                if jf && !(sf && tf) && rep.union_converse_counterexamples.len() < 8 {
                    rep.union_converse_counterexamples.push(format!(
                        "{:?} ∪ {:?} in {}",
                        s.listing(),
                        t.listing(),
                        a.name()
                    ));
                }
            }
        }
    }
    Ok(rep)
}

/// Lexicographically first `(W, V)` with `W` K-finite and `V ≤ W` not.
pub fn kuratowski_witness(candidates: &[Arc<Presheaf>], budget: usize) -> Result<Option<(Arc<Presheaf>, Subfunctor)>> {
    for w in candidates {
        if !kuratowski_within(w, budget)?.finite {
            continue;
        }
        for v in subobject_lattice(w, budget)? {
            if !kuratowski_within(&v.to_presheaf("V").0, budget)?.finite {
                return Ok(Some((w.clone(), v)));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{monoid_to_category, FinCategory, FinMonoid};
    use crate::limits::{initial, terminal};
    use crate::omega::OmegaStructure;

    fn set(n: usize) -> Arc<Presheaf> {
        let base = Arc::new(FinCategory::trivial());
        let names: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        Arc::new(Presheaf::constant("S", &base, &refs))
    }

    fn chain(p: usize) -> Arc<Presheaf> {
        let m = FinMonoid::chain_join(p);
        let base = Arc::new(monoid_to_category(&m));
        let action = (0..m.len())
            .map(|a| (0..m.len()).map(|x| m.op(x, a)).collect())
            .collect();
        Arc::new(Presheaf::new("M", base, vec![m.elements().to_vec()], action).unwrap())
    }

    #[test]
    fn closure_of_everything_is_everything() {
        let a = set(2);
        let sig = single_signature(&a).unwrap();
        let pw = PowerObject::new(&sig, DEFAULT_BUDGET).unwrap();
        let host = pw.host().clone();
        let full = ClosureSpec {
            host: host.clone(),
            generators: Subfunctor::full(&host),
            operations: vec![],
        };
        assert!(closure_subobject(&full).is_full());
        let none = ClosureSpec {
            host: host.clone(),
            generators: Subfunctor::empty(&host),
            operations: vec![],
        };
        assert!(closure_subobject(&none).is_empty());
        let k = kuratowski(&a).unwrap();
        assert_eq!(k.k.sizes(), vec![4]);
        assert!(k.finite);
    }

    #[test]
    fn zero_and_one_are_k_finite() {
        for base in [
            Arc::new(FinCategory::trivial()),
            Arc::new(FinCategory::arrow_category()),
        ] {
            assert!(kuratowski(&initial(&base)).unwrap().finite);
            assert!(kuratowski(&terminal(&base)).unwrap().finite);
        }
    }

    #[test]
    fn direct_sentence_matches_closure_on_tiny_objects() {
        let base = Arc::new(FinCategory::arrow_category());
        for p in crate::sample::all_presheaves(&base, 1, 100).unwrap() {
            let (direct, _) = kuratowski_direct(&p, Mode::Direct).unwrap();
            assert_eq!(direct, kuratowski(&p).unwrap().finite, "{:?}", p);
        }
        for n in 0..=2 {
            let (direct, _) = kuratowski_direct(&set(n), Mode::Direct).unwrap();
            assert!(direct);
        }
    }

    #[test]
    fn chain_separates_squire_levels() {
        let m2 = chain(2);
        assert!(!squire_lp(&m2, 1, SquireVariant::RECORD, Mode::Direct).unwrap().finite);
        assert!(squire_lp(&m2, 2, SquireVariant::RECORD, Mode::Direct).unwrap().finite);
        let m3 = chain(3);
        assert!(!squire_lp(&m3, 2, SquireVariant::RECORD, Mode::Direct).unwrap().finite);
        assert!(squire_lp(&m3, 3, SquireVariant::RECORD, Mode::Direct).unwrap().finite);
    }

    #[test]
    fn phi_formulas_parse() {
        for p in 1..=3 {
            for form in [PhiForm::Pigeonhole, PhiForm::Covering, PhiForm::CoveringInS] {
                parse_formula(&phi_formula(p, form)).unwrap();
            }
        }
        assert_eq!(
            phi_formula(1, PhiForm::Pigeonhole),
            "forall x1:A. forall x2:A. (x1 in s /\\ x2 in s) => (x1 = x2)"
        );
    }

    #[test]
    fn sets_are_finite_in_every_sense() {
        for n in 0..=3 {
            let a = set(n);
            assert!(dedekind_internal(&a, Mode::Direct, DEFAULT_BUDGET).unwrap().0);
            assert!(dedekind_external(&a, DEFAULT_BUDGET).unwrap().0);
            assert!(kuratowski(&a).unwrap().finite);
            for p in 1..=3 {
                assert!(squire_lp(&a, p, SquireVariant::RECORD, Mode::Direct).unwrap().finite);
            }
        }
    }

    #[test]
    fn dedekind_internal_expand_matches_direct() {
        let base = Arc::new(FinCategory::arrow_category());
        for p in crate::sample::all_presheaves(&base, 1, 100).unwrap() {
            let e = dedekind_internal(&p, Mode::Expand, DEFAULT_BUDGET).unwrap();
            let d = dedekind_internal(&p, Mode::Direct, DEFAULT_BUDGET).unwrap();
            assert_eq!(e.1, d.1);
        }
    }

    #[test]
    fn stagewise_criterion_matches_closure() {
        let base = Arc::new(FinCategory::arrow_category());
        for p in crate::sample::all_presheaves(&base, 2, 1000).unwrap() {
            assert_eq!(kuratowski_stagewise(&p), kuratowski(&p).unwrap().finite);
        }
        for m in FinMonoid::all_up_to_iso(2) {
            let base = Arc::new(monoid_to_category(&m));
            for p in crate::sample::all_presheaves(&base, 2, 1000).unwrap() {
                assert_eq!(kuratowski_stagewise(&p), kuratowski(&p).unwrap().finite);
            }
        }
        assert!(!kuratowski_stagewise(&chain(3)) && !kuratowski(&chain(3)).unwrap().finite);
    }

    #[test]
    fn witness_over_the_arrow_category() {
        let base = Arc::new(FinCategory::arrow_category());
        let all = crate::sample::all_presheaves(&base, 2, 1000).unwrap();
        let (w, v) = kuratowski_witness(&all, DEFAULT_BUDGET).unwrap().expect("witness");
        assert_eq!(w.sizes(), vec![1, 1]);
        assert_eq!(v.sizes(), vec![0, 1]);
    }

    #[test]
    fn k_properties_hold_on_small_arrow_presheaves() {
        let base = Arc::new(FinCategory::arrow_category());
        let all = crate::sample::all_presheaves(&base, 1, 1000).unwrap();
        let rep = k_properties_suite(&all, DEFAULT_BUDGET).unwrap();
        assert!(rep.passed(), "{:?}", rep.violations);
        assert!(!rep.union_converse_counterexamples.is_empty());
    }

    #[test]
    fn stagewise_dedekind_matches_the_sentence() {
        let arrow = Arc::new(FinCategory::arrow_category());
        let mut objects = crate::sample::all_presheaves(&arrow, 2, DEFAULT_BUDGET).unwrap();
        objects.push(chain(2));
        objects.push(OmegaStructure::new(&arrow).unwrap().omega.clone());
        for a in &objects {
            let r = dedekind(a, DEFAULT_BUDGET).unwrap();
            assert!(r.finite && r.truth_value.is_some(), "{}", a.name());
        }
    }
}
