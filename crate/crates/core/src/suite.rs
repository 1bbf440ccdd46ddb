//! Seeded property suites: universal properties, Heyting laws, the classical
//! collapse in `Sets`, closure laws and the Kuratowski properties.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value as Json};

use crate::category::{monoid_to_category, FinCategory, FinMonoid};
use crate::error::Result;
use crate::exponential::exponential;
use crate::finiteness::{
    dedekind_external, dedekind_internal, k_properties_suite, kuratowski, squire_lp, SquireVariant,
};
use crate::limits::{coproduct, equalizer, initial, product, terminal};
use crate::logic::Mode;
use crate::machines::{random_tm, tm_closure, ConfigSet};
use crate::nat::{enumerate_nat_trans_within, Filter, NatTrans};
use crate::omega::OmegaStructure;
use crate::presheaf::Presheaf;
use crate::sample::random_presheaf;
use crate::subobject::{subobject_lattice, Subfunctor};

/// Counts of checks per property and the failing instances.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SuiteReport {
    pub seed: u64,
    pub checks: BTreeMap<String, usize>,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn check(&mut self, property: &str, ok: bool, detail: impl FnOnce() -> String) {
        *self.checks.entry(property.to_string()).or_default() += 1;
        if !ok {
            self.failures.push(format!("{property}: {}", detail()));
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Json {
        json!({ "seed": self.seed, "checks": self.checks, "failures": self.failures, "passed": self.passed() })
    }
}

/// The operations a Heyting algebra check needs.
pub trait Heyting {
    type Elem: Clone + std::fmt::Debug;
    fn elements(&self) -> Vec<Self::Elem>;
    fn meet(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn join(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn implies(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn bottom(&self) -> Self::Elem;
    fn negate(&self, a: &Self::Elem) -> Self::Elem;
    fn eq(&self, a: &Self::Elem, b: &Self::Elem) -> bool;

    fn le(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.eq(&self.meet(a, b), a)
    }
}

pub struct SubLattice(pub Vec<Subfunctor>);

impl Heyting for SubLattice {
    type Elem = Subfunctor;

    fn elements(&self) -> Vec<Subfunctor> {
        self.0.clone()
    }

    fn meet(&self, a: &Subfunctor, b: &Subfunctor) -> Subfunctor {
        a.meet(b)
    }

    fn join(&self, a: &Subfunctor, b: &Subfunctor) -> Subfunctor {
        a.join(b)
    }

    fn implies(&self, a: &Subfunctor, b: &Subfunctor) -> Subfunctor {
        a.implies(b)
    }

    fn bottom(&self) -> Subfunctor {
        Subfunctor::empty(self.0[0].host())
    }

    fn negate(&self, a: &Subfunctor) -> Subfunctor {
        a.negation()
    }

    fn eq(&self, a: &Subfunctor, b: &Subfunctor) -> bool {
        a == b
    }
}

/// `Ω(c)` with its sieve operations.
pub struct OmegaStage<'a> {
    pub omega: &'a OmegaStructure,
    pub stage: usize,
}

impl Heyting for OmegaStage<'_> {
    type Elem = usize;

    fn elements(&self) -> Vec<usize> {
        (0..self.omega.omega.size(self.stage)).collect()
    }

    fn meet(&self, a: &usize, b: &usize) -> usize {
        self.omega.meet(self.stage, *a, *b)
    }

    fn join(&self, a: &usize, b: &usize) -> usize {
        self.omega.join(self.stage, *a, *b)
    }

    fn implies(&self, a: &usize, b: &usize) -> usize {
        self.omega.implies(self.stage, *a, *b)
    }

    fn bottom(&self) -> usize {
        self.omega.bottom_index(self.stage)
    }

    fn negate(&self, a: &usize) -> usize {
        self.omega.negate(self.stage, *a)
    }

    fn eq(&self, a: &usize, b: &usize) -> bool {
        a == b
    }
}

const TRIPLE_CAP: usize = 20_000;

/// Distributivity, the `∧ ⊣ ⇒` adjunction and `¬a = a ⇒ ⊥`, over all
/// triples or a seeded sample of them.
pub fn heyting_laws<H: Heyting>(rep: &mut SuiteReport, label: &str, h: &H, rng: &mut impl Rng) {
    let els = h.elements();
    if els.is_empty() {
        return;
    }
    let n = els.len();
    let triples: Vec<(usize, usize, usize)> = if n * n * n <= TRIPLE_CAP {
        (0..n * n * n).map(|i| (i / (n * n), i / n % n, i % n)).collect()
    } else {
        (0..TRIPLE_CAP)
            .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n)))
            .collect()
    };
    let bot = h.bottom();
    for (i, j, k) in triples {
        let (a, b, c) = (&els[i], &els[j], &els[k]);
        let show = || format!("{label}: a={a:?} b={b:?} c={c:?}");
        let lhs = h.meet(a, &h.join(b, c));
        let rhs = h.join(&h.meet(a, b), &h.meet(a, c));
        rep.check("heyting-distributive", h.eq(&lhs, &rhs), show);
        let adj = h.le(&h.meet(a, b), c) == h.le(a, &h.implies(b, c));
        rep.check("heyting-adjunction", adj, show);
        if j == 0 && k == 0 {
            rep.check("heyting-negation", h.eq(&h.negate(a), &h.implies(a, &bot)), show);
        }
    }
}

fn hom(a: &Arc<Presheaf>, b: &Arc<Presheaf>, budget: usize) -> Result<Vec<NatTrans>> {
    enumerate_nat_trans_within(a, b, Filter::All, budget)
}

/// Universal properties with `x` as the object under test. Hom-set
/// enumerations that exceed `budget` are skipped, not failed.
pub fn universal_properties(rep: &mut SuiteReport, x: &Arc<Presheaf>, budget: usize, rng: &mut impl Rng) -> Result<()> {
    let base = x.base().clone();
    let name = x.name().to_string();
    let one = terminal(&base);
    rep.check("terminal", hom(x, &one, budget)?.len() == 1, || name.clone());
    rep.check("initial", hom(&initial(&base), x, budget)?.len() == 1, || name.clone());

    // probe object for products and coproducts
    let t = if x.total_size() <= 4 { x.clone() } else { one.clone() };
    let prod = product(x, x)?;
    if let (Ok(into_x), Ok(into_prod)) = (hom(&t, x, budget), hom(&t, &prod.object, budget)) {
        rep.check("product-count", into_prod.len() == into_x.len() * into_x.len(), || {
            name.clone()
        });
        for h in &into_prod {
            let again = prod.pair(&prod.left.compose(h)?, &prod.right.compose(h)?)?;
            rep.check("product-unique", again == *h, || name.clone());
        }
    }
    let sum = coproduct(x, x)?;
    if let (Ok(from_x), Ok(from_sum)) = (hom(x, &t, budget), hom(&sum.object, &t, budget)) {
        rep.check("coproduct-count", from_sum.len() == from_x.len() * from_x.len(), || {
            name.clone()
        });
        for h in &from_sum {
            let again = sum.copair(&h.compose(&sum.left)?, &h.compose(&sum.right)?)?;
            rep.check("coproduct-unique", again == *h, || name.clone());
        }
    }

    if let Ok(endos) = hom(x, x, budget) {
        let pairs: Vec<(&NatTrans, &NatTrans)> = endos.iter().flat_map(|f| endos.iter().map(move |g| (f, g))).collect();
        for &(f, g) in pairs.choose_multiple(rng, 6) {
            let eq = equalizer(f, g)?;
            rep.check(
                "equalizer-equalizes",
                f.compose(&eq.inclusion)? == g.compose(&eq.inclusion)?,
                || name.clone(),
            );
            for h in hom(&one, x, budget)? {
                if f.compose(&h)? == g.compose(&h)? {
                    let m = eq.mediate(&h)?;
                    rep.check("equalizer-mediates", eq.inclusion.compose(&m)? == h, || name.clone());
                }
            }
        }
    }

    match exponential(x, x, budget) {
        Ok(e) => {
            let globals = hom(&one, &e.object, budget)?;
            let one_x = product(&one, x)?;
            let maps = hom(&one_x.object, x, budget)?;
            rep.check("exponential-count", globals.len() == maps.len(), || name.clone());
            for k in &globals {
                let back = e.transpose(&one, &e.untranspose(k)?)?;
                rep.check("exponential-transpose", back == *k, || name.clone());
            }
            for h in &maps {
                let back = e.untranspose(&e.transpose(&one, h)?)?;
                rep.check("exponential-transpose", back.components() == h.components(), || {
                    name.clone()
                });
            }
        }
        Err(crate::error::ToposError::SizeBudgetExceeded { .. }) => {}
        Err(err) => return Err(err),
    }

    let omega = OmegaStructure::new(&base)?;
    let subs = subobject_lattice(x, budget)?;
    let chis = hom(x, &omega.omega, budget)?;
    rep.check("omega-count", subs.len() == chis.len(), || name.clone());
    for s in &subs {
        rep.check("omega-pullback", omega.pull_back_top(&omega.classify(s)) == *s, || {
            name.clone()
        });
    }
    for chi in &chis {
        // uniqueness: a classifying map is determined by its pullback
        rep.check(
            "omega-unique",
            omega.classify(&omega.pull_back_top(chi)) == *chi,
            || name.clone(),
        );
    }
    heyting_laws(rep, &format!("Sub({name})"), &SubLattice(subs), rng);
    Ok(())
}

fn sets_object(n: usize) -> Arc<Presheaf> {
    let base = Arc::new(FinCategory::trivial());
    let names: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    Arc::new(Presheaf::constant(format!("S{n}"), &base, &refs))
}

/// Every finiteness notion holds for every set of at most `max` elements.
pub fn tarski_collapse(rep: &mut SuiteReport, max: usize, budget: usize) -> Result<()> {
    for n in 0..=max {
        let a = sets_object(n);
        let show = || format!("|A| = {n}");
        rep.check(
            "collapse-dedekind",
            dedekind_internal(&a, Mode::Direct, budget)?.0,
            show,
        );
        rep.check("collapse-dedekind-external", dedekind_external(&a, budget)?.0, show);
        rep.check("collapse-kuratowski", kuratowski(&a)?.finite, show);
        for p in 1..=3 {
            rep.check(
                "collapse-lp",
                squire_lp(&a, p, SquireVariant::RECORD, Mode::Direct)?.finite,
                || format!("|A| = {n}, p = {p}"),
            );
        }
    }
    let omega = OmegaStructure::new(&Arc::new(FinCategory::trivial()))?;
    rep.check("collapse-omega-two", omega.omega.size(0) == 2, || "Ω in Sets".into());
    for n in 0..=max.min(3) {
        let a = sets_object(n);
        for s in subobject_lattice(&a, budget)? {
            rep.check("collapse-complemented", s.is_complemented(), || {
                format!("{:?}", s.listing())
            });
        }
    }
    Ok(())
}

/// Extensive, monotone and idempotent on random machines.
pub fn closure_laws(rep: &mut SuiteReport, machines: usize, rng: &mut impl Rng) -> Result<()> {
    let budget = 2_000;
    for i in 0..machines {
        let t = random_tm(rng, 4, 4);
        let word = |rng: &mut dyn rand::RngCore| -> Vec<usize> {
            let ns = t.alphabet().len();
            if ns < 2 {
                return Vec::new();
            }
            (0..rng.gen_range(0..=3)).map(|_| rng.gen_range(1..ns)).collect()
        };
        let small = ConfigSet::from([t.initial(&word(rng))]);
        let mut big = small.clone();
        big.insert(t.initial(&word(rng)));
        let cs = tm_closure(&t, &small, budget)?;
        let cb = tm_closure(&t, &big, budget)?;
        if cs.exhausted || cb.exhausted {
            continue;
        }
        rep.check("closure-extensive", small.is_subset(&cs.configs), || {
            format!("machine {i}")
        });
        rep.check("closure-monotone", cs.configs.is_subset(&cb.configs), || {
            format!("machine {i}")
        });
        let again = tm_closure(&t, &cs.configs, budget)?;
        rep.check("closure-idempotent", again.configs == cs.configs, || {
            format!("machine {i}")
        });
    }
    Ok(())
}

/// Bases random presheaves are drawn over: `Sets`, `0 → 1` and every monoid
/// of order at most 3.
pub fn sample_bases() -> Vec<Arc<FinCategory>> {
    let mut out = vec![
        Arc::new(FinCategory::trivial()),
        Arc::new(FinCategory::arrow_category()),
    ];
    for n in 2..=3 {
        out.extend(
            FinMonoid::all_up_to_iso(n)
                .iter()
                .map(|m| Arc::new(monoid_to_category(m))),
        );
    }
    out
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub seed: u64,
    pub random_objects: usize,
    pub max_stage: usize,
    pub machines: usize,
    pub budget: usize,
    /// Replaces the implication of `Ω` in `Sets` by a wrong table.
    pub inject_broken_heyting: bool,
}

impl SuiteConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            random_objects: 100,
            max_stage: 3,
            machines: 50,
            budget: 200_000,
            inject_broken_heyting: false,
        }
    }
}

struct BrokenSets;

impl Heyting for BrokenSets {
    type Elem = bool;

    fn elements(&self) -> Vec<bool> {
        vec![false, true]
    }

    fn meet(&self, a: &bool, b: &bool) -> bool {
        *a && *b
    }

    fn join(&self, a: &bool, b: &bool) -> bool {
        *a || *b
    }

    fn implies(&self, _: &bool, b: &bool) -> bool {
        *b
    }

    fn bottom(&self) -> bool {
        false
    }

    fn negate(&self, a: &bool) -> bool {
        !*a
    }

    fn eq(&self, a: &bool, b: &bool) -> bool {
        a == b
    }
}

/// Runs every suite over `fixtures` and seeded random presheaves.
pub fn run(config: &SuiteConfig, fixtures: &[Arc<Presheaf>]) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut rep = SuiteReport {
        seed: config.seed,
        ..Default::default()
    };
    if config.inject_broken_heyting {
        heyting_laws(&mut rep, "Ω(Sets) with a wrong implication", &BrokenSets, &mut rng);
    }
    let bases = sample_bases();
    let mut objects: Vec<Arc<Presheaf>> = fixtures.to_vec();
    for i in 0..config.random_objects {
        let base = bases.choose(&mut rng).expect("bases").clone();
        objects.push(random_presheaf(&base, config.max_stage, &mut rng, &format!("R{i}")));
    }
    for x in &objects {
        universal_properties(&mut rep, x, config.budget, &mut rng)?;
    }
    for base in &bases {
        let omega = OmegaStructure::new(base)?;
        for c in 0..base.num_objects() {
            heyting_laws(
                &mut rep,
                "Ω",
                &OmegaStage {
                    omega: &omega,
                    stage: c,
                },
                &mut rng,
            );
        }
    }
    tarski_collapse(&mut rep, 4, config.budget)?;
    closure_laws(&mut rep, config.machines, &mut rng)?;
    let arrow = Arc::new(FinCategory::arrow_category());
    let sample = crate::sample::all_presheaves(&arrow, 1, 1000)?;
    let k = k_properties_suite(&sample, config.budget)?;
    for (property, n) in &k.checked {
        *rep.checks.entry(format!("kuratowski-{property}")).or_default() += n;
    }
    rep.failures
        .extend(k.violations.iter().map(|v| format!("kuratowski: {v}")));
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn broken_implication_is_caught() {
        let mut rep = SuiteReport::default();
        heyting_laws(&mut rep, "broken", &BrokenSets, &mut ChaCha8Rng::seed_from_u64(0));
        assert!(!rep.passed());
        assert!(rep.failures.iter().any(|f| f.starts_with("heyting-adjunction")));
    }

    #[test]
    fn small_run_passes_and_is_deterministic() {
        let config = SuiteConfig {
            random_objects: 8,
            machines: 5,
            ..SuiteConfig::new(3)
        };
        let a = run(&config, &[]).unwrap();
        assert!(a.passed(), "{:?}", a.failures);
        assert_eq!(a, run(&config, &[]).unwrap());
    }
}
