//! The subobject classifier of `Sets^C`.
//!
//! `Ω(c)` is computed as the set of subfunctors of `Hom(c, −)` (cosieves on
//! `c`), stored as `u64` masks over arrow indices; the arrow `f : c → d`
//! acts by `S ↦ {g | g∘f ∈ S}`.

use std::collections::HashMap;
use std::sync::Arc;

use crate::category::FinCategory;
use crate::error::Result;
use crate::limits::{representable, terminal};
use crate::nat::{NatTrans, DEFAULT_BUDGET};
use crate::presheaf::Presheaf;
use crate::subobject::{subobject_lattice, Subfunctor};

pub type Sieve = u64;

pub struct OmegaStructure {
    pub omega: Arc<Presheaf>,
    pub top: NatTrans,
    base: Arc<FinCategory>,
    sieves: Vec<Vec<Sieve>>,
    index: Vec<HashMap<Sieve, usize>>,
}

impl OmegaStructure {
    pub fn new(base: &Arc<FinCategory>) -> Result<Self> {
        let cat = &**base;
        let n = cat.num_objects();
        let mut sieves = Vec::with_capacity(n);
        for c in 0..n {
            let yc = representable(base, c);
            let mut masks: Vec<Sieve> = subobject_lattice(&yc, DEFAULT_BUDGET)?
                .iter()
                .map(|s| {
                    let mut m = 0;
                    for d in 0..n {
                        for (pos, &f) in cat.hom(c, d).iter().enumerate() {
                            if s.contains(d, pos) {
                                m |= 1 << f;
                            }
                        }
                    }
                    m
                })
                .collect();
            masks.sort_unstable();
            sieves.push(masks);
        }
        let index: Vec<HashMap<Sieve, usize>> = sieves
            .iter()
            .map(|ms| ms.iter().enumerate().map(|(i, &m)| (m, i)).collect())
            .collect();
        let carriers = sieves
            .iter()
            .map(|ms| ms.iter().map(|&m| sieve_name(cat, m)).collect())
            .collect();
        let action = (0..cat.num_arrows())
            .map(|f| {
                let arr = cat.arrow(f);
                sieves[arr.dom]
                    .iter()
                    .map(|&m| index[arr.cod][&pull_back_sieve(cat, m, f)])
                    .collect()
            })
            .collect();
        let omega = Arc::new(Presheaf::new_unchecked("Ω", base.clone(), carriers, action));
        let top_comps = (0..n).map(|c| vec![index[c][&cat.max_sieve(c)]]).collect();
        let top = NatTrans::new_unchecked(terminal(base), omega.clone(), top_comps);
        Ok(Self {
            omega,
            top,
            base: base.clone(),
            sieves,
            index,
        })
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    pub fn sieve(&self, c: usize, i: usize) -> Sieve {
        self.sieves[c][i]
    }

    pub fn sieve_index(&self, c: usize, s: Sieve) -> usize {
        self.index[c][&s]
    }

    pub fn top_index(&self, c: usize) -> usize {
        self.index[c][&self.base.max_sieve(c)]
    }

    pub fn bottom_index(&self, c: usize) -> usize {
        self.index[c][&0]
    }

    pub fn meet(&self, c: usize, i: usize, j: usize) -> usize {
        self.index[c][&(self.sieves[c][i] & self.sieves[c][j])]
    }

    pub fn join(&self, c: usize, i: usize, j: usize) -> usize {
        self.index[c][&(self.sieves[c][i] | self.sieves[c][j])]
    }

    pub fn implies(&self, c: usize, i: usize, j: usize) -> usize {
        self.index[c][&sieve_implies(&self.base, c, self.sieves[c][i], self.sieves[c][j])]
    }

    pub fn negate(&self, c: usize, i: usize) -> usize {
        self.implies(c, i, self.bottom_index(c))
    }

    /// `χ_S : F → Ω`, with `χ_S(x) = {f | F(f)(x) ∈ S}`.
    pub fn classify(&self, s: &Subfunctor) -> NatTrans {
        let host = s.host();
        let cat = &*self.base;
        let comps = (0..cat.num_objects())
            .map(|c| {
                (0..host.size(c))
                    .map(|x| {
                        let mut m = 0;
                        for &f in cat.out_of(c) {
                            if s.contains(cat.arrow(f).cod, host.act(f, x)) {
                                m |= 1 << f;
                            }
                        }
                        self.index[c][&m]
                    })
                    .collect()
            })
            .collect();
        NatTrans::new_unchecked(host.clone(), self.omega.clone(), comps)
    }

    /// Pullback of `⊤` along `χ : F → Ω`, as a subfunctor of `F`.
    pub fn pull_back_top(&self, chi: &NatTrans) -> Subfunctor {
        let host = chi.source().clone();
        let part = (0..self.base.num_objects())
            .map(|c| {
                let t = self.top_index(c);
                chi.component(c).iter().map(|&v| v == t).collect()
            })
            .collect();
        Subfunctor::new_unchecked(host, part)
    }

    /// Global elements of `Ω` as masks per stage.
    pub fn global_truth_values(&self) -> Result<Vec<NatTrans>> {
        crate::nat::enumerate_nat_trans(&terminal(&self.base), &self.omega, crate::nat::Filter::All)
    }
}

pub fn sieve_name(cat: &FinCategory, m: Sieve) -> String {
    let names: Vec<&str> = (0..cat.num_arrows())
        .filter(|&f| m & (1 << f) != 0)
        .map(|f| cat.arrow(f).name.as_str())
        .collect();
    format!("{{{}}}", names.join(","))
}

/// `{g | g∘f ∈ S}` for `S` a sieve on `dom f`.
pub fn pull_back_sieve(cat: &FinCategory, s: Sieve, f: usize) -> Sieve {
    let d = cat.arrow(f).cod;
    cat.out_of(d)
        .iter()
        .filter(|&&g| s & (1 << cat.then(f, g)) != 0)
        .fold(0, |m, &g| m | (1 << g))
}

/// Heyting implication of sieves on `c`.
pub fn sieve_implies(cat: &FinCategory, c: usize, s: Sieve, t: Sieve) -> Sieve {
    cat.out_of(c)
        .iter()
        .filter(|&&f| {
            let d = cat.arrow(f).cod;
            cat.out_of(d).iter().all(|&g| {
                let gf = cat.then(f, g);
                s & (1 << gf) == 0 || t & (1 << gf) != 0
            })
        })
        .fold(0, |m, &f| m | (1 << f))
}
