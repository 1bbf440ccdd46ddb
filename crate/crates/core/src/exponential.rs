//! Exponentials `B^A`: stage `c` carries the natural families
//! `Hom(c, −) × A ⇒ B`.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Result, ToposError};
use crate::limits::{product, representable, Product};
use crate::nat::{enumerate_components, Filter, NatTrans};
use crate::presheaf::{require_same_base, Presheaf};

pub struct Exponential {
    pub object: Arc<Presheaf>,
    pub exponent: Arc<Presheaf>,
    pub codomain: Arc<Presheaf>,
    /// `offsets[c][d]`: first slot of the stage-`d` part of a stage-`c` family.
    offsets: Vec<Vec<usize>>,
    families: Vec<Vec<Vec<usize>>>,
    lookup: Vec<HashMap<Vec<usize>, usize>>,
}

impl Exponential {
    /// Slot of `(f, a)` in a stage-`dom f` family.
    pub fn slot(&self, f: usize, a: usize) -> usize {
        let cat = self.object.base();
        let arr = cat.arrow(f);
        self.offsets[arr.dom][arr.cod] + cat.hom_position(f) * self.exponent.size(arr.cod) + a
    }

    /// Value of element `theta` of stage `c` at `(f, a)`.
    pub fn value(&self, c: usize, theta: usize, f: usize, a: usize) -> usize {
        debug_assert_eq!(self.object.base().arrow(f).dom, c);
        self.families[c][theta][self.slot(f, a)]
    }

    pub fn family(&self, c: usize, theta: usize) -> &[usize] {
        &self.families[c][theta]
    }

    pub fn find(&self, c: usize, family: &[usize]) -> Option<usize> {
        self.lookup[c].get(family).copied()
    }

    /// `(f, a)` pairs of stage `c` in slot order.
    pub fn slots(&self, c: usize) -> Vec<(usize, usize)> {
        let cat = self.object.base();
        let mut out = Vec::new();
        for d in 0..cat.num_objects() {
            for &f in cat.hom(c, d) {
                for a in 0..self.exponent.size(d) {
                    out.push((f, a));
                }
            }
        }
        out
    }

    /// `ev : B^A × A → B`, together with the product it is defined on.
    pub fn evaluation(&self) -> Result<(Product, NatTrans)> {
        let prod = product(&self.object, &self.exponent)?;
        let cat = self.object.base();
        let comps = (0..cat.num_objects())
            .map(|c| {
                let id = cat.identity(c);
                (0..self.object.size(c))
                    .flat_map(|t| (0..self.exponent.size(c)).map(move |a| (t, a)))
                    .map(|(t, a)| self.value(c, t, id, a))
                    .collect()
            })
            .collect();
        let ev = NatTrans::new_unchecked(prod.object.clone(), self.codomain.clone(), comps);
        Ok((prod, ev))
    }

    /// Inverse of [`Exponential::transpose`]: `k : X → B^A` to `X×A → B`.
    pub fn untranspose(&self, k: &NatTrans) -> Result<NatTrans> {
        if k.target() != &self.object {
            return Err(ToposError::BaseMismatch);
        }
        let x = k.source();
        let prod = product(x, &self.exponent)?;
        let cat = self.object.base();
        let comps = (0..cat.num_objects())
            .map(|c| {
                let id = cat.identity(c);
                (0..x.size(c))
                    .flat_map(|xi| (0..self.exponent.size(c)).map(move |a| (xi, a)))
                    .map(|(xi, a)| self.value(c, k.apply(c, xi), id, a))
                    .collect()
            })
            .collect();
        Ok(NatTrans::new_unchecked(prod.object, self.codomain.clone(), comps))
    }
}

impl Exponential {
    /// Curries `h : X×A → B` into `X → B^A`.
    pub fn transpose(&self, x: &Arc<Presheaf>, h: &NatTrans) -> Result<NatTrans> {
        let cat = self.object.base().clone();
        let prod = product(x, &self.exponent)?;
        if *prod.object != **h.source() || h.target() != &self.codomain {
            return Err(ToposError::BaseMismatch);
        }
        let mut comps = Vec::with_capacity(cat.num_objects());
        for c in 0..cat.num_objects() {
            let mut comp = Vec::with_capacity(x.size(c));
            for xi in 0..x.size(c) {
                let fam: Vec<usize> = self
                    .slots(c)
                    .into_iter()
                    .map(|(f, a)| {
                        let d = cat.arrow(f).cod;
                        h.apply(d, prod.index(d, x.act(f, xi), a))
                    })
                    .collect();
                comp.push(self.find(c, &fam).expect("curried family is natural"));
            }
            comps.push(comp);
        }
        Ok(NatTrans::new_unchecked(x.clone(), self.object.clone(), comps))
    }
}

/// Builds `B^A`, failing with `SizeBudgetExceeded` if some stage would hold
/// more than `budget` elements.
pub fn exponential(a: &Arc<Presheaf>, b: &Arc<Presheaf>, budget: usize) -> Result<Exponential> {
    require_same_base(a, b)?;
    let cat = a.base().clone();
    let n = cat.num_objects();
    let mut offsets = vec![vec![0; n]; n];
    let mut families = Vec::with_capacity(n);
    let mut lookup = Vec::with_capacity(n);
    let mut carriers = Vec::with_capacity(n);
    for c in 0..n {
        let mut off = 0;
        for d in 0..n {
            offsets[c][d] = off;
            off += cat.hom(c, d).len() * a.size(d);
        }
        let yc = representable(&cat, c);
        let dom = product(&yc, a)?;
        let comps = enumerate_components(&dom.object, b, Filter::All, budget).map_err(|e| match e {
            ToposError::SizeBudgetExceeded { budget, .. } => ToposError::SizeBudgetExceeded {
                what: format!("stage {} of {}^{}", cat.objects()[c], b.name(), a.name()),
                budget,
            },
            other => other,
        })?;
        let flat: Vec<Vec<usize>> = comps.into_iter().map(|v| v.concat()).collect();
        let names = flat
            .iter()
            .map(|fam| {
                let mut s = String::from("[");
                let mut slot = 0;
                for d in 0..n {
                    for &f in cat.hom(c, d) {
                        for x in 0..a.size(d) {
                            if slot > 0 {
                                s.push(',');
                            }
                            s.push_str(&format!(
                                "{}:{}>{}",
                                cat.arrow(f).name,
                                a.element_name(d, x),
                                b.element_name(d, fam[slot])
                            ));
                            slot += 1;
                        }
                    }
                }
                s.push(']');
                s
            })
            .collect();
        carriers.push(names);
        lookup.push(
            flat.iter()
                .cloned()
                .enumerate()
                .map(|(i, f)| (f, i))
                .collect::<HashMap<_, _>>(),
        );
        families.push(flat);
    }
    let mut exp = Exponential {
        object: crate::limits::terminal(&cat),
        exponent: a.clone(),
        codomain: b.clone(),
        offsets,
        families,
        lookup,
    };
    let mut action = Vec::with_capacity(cat.num_arrows());
    for (h, arr) in cat.arrows().iter().enumerate() {
        let (c, c2) = (arr.dom, arr.cod);
        let slots2 = exp.slots(c2);
        let map = (0..exp.families[c].len())
            .map(|t| {
                let fam: Vec<usize> = slots2
                    .iter()
                    .map(|&(f2, x)| exp.families[c][t][exp.slot(cat.then(h, f2), x)])
                    .collect();
                exp.lookup[c2][&fam]
            })
            .collect();
        action.push(map);
    }
    exp.object = Arc::new(Presheaf::new_unchecked(
        format!("{}^{}", b.name(), a.name()),
        cat,
        carriers,
        action,
    ));
    Ok(exp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::FinCategory;
    use crate::limits::product;
    use crate::nat::{enumerate_nat_trans, DEFAULT_BUDGET};

    fn set(names: &[&str]) -> Arc<Presheaf> {
        let base = Arc::new(FinCategory::trivial());
        Arc::new(
            Presheaf::new(
                "S",
                base,
                vec![names.iter().map(|s| s.to_string()).collect()],
                vec![(0..names.len()).collect()],
            )
            .unwrap(),
        )
    }

    #[test]
    fn set_exponential_counts() {
        let a = set(&["a1", "a2"]);
        let b = set(&["b1", "b2", "b3"]);
        let e = exponential(&a, &b, DEFAULT_BUDGET).unwrap();
        assert_eq!(e.object.sizes(), vec![9]);
    }

    #[test]
    fn transpose_round_trip_in_arrow_category() {
        let base = Arc::new(FinCategory::arrow_category());
        let y0 = crate::limits::representable(&base, 0);
        let one = crate::limits::terminal(&base);
        let two = crate::limits::coproduct(&one, &one).unwrap().object;
        let e = exponential(&y0, &two, DEFAULT_BUDGET).unwrap();
        e.object.check().unwrap();
        let x = two.clone();
        let xa = product(&x, &y0).unwrap();
        let maps = enumerate_nat_trans(&xa.object, &two, crate::nat::Filter::All).unwrap();
        assert!(!maps.is_empty());
        for h in &maps {
            let k = e.transpose(&x, h).unwrap();
            assert_eq!(&e.untranspose(&k).unwrap(), h);
        }
    }
}
