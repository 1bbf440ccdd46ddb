//! Finite limits and colimits, computed stage-wise.

use std::sync::Arc;

use crate::category::FinCategory;
use crate::error::{Result, ToposError};
use crate::nat::NatTrans;
use crate::presheaf::{require_same_base, Presheaf};

pub fn terminal(base: &Arc<FinCategory>) -> Arc<Presheaf> {
    let n = base.num_objects();
    Arc::new(Presheaf::new_unchecked(
        "1",
        base.clone(),
        vec![vec!["*".to_string()]; n],
        vec![vec![0]; base.num_arrows()],
    ))
}

pub fn initial(base: &Arc<FinCategory>) -> Arc<Presheaf> {
    Arc::new(Presheaf::new_unchecked(
        "0",
        base.clone(),
        vec![Vec::new(); base.num_objects()],
        vec![Vec::new(); base.num_arrows()],
    ))
}

/// The unique map `X → 1`.
pub fn to_terminal(x: &Arc<Presheaf>) -> NatTrans {
    let one = terminal(x.base());
    let comps = (0..x.base().num_objects()).map(|c| vec![0; x.size(c)]).collect();
    NatTrans::new_unchecked(x.clone(), one, comps)
}

/// `Hom(c, −)`: stage `d` holds the arrows `c → d`.
pub fn representable(base: &Arc<FinCategory>, c: usize) -> Arc<Presheaf> {
    let cat = &**base;
    let carriers = (0..cat.num_objects())
        .map(|d| cat.hom(c, d).iter().map(|&f| cat.arrow(f).name.clone()).collect())
        .collect();
    let action = (0..cat.num_arrows())
        .map(|g| {
            let a = cat.arrow(g);
            cat.hom(c, a.dom)
                .iter()
                .map(|&f| cat.hom_position(cat.then(f, g)))
                .collect()
        })
        .collect();
    Arc::new(Presheaf::new_unchecked(
        format!("y({})", cat.objects()[c]),
        base.clone(),
        carriers,
        action,
    ))
}

/// Restriction of `host` to a stage-wise family closed under the action.
/// Returns the sub-presheaf and the index of each retained element in `host`.
pub(crate) fn restrict(host: &Presheaf, name: String, keep: &[Vec<bool>]) -> (Presheaf, Vec<Vec<usize>>) {
    let cat = host.base().clone();
    let mut old_of_new = Vec::with_capacity(cat.num_objects());
    let mut new_of_old = Vec::with_capacity(cat.num_objects());
    for c in 0..cat.num_objects() {
        let mut fwd = vec![usize::MAX; host.size(c)];
        let mut back = Vec::new();
        for x in 0..host.size(c) {
            if keep[c][x] {
                fwd[x] = back.len();
                back.push(x);
            }
        }
        old_of_new.push(back);
        new_of_old.push(fwd);
    }
    let carriers = old_of_new
        .iter()
        .enumerate()
        .map(|(c, xs)| xs.iter().map(|&x| host.element_name(c, x).to_string()).collect())
        .collect();
    let action = cat
        .arrows()
        .iter()
        .enumerate()
        .map(|(f, a)| {
            old_of_new[a.dom]
                .iter()
                .map(|&x| new_of_old[a.cod][host.act(f, x)])
                .collect()
        })
        .collect();
    (Presheaf::new_unchecked(name, cat, carriers, action), old_of_new)
}

#[derive(Debug, Clone)]
pub struct Product {
    pub object: Arc<Presheaf>,
    pub left: NatTrans,
    pub right: NatTrans,
}

impl Product {
    /// Index of `(a, b)` at stage `c`.
    pub fn index(&self, c: usize, a: usize, b: usize) -> usize {
        a * self.right.target().size(c) + b
    }

    /// `⟨f, g⟩ : X → A×B`.
    pub fn pair(&self, f: &NatTrans, g: &NatTrans) -> Result<NatTrans> {
        if f.source() != g.source() || f.target() != self.left.target() || g.target() != self.right.target() {
            return Err(ToposError::BaseMismatch);
        }
        let comps = (0..f.components().len())
            .map(|c| {
                f.component(c)
                    .iter()
                    .zip(g.component(c))
                    .map(|(&a, &b)| self.index(c, a, b))
                    .collect()
            })
            .collect();
        Ok(NatTrans::new_unchecked(f.source().clone(), self.object.clone(), comps))
    }
}

/// `A×B` with elements ordered lexicographically as `(a, b)`.
pub fn product(a: &Arc<Presheaf>, b: &Arc<Presheaf>) -> Result<Product> {
    require_same_base(a, b)?;
    let cat = a.base().clone();
    let mut carriers = Vec::new();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for c in 0..cat.num_objects() {
        let mut names = Vec::with_capacity(a.size(c) * b.size(c));
        let mut l = Vec::new();
        let mut r = Vec::new();
        for x in 0..a.size(c) {
            for y in 0..b.size(c) {
                names.push(format!("({},{})", a.element_name(c, x), b.element_name(c, y)));
                l.push(x);
                r.push(y);
            }
        }
        carriers.push(names);
        left.push(l);
        right.push(r);
    }
    let action = cat
        .arrows()
        .iter()
        .enumerate()
        .map(|(f, arr)| {
            let nb = b.size(arr.cod);
            (0..a.size(arr.dom))
                .flat_map(|x| (0..b.size(arr.dom)).map(move |y| (x, y)))
                .map(|(x, y)| a.act(f, x) * nb + b.act(f, y))
                .collect()
        })
        .collect();
    let object = Arc::new(Presheaf::new_unchecked(
        format!("{}×{}", a.name(), b.name()),
        cat,
        carriers,
        action,
    ));
    Ok(Product {
        left: NatTrans::new_unchecked(object.clone(), a.clone(), left),
        right: NatTrans::new_unchecked(object.clone(), b.clone(), right),
        object,
    })
}

/// `f×g : A×B → C×D`.
pub fn product_map(f: &NatTrans, g: &NatTrans) -> Result<(Product, Product, NatTrans)> {
    let dom = product(f.source(), g.source())?;
    let cod = product(f.target(), g.target())?;
    let l = f.compose(&dom.left)?;
    let r = g.compose(&dom.right)?;
    let m = cod.pair(&l, &r)?;
    Ok((dom, cod, m))
}

pub struct Coproduct {
    pub object: Arc<Presheaf>,
    pub left: NatTrans,
    pub right: NatTrans,
}

impl Coproduct {
    /// `[f, g] : A+B → X`.
    pub fn copair(&self, f: &NatTrans, g: &NatTrans) -> Result<NatTrans> {
        if f.target() != g.target() || f.source() != self.left.source() || g.source() != self.right.source() {
            return Err(ToposError::BaseMismatch);
        }
        let comps = (0..f.components().len())
            .map(|c| f.component(c).iter().chain(g.component(c)).copied().collect())
            .collect();
        Ok(NatTrans::new_unchecked(self.object.clone(), f.target().clone(), comps))
    }
}

/// `A+B`: the elements of `A` followed by those of `B`.
pub fn coproduct(a: &Arc<Presheaf>, b: &Arc<Presheaf>) -> Result<Coproduct> {
    require_same_base(a, b)?;
    let cat = a.base().clone();
    let carriers = (0..cat.num_objects())
        .map(|c| {
            a.carrier(c)
                .iter()
                .map(|x| format!("inl({x})"))
                .chain(b.carrier(c).iter().map(|y| format!("inr({y})")))
                .collect()
        })
        .collect();
    let action = cat
        .arrows()
        .iter()
        .enumerate()
        .map(|(f, arr)| {
            let na = a.size(arr.cod);
            a.action(f)
                .iter()
                .copied()
                .chain(b.action(f).iter().map(|&y| na + y))
                .collect()
        })
        .collect();
    let object = Arc::new(Presheaf::new_unchecked(
        format!("{}+{}", a.name(), b.name()),
        cat.clone(),
        carriers,
        action,
    ));
    let left = (0..cat.num_objects()).map(|c| (0..a.size(c)).collect()).collect();
    let right = (0..cat.num_objects())
        .map(|c| (0..b.size(c)).map(|y| a.size(c) + y).collect())
        .collect();
    Ok(Coproduct {
        left: NatTrans::new_unchecked(a.clone(), object.clone(), left),
        right: NatTrans::new_unchecked(b.clone(), object.clone(), right),
        object,
    })
}

/// A sub-presheaf together with its inclusion.
pub struct Equalizer {
    pub object: Arc<Presheaf>,
    pub inclusion: NatTrans,
}

impl Equalizer {
    /// Factors `h : X → A` through the inclusion, if `h` lands inside.
    pub fn mediate(&self, h: &NatTrans) -> Result<NatTrans> {
        let n = self.object.base().num_objects();
        let mut comps = Vec::with_capacity(n);
        for c in 0..n {
            let incl = self.inclusion.component(c);
            let mut comp = Vec::with_capacity(h.component(c).len());
            for &a in h.component(c) {
                let i = incl
                    .iter()
                    .position(|&z| z == a)
                    .ok_or_else(|| ToposError::BadComponent("map does not factor".into()))?;
                comp.push(i);
            }
            comps.push(comp);
        }
        Ok(NatTrans::new_unchecked(h.source().clone(), self.object.clone(), comps))
    }
}

pub fn equalizer(f: &NatTrans, g: &NatTrans) -> Result<Equalizer> {
    if f.source() != g.source() || f.target() != g.target() {
        return Err(ToposError::BaseMismatch);
    }
    let a = f.source();
    let keep: Vec<Vec<bool>> = (0..a.base().num_objects())
        .map(|c| (0..a.size(c)).map(|x| f.apply(c, x) == g.apply(c, x)).collect())
        .collect();
    let (object, incl) = restrict(a, format!("Eq({})", a.name()), &keep);
    let object = Arc::new(object);
    Ok(Equalizer {
        inclusion: NatTrans::new_unchecked(object.clone(), a.clone(), incl),
        object,
    })
}

pub struct Pullback {
    pub object: Arc<Presheaf>,
    pub left: NatTrans,
    pub right: NatTrans,
    product: Product,
    equalizer: Equalizer,
}

impl Pullback {
    /// The unique `X → P` for a commuting pair `p : X → A`, `q : X → B`.
    pub fn mediate(&self, p: &NatTrans, q: &NatTrans) -> Result<NatTrans> {
        let h = self.product.pair(p, q)?;
        self.equalizer.mediate(&h)
    }
}

/// Pullback of `f : A → C` and `g : B → C`, as the equalizer of
/// `f∘π₁, g∘π₂ : A×B → C`.
pub fn pullback(f: &NatTrans, g: &NatTrans) -> Result<Pullback> {
    if f.target() != g.target() {
        return Err(ToposError::BaseMismatch);
    }
    let prod = product(f.source(), g.source())?;
    let fl = f.compose(&prod.left)?;
    let gr = g.compose(&prod.right)?;
    let eq = equalizer(&fl, &gr)?;
    let left = prod.left.compose(&eq.inclusion)?;
    let right = prod.right.compose(&eq.inclusion)?;
    Ok(Pullback {
        object: eq.object.clone(),
        left,
        right,
        product: prod,
        equalizer: eq,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nat::{enumerate_nat_trans, Filter};

    #[test]
    fn representables_of_arrow_category() {
        let base = Arc::new(FinCategory::arrow_category());
        let y0 = representable(&base, 0);
        assert_eq!(y0.sizes(), vec![1, 1]);
        let y1 = representable(&base, 1);
        assert_eq!(y1.sizes(), vec![0, 1]);
        y0.check().unwrap();
        y1.check().unwrap();
    }

    #[test]
    fn product_with_terminal_is_iso() {
        let base = Arc::new(FinCategory::arrow_category());
        let y0 = representable(&base, 0);
        let p = product(&y0, &terminal(&base)).unwrap();
        p.object.check().unwrap();
        assert_eq!(enumerate_nat_trans(&p.object, &y0, Filter::Iso).unwrap().len(), 1);
    }

    #[test]
    fn initial_is_empty_everywhere() {
        let base = Arc::new(FinCategory::arrow_category());
        assert_eq!(initial(&base).sizes(), vec![0, 0]);
    }

    #[test]
    fn coproduct_and_pullback_are_functorial() {
        let base = Arc::new(FinCategory::arrow_category());
        let y0 = representable(&base, 0);
        let y1 = representable(&base, 1);
        let s = coproduct(&y0, &y1).unwrap();
        s.object.check().unwrap();
        assert_eq!(s.object.sizes(), vec![1, 2]);
        let f = enumerate_nat_trans(&y1, &y0, Filter::All).unwrap();
        assert_eq!(f.len(), 1);
        let pb = pullback(&f[0], &f[0]).unwrap();
        pb.object.check().unwrap();
        assert_eq!(pb.object.sizes(), vec![0, 1]);
    }
}
