//! Subfunctors and the Heyting algebra they form.

use std::sync::Arc;

use crate::error::{Result, ToposError};
use crate::limits::restrict;
use crate::nat::NatTrans;
use crate::presheaf::Presheaf;

/// A stage-wise subset of `host` closed under every arrow action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subfunctor {
    host: Arc<Presheaf>,
    part: Vec<Vec<bool>>,
}

impl Subfunctor {
    pub fn new(host: Arc<Presheaf>, part: Vec<Vec<bool>>) -> Result<Self> {
        let cat = host.base().clone();
        if part.len() != cat.num_objects() || part.iter().enumerate().any(|(c, p)| p.len() != host.size(c)) {
            return Err(ToposError::BadComponent("subfunctor shape".into()));
        }
        for (f, arr) in cat.arrows().iter().enumerate() {
            for x in 0..host.size(arr.dom) {
                if part[arr.dom][x] && !part[arr.cod][host.act(f, x)] {
                    return Err(ToposError::NotActionClosed {
                        arrow: arr.name.clone(),
                    });
                }
            }
        }
        Ok(Self { host, part })
    }

    pub(crate) fn new_unchecked(host: Arc<Presheaf>, part: Vec<Vec<bool>>) -> Self {
        Self { host, part }
    }

    pub fn empty(host: &Arc<Presheaf>) -> Self {
        let part = (0..host.base().num_objects())
            .map(|c| vec![false; host.size(c)])
            .collect();
        Self::new_unchecked(host.clone(), part)
    }

    pub fn full(host: &Arc<Presheaf>) -> Self {
        let part = (0..host.base().num_objects())
            .map(|c| vec![true; host.size(c)])
            .collect();
        Self::new_unchecked(host.clone(), part)
    }

    /// Least subfunctor containing the given elements.
    pub fn generated_by(host: &Arc<Presheaf>, seeds: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut s = Self::empty(host);
        s.close_up(seeds);
        s
    }

    fn close_up(&mut self, seeds: impl IntoIterator<Item = (usize, usize)>) {
        let cat = self.host.base().clone();
        let mut stack: Vec<(usize, usize)> = seeds.into_iter().collect();
        while let Some((c, x)) = stack.pop() {
            if std::mem::replace(&mut self.part[c][x], true) {
                continue;
            }
            for &f in cat.out_of(c) {
                stack.push((cat.arrow(f).cod, self.host.act(f, x)));
            }
        }
    }

    /// Image of a natural transformation into `host`.
    pub fn image(m: &NatTrans) -> Self {
        let host = m.target().clone();
        let mut part: Vec<Vec<bool>> = (0..host.base().num_objects())
            .map(|c| vec![false; host.size(c)])
            .collect();
        for (c, comp) in m.components().iter().enumerate() {
            for &y in comp {
                part[c][y] = true;
            }
        }
        Self::new_unchecked(host, part)
    }

    pub fn host(&self) -> &Arc<Presheaf> {
        &self.host
    }

    pub fn part(&self) -> &[Vec<bool>] {
        &self.part
    }

    pub fn contains(&self, c: usize, x: usize) -> bool {
        self.part[c][x]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.part.iter().map(|p| p.iter().filter(|&&b| b).count()).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.part.iter().all(|p| p.iter().all(|&b| !b))
    }

    pub fn is_full(&self) -> bool {
        self.part.iter().all(|p| p.iter().all(|&b| b))
    }

    pub fn le(&self, other: &Subfunctor) -> bool {
        self.part
            .iter()
            .zip(&other.part)
            .all(|(a, b)| a.iter().zip(b).all(|(&x, &y)| !x || y))
    }

    fn zip_with(&self, other: &Subfunctor, op: impl Fn(bool, bool) -> bool) -> Subfunctor {
        let part = self
            .part
            .iter()
            .zip(&other.part)
            .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| op(x, y)).collect())
            .collect();
        Self::new_unchecked(self.host.clone(), part)
    }

    pub fn meet(&self, other: &Subfunctor) -> Subfunctor {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn join(&self, other: &Subfunctor) -> Subfunctor {
        self.zip_with(other, |a, b| a || b)
    }

    /// `x ∈ (S ⇒ T)(c)` iff every image of `x` lying in `S` lies in `T`.
    pub fn implies(&self, other: &Subfunctor) -> Subfunctor {
        let cat = self.host.base().clone();
        let part = (0..cat.num_objects())
            .map(|c| {
                (0..self.host.size(c))
                    .map(|x| {
                        cat.out_of(c).iter().all(|&f| {
                            let d = cat.arrow(f).cod;
                            let y = self.host.act(f, x);
                            !self.part[d][y] || other.part[d][y]
                        })
                    })
                    .collect()
            })
            .collect();
        Self::new_unchecked(self.host.clone(), part)
    }

    pub fn negation(&self) -> Subfunctor {
        self.implies(&Self::empty(&self.host))
    }

    pub fn is_complemented(&self) -> bool {
        self.join(&self.negation()).is_full()
    }

    /// The subfunctor as a presheaf in its own right, with its inclusion.
    pub fn to_presheaf(&self, name: impl Into<String>) -> (Arc<Presheaf>, NatTrans) {
        let (p, incl) = restrict(&self.host, name.into(), &self.part);
        let p = Arc::new(p);
        let m = NatTrans::new_unchecked(p.clone(), self.host.clone(), incl);
        (p, m)
    }

    /// `{stage: [element, ...]}` by name.
    pub fn listing(&self) -> std::collections::BTreeMap<String, Vec<String>> {
        let cat = self.host.base();
        cat.objects()
            .iter()
            .enumerate()
            .map(|(c, o)| {
                let xs = (0..self.host.size(c))
                    .filter(|&x| self.part[c][x])
                    .map(|x| self.host.element_name(c, x).to_string())
                    .collect();
                (o.clone(), xs)
            })
            .collect()
    }
}

/// Every subfunctor of `host`, ordered lexicographically by membership
/// vector (so `∅` comes first and `host` last).
pub fn subobject_lattice(host: &Arc<Presheaf>, budget: usize) -> Result<Vec<Subfunctor>> {
    let cat = host.base().clone();
    let order: Vec<(usize, usize)> = host.elements().collect();
    let mut preimages: Vec<Vec<Vec<(usize, usize)>>> =
        (0..cat.num_objects()).map(|c| vec![Vec::new(); host.size(c)]).collect();
    for (c, x) in host.elements() {
        for &f in cat.out_of(c) {
            if !cat.is_identity(f) {
                preimages[cat.arrow(f).cod][host.act(f, x)].push((c, x));
            }
        }
    }
    // 0 = undecided, 1 = out, 2 = in
    let mut state: Vec<Vec<u8>> = (0..cat.num_objects()).map(|c| vec![0; host.size(c)]).collect();
    let mut out = Vec::new();
    let mut overflow = false;
    #[allow(clippy::too_many_arguments)]
    fn go(
        cursor: usize,
        order: &[(usize, usize)],
        state: &mut Vec<Vec<u8>>,
        host: &Presheaf,
        preimages: &[Vec<Vec<(usize, usize)>>],
        out: &mut Vec<Vec<Vec<bool>>>,
        budget: usize,
        overflow: &mut bool,
    ) {
        if *overflow {
            return;
        }
        let mut cursor = cursor;
        while cursor < order.len() && state[order[cursor].0][order[cursor].1] != 0 {
            cursor += 1;
        }
        if cursor == order.len() {
            if out.len() == budget {
                *overflow = true;
                return;
            }
            out.push(state.iter().map(|s| s.iter().map(|&v| v == 2).collect()).collect());
            return;
        }
        let (c, x) = order[cursor];
        for choice in [1u8, 2u8] {
            let mut trail = Vec::new();
            if assign(c, x, choice, state, host, preimages, &mut trail) {
                go(cursor + 1, order, state, host, preimages, out, budget, overflow);
            }
            for (c, x) in trail {
                state[c][x] = 0;
            }
        }
    }
    fn assign(
        c: usize,
        x: usize,
        choice: u8,
        state: &mut [Vec<u8>],
        host: &Presheaf,
        preimages: &[Vec<Vec<(usize, usize)>>],
        trail: &mut Vec<(usize, usize)>,
    ) -> bool {
        let cat = host.base();
        let mut stack = vec![(c, x)];
        while let Some((c, x)) = stack.pop() {
            match state[c][x] {
                0 => {
                    state[c][x] = choice;
                    trail.push((c, x));
                }
                v if v == choice => continue,
                _ => return false,
            }
            if choice == 2 {
                for &f in cat.out_of(c) {
                    stack.push((cat.arrow(f).cod, host.act(f, x)));
                }
            } else {
                stack.extend(preimages[c][x].iter().copied());
            }
        }
        true
    }
    go(0, &order, &mut state, host, &preimages, &mut out, budget, &mut overflow);
    if overflow {
        return Err(ToposError::SizeBudgetExceeded {
            what: format!("Sub({})", host.name()),
            budget,
        });
    }
    Ok(out
        .into_iter()
        .map(|p| Subfunctor::new_unchecked(host.clone(), p))
        .collect())
}

/// Brute-force oracle: every stage-wise subset, kept when action-closed.
pub fn brute_force_subobjects(host: &Arc<Presheaf>) -> Vec<Vec<Vec<bool>>> {
    let slots: Vec<(usize, usize)> = host.elements().collect();
    assert!(slots.len() <= 20, "oracle limited to 20 elements");
    let mut found = Vec::new();
    for mask in 0u32..(1 << slots.len()) {
        let mut part: Vec<Vec<bool>> = (0..host.base().num_objects())
            .map(|c| vec![false; host.size(c)])
            .collect();
        for (i, &(c, x)) in slots.iter().enumerate() {
            part[c][x] = mask & (1 << i) != 0;
        }
        if Subfunctor::new(host.clone(), part.clone()).is_ok() {
            found.push(part);
        }
    }
    found.sort();
    found
}
