use std::sync::Arc;

use crate::error::{Result, ToposError};
use crate::presheaf::{require_same_base, Presheaf};

/// Default cap on the number of objects any single enumeration may emit.
pub const DEFAULT_BUDGET: usize = 1_000_000;

/// A morphism of presheaves: one function per stage, natural in the arrows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NatTrans {
    source: Arc<Presheaf>,
    target: Arc<Presheaf>,
    components: Vec<Vec<usize>>,
}

impl NatTrans {
    pub fn new(source: Arc<Presheaf>, target: Arc<Presheaf>, components: Vec<Vec<usize>>) -> Result<Self> {
        require_same_base(&source, &target)?;
        let cat = source.base().clone();
        if components.len() != cat.num_objects() {
            return Err(ToposError::BadComponent("wrong number of stages".into()));
        }
        for (c, comp) in components.iter().enumerate() {
            if comp.len() != source.size(c) || comp.iter().any(|&y| y >= target.size(c)) {
                return Err(ToposError::BadComponent(format!("stage {}", cat.objects()[c])));
            }
        }
        for (f, arrow) in cat.arrows().iter().enumerate() {
            for x in 0..source.size(arrow.dom) {
                if components[arrow.cod][source.act(f, x)] != target.act(f, components[arrow.dom][x]) {
                    return Err(ToposError::NaturalityViolation {
                        arrow: arrow.name.clone(),
                        element: source.element_name(arrow.dom, x).to_string(),
                    });
                }
            }
        }
        Ok(Self {
            source,
            target,
            components,
        })
    }

    pub(crate) fn new_unchecked(source: Arc<Presheaf>, target: Arc<Presheaf>, components: Vec<Vec<usize>>) -> Self {
        Self {
            source,
            target,
            components,
        }
    }

    pub fn identity(p: &Arc<Presheaf>) -> Self {
        let components = (0..p.base().num_objects()).map(|c| (0..p.size(c)).collect()).collect();
        Self::new_unchecked(p.clone(), p.clone(), components)
    }

    pub fn source(&self) -> &Arc<Presheaf> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Presheaf> {
        &self.target
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn component(&self, c: usize) -> &[usize] {
        &self.components[c]
    }

    pub fn apply(&self, c: usize, x: usize) -> usize {
        self.components[c][x]
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &NatTrans) -> Result<NatTrans> {
        if *other.target != *self.source {
            return Err(ToposError::BaseMismatch);
        }
        let components = other
            .components
            .iter()
            .zip(&self.components)
            .map(|(inner, outer)| inner.iter().map(|&y| outer[y]).collect())
            .collect();
        Ok(Self::new_unchecked(
            other.source.clone(),
            self.target.clone(),
            components,
        ))
    }

    pub fn is_mono(&self) -> bool {
        self.components.iter().enumerate().all(|(c, comp)| {
            let mut seen = vec![false; self.target.size(c)];
            comp.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
        })
    }

    pub fn is_epi(&self) -> bool {
        self.components.iter().enumerate().all(|(c, comp)| {
            let mut seen = vec![false; self.target.size(c)];
            comp.iter().for_each(|&y| seen[y] = true);
            seen.into_iter().all(|s| s)
        })
    }

    pub fn is_iso(&self) -> bool {
        self.is_mono() && self.is_epi()
    }

    /// `{stage: {x: y}}` listing by element names.
    pub fn describe(&self) -> std::collections::BTreeMap<String, std::collections::BTreeMap<String, String>> {
        let cat = self.source.base();
        cat.objects()
            .iter()
            .enumerate()
            .map(|(c, o)| {
                let m = self.components[c]
                    .iter()
                    .enumerate()
                    .map(|(x, &y)| {
                        (
                            self.source.element_name(c, x).to_string(),
                            self.target.element_name(c, y).to_string(),
                        )
                    })
                    .collect();
                (o.clone(), m)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Filter {
    All,
    Mono,
    Epi,
    Iso,
}

/// All natural transformations `F → G` passing `filter`, in canonical
/// (lexicographic by component table) order.
pub fn enumerate_nat_trans(f: &Arc<Presheaf>, g: &Arc<Presheaf>, filter: Filter) -> Result<Vec<NatTrans>> {
    enumerate_nat_trans_within(f, g, filter, DEFAULT_BUDGET)
}

pub fn enumerate_nat_trans_within(
    f: &Arc<Presheaf>,
    g: &Arc<Presheaf>,
    filter: Filter,
    budget: usize,
) -> Result<Vec<NatTrans>> {
    let comps = enumerate_components(f, g, filter, budget)?;
    Ok(comps
        .into_iter()
        .map(|c| NatTrans::new_unchecked(f.clone(), g.clone(), c))
        .collect())
}

/// Raw component tables of every natural `F → G` passing `filter`.
pub fn enumerate_components(f: &Presheaf, g: &Presheaf, filter: Filter, budget: usize) -> Result<Vec<Vec<Vec<usize>>>> {
    require_same_base(f, g)?;
    let mut out = Vec::new();
    let mono = matches!(filter, Filter::Mono | Filter::Iso);
    let epi = matches!(filter, Filter::Epi | Filter::Iso);
    let n = f.base().num_objects();
    if mono && (0..n).any(|c| f.size(c) > g.size(c)) {
        return Ok(out);
    }
    if epi && (0..n).any(|c| f.size(c) == 0 && g.size(c) > 0) {
        return Ok(out);
    }
    let mut search = Search::new(f, g, mono);
    let mut overflow = false;
    search.run(&mut |assign: &[Vec<usize>]| {
        if epi && !is_surjective(assign, g) {
            return true;
        }
        if out.len() == budget {
            overflow = true;
            return false;
        }
        out.push(assign.to_vec());
        true
    });
    if overflow {
        return Err(ToposError::SizeBudgetExceeded {
            what: format!("Hom({}, {})", f.name(), g.name()),
            budget,
        });
    }
    Ok(out)
}

fn is_surjective(assign: &[Vec<usize>], g: &Presheaf) -> bool {
    assign.iter().enumerate().all(|(c, comp)| {
        let mut seen = vec![false; g.size(c)];
        comp.iter().for_each(|&y| seen[y] = true);
        seen.into_iter().all(|s| s)
    })
}

const UNSET: usize = usize::MAX;

/// Backtracking over stage-wise assignments; every choice is pushed along all
/// arrows so that naturality is maintained incrementally.
struct Search<'a> {
    f: &'a Presheaf,
    g: &'a Presheaf,
    mono: bool,
    assign: Vec<Vec<usize>>,
    used: Vec<Vec<bool>>,
    trail: Vec<(usize, usize)>,
    order: Vec<(usize, usize)>,
}

impl<'a> Search<'a> {
    fn new(f: &'a Presheaf, g: &'a Presheaf, mono: bool) -> Self {
        let n = f.base().num_objects();
        Self {
            f,
            g,
            mono,
            assign: (0..n).map(|c| vec![UNSET; f.size(c)]).collect(),
            used: (0..n).map(|c| vec![false; g.size(c)]).collect(),
            trail: Vec::new(),
            order: f.elements().collect(),
        }
    }

    fn run(&mut self, emit: &mut dyn FnMut(&[Vec<usize>]) -> bool) {
        self.go(0, emit);
    }

    fn go(&mut self, mut cursor: usize, emit: &mut dyn FnMut(&[Vec<usize>]) -> bool) -> bool {
        while cursor < self.order.len() {
            let (c, x) = self.order[cursor];
            if self.assign[c][x] == UNSET {
                break;
            }
            cursor += 1;
        }
        if cursor == self.order.len() {
            return emit(&self.assign);
        }
        let (c, x) = self.order[cursor];
        for y in 0..self.g.size(c) {
            let mark = self.trail.len();
            if self.propagate(c, x, y) && !self.go(cursor + 1, emit) {
                self.undo(mark);
                return false;
            }
            self.undo(mark);
        }
        true
    }

    fn propagate(&mut self, c: usize, x: usize, y: usize) -> bool {
        let cat = self.f.base().clone();
        let mut stack = vec![(c, x, y)];
        while let Some((c, x, y)) = stack.pop() {
            let cur = self.assign[c][x];
            if cur != UNSET {
                if cur != y {
                    return false;
                }
                continue;
            }
            if self.mono {
                if self.used[c][y] {
                    return false;
                }
                self.used[c][y] = true;
            }
            self.assign[c][x] = y;
            self.trail.push((c, x));
            for &a in cat.out_of(c) {
                if cat.is_identity(a) {
                    continue;
                }
                let d = cat.arrow(a).cod;
                stack.push((d, self.f.act(a, x), self.g.act(a, y)));
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (c, x) = self.trail.pop().expect("trail entry");
            if self.mono {
                self.used[c][self.assign[c][x]] = false;
            }
            self.assign[c][x] = UNSET;
        }
    }
}

/// Stage-wise function families filtered by naturality; the independent
/// brute-force count used to certify [`enumerate_nat_trans`].
pub fn brute_force_count(f: &Presheaf, g: &Presheaf) -> usize {
    let slots: Vec<(usize, usize)> = f.elements().collect();
    let mut assign: Vec<Vec<usize>> = (0..f.base().num_objects()).map(|c| vec![0; f.size(c)]).collect();
    if slots.iter().any(|&(c, _)| g.size(c) == 0) {
        return 0;
    }
    let cat = f.base().clone();
    let mut count = 0;
    loop {
        let natural =
            cat.arrows().iter().enumerate().all(|(a, arr)| {
                (0..f.size(arr.dom)).all(|x| assign[arr.cod][f.act(a, x)] == g.act(a, assign[arr.dom][x]))
            });
        if natural {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == slots.len() {
                return count;
            }
            let (c, x) = slots[i];
            assign[c][x] += 1;
            if assign[c][x] < g.size(c) {
                break;
            }
            assign[c][x] = 0;
            i += 1;
        }
    }
}
