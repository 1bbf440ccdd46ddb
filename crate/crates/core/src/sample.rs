//! Exhaustive and seeded random generation of presheaves over a base.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::category::FinCategory;
use crate::error::{Result, ToposError};
use crate::presheaf::Presheaf;

const UNSET: usize = usize::MAX;

/// Backtracking over action tables for fixed stage sizes.
struct ActionSearch<'a> {
    cat: &'a FinCategory,
    sizes: &'a [usize],
    arrows: Vec<usize>,
    table: Vec<Vec<usize>>,
}

impl<'a> ActionSearch<'a> {
    fn new(cat: &'a FinCategory, sizes: &'a [usize]) -> Self {
        let table = cat
            .arrows()
            .iter()
            .enumerate()
            .map(|(f, a)| {
                if cat.is_identity(f) {
                    (0..sizes[a.dom]).collect()
                } else {
                    vec![UNSET; sizes[a.dom]]
                }
            })
            .collect();
        let arrows = (0..cat.num_arrows()).filter(|&f| !cat.is_identity(f)).collect();
        Self {
            cat,
            sizes,
            arrows,
            table,
        }
    }

    /// Composition constraints whose entries are all assigned hold.
    fn consistent(&self) -> bool {
        let cat = self.cat;
        for &f in &self.arrows {
            let c = cat.arrow(f).cod;
            for &g in cat.out_of(c) {
                let gf = cat.then(f, g);
                for x in 0..self.sizes[cat.arrow(f).dom] {
                    let y = self.table[f][x];
                    if y == UNSET {
                        continue;
                    }
                    let (z, w) = (self.table[g][y], self.table[gf][x]);
                    if z != UNSET && w != UNSET && z != w {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn cells(&self) -> Vec<(usize, usize)> {
        self.arrows
            .iter()
            .flat_map(|&f| (0..self.sizes[self.cat.arrow(f).dom]).map(move |x| (f, x)))
            .collect()
    }

    fn all(&mut self, cells: &[(usize, usize)], out: &mut Vec<Vec<Vec<usize>>>, budget: usize) -> bool {
        let Some((&(f, x), rest)) = cells.split_first() else {
            if out.len() == budget {
                return false;
            }
            out.push(self.table.clone());
            return true;
        };
        for y in 0..self.sizes[self.cat.arrow(f).cod] {
            self.table[f][x] = y;
            if self.consistent() && !self.all(rest, out, budget) {
                self.table[f][x] = UNSET;
                return false;
            }
        }
        self.table[f][x] = UNSET;
        true
    }

    fn random(&mut self, cells: &[(usize, usize)], rng: &mut impl Rng) -> bool {
        let Some((&(f, x), rest)) = cells.split_first() else {
            return true;
        };
        let mut ys: Vec<usize> = (0..self.sizes[self.cat.arrow(f).cod]).collect();
        ys.shuffle(rng);
        for y in ys {
            self.table[f][x] = y;
            if self.consistent() && self.random(rest, rng) {
                return true;
            }
        }
        self.table[f][x] = UNSET;
        false
    }
}

fn build(base: &Arc<FinCategory>, name: String, sizes: &[usize], table: Vec<Vec<usize>>) -> Arc<Presheaf> {
    let carriers = base
        .objects()
        .iter()
        .zip(sizes)
        .map(|(o, &n)| (0..n).map(|i| format!("{o}.{i}")).collect())
        .collect();
    Arc::new(Presheaf::new_unchecked(name, base.clone(), carriers, table))
}

/// Every presheaf (labelled, not up to isomorphism) whose stages have at
/// most `max_stage` elements, in canonical order.
pub fn all_presheaves(base: &Arc<FinCategory>, max_stage: usize, budget: usize) -> Result<Vec<Arc<Presheaf>>> {
    let n = base.num_objects();
    let mut out = Vec::new();
    let mut sizes = vec![0; n];
    loop {
        let mut search = ActionSearch::new(base, &sizes);
        let cells = search.cells();
        let mut tables = Vec::new();
        if !search.all(&cells, &mut tables, budget.saturating_sub(out.len())) {
            return Err(ToposError::SizeBudgetExceeded {
                what: "presheaf enumeration".into(),
                budget,
            });
        }
        for t in tables {
            let name = format!("P{}", out.len());
            out.push(build(base, name, &sizes, t));
        }
        let mut i = 0;
        loop {
            if i == n {
                return Ok(out);
            }
            sizes[i] += 1;
            if sizes[i] <= max_stage {
                break;
            }
            sizes[i] = 0;
            i += 1;
        }
    }
}

/// A random presheaf with stages of at most `max_stage` elements.
pub fn random_presheaf(base: &Arc<FinCategory>, max_stage: usize, rng: &mut impl Rng, name: &str) -> Arc<Presheaf> {
    loop {
        let sizes: Vec<usize> = (0..base.num_objects()).map(|_| rng.gen_range(0..=max_stage)).collect();
        let mut search = ActionSearch::new(base, &sizes);
        let cells = search.cells();
        if search.random(&cells, rng) {
            return build(base, name.to_string(), &sizes, search.table);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{monoid_to_category, FinMonoid};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn arrow_category_presheaves_up_to_two() {
        let base = Arc::new(FinCategory::arrow_category());
        let all = all_presheaves(&base, 2, 1000).unwrap();
        // sum over (n0, n1) of n1^n0
        let expected: usize = (0..=2u32).flat_map(|a| (0..=2usize).map(move |b| b.pow(a))).sum();
        assert_eq!(all.len(), expected);
        for p in &all {
            p.check().unwrap();
        }
    }

    #[test]
    fn random_presheaves_are_functors() {
        let m = FinMonoid::all_up_to_iso(3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for monoid in &m {
            let base = Arc::new(monoid_to_category(monoid));
            for _ in 0..5 {
                random_presheaf(&base, 3, &mut rng, "R").check().unwrap();
            }
        }
    }
}
