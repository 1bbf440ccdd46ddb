use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::category::FinCategory;
use crate::error::{Result, ToposError};

/// A functor from a finite category into finite sets.
///
/// `action[f]` maps indices of `carrier(dom f)` to indices of `carrier(cod f)`.
#[derive(Clone, PartialEq, Eq)]
pub struct Presheaf {
    name: String,
    base: Arc<FinCategory>,
    carriers: Vec<Vec<String>>,
    action: Vec<Vec<usize>>,
}

impl fmt::Debug for Presheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Presheaf")
            .field("name", &self.name)
            .field("carriers", &self.carriers)
            .field("action", &self.action)
            .finish()
    }
}

impl Presheaf {
    /// Validates functoriality and returns the presheaf.
    pub fn new(
        name: impl Into<String>,
        base: Arc<FinCategory>,
        carriers: Vec<Vec<String>>,
        action: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let p = Self {
            name: name.into(),
            base,
            carriers,
            action,
        };
        p.check()?;
        Ok(p)
    }

    /// Skips validation; for constructions that are functorial by design.
    pub(crate) fn new_unchecked(
        name: impl Into<String>,
        base: Arc<FinCategory>,
        carriers: Vec<Vec<String>>,
        action: Vec<Vec<usize>>,
    ) -> Self {
        let p = Self {
            name: name.into(),
            base,
            carriers,
            action,
        };
        debug_assert!(p.check().is_ok(), "{:?}", p.check());
        p
    }

    fn violation(&self, detail: String) -> ToposError {
        ToposError::FunctorViolation {
            presheaf: self.name.clone(),
            detail,
        }
    }

    pub fn check(&self) -> Result<()> {
        let cat = &*self.base;
        if self.carriers.len() != cat.num_objects() || self.action.len() != cat.num_arrows() {
            return Err(self.violation("table shape does not match the base category".into()));
        }
        for (c, carrier) in self.carriers.iter().enumerate() {
            let mut seen = std::collections::HashSet::new();
            for x in carrier {
                if !seen.insert(x) {
                    return Err(self.violation(format!("element `{x}` repeated at stage {}", cat.objects()[c])));
                }
            }
        }
        for (f, arrow) in cat.arrows().iter().enumerate() {
            let map = &self.action[f];
            if map.len() != self.carriers[arrow.dom].len() || map.iter().any(|&y| y >= self.carriers[arrow.cod].len()) {
                return Err(self.violation(format!("action of `{}` is not a function", arrow.name)));
            }
            if cat.is_identity(f) && map.iter().enumerate().any(|(x, &y)| x != y) {
                return Err(self.violation(format!("identity `{}` does not act trivially", arrow.name)));
            }
        }
        for f in 0..cat.num_arrows() {
            for &g in cat.out_of(cat.arrow(f).cod) {
                let gf = cat.then(f, g);
                for x in 0..self.carriers[cat.arrow(f).dom].len() {
                    if self.action[gf][x] != self.action[g][self.action[f][x]] {
                        return Err(self.violation(format!(
                            "action({}∘{}) ≠ action({})∘action({}) at `{}`",
                            cat.arrow(g).name,
                            cat.arrow(f).name,
                            cat.arrow(g).name,
                            cat.arrow(f).name,
                            self.carriers[cat.arrow(f).dom][x]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The constant presheaf: the same set at every stage, every arrow acting
    /// as the identity.
    pub fn constant(name: impl Into<String>, base: &Arc<FinCategory>, elements: &[&str]) -> Self {
        let n = base.num_objects();
        let carriers = vec![elements.iter().map(|e| e.to_string()).collect(); n];
        let action = vec![(0..elements.len()).collect(); base.num_arrows()];
        Self::new_unchecked(name, base.clone(), carriers, action)
    }

    /// Builds from name-keyed tables. Identity actions may be omitted.
    pub fn from_tables(
        name: impl Into<String>,
        base: Arc<FinCategory>,
        carriers: &BTreeMap<String, Vec<String>>,
        action: &BTreeMap<String, BTreeMap<String, String>>,
    ) -> Result<Self> {
        let name = name.into();
        let cat = base.clone();
        for k in carriers.keys() {
            cat.object_index(k).ok_or_else(|| ToposError::UnknownName(k.clone()))?;
        }
        for k in action.keys() {
            cat.arrow_index(k).ok_or_else(|| ToposError::UnknownName(k.clone()))?;
        }
        let stages: Vec<Vec<String>> = cat
            .objects()
            .iter()
            .map(|o| carriers.get(o).cloned().unwrap_or_default())
            .collect();
        let index: Vec<HashMap<&str, usize>> = stages
            .iter()
            .map(|s| s.iter().enumerate().map(|(i, x)| (x.as_str(), i)).collect())
            .collect();
        let mut maps = Vec::with_capacity(cat.num_arrows());
        for (f, arrow) in cat.arrows().iter().enumerate() {
            let table = action.get(&arrow.name);
            if table.is_none() && cat.is_identity(f) {
                maps.push((0..stages[arrow.dom].len()).collect());
                continue;
            }
            let empty = BTreeMap::new();
            let table = table.unwrap_or(&empty);
            for k in table.keys() {
                if !index[arrow.dom].contains_key(k.as_str()) {
                    return Err(ToposError::UnknownName(k.clone()));
                }
            }
            let mut map = Vec::with_capacity(stages[arrow.dom].len());
            for x in &stages[arrow.dom] {
                let y = table.get(x).ok_or_else(|| ToposError::FunctorViolation {
                    presheaf: name.clone(),
                    detail: format!("action of `{}` undefined on `{x}`", arrow.name),
                })?;
                let yi = *index[arrow.cod]
                    .get(y.as_str())
                    .ok_or_else(|| ToposError::UnknownName(y.clone()))?;
                map.push(yi);
            }
            maps.push(map);
        }
        Self::new(name, base, stages, maps)
    }

    /// Name-keyed tables (identity actions omitted).
    #[allow(clippy::type_complexity)]
    pub fn to_tables(
        &self,
    ) -> (
        BTreeMap<String, Vec<String>>,
        BTreeMap<String, BTreeMap<String, String>>,
    ) {
        let cat = &*self.base;
        let carriers = cat
            .objects()
            .iter()
            .zip(&self.carriers)
            .map(|(o, s)| (o.clone(), s.clone()))
            .collect();
        let mut action = BTreeMap::new();
        for (f, arrow) in cat.arrows().iter().enumerate() {
            if cat.is_identity(f) {
                continue;
            }
            let table = self.action[f]
                .iter()
                .enumerate()
                .map(|(x, &y)| (self.carriers[arrow.dom][x].clone(), self.carriers[arrow.cod][y].clone()))
                .collect();
            action.insert(arrow.name.clone(), table);
        }
        (carriers, action)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    pub fn same_base(&self, other: &Presheaf) -> bool {
        Arc::ptr_eq(&self.base, &other.base) || *self.base == *other.base
    }

    pub fn carrier(&self, c: usize) -> &[String] {
        &self.carriers[c]
    }

    pub fn carriers(&self) -> &[Vec<String>] {
        &self.carriers
    }

    pub fn size(&self, c: usize) -> usize {
        self.carriers[c].len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.carriers.iter().map(Vec::len).collect()
    }

    pub fn total_size(&self) -> usize {
        self.carriers.iter().map(Vec::len).sum()
    }

    /// Image of element `x` under arrow `f`.
    pub fn act(&self, f: usize, x: usize) -> usize {
        self.action[f][x]
    }

    pub fn action(&self, f: usize) -> &[usize] {
        &self.action[f]
    }

    pub fn element_name(&self, c: usize, x: usize) -> &str {
        &self.carriers[c][x]
    }

    pub fn element_index(&self, c: usize, name: &str) -> Option<usize> {
        self.carriers[c].iter().position(|x| x == name)
    }

    /// Every `(stage, element)` pair in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.carriers
            .iter()
            .enumerate()
            .flat_map(|(c, s)| (0..s.len()).map(move |x| (c, x)))
    }
}

pub(crate) fn require_same_base(a: &Presheaf, b: &Presheaf) -> Result<()> {
    if a.same_base(b) {
        Ok(())
    } else {
        Err(ToposError::BaseMismatch)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tables(
        carriers: &[(&str, &[&str])],
        action: &[(&str, &[(&str, &str)])],
    ) -> (
        BTreeMap<String, Vec<String>>,
        BTreeMap<String, BTreeMap<String, String>>,
    ) {
        (
            carriers
                .iter()
                .map(|(o, xs)| (o.to_string(), xs.iter().map(|x| x.to_string()).collect()))
                .collect(),
            action
                .iter()
                .map(|(f, m)| {
                    (
                        f.to_string(),
                        m.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
                    )
                })
                .collect(),
        )
    }

    #[test]
    fn empty_stages_are_legal() {
        let base = Arc::new(FinCategory::arrow_category());
        let (c, a) = tables(&[("0", &[]), ("1", &["x", "y"])], &[("u", &[])]);
        let p = Presheaf::from_tables("X", base, &c, &a).unwrap();
        assert_eq!(p.sizes(), vec![0, 2]);
        let (c2, a2) = p.to_tables();
        assert_eq!(c2, c);
        assert_eq!(a2, a);
    }

    #[test]
    fn undefined_action_rejected() {
        let base = Arc::new(FinCategory::arrow_category());
        let (c, a) = tables(&[("0", &["p"]), ("1", &["x"])], &[]);
        assert!(matches!(
            Presheaf::from_tables("X", base, &c, &a),
            Err(ToposError::FunctorViolation { .. })
        ));
    }

    #[test]
    fn composition_law_checked() {
        // Z/2 acting on {x, y}; m must square to the identity.
        let m = crate::category::FinMonoid::new(vec!["e".into(), "m".into()], 0, vec![0, 1, 1, 0]).unwrap();
        let base = Arc::new(crate::category::monoid_to_category(&m));
        let (c, a) = tables(&[("*", &["x", "y"])], &[("m", &[("x", "y"), ("y", "y")])]);
        assert!(Presheaf::from_tables("X", base.clone(), &c, &a).is_err());
        let (c, a) = tables(&[("*", &["x", "y"])], &[("m", &[("x", "y"), ("y", "x")])]);
        assert!(Presheaf::from_tables("X", base, &c, &a).is_ok());
    }
}
