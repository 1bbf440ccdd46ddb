//! Finite categories and finite monoids given by explicit tables.
//!
//! Composition is stored as `g∘f` ("f first, then g"). A presheaf over a
//! category is a covariant functor into finite sets, so the action of
//! `g∘f` is `action(g) ∘ action(f)`.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Result, ToposError};

/// Sieves are stored as `u64` masks over arrow indices.
pub const MAX_ARROWS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawArrow {
    pub name: String,
    pub dom: String,
    pub cod: String,
}

/// Category tables as they appear in model files.
///
/// `compose` maps `"g.f"` to the name of `g∘f`. Composites with an identity
/// may be omitted; they are filled in. When `identities` is absent, the
/// identity on `c` is the arrow named `id_c` or `idc`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCategory {
    pub objects: Vec<String>,
    pub arrows: Vec<RawArrow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identities: Option<BTreeMap<String, String>>,
    #[serde(default)]
    pub compose: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub dom: usize,
    pub cod: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinCategory {
    objects: Vec<String>,
    arrows: Vec<Arrow>,
    identity: Vec<usize>,
    comp: Vec<Option<usize>>,
    out: Vec<Vec<usize>>,
    hom: Vec<Vec<Vec<usize>>>,
    hom_pos: Vec<usize>,
}

impl FinCategory {
    /// Checks the raw tables and returns a certified category, or the first
    /// violated law.
    pub fn validate(raw: &RawCategory) -> Result<Self> {
        let mut obj_ix = HashMap::new();
        for (i, o) in raw.objects.iter().enumerate() {
            if obj_ix.insert(o.as_str(), i).is_some() {
                return Err(ToposError::DuplicateName(o.clone()));
            }
        }
        let mut arrows = Vec::with_capacity(raw.arrows.len());
        let mut arr_ix = HashMap::new();
        for a in &raw.arrows {
            let dom = *obj_ix
                .get(a.dom.as_str())
                .ok_or_else(|| ToposError::UnknownName(a.dom.clone()))?;
            let cod = *obj_ix
                .get(a.cod.as_str())
                .ok_or_else(|| ToposError::UnknownName(a.cod.clone()))?;
            if arr_ix.insert(a.name.as_str(), arrows.len()).is_some() {
                return Err(ToposError::DuplicateName(a.name.clone()));
            }
            arrows.push(Arrow {
                name: a.name.clone(),
                dom,
                cod,
            });
        }
        let mut identity = Vec::with_capacity(raw.objects.len());
        for o in &raw.objects {
            let name = match &raw.identities {
                Some(ids) => ids
                    .get(o)
                    .cloned()
                    .ok_or_else(|| ToposError::UnknownName(format!("identity of {o}")))?,
                None => [format!("id_{o}"), format!("id{o}")]
                    .into_iter()
                    .find(|n| arr_ix.contains_key(n.as_str()))
                    .ok_or_else(|| ToposError::UnknownName(format!("id_{o}")))?,
            };
            let ix = *arr_ix
                .get(name.as_str())
                .ok_or_else(|| ToposError::UnknownName(name.clone()))?;
            identity.push(ix);
        }
        if let Some(ids) = &raw.identities {
            if let Some(extra) = ids.keys().find(|k| !obj_ix.contains_key(k.as_str())) {
                return Err(ToposError::UnknownName(extra.clone()));
            }
        }
        let mut table = HashMap::new();
        for (key, h) in &raw.compose {
            let (g, f) = key
                .split_once('.')
                .ok_or_else(|| ToposError::UnknownName(key.clone()))?;
            let gi = *arr_ix.get(g).ok_or_else(|| ToposError::UnknownName(g.into()))?;
            let fi = *arr_ix.get(f).ok_or_else(|| ToposError::UnknownName(f.into()))?;
            let hi = *arr_ix
                .get(h.as_str())
                .ok_or_else(|| ToposError::UnknownName(h.clone()))?;
            table.insert((gi, fi), hi);
        }
        Self::from_parts(raw.objects.clone(), arrows, identity, |g, f| {
            table.get(&(g, f)).copied()
        })
    }

    /// Builds a category from indexed parts. Composites with identities that
    /// `compose` leaves undefined are filled in; everything else is checked.
    pub fn from_parts(
        objects: Vec<String>,
        arrows: Vec<Arrow>,
        identity: Vec<usize>,
        compose: impl Fn(usize, usize) -> Option<usize>,
    ) -> Result<Self> {
        let n = arrows.len();
        if n > MAX_ARROWS {
            return Err(ToposError::TooManyArrows {
                max: MAX_ARROWS,
                got: n,
            });
        }
        for (c, &id) in identity.iter().enumerate() {
            let a = &arrows[id];
            if a.dom != c || a.cod != c {
                return Err(ToposError::IdentityViolation {
                    arrow: a.name.clone(),
                    identity: a.name.clone(),
                });
            }
        }
        let name = |i: usize| arrows[i].name.clone();
        let mut comp = vec![None; n * n];
        for g in 0..n {
            for f in 0..n {
                let composable = arrows[f].cod == arrows[g].dom;
                let given = compose(g, f);
                let value = match (composable, given) {
                    (false, None) => None,
                    (false, Some(_)) => return Err(ToposError::SpuriousComposite { g: name(g), f: name(f) }),
                    (true, Some(h)) => Some(h),
                    (true, None) => {
                        if identity[arrows[g].dom] == g {
                            Some(f)
                        } else if identity[arrows[f].cod] == f {
                            Some(g)
                        } else {
                            return Err(ToposError::MissingComposite { g: name(g), f: name(f) });
                        }
                    }
                };
                if let Some(h) = value {
                    if h >= n || arrows[h].dom != arrows[f].dom || arrows[h].cod != arrows[g].cod {
                        return Err(ToposError::CompositeTyping {
                            g: name(g),
                            f: name(f),
                            h: if h < n { name(h) } else { h.to_string() },
                        });
                    }
                }
                comp[g * n + f] = value;
            }
        }
        for f in 0..n {
            let (d, c) = (arrows[f].dom, arrows[f].cod);
            if comp[identity[c] * n + f] != Some(f) {
                return Err(ToposError::IdentityViolation {
                    arrow: name(f),
                    identity: name(identity[c]),
                });
            }
            if comp[f * n + identity[d]] != Some(f) {
                return Err(ToposError::IdentityViolation {
                    arrow: name(f),
                    identity: name(identity[d]),
                });
            }
        }
        for f in 0..n {
            for g in 0..n {
                let Some(gf) = comp[g * n + f] else { continue };
                for h in 0..n {
                    let Some(hg) = comp[h * n + g] else { continue };
                    if comp[hg * n + f] != comp[h * n + gf] {
                        return Err(ToposError::AssociativityViolation {
                            h: name(h),
                            g: name(g),
                            f: name(f),
                        });
                    }
                }
            }
        }
        let k = objects.len();
        let mut out = vec![Vec::new(); k];
        let mut hom = vec![vec![Vec::new(); k]; k];
        let mut hom_pos = vec![0; n];
        for (i, a) in arrows.iter().enumerate() {
            out[a.dom].push(i);
            hom_pos[i] = hom[a.dom][a.cod].len();
            hom[a.dom][a.cod].push(i);
        }
        Ok(Self {
            objects,
            arrows,
            identity,
            comp,
            out,
            hom,
            hom_pos,
        })
    }

    /// One object, one arrow: presheaves over it are plain finite sets.
    pub fn trivial() -> Self {
        Self::from_parts(
            vec!["*".into()],
            vec![Arrow {
                name: "id".into(),
                dom: 0,
                cod: 0,
            }],
            vec![0],
            |_, _| Some(0),
        )
        .expect("trivial category")
    }

    /// The walking arrow `0 → 1` with arrows `id0, id1, u`.
    pub fn arrow_category() -> Self {
        Self::from_parts(
            vec!["0".into(), "1".into()],
            vec![
                Arrow {
                    name: "id0".into(),
                    dom: 0,
                    cod: 0,
                },
                Arrow {
                    name: "id1".into(),
                    dom: 1,
                    cod: 1,
                },
                Arrow {
                    name: "u".into(),
                    dom: 0,
                    cod: 1,
                },
            ],
            vec![0, 1],
            |_, _| None,
        )
        .expect("arrow category")
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn arrow(&self, i: usize) -> &Arrow {
        &self.arrows[i]
    }

    pub fn identity(&self, c: usize) -> usize {
        self.identity[c]
    }

    pub fn is_identity(&self, f: usize) -> bool {
        self.identity[self.arrows[f].dom] == f
    }

    /// `g∘f`, defined when `cod f = dom g`.
    pub fn compose(&self, g: usize, f: usize) -> Option<usize> {
        self.comp[g * self.arrows.len() + f]
    }

    /// `g∘f` for a pair the caller knows is composable.
    pub fn then(&self, f: usize, g: usize) -> usize {
        self.compose(g, f).expect("composable arrows")
    }

    /// Arrows with domain `c`, in declaration order.
    pub fn out_of(&self, c: usize) -> &[usize] {
        &self.out[c]
    }

    pub fn hom(&self, c: usize, d: usize) -> &[usize] {
        &self.hom[c][d]
    }

    /// Position of `f` inside `hom(dom f, cod f)`.
    pub fn hom_position(&self, f: usize) -> usize {
        self.hom_pos[f]
    }

    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn arrow_index(&self, name: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.name == name)
    }

    /// Mask of every arrow out of `c`: the maximal sieve.
    pub fn max_sieve(&self, c: usize) -> u64 {
        self.out[c].iter().fold(0, |m, &f| m | (1 << f))
    }

    pub fn to_raw(&self) -> RawCategory {
        let mut compose = BTreeMap::new();
        for g in 0..self.arrows.len() {
            for f in 0..self.arrows.len() {
                if self.is_identity(g) || self.is_identity(f) {
                    continue;
                }
                if let Some(h) = self.compose(g, f) {
                    compose.insert(
                        format!("{}.{}", self.arrows[g].name, self.arrows[f].name),
                        self.arrows[h].name.clone(),
                    );
                }
            }
        }
        RawCategory {
            objects: self.objects.clone(),
            arrows: self
                .arrows
                .iter()
                .map(|a| RawArrow {
                    name: a.name.clone(),
                    dom: self.objects[a.dom].clone(),
                    cod: self.objects[a.cod].clone(),
                })
                .collect(),
            identities: Some(
                self.objects
                    .iter()
                    .zip(&self.identity)
                    .map(|(o, &i)| (o.clone(), self.arrows[i].name.clone()))
                    .collect(),
            ),
            compose,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMonoid {
    pub elements: Vec<String>,
    pub unit: String,
    /// `"m.n"` ↦ `m⋆n`.
    pub table: BTreeMap<String, String>,
}

/// A finite monoid; `table[m * n + k]` is `m⋆k` for `n` elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinMonoid {
    elements: Vec<String>,
    unit: usize,
    table: Vec<usize>,
}

impl FinMonoid {
    pub fn new(elements: Vec<String>, unit: usize, table: Vec<usize>) -> Result<Self> {
        let n = elements.len();
        if unit >= n || table.len() != n * n || table.iter().any(|&x| x >= n) {
            return Err(ToposError::MonoidLaw("table is not a total operation".into()));
        }
        let m = Self { elements, unit, table };
        for a in 0..n {
            if m.op(unit, a) != a || m.op(a, unit) != a {
                return Err(ToposError::MonoidLaw(format!("unit law fails at {}", m.elements[a])));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if m.op(m.op(a, b), c) != m.op(a, m.op(b, c)) {
                        return Err(ToposError::MonoidLaw(format!(
                            "associativity fails at ({}, {}, {})",
                            m.elements[a], m.elements[b], m.elements[c]
                        )));
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn from_raw(raw: &RawMonoid) -> Result<Self> {
        let ix = |s: &str| {
            raw.elements
                .iter()
                .position(|e| e == s)
                .ok_or_else(|| ToposError::UnknownName(s.to_string()))
        };
        let n = raw.elements.len();
        let mut table = vec![usize::MAX; n * n];
        for (key, v) in &raw.table {
            let (a, b) = key
                .split_once('.')
                .ok_or_else(|| ToposError::UnknownName(key.clone()))?;
            table[ix(a)? * n + ix(b)?] = ix(v)?;
        }
        Self::new(raw.elements.clone(), ix(&raw.unit)?, table)
    }

    pub fn to_raw(&self) -> RawMonoid {
        let n = self.len();
        let mut table = BTreeMap::new();
        for a in 0..n {
            for b in 0..n {
                table.insert(
                    format!("{}.{}", self.elements[a], self.elements[b]),
                    self.elements[self.op(a, b)].clone(),
                );
            }
        }
        RawMonoid {
            elements: self.elements.clone(),
            unit: self.elements[self.unit].clone(),
            table,
        }
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    /// `a⋆b`.
    pub fn op(&self, a: usize, b: usize) -> usize {
        self.table[a * self.elements.len() + b]
    }

    /// `⟨{1..p}, max, 1⟩`.
    pub fn chain_join(p: usize) -> Self {
        let elements = (1..=p).map(|k| k.to_string()).collect();
        let table = (0..p * p).map(|i| (i / p).max(i % p)).collect();
        Self::new(elements, 0, table).expect("chain-join monoid")
    }

    /// One representative of every isomorphism class of monoids of order `n`.
    /// Element 0 is the unit; representatives are the lexicographically least
    /// table in their class.
    pub fn all_up_to_iso(n: usize) -> Vec<Self> {
        assert!(n >= 1);
        let names: Vec<String> = (0..n)
            .map(|i| if i == 0 { "e".into() } else { format!("m{i}") })
            .collect();
        let mut free = Vec::new();
        for a in 1..n {
            for b in 1..n {
                free.push((a, b));
            }
        }
        let mut reps: Vec<Vec<usize>> = Vec::new();
        let mut table = vec![0usize; n * n];
        for a in 0..n {
            table[a] = a;
            table[a * n] = a;
        }
        let perms = permutations_fixing_zero(n);
        let total = n.pow(free.len() as u32);
        for code in 0..total {
            let mut c = code;
            for &(a, b) in &free {
                table[a * n + b] = c % n;
                c /= n;
            }
            if !is_associative(&table, n) {
                continue;
            }
            let canonical = perms
                .iter()
                .map(|p| relabel(&table, n, p))
                .min()
                .expect("identity permutation");
            if !reps.contains(&canonical) {
                reps.push(canonical);
            }
        }
        reps.sort();
        reps.into_iter()
            .map(|t| Self::new(names.clone(), 0, t).expect("associative table"))
            .collect()
    }
}

fn is_associative(t: &[usize], n: usize) -> bool {
    (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| t[t[a * n + b] * n + c] == t[a * n + t[b * n + c]])))
}

fn relabel(t: &[usize], n: usize, p: &[usize]) -> Vec<usize> {
    let mut out = vec![0; n * n];
    for a in 0..n {
        for b in 0..n {
            out[p[a] * n + p[b]] = p[t[a * n + b]];
        }
    }
    out
}

fn permutations_fixing_zero(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, acc: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            acc.push(prefix.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            prefix.push(x);
            go(prefix, rest, acc);
            prefix.pop();
            rest.insert(i, x);
        }
    }
    let mut acc = Vec::new();
    go(&mut vec![0], &mut (1..n).collect(), &mut acc);
    acc
}

/// One-object category whose arrows are the monoid's elements, with
/// `g∘f = f⋆g`. A presheaf action then satisfies
/// `action(m⋆n) = action(n) ∘ action(m)`, i.e. a right action `x·m`.
pub fn monoid_to_category(m: &FinMonoid) -> FinCategory {
    let arrows = m
        .elements()
        .iter()
        .map(|e| Arrow {
            name: e.clone(),
            dom: 0,
            cod: 0,
        })
        .collect();
    FinCategory::from_parts(vec!["*".into()], arrows, vec![m.unit()], |g, f| Some(m.op(f, g)))
        .expect("monoid laws give category laws")
}
