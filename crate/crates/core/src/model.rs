//! Model files: a category and/or monoids, presheaves over them and
//! morphisms between those.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::category::{monoid_to_category, FinCategory, FinMonoid, RawCategory, RawMonoid};
use crate::error::{Result, ToposError};
use crate::limits::{initial, terminal};
use crate::logic::Signature;
use crate::nat::NatTrans;
use crate::omega::OmegaStructure;
use crate::presheaf::Presheaf;

/// Base name under which the model's `category` is referenced.
pub const CATEGORY: &str = "category";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPresheaf {
    pub base: String,
    pub carriers: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub action: BTreeMap<String, BTreeMap<String, String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMorphism {
    pub source: String,
    pub target: String,
    pub components: BTreeMap<String, BTreeMap<String, String>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawModel {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<RawCategory>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub monoids: BTreeMap<String, RawMonoid>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub presheaves: BTreeMap<String, RawPresheaf>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub morphisms: BTreeMap<String, RawMorphism>,
}

#[derive(Debug, Clone)]
pub struct Model {
    pub bases: BTreeMap<String, Arc<FinCategory>>,
    pub monoids: BTreeMap<String, FinMonoid>,
    pub presheaves: BTreeMap<String, Arc<Presheaf>>,
    pub morphisms: BTreeMap<String, NatTrans>,
    base_of: BTreeMap<String, String>,
}

impl Model {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawModel = serde_json::from_str(text).map_err(|e| ToposError::Malformed(e.to_string()))?;
        Self::from_raw(&raw)
    }

    pub fn from_raw(raw: &RawModel) -> Result<Self> {
        let mut bases = BTreeMap::new();
        if let Some(c) = &raw.category {
            bases.insert(CATEGORY.to_string(), Arc::new(FinCategory::validate(c)?));
        }
        let mut monoids = BTreeMap::new();
        for (name, m) in &raw.monoids {
            if bases.contains_key(name) {
                return Err(ToposError::DuplicateName(name.clone()));
            }
            let m = FinMonoid::from_raw(m)?;
            bases.insert(name.clone(), Arc::new(monoid_to_category(&m)));
            monoids.insert(name.clone(), m);
        }
        let mut presheaves = BTreeMap::new();
        let mut base_of = BTreeMap::new();
        for (name, p) in &raw.presheaves {
            let base = bases
                .get(&p.base)
                .ok_or_else(|| ToposError::UnknownName(p.base.clone()))?;
            presheaves.insert(
                name.clone(),
                Arc::new(Presheaf::from_tables(name, base.clone(), &p.carriers, &p.action)?),
            );
            base_of.insert(name.clone(), p.base.clone());
        }
        let mut morphisms = BTreeMap::new();
        for (name, m) in &raw.morphisms {
            let get = |n: &String| {
                presheaves
                    .get(n)
                    .cloned()
                    .ok_or_else(|| ToposError::UnknownName(n.clone()))
            };
            morphisms.insert(
                name.clone(),
                nat_from_tables(get(&m.source)?, get(&m.target)?, &m.components)?,
            );
        }
        Ok(Self {
            bases,
            monoids,
            presheaves,
            morphisms,
            base_of,
        })
    }

    pub fn to_raw(&self) -> RawModel {
        let category = self.bases.get(CATEGORY).map(|c| c.to_raw());
        let monoids = self.monoids.iter().map(|(n, m)| (n.clone(), m.to_raw())).collect();
        let presheaves = self
            .presheaves
            .iter()
            .map(|(n, p)| {
                let (carriers, action) = p.to_tables();
                (
                    n.clone(),
                    RawPresheaf {
                        base: self.base_of[n].clone(),
                        carriers,
                        action,
                    },
                )
            })
            .collect();
        let morphisms = self
            .morphisms
            .iter()
            .map(|(n, m)| {
                let name_of = |p: &Arc<Presheaf>| {
                    self.presheaves
                        .iter()
                        .find(|(_, q)| Arc::ptr_eq(q, p))
                        .map(|(k, _)| k.clone())
                        .unwrap_or_default()
                };
                (
                    n.clone(),
                    RawMorphism {
                        source: name_of(m.source()),
                        target: name_of(m.target()),
                        components: m.describe(),
                    },
                )
            })
            .collect();
        RawModel {
            category,
            monoids,
            presheaves,
            morphisms,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_raw()).expect("model serializes")
    }

    pub fn presheaf(&self, name: &str) -> Result<&Arc<Presheaf>> {
        self.presheaves
            .get(name)
            .ok_or_else(|| ToposError::UnknownName(name.to_string()))
    }

    /// Name of the base a presheaf lives over.
    pub fn base_name(&self, presheaf: &str) -> Option<&str> {
        self.base_of.get(presheaf).map(String::as_str)
    }

    /// The only base of the model, if there is exactly one.
    pub fn sole_base(&self) -> Option<&Arc<FinCategory>> {
        (self.bases.len() == 1).then(|| self.bases.values().next().expect("one base"))
    }

    /// A named presheaf, or `Omega`, `1`, `0` over the sole base (or over
    /// `base` written as `Omega@base`).
    pub fn object(&self, name: &str) -> Result<Arc<Presheaf>> {
        if let Some(p) = self.presheaves.get(name) {
            return Ok(p.clone());
        }
        let (head, base) = match name.split_once('@') {
            Some((h, b)) => (
                h,
                Some(
                    self.bases
                        .get(b)
                        .ok_or_else(|| ToposError::UnknownName(b.to_string()))?,
                ),
            ),
            None => (name, self.sole_base()),
        };
        let unknown = || ToposError::UnknownName(name.to_string());
        let base = base.ok_or_else(unknown)?;
        match head {
            "Omega" => Ok(OmegaStructure::new(base)?.omega.clone()),
            "1" => Ok(terminal(base)),
            "0" => Ok(initial(base)),
            _ => Err(unknown()),
        }
    }

    /// A signature over one base: every presheaf on it under its own name,
    /// each `(alias, object)` as an extra ground type, and every morphism
    /// between bound objects as a function symbol. The base is that of the
    /// first alias, or the sole base.
    pub fn signature(&self, aliases: &[(String, String)]) -> Result<Signature> {
        let bound = aliases
            .iter()
            .map(|(v, o)| Ok((v.clone(), self.object(o)?)))
            .collect::<Result<Vec<(String, Arc<Presheaf>)>>>()?;
        let base = match bound.first() {
            Some((_, p)) => p.base().clone(),
            None => self
                .sole_base()
                .cloned()
                .ok_or_else(|| ToposError::Malformed("model has several bases; bind an object to choose one".into()))?,
        };
        let mut sig = Signature::new(base.clone());
        for (name, p) in &self.presheaves {
            if Arc::ptr_eq(p.base(), &base) && !aliases.iter().any(|(v, _)| v == name) {
                sig.bind_ground(name.clone(), p.clone())?;
            }
        }
        for (var, p) in &bound {
            if !Arc::ptr_eq(p.base(), &base) {
                return Err(ToposError::BaseMismatch);
            }
            sig.bind_ground(var.clone(), p.clone())?;
        }
        let ground_name = |p: &Arc<Presheaf>| {
            bound
                .iter()
                .find(|(_, q)| Arc::ptr_eq(p, q))
                .map(|(v, _)| v.clone())
                .or_else(|| {
                    self.presheaves
                        .iter()
                        .find(|(_, q)| Arc::ptr_eq(p, q))
                        .map(|(n, _)| n.clone())
                })
        };
        for (name, m) in &self.morphisms {
            if let (Some(dom), Some(cod)) = (ground_name(m.source()), ground_name(m.target())) {
                if Arc::ptr_eq(m.source().base(), &base) {
                    sig.bind_function(name.clone(), &dom, &cod, m.clone())?;
                }
            }
        }
        Ok(sig)
    }
}

/// A natural transformation given by element names per object.
pub fn nat_from_tables(
    source: Arc<Presheaf>,
    target: Arc<Presheaf>,
    components: &BTreeMap<String, BTreeMap<String, String>>,
) -> Result<NatTrans> {
    if !source.same_base(&target) {
        return Err(ToposError::BaseMismatch);
    }
    let cat = source.base().clone();
    for k in components.keys() {
        cat.object_index(k).ok_or_else(|| ToposError::UnknownName(k.clone()))?;
    }
    let empty = BTreeMap::new();
    let comps = cat
        .objects()
        .iter()
        .enumerate()
        .map(|(c, o)| {
            let table = components.get(o).unwrap_or(&empty);
            for k in table.keys() {
                source
                    .element_index(c, k)
                    .ok_or_else(|| ToposError::UnknownName(k.clone()))?;
            }
            (0..source.size(c))
                .map(|x| {
                    let xn = source.element_name(c, x);
                    let y = table
                        .get(xn)
                        .ok_or_else(|| ToposError::BadComponent(format!("no image for `{xn}` at `{o}`")))?;
                    target
                        .element_index(c, y)
                        .ok_or_else(|| ToposError::UnknownName(y.clone()))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    NatTrans::new(source, target, comps)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ARROW: &str = r#"{
        "category": {
            "objects": ["0", "1"],
            "arrows": [{"name": "id0", "dom": "0", "cod": "0"}, {"name": "id1", "dom": "1", "cod": "1"},
                       {"name": "u", "dom": "0", "cod": "1"}]
        },
        "presheaves": {
            "X": {"base": "category", "carriers": {"0": [], "1": ["a1", "a2"]}},
            "Y": {"base": "category", "carriers": {"0": ["b1"], "1": ["b1"]}, "action": {"u": {"b1": "b1"}}}
        },
        "morphisms": {"F": {"source": "X", "target": "Y", "components": {"1": {"a1": "b1", "a2": "b1"}}}}
    }"#;

    #[test]
    fn loads_and_round_trips() {
        let m = Model::parse(ARROW).unwrap();
        assert_eq!(m.presheaf("X").unwrap().sizes(), vec![0, 2]);
        assert_eq!(m.object("Omega").unwrap().sizes(), vec![3, 2]);
        let again = Model::parse(&m.to_json()).unwrap();
        assert_eq!(again.to_raw(), m.to_raw());
        let sig = m.signature(&[("Z".into(), "X".into())]).unwrap();
        assert!(sig.has_ground("Z") && sig.has_ground("Y") && sig.function("F").is_some());
    }

    #[test]
    fn unknown_keys_and_bad_squares_are_rejected() {
        let extra = ARROW.replacen("\"presheaves\"", "\"extra\": 1, \"presheaves\"", 1);
        assert!(matches!(Model::parse(&extra), Err(ToposError::Malformed(_))));
        let broken = ARROW.replace(r#""action": {"u": {"b1": "b1"}}"#, r#""action": {"u": {}}"#);
        assert!(matches!(
            Model::parse(&broken),
            Err(ToposError::FunctorViolation { .. })
        ));
        let square = ARROW.replace(r#""1": {"a1": "b1", "a2": "b1"}"#, r#""1": {"a1": "b1"}"#);
        assert!(matches!(Model::parse(&square), Err(ToposError::BadComponent(_))));
        assert!(matches!(Model::parse(""), Err(ToposError::Malformed(_))));
    }
}
