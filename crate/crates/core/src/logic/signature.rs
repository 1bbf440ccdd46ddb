use std::collections::BTreeMap;
use std::sync::Arc;

use crate::category::FinCategory;
use crate::error::{Result, ToposError};
use crate::nat::NatTrans;
use crate::presheaf::Presheaf;

/// A function symbol `f : A -> B` between ground types, bound to a morphism.
#[derive(Debug, Clone)]
pub struct FunSym {
    pub dom: String,
    pub cod: String,
    pub map: NatTrans,
}

/// Interpretation of ground types and function symbols in `Sets^C`.
#[derive(Debug, Clone)]
pub struct Signature {
    base: Arc<FinCategory>,
    grounds: BTreeMap<String, Arc<Presheaf>>,
    functions: BTreeMap<String, FunSym>,
}

impl Signature {
    pub fn new(base: Arc<FinCategory>) -> Self {
        Self {
            base,
            grounds: BTreeMap::new(),
            functions: BTreeMap::new(),
        }
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    pub fn bind_ground(&mut self, name: impl Into<String>, p: Arc<Presheaf>) -> Result<&mut Self> {
        if **p.base() != *self.base {
            return Err(ToposError::BaseMismatch);
        }
        self.grounds.insert(name.into(), p);
        Ok(self)
    }

    pub fn bind_function(&mut self, name: impl Into<String>, dom: &str, cod: &str, map: NatTrans) -> Result<&mut Self> {
        let (a, b) = (self.ground(dom)?, self.ground(cod)?);
        if **map.source() != **a || **map.target() != **b {
            return Err(ToposError::BaseMismatch);
        }
        self.functions.insert(
            name.into(),
            FunSym {
                dom: dom.to_string(),
                cod: cod.to_string(),
                map,
            },
        );
        Ok(self)
    }

    pub fn with_ground(mut self, name: impl Into<String>, p: Arc<Presheaf>) -> Result<Self> {
        self.bind_ground(name, p)?;
        Ok(self)
    }

    pub fn with_function(mut self, name: impl Into<String>, dom: &str, cod: &str, map: NatTrans) -> Result<Self> {
        self.bind_function(name, dom, cod, map)?;
        Ok(self)
    }

    pub fn ground(&self, name: &str) -> Result<&Arc<Presheaf>> {
        self.grounds
            .get(name)
            .ok_or_else(|| ToposError::UnboundGround(name.to_string()))
    }

    pub fn has_ground(&self, name: &str) -> bool {
        self.grounds.contains_key(name)
    }

    pub fn function(&self, name: &str) -> Option<&FunSym> {
        self.functions.get(name)
    }

    pub fn function_index(&self, name: &str) -> Option<usize> {
        self.functions.keys().position(|k| k == name)
    }

    pub fn function_at(&self, i: usize) -> &FunSym {
        self.functions.values().nth(i).expect("function index in range")
    }

    pub fn grounds(&self) -> impl Iterator<Item = (&String, &Arc<Presheaf>)> {
        self.grounds.iter()
    }
}
