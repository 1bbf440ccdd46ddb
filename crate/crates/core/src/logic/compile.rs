//! Typechecking, producing a flat, scope-resolved program.

use super::signature::{FunSym, Signature};
use super::syntax::{fresh_name, LType, Term, TermKind};
use crate::error::{Result, ToposError};

pub type NodeId = usize;

/// How derived forms are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Every derived form is replaced by its definition before evaluation.
    #[default]
    Expand,
    /// Connectives use the Heyting operations of `Ω`, quantifiers are forced
    /// stage by stage.
    Direct,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Op {
    Star,
    /// De Bruijn level.
    Var(usize),
    Fun(usize, NodeId),
    FunName(usize),
    Apply(NodeId, NodeId),
    Tuple(Vec<NodeId>),
    /// 0-based.
    Proj(usize, NodeId),
    Comp(LType, NodeId),
    Eq(NodeId, NodeId),
    Mem(NodeId, NodeId),
    Compose(NodeId, NodeId),
    Identity,
    Top,
    Bot,
    And(NodeId, NodeId),
    Or(NodeId, NodeId),
    Imp(NodeId, NodeId),
    Not(NodeId),
    Forall(LType, NodeId),
    Exists(LType, NodeId),
}

#[derive(Debug, Clone)]
pub struct Node {
    pub op: Op,
    /// Normalized type of the node.
    pub ty: LType,
    /// Free variable levels, ascending.
    pub free: Vec<usize>,
    pub pos: usize,
}

/// A typechecked term: every subterm carries its type.
#[derive(Debug, Clone)]
pub struct Program {
    pub nodes: Vec<Node>,
    pub root: NodeId,
    pub funs: Vec<FunSym>,
    pub context: Vec<(String, LType)>,
    pub mode: Mode,
}

impl Program {
    pub fn ty(&self) -> &LType {
        &self.nodes[self.root].ty
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }
}

struct Compiler<'s> {
    sig: &'s Signature,
    mode: Mode,
    nodes: Vec<Node>,
    funs: Vec<(String, FunSym)>,
    scope: Vec<(String, LType)>,
    fresh: usize,
}

fn mismatch<T>(t: &Term, msg: String) -> Result<T> {
    Err(ToposError::TypeMismatch {
        pos: t.pos,
        msg: format!("{msg} in `{t}`"),
    })
}

impl Compiler<'_> {
    fn check_type(&self, ty: &LType, pos: usize) -> Result<LType> {
        let mut gs = Vec::new();
        ty.grounds(&mut gs);
        if let Some(g) = gs.into_iter().find(|g| !self.sig.has_ground(g)) {
            return Err(ToposError::UnknownSymbol { name: g, pos });
        }
        Ok(ty.normalize())
    }

    fn push(&mut self, op: Op, ty: LType, free: Vec<usize>, pos: usize) -> NodeId {
        self.nodes.push(Node { op, ty, free, pos });
        self.nodes.len() - 1
    }

    fn free_of(&self, ids: &[NodeId]) -> Vec<usize> {
        let mut v: Vec<usize> = ids.iter().flat_map(|&i| self.nodes[i].free.iter().copied()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    fn fun(&mut self, name: &str) -> Option<(usize, LType, LType)> {
        let f = self.sig.function(name)?;
        let (dom, cod) = (LType::ground(&f.dom), LType::ground(&f.cod));
        let idx = match self.funs.iter().position(|(n, _)| n == name) {
            Some(i) => i,
            None => {
                self.funs.push((name.to_string(), f.clone()));
                self.funs.len() - 1
            }
        };
        Some((idx, dom, cod))
    }

    fn lookup(&self, name: &str) -> Option<(usize, LType)> {
        self.scope
            .iter()
            .enumerate()
            .rev()
            .find(|(_, (n, _))| n == name)
            .map(|(i, (_, t))| (i, t.clone()))
    }

    fn expect(&self, t: &Term, id: NodeId, want: &LType) -> Result<()> {
        let got = &self.nodes[id].ty;
        if got != want {
            return mismatch(t, format!("expected type {want}, found {got}"));
        }
        Ok(())
    }

    fn binder(&mut self, x: &str, ty: &LType, body: &Term, pos: usize) -> Result<(LType, NodeId, Vec<usize>)> {
        let ty = self.check_type(ty, pos)?;
        let level = self.scope.len();
        self.scope.push((x.to_string(), ty.clone()));
        let b = self.term(body);
        self.scope.pop();
        let b = b?;
        let free = self.nodes[b].free.iter().copied().filter(|&k| k != level).collect();
        Ok((ty, b, free))
    }

    fn formula(&mut self, t: &Term) -> Result<NodeId> {
        let id = self.term(t)?;
        self.expect(t, id, &LType::Omega)?;
        Ok(id)
    }

    fn term(&mut self, t: &Term) -> Result<NodeId> {
        use TermKind::*;
        let pos = t.pos;
        match &t.kind {
            Star => Ok(self.push(Op::Star, LType::Unit, vec![], pos)),
            True => Ok(self.push(Op::Top, LType::Omega, vec![], pos)),
            False => Ok(self.push(Op::Bot, LType::Omega, vec![], pos)),
            Ident(x) => {
                if let Some((k, ty)) = self.lookup(x) {
                    return Ok(self.push(Op::Var(k), ty, vec![k], pos));
                }
                if let Some((i, dom, cod)) = self.fun(x) {
                    return Ok(self.push(Op::FunName(i), LType::exp(dom, cod), vec![], pos));
                }
                if self.sig.has_ground(x) {
                    let v = fresh_name(&mut self.fresh);
                    let full = Term::new(Comprehension(v, LType::ground(x), Box::new(Term::new(True, pos))), pos);
                    let full = full.desugar(self.mode == Mode::Expand, &mut self.fresh);
                    return self.term(&full);
                }
                Err(ToposError::UnknownSymbol { name: x.clone(), pos })
            }
            Apply(f, arg) => {
                let a = self.term(arg)?;
                if let Some((k, fty)) = self.lookup(f) {
                    let Some((dom, cod)) = fty.as_function() else {
                        return mismatch(t, format!("`{f}` has type {fty}, which is not a function type"));
                    };
                    self.expect(arg, a, &dom)?;
                    let fv = self.push(Op::Var(k), fty, vec![k], pos);
                    let free = self.free_of(&[fv, a]);
                    return Ok(self.push(Op::Apply(fv, a), cod, free, pos));
                }
                let Some((i, dom, cod)) = self.fun(f) else {
                    return Err(ToposError::UnknownSymbol { name: f.clone(), pos });
                };
                self.expect(arg, a, &dom)?;
                let free = self.nodes[a].free.clone();
                Ok(self.push(Op::Fun(i, a), cod, free, pos))
            }
            Tuple(ts) => {
                let ids = ts.iter().map(|s| self.term(s)).collect::<Result<Vec<_>>>()?;
                let ty = LType::Product(ids.iter().map(|&i| self.nodes[i].ty.clone()).collect()).normalize();
                let free = self.free_of(&ids);
                Ok(self.push(Op::Tuple(ids), ty, free, pos))
            }
            Proj(i, s) => {
                let id = self.term(s)?;
                let LType::Product(ts) = &self.nodes[id].ty else {
                    return mismatch(t, format!("projection from non-product type {}", self.nodes[id].ty));
                };
                if *i == 0 || *i > ts.len() {
                    return mismatch(t, format!("projection pi{i} out of range for {}", self.nodes[id].ty));
                }
                let ty = ts[i - 1].clone();
                let free = self.nodes[id].free.clone();
                Ok(self.push(Op::Proj(i - 1, id), ty, free, pos))
            }
            Comprehension(x, ty, body) => {
                let (ty, b, free) = self.binder(x, ty, body, pos)?;
                self.expect(body, b, &LType::Omega)?;
                Ok(self.push(Op::Comp(ty.clone(), b), LType::power(ty), free, pos))
            }
            Eq(l, r) => {
                let (a, b) = (self.term(l)?, self.term(r)?);
                let lt = self.nodes[a].ty.clone();
                self.expect(r, b, &lt)?;
                let free = self.free_of(&[a, b]);
                Ok(self.push(Op::Eq(a, b), LType::Omega, free, pos))
            }
            Mem(l, r) => {
                let (a, b) = (self.term(l)?, self.term(r)?);
                let want = LType::power(self.nodes[a].ty.clone());
                self.expect(r, b, &want)?;
                let free = self.free_of(&[a, b]);
                Ok(self.push(Op::Mem(a, b), LType::Omega, free, pos))
            }
            Compose(f, h) => {
                let (fi, hi) = (self.term(f)?, self.term(h)?);
                let Some((b1, c)) = self.nodes[fi].ty.as_function() else {
                    return mismatch(f, format!("expected a function type, found {}", self.nodes[fi].ty));
                };
                let Some((a, b2)) = self.nodes[hi].ty.as_function() else {
                    return mismatch(h, format!("expected a function type, found {}", self.nodes[hi].ty));
                };
                if b1 != b2 {
                    return mismatch(
                        t,
                        format!("cannot compose {} after {}", self.nodes[fi].ty, self.nodes[hi].ty),
                    );
                }
                let free = self.free_of(&[fi, hi]);
                Ok(self.push(Op::Compose(fi, hi), LType::exp(a, c).normalize(), free, pos))
            }
            Identity(ty) => {
                let ty = self.check_type(ty, pos)?;
                Ok(self.push(Op::Identity, LType::exp(ty.clone(), ty).normalize(), vec![], pos))
            }
            And(l, r) | Or(l, r) | Implies(l, r) => {
                let (a, b) = (self.formula(l)?, self.formula(r)?);
                let free = self.free_of(&[a, b]);
                let op = match &t.kind {
                    And(..) => Op::And(a, b),
                    Or(..) => Op::Or(a, b),
                    _ => Op::Imp(a, b),
                };
                Ok(self.push(op, LType::Omega, free, pos))
            }
            Not(p) => {
                let a = self.formula(p)?;
                let free = self.nodes[a].free.clone();
                Ok(self.push(Op::Not(a), LType::Omega, free, pos))
            }
            Forall(x, ty, body) | Exists(x, ty, body) => {
                let (ty, b, free) = self.binder(x, ty, body, pos)?;
                self.expect(body, b, &LType::Omega)?;
                let op = if matches!(t.kind, Forall(..)) {
                    Op::Forall(ty, b)
                } else {
                    Op::Exists(ty, b)
                };
                Ok(self.push(op, LType::Omega, free, pos))
            }
            Subset(l, r) | Union(l, r) | Inter(l, r) => {
                let mark = self.nodes.len();
                let (a, b) = (self.term(l)?, self.term(r)?);
                let lt = self.nodes[a].ty.clone();
                self.expect(r, b, &lt)?;
                let LType::Power(elem) = lt else {
                    return mismatch(t, format!("set operation on non-power type {lt}"));
                };
                self.nodes.truncate(mark);
                let full = t.desugar_set(&elem, self.mode == Mode::Expand, &mut self.fresh);
                self.term(&full)
            }
            Iff(..) | Empty(..) => {
                let full = t.desugar(self.mode == Mode::Expand, &mut self.fresh);
                self.term(&full)
            }
        }
    }
}

/// Typechecks `t` in the ordered context `ctx` and lowers it for evaluation.
pub fn compile(t: &Term, sig: &Signature, ctx: &[(String, LType)], mode: Mode) -> Result<Program> {
    let mut c = Compiler {
        sig,
        mode,
        nodes: Vec::new(),
        funs: Vec::new(),
        scope: Vec::new(),
        fresh: 0,
    };
    for (x, ty) in ctx {
        let ty = c.check_type(ty, 0)?;
        c.scope.push((x.clone(), ty));
    }
    let t = t.desugar(mode == Mode::Expand, &mut c.fresh);
    let root = c.term(&t)?;
    let context = c.scope.clone();
    Ok(Program {
        nodes: c.nodes,
        root,
        funs: c.funs.into_iter().map(|(_, f)| f).collect(),
        context,
        mode,
    })
}

/// The type of a closed term.
pub fn typecheck(t: &Term, sig: &Signature) -> Result<LType> {
    Ok(compile(t, sig, &[], Mode::Direct)?.ty().clone())
}
