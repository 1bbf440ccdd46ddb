//! Denotational evaluation, stage by stage.
//!
//! A value of type `T` at stage `c` is an element of `[T](c)`: an index for
//! `1`, `Ω` and ground types, a tuple for products, and for `A -> B` the
//! natural family `(f : c → d, a ∈ [A](d)) ↦ [B](d)` listed in slot order.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;
use std::sync::Arc;

use super::compile::{compile, Mode, NodeId, Op, Program};
use super::signature::Signature;
use super::syntax::{LType, Term};
use crate::category::FinCategory;
use crate::error::{Result, ToposError};
use crate::exponential::exponential;
use crate::limits::terminal;
use crate::nat::{NatTrans, DEFAULT_BUDGET};
use crate::omega::OmegaStructure;
use crate::presheaf::Presheaf;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Idx(u32),
    Tuple(Rc<[Value]>),
    Fam(Rc<[Value]>),
}

impl Value {
    pub fn idx(&self) -> usize {
        match self {
            Value::Idx(i) => *i as usize,
            other => panic!("expected an index value, found {other:?}"),
        }
    }

    fn items(&self) -> &[Value] {
        match self {
            Value::Tuple(v) | Value::Fam(v) => v,
            Value::Idx(_) => panic!("expected a compound value"),
        }
    }
}

type TypeId = usize;

#[derive(Debug)]
enum Kind {
    Unit,
    Omega,
    Ground(Arc<Presheaf>),
    Product(Vec<TypeId>),
    Func(TypeId, TypeId),
}

/// A type enumerated as a presheaf, with its values listed stage by stage.
#[derive(Debug)]
pub struct Carrier {
    pub presheaf: Arc<Presheaf>,
    values: Vec<Vec<Value>>,
    index: Vec<HashMap<Value, usize>>,
    /// `offsets[c][d]`: first slot of the stage-`d` block in a stage-`c`
    /// family with this type as domain.
    offsets: Vec<Vec<usize>>,
}

impl Carrier {
    pub fn values(&self, c: usize) -> &[Value] {
        &self.values[c]
    }

    pub fn index_of(&self, c: usize, v: &Value) -> usize {
        match v {
            Value::Idx(i) => *i as usize,
            _ => self.index[c][v],
        }
    }
}

struct TypeInfo {
    ty: LType,
    kind: Kind,
    carrier: Option<Rc<Carrier>>,
    /// For function types, per arrow `h`: slot of the source family read
    /// into each slot of the restricted family.
    reindex: Vec<Option<Rc<[usize]>>>,
}

/// The interpretation of all types of a signature, built lazily.
pub struct Universe<'s> {
    sig: &'s Signature,
    base: Arc<FinCategory>,
    pub omega: OmegaStructure,
    budget: usize,
    types: RefCell<Vec<TypeInfo>>,
    ids: RefCell<HashMap<LType, TypeId>>,
}

impl<'s> Universe<'s> {
    pub fn new(sig: &'s Signature) -> Result<Self> {
        Self::with_budget(sig, DEFAULT_BUDGET)
    }

    pub fn with_budget(sig: &'s Signature, budget: usize) -> Result<Self> {
        let base = sig.base().clone();
        let omega = OmegaStructure::new(&base)?;
        Ok(Self {
            sig,
            base,
            omega,
            budget,
            types: RefCell::new(Vec::new()),
            ids: RefCell::new(HashMap::new()),
        })
    }

    pub fn signature(&self) -> &Signature {
        self.sig
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    fn type_id(&self, ty: &LType) -> Result<TypeId> {
        let ty = ty.normalize();
        if let Some(&id) = self.ids.borrow().get(&ty) {
            return Ok(id);
        }
        let kind = match &ty {
            LType::Unit => Kind::Unit,
            LType::Omega => Kind::Omega,
            LType::Ground(g) => Kind::Ground(self.sig.ground(g)?.clone()),
            LType::Product(ts) => Kind::Product(ts.iter().map(|t| self.type_id(t)).collect::<Result<_>>()?),
            LType::Power(a) => Kind::Func(self.type_id(a)?, self.type_id(&LType::Omega)?),
            LType::Exp(a, b) => Kind::Func(self.type_id(a)?, self.type_id(b)?),
        };
        let mut types = self.types.borrow_mut();
        types.push(TypeInfo {
            ty: ty.clone(),
            kind,
            carrier: None,
            reindex: vec![None; self.base.num_arrows()],
        });
        let id = types.len() - 1;
        self.ids.borrow_mut().insert(ty, id);
        Ok(id)
    }

    pub fn carrier_of(&self, ty: &LType) -> Result<Rc<Carrier>> {
        let id = self.type_id(ty)?;
        self.carrier(id)
    }

    fn carrier(&self, id: TypeId) -> Result<Rc<Carrier>> {
        if let Some(c) = &self.types.borrow()[id].carrier {
            return Ok(c.clone());
        }
        let built = Rc::new(self.build_carrier(id)?);
        self.types.borrow_mut()[id].carrier = Some(built.clone());
        Ok(built)
    }

    fn build_carrier(&self, id: TypeId) -> Result<Carrier> {
        let cat = &*self.base;
        let n = cat.num_objects();
        let (presheaf, values): (Arc<Presheaf>, Vec<Vec<Value>>) = {
            let types = self.types.borrow();
            match &types[id].kind {
                Kind::Unit => (terminal(&self.base), vec![vec![Value::Idx(0)]; n]),
                Kind::Omega => (self.omega.omega.clone(), indices(&self.omega.omega)),
                Kind::Ground(p) => (p.clone(), indices(p)),
                Kind::Product(ts) => {
                    let ts = ts.clone();
                    let name = types[id].ty.to_string();
                    drop(types);
                    let factors = ts.iter().map(|&t| self.carrier(t)).collect::<Result<Vec<_>>>()?;
                    self.product_carrier(name, &factors)?
                }
                &Kind::Func(a, b) => {
                    drop(types);
                    let (ca, cb) = (self.carrier(a)?, self.carrier(b)?);
                    let ex = exponential(&ca.presheaf, &cb.presheaf, self.budget)?;
                    let values = (0..n)
                        .map(|c| {
                            let slots = ex.slots(c);
                            (0..ex.object.size(c))
                                .map(|t| {
                                    let fam = ex.family(c, t);
                                    Value::Fam(
                                        slots
                                            .iter()
                                            .zip(fam)
                                            .map(|(&(f, _), &y)| cb.values[cat.arrow(f).cod][y].clone())
                                            .collect(),
                                    )
                                })
                                .collect()
                        })
                        .collect();
                    (ex.object.clone(), values)
                }
            }
        };
        let index = values
            .iter()
            .map(|vs| vs.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect())
            .collect();
        let offsets = (0..n)
            .map(|c| {
                let mut off = 0;
                (0..n)
                    .map(|d| {
                        let here = off;
                        off += cat.hom(c, d).len() * presheaf.size(d);
                        here
                    })
                    .collect()
            })
            .collect();
        Ok(Carrier {
            presheaf,
            values,
            index,
            offsets,
        })
    }

    fn product_carrier(&self, name: String, factors: &[Rc<Carrier>]) -> Result<(Arc<Presheaf>, Vec<Vec<Value>>)> {
        let cat = &*self.base;
        let n = cat.num_objects();
        let mut values = Vec::with_capacity(n);
        let mut carriers = Vec::with_capacity(n);
        for c in 0..n {
            let total = factors
                .iter()
                .try_fold(1usize, |acc, f| acc.checked_mul(f.presheaf.size(c)));
            if total.is_none_or(|t| t > self.budget) {
                return Err(ToposError::SizeBudgetExceeded {
                    what: format!("stage {} of {name}", cat.objects()[c]),
                    budget: self.budget,
                });
            }
            let mut stage = vec![Vec::new()];
            for f in factors {
                stage = stage
                    .into_iter()
                    .flat_map(|prefix: Vec<usize>| {
                        (0..f.presheaf.size(c)).map(move |x| {
                            let mut p = prefix.clone();
                            p.push(x);
                            p
                        })
                    })
                    .collect();
            }
            carriers.push(
                stage
                    .iter()
                    .map(|tup| {
                        let parts: Vec<&str> = tup
                            .iter()
                            .zip(factors)
                            .map(|(&x, f)| f.presheaf.element_name(c, x))
                            .collect();
                        format!("({})", parts.join(","))
                    })
                    .collect::<Vec<_>>(),
            );
            values.push(
                stage
                    .iter()
                    .map(|tup| Value::Tuple(tup.iter().zip(factors).map(|(&x, f)| f.values[c][x].clone()).collect()))
                    .collect::<Vec<_>>(),
            );
        }
        let radix = |c: usize, tup: &[usize]| {
            tup.iter()
                .zip(factors)
                .fold(0, |acc, (&x, f)| acc * f.presheaf.size(c) + x)
        };
        let mut action = Vec::with_capacity(cat.num_arrows());
        for (h, arr) in cat.arrows().iter().enumerate() {
            let map = values[arr.dom]
                .iter()
                .map(|v: &Value| {
                    let moved: Vec<usize> = v
                        .items()
                        .iter()
                        .zip(factors)
                        .map(|(x, f)| f.presheaf.act(h, f.index_of(arr.dom, x)))
                        .collect();
                    radix(arr.cod, &moved)
                })
                .collect();
            action.push(map);
        }
        let p = Presheaf::new_unchecked(name, self.base.clone(), carriers, action);
        Ok((Arc::new(p), values))
    }

    fn reindex(&self, fid: TypeId, dom: TypeId, h: usize) -> Result<Rc<[usize]>> {
        if let Some(r) = &self.types.borrow()[fid].reindex[h] {
            return Ok(r.clone());
        }
        let cat = &*self.base;
        let ca = self.carrier(dom)?;
        let arr = cat.arrow(h);
        let (c, c2) = (arr.dom, arr.cod);
        let mut r = Vec::new();
        for d in 0..cat.num_objects() {
            for &g in cat.hom(c2, d) {
                let gh = cat.then(h, g);
                let base = ca.offsets[c][d] + cat.hom_position(gh) * ca.presheaf.size(d);
                r.extend((0..ca.presheaf.size(d)).map(|a| base + a));
            }
        }
        let r: Rc<[usize]> = r.into();
        self.types.borrow_mut()[fid].reindex[h] = Some(r.clone());
        Ok(r)
    }

    /// Restriction of `v ∈ [T](dom h)` along `h`.
    fn restrict(&self, tid: TypeId, v: &Value, h: usize) -> Result<Value> {
        if self.base.is_identity(h) {
            return Ok(v.clone());
        }
        let kind = {
            let types = self.types.borrow();
            match &types[tid].kind {
                Kind::Unit => return Ok(v.clone()),
                Kind::Omega => return Ok(Value::Idx(self.omega.omega.act(h, v.idx()) as u32)),
                Kind::Ground(p) => return Ok(Value::Idx(p.act(h, v.idx()) as u32)),
                Kind::Product(ts) => Err(ts.clone()),
                &Kind::Func(a, _) => Ok(a),
            }
        };
        match kind {
            Err(ts) => {
                let items = v.items();
                Ok(Value::Tuple(
                    ts.iter()
                        .zip(items)
                        .map(|(&t, x)| self.restrict(t, x, h))
                        .collect::<Result<Rc<[Value]>>>()?,
                ))
            }
            Ok(a) => {
                let r = self.reindex(tid, a, h)?;
                let items = v.items();
                Ok(Value::Fam(r.iter().map(|&i| items[i].clone()).collect()))
            }
        }
    }

    fn func_parts(&self, tid: TypeId) -> (TypeId, TypeId) {
        match self.types.borrow()[tid].kind {
            Kind::Func(a, b) => (a, b),
            _ => panic!("expected a function type"),
        }
    }

    /// Evaluates a compiled program at stage `c` with the given context values.
    pub fn eval(&self, prog: &Program, c: usize, env: &[Value]) -> Result<Value> {
        let mut ev = Evaluator::new(self, prog)?;
        let mut scope = ev.context_types.clone();
        ev.eval(prog.root, c, env, &mut scope)
    }

    /// The morphism `[[Γ]] → [[T]]` denoted by a compiled program.
    pub fn denote_program(&self, prog: &Program) -> Result<NatTrans> {
        let ctx_ty = LType::Product(prog.context.iter().map(|(_, t)| t.clone()).collect());
        let ctx = self.carrier_of(&ctx_ty)?;
        let out = self.carrier_of(prog.ty())?;
        let mut ev = Evaluator::new(self, prog)?;
        let single = prog.context.len() == 1;
        let mut comps = Vec::with_capacity(self.base.num_objects());
        for c in 0..self.base.num_objects() {
            let mut comp = Vec::with_capacity(ctx.values[c].len());
            for v in &ctx.values[c] {
                let env: Vec<Value> = match v {
                    _ if single => vec![v.clone()],
                    Value::Tuple(items) => items.to_vec(),
                    _ => Vec::new(),
                };
                let mut scope = ev.context_types.clone();
                let r = ev.eval(prog.root, c, &env, &mut scope)?;
                comp.push(out.index_of(c, &r));
            }
            comps.push(comp);
        }
        NatTrans::new(ctx.presheaf.clone(), out.presheaf.clone(), comps)
    }

    pub fn denote(&self, t: &Term, ctx: &[(String, LType)], mode: Mode) -> Result<NatTrans> {
        let prog = compile(t, self.sig, ctx, mode)?;
        self.denote_program(&prog)
    }

    /// Truth value of a closed sentence.
    pub fn truth(&self, t: &Term, mode: Mode) -> Result<TruthValue> {
        let prog = compile(t, self.sig, &[], mode)?;
        if *prog.ty() != LType::Omega {
            return Err(ToposError::TypeMismatch {
                pos: t.pos,
                msg: format!("expected a sentence, found type {}", prog.ty()),
            });
        }
        let value = self.denote_program(&prog)?;
        let forced: Vec<bool> = value
            .components()
            .iter()
            .enumerate()
            .map(|(c, comp)| comp[0] == self.omega.top_index(c))
            .collect();
        Ok(TruthValue {
            value,
            is_top: forced.iter().all(|&b| b),
            forced,
        })
    }
}

fn indices(p: &Presheaf) -> Vec<Vec<Value>> {
    (0..p.base().num_objects())
        .map(|c| (0..p.size(c) as u32).map(Value::Idx).collect())
        .collect()
}

/// A global element `1 → Ω`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthValue {
    pub value: NatTrans,
    pub is_top: bool,
    /// Whether the maximal sieve is named at each stage.
    pub forced: Vec<bool>,
}

impl TruthValue {
    /// The sieve named at each stage.
    pub fn sieves(&self) -> std::collections::BTreeMap<String, String> {
        let om = self.value.target();
        om.base()
            .objects()
            .iter()
            .enumerate()
            .map(|(c, o)| (o.clone(), om.element_name(c, self.value.apply(c, 0)).to_string()))
            .collect()
    }

    pub fn is_bottom(&self) -> bool {
        let om = self.value.target();
        (0..om.base().num_objects()).all(|c| om.element_name(c, self.value.apply(c, 0)) == "{}")
    }
}

type MemoKey = (NodeId, usize, Vec<Value>);

struct Evaluator<'u, 's> {
    u: &'u Universe<'s>,
    prog: &'u Program,
    tids: Vec<TypeId>,
    binder_tids: Vec<Option<TypeId>>,
    context_types: Vec<TypeId>,
    memo: HashMap<MemoKey, Value>,
}

impl<'u, 's> Evaluator<'u, 's> {
    fn new(u: &'u Universe<'s>, prog: &'u Program) -> Result<Self> {
        let tids = prog
            .nodes
            .iter()
            .map(|n| u.type_id(&n.ty))
            .collect::<Result<Vec<_>>>()?;
        let binder_tids = prog
            .nodes
            .iter()
            .map(|n| match &n.op {
                Op::Comp(t, _) | Op::Forall(t, _) | Op::Exists(t, _) => u.type_id(t).map(Some),
                _ => Ok(None),
            })
            .collect::<Result<Vec<_>>>()?;
        let context_types = prog
            .context
            .iter()
            .map(|(_, t)| u.type_id(t))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            u,
            prog,
            tids,
            binder_tids,
            context_types,
            memo: HashMap::new(),
        })
    }

    fn restrict_env(&self, env: &[Value], scope: &[TypeId], h: usize) -> Result<Vec<Value>> {
        env.iter().zip(scope).map(|(v, &t)| self.u.restrict(t, v, h)).collect()
    }

    fn omega_value(&self, c: usize, mask: u64) -> Value {
        Value::Idx(self.u.omega.sieve_index(c, mask) as u32)
    }

    fn is_top(&self, c: usize, v: &Value) -> bool {
        v.idx() == self.u.omega.top_index(c)
    }

    fn slot(&self, dom: &Carrier, c: usize, f: usize, a: usize) -> usize {
        let cat = &*self.u.base;
        let d = cat.arrow(f).cod;
        dom.offsets[c][d] + cat.hom_position(f) * dom.presheaf.size(d) + a
    }

    fn eval(&mut self, n: NodeId, c: usize, env: &[Value], scope: &mut Vec<TypeId>) -> Result<Value> {
        let node = &self.prog.nodes[n];
        match node.op {
            Op::Var(k) => return Ok(env[k].clone()),
            Op::Star => return Ok(Value::Idx(0)),
            _ => {}
        }
        let key = (n, c, node.free.iter().map(|&k| env[k].clone()).collect::<Vec<_>>());
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        let v = self.compute(n, c, env, scope)?;
        self.memo.insert(key, v.clone());
        Ok(v)
    }

    fn compute(&mut self, n: NodeId, c: usize, env: &[Value], scope: &mut Vec<TypeId>) -> Result<Value> {
        let u = self.u;
        let cat = u.base.clone();
        let om = &u.omega;
        let prog = self.prog;
        let node = &prog.nodes[n];
        Ok(match &node.op {
            Op::Star | Op::Var(_) => unreachable!("handled in eval"),
            &Op::Fun(i, t) => {
                let a = self.eval(t, c, env, scope)?;
                Value::Idx(prog.funs[i].map.apply(c, a.idx()) as u32)
            }
            &Op::FunName(i) => {
                let (a, _) = u.func_parts(self.tids[n]);
                let ca = u.carrier(a)?;
                let map = &prog.funs[i].map;
                let mut fam = Vec::new();
                for d in 0..cat.num_objects() {
                    for _ in cat.hom(c, d) {
                        fam.extend((0..ca.presheaf.size(d)).map(|x| Value::Idx(map.apply(d, x) as u32)));
                    }
                }
                Value::Fam(fam.into())
            }
            &Op::Apply(f, t) | &Op::Mem(t, f) => {
                let theta = self.eval(f, c, env, scope)?;
                let a = self.eval(t, c, env, scope)?;
                let (dom, _) = u.func_parts(self.tids[f]);
                let ca = u.carrier(dom)?;
                let slot = self.slot(&ca, c, cat.identity(c), ca.index_of(c, &a));
                theta.items()[slot].clone()
            }
            Op::Tuple(ts) => {
                let vs = ts
                    .iter()
                    .map(|&t| self.eval(t, c, env, scope))
                    .collect::<Result<Rc<[Value]>>>()?;
                Value::Tuple(vs)
            }
            &Op::Proj(i, t) => self.eval(t, c, env, scope)?.items()[i].clone(),
            &Op::Comp(_, body) => {
                let bt = self.binder_tids[n].expect("binder type");
                let ca = u.carrier(bt)?;
                let mut fam = Vec::new();
                for d in 0..cat.num_objects() {
                    for &g in cat.hom(c, d) {
                        let mut env2 = self.restrict_env(env, scope, g)?;
                        scope.push(bt);
                        for a in ca.values(d) {
                            env2.push(a.clone());
                            let r = self.eval(body, d, &env2, scope);
                            env2.pop();
                            match r {
                                Ok(v) => fam.push(v),
                                Err(e) => {
                                    scope.pop();
                                    return Err(e);
                                }
                            }
                        }
                        scope.pop();
                    }
                }
                Value::Fam(fam.into())
            }
            &Op::Eq(l, r) => {
                let (a, b) = (self.eval(l, c, env, scope)?, self.eval(r, c, env, scope)?);
                if a == b {
                    return Ok(Value::Idx(om.top_index(c) as u32));
                }
                let tid = self.tids[l];
                let mut mask = 0u64;
                for &g in cat.out_of(c) {
                    if u.restrict(tid, &a, g)? == u.restrict(tid, &b, g)? {
                        mask |= 1 << g;
                    }
                }
                self.omega_value(c, mask)
            }
            &Op::Compose(f, h) => {
                let tf = self.eval(f, c, env, scope)?;
                let th = self.eval(h, c, env, scope)?;
                let (a, b) = u.func_parts(self.tids[h]);
                let (ca, cb) = (u.carrier(a)?, u.carrier(b)?);
                let (fi, hi) = (tf.items(), th.items());
                let mut fam = Vec::with_capacity(hi.len());
                for d in 0..cat.num_objects() {
                    for &g in cat.hom(c, d) {
                        for x in 0..ca.presheaf.size(d) {
                            let y = &hi[self.slot(&ca, c, g, x)];
                            fam.push(fi[self.slot(&cb, c, g, cb.index_of(d, y))].clone());
                        }
                    }
                }
                Value::Fam(fam.into())
            }
            Op::Identity => {
                let (a, _) = u.func_parts(self.tids[n]);
                let ca = u.carrier(a)?;
                let mut fam = Vec::new();
                for d in 0..cat.num_objects() {
                    for _ in cat.hom(c, d) {
                        fam.extend(ca.values(d).iter().cloned());
                    }
                }
                Value::Fam(fam.into())
            }
            Op::Top => Value::Idx(om.top_index(c) as u32),
            Op::Bot => Value::Idx(om.bottom_index(c) as u32),
            &Op::And(l, r) | &Op::Or(l, r) | &Op::Imp(l, r) => {
                let (a, b) = (self.eval(l, c, env, scope)?.idx(), self.eval(r, c, env, scope)?.idx());
                let v = match node.op {
                    Op::And(..) => om.meet(c, a, b),
                    Op::Or(..) => om.join(c, a, b),
                    _ => om.implies(c, a, b),
                };
                Value::Idx(v as u32)
            }
            &Op::Not(p) => {
                let a = self.eval(p, c, env, scope)?.idx();
                Value::Idx(om.negate(c, a) as u32)
            }
            &Op::Forall(_, body) | &Op::Exists(_, body) => {
                let universal = matches!(node.op, Op::Forall(..));
                let bt = self.binder_tids[n].expect("binder type");
                let ca = u.carrier(bt)?;
                // forced[k]: body is ⊤ at cod k for all (universal) / some
                // (existential) values of the bound variable.
                let mut forced = HashMap::new();
                for &k in cat.out_of(c) {
                    let d = cat.arrow(k).cod;
                    let mut env2 = self.restrict_env(env, scope, k)?;
                    scope.push(bt);
                    let mut verdict = universal;
                    for a in ca.values(d) {
                        env2.push(a.clone());
                        let r = self.eval(body, d, &env2, scope);
                        env2.pop();
                        let r = match r {
                            Ok(v) => v,
                            Err(e) => {
                                scope.pop();
                                return Err(e);
                            }
                        };
                        if self.is_top(d, &r) != universal {
                            verdict = !universal;
                            break;
                        }
                    }
                    scope.pop();
                    forced.insert(k, verdict);
                }
                let mut mask = 0u64;
                for &g in cat.out_of(c) {
                    let holds = if universal {
                        cat.out_of(cat.arrow(g).cod).iter().all(|&h| forced[&cat.then(g, h)])
                    } else {
                        forced[&g]
                    };
                    if holds {
                        mask |= 1 << g;
                    }
                }
                self.omega_value(c, mask)
            }
        })
    }
}

/// Parses, typechecks and evaluates a closed sentence: `(value == ⊤, value)`.
pub fn holds(sentence: &Term, sig: &Signature) -> Result<(bool, TruthValue)> {
    holds_with(sentence, sig, Mode::Expand)
}

pub fn holds_with(sentence: &Term, sig: &Signature, mode: Mode) -> Result<(bool, TruthValue)> {
    let u = Universe::new(sig)?;
    let tv = u.truth(sentence, mode)?;
    Ok((tv.is_top, tv))
}

/// `[[t]] : [[Γ]] → [[T]]` for the ordered context `Γ`.
pub fn denote(t: &Term, sig: &Signature, ctx: &[(String, LType)], mode: Mode) -> Result<NatTrans> {
    Universe::new(sig)?.denote(t, ctx, mode)
}
