use std::fmt;

/// Types of the local language.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LType {
    Unit,
    Omega,
    Ground(String),
    Power(Box<LType>),
    Product(Vec<LType>),
    Exp(Box<LType>, Box<LType>),
}

impl LType {
    pub fn ground(name: &str) -> Self {
        LType::Ground(name.to_string())
    }

    pub fn power(t: LType) -> Self {
        LType::Power(Box::new(t))
    }

    pub fn exp(a: LType, b: LType) -> Self {
        LType::Exp(Box::new(a), Box::new(b))
    }

    /// `A -> Omega` and `P(A)` are the same type; products of length 0 and 1
    /// collapse to `1` and to their factor.
    pub fn normalize(&self) -> LType {
        match self {
            LType::Unit | LType::Omega | LType::Ground(_) => self.clone(),
            LType::Power(a) => LType::power(a.normalize()),
            LType::Product(ts) => match ts.len() {
                0 => LType::Unit,
                1 => ts[0].normalize(),
                _ => LType::Product(ts.iter().map(LType::normalize).collect()),
            },
            LType::Exp(a, b) => {
                let b = b.normalize();
                if b == LType::Omega {
                    LType::power(a.normalize())
                } else {
                    LType::exp(a.normalize(), b)
                }
            }
        }
    }

    /// Domain and codomain when the type is a function type (`P(A)` counts as `A -> Omega`).
    pub fn as_function(&self) -> Option<(LType, LType)> {
        match self.normalize() {
            LType::Exp(a, b) => Some((*a, *b)),
            LType::Power(a) => Some((*a, LType::Omega)),
            _ => None,
        }
    }

    pub fn grounds(&self, out: &mut Vec<String>) {
        match self {
            LType::Unit | LType::Omega => {}
            LType::Ground(g) => {
                if !out.contains(g) {
                    out.push(g.clone());
                }
            }
            LType::Power(a) => a.grounds(out),
            LType::Product(ts) => ts.iter().for_each(|t| t.grounds(out)),
            LType::Exp(a, b) => {
                a.grounds(out);
                b.grounds(out);
            }
        }
    }
}

impl fmt::Display for LType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LType::Unit => write!(f, "1"),
            LType::Omega => write!(f, "Omega"),
            LType::Ground(g) => write!(f, "{g}"),
            LType::Power(a) => write!(f, "P({a})"),
            LType::Product(ts) => {
                write!(f, "(")?;
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        write!(f, " * ")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, ")")
            }
            LType::Exp(a, b) => write!(f, "({a} -> {b})"),
        }
    }
}

/// A parsed term; `pos` is the byte offset where it starts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub kind: TermKind,
    pub pos: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermKind {
    Star,
    True,
    False,
    /// A variable, a function symbol used as a name, or a ground type used as
    /// its full set-term; resolved during typechecking.
    Ident(String),
    /// `f(t)` for a function symbol or a variable of function type.
    Apply(String, Box<Term>),
    Tuple(Vec<Term>),
    /// 1-based projection.
    Proj(usize, Box<Term>),
    Comprehension(String, LType, Box<Term>),
    Eq(Box<Term>, Box<Term>),
    Mem(Box<Term>, Box<Term>),
    And(Box<Term>, Box<Term>),
    Or(Box<Term>, Box<Term>),
    Implies(Box<Term>, Box<Term>),
    Iff(Box<Term>, Box<Term>),
    Not(Box<Term>),
    Forall(String, LType, Box<Term>),
    Exists(String, LType, Box<Term>),
    Subset(Box<Term>, Box<Term>),
    Union(Box<Term>, Box<Term>),
    Inter(Box<Term>, Box<Term>),
    Empty(LType),
    /// `comp(f, h)` is `f ∘ h`.
    Compose(Box<Term>, Box<Term>),
    Identity(LType),
}

fn b(t: Term) -> Box<Term> {
    Box::new(t)
}

impl Term {
    pub fn new(kind: TermKind, pos: usize) -> Self {
        Term { kind, pos }
    }

    fn at(&self, kind: TermKind) -> Term {
        Term { kind, pos: self.pos }
    }

    pub fn is_derived(&self) -> bool {
        use TermKind::*;
        matches!(
            self.kind,
            True | False
                | And(..)
                | Or(..)
                | Implies(..)
                | Iff(..)
                | Not(..)
                | Forall(..)
                | Exists(..)
                | Subset(..)
                | Union(..)
                | Inter(..)
                | Empty(..)
        )
    }

    /// Rewrites derived forms. With `connectives == true` every logical
    /// operator is replaced by its definition in terms of `=`, `∈`, tuples and
    /// comprehension; otherwise only the set operations are rewritten and the
    /// connectives and quantifiers are kept.
    pub fn desugar(&self, connectives: bool, fresh: &mut usize) -> Term {
        use TermKind::*;
        let go = |t: &Term, fresh: &mut usize| t.desugar(connectives, fresh);
        match &self.kind {
            Star | Ident(_) | Identity(_) => self.clone(),
            True if connectives => self.at(Eq(b(self.at(Star)), b(self.at(Star)))),
            False if connectives => {
                let w = fresh_name(fresh);
                let body = self.at(Ident(w.clone()));
                self.at(Forall(w, LType::Omega, b(body))).desugar(true, fresh)
            }
            True | False => self.clone(),
            Apply(f, t) => self.at(Apply(f.clone(), b(go(t, fresh)))),
            Tuple(ts) => self.at(Tuple(ts.iter().map(|t| go(t, fresh)).collect())),
            Proj(i, t) => self.at(Proj(*i, b(go(t, fresh)))),
            Comprehension(x, ty, p) => self.at(Comprehension(x.clone(), ty.clone(), b(go(p, fresh)))),
            Eq(l, r) => self.at(Eq(b(go(l, fresh)), b(go(r, fresh)))),
            Mem(l, r) => self.at(Mem(b(go(l, fresh)), b(go(r, fresh)))),
            Compose(l, r) => self.at(Compose(b(go(l, fresh)), b(go(r, fresh)))),
            And(l, r) if connectives => {
                let pair = self.at(Tuple(vec![(**l).clone(), (**r).clone()]));
                let tt = self.at(Tuple(vec![self.at(True), self.at(True)]));
                self.at(Eq(b(pair), b(tt))).desugar(true, fresh)
            }
            Implies(l, r) if connectives => {
                let conj = self.at(And(l.clone(), r.clone()));
                self.at(Eq(b(conj), l.clone())).desugar(true, fresh)
            }
            Forall(x, ty, p) if connectives => {
                let lhs = self.at(Comprehension(x.clone(), ty.clone(), p.clone()));
                let rhs = self.at(Comprehension(x.clone(), ty.clone(), b(self.at(True))));
                self.at(Eq(b(lhs), b(rhs))).desugar(true, fresh)
            }
            Exists(x, ty, p) if connectives => {
                let w = fresh_name(fresh);
                let wv = || self.at(Ident(w.clone()));
                let inner = self.at(Forall(x.clone(), ty.clone(), b(self.at(Implies(p.clone(), b(wv()))))));
                let body = self.at(Implies(b(inner), b(wv())));
                self.at(Forall(w.clone(), LType::Omega, b(body))).desugar(true, fresh)
            }
            Or(l, r) if connectives => {
                let w = fresh_name(fresh);
                let wv = || self.at(Ident(w.clone()));
                let left = self.at(Implies(l.clone(), b(wv())));
                let right = self.at(Implies(r.clone(), b(wv())));
                let body = self.at(Implies(b(self.at(And(b(left), b(right)))), b(wv())));
                self.at(Forall(w.clone(), LType::Omega, b(body))).desugar(true, fresh)
            }
            Not(p) if connectives => self.at(Implies(p.clone(), b(self.at(False)))).desugar(true, fresh),
            And(l, r) => self.at(And(b(go(l, fresh)), b(go(r, fresh)))),
            Implies(l, r) => self.at(Implies(b(go(l, fresh)), b(go(r, fresh)))),
            Or(l, r) => self.at(Or(b(go(l, fresh)), b(go(r, fresh)))),
            Not(p) => self.at(Not(b(go(p, fresh)))),
            Forall(x, ty, p) => self.at(Forall(x.clone(), ty.clone(), b(go(p, fresh)))),
            Exists(x, ty, p) => self.at(Exists(x.clone(), ty.clone(), b(go(p, fresh)))),
            Iff(l, r) => {
                let there = self.at(Implies(l.clone(), r.clone()));
                let back = self.at(Implies(r.clone(), l.clone()));
                self.at(And(b(there), b(back))).desugar(connectives, fresh)
            }
            // Set operations need the element type, which only the typechecker
            // knows; it calls `desugar_set` once the operand types are known.
            Subset(l, r) => self.at(Subset(b(go(l, fresh)), b(go(r, fresh)))),
            Union(l, r) => self.at(Union(b(go(l, fresh)), b(go(r, fresh)))),
            Inter(l, r) => self.at(Inter(b(go(l, fresh)), b(go(r, fresh)))),
            Empty(ty) => {
                let x = fresh_name(fresh);
                self.at(Comprehension(x, ty.clone(), b(self.at(False))))
                    .desugar(connectives, fresh)
            }
        }
    }

    /// Definition of `⊆`, `∪` or `∩` once the element type `elem` is known.
    pub fn desugar_set(&self, elem: &LType, connectives: bool, fresh: &mut usize) -> Term {
        use TermKind::*;
        let x = fresh_name(fresh);
        let xv = || self.at(Ident(x.clone()));
        let mem = |s: &Term| self.at(Mem(b(xv()), b(s.clone())));
        let t = match &self.kind {
            Subset(l, r) => self.at(Forall(
                x.clone(),
                elem.clone(),
                b(self.at(Implies(b(mem(l)), b(mem(r))))),
            )),
            Union(l, r) => self.at(Comprehension(
                x.clone(),
                elem.clone(),
                b(self.at(Or(b(mem(l)), b(mem(r))))),
            )),
            Inter(l, r) => self.at(Comprehension(
                x.clone(),
                elem.clone(),
                b(self.at(And(b(mem(l)), b(mem(r))))),
            )),
            _ => return self.clone(),
        };
        t.desugar(connectives, fresh)
    }
}

/// Names containing `%` cannot be written in the surface syntax, so they
/// never capture user variables.
pub fn fresh_name(counter: &mut usize) -> String {
    *counter += 1;
    format!("w%{counter}")
}

fn prec(k: &TermKind) -> u8 {
    use TermKind::*;
    match k {
        Forall(..) | Exists(..) => 0,
        Iff(..) => 1,
        Implies(..) => 2,
        Or(..) => 3,
        And(..) => 4,
        Not(..) => 5,
        Eq(..) | Mem(..) | Subset(..) => 6,
        Union(..) | Inter(..) => 7,
        _ => 8,
    }
}

struct Wrap<'a>(&'a Term, u8);

impl fmt::Display for Wrap<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if prec(&self.0.kind) < self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use TermKind::*;
        match &self.kind {
            Star => write!(f, "*"),
            True => write!(f, "true"),
            False => write!(f, "false"),
            Ident(x) => write!(f, "{x}"),
            Apply(g, t) => write!(f, "{g}({t})"),
            Tuple(ts) => {
                write!(f, "(")?;
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, ")")
            }
            Proj(i, t) => write!(f, "pi{i}({t})"),
            Comprehension(x, ty, p) => write!(f, "{{{x}:{ty} | {p}}}"),
            Eq(l, r) => write!(f, "{} = {}", Wrap(l, 7), Wrap(r, 7)),
            Mem(l, r) => write!(f, "{} in {}", Wrap(l, 7), Wrap(r, 7)),
            Subset(l, r) => write!(f, "{} subset {}", Wrap(l, 7), Wrap(r, 7)),
            Union(l, r) => write!(f, "{} union {}", Wrap(l, 7), Wrap(r, 8)),
            Inter(l, r) => write!(f, "{} inter {}", Wrap(l, 7), Wrap(r, 8)),
            And(l, r) => write!(f, "{} /\\ {}", Wrap(l, 4), Wrap(r, 5)),
            Or(l, r) => write!(f, "{} \\/ {}", Wrap(l, 3), Wrap(r, 4)),
            Implies(l, r) => write!(f, "{} => {}", Wrap(l, 3), Wrap(r, 2)),
            Iff(l, r) => write!(f, "{} <=> {}", Wrap(l, 2), Wrap(r, 2)),
            Not(p) => write!(f, "~{}", Wrap(p, 5)),
            Forall(x, ty, p) => write!(f, "forall {x}:{ty}. {p}"),
            Exists(x, ty, p) => write!(f, "exists {x}:{ty}. {p}"),
            Empty(ty) => write!(f, "empty[{ty}]"),
            Compose(l, r) => write!(f, "comp({l}, {r})"),
            Identity(ty) => write!(f, "id[{ty}]"),
        }
    }
}

impl Term {
    /// `self[u/x]` for a closed term `u`; `x` must not be applied as a function.
    pub fn substitute(&self, x: &str, u: &Term) -> Term {
        use TermKind::*;
        let s = |t: &Term| Box::new(t.substitute(x, u));
        let kind = match &self.kind {
            Ident(y) if y == x => return u.clone(),
            Star | True | False | Ident(_) | Empty(_) | Identity(_) => self.kind.clone(),
            Apply(f, _) if f == x => panic!("cannot substitute for `{x}` in function position"),
            Apply(f, t) => Apply(f.clone(), s(t)),
            Tuple(ts) => Tuple(ts.iter().map(|t| t.substitute(x, u)).collect()),
            Proj(i, t) => Proj(*i, s(t)),
            Comprehension(y, ty, p) | Forall(y, ty, p) | Exists(y, ty, p) => {
                let p = if y == x { p.clone() } else { s(p) };
                match &self.kind {
                    Comprehension(..) => Comprehension(y.clone(), ty.clone(), p),
                    Forall(..) => Forall(y.clone(), ty.clone(), p),
                    _ => Exists(y.clone(), ty.clone(), p),
                }
            }
            Eq(l, r) => Eq(s(l), s(r)),
            Mem(l, r) => Mem(s(l), s(r)),
            And(l, r) => And(s(l), s(r)),
            Or(l, r) => Or(s(l), s(r)),
            Implies(l, r) => Implies(s(l), s(r)),
            Iff(l, r) => Iff(s(l), s(r)),
            Not(p) => Not(s(p)),
            Subset(l, r) => Subset(s(l), s(r)),
            Union(l, r) => Union(s(l), s(r)),
            Inter(l, r) => Inter(s(l), s(r)),
            Compose(l, r) => Compose(s(l), s(r)),
        };
        Term::new(kind, self.pos)
    }
}
