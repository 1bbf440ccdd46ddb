//! Recursive-descent parser for the ASCII surface syntax.

use super::syntax::{LType, Term, TermKind};
use crate::error::{Result, ToposError};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(usize),
    Sym(&'static str),
    End,
}

const SYMBOLS: [&str; 18] = [
    "<=>", "=>", "->", "/\\", "\\/", "(", ")", "{", "}", "[", "]", ",", ":", ".", "|", "=", "*", "~",
];

const KEYWORDS: [&str; 11] = [
    "forall", "exists", "in", "true", "false", "subset", "union", "inter", "empty", "comp", "id",
];

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    if let Some((pos, ch)) = src.char_indices().find(|(_, c)| !c.is_ascii()) {
        return Err(ToposError::SyntaxError {
            pos,
            msg: format!("non-ASCII character {ch:?}"),
        });
    }
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    'outer: while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n = src[start..i].parse().map_err(|_| ToposError::SyntaxError {
                pos: start,
                msg: "number too large".into(),
            })?;
            out.push((Tok::Num(n), start));
            continue;
        }
        for s in SYMBOLS {
            if src[i..].starts_with(s) {
                out.push((Tok::Sym(s), i));
                i += s.len();
                continue 'outer;
            }
        }
        return Err(ToposError::SyntaxError {
            pos: i,
            msg: format!("unexpected character {:?}", c as char),
        });
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        let found = match self.peek() {
            Tok::End => "end of input".to_string(),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(n) => format!("`{n}`"),
            Tok::Sym(s) => format!("`{s}`"),
        };
        Err(ToposError::SyntaxError {
            pos: self.pos(),
            msg: format!("{}, found {found}", msg.into()),
        })
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(t) if t == k)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        if self.is_kw(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.error(format!("expected `{s}`"))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => self.error("expected an identifier"),
        }
    }

    fn formula(&mut self) -> Result<Term> {
        if self.is_kw("forall") || self.is_kw("exists") {
            return self.quantifier();
        }
        let pos = self.pos();
        let lhs = self.implication()?;
        if self.eat_sym("<=>") {
            let rhs = self.implication_or_quantifier()?;
            return Ok(Term::new(TermKind::Iff(Box::new(lhs), Box::new(rhs)), pos));
        }
        Ok(lhs)
    }

    fn implication_or_quantifier(&mut self) -> Result<Term> {
        if self.is_kw("forall") || self.is_kw("exists") {
            self.quantifier()
        } else {
            self.implication()
        }
    }

    fn quantifier(&mut self) -> Result<Term> {
        let pos = self.pos();
        let universal = self.is_kw("forall");
        self.bump();
        let x = self.ident()?;
        self.expect_sym(":")?;
        let ty = self.ltype()?;
        self.expect_sym(".")?;
        let body = Box::new(self.formula()?);
        let kind = if universal {
            TermKind::Forall(x, ty, body)
        } else {
            TermKind::Exists(x, ty, body)
        };
        Ok(Term::new(kind, pos))
    }

    fn implication(&mut self) -> Result<Term> {
        let pos = self.pos();
        let lhs = self.disjunction()?;
        if self.eat_sym("=>") {
            let rhs = self.implication_or_quantifier()?;
            return Ok(Term::new(TermKind::Implies(Box::new(lhs), Box::new(rhs)), pos));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Term> {
        let pos = self.pos();
        let mut lhs = self.conjunction()?;
        while self.eat_sym("\\/") {
            let rhs = self.conjunction_or_quantifier()?;
            lhs = Term::new(TermKind::Or(Box::new(lhs), Box::new(rhs)), pos);
        }
        Ok(lhs)
    }

    fn conjunction_or_quantifier(&mut self) -> Result<Term> {
        if self.is_kw("forall") || self.is_kw("exists") {
            self.quantifier()
        } else {
            self.conjunction()
        }
    }

    fn conjunction(&mut self) -> Result<Term> {
        let pos = self.pos();
        let mut lhs = self.unary()?;
        while self.eat_sym("/\\") {
            let rhs = self.unary()?;
            lhs = Term::new(TermKind::And(Box::new(lhs), Box::new(rhs)), pos);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Term> {
        let pos = self.pos();
        if self.eat_sym("~") {
            let p = self.unary()?;
            return Ok(Term::new(TermKind::Not(Box::new(p)), pos));
        }
        if self.is_kw("forall") || self.is_kw("exists") {
            return self.quantifier();
        }
        self.relation()
    }

    fn relation(&mut self) -> Result<Term> {
        let pos = self.pos();
        let lhs = self.set_expr()?;
        let make: fn(Box<Term>, Box<Term>) -> TermKind = if self.eat_sym("=") {
            TermKind::Eq
        } else if self.eat_kw("in") {
            TermKind::Mem
        } else if self.eat_kw("subset") {
            TermKind::Subset
        } else {
            return Ok(lhs);
        };
        let rhs = self.set_expr()?;
        Ok(Term::new(make(Box::new(lhs), Box::new(rhs)), pos))
    }

    fn set_expr(&mut self) -> Result<Term> {
        let pos = self.pos();
        let mut lhs = self.atom()?;
        loop {
            let make: fn(Box<Term>, Box<Term>) -> TermKind = if self.eat_kw("union") {
                TermKind::Union
            } else if self.eat_kw("inter") {
                TermKind::Inter
            } else {
                return Ok(lhs);
            };
            let rhs = self.atom()?;
            lhs = Term::new(make(Box::new(lhs), Box::new(rhs)), pos);
        }
    }

    fn atom(&mut self) -> Result<Term> {
        let pos = self.pos();
        let (tok, _) = self.bump();
        let kind = match tok {
            Tok::Sym("*") => TermKind::Star,
            Tok::Sym("(") => {
                let mut items = vec![self.formula()?];
                while self.eat_sym(",") {
                    items.push(self.formula()?);
                }
                self.expect_sym(")")?;
                if items.len() == 1 {
                    return Ok(items.pop().expect("one item"));
                }
                TermKind::Tuple(items)
            }
            Tok::Sym("{") => {
                let x = self.ident()?;
                self.expect_sym(":")?;
                let ty = self.ltype()?;
                self.expect_sym("|")?;
                let body = self.formula()?;
                self.expect_sym("}")?;
                TermKind::Comprehension(x, ty, Box::new(body))
            }
            Tok::Ident(s) => match s.as_str() {
                "true" => TermKind::True,
                "false" => TermKind::False,
                "empty" | "id" => {
                    self.expect_sym("[")?;
                    let ty = self.ltype()?;
                    self.expect_sym("]")?;
                    if s == "empty" {
                        TermKind::Empty(ty)
                    } else {
                        TermKind::Identity(ty)
                    }
                }
                "comp" => {
                    self.expect_sym("(")?;
                    let f = self.formula()?;
                    self.expect_sym(",")?;
                    let h = self.formula()?;
                    self.expect_sym(")")?;
                    TermKind::Compose(Box::new(f), Box::new(h))
                }
                k if KEYWORDS.contains(&k) => {
                    self.at -= 1;
                    return self.error("expected a term");
                }
                _ => {
                    if let Some(i) = projection_index(&s) {
                        self.expect_sym("(")?;
                        let t = self.formula()?;
                        self.expect_sym(")")?;
                        TermKind::Proj(i, Box::new(t))
                    } else if self.eat_sym("(") {
                        let t = self.formula()?;
                        self.expect_sym(")")?;
                        TermKind::Apply(s, Box::new(t))
                    } else {
                        TermKind::Ident(s)
                    }
                }
            },
            Tok::End => {
                return Err(ToposError::SyntaxError {
                    pos,
                    msg: "unexpected end of input".into(),
                });
            }
            _ => {
                self.at -= 1;
                return self.error("expected a term");
            }
        };
        Ok(Term::new(kind, pos))
    }

    fn ltype(&mut self) -> Result<LType> {
        let lhs = self.product_type()?;
        if self.eat_sym("->") {
            let rhs = self.ltype()?;
            return Ok(LType::exp(lhs, rhs));
        }
        Ok(lhs)
    }

    fn product_type(&mut self) -> Result<LType> {
        let mut factors = vec![self.type_atom()?];
        while self.eat_sym("*") {
            factors.push(self.type_atom()?);
        }
        Ok(if factors.len() == 1 {
            factors.pop().expect("one factor")
        } else {
            LType::Product(factors)
        })
    }

    fn type_atom(&mut self) -> Result<LType> {
        match self.peek().clone() {
            Tok::Num(1) => {
                self.bump();
                Ok(LType::Unit)
            }
            Tok::Sym("(") => {
                self.bump();
                let t = self.ltype()?;
                self.expect_sym(")")?;
                Ok(t)
            }
            Tok::Ident(s) if s == "Omega" => {
                self.bump();
                Ok(LType::Omega)
            }
            Tok::Ident(s) if s == "P" && matches!(self.toks[self.at + 1].0, Tok::Sym("(")) => {
                self.bump();
                self.bump();
                let t = self.ltype()?;
                self.expect_sym(")")?;
                Ok(LType::power(t))
            }
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(LType::Ground(s))
            }
            _ => self.error("expected a type"),
        }
    }
}

fn projection_index(s: &str) -> Option<usize> {
    let digits = s.strip_prefix("pi")?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok().filter(|&i| i >= 1)
}

pub fn parse_formula(src: &str) -> Result<Term> {
    let mut p = Parser { toks: lex(src)?, at: 0 };
    let t = p.formula()?;
    if *p.peek() != Tok::End {
        return p.error("expected end of input");
    }
    Ok(t)
}

pub fn parse_type(src: &str) -> Result<LType> {
    let mut p = Parser { toks: lex(src)?, at: 0 };
    let t = p.ltype()?;
    if *p.peek() != Tok::End {
        return p.error("expected end of input");
    }
    Ok(t)
}
