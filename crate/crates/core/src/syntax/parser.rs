//! Recursive-descent parser for programs, terms, types, coercions and warps.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use super::lexer::{tokenize, Tok, Token};
use super::{Coercion, Def, PrimOp, Program, Scalar, Side, Span, Term, TermKind, Type};
use crate::warp::{ExtNat, Warp};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub message: String,
    pub line: usize,
    pub col: usize,
    pub span: Span,
}

impl ParseError {
    pub fn at(src: &str, span: Span, message: impl Into<String>) -> ParseError {
        let (line, col) = span.line_col(src);
        ParseError { message: message.into(), line, col, span }
    }
}

const KEYWORDS: &[&str] = &[
    "def", "rec", "and", "fun", "let", "in", "match", "with", "by", "head", "tail", "fst", "snd", "inl", "inr", "not",
    "true", "false", "using",
];

fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

pub struct Parser<'s> {
    src: &'s str,
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

fn a(t: Term) -> Arc<Term> {
    Arc::new(t)
}

impl<'s> Parser<'s> {
    pub fn new(src: &'s str) -> PResult<Parser<'s>> {
        Ok(Parser { src, toks: tokenize(src)?, pos: 0 })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    pub fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].span.end
        }
    }

    fn since(&self, start: Span) -> Span {
        Span::new(start.start, self.prev_end().max(start.start))
    }

    pub fn bump(&mut self) -> Tok {
        let t = self.peek().clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::at(self.src, self.span(), message)
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    pub fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    pub fn is_word(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(t) if t == s)
    }

    pub fn eat_sym(&mut self, s: &str) -> bool {
        let hit = self.is_sym(s);
        if hit {
            self.bump();
        }
        hit
    }

    fn eat_word(&mut self, s: &str) -> bool {
        let hit = self.is_word(s);
        if hit {
            self.bump();
        }
        hit
    }

    pub fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{s}`, found {}", self.describe())))
        }
    }

    fn expect_word(&mut self, s: &str) -> PResult<()> {
        if self.eat_word(s) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{s}`, found {}", self.describe())))
        }
    }

    pub fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub fn expect_eof(&self) -> PResult<()> {
        if self.at_eof() {
            Ok(())
        } else {
            Err(self.error(format!("unexpected {}", self.describe())))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_keyword(&s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.error(format!("expected identifier, found {}", self.describe()))),
        }
    }

    // ---- warps ----

    fn warp_elems(&mut self, close: &str) -> PResult<Vec<ExtNat>> {
        let mut out = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Int(n) => out.push(ExtNat::Fin(n)),
                Tok::Ident(s) if s == "w" => out.push(ExtNat::Omega),
                _ => break,
            }
            self.bump();
        }
        self.expect_sym(close)?;
        Ok(out)
    }

    /// `(e1 ...)` or `{u1 ...}(v1 ...)`.
    pub fn warp(&mut self) -> PResult<Warp> {
        let start = self.span();
        let prefix = if self.eat_sym("{") { self.warp_elems("}")? } else { Vec::new() };
        self.expect_sym("(")?;
        let period = self.warp_elems(")")?;
        Warp::new(prefix, period).map_err(|e| ParseError::at(self.src, self.since(start), e.to_string()))
    }

    /// Whether the next tokens start a warp literal rather than a grouping.
    pub fn at_warp_literal(&self) -> bool {
        match self.peek() {
            Tok::Sym("{") => true,
            Tok::Sym("(") => {
                matches!(self.peek_at(1), Tok::Int(_) | Tok::Sym(")"))
                    || matches!(self.peek_at(1), Tok::Ident(s) if s == "w")
            }
            _ => false,
        }
    }

    // ---- types ----

    pub fn ty(&mut self) -> PResult<Type> {
        let l = self.sum_ty()?;
        if self.eat_sym("->") {
            Ok(Type::arrow(l, self.ty()?))
        } else {
            Ok(l)
        }
    }

    fn sum_ty(&mut self) -> PResult<Type> {
        let l = self.prod_ty()?;
        if self.eat_sym("+") {
            Ok(Type::sum(l, self.sum_ty()?))
        } else {
            Ok(l)
        }
    }

    fn prod_ty(&mut self) -> PResult<Type> {
        let l = self.app_ty()?;
        if self.eat_sym("*") {
            Ok(Type::prod(l, self.prod_ty()?))
        } else {
            Ok(l)
        }
    }

    fn app_ty(&mut self) -> PResult<Type> {
        if self.eat_word("Stream") {
            return Ok(Type::stream(self.app_ty()?));
        }
        if self.eat_word("W") {
            let p = self.warp()?;
            return Ok(Type::warped(p, self.app_ty()?));
        }
        if self.eat_word("Int") {
            return Ok(Type::INT);
        }
        if self.eat_word("Bool") {
            return Ok(Type::BOOL);
        }
        if self.eat_sym("(") {
            let t = self.ty()?;
            self.expect_sym(")")?;
            return Ok(t);
        }
        Err(self.error(format!("expected a type, found {}", self.describe())))
    }

    // ---- coercions ----

    pub fn coercion(&mut self) -> PResult<Coercion> {
        let l = self.coercion_atom()?;
        if self.eat_sym(";") {
            Ok(Coercion::seq(l, self.coercion()?))
        } else {
            Ok(l)
        }
    }

    fn warp_pair(&mut self) -> PResult<(Warp, Warp)> {
        self.expect_sym("{")?;
        let p = self.warp()?;
        self.expect_sym(",")?;
        let q = self.warp()?;
        self.expect_sym("}")?;
        Ok((p, q))
    }

    fn coercion_args2(&mut self) -> PResult<(Coercion, Coercion)> {
        self.expect_sym("(")?;
        let l = self.coercion()?;
        self.expect_sym(",")?;
        let r = self.coercion()?;
        self.expect_sym(")")?;
        Ok((l, r))
    }

    pub fn coercion_atom(&mut self) -> PResult<Coercion> {
        if self.eat_sym("(") {
            let c = self.coercion()?;
            self.expect_sym(")")?;
            return Ok(c);
        }
        let word = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return Err(self.error(format!("expected a coercion, found {}", self.describe()))),
        };
        let simple = match word.as_str() {
            "id" => Some(Coercion::Id),
            "wrap" => Some(Coercion::Wrap),
            "unwrap" => Some(Coercion::Unwrap),
            "inflate" => Some(Coercion::Inflate),
            "dist" => Some(Coercion::Dist),
            "fact" => Some(Coercion::Fact),
            _ => None,
        };
        self.bump();
        if let Some(c) = simple {
            return Ok(c);
        }
        match word.as_str() {
            "concat" => self.warp_pair().map(|(p, q)| Coercion::Concat(p, q)),
            "decat" => self.warp_pair().map(|(p, q)| Coercion::Decat(p, q)),
            "delay" => self.warp_pair().map(|(p, q)| Coercion::Delay(p, q)),
            "stream" => {
                self.expect_sym("(")?;
                let c = self.coercion()?;
                self.expect_sym(")")?;
                Ok(Coercion::on_stream(c))
            }
            "arrow" => self.coercion_args2().map(|(l, r)| Coercion::on_arrow(l, r)),
            "prod" => self.coercion_args2().map(|(l, r)| Coercion::on_prod(l, r)),
            "sum" => self.coercion_args2().map(|(l, r)| Coercion::on_sum(l, r)),
            "warp" => {
                self.expect_sym("{")?;
                let p = self.warp()?;
                self.expect_sym("}")?;
                self.expect_sym("(")?;
                let c = self.coercion()?;
                self.expect_sym(")")?;
                Ok(Coercion::on_warp(p, c))
            }
            _ => {
                self.pos -= 1;
                Err(self.error(format!("unknown coercion `{word}`")))
            }
        }
    }

    // ---- terms ----

    pub fn term(&mut self) -> PResult<Term> {
        let start = self.span();
        if self.eat_word("fun") {
            let mut binders = Vec::new();
            loop {
                let b = self.span();
                self.expect_sym("(")?;
                let x = self.ident()?;
                self.expect_sym(":")?;
                let t = self.ty()?;
                self.expect_sym(")")?;
                binders.push((x, t, b));
                if !self.is_sym("(") {
                    break;
                }
            }
            self.expect_sym("->")?;
            let mut body = self.term()?;
            let end = body.span;
            for (i, (x, t, b)) in binders.into_iter().enumerate().rev() {
                let s = if i == 0 { start } else { b };
                body = Term { kind: TermKind::Fun(x, t, a(body)), span: s.join(end) };
            }
            return Ok(body);
        }
        if self.eat_word("rec") {
            self.expect_sym("(")?;
            let x = self.ident()?;
            self.expect_sym(":")?;
            let t = self.ty()?;
            self.expect_sym(")")?;
            self.expect_sym("->")?;
            let body = self.term()?;
            return Ok(Term { kind: TermKind::Rec(x, t, a(body)), span: self.since(start) });
        }
        if self.eat_word("let") {
            let x = self.ident()?;
            self.expect_sym(":")?;
            let t = self.ty()?;
            self.expect_sym("=")?;
            let bound = self.term()?;
            self.expect_word("in")?;
            let body = self.term()?;
            let span = self.since(start);
            let f = Term { kind: TermKind::Fun(x, t, a(body)), span };
            return Ok(Term { kind: TermKind::App(a(f), a(bound)), span });
        }
        if self.eat_word("match") {
            let scrutinee = self.term()?;
            self.expect_word("with")?;
            self.expect_sym("{")?;
            self.expect_word("inl")?;
            let x = self.ident()?;
            self.expect_sym("->")?;
            let l = self.term()?;
            self.expect_sym(";")?;
            self.expect_word("inr")?;
            let y = self.ident()?;
            self.expect_sym("->")?;
            let r = self.term()?;
            self.expect_sym("}")?;
            let kind = TermKind::Case { scrutinee: a(scrutinee), left: (x, a(l)), right: (y, a(r)) };
            return Ok(Term { kind, span: self.since(start) });
        }
        if self.eat_word("using") {
            self.expect_sym("{")?;
            let mut beta = BTreeMap::new();
            if !self.is_sym("}") {
                loop {
                    let x = self.ident()?;
                    self.expect_sym(":")?;
                    let c = self.coercion()?;
                    if beta.insert(x.clone(), c).is_some() {
                        return Err(self.error(format!("`{x}` is coerced twice")));
                    }
                    if !self.eat_sym(",") {
                        break;
                    }
                }
            }
            self.expect_sym("}")?;
            self.expect_word("in")?;
            let body = self.term()?;
            return Ok(Term { kind: TermKind::CoeL(beta, a(body)), span: self.since(start) });
        }
        self.cons()
    }

    fn cons(&mut self) -> PResult<Term> {
        let start = self.span();
        let l = self.eq()?;
        if self.eat_sym("::") {
            let r = self.term()?;
            return Ok(Term { kind: TermKind::Cons(a(l), a(r)), span: self.since(start) });
        }
        Ok(l)
    }

    fn binop(&self, op: PrimOp, l: Term, r: Term, start: Span) -> Term {
        Term { kind: TermKind::Prim(op, vec![a(l), a(r)]), span: self.since(start) }
    }

    fn eq(&mut self) -> PResult<Term> {
        let start = self.span();
        let l = self.add()?;
        if self.eat_sym("==") {
            let r = self.add()?;
            return Ok(self.binop(PrimOp::Eq, l, r, start));
        }
        Ok(l)
    }

    fn add(&mut self) -> PResult<Term> {
        let start = self.span();
        let mut l = self.mul()?;
        loop {
            let op = if self.eat_sym("+") {
                PrimOp::Add
            } else if self.eat_sym("-") {
                PrimOp::Sub
            } else {
                return Ok(l);
            };
            let r = self.mul()?;
            l = self.binop(op, l, r, start);
        }
    }

    fn mul(&mut self) -> PResult<Term> {
        let start = self.span();
        let mut l = self.post()?;
        while self.eat_sym("*") {
            let r = self.post()?;
            l = self.binop(PrimOp::Mul, l, r, start);
        }
        Ok(l)
    }

    fn post(&mut self) -> PResult<Term> {
        let start = self.span();
        let mut t = self.app()?;
        loop {
            if self.eat_word("by") {
                let p = self.warp()?;
                t = Term { kind: TermKind::By(a(t), p), span: self.since(start) };
            } else if self.is_word("with") && !matches!(self.peek_at(1), Tok::Sym("{")) {
                self.bump();
                let c = self.coercion_atom()?;
                t = Term { kind: TermKind::CoeR(a(t), c), span: self.since(start) };
            } else {
                return Ok(t);
            }
        }
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => !is_keyword(s) || s == "true" || s == "false",
            Tok::Int(_) => true,
            Tok::Sym(s) => *s == "(",
            Tok::Eof => false,
        }
    }

    fn app(&mut self) -> PResult<Term> {
        let start = self.span();
        let unary: Option<fn(Arc<Term>) -> TermKind> = match self.peek() {
            Tok::Ident(s) => match s.as_str() {
                "head" => Some(TermKind::Head),
                "tail" => Some(TermKind::Tail),
                "fst" => Some(|t| TermKind::Proj(Side::Left, t)),
                "snd" => Some(|t| TermKind::Proj(Side::Right, t)),
                "not" => Some(|t| TermKind::Prim(PrimOp::Not, vec![t])),
                _ => None,
            },
            _ => None,
        };
        let mut f = if let Some(mk) = unary {
            self.bump();
            let arg = self.atom()?;
            Term { kind: mk(a(arg)), span: self.since(start) }
        } else if self.is_word("inl") || self.is_word("inr") {
            let side = if self.is_word("inl") { Side::Left } else { Side::Right };
            self.bump();
            self.expect_sym("[")?;
            let other = self.ty()?;
            self.expect_sym("]")?;
            let arg = self.atom()?;
            Term { kind: TermKind::Inj(side, other, a(arg)), span: self.since(start) }
        } else {
            self.atom()?
        };
        while self.starts_atom() {
            let arg = self.atom()?;
            f = Term { kind: TermKind::App(a(f), a(arg)), span: self.since(start) };
        }
        Ok(f)
    }

    fn int_literal(&mut self, n: u64, negative: bool) -> PResult<Scalar> {
        let v = if negative { 0i128 - n as i128 } else { n as i128 };
        i64::try_from(v).map(Scalar::Int).map_err(|_| self.error("integer literal out of range"))
    }

    fn atom(&mut self) -> PResult<Term> {
        let start = self.span();
        let kind = match self.peek().clone() {
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                TermKind::Scalar(Scalar::Bool(s == "true"))
            }
            Tok::Ident(_) => TermKind::Var(self.ident()?),
            Tok::Int(n) => {
                let s = self.int_literal(n, false)?;
                self.bump();
                TermKind::Scalar(s)
            }
            Tok::Sym("-") if matches!(self.peek_at(1), Tok::Int(_)) => {
                self.bump();
                let Tok::Int(n) = self.peek().clone() else { unreachable!() };
                let s = self.int_literal(n, true)?;
                self.bump();
                TermKind::Scalar(s)
            }
            Tok::Sym("(") => {
                self.bump();
                let l = self.term()?;
                if self.eat_sym(",") {
                    let r = self.term()?;
                    self.expect_sym(")")?;
                    TermKind::Pair(a(l), a(r))
                } else {
                    self.expect_sym(")")?;
                    return Ok(l);
                }
            }
            _ => return Err(self.error(format!("expected a term, found {}", self.describe()))),
        };
        Ok(Term { kind, span: self.since(start) })
    }

    // ---- programs ----

    fn binding(&mut self) -> PResult<(String, Type, Term)> {
        let x = self.ident()?;
        self.expect_sym(":")?;
        let t = self.ty()?;
        self.expect_sym("=")?;
        let body = self.term()?;
        Ok((x, t, body))
    }

    pub fn program(&mut self) -> PResult<Program> {
        let used: BTreeSet<String> = self
            .toks
            .iter()
            .filter_map(|t| match &t.tok {
                Tok::Ident(s) => Some(s.clone()),
                _ => None,
            })
            .collect();
        let mut defs = Vec::new();
        while !self.at_eof() {
            let start = self.span();
            if self.eat_word("def") {
                let (name, ty, body) = self.binding()?;
                defs.push(Def::Single { name, ty, body, span: self.since(start) });
            } else if self.eat_word("rec") {
                self.expect_word("def")?;
                let mut group = vec![self.binding()?];
                while self.eat_word("and") {
                    group.push(self.binding()?);
                }
                let span = self.since(start);
                if group.len() == 1 {
                    let (name, ty, body) = group.pop().expect("one binding");
                    let body = Term { kind: TermKind::Rec(name.clone(), ty.clone(), a(body)), span };
                    defs.push(Def::Single { name, ty, body, span });
                } else {
                    defs.push(desugar_group(group, &used, span));
                }
            } else {
                return Err(self.error(format!("expected `def` or `rec def`, found {}", self.describe())));
            }
        }
        Ok(Program { defs })
    }
}

/// One recursion over the right-nested product of the group, whose body
/// rebinds each member through projections under one step of delay.
fn desugar_group(group: Vec<(String, Type, Term)>, used: &BTreeSet<String>, span: Span) -> Def {
    let mut g = group.iter().map(|(x, _, _)| x.as_str()).collect::<Vec<_>>().join("_");
    while used.contains(&g) {
        g.push('\'');
    }
    let k = group.len();
    let prod =
        group.iter().rev().map(|(_, t, _)| t.clone()).reduce(|acc, t| Type::prod(t, acc)).expect("non-empty group");
    let tuple = group
        .iter()
        .rev()
        .map(|(_, _, b)| b.clone())
        .reduce(|acc, b| Term::pair(b, acc).with_span(span))
        .expect("non-empty group");
    let mut body = tuple;
    for (i, (x, t, _)) in group.iter().enumerate().rev() {
        let mut path = Term::var(&g).with_span(span);
        for _ in 0..i {
            path = Term::proj(Side::Right, path).with_span(span);
        }
        if i + 1 < k {
            path = Term::proj(Side::Left, path).with_span(span);
        }
        let later = Type::warped(Warp::later(), t.clone());
        body = Term::app(Term::fun(x, later, body).with_span(span), path).with_span(span);
    }
    let names = group.iter().map(|(x, t, _)| (x.clone(), t.clone())).collect();
    let body = Term::rec(&g, prod, body).with_span(span);
    Def::Group { names, body, span }
}

fn whole<T>(src: &str, f: impl FnOnce(&mut Parser) -> PResult<T>) -> PResult<T> {
    let mut p = Parser::new(src)?;
    let out = f(&mut p)?;
    p.expect_eof()?;
    Ok(out)
}

pub fn parse_program(src: &str) -> PResult<Program> {
    whole(src, |p| p.program())
}

pub fn parse_term(src: &str) -> PResult<Term> {
    whole(src, |p| p.term())
}

pub fn parse_type(src: &str) -> PResult<Type> {
    whole(src, |p| p.ty())
}

pub fn parse_coercion(src: &str) -> PResult<Coercion> {
    whole(src, |p| p.coercion())
}

pub fn parse_warp(src: &str) -> PResult<Warp> {
    whole(src, |p| p.warp())
}
