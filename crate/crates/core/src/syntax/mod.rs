//! Types, terms, coercions and programs, with a parser and printer.

mod lexer;
mod parser;
mod printer;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::warp::Warp;

pub use lexer::{tokenize, Tok, Token};
pub use parser::{parse_coercion, parse_program, parse_term, parse_type, parse_warp, ParseError, Parser};

pub type Name = String;

/// Byte range in the source text. Spans never affect equality.
#[derive(Clone, Copy, Debug, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Span {
        Span { start, end }
    }

    pub fn join(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }

    /// One-based line and column of the span start.
    pub fn line_col(&self, src: &str) -> (usize, usize) {
        let upto = &src[..self.start.min(src.len())];
        let line = upto.matches('\n').count() + 1;
        let col = upto.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        (line, col)
    }
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl Eq for Span {}

impl Hash for Span {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ground {
    Int,
    Bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Type {
    Ground(Ground),
    Stream(Box<Type>),
    Arrow(Box<Type>, Box<Type>),
    Prod(Box<Type>, Box<Type>),
    Sum(Box<Type>, Box<Type>),
    Warped(Warp, Box<Type>),
}

impl Type {
    pub const INT: Type = Type::Ground(Ground::Int);
    pub const BOOL: Type = Type::Ground(Ground::Bool);

    pub fn stream(t: Type) -> Type {
        Type::Stream(Box::new(t))
    }

    pub fn arrow(a: Type, b: Type) -> Type {
        Type::Arrow(Box::new(a), Box::new(b))
    }

    pub fn prod(a: Type, b: Type) -> Type {
        Type::Prod(Box::new(a), Box::new(b))
    }

    pub fn sum(a: Type, b: Type) -> Type {
        Type::Sum(Box::new(a), Box::new(b))
    }

    pub fn warped(p: Warp, t: Type) -> Type {
        Type::Warped(p, Box::new(t))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Int(i64),
    Bool(bool),
}

impl Scalar {
    pub fn ground(self) -> Ground {
        match self {
            Scalar::Int(_) => Ground::Int,
            Scalar::Bool(_) => Ground::Bool,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Int(n) => write!(f, "{n}"),
            Scalar::Bool(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PrimOp {
    Add,
    Sub,
    Mul,
    Eq,
    Not,
}

impl PrimOp {
    /// Argument grounds and result ground.
    pub fn signature(self) -> (&'static [Ground], Ground) {
        use Ground::*;
        match self {
            PrimOp::Add | PrimOp::Sub | PrimOp::Mul => (&[Int, Int], Int),
            PrimOp::Eq => (&[Int, Int], Bool),
            PrimOp::Not => (&[Bool], Bool),
        }
    }

    pub fn arity(self) -> usize {
        self.signature().0.len()
    }

    pub fn apply(self, args: &[Scalar]) -> Option<Scalar> {
        use Scalar::*;
        Some(match (self, args) {
            (PrimOp::Add, [Int(a), Int(b)]) => Int(a.wrapping_add(*b)),
            (PrimOp::Sub, [Int(a), Int(b)]) => Int(a.wrapping_sub(*b)),
            (PrimOp::Mul, [Int(a), Int(b)]) => Int(a.wrapping_mul(*b)),
            (PrimOp::Eq, [Int(a), Int(b)]) => Bool(a == b),
            (PrimOp::Not, [Bool(b)]) => Bool(!b),
            _ => return None,
        })
    }
}

/// Left or right component of a product or sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Coercion {
    Id,
    Seq(Box<Coercion>, Box<Coercion>),
    OnStream(Box<Coercion>),
    /// Contravariant in the first component.
    OnArrow(Box<Coercion>, Box<Coercion>),
    OnProd(Box<Coercion>, Box<Coercion>),
    OnSum(Box<Coercion>, Box<Coercion>),
    OnWarp(Warp, Box<Coercion>),
    Wrap,
    Unwrap,
    Concat(Warp, Warp),
    Decat(Warp, Warp),
    Inflate,
    Dist,
    Fact,
    /// `Delay(p, q)` takes `W p t` to `W q t`; requires `q <= p`.
    Delay(Warp, Warp),
}

impl Coercion {
    pub fn seq(a: Coercion, b: Coercion) -> Coercion {
        Coercion::Seq(Box::new(a), Box::new(b))
    }

    pub fn on_stream(a: Coercion) -> Coercion {
        Coercion::OnStream(Box::new(a))
    }

    pub fn on_arrow(a: Coercion, b: Coercion) -> Coercion {
        Coercion::OnArrow(Box::new(a), Box::new(b))
    }

    pub fn on_prod(a: Coercion, b: Coercion) -> Coercion {
        Coercion::OnProd(Box::new(a), Box::new(b))
    }

    pub fn on_sum(a: Coercion, b: Coercion) -> Coercion {
        Coercion::OnSum(Box::new(a), Box::new(b))
    }

    pub fn on_warp(p: Warp, a: Coercion) -> Coercion {
        Coercion::OnWarp(p, Box::new(a))
    }
}

/// Context coercion: one coercion per variable.
pub type CtxCoercion = BTreeMap<Name, Coercion>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub kind: TermKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TermKind {
    Var(Name),
    Fun(Name, Type, Arc<Term>),
    App(Arc<Term>, Arc<Term>),
    Pair(Arc<Term>, Arc<Term>),
    Proj(Side, Arc<Term>),
    /// The type is the other summand.
    Inj(Side, Type, Arc<Term>),
    Case {
        scrutinee: Arc<Term>,
        left: (Name, Arc<Term>),
        right: (Name, Arc<Term>),
    },
    Scalar(Scalar),
    Prim(PrimOp, Vec<Arc<Term>>),
    Rec(Name, Type, Arc<Term>),
    By(Arc<Term>, Warp),
    Head(Arc<Term>),
    Tail(Arc<Term>),
    Cons(Arc<Term>, Arc<Term>),
    CoeR(Arc<Term>, Coercion),
    CoeL(CtxCoercion, Arc<Term>),
}

/// Terms produced by the parser; they never contain coercions.
pub type ImplicitTerm = Term;
/// Terms that may carry coercions.
pub type ExplicitTerm = Term;

impl From<TermKind> for Term {
    fn from(kind: TermKind) -> Term {
        Term { kind, span: Span::default() }
    }
}

fn a(t: Term) -> Arc<Term> {
    Arc::new(t)
}

/// Span-free constructors.
impl Term {
    pub fn var(x: &str) -> Term {
        TermKind::Var(x.to_string()).into()
    }
    pub fn fun(x: &str, ty: Type, body: Term) -> Term {
        TermKind::Fun(x.to_string(), ty, a(body)).into()
    }
    pub fn app(f: Term, arg: Term) -> Term {
        TermKind::App(a(f), a(arg)).into()
    }
    pub fn pair(l: Term, r: Term) -> Term {
        TermKind::Pair(a(l), a(r)).into()
    }
    pub fn proj(side: Side, t: Term) -> Term {
        TermKind::Proj(side, a(t)).into()
    }
    pub fn inj(side: Side, other: Type, t: Term) -> Term {
        TermKind::Inj(side, other, a(t)).into()
    }
    pub fn case(s: Term, x: &str, l: Term, y: &str, r: Term) -> Term {
        TermKind::Case { scrutinee: a(s), left: (x.to_string(), a(l)), right: (y.to_string(), a(r)) }.into()
    }
    pub fn int(n: i64) -> Term {
        TermKind::Scalar(Scalar::Int(n)).into()
    }
    pub fn bool(b: bool) -> Term {
        TermKind::Scalar(Scalar::Bool(b)).into()
    }
    pub fn scalar(s: Scalar) -> Term {
        TermKind::Scalar(s).into()
    }
    pub fn prim(op: PrimOp, args: Vec<Term>) -> Term {
        TermKind::Prim(op, args.into_iter().map(a).collect()).into()
    }
    pub fn rec(x: &str, ty: Type, body: Term) -> Term {
        TermKind::Rec(x.to_string(), ty, a(body)).into()
    }
    pub fn by(t: Term, p: Warp) -> Term {
        TermKind::By(a(t), p).into()
    }
    pub fn head(t: Term) -> Term {
        TermKind::Head(a(t)).into()
    }
    pub fn tail(t: Term) -> Term {
        TermKind::Tail(a(t)).into()
    }
    pub fn cons(h: Term, t: Term) -> Term {
        TermKind::Cons(a(h), a(t)).into()
    }
    pub fn coe_r(t: Term, c: Coercion) -> Term {
        TermKind::CoeR(a(t), c).into()
    }
    pub fn coe_l(b: CtxCoercion, t: Term) -> Term {
        TermKind::CoeL(b, a(t)).into()
    }

    pub fn with_span(mut self, span: Span) -> Term {
        self.span = span;
        self
    }

    /// Free variables.
    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        use TermKind::*;
        let under = |x: &Name, t: &Term, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>| {
            bound.push(x.clone());
            t.collect_free(bound, out);
            bound.pop();
        };
        match &self.kind {
            Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Fun(x, _, t) | Rec(x, _, t) => under(x, t, bound, out),
            App(l, r) | Pair(l, r) | Cons(l, r) => {
                l.collect_free(bound, out);
                r.collect_free(bound, out);
            }
            Proj(_, t) | Inj(_, _, t) | By(t, _) | Head(t) | Tail(t) | CoeR(t, _) => t.collect_free(bound, out),
            Case { scrutinee, left, right } => {
                scrutinee.collect_free(bound, out);
                under(&left.0, &left.1, bound, out);
                under(&right.0, &right.1, bound, out);
            }
            Scalar(_) => {}
            Prim(_, args) => args.iter().for_each(|t| t.collect_free(bound, out)),
            CoeL(beta, _) => {
                // The body only sees the coerced names.
                for x in beta.keys() {
                    if !bound.contains(x) {
                        out.insert(x.clone());
                    }
                }
            }
        }
    }

    /// Whether the term is free of coercions.
    pub fn is_implicit(&self) -> bool {
        use TermKind::*;
        match &self.kind {
            CoeR(..) | CoeL(..) => false,
            Var(_) | Scalar(_) => true,
            Fun(_, _, t) | Rec(_, _, t) | Proj(_, t) | Inj(_, _, t) | By(t, _) | Head(t) | Tail(t) => t.is_implicit(),
            App(l, r) | Pair(l, r) | Cons(l, r) => l.is_implicit() && r.is_implicit(),
            Case { scrutinee, left, right } => scrutinee.is_implicit() && left.1.is_implicit() && right.1.is_implicit(),
            Prim(_, args) => args.iter().all(|t| t.is_implicit()),
        }
    }

    /// Drops every coercion.
    pub fn erase(&self) -> ImplicitTerm {
        use TermKind::*;
        let e = |t: &Arc<Term>| Arc::new(t.erase());
        let kind = match &self.kind {
            CoeR(t, _) | CoeL(_, t) => return t.erase(),
            Var(x) => Var(x.clone()),
            Scalar(s) => Scalar(*s),
            Fun(x, ty, t) => Fun(x.clone(), ty.clone(), e(t)),
            Rec(x, ty, t) => Rec(x.clone(), ty.clone(), e(t)),
            Proj(s, t) => Proj(*s, e(t)),
            Inj(s, ty, t) => Inj(*s, ty.clone(), e(t)),
            By(t, p) => By(e(t), p.clone()),
            Head(t) => Head(e(t)),
            Tail(t) => Tail(e(t)),
            App(l, r) => App(e(l), e(r)),
            Pair(l, r) => Pair(e(l), e(r)),
            Cons(l, r) => Cons(e(l), e(r)),
            Case { scrutinee, left, right } => Case {
                scrutinee: e(scrutinee),
                left: (left.0.clone(), e(&left.1)),
                right: (right.0.clone(), e(&right.1)),
            },
            Prim(op, args) => Prim(*op, args.iter().map(e).collect()),
        };
        Term { kind, span: self.span }
    }
}

/// Ordered typing context with distinct names.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Context {
    bindings: Vec<(Name, Type)>,
}

impl Context {
    pub fn new() -> Context {
        Context::default()
    }

    pub fn lookup(&self, x: &str) -> Option<&Type> {
        self.bindings.iter().find(|(y, _)| y == x).map(|(_, t)| t)
    }

    /// Adds a binding, shadowing any previous binding of the same name.
    pub fn extend(&self, x: &str, ty: Type) -> Context {
        let mut out = self.clone();
        out.push(x, ty);
        out
    }

    pub fn push(&mut self, x: &str, ty: Type) {
        self.bindings.retain(|(y, _)| y != x);
        self.bindings.push((x.to_string(), ty));
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Type)> {
        self.bindings.iter().map(|(x, t)| (x, t))
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.bindings.iter().map(|(x, _)| x)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// Keeps only the bindings whose names satisfy `keep`.
    pub fn restrict(&self, keep: impl Fn(&str) -> bool) -> Context {
        Context { bindings: self.bindings.iter().filter(|(x, _)| keep(x)).cloned().collect() }
    }
}

impl FromIterator<(Name, Type)> for Context {
    fn from_iter<I: IntoIterator<Item = (Name, Type)>>(iter: I) -> Context {
        let mut ctx = Context::new();
        for (x, t) in iter {
            ctx.push(&x, t);
        }
        ctx
    }
}

/// A top-level definition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Def {
    Single {
        name: Name,
        ty: Type,
        body: Term,
        span: Span,
    },
    /// `rec def x1 : t1 = e1 and ...`, desugared to one recursion over a
    /// right-nested product. `body` is that recursion.
    Group {
        names: Vec<(Name, Type)>,
        body: Term,
        span: Span,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub defs: Vec<Def>,
}

// Display impls live in the printer.
pub use printer::{print_coercion, print_term, print_type};
