//! Elaboration of implicit terms into explicit ones.
//!
//! Each construct is elaborated at its minimal type; where a construct
//! needs a particular shape the canonical coercion to that shape is
//! inserted.

use std::sync::Arc;

use thiserror::Error;

use crate::checker::{check_explicit, TypeError};
use crate::subtype::{coe, normalize, type_div, type_sup};
use crate::syntax::{Context, CtxCoercion, Def, Program, Side, Span, Term, TermKind, Type};
use crate::warp::Warp;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ElabError {
    #[error("unbound variable `{name}`")]
    Unbound { name: String, span: Span },
    #[error("{clause}: `{from}` is not a subtype of `{to}`")]
    NotCoercible { clause: &'static str, from: Type, to: Type, span: Span },
    #[error("{clause}: expected {expected}, found `{found}`")]
    Shape { clause: &'static str, expected: &'static str, found: Type, span: Span },
    #[error("{clause}: `{left}` and `{right}` have no common supertype")]
    NoBound { clause: &'static str, left: Type, right: Type, span: Span },
    #[error("primitive expects {expected} arguments, found {found}")]
    Arity { expected: usize, found: usize, span: Span },
    #[error("coercions may not appear in implicit terms")]
    Explicit { span: Span },
}

impl ElabError {
    pub fn span(&self) -> Span {
        match self {
            ElabError::Unbound { span, .. }
            | ElabError::NotCoercible { span, .. }
            | ElabError::Shape { span, .. }
            | ElabError::NoBound { span, .. }
            | ElabError::Arity { span, .. }
            | ElabError::Explicit { span } => *span,
        }
    }
}

type EResult<T> = Result<T, ElabError>;

fn node(kind: TermKind, span: Span) -> Term {
    Term { kind, span }
}

/// `e` coerced from `from` to `to`; no node is added for the identity.
fn coerce(e: Term, from: &Type, to: &Type, clause: &'static str) -> EResult<Term> {
    let span = e.span;
    match coe(from, to) {
        Some(crate::syntax::Coercion::Id) => Ok(e),
        Some(c) => Ok(node(TermKind::CoeR(Arc::new(e), c), span)),
        None => Err(ElabError::NotCoercible { clause, from: from.clone(), to: to.clone(), span }),
    }
}

/// The rump under the outer warp of a normal type.
fn rump(t: &Type) -> Option<&Type> {
    match t {
        Type::Warped(_, r) => Some(r),
        _ => None,
    }
}

fn shape(clause: &'static str, expected: &'static str, found: &Type, span: Span) -> ElabError {
    ElabError::Shape { clause, expected, found: found.clone(), span }
}

/// Elaborates `t` under `ctx`, returning its minimal type and an explicit
/// term of that type.
pub fn elaborate(ctx: &Context, t: &Term) -> EResult<(Type, Term)> {
    use TermKind::*;
    let span = t.span;
    let a = Arc::new;
    Ok(match &t.kind {
        Var(x) => {
            let ty = ctx.lookup(x).cloned().ok_or_else(|| ElabError::Unbound { name: x.clone(), span })?;
            (ty, t.clone())
        }
        Scalar(s) => (Type::Ground(s.ground()), t.clone()),
        Fun(x, dom, body) => {
            let (cod, e) = elaborate(&ctx.extend(x, dom.clone()), body)?;
            (Type::arrow(dom.clone(), cod), node(Fun(x.clone(), dom.clone(), a(e)), span))
        }
        App(f, arg) => {
            let (tf, ef) = elaborate(ctx, f)?;
            let nf = normalize(&tf);
            let Some(Type::Arrow(dom, cod)) = rump(&nf) else {
                return Err(shape("application", "a function", &tf, f.span));
            };
            let ef = coerce(ef, &tf, &Type::Arrow(dom.clone(), cod.clone()), "application")?;
            let (targ, earg) = elaborate(ctx, arg)?;
            let earg = coerce(earg, &targ, dom, "argument")?;
            ((**cod).clone(), node(App(a(ef), a(earg)), span))
        }
        Pair(l, r) => {
            let (tl, el) = elaborate(ctx, l)?;
            let (tr, er) = elaborate(ctx, r)?;
            (Type::prod(tl, tr), node(Pair(a(el), a(er)), span))
        }
        Proj(side, inner) => {
            let (ti, ei) = elaborate(ctx, inner)?;
            let n = normalize(&ti);
            let Type::Prod(l, r) = &n else {
                return Err(shape("projection", "a product", &ti, inner.span));
            };
            let ei = coerce(ei, &ti, &n, "projection")?;
            let ty = if *side == Side::Left { (**l).clone() } else { (**r).clone() };
            (ty, node(Proj(*side, a(ei)), span))
        }
        Inj(side, other, inner) => {
            let (ti, ei) = elaborate(ctx, inner)?;
            let ty = match side {
                Side::Left => Type::sum(ti, other.clone()),
                Side::Right => Type::sum(other.clone(), ti),
            };
            (ty, node(Inj(*side, other.clone(), a(ei)), span))
        }
        Case { scrutinee, left, right } => {
            let (ts, es) = elaborate(ctx, scrutinee)?;
            let ns = normalize(&ts);
            let Some(Type::Sum(l, r)) = rump(&ns) else {
                return Err(shape("case", "a sum", &ts, scrutinee.span));
            };
            let es = coerce(es, &ts, &Type::Sum(l.clone(), r.clone()), "case")?;
            let (tl, el) = elaborate(&ctx.extend(&left.0, (**l).clone()), &left.1)?;
            let (tr, er) = elaborate(&ctx.extend(&right.0, (**r).clone()), &right.1)?;
            let sup = type_sup(&tl, &tr).ok_or_else(|| ElabError::NoBound {
                clause: "case branches",
                left: tl.clone(),
                right: tr.clone(),
                span,
            })?;
            let el = coerce(el, &tl, &sup, "case branch")?;
            let er = coerce(er, &tr, &sup, "case branch")?;
            let kind = Case { scrutinee: a(es), left: (left.0.clone(), a(el)), right: (right.0.clone(), a(er)) };
            (sup, node(kind, span))
        }
        Prim(op, args) => {
            let (params, result) = op.signature();
            if params.len() != args.len() {
                return Err(ElabError::Arity { expected: params.len(), found: args.len(), span });
            }
            let mut out = Vec::with_capacity(args.len());
            for (g, arg) in params.iter().zip(args) {
                let (ta, ea) = elaborate(ctx, arg)?;
                out.push(a(coerce(ea, &ta, &Type::Ground(*g), "primitive argument")?));
            }
            (Type::Ground(result), node(Prim(*op, out), span))
        }
        Rec(x, ty, body) => {
            let inner = ctx.extend(x, Type::warped(Warp::later(), ty.clone()));
            let (tb, eb) = elaborate(&inner, body)?;
            let eb = coerce(eb, &tb, ty, "recursion")?;
            (ty.clone(), node(Rec(x.clone(), ty.clone(), a(eb)), span))
        }
        By(body, p) => {
            let free = body.free_vars();
            let used = ctx.restrict(|x| free.contains(x));
            let mut beta = CtxCoercion::new();
            let mut divided = Context::new();
            for (x, tx) in used.iter() {
                let d = type_div(tx, p);
                let c = coe(tx, &Type::warped(p.clone(), d.clone())).ok_or_else(|| ElabError::NotCoercible {
                    clause: "delayed context",
                    from: tx.clone(),
                    to: Type::warped(p.clone(), d.clone()),
                    span,
                })?;
                beta.insert(x.clone(), c);
                divided.push(x, d);
            }
            let (tb, eb) = elaborate(&divided, body)?;
            let by = node(By(a(eb), p.clone()), span);
            let e = if beta.is_empty() { by } else { node(CoeL(beta, a(by)), span) };
            (Type::warped(p.clone(), tb), e)
        }
        Head(s) | Tail(s) => {
            let (ts, es) = elaborate(ctx, s)?;
            let ns = normalize(&ts);
            let Some(Type::Stream(elem)) = rump(&ns) else {
                return Err(shape("stream access", "a stream", &ts, s.span));
            };
            let st = Type::Stream(elem.clone());
            let es = coerce(es, &ts, &st, "stream access")?;
            if matches!(t.kind, Head(_)) {
                ((**elem).clone(), node(Head(a(es)), span))
            } else {
                (Type::warped(Warp::later(), st), node(Tail(a(es)), span))
            }
        }
        Cons(h, tl) => {
            let (th, eh) = elaborate(ctx, h)?;
            let (tt, et) = elaborate(ctx, tl)?;
            let nt = normalize(&tt);
            let Some(Type::Stream(elem)) = rump(&nt) else {
                return Err(shape("cons", "a stream tail", &tt, tl.span));
            };
            let sup = type_sup(&th, elem).ok_or_else(|| ElabError::NoBound {
                clause: "cons",
                left: th.clone(),
                right: (**elem).clone(),
                span,
            })?;
            let eh = coerce(eh, &th, &sup, "cons head")?;
            let delayed = Type::warped(Warp::later(), Type::stream(sup.clone()));
            let et = coerce(et, &tt, &delayed, "cons tail")?;
            (Type::stream(sup), node(Cons(a(eh), a(et)), span))
        }
        CoeR(..) | CoeL(..) => return Err(ElabError::Explicit { span }),
    })
}

/// An elaborated top-level definition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopDef {
    pub name: String,
    pub ty: Type,
    pub term: Term,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProgramError {
    #[error("in `{def}`: {error}")]
    Elab { def: String, error: ElabError },
    #[error("in `{def}`: {error}")]
    Check { def: String, error: TypeError },
}

impl ProgramError {
    pub fn span(&self) -> Span {
        match self {
            ProgramError::Elab { error, .. } => error.span(),
            ProgramError::Check { error, .. } => error.span(),
        }
    }
}

/// Projections exposing each member of a definition group.
fn expose_group(names: &[(String, Type)], group: Term, span: Span) -> Vec<TopDef> {
    let k = names.len();
    names
        .iter()
        .enumerate()
        .map(|(i, (name, ty))| {
            let mut path = group.clone();
            for _ in 0..i {
                path = Term::proj(Side::Right, path).with_span(span);
            }
            if i + 1 < k {
                path = Term::proj(Side::Left, path).with_span(span);
            }
            TopDef { name: name.clone(), ty: ty.clone(), term: path }
        })
        .collect()
}

fn group_type(names: &[(String, Type)]) -> Type {
    names.iter().rev().map(|(_, t)| t.clone()).reduce(|acc, t| Type::prod(t, acc)).expect("non-empty group")
}

/// Elaborates definitions in order. Each body is coerced to its declared
/// type, and later definitions see earlier ones.
pub fn elaborate_program(prog: &Program) -> Result<Vec<TopDef>, ProgramError> {
    let mut ctx = Context::new();
    let mut out = Vec::new();
    for def in &prog.defs {
        let new = match def {
            Def::Single { name, ty, body, .. } => {
                let wrap = |error| ProgramError::Elab { def: name.clone(), error };
                let (t, e) = elaborate(&ctx, body).map_err(wrap)?;
                let e = coerce(e, &t, ty, "definition").map_err(wrap)?;
                vec![TopDef { name: name.clone(), ty: ty.clone(), term: e }]
            }
            Def::Group { names, body, span } => {
                let label = names.iter().map(|(x, _)| x.as_str()).collect::<Vec<_>>().join(", ");
                let (_, e) = elaborate(&ctx, body).map_err(|error| ProgramError::Elab { def: label, error })?;
                expose_group(names, e, *span)
            }
        };
        for d in &new {
            ctx.push(&d.name, d.ty.clone());
        }
        out.extend(new);
    }
    Ok(out)
}

/// Checks a program whose bodies are already explicit. Each body must have
/// exactly its declared type.
pub fn check_program(prog: &Program) -> Result<Vec<TopDef>, ProgramError> {
    let mut ctx = Context::new();
    let mut out = Vec::new();
    for def in &prog.defs {
        let (label, ty, body, new): (String, Type, &Term, Vec<TopDef>) = match def {
            Def::Single { name, ty, body, .. } => (
                name.clone(),
                ty.clone(),
                body,
                vec![TopDef { name: name.clone(), ty: ty.clone(), term: body.clone() }],
            ),
            Def::Group { names, body, span } => (
                names.iter().map(|(x, _)| x.as_str()).collect::<Vec<_>>().join(", "),
                group_type(names),
                body,
                expose_group(names, body.clone(), *span),
            ),
        };
        let found = check_explicit(&ctx, body).map_err(|error| ProgramError::Check { def: label.clone(), error })?;
        if found != ty {
            let error = TypeError::Mismatch { rule: "definition", expected: format!("`{ty}`"), found, span: body.span };
            return Err(ProgramError::Check { def: label, error });
        }
        for d in &new {
            ctx.push(&d.name, d.ty.clone());
        }
        out.extend(new);
    }
    Ok(out)
}
