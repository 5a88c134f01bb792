//! Algorithmic type checking of explicit terms.
//!
//! Types must match exactly; every use of subtyping has to appear in the
//! term as a coercion.

use thiserror::Error;

use crate::subtype::{coercion_target, CoercionError};
use crate::syntax::{Context, CtxCoercion, Side, Span, Term, TermKind, Type};
use crate::warp::Warp;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TypeError {
    #[error("unbound variable `{name}`")]
    Unbound { name: String, span: Span },
    #[error("{rule}: expected {expected}, found `{found}`")]
    Mismatch { rule: &'static str, expected: String, found: Type, span: Span },
    #[error("{source}")]
    Coercion {
        #[source]
        source: CoercionError,
        span: Span,
    },
    #[error("context coercion does not cover `{name}`")]
    Uncovered { name: String, span: Span },
}

impl TypeError {
    pub fn span(&self) -> Span {
        match self {
            TypeError::Unbound { span, .. }
            | TypeError::Mismatch { span, .. }
            | TypeError::Coercion { span, .. }
            | TypeError::Uncovered { span, .. } => *span,
        }
    }
}

fn mismatch<T>(rule: &'static str, expected: impl Into<String>, found: &Type, span: Span) -> Result<T, TypeError> {
    Err(TypeError::Mismatch { rule, expected: expected.into(), found: found.clone(), span })
}

fn expect_eq(rule: &'static str, expected: &Type, found: &Type, span: Span) -> Result<(), TypeError> {
    if expected == found {
        Ok(())
    } else {
        mismatch(rule, format!("`{expected}`"), found, span)
    }
}

/// Bindings warped by exactly `p`, with that warp removed. Other bindings
/// are dropped.
pub fn ctx_unwarp(ctx: &Context, p: &Warp) -> Context {
    ctx.iter()
        .filter_map(|(x, t)| match t {
            Type::Warped(q, inner) if q == p => Some((x.clone(), (**inner).clone())),
            _ => None,
        })
        .collect()
}

/// Applies a context coercion. Every binding of `ctx` must be covered.
pub fn check_ctx_coercion(beta: &CtxCoercion, ctx: &Context) -> Result<Context, TypeError> {
    ctx.iter()
        .map(|(x, t)| {
            let c = beta.get(x).ok_or_else(|| TypeError::Uncovered { name: x.clone(), span: Span::default() })?;
            let t2 = coercion_target(c, t).map_err(|source| TypeError::Coercion { source, span: Span::default() })?;
            Ok((x.clone(), t2))
        })
        .collect()
}

/// Computes the unique type of an explicit term.
pub fn check_explicit(ctx: &Context, e: &Term) -> Result<Type, TypeError> {
    use TermKind::*;
    let span = e.span;
    match &e.kind {
        Var(x) => ctx.lookup(x).cloned().ok_or_else(|| TypeError::Unbound { name: x.clone(), span }),
        Scalar(s) => Ok(Type::Ground(s.ground())),
        Fun(x, a, body) => {
            let b = check_explicit(&ctx.extend(x, a.clone()), body)?;
            Ok(Type::arrow(a.clone(), b))
        }
        App(f, arg) => match check_explicit(ctx, f)? {
            Type::Arrow(a, b) => {
                let t = check_explicit(ctx, arg)?;
                expect_eq("argument", &a, &t, arg.span)?;
                Ok(*b)
            }
            t => mismatch("application", "a function type", &t, f.span),
        },
        Pair(l, r) => Ok(Type::prod(check_explicit(ctx, l)?, check_explicit(ctx, r)?)),
        Proj(side, t) => match check_explicit(ctx, t)? {
            Type::Prod(a, b) => Ok(if *side == Side::Left { *a } else { *b }),
            t2 => mismatch("projection", "a product type", &t2, t.span),
        },
        Inj(side, other, t) => {
            let a = check_explicit(ctx, t)?;
            Ok(match side {
                Side::Left => Type::sum(a, other.clone()),
                Side::Right => Type::sum(other.clone(), a),
            })
        }
        Case { scrutinee, left, right } => match check_explicit(ctx, scrutinee)? {
            Type::Sum(a, b) => {
                let l = check_explicit(&ctx.extend(&left.0, *a), &left.1)?;
                let r = check_explicit(&ctx.extend(&right.0, *b), &right.1)?;
                expect_eq("case branches", &l, &r, right.1.span)?;
                Ok(l)
            }
            t => mismatch("case", "a sum type", &t, scrutinee.span),
        },
        Prim(op, args) => {
            let (params, result) = op.signature();
            if params.len() != args.len() {
                return mismatch("primitive", format!("{} arguments", params.len()), &Type::Ground(result), span);
            }
            for (g, arg) in params.iter().zip(args) {
                let t = check_explicit(ctx, arg)?;
                expect_eq("primitive argument", &Type::Ground(*g), &t, arg.span)?;
            }
            Ok(Type::Ground(result))
        }
        Rec(x, a, body) => {
            let inner = ctx.extend(x, Type::warped(Warp::later(), a.clone()));
            let t = check_explicit(&inner, body)?;
            expect_eq("recursion body", a, &t, body.span)?;
            Ok(a.clone())
        }
        By(t, p) => {
            let a = check_explicit(&ctx_unwarp(ctx, p), t)?;
            Ok(Type::warped(p.clone(), a))
        }
        Head(t) => match check_explicit(ctx, t)? {
            Type::Stream(a) => Ok(*a),
            t2 => mismatch("head", "a stream type", &t2, t.span),
        },
        Tail(t) => match check_explicit(ctx, t)? {
            Type::Stream(a) => Ok(Type::warped(Warp::later(), Type::Stream(a))),
            t2 => mismatch("tail", "a stream type", &t2, t.span),
        },
        Cons(h, t) => {
            let a = check_explicit(ctx, h)?;
            let expected = Type::warped(Warp::later(), Type::stream(a.clone()));
            let tt = check_explicit(ctx, t)?;
            expect_eq("cons tail", &expected, &tt, t.span)?;
            Ok(Type::stream(a))
        }
        CoeR(t, c) => {
            let a = check_explicit(ctx, t)?;
            coercion_target(c, &a).map_err(|source| TypeError::Coercion { source, span })
        }
        CoeL(beta, t) => {
            let restricted = ctx.restrict(|x| beta.contains_key(x));
            if let Some(x) = beta.keys().find(|x| restricted.lookup(x).is_none()) {
                return Err(TypeError::Unbound { name: x.clone(), span });
            }
            let coerced = check_ctx_coercion(beta, &restricted).map_err(|err| match err {
                TypeError::Coercion { source, .. } => TypeError::Coercion { source, span },
                other => other,
            })?;
            check_explicit(&coerced, t)
        }
    }
}
