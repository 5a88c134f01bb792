//! Step-indexed big-step evaluation of explicit terms.
//!
//! Evaluating at step `n` computes the `n`-th approximation of a term's
//! value. Step 0 always yields [`Value::Stop`] and step `w` suspends the
//! term in a thunk, so evaluation of a well-typed term always terminates.

mod typing;
mod value;

use std::sync::Arc;

use thiserror::Error;

use crate::elab::TopDef;
use crate::syntax::{Coercion, CtxCoercion, Side, Term, TermKind};
use crate::warp::{ExtNat, Fin, Omega, Warp};

pub use typing::{inhabitant, value_has_type};
pub use value::{Env, Value};

pub type Step = ExtNat;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("unbound variable `{0}` at run time")]
    Unbound(String),
    #[error("{context}: unexpected value `{value}`")]
    Shape { context: &'static str, value: String },
    #[error("primitive applied to unsuitable arguments")]
    Prim,
}

type VResult = Result<Value, EvalError>;

fn shape(context: &'static str, v: &Value) -> EvalError {
    EvalError::Shape { context, value: v.to_string() }
}

fn pred(n: u64) -> Step {
    Fin(n - 1)
}

// Values nest closures over earlier iterates, so recursion gets deep.
const RED_ZONE: usize = 128 * 1024;
const STACK_CHUNK: usize = 4 * 1024 * 1024;

fn deep<R>(f: impl FnOnce() -> R) -> R {
    stacker::maybe_grow(RED_ZONE, STACK_CHUNK, f)
}

/// Evaluates `e` under `env` (typed at `n`) at step `n`.
pub fn evaluate(e: &Term, env: &Env, n: Step) -> VResult {
    deep(|| eval_at(e, env, n))
}

fn eval_at(e: &Term, env: &Env, n: Step) -> VResult {
    let k = match n {
        Fin(0) => return Ok(Value::Stop),
        Omega => return Ok(Value::thunk(e.clone(), env.clone())),
        Fin(k) => k,
    };
    use TermKind::*;
    match &e.kind {
        Var(x) => env.get(x).cloned().ok_or_else(|| EvalError::Unbound(x.clone())),
        Scalar(s) => Ok(Value::Scalar(*s)),
        Fun(x, _, body) => Ok(Value::Closure { param: x.clone(), body: body.clone(), env: env.clone() }),
        App(f, arg) => {
            let vf = evaluate(f, env, n)?;
            let va = evaluate(arg, env, n)?;
            apply(&vf, va, n)
        }
        Pair(l, r) => Ok(Value::pair(evaluate(l, env, n)?, evaluate(r, env, n)?)),
        Proj(side, t) => match evaluate(t, env, n)? {
            Value::Pair(l, r) => Ok(if *side == Side::Left { (*l).clone() } else { (*r).clone() }),
            v => Err(shape("projection", &v)),
        },
        Inj(side, _, t) => Ok(Value::Inj(*side, Arc::new(evaluate(t, env, n)?))),
        Case { scrutinee, left, right } => match evaluate(scrutinee, env, n)? {
            Value::Inj(Side::Left, v) => evaluate(&left.1, &env.insert(&left.0, (*v).clone()), n),
            Value::Inj(Side::Right, v) => evaluate(&right.1, &env.insert(&right.0, (*v).clone()), n),
            v => Err(shape("case", &v)),
        },
        Prim(op, args) => {
            let mut scalars = Vec::with_capacity(args.len());
            for a in args {
                match evaluate(a, env, n)? {
                    Value::Scalar(s) => scalars.push(s),
                    v => return Err(shape("primitive argument", &v)),
                }
            }
            op.apply(&scalars).map(Value::Scalar).ok_or(EvalError::Prim)
        }
        Rec(x, _, body) => iterate(x, body, env, Value::Stop, 0, k),
        By(t, p) => {
            let v = evaluate(t, &purge(env, p), p.eval(n))?;
            Ok(Value::warped(p.clone(), v))
        }
        Head(t) => match evaluate(t, env, n)? {
            Value::Cons(h, _) => Ok((*h).clone()),
            v => Err(shape("head", &v)),
        },
        Tail(t) => match evaluate(t, env, n)? {
            Value::Cons(_, tl) => Ok(Value::Warped(Warp::later(), tl)),
            v => Err(shape("tail", &v)),
        },
        Cons(h, t) => {
            let vh = evaluate(h, env, n)?;
            match evaluate(t, env, n)? {
                Value::Warped(_, tl) => Ok(Value::Cons(Arc::new(vh), tl)),
                v => Err(shape("cons tail", &v)),
            }
        }
        CoeR(t, c) => apply_coercion(c, evaluate(t, env, n)?, n),
        CoeL(beta, t) => evaluate(t, &coerce_env(beta, env, n)?, n),
    }
}

fn apply(f: &Value, arg: Value, n: Step) -> VResult {
    match f {
        Value::Closure { param, body, env } => evaluate(body, &env.insert(param, arg), n),
        v => Err(shape("application", v)),
    }
}

fn coerce_env(beta: &CtxCoercion, env: &Env, n: Step) -> Result<Env, EvalError> {
    beta.iter()
        .map(|(x, c)| {
            let v = env.get(x).ok_or_else(|| EvalError::Unbound(x.clone()))?;
            Ok((x.clone(), apply_coercion(c, v.clone(), n)?))
        })
        .collect()
}

/// Keeps the bindings warped by exactly `p`, unwrapped.
pub fn purge(env: &Env, p: &Warp) -> Env {
    env.iter()
        .filter_map(|(x, v)| match v {
            Value::Warped(q, w) if q == p => Some((x.clone(), (**w).clone())),
            _ => None,
        })
        .collect()
}

/// Unfolds a recursive definition from step `m` (with approximation `v`)
/// up to step `n`.
pub fn iterate(x: &str, body: &Term, env: &Env, mut v: Value, m: u64, n: u64) -> VResult {
    for i in m..n {
        let env_i = truncate_env(env, Fin(i + 1))?;
        let env_i = env_i.insert(x, Value::warped(Warp::later(), v));
        v = evaluate(body, &env_i, Fin(i + 1))?;
    }
    Ok(v)
}

/// Forgets everything past step `n`. Thunks are forced.
pub fn truncate(v: &Value, n: Step) -> VResult {
    deep(|| truncate_at(v, n))
}

fn truncate_at(v: &Value, n: Step) -> VResult {
    let k = match n {
        Fin(0) => return Ok(Value::Stop),
        Omega => return Ok(v.clone()),
        Fin(k) => k,
    };
    Ok(match v {
        Value::Stop => return Err(shape("truncation", v)),
        Value::Scalar(_) => v.clone(),
        Value::Cons(h, t) => Value::cons(truncate(h, n)?, truncate(t, pred(k))?),
        Value::Closure { param, body, env } => {
            Value::Closure { param: param.clone(), body: body.clone(), env: truncate_env(env, n)? }
        }
        Value::Pair(l, r) => Value::pair(truncate(l, n)?, truncate(r, n)?),
        Value::Inj(side, w) => Value::Inj(*side, Arc::new(truncate(w, n)?)),
        Value::Thunk { term, env, peel } => force(term, env, peel.as_ref(), k)?,
        Value::Warped(p, w) => Value::warped(p.clone(), truncate(w, p.eval(n))?),
    })
}

pub fn truncate_env(env: &Env, n: Step) -> Result<Env, EvalError> {
    if n == Omega {
        return Ok(env.clone());
    }
    env.iter().map(|(x, v)| Ok((x.clone(), truncate(v, n)?))).collect()
}

/// Runs a thunk at finite step `k >= 1`.
fn force(term: &Term, env: &Env, peel: Option<&Warp>, k: u64) -> VResult {
    match peel {
        None => evaluate(term, &truncate_env(env, Fin(k))?, Fin(k)),
        Some(q) => {
            let m = q.first_at_least(k).expect("peeled thunks are only built over unbounded warps");
            match evaluate(term, &truncate_env(env, Fin(m))?, Fin(m))? {
                Value::Warped(_, w) => truncate(&w, Fin(k)),
                v => Err(shape("peeled thunk", &v)),
            }
        }
    }
}

fn unwrap_payload<'a>(context: &'static str, v: &'a Value) -> Result<(&'a Warp, &'a Value), EvalError> {
    match v {
        Value::Warped(p, w) => Ok((p, w)),
        _ => Err(shape(context, v)),
    }
}

/// The payload of a thunk of type `W q t` at step `w`, as a value of `t`
/// at step `q(w)`.
fn thunk_payload(term: &Arc<Term>, env: &Env, peel: &Option<Warp>, q: &Warp) -> VResult {
    let (term, q) = match peel {
        None => (term.clone(), q.clone()),
        Some(r) => (Arc::new(Term::coe_r((**term).clone(), Coercion::Concat(r.clone(), q.clone()))), r.compose(q)),
    };
    match q.eval(Omega) {
        Fin(0) => Ok(Value::Stop),
        Fin(big) => {
            let m = q.first_at_least(big).expect("value is reached");
            let v = evaluate(&term, &truncate_env(env, Fin(m))?, Fin(m))?;
            let (_, w) = unwrap_payload("thunk payload", &v)?;
            Ok(w.clone())
        }
        Omega => Ok(Value::Thunk { term, env: env.clone(), peel: Some(q) }),
    }
}

/// Pushes a coercion under a thunk at step `w`.
fn suspend(c: &Coercion, term: &Arc<Term>, env: &Env, peel: &Option<Warp>) -> Value {
    let c = match peel {
        None => c.clone(),
        Some(q) => Coercion::on_warp(q.clone(), c.clone()),
    };
    Value::Thunk { term: Arc::new(Term::coe_r((**term).clone(), c)), env: env.clone(), peel: peel.clone() }
}

/// Applies a coercion to a value at step `n`.
pub fn apply_coercion(c: &Coercion, v: Value, n: Step) -> VResult {
    deep(|| coerce_at(c, v, n))
}

fn coerce_at(c: &Coercion, v: Value, n: Step) -> VResult {
    use Coercion::*;
    if n == Fin(0) {
        return Ok(Value::Stop);
    }
    if let (Omega, Value::Thunk { term, env, peel }) = (n, &v) {
        return Ok(suspend(c, term, env, peel));
    }
    Ok(match c {
        Id => v,
        Seq(a, b) => apply_coercion(b, apply_coercion(a, v, n)?, n)?,
        OnStream(a) => match (&v, n) {
            (Value::Cons(h, t), Fin(k)) => {
                Value::cons(apply_coercion(a, (**h).clone(), n)?, apply_coercion(c, (**t).clone(), pred(k))?)
            }
            _ => return Err(shape("stream coercion", &v)),
        },
        OnArrow(dom, cod) => match &v {
            Value::Closure { param, body, env } => {
                let mut beta: CtxCoercion = env.names().map(|y| (y.clone(), Id)).collect();
                beta.insert(param.clone(), (**dom).clone());
                let body = Term::coe_r(Term::coe_l(beta, (**body).clone()), (**cod).clone());
                Value::Closure { param: param.clone(), body: Arc::new(body), env: env.clone() }
            }
            _ => return Err(shape("function coercion", &v)),
        },
        OnProd(a, b) => match &v {
            Value::Pair(l, r) => {
                Value::pair(apply_coercion(a, (**l).clone(), n)?, apply_coercion(b, (**r).clone(), n)?)
            }
            _ => return Err(shape("product coercion", &v)),
        },
        OnSum(a, b) => match &v {
            Value::Inj(Side::Left, w) => Value::Inj(Side::Left, Arc::new(apply_coercion(a, (**w).clone(), n)?)),
            Value::Inj(Side::Right, w) => Value::Inj(Side::Right, Arc::new(apply_coercion(b, (**w).clone(), n)?)),
            _ => return Err(shape("sum coercion", &v)),
        },
        OnWarp(p, a) => {
            let (q, w) = unwrap_payload("warp coercion", &v)?;
            Value::warped(q.clone(), apply_coercion(a, w.clone(), p.eval(n))?)
        }
        Wrap => Value::warped(Warp::id(), v),
        Unwrap => unwrap_payload("unwrap", &v)?.1.clone(),
        Concat(p, q) => {
            let (_, inner) = unwrap_payload("concat", &v)?;
            let payload = match inner {
                Value::Stop => Value::Stop,
                Value::Warped(_, w) => (**w).clone(),
                Value::Thunk { term, env, peel } => thunk_payload(term, env, peel, q)?,
                other => return Err(shape("concat payload", other)),
            };
            Value::warped(p.compose(q), payload)
        }
        Decat(p, q) => {
            let (_, w) = unwrap_payload("decat", &v)?;
            Value::warped(p.clone(), Value::warped(q.clone(), w.clone()))
        }
        Inflate => match &v {
            Value::Scalar(s) => Value::warped(Warp::omega(), Value::thunk(Term::scalar(*s), Env::new())),
            _ => return Err(shape("inflate", &v)),
        },
        Dist => {
            let (p, inner) = unwrap_payload("dist", &v)?;
            let (l, r) = match inner {
                Value::Pair(l, r) => ((**l).clone(), (**r).clone()),
                Value::Stop => (Value::Stop, Value::Stop),
                Value::Thunk { term, env, peel } => {
                    let base = match peel {
                        None => (**term).clone(),
                        Some(_) => Term::coe_r((**term).clone(), Dist),
                    };
                    let part = |side| Value::Thunk {
                        term: Arc::new(Term::proj(side, base.clone())),
                        env: env.clone(),
                        peel: peel.clone(),
                    };
                    (part(Side::Left), part(Side::Right))
                }
                other => return Err(shape("dist payload", other)),
            };
            Value::pair(Value::warped(p.clone(), l), Value::warped(p.clone(), r))
        }
        Fact => match &v {
            Value::Pair(l, r) => {
                let (p, a) = unwrap_payload("fact", l)?;
                let (_, b) = unwrap_payload("fact", r)?;
                let payload = if p.eval(n) == Fin(0) { Value::Stop } else { Value::pair(a.clone(), b.clone()) };
                Value::warped(p.clone(), payload)
            }
            _ => return Err(shape("fact", &v)),
        },
        Delay(_, q) => {
            let (_, w) = unwrap_payload("delay", &v)?;
            Value::warped(q.clone(), truncate(w, q.eval(n))?)
        }
    })
}

/// Evaluates each definition at step `n`, with earlier definitions in
/// scope.
pub fn evaluate_program(defs: &[TopDef], n: Step) -> Result<Vec<(String, Value)>, EvalError> {
    let mut env = Env::new();
    let mut out = Vec::with_capacity(defs.len());
    for d in defs {
        let v = evaluate(&d.term, &env, n)?;
        env = env.insert(&d.name, v.clone());
        out.push((d.name.clone(), v));
    }
    Ok(out)
}
