//! Semantic typing of values, used to test type safety.

use crate::syntax::{Ground, Side, Term, Type};
use crate::warp::{ExtNat, Fin, Omega};

use super::{apply, evaluate, truncate, Env, Value};

/// A closed explicit term of type `ty`.
pub fn inhabitant(ty: &Type) -> Term {
    match ty {
        Type::Ground(Ground::Int) => Term::int(0),
        Type::Ground(Ground::Bool) => Term::bool(false),
        Type::Stream(a) => Term::rec("_s", ty.clone(), Term::cons(inhabitant(a), Term::var("_s"))),
        Type::Arrow(a, b) => Term::fun("_x", (**a).clone(), inhabitant(b)),
        Type::Prod(a, b) => Term::pair(inhabitant(a), inhabitant(b)),
        Type::Sum(a, b) => Term::inj(Side::Left, (**b).clone(), inhabitant(a)),
        Type::Warped(p, a) => Term::by(inhabitant(a), p.clone()),
    }
}

/// Whether `v` is a value of `ty` at step `n`. Functions are probed with a
/// canonical argument and suspended values are sampled at steps 1 and 2.
pub fn value_has_type(v: &Value, ty: &Type, n: ExtNat) -> bool {
    stacker::maybe_grow(128 * 1024, 4 * 1024 * 1024, || has_type_at(v, ty, n))
}

fn has_type_at(v: &Value, ty: &Type, n: ExtNat) -> bool {
    if n == Fin(0) {
        return *v == Value::Stop;
    }
    if let Value::Thunk { .. } = v {
        let samples = match n {
            Fin(k) => vec![k],
            Omega => vec![1, 2],
        };
        return samples.iter().all(|&j| match truncate(v, Fin(j)) {
            Ok(w) => !matches!(w, Value::Thunk { .. }) && value_has_type(&w, ty, Fin(j)),
            Err(_) => false,
        });
    }
    match (ty, v) {
        (Type::Ground(g), Value::Scalar(s)) => s.ground() == *g,
        (Type::Stream(a), Value::Cons(h, t)) => {
            let rest = match n {
                Fin(k) => Fin(k - 1),
                Omega => Omega,
            };
            value_has_type(h, a, n) && value_has_type(t, ty, rest)
        }
        (Type::Arrow(a, b), Value::Closure { .. }) => {
            let Ok(arg) = evaluate(&inhabitant(a), &Env::new(), n) else {
                return false;
            };
            match apply(v, arg, n) {
                Ok(out) => value_has_type(&out, b, n),
                Err(_) => false,
            }
        }
        (Type::Prod(a, b), Value::Pair(l, r)) => value_has_type(l, a, n) && value_has_type(r, b, n),
        (Type::Sum(a, _), Value::Inj(Side::Left, w)) => value_has_type(w, a, n),
        (Type::Sum(_, b), Value::Inj(Side::Right, w)) => value_has_type(w, b, n),
        (Type::Warped(p, a), Value::Warped(q, w)) => p == q && value_has_type(w, a, p.eval(n)),
        _ => false,
    }
}
