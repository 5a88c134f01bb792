//! Subtyping through coercions.
//!
//! Every type has a normal form in which each non-product node sits under
//! exactly one warp. Coercions between arbitrary types are built by moving
//! into normal form, comparing warps pointwise, and moving back out.

use thiserror::Error;

use crate::syntax::{Coercion, Type};
use crate::warp::Warp;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("coercion `{coercion}` does not apply to `{ty}`: {reason}")]
pub struct CoercionError {
    pub coercion: Coercion,
    pub ty: Type,
    pub reason: &'static str,
}

fn fail<T>(c: &Coercion, ty: &Type, reason: &'static str) -> Result<T, CoercionError> {
    Err(CoercionError { coercion: c.clone(), ty: ty.clone(), reason })
}

/// Normal form of a type.
pub fn normalize(t: &Type) -> Type {
    match t {
        Type::Ground(_) => Type::warped(Warp::omega(), t.clone()),
        Type::Stream(a) => Type::warped(Warp::id(), Type::stream(normalize(a))),
        Type::Arrow(a, b) => Type::warped(Warp::id(), Type::arrow(normalize(a), normalize(b))),
        Type::Sum(a, b) => Type::warped(Warp::id(), Type::sum(normalize(a), normalize(b))),
        Type::Prod(a, b) => Type::prod(normalize(a), normalize(b)),
        Type::Warped(p, a) => push_warp(p, &normalize(a)),
    }
}

/// `W p` applied to a normal type, pushed through products.
fn push_warp(p: &Warp, n: &Type) -> Type {
    match n {
        Type::Prod(a, b) => Type::prod(push_warp(p, a), push_warp(p, b)),
        Type::Warped(q, r) => Type::warped(p.compose(q), (**r).clone()),
        _ => unreachable!("normal types are products or warped"),
    }
}

pub fn is_normal(t: &Type) -> bool {
    match t {
        Type::Prod(a, b) => is_normal(a) && is_normal(b),
        Type::Warped(_, r) => match &**r {
            Type::Ground(_) => true,
            Type::Stream(a) => is_normal(a),
            Type::Arrow(a, b) | Type::Sum(a, b) => is_normal(a) && is_normal(b),
            _ => false,
        },
        _ => false,
    }
}

fn seq(a: Coercion, b: Coercion) -> Coercion {
    Coercion::seq(a, b)
}

/// Coercions `t <: N t` and `N t <: t`.
pub fn norm_coercions(t: &Type) -> (Coercion, Coercion) {
    (norm_in(t), norm_out(t))
}

fn norm_in(t: &Type) -> Coercion {
    match t {
        Type::Ground(_) => Coercion::Inflate,
        Type::Stream(a) => seq(Coercion::on_stream(norm_in(a)), Coercion::Wrap),
        Type::Arrow(a, b) => seq(Coercion::on_arrow(norm_out(a), norm_in(b)), Coercion::Wrap),
        Type::Sum(a, b) => seq(Coercion::on_sum(norm_in(a), norm_in(b)), Coercion::Wrap),
        Type::Prod(a, b) => Coercion::on_prod(norm_in(a), norm_in(b)),
        Type::Warped(p, inner) => match &**inner {
            Type::Prod(a, b) => seq(
                Coercion::Dist,
                Coercion::on_prod(
                    norm_in(&Type::warped(p.clone(), (**a).clone())),
                    norm_in(&Type::warped(p.clone(), (**b).clone())),
                ),
            ),
            _ => seq(Coercion::on_warp(p.clone(), norm_in(inner)), push_in(p, &normalize(inner))),
        },
    }
}

fn push_in(p: &Warp, n: &Type) -> Coercion {
    match n {
        Type::Warped(q, _) => Coercion::Concat(p.clone(), q.clone()),
        Type::Prod(a, b) => seq(Coercion::Dist, Coercion::on_prod(push_in(p, a), push_in(p, b))),
        _ => unreachable!("normal types are products or warped"),
    }
}

fn norm_out(t: &Type) -> Coercion {
    match t {
        Type::Ground(_) => seq(Coercion::Delay(Warp::omega(), Warp::id()), Coercion::Unwrap),
        Type::Stream(a) => seq(Coercion::Unwrap, Coercion::on_stream(norm_out(a))),
        Type::Arrow(a, b) => seq(Coercion::Unwrap, Coercion::on_arrow(norm_in(a), norm_out(b))),
        Type::Sum(a, b) => seq(Coercion::Unwrap, Coercion::on_sum(norm_out(a), norm_out(b))),
        Type::Prod(a, b) => Coercion::on_prod(norm_out(a), norm_out(b)),
        Type::Warped(p, inner) => match &**inner {
            Type::Prod(a, b) => seq(
                Coercion::on_prod(
                    norm_out(&Type::warped(p.clone(), (**a).clone())),
                    norm_out(&Type::warped(p.clone(), (**b).clone())),
                ),
                Coercion::Fact,
            ),
            _ => seq(push_out(p, &normalize(inner)), Coercion::on_warp(p.clone(), norm_out(inner))),
        },
    }
}

fn push_out(p: &Warp, n: &Type) -> Coercion {
    match n {
        Type::Warped(q, _) => Coercion::Decat(p.clone(), q.clone()),
        Type::Prod(a, b) => seq(Coercion::on_prod(push_out(p, a), push_out(p, b)), Coercion::Fact),
        _ => unreachable!("normal types are products or warped"),
    }
}

/// Coercion between normal types with the same shape, comparing warps
/// pointwise. Arrow domains are compared in reverse.
pub fn precedence(s: &Type, t: &Type) -> Option<Coercion> {
    match (s, t) {
        (Type::Ground(g), Type::Ground(h)) if g == h => Some(Coercion::Id),
        (Type::Stream(a), Type::Stream(b)) => Some(Coercion::on_stream(precedence(a, b)?)),
        (Type::Arrow(a1, b1), Type::Arrow(a2, b2)) => {
            Some(Coercion::on_arrow(precedence(a2, a1)?, precedence(b1, b2)?))
        }
        (Type::Prod(a1, b1), Type::Prod(a2, b2)) => Some(Coercion::on_prod(precedence(a1, a2)?, precedence(b1, b2)?)),
        (Type::Sum(a1, b1), Type::Sum(a2, b2)) => Some(Coercion::on_sum(precedence(a1, a2)?, precedence(b1, b2)?)),
        (Type::Warped(p, a), Type::Warped(q, b)) if q.leq(p) => {
            Some(seq(Coercion::Delay(p.clone(), q.clone()), Coercion::on_warp(q.clone(), precedence(a, b)?)))
        }
        _ => None,
    }
}

/// The canonical coercion from `s` to `t`, if `s <: t`.
pub fn coe(s: &Type, t: &Type) -> Option<Coercion> {
    if s == t {
        return Some(Coercion::Id);
    }
    let middle = precedence(&normalize(s), &normalize(t))?;
    Some(simplify(&seq(norm_in(s), seq(middle, norm_out(t)))))
}

/// The type a coercion produces from `t`.
pub fn coercion_target(c: &Coercion, t: &Type) -> Result<Type, CoercionError> {
    use Coercion::*;
    Ok(match (c, t) {
        (Id, _) => t.clone(),
        (Seq(a, b), _) => coercion_target(b, &coercion_target(a, t)?)?,
        (OnStream(a), Type::Stream(s)) => Type::stream(coercion_target(a, s)?),
        (OnArrow(a, b), Type::Arrow(s1, s2)) => Type::arrow(coercion_source(a, s1)?, coercion_target(b, s2)?),
        (OnProd(a, b), Type::Prod(s1, s2)) => Type::prod(coercion_target(a, s1)?, coercion_target(b, s2)?),
        (OnSum(a, b), Type::Sum(s1, s2)) => Type::sum(coercion_target(a, s1)?, coercion_target(b, s2)?),
        (OnWarp(p, a), Type::Warped(q, s)) if p == q => Type::warped(p.clone(), coercion_target(a, s)?),
        (Wrap, _) => Type::warped(Warp::id(), t.clone()),
        (Unwrap, Type::Warped(p, s)) if p.is_id() => (**s).clone(),
        (Concat(p, q), Type::Warped(p2, inner)) if p == p2 => match &**inner {
            Type::Warped(q2, s) if q == q2 => Type::warped(p.compose(q), (**s).clone()),
            _ => return fail(c, t, "expected a doubly warped type"),
        },
        (Decat(p, q), Type::Warped(r, s)) if *r == p.compose(q) => {
            Type::warped(p.clone(), Type::warped(q.clone(), (**s).clone()))
        }
        (Inflate, Type::Ground(_)) => Type::warped(Warp::omega(), t.clone()),
        (Dist, Type::Warped(p, inner)) => match &**inner {
            Type::Prod(a, b) => {
                Type::prod(Type::warped(p.clone(), (**a).clone()), Type::warped(p.clone(), (**b).clone()))
            }
            _ => return fail(c, t, "expected a warped product"),
        },
        (Fact, Type::Prod(a, b)) => match (&**a, &**b) {
            (Type::Warped(p, s1), Type::Warped(q, s2)) if p == q => {
                Type::warped(p.clone(), Type::prod((**s1).clone(), (**s2).clone()))
            }
            _ => return fail(c, t, "expected a product of equally warped types"),
        },
        (Delay(p, q), Type::Warped(r, s)) if p == r => {
            if !q.leq(p) {
                return fail(c, t, "a delay must not speed up");
            }
            Type::warped(q.clone(), (**s).clone())
        }
        _ => return fail(c, t, "shape mismatch"),
    })
}

/// The type a coercion must start from to produce `t`.
pub fn coercion_source(c: &Coercion, t: &Type) -> Result<Type, CoercionError> {
    use Coercion::*;
    Ok(match (c, t) {
        (Id, _) => t.clone(),
        (Seq(a, b), _) => coercion_source(a, &coercion_source(b, t)?)?,
        (OnStream(a), Type::Stream(s)) => Type::stream(coercion_source(a, s)?),
        (OnArrow(a, b), Type::Arrow(s1, s2)) => Type::arrow(coercion_target(a, s1)?, coercion_source(b, s2)?),
        (OnProd(a, b), Type::Prod(s1, s2)) => Type::prod(coercion_source(a, s1)?, coercion_source(b, s2)?),
        (OnSum(a, b), Type::Sum(s1, s2)) => Type::sum(coercion_source(a, s1)?, coercion_source(b, s2)?),
        (OnWarp(p, a), Type::Warped(q, s)) if p == q => Type::warped(p.clone(), coercion_source(a, s)?),
        (Wrap, Type::Warped(p, s)) if p.is_id() => (**s).clone(),
        (Unwrap, _) => Type::warped(Warp::id(), t.clone()),
        (Concat(p, q), Type::Warped(r, s)) if *r == p.compose(q) => {
            Type::warped(p.clone(), Type::warped(q.clone(), (**s).clone()))
        }
        (Decat(p, q), Type::Warped(p2, inner)) if p == p2 => match &**inner {
            Type::Warped(q2, s) if q == q2 => Type::warped(p.compose(q), (**s).clone()),
            _ => return fail(c, t, "expected a doubly warped type"),
        },
        (Inflate, Type::Warped(p, s)) if *p == Warp::omega() && matches!(**s, Type::Ground(_)) => (**s).clone(),
        (Dist, Type::Prod(a, b)) => match (&**a, &**b) {
            (Type::Warped(p, s1), Type::Warped(q, s2)) if p == q => {
                Type::warped(p.clone(), Type::prod((**s1).clone(), (**s2).clone()))
            }
            _ => return fail(c, t, "expected a product of equally warped types"),
        },
        (Fact, Type::Warped(p, inner)) => match &**inner {
            Type::Prod(a, b) => {
                Type::prod(Type::warped(p.clone(), (**a).clone()), Type::warped(p.clone(), (**b).clone()))
            }
            _ => return fail(c, t, "expected a warped product"),
        },
        (Delay(p, q), Type::Warped(r, s)) if q == r => {
            if !q.leq(p) {
                return fail(c, t, "a delay must not speed up");
            }
            Type::warped(p.clone(), (**s).clone())
        }
        _ => return fail(c, t, "shape mismatch"),
    })
}

/// Peephole simplification. Preserves the source and target of a
/// well-typed coercion.
pub fn simplify(c: &Coercion) -> Coercion {
    let mut items = Vec::new();
    flatten(c, &mut items);
    let mut stack: Vec<Coercion> = Vec::new();
    for mut item in items {
        loop {
            if item == Coercion::Id {
                break;
            }
            match stack.last().and_then(|top| fuse(top, &item)) {
                Some(fused) => {
                    stack.pop();
                    item = fused;
                }
                None => {
                    stack.push(item);
                    break;
                }
            }
        }
    }
    stack.into_iter().rev().reduce(|acc, c| seq(c, acc)).unwrap_or(Coercion::Id)
}

fn flatten(c: &Coercion, out: &mut Vec<Coercion>) {
    match c {
        Coercion::Seq(a, b) => {
            flatten(a, out);
            flatten(b, out);
        }
        _ => {
            let s = simplify_node(c);
            if let Coercion::Seq(..) = s {
                flatten(&s, out);
            } else {
                out.push(s);
            }
        }
    }
}

fn simplify_node(c: &Coercion) -> Coercion {
    use Coercion::*;
    let both = |a: &Coercion, b: &Coercion, mk: fn(Coercion, Coercion) -> Coercion| {
        let (a, b) = (simplify(a), simplify(b));
        if a == Id && b == Id {
            Id
        } else {
            mk(a, b)
        }
    };
    match c {
        OnStream(a) => match simplify(a) {
            Id => Id,
            a => Coercion::on_stream(a),
        },
        OnWarp(p, a) => match simplify(a) {
            Id => Id,
            a => Coercion::on_warp(p.clone(), a),
        },
        OnArrow(a, b) => both(a, b, Coercion::on_arrow),
        OnProd(a, b) => both(a, b, Coercion::on_prod),
        OnSum(a, b) => both(a, b, Coercion::on_sum),
        Delay(p, q) if p == q => Id,
        _ => c.clone(),
    }
}

/// Merges two adjacent coercions, when they simplify to one.
fn fuse(first: &Coercion, second: &Coercion) -> Option<Coercion> {
    use Coercion::*;
    let node = |c: Coercion| simplify_node(&c);
    Some(match (first, second) {
        (Wrap, Unwrap) | (Unwrap, Wrap) | (Dist, Fact) | (Fact, Dist) => Id,
        (Concat(p, q), Decat(r, s)) | (Decat(p, q), Concat(r, s)) if p == r && q == s => Id,
        (Delay(p, q), Delay(q2, r)) if q == q2 => node(Delay(p.clone(), r.clone())),
        (OnWarp(p, a), OnWarp(q, b)) if p == q => {
            node(Coercion::on_warp(p.clone(), simplify(&seq((**a).clone(), (**b).clone()))))
        }
        (OnStream(a), OnStream(b)) => node(Coercion::on_stream(seq((**a).clone(), (**b).clone()))),
        (OnProd(a1, b1), OnProd(a2, b2)) => {
            node(Coercion::on_prod(seq((**a1).clone(), (**a2).clone()), seq((**b1).clone(), (**b2).clone())))
        }
        (OnSum(a1, b1), OnSum(a2, b2)) => {
            node(Coercion::on_sum(seq((**a1).clone(), (**a2).clone()), seq((**b1).clone(), (**b2).clone())))
        }
        (OnArrow(a1, b1), OnArrow(a2, b2)) => {
            node(Coercion::on_arrow(seq((**a2).clone(), (**a1).clone()), seq((**b1).clone(), (**b2).clone())))
        }
        _ => return None,
    })
}

/// `t \ p`: the type that, warped by `p`, a value of type `t` can be
/// coerced to.
pub fn type_div(t: &Type, p: &Warp) -> Type {
    fn go(n: &Type, p: &Warp) -> Type {
        match n {
            Type::Prod(a, b) => Type::prod(go(a, p), go(b, p)),
            Type::Warped(q, r) => Type::warped(q.residual(p), (**r).clone()),
            _ => unreachable!("normal types are products or warped"),
        }
    }
    go(&normalize(t), p)
}

/// Least upper bound for subtyping, on normal forms.
pub fn type_sup(s: &Type, t: &Type) -> Option<Type> {
    bound(&normalize(s), &normalize(t), true)
}

/// Greatest lower bound for subtyping, on normal forms.
pub fn type_inf(s: &Type, t: &Type) -> Option<Type> {
    bound(&normalize(s), &normalize(t), false)
}

fn bound(s: &Type, t: &Type, upper: bool) -> Option<Type> {
    Some(match (s, t) {
        (Type::Ground(g), Type::Ground(h)) if g == h => s.clone(),
        (Type::Stream(a), Type::Stream(b)) => Type::stream(bound(a, b, upper)?),
        (Type::Arrow(a1, b1), Type::Arrow(a2, b2)) => Type::arrow(bound(a1, a2, !upper)?, bound(b1, b2, upper)?),
        (Type::Prod(a1, b1), Type::Prod(a2, b2)) => Type::prod(bound(a1, a2, upper)?, bound(b1, b2, upper)?),
        (Type::Sum(a1, b1), Type::Sum(a2, b2)) => Type::sum(bound(a1, a2, upper)?, bound(b1, b2, upper)?),
        (Type::Warped(p, a), Type::Warped(q, b)) => {
            let w = if upper { p.inf(q) } else { p.sup(q) };
            Type::warped(w, bound(a, b, upper)?)
        }
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_coercion, parse_type};

    fn ty(s: &str) -> Type {
        parse_type(s).unwrap()
    }

    fn w(s: &str) -> Warp {
        s.parse().unwrap()
    }

    #[test]
    fn normal_forms() {
        assert_eq!(normalize(&ty("Int")), ty("W (w) Int"));
        assert_eq!(normalize(&ty("Stream Int")), ty("W (1) (Stream (W (w) Int))"));
        assert_eq!(normalize(&ty("W (1 0) (Stream Int * Bool)")), ty("W (1 0) (Stream (W (w) Int)) * W (w) Bool"));
        assert_eq!(normalize(&ty("W {0}(1) (W (2) (Stream Bool))")), ty("W {0}(2) (Stream (W (w) Bool))"));
        // A warp over a warped product is pushed through the product.
        assert_eq!(normalize(&ty("W (2) (W (1 0) (Int * Int))")), ty("W (w) Int * W (w) Int"));
    }

    #[test]
    fn norm_coercions_of_scalars_and_streams() {
        let (i, o) = norm_coercions(&Type::INT);
        assert_eq!(i, Coercion::Inflate);
        assert_eq!(o, parse_coercion("delay{(w),(1)} ; unwrap").unwrap());
        let (i, o) = norm_coercions(&ty("Stream Int"));
        assert_eq!(i, parse_coercion("stream(inflate) ; wrap").unwrap());
        assert_eq!(o, parse_coercion("unwrap ; stream(delay{(w),(1)} ; unwrap)").unwrap());
    }

    #[test]
    fn precedence_examples() {
        let c = precedence(&ty("W (1) Int"), &ty("W {0}(1) Int")).unwrap();
        assert_eq!(c, parse_coercion("delay{(1),{0}(1)} ; warp{{0}(1)}(id)").unwrap());
        assert!(precedence(&ty("W {0}(1) Int"), &ty("W (1) Int")).is_none());
    }

    #[test]
    fn coe_to_self_is_identity() {
        for s in ["Int", "Stream Int", "W (1 0) (Stream Int) * Bool", "(Int -> Int) -> Stream Int"] {
            let t = ty(s);
            let c = precedence(&normalize(&t), &normalize(&t)).unwrap();
            assert_eq!(simplify(&c), Coercion::Id);
        }
    }

    #[test]
    fn nonproductive_recursion_has_no_coercion() {
        assert!(coe(&ty("W {0}(1) (Stream Int)"), &ty("Stream Int")).is_none());
        assert!(coe(&ty("Stream Int"), &ty("W {0}(1) (Stream Int)")).is_some());
    }

    #[test]
    fn targets() {
        let c = parse_coercion("concat{{0}(1),(0 1)}").unwrap();
        let t = coercion_target(&c, &ty("W {0}(1) (W (0 1) (Stream Int))")).unwrap();
        assert_eq!(t, ty("W {0}(0 1) (Stream Int)"));
        let d = Coercion::Delay(w("{0}(1)"), w("(1)"));
        assert!(coercion_target(&d, &ty("W {0}(1) Int")).is_err());
    }

    #[test]
    fn division_and_bounds() {
        assert_eq!(type_div(&ty("W {0}(2) Int"), &w("{0 2}(1)")), ty("W (w) Int"));
        assert_eq!(
            type_div(&ty("W {0}(1) (W (2) (Stream Bool))"), &w("{0 2}(1)")),
            ty("W {2 0}(2) (Stream (W (w) Bool))")
        );
        assert_eq!(type_sup(&Type::INT, &ty("W (w) Int")), Some(ty("W (w) Int")));
        assert_eq!(
            type_sup(&ty("W (2) (Stream Int)"), &ty("W (1 0) (Stream Int)")),
            Some(ty("W (1 0) (Stream (W (w) Int))"))
        );
        assert_eq!(
            type_inf(&ty("W (2) (Stream Int) -> Int"), &ty("Stream Int -> Int")),
            Some(ty("W (1) (W (1) (Stream (W (w) Int)) -> W (w) Int)"))
        );
        assert_eq!(type_sup(&Type::INT, &Type::BOOL), None);
    }
}
