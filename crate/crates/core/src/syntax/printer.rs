//! Printing that the parser reads back to the same tree.

use std::fmt::{self, Write};

use super::{Coercion, PrimOp, Side, Term, TermKind, Type};

pub fn print_type(t: &Type) -> String {
    let mut s = String::new();
    ty(&mut s, t, 0);
    s
}

fn ty(out: &mut String, t: &Type, min: u8) {
    let level = match t {
        Type::Arrow(..) => 0,
        Type::Sum(..) => 1,
        Type::Prod(..) => 2,
        Type::Stream(_) | Type::Warped(..) => 3,
        Type::Ground(_) => 4,
    };
    if level < min {
        out.push('(');
    }
    match t {
        Type::Ground(super::Ground::Int) => out.push_str("Int"),
        Type::Ground(super::Ground::Bool) => out.push_str("Bool"),
        Type::Stream(a) => {
            out.push_str("Stream ");
            ty(out, a, 4);
        }
        Type::Warped(p, a) => {
            let _ = write!(out, "W {p} ");
            ty(out, a, 4);
        }
        Type::Arrow(a, b) | Type::Sum(a, b) | Type::Prod(a, b) => {
            let op = match t {
                Type::Arrow(..) => " -> ",
                Type::Sum(..) => " + ",
                _ => " * ",
            };
            ty(out, a, level + 1);
            out.push_str(op);
            ty(out, b, level);
        }
    }
    if level < min {
        out.push(')');
    }
}

pub fn print_coercion(c: &Coercion) -> String {
    let mut s = String::new();
    coe(&mut s, c);
    s
}

fn coe(out: &mut String, c: &Coercion) {
    use Coercion::*;
    match c {
        Id => out.push_str("id"),
        Wrap => out.push_str("wrap"),
        Unwrap => out.push_str("unwrap"),
        Inflate => out.push_str("inflate"),
        Dist => out.push_str("dist"),
        Fact => out.push_str("fact"),
        Concat(p, q) => {
            let _ = write!(out, "concat{{{p},{q}}}");
        }
        Decat(p, q) => {
            let _ = write!(out, "decat{{{p},{q}}}");
        }
        Delay(p, q) => {
            let _ = write!(out, "delay{{{p},{q}}}");
        }
        Seq(a, b) => {
            coe_atom(out, a);
            out.push_str(" ; ");
            coe(out, b);
        }
        OnStream(a) => {
            out.push_str("stream(");
            coe(out, a);
            out.push(')');
        }
        OnWarp(p, a) => {
            let _ = write!(out, "warp{{{p}}}(");
            coe(out, a);
            out.push(')');
        }
        OnArrow(a, b) | OnProd(a, b) | OnSum(a, b) => {
            out.push_str(match c {
                OnArrow(..) => "arrow(",
                OnProd(..) => "prod(",
                _ => "sum(",
            });
            coe(out, a);
            out.push_str(", ");
            coe(out, b);
            out.push(')');
        }
    }
}

fn coe_atom(out: &mut String, c: &Coercion) {
    if matches!(c, Coercion::Seq(..)) {
        out.push('(');
        coe(out, c);
        out.push(')');
    } else {
        coe(out, c);
    }
}

pub fn print_term(t: &Term) -> String {
    let mut s = String::new();
    term(&mut s, t, 0);
    s
}

fn level_of(t: &Term) -> u8 {
    use TermKind::*;
    match &t.kind {
        Fun(..) | Rec(..) | Case { .. } | CoeL(..) => 0,
        Cons(..) => 1,
        Prim(PrimOp::Eq, args) if args.len() == 2 => 2,
        Prim(PrimOp::Add | PrimOp::Sub, args) if args.len() == 2 => 3,
        Prim(PrimOp::Mul, args) if args.len() == 2 => 4,
        By(..) | CoeR(..) => 5,
        App(..) | Head(_) | Tail(_) | Proj(..) | Inj(..) | Prim(..) => 6,
        Var(_) | Scalar(_) | Pair(..) => 7,
    }
}

fn term(out: &mut String, t: &Term, min: u8) {
    use TermKind::*;
    let level = level_of(t);
    if level < min {
        out.push('(');
    }
    match &t.kind {
        Var(x) => out.push_str(x),
        Scalar(super::Scalar::Int(n)) if *n < 0 => {
            let _ = write!(out, "({n})");
        }
        Scalar(s) => {
            let _ = write!(out, "{s}");
        }
        Pair(l, r) => {
            out.push('(');
            term(out, l, 0);
            out.push_str(", ");
            term(out, r, 0);
            out.push(')');
        }
        App(f, x) => {
            term(out, f, 6);
            out.push(' ');
            term(out, x, 7);
        }
        Head(x) | Tail(x) | Proj(_, x) => {
            out.push_str(match &t.kind {
                Head(_) => "head ",
                Tail(_) => "tail ",
                Proj(Side::Left, _) => "fst ",
                _ => "snd ",
            });
            term(out, x, 7);
        }
        Inj(side, other, x) => {
            out.push_str(if *side == Side::Left { "inl [" } else { "inr [" });
            ty(out, other, 0);
            out.push_str("] ");
            term(out, x, 7);
        }
        Prim(op, args) if args.len() == 2 && *op != PrimOp::Not => {
            let (sym, l, r) = match op {
                PrimOp::Eq => (" == ", 3, 3),
                PrimOp::Add => (" + ", 3, 4),
                PrimOp::Sub => (" - ", 3, 4),
                _ => (" * ", 4, 5),
            };
            term(out, &args[0], l);
            out.push_str(sym);
            term(out, &args[1], r);
        }
        Prim(PrimOp::Not, args) if args.len() == 1 => {
            out.push_str("not ");
            term(out, &args[0], 7);
        }
        Prim(op, args) => {
            // Only reachable for trees built with the wrong arity.
            let _ = write!(out, "{op:?}");
            for x in args {
                out.push(' ');
                term(out, x, 7);
            }
        }
        By(x, p) => {
            term(out, x, 5);
            let _ = write!(out, " by {p}");
        }
        CoeR(x, c) => {
            term(out, x, 5);
            out.push_str(" with ");
            coe_atom(out, c);
        }
        Cons(h, tl) => {
            term(out, h, 2);
            out.push_str(" :: ");
            term(out, tl, 0);
        }
        Fun(x, a, body) | Rec(x, a, body) => {
            out.push_str(if matches!(t.kind, Fun(..)) { "fun (" } else { "rec (" });
            let _ = write!(out, "{x} : ");
            ty(out, a, 0);
            out.push_str(") -> ");
            term(out, body, 0);
        }
        Case { scrutinee, left, right } => {
            out.push_str("match ");
            term(out, scrutinee, 0);
            let _ = write!(out, " with {{ inl {} -> ", left.0);
            term(out, &left.1, 0);
            let _ = write!(out, " ; inr {} -> ", right.0);
            term(out, &right.1, 0);
            out.push_str(" }");
        }
        CoeL(beta, body) => {
            out.push_str("using {");
            for (i, (x, c)) in beta.iter().enumerate() {
                out.push_str(if i == 0 { " " } else { ", " });
                let _ = write!(out, "{x} : ");
                coe(out, c);
            }
            out.push_str(" } in ");
            term(out, body, 0);
        }
    }
    if level < min {
        out.push(')');
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_type(self))
    }
}

impl fmt::Display for Coercion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_coercion(self))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self))
    }
}
