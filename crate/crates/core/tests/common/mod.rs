//! Generators, brute-force oracles and corpus access shared by the
//! integration tests.
#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use proptest::prelude::*;
use warplang_core::elab::TopDef;
use warplang_core::eval::{apply_coercion, evaluate, inhabitant, truncate, Env, Value};
use warplang_core::syntax::{parse_program, Coercion, Def, PrimOp, Program, Scalar, Side, Term, Type};
use warplang_core::warp::{ExtNat, Fin, Omega, Warp};

// ---------------------------------------------------------------- warps

/// A warp as generated, before canonicalization.
#[derive(Clone, Debug)]
pub struct RawWarp {
    pub prefix: Vec<ExtNat>,
    pub period: Vec<ExtNat>,
}

impl RawWarp {
    pub fn warp(&self) -> Warp {
        Warp::new(self.prefix.clone(), self.period.clone()).expect("non-empty period")
    }

    fn elem(&self, i: usize) -> ExtNat {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    /// Running sum of the first `n` increments.
    pub fn at(&self, n: ExtNat) -> ExtNat {
        match n {
            Fin(k) => (0..k as usize).fold(Fin(0), |acc, i| acc + self.elem(i)),
            Omega => {
                let unbounded = self.prefix.contains(&Omega) || self.period.iter().any(|&e| e != Fin(0));
                if unbounded {
                    Omega
                } else {
                    self.prefix.iter().fold(Fin(0), |acc, &e| acc + e)
                }
            }
        }
    }

    /// Running sums at `0..=n`.
    pub fn sums(&self, n: usize) -> Vec<ExtNat> {
        let mut out = Vec::with_capacity(n + 1);
        let mut acc = Fin(0);
        out.push(acc);
        for i in 0..n {
            acc = acc + self.elem(i);
            out.push(acc);
        }
        out
    }
}

fn arb_elem() -> impl Strategy<Value = ExtNat> {
    (0u64..=3).prop_map(Fin)
}

/// Prefix of length at most 4, period of length 1 to 4, elements in
/// `0..=3`; one element is replaced by `w` with probability 1/20.
pub fn arb_raw_warp() -> impl Strategy<Value = RawWarp> {
    (
        prop::collection::vec(arb_elem(), 0..=4),
        prop::collection::vec(arb_elem(), 1..=4),
        prop::option::weighted(0.05, any::<prop::sample::Index>()),
    )
        .prop_map(|(mut prefix, mut period, omega)| {
            if let Some(ix) = omega {
                let i = ix.index(prefix.len() + period.len());
                if i < prefix.len() {
                    prefix[i] = Omega;
                } else {
                    period[i - prefix.len()] = Omega;
                }
            }
            RawWarp { prefix, period }
        })
}

pub fn arb_warp() -> impl Strategy<Value = Warp> {
    arb_raw_warp().prop_map(|r| r.warp())
}

/// `r(n) = q(min { m | n <= p(m) })`, or `w` when there is no such `m`,
/// found by linear search.
pub fn residual_oracle(q: &RawWarp, p: &RawWarp, n: ExtNat) -> ExtNat {
    match n {
        Fin(k) => {
            let bound = p.prefix.len() + (k as usize + 1) * p.period.len() + 1;
            let sums = p.sums(bound);
            match sums.iter().position(|&s| s >= Fin(k)) {
                Some(m) => q.at(Fin(m as u64)),
                None => Omega,
            }
        }
        Omega => {
            let finite_cut = p.prefix.len() + p.period.len() + 1;
            let sums = p.sums(finite_cut);
            if let Some(m) = sums.iter().position(|&s| s == Omega) {
                q.at(Fin(m as u64))
            } else if p.at(Omega) == Omega {
                q.at(Omega)
            } else {
                Omega
            }
        }
    }
}

/// Pointwise comparison over enough steps to see any crossing of
/// generated warps, and at `w`.
pub fn leq_oracle(p: &RawWarp, q: &RawWarp) -> bool {
    const N: usize = 1000;
    let (sp, sq) = (p.sums(N), q.sums(N));
    sp.iter().zip(&sq).all(|(a, b)| a <= b) && p.at(Omega) <= q.at(Omega)
}

/// Raw form of a canonical warp, so results can be fed back to the oracle.
pub fn raw(w: &Warp) -> RawWarp {
    RawWarp { prefix: w.prefix().to_vec(), period: w.period().to_vec() }
}

// ---------------------------------------------------------------- types

pub fn arb_ground() -> impl Strategy<Value = Type> {
    prop_oneof![Just(Type::INT), Just(Type::BOOL)]
}

pub fn arb_type() -> impl Strategy<Value = Type> {
    arb_ground().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Type::stream),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Type::arrow(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Type::prod(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Type::sum(a, b)),
            (arb_warp(), inner).prop_map(|(p, a)| Type::warped(p, a)),
        ]
    })
}

/// Rewrites `t` into a type it coerces to. Covariant warps may shrink,
/// contravariant ones grow; `wrap` markers and nested warps are folded in
/// and out along the way.
pub fn weaken(t: &Type, positive: bool, knobs: &mut impl Iterator<Item = (u8, Warp)>) -> Type {
    let (k, r) = knobs.next().unwrap_or((0, Warp::id()));
    let base = match t {
        Type::Ground(_) => t.clone(),
        Type::Stream(a) => Type::stream(weaken(a, positive, knobs)),
        Type::Arrow(a, b) => Type::arrow(weaken(a, !positive, knobs), weaken(b, positive, knobs)),
        Type::Prod(a, b) => Type::prod(weaken(a, positive, knobs), weaken(b, positive, knobs)),
        Type::Sum(a, b) => Type::sum(weaken(a, positive, knobs), weaken(b, positive, knobs)),
        Type::Warped(p, a) => {
            let p2 = match (k % 2, positive) {
                (0, _) => p.clone(),
                (_, true) => p.inf(&r),
                (_, false) => p.sup(&r),
            };
            Type::warped(p2, weaken(a, positive, knobs))
        }
    };
    match k % 5 {
        3 => Type::warped(Warp::id(), base),
        _ => base,
    }
}

/// Rewrites `t` into a type it is equivalent to.
pub fn reshape(t: &Type, knobs: &mut impl Iterator<Item = u8>) -> Type {
    let k = knobs.next().unwrap_or(0);
    let inner = match t {
        Type::Ground(_) => t.clone(),
        Type::Stream(a) => Type::stream(reshape(a, knobs)),
        Type::Arrow(a, b) => Type::arrow(reshape(a, knobs), reshape(b, knobs)),
        Type::Prod(a, b) => Type::prod(reshape(a, knobs), reshape(b, knobs)),
        Type::Sum(a, b) => Type::sum(reshape(a, knobs), reshape(b, knobs)),
        Type::Warped(p, a) => match (k % 4, &**a) {
            (1, Type::Warped(q, b)) => Type::warped(p.compose(q), reshape(b, knobs)),
            (2, Type::Prod(b, c)) => {
                Type::prod(Type::warped(p.clone(), reshape(b, knobs)), Type::warped(p.clone(), reshape(c, knobs)))
            }
            _ => Type::warped(p.clone(), reshape(a, knobs)),
        },
    };
    if k % 4 == 3 {
        Type::warped(Warp::id(), inner)
    } else {
        inner
    }
}

// ---------------------------------------------------------------- terms

const NAMES: &[&str] = &["x", "y", "xs", "f", "nat'", "a_1"];

fn arb_name() -> impl Strategy<Value = String> {
    prop::sample::select(NAMES).prop_map(str::to_string)
}

pub fn arb_coercion() -> impl Strategy<Value = Coercion> {
    let leaf = prop_oneof![
        Just(Coercion::Id),
        Just(Coercion::Wrap),
        Just(Coercion::Unwrap),
        Just(Coercion::Inflate),
        Just(Coercion::Dist),
        Just(Coercion::Fact),
        (arb_warp(), arb_warp()).prop_map(|(p, q)| Coercion::Concat(p, q)),
        (arb_warp(), arb_warp()).prop_map(|(p, q)| Coercion::Decat(p, q)),
        (arb_warp(), arb_warp()).prop_map(|(p, q)| Coercion::Delay(p, q)),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Coercion::seq(a, b)),
            inner.clone().prop_map(Coercion::on_stream),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Coercion::on_arrow(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Coercion::on_prod(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Coercion::on_sum(a, b)),
            (arb_warp(), inner).prop_map(|(p, a)| Coercion::on_warp(p, a)),
        ]
    })
}

pub fn arb_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        arb_name().prop_map(|x| Term::var(&x)),
        (-20i64..20).prop_map(Term::int),
        any::<bool>().prop_map(Term::bool),
    ];
    leaf.prop_recursive(5, 48, 3, |t| {
        prop_oneof![
            (arb_name(), arb_type(), t.clone()).prop_map(|(x, a, b)| Term::fun(&x, a, b)),
            (t.clone(), t.clone()).prop_map(|(f, a)| Term::app(f, a)),
            (t.clone(), t.clone()).prop_map(|(a, b)| Term::pair(a, b)),
            (any::<bool>(), t.clone()).prop_map(|(l, a)| Term::proj(side(l), a)),
            (any::<bool>(), arb_type(), t.clone()).prop_map(|(l, ty, a)| Term::inj(side(l), ty, a)),
            (t.clone(), arb_name(), t.clone(), arb_name(), t.clone())
                .prop_map(|(s, x, l, y, r)| Term::case(s, &x, l, &y, r)),
            (prop::sample::select(&[PrimOp::Add, PrimOp::Sub, PrimOp::Mul, PrimOp::Eq][..]), t.clone(), t.clone())
                .prop_map(|(op, a, b)| Term::prim(op, vec![a, b])),
            t.clone().prop_map(|a| Term::prim(PrimOp::Not, vec![a])),
            (arb_name(), arb_type(), t.clone()).prop_map(|(x, ty, b)| Term::rec(&x, ty, b)),
            (t.clone(), arb_warp()).prop_map(|(a, p)| Term::by(a, p)),
            t.clone().prop_map(Term::head),
            t.clone().prop_map(Term::tail),
            (t.clone(), t.clone()).prop_map(|(h, tl)| Term::cons(h, tl)),
            (t.clone(), arb_coercion()).prop_map(|(a, c)| Term::coe_r(a, c)),
            (prop::collection::btree_map(arb_name(), arb_coercion(), 0..3), t).prop_map(|(b, a)| Term::coe_l(b, a)),
        ]
    })
}

fn side(left: bool) -> Side {
    if left {
        Side::Left
    } else {
        Side::Right
    }
}

// ---------------------------------------------------------------- goldens

/// `(p, q, p * q)`.
pub const COMPOSITIONS: &[(&str, &str, &str)] = &[
    ("(3)", "(2)", "(6)"),
    ("(2)", "(3)", "(6)"),
    ("(1 0)", "(0 1)", "(0 0 1 0)"),
    ("(0 1)", "(1 0)", "(0 1 0 0)"),
    ("(2)", "(1 0)", "(1)"),
    ("(2)", "(0 1)", "(1)"),
    ("{0}(2)", "(3 0 1)", "{0}(3 4 1)"),
    ("{2}(1)", "{0}(1)", "(1)"),
    ("(2 0)", "(2 0)", "(2 0)"),
    ("(w)", "(1 0)", "(w)"),
    ("(0 1)", "(w)", "{0}(w)"),
    ("(w)", "(0)", "(0)"),
];

/// `(q, p, q \ p)`.
pub const DIVISIONS: &[(&str, &str, &str)] = &[
    ("(1)", "(1)", "(1)"),
    ("(2)", "(2)", "(2 0)"),
    ("(1 0)", "(1 0)", "(1)"),
    ("(1)", "(0 3)", "(2 0 0)"),
    ("(4 0)", "(1 3)", "(4 0 0 0)"),
    ("(0)", "(0)", "(w)"),
    ("(3)", "(w)", "{3}(0)"),
];

/// Declared types of the corpus definitions.
pub const EXPECTED: &[(&str, &[(&str, &str)])] = &[
    ("zeroes", &[("zeroes", "Stream Int")]),
    ("silent", &[("nothing", "W (0) (Stream Int)")]),
    ("map", &[("map", "(Int -> Int) -> Stream Int -> Stream Int")]),
    ("nat", &[("map", "W (w) ((Int -> Int) -> Stream Int -> Stream Int)"), ("nat", "Stream Int")]),
    (
        "streams",
        &[
            ("map", "W (w) ((Int -> Int) -> Stream Int -> Stream Int)"),
            ("nat", "W (1 0) (Stream Int)"),
            ("pos", "W (0 1) (Stream Int)"),
        ],
    ),
    (
        "thuemorse",
        &[
            ("h", "W (w) (Stream Bool -> W (2) (Stream Bool))"),
            ("tm", "Stream Bool"),
            ("h_weak", "W (w) (Stream Bool -> W {2}(1) (Stream Bool))"),
            ("tm_weak", "Stream Bool"),
        ],
    ),
];

// ---------------------------------------------------------------- corpus

/// Implicit corpus programs that type-check.
pub const PROGRAMS: &[&str] = &["zeroes", "silent", "map", "nat", "streams", "thuemorse"];

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn source(rel: &str) -> String {
    let path = corpus_dir().join(rel);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn program(name: &str) -> Program {
    parse_program(&source(&format!("{name}.wlp"))).expect("corpus parses")
}

pub fn refiner(name: &str) -> Program {
    parse_program(&source(&format!("refiners/{name}.wlp"))).expect("refiner parses")
}

pub fn erase_program(p: &Program) -> Program {
    let defs = p
        .defs
        .iter()
        .map(|d| match d {
            Def::Single { name, ty, body, span } => {
                Def::Single { name: name.clone(), ty: ty.clone(), body: body.erase(), span: *span }
            }
            Def::Group { names, body, span } => Def::Group { names: names.clone(), body: body.erase(), span: *span },
        })
        .collect();
    Program { defs }
}

pub fn find<'a>(defs: &'a [TopDef], name: &str) -> &'a TopDef {
    defs.iter().find(|d| d.name == name).unwrap_or_else(|| panic!("no `{name}`"))
}

/// Steps exercised by the metatheory suites.
pub fn steps() -> Vec<ExtNat> {
    (0..=8).map(Fin).chain([Omega]).collect()
}

// ---------------------------------------------------------------- values

/// Streams of integers as plain vectors.
pub fn ints(v: &Value) -> Vec<i64> {
    v.stream_prefix()
        .into_iter()
        .map(|x| match x {
            Value::Scalar(Scalar::Int(n)) => *n,
            other => panic!("expected an integer, found {other}"),
        })
        .collect()
}

pub fn bools(v: &Value) -> Vec<bool> {
    v.stream_prefix()
        .into_iter()
        .map(|x| match x {
            Value::Scalar(Scalar::Bool(b)) => *b,
            other => panic!("expected a boolean, found {other}"),
        })
        .collect()
}

/// A closure-free, thunk-free rendering of `v : ty` at step `n`, for
/// comparing values produced by different terms. Functions are observed on
/// the canonical argument; values at `w` through their truncations at
/// steps 1 to 3.
pub fn observe(v: &Value, ty: &Type, n: ExtNat) -> Value {
    let k = match n {
        Fin(0) => return v.clone(),
        Omega => {
            return (1..=3)
                .rev()
                .map(|j| observe(&truncate(v, Fin(j)).expect("forcing succeeds"), ty, Fin(j)))
                .fold(Value::Stop, |acc, x| Value::pair(x, acc));
        }
        Fin(k) => k,
    };
    match (ty, v) {
        (_, Value::Thunk { .. }) => observe(&truncate(v, n).expect("forcing succeeds"), ty, n),
        (Type::Stream(a), Value::Cons(h, t)) => Value::cons(observe(h, a, n), observe(t, ty, Fin(k - 1))),
        (Type::Arrow(a, b), Value::Closure { param, body, env }) => {
            let arg = evaluate(&inhabitant(a), &Env::new(), n).expect("inhabitant evaluates");
            let out = evaluate(body, &env.insert(param, arg), n).expect("application evaluates");
            observe(&out, b, n)
        }
        (Type::Prod(a, b), Value::Pair(l, r)) => Value::pair(observe(l, a, n), observe(r, b, n)),
        (Type::Sum(a, b), Value::Inj(s, w)) => {
            let t = if *s == Side::Left { a } else { b };
            Value::Inj(*s, Arc::new(observe(w, t, n)))
        }
        (Type::Warped(p, a), Value::Warped(q, w)) => Value::warped(q.clone(), observe(w, a, p.eval(n))),
        _ => v.clone(),
    }
}

/// Applies `c` to the canonical inhabitant of `ty` at step `n`.
pub fn coerce_inhabitant(c: &Coercion, ty: &Type, n: ExtNat) -> Value {
    let v = evaluate(&inhabitant(ty), &Env::new(), n).expect("inhabitant evaluates");
    apply_coercion(c, v, n).expect("coercion applies")
}
