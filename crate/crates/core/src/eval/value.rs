//! Step-indexed values and their rendering.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde_json::json;

use crate::syntax::{Name, Scalar, Side, Term};
use crate::warp::Warp;

/// A value approximating an infinite object up to some step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    /// The only value at step 0.
    Stop,
    Scalar(Scalar),
    Cons(Arc<Value>, Arc<Value>),
    Closure {
        param: Name,
        body: Arc<Term>,
        env: Env,
    },
    Pair(Arc<Value>, Arc<Value>),
    Inj(Side, Arc<Value>),
    /// A suspended computation at step `w`. With `peel: Some(q)` the term
    /// has type `W q t` and the thunk stands for its payload of type `t`.
    Thunk {
        term: Arc<Term>,
        env: Env,
        peel: Option<Warp>,
    },
    Warped(Warp, Arc<Value>),
}

impl Value {
    pub fn cons(h: Value, t: Value) -> Value {
        Value::Cons(Arc::new(h), Arc::new(t))
    }

    pub fn pair(l: Value, r: Value) -> Value {
        Value::Pair(Arc::new(l), Arc::new(r))
    }

    pub fn warped(p: Warp, v: Value) -> Value {
        Value::Warped(p, Arc::new(v))
    }

    pub fn thunk(term: Term, env: Env) -> Value {
        Value::Thunk { term: Arc::new(term), env, peel: None }
    }

    /// Stream elements up to the first non-cons tail.
    pub fn stream_prefix(&self) -> Vec<&Value> {
        let mut out = Vec::new();
        let mut cur = self;
        while let Value::Cons(h, t) = cur {
            out.push(&**h);
            cur = t;
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Value::Stop => json!({ "kind": "stop" }),
            Value::Scalar(Scalar::Int(n)) => json!({ "kind": "scalar", "value": n }),
            Value::Scalar(Scalar::Bool(b)) => json!({ "kind": "scalar", "value": b }),
            Value::Cons(h, t) => json!({ "kind": "cons", "head": h.to_json(), "tail": t.to_json() }),
            Value::Closure { param, .. } => json!({ "kind": "closure", "param": param }),
            Value::Pair(l, r) => json!({ "kind": "pair", "fst": l.to_json(), "snd": r.to_json() }),
            Value::Inj(side, v) => json!({
                "kind": "inj",
                "side": if *side == Side::Left { "inl" } else { "inr" },
                "value": v.to_json(),
            }),
            Value::Thunk { .. } => json!({ "kind": "thunk" }),
            Value::Warped(p, v) => json!({ "kind": "warped", "warp": p.to_string(), "value": v.to_json() }),
        }
    }

    fn fmt_atom(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Cons(..) | Value::Inj(..) => write!(f, "({self})"),
            _ => write!(f, "{self}"),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Stop => write!(f, "•"),
            Value::Scalar(s) => write!(f, "{s}"),
            Value::Cons(h, t) => {
                h.fmt_atom(f)?;
                write!(f, " :: {t}")
            }
            Value::Closure { .. } => write!(f, "<closure>"),
            Value::Pair(l, r) => write!(f, "({l}, {r})"),
            Value::Inj(side, v) => {
                write!(f, "{} ", if *side == Side::Left { "inl" } else { "inr" })?;
                v.fmt_atom(f)
            }
            Value::Thunk { .. } => write!(f, "<thunk>"),
            Value::Warped(p, v) => {
                write!(f, "⌈{p}⌉")?;
                v.fmt_atom(f)
            }
        }
    }
}

/// Immutable environment, cheap to clone.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Env(Arc<BTreeMap<Name, Value>>);

impl Env {
    pub fn new() -> Env {
        Env::default()
    }

    pub fn get(&self, x: &str) -> Option<&Value> {
        self.0.get(x)
    }

    pub fn insert(&self, x: &str, v: Value) -> Env {
        let mut map = (*self.0).clone();
        map.insert(x.to_string(), v);
        Env(Arc::new(map))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Value)> {
        self.0.iter()
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.0.keys()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(Name, Value)> for Env {
    fn from_iter<I: IntoIterator<Item = (Name, Value)>>(iter: I) -> Env {
        Env(Arc::new(iter.into_iter().collect()))
    }
}
