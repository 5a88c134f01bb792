//! Ultimately periodic time warps.
//!
//! A warp is stored as a canonical pair `{prefix}(period)` of per-step
//! increments. Its value at `n` is the running sum of the first `n`
//! increments, and its value at `w` is the supremum.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_integer::Integer;
use thiserror::Error;

/// Natural numbers extended with `w` (omega).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtNat {
    Fin(u64),
    Omega,
}

pub use ExtNat::{Fin, Omega};

impl ExtNat {
    pub const ZERO: ExtNat = Fin(0);

    pub fn is_finite(self) -> bool {
        matches!(self, Fin(_))
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Fin(n) => Some(n),
            Omega => None,
        }
    }

    /// Difference of two running sums, where `self >= lower`.
    /// Once the larger side is `w` the difference is `w`, unless both are.
    fn minus(self, lower: ExtNat) -> ExtNat {
        match (self, lower) {
            (Omega, Omega) => Fin(0),
            (Omega, Fin(_)) => Omega,
            (Fin(a), Fin(b)) => Fin(a.checked_sub(b).expect("running sums are monotone")),
            (Fin(_), Omega) => panic!("running sums are monotone"),
        }
    }

    fn times(self, k: u64) -> ExtNat {
        match self {
            _ if k == 0 => Fin(0),
            Omega => Omega,
            Fin(a) => Fin(a.checked_mul(k).expect("warp arithmetic overflow")),
        }
    }
}

impl Add for ExtNat {
    type Output = ExtNat;
    fn add(self, rhs: ExtNat) -> ExtNat {
        match (self, rhs) {
            (Fin(a), Fin(b)) => Fin(a.checked_add(b).expect("warp arithmetic overflow")),
            _ => Omega,
        }
    }
}

impl From<u64> for ExtNat {
    fn from(n: u64) -> Self {
        Fin(n)
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fin(n) => write!(f, "{n}"),
            Omega => write!(f, "w"),
        }
    }
}

fn total(xs: &[ExtNat]) -> ExtNat {
    xs.iter().copied().fold(Fin(0), Add::add)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WarpError {
    #[error("a warp period must not be empty")]
    EmptyPeriod,
    #[error("invalid warp literal: {0}")]
    Syntax(String),
}

/// A warp in canonical form. Two warps are equal as functions iff they are
/// equal as values of this type.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Warp {
    prefix: Vec<ExtNat>,
    period: Vec<ExtNat>,
}

impl Warp {
    /// Builds the warp `{prefix}(period)` and canonicalizes it.
    pub fn new(prefix: Vec<ExtNat>, period: Vec<ExtNat>) -> Result<Warp, WarpError> {
        if period.is_empty() {
            return Err(WarpError::EmptyPeriod);
        }
        Ok(canonicalize(prefix, period))
    }

    /// Purely periodic warp `(period)`.
    pub fn periodic(period: Vec<ExtNat>) -> Result<Warp, WarpError> {
        Warp::new(Vec::new(), period)
    }

    /// Convenience constructor over finite increments.
    pub fn fin(prefix: &[u64], period: &[u64]) -> Result<Warp, WarpError> {
        Warp::new(prefix.iter().map(|&n| Fin(n)).collect(), period.iter().map(|&n| Fin(n)).collect())
    }

    fn constant(k: ExtNat) -> Warp {
        canonicalize(Vec::new(), vec![k])
    }

    /// The identity warp `(1)`.
    pub fn id() -> Warp {
        Warp::constant(Fin(1))
    }

    /// The constant-zero warp `(0)`.
    pub fn zero() -> Warp {
        Warp::constant(Fin(0))
    }

    /// The warp `(w)`; canonically `{w}(0)`.
    pub fn omega() -> Warp {
        Warp::constant(Omega)
    }

    /// The later warp `{0}(1)`, i.e. `n -> n - 1`.
    pub fn later() -> Warp {
        canonicalize(vec![Fin(0)], vec![Fin(1)])
    }

    /// The sooner warp `{2}(1)`, i.e. `n -> n + 1` for positive `n`.
    pub fn sooner() -> Warp {
        canonicalize(vec![Fin(2)], vec![Fin(1)])
    }

    pub fn prefix(&self) -> &[ExtNat] {
        &self.prefix
    }

    pub fn period(&self) -> &[ExtNat] {
        &self.period
    }

    pub fn has_omega(&self) -> bool {
        self.prefix.contains(&Omega)
    }

    pub fn is_id(&self) -> bool {
        *self == Warp::id()
    }

    /// The increment between `p(i)` and `p(i + 1)`.
    pub fn elem(&self, i: u64) -> ExtNat {
        let u = self.prefix.len() as u64;
        if i < u {
            self.prefix[i as usize]
        } else {
            self.period[((i - u) % self.period.len() as u64) as usize]
        }
    }

    /// Evaluates the warp at a step.
    pub fn eval(&self, n: ExtNat) -> ExtNat {
        match n {
            Omega => {
                if self.has_omega() || total(&self.period) > Fin(0) {
                    Omega
                } else {
                    total(&self.prefix)
                }
            }
            Fin(n) => {
                let u = self.prefix.len() as u64;
                if n <= u {
                    return total(&self.prefix[..n as usize]);
                }
                let rest = n - u;
                let l = self.period.len() as u64;
                total(&self.prefix) + total(&self.period).times(rest / l) + total(&self.period[..(rest % l) as usize])
            }
        }
    }

    /// Sum of the `len` increments starting at index `pos`.
    fn segment(&self, pos: u64, len: ExtNat) -> ExtNat {
        let start = self.eval(Fin(pos));
        match len {
            Omega => self.eval(Omega).minus(start),
            Fin(len) => self.eval(Fin(pos + len)).minus(start),
        }
    }

    /// Diagrammatic composition: `p.compose(q)` is `p * q`, the function
    /// `n -> q(p(n))`.
    pub fn compose(&self, q: &Warp) -> Warp {
        let p = self;
        let mut pos = 0u64;
        let mut emit = |n: ExtNat, out: &mut Vec<ExtNat>| match n {
            Omega => out.push(q.segment(pos, Omega)),
            Fin(n) => {
                out.push(q.segment(pos, Fin(n)));
                pos += n;
            }
        };
        let mut prefix = Vec::new();
        for &n in &p.prefix {
            emit(n, &mut prefix);
        }
        if p.has_omega() || total(&p.period) == Fin(0) {
            return canonicalize(prefix, vec![Fin(0)]);
        }
        let wv = total(&p.period).finite().expect("finite period weight");
        let q_pre = q.prefix.len() as u64;
        let q_per = q.period.len() as u64;
        // Unfold whole periods of `p` until `q`'s prefix is consumed.
        let mut consumed = total(&p.prefix).finite().expect("finite prefix weight");
        while consumed < q_pre {
            for &n in &p.period {
                emit(n, &mut prefix);
            }
            consumed += wv;
        }
        // Then repeat `p`'s period until it consumes whole periods of `q`.
        let reps = q_per / wv.gcd(&q_per);
        let mut period = Vec::new();
        for _ in 0..reps {
            for &n in &p.period {
                emit(n, &mut period);
            }
        }
        canonicalize(prefix, period)
    }

    /// Smallest finite `m` with `n <= self(m)`, if any.
    pub fn first_at_least(&self, n: u64) -> Option<u64> {
        self.first_reaching(n, 0)
    }

    fn first_reaching(&self, n: u64, from: u64) -> Option<u64> {
        if self.eval(Omega) < Fin(n) {
            return None;
        }
        let mut m = from;
        while self.eval(Fin(m)) < Fin(n) {
            m += 1;
        }
        Some(m)
    }

    /// Residual `self \ p`, the largest warp `r` with `r * p <= self`:
    /// `r(n) = self(min { m | n <= p(m) })`, which is `w` when no such `m`
    /// exists.
    pub fn residual(&self, p: &Warp) -> Warp {
        let q = self;
        let pu = p.prefix.len() as u64;
        let (window, split) = if p.has_omega() {
            // p reaches w at index pu, and is finite just before.
            let before = p.eval(Fin(pu - 1)).finite().expect("finite before w");
            (before + 3, before + 1)
        } else if total(&p.period) == Fin(0) {
            let bound = p.eval(Omega).finite().expect("bounded warp");
            (bound + 3, bound + 1)
        } else {
            let lp = p.period.len() as u64;
            let lq = q.period.len() as u64;
            let wp = total(&p.period).finite().expect("finite period weight");
            let m = (pu.max(q.prefix.len() as u64)) + lp;
            let n0 = p.eval(Fin(m)).finite().expect("finite value") + 1;
            let k = lq / lp.gcd(&lq);
            (n0 + wp * k + 1, n0)
        };
        let mut values = Vec::with_capacity(window as usize);
        let mut m = 0;
        for n in 0..window {
            match p.first_reaching(n, m) {
                Some(found) => {
                    m = found;
                    values.push(q.eval(Fin(found)));
                }
                None => values.push(Omega),
            }
        }
        from_running_sums(&values, split as usize)
    }

    /// Pointwise order.
    pub fn leq(&self, q: &Warp) -> bool {
        let g = Geometry::of(self, q);
        let window_ok = (1..=g.start + g.len).all(|n| self.eval(Fin(n)) <= q.eval(Fin(n)));
        window_ok && g.rate(self) <= g.rate(q)
    }

    /// Pointwise maximum.
    pub fn sup(&self, q: &Warp) -> Warp {
        combine(self, q, Ord::max)
    }

    /// Pointwise minimum.
    pub fn inf(&self, q: &Warp) -> Warp {
        combine(self, q, Ord::min)
    }
}

/// Window shared by two warps: past `start` both repeat with period `len`.
struct Geometry {
    start: u64,
    len: u64,
}

impl Geometry {
    fn of(p: &Warp, q: &Warp) -> Geometry {
        let start = p.prefix.len().max(q.prefix.len()) as u64;
        let len = (p.period.len() as u64).lcm(&(q.period.len() as u64));
        Geometry { start, len }
    }

    /// Growth of `p` over one window, past `start`.
    fn rate(&self, p: &Warp) -> ExtNat {
        if p.has_omega() {
            Omega
        } else {
            total(&p.period).times(self.len / p.period.len() as u64)
        }
    }
}

fn combine(p: &Warp, q: &Warp, pick: fn(ExtNat, ExtNat) -> ExtNat) -> Warp {
    let g = Geometry::of(p, q);
    let (rp, rq) = (g.rate(p), g.rate(q));
    let mut start = g.start;
    if let (Fin(a), Fin(b)) = (rp, rq) {
        if a != b {
            // The faster warp eventually dominates on every residue class.
            let (fast, slow, gain) = if a > b { (p, q, a - b) } else { (q, p, b - a) };
            let mut laps = 0;
            for i in 0..g.len {
                let n = Fin(g.start + i);
                let f = fast.eval(n).finite().expect("finite");
                let s = slow.eval(n).finite().expect("finite");
                if s > f {
                    laps = laps.max((s - f).div_ceil(gain));
                }
            }
            start += laps * g.len;
        }
    }
    let values: Vec<ExtNat> = (0..=start + g.len).map(|n| pick(p.eval(Fin(n)), q.eval(Fin(n)))).collect();
    from_running_sums(&values, start as usize)
}

/// Turns running sums `r(0..=k)` into increments, splitting at `split`.
fn from_running_sums(values: &[ExtNat], split: usize) -> Warp {
    let diffs: Vec<ExtNat> = values.windows(2).map(|w| w[1].minus(w[0])).collect();
    let (prefix, period) = diffs.split_at(split);
    canonicalize(prefix.to_vec(), period.to_vec())
}

/// Canonical form: truncate after the first `w`, minimize the period, then
/// fold the prefix into the period.
fn canonicalize(mut prefix: Vec<ExtNat>, mut period: Vec<ExtNat>) -> Warp {
    debug_assert!(!period.is_empty());
    if let Some(i) = prefix.iter().position(|&x| x == Omega) {
        prefix.truncate(i + 1);
        return Warp { prefix, period: vec![Fin(0)] };
    }
    if let Some(j) = period.iter().position(|&x| x == Omega) {
        prefix.extend_from_slice(&period[..=j]);
        return Warp { prefix, period: vec![Fin(0)] };
    }
    let l = period.len();
    if let Some(d) = (1..=l).find(|&d| l.is_multiple_of(d) && (d..l).all(|i| period[i] == period[i - d])) {
        period.truncate(d);
    }
    while prefix.last().is_some() && prefix.last() == period.last() {
        prefix.pop();
        period.rotate_right(1);
    }
    Warp { prefix, period }
}

fn fmt_elems(f: &mut fmt::Formatter<'_>, xs: &[ExtNat]) -> fmt::Result {
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            write!(f, " ")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

impl fmt::Display for Warp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.prefix.is_empty() {
            write!(f, "{{")?;
            fmt_elems(f, &self.prefix)?;
            write!(f, "}}")?;
        }
        write!(f, "(")?;
        fmt_elems(f, &self.period)?;
        write!(f, ")")
    }
}

impl FromStr for Warp {
    type Err = WarpError;

    /// Parses `(e1 e2 ...)` or `{u1 ...}(v1 ...)`, where each element is a
    /// natural number or `w`.
    fn from_str(s: &str) -> Result<Warp, WarpError> {
        let bad = || WarpError::Syntax(s.to_string());
        let elems = |body: &str| -> Result<Vec<ExtNat>, WarpError> {
            body.split_whitespace()
                .map(|tok| match tok {
                    "w" | "ω" => Ok(Omega),
                    _ => tok.parse().map(Fin).map_err(|_| bad()),
                })
                .collect()
        };
        let s_trim = s.trim();
        let (prefix, rest) = match s_trim.strip_prefix('{') {
            Some(r) => {
                let close = r.find('}').ok_or_else(bad)?;
                (elems(&r[..close])?, r[close + 1..].trim_start())
            }
            None => (Vec::new(), s_trim),
        };
        let body = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
        if body.contains(['(', ')', '{', '}']) {
            return Err(bad());
        }
        Warp::new(prefix, elems(body)?)
    }
}

impl PartialOrd for Warp {
    /// The pointwise order; incomparable warps yield `None`.
    fn partial_cmp(&self, other: &Warp) -> Option<Ordering> {
        match (self.leq(other), other.leq(self)) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Warp {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(w("{1}(1)").to_string(), "(1)");
        assert_eq!(w("(1 1)").to_string(), "(1)");
        assert_eq!(w("{0 w 5}(3)").to_string(), "{0 w}(0)");
        assert_eq!(w("(w)").to_string(), "{w}(0)");
        assert_eq!(w("{0 0}(1 0)").to_string(), "{0}(0 1)");
        assert_eq!(w("{3 4}(2 3 4)").to_string(), "(3 4 2)");
        assert_eq!(w("{3 5}(2 3 4)").to_string(), "{3 5}(2 3 4)");
        assert_eq!(Warp::new(vec![], vec![]), Err(WarpError::EmptyPeriod));
    }

    #[test]
    fn evaluation() {
        let p = w("{0}(1)");
        assert_eq!(p.eval(Fin(0)), Fin(0));
        assert_eq!(p.eval(Fin(5)), Fin(4));
        assert_eq!(p.eval(Omega), Omega);
        assert_eq!(w("{3}(0)").eval(Omega), Fin(3));
        assert_eq!(w("{0 w}(0)").eval(Fin(1)), Fin(0));
        assert_eq!(w("{0 w}(0)").eval(Fin(2)), Omega);
        assert_eq!(w("(1 0)").eval(Fin(3)), Fin(2));
    }

    #[test]
    fn residual_of_unbounded_by_bounded() {
        assert_eq!(w("(1)").residual(&w("{2}(0)")).to_string(), "{1 0 w}(0)");
    }

    #[test]
    fn sup_inf_cross_over() {
        // (3) overtakes {5}(1) at step 3.
        assert_eq!(w("(3)").sup(&w("{5}(1)")).to_string(), "{5 1}(3)");
        assert_eq!(w("(3)").inf(&w("{5}(1)")).to_string(), "{3 3}(1)");
    }

    #[test]
    fn partial_order() {
        assert!(w("(1)") < w("(2)"));
        assert_eq!(w("(1 0)").partial_cmp(&w("(0 1)")), Some(Ordering::Greater));
        assert_eq!(w("{0}(2)").partial_cmp(&w("{5}(1)")), None);
        assert!(!w("{0}(2)").leq(&w("{5}(1)")));
    }
}
