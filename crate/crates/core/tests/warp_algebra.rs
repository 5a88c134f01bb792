mod common;

use common::*;
use proptest::prelude::*;
use warplang_core::warp::{ExtNat, Fin, Omega, Warp};

fn w(s: &str) -> Warp {
    s.parse().unwrap_or_else(|e| panic!("{s}: {e}"))
}

#[test]
fn composition_table() {
    for (p, q, r) in COMPOSITIONS {
        assert_eq!(w(p).compose(&w(q)), w(r), "{p} * {q}");
    }
}

#[test]
fn division_table() {
    for (q, p, r) in DIVISIONS {
        assert_eq!(w(q).residual(&w(p)), w(r), "{q} \\ {p}");
    }
}

#[test]
fn worked_divisions() {
    assert_eq!(w("{0}(2)").residual(&w("{0 2}(1)")), w("{2 0}(2)"));
    assert_eq!(w("{0}(2)").residual(&w("(2)")), w("{0 0}(2 0)"));
    assert_eq!(w("{0}(1)").compose(&w("(1 0)")), w("(0 1)"));
    assert_eq!(w("{0}(1)").compose(&w("(0 1)")), w("{0}(0 1)"));
    assert_eq!(w("(1 0)").compose(&w("{0}(1)")), w("{0}(0 1)"));
}

#[test]
fn equal_sequences_share_a_form() {
    for (a, b) in [("(1 0 1 0)", "(1 0)"), ("{1}(0 1)", "(1 0)"), ("{0 w 5}(3)", "{0 w}(0)"), ("{w}(1)", "(w)")] {
        assert_eq!(w(a), w(b), "{a} vs {b}");
        assert_eq!(w(a).to_string(), w(b).to_string());
    }
}

fn steps_upto(n: u64) -> impl Iterator<Item = ExtNat> {
    (0..=n).map(Fin).chain([Omega])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn evaluation_is_the_running_sum(p in arb_raw_warp()) {
        let canon = p.warp();
        for n in steps_upto(64) {
            prop_assert_eq!(canon.eval(n), p.at(n), "at {}", n);
        }
    }

    #[test]
    fn canonical_forms_are_unique(p in arb_raw_warp(), q in arb_raw_warp()) {
        let same = (0..=200).all(|n| p.at(Fin(n)) == q.at(Fin(n))) && p.at(Omega) == q.at(Omega);
        prop_assert_eq!(same, p.warp() == q.warp());
        let again: Warp = p.warp().to_string().parse().unwrap();
        prop_assert_eq!(again, p.warp());
    }

    #[test]
    fn compose_is_pointwise(p in arb_raw_warp(), q in arb_raw_warp()) {
        let pq = p.warp().compose(&q.warp());
        for n in steps_upto(64) {
            prop_assert_eq!(pq.eval(n), q.at(p.at(n)), "at {}", n);
        }
    }

    #[test]
    fn residual_is_pointwise(q in arb_raw_warp(), p in arb_raw_warp()) {
        let r = q.warp().residual(&p.warp());
        for n in steps_upto(64) {
            prop_assert_eq!(r.eval(n), residual_oracle(&q, &p, n), "at {}", n);
        }
    }

    #[test]
    fn sup_and_inf_are_pointwise(p in arb_raw_warp(), q in arb_raw_warp()) {
        let (s, i) = (p.warp().sup(&q.warp()), p.warp().inf(&q.warp()));
        for n in steps_upto(64) {
            prop_assert_eq!(s.eval(n), p.at(n).max(q.at(n)));
            prop_assert_eq!(i.eval(n), p.at(n).min(q.at(n)));
        }
    }

    #[test]
    fn order_is_pointwise(p in arb_raw_warp(), q in arb_raw_warp()) {
        prop_assert_eq!(p.warp().leq(&q.warp()), leq_oracle(&p, &q));
    }

    #[test]
    fn monoid_laws(p in arb_warp(), q in arb_warp(), r in arb_warp()) {
        prop_assert_eq!(p.compose(&q).compose(&r), p.compose(&q.compose(&r)));
        prop_assert_eq!(Warp::id().compose(&p), p.clone());
        prop_assert_eq!(p.compose(&Warp::id()), p);
    }

    #[test]
    fn residual_is_right_adjoint(p in arb_warp(), q in arb_warp(), r in arb_warp()) {
        prop_assert_eq!(p.compose(&r).leq(&q), r.leq(&q.residual(&p)));
    }

    #[test]
    fn counit(p in arb_warp(), q in arb_warp()) {
        prop_assert!(p.compose(&q.residual(&p)).leq(&q));
    }

    #[test]
    fn partial_order(p in arb_warp(), q in arb_warp(), r in arb_warp()) {
        prop_assert!(p.leq(&p));
        if p.leq(&q) && q.leq(&r) {
            prop_assert!(p.leq(&r));
        }
        prop_assert_eq!(p.leq(&q) && q.leq(&p), p == q);
    }

    #[test]
    fn composition_is_monotone(p in arb_warp(), q in arb_warp(), r in arb_warp()) {
        let (lo, hi) = (p.inf(&q), p.sup(&q));
        prop_assert!(lo.compose(&r).leq(&hi.compose(&r)));
        prop_assert!(r.compose(&lo).leq(&r.compose(&hi)));
    }

    #[test]
    fn lattice_laws(p in arb_warp(), q in arb_warp(), r in arb_warp()) {
        let (s, i) = (p.sup(&q), p.inf(&q));
        prop_assert!(p.leq(&s) && q.leq(&s));
        prop_assert!(i.leq(&p) && i.leq(&q));
        prop_assert_eq!(s.clone(), q.sup(&p));
        prop_assert_eq!(i.clone(), q.inf(&p));
        prop_assert_eq!(p.sup(&q.sup(&r)), s.sup(&r));
        prop_assert_eq!(p.inf(&q.inf(&r)), i.inf(&r));
        prop_assert_eq!(p.sup(&p.inf(&q)), p.clone());
        prop_assert_eq!(p.inf(&p.sup(&q)), p.clone());
        if p.leq(&r) && q.leq(&r) {
            prop_assert!(s.leq(&r));
        }
        if r.leq(&p) && r.leq(&q) {
            prop_assert!(r.leq(&i));
        }
    }

    #[test]
    fn canonicalization_is_idempotent(p in arb_warp()) {
        let again = Warp::new(p.prefix().to_vec(), p.period().to_vec()).unwrap();
        prop_assert_eq!(&again, &p);
        prop_assert_eq!(raw(&again).warp(), p);
    }
}
