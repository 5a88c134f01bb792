mod common;

use common::*;
use warplang_core::checker::check_explicit;
use warplang_core::elab::{check_program, elaborate, elaborate_program, TopDef};
use warplang_core::eval::{evaluate, Env};
use warplang_core::subtype::coe;
use warplang_core::syntax::{Context, Def, Term};
use warplang_core::warp::Fin;

fn body(def: &Def) -> &Term {
    match def {
        Def::Single { body, .. } | Def::Group { body, .. } => body,
    }
}

/// Values of successive definitions at step `n`, each in the environment
/// of the ones before it.
fn values(defs: &[TopDef], n: u64) -> Vec<(String, warplang_core::Value)> {
    let mut env = Env::new();
    let mut out = Vec::new();
    for d in defs {
        let v = evaluate(&d.term, &env, Fin(n)).unwrap_or_else(|e| panic!("{} at {n}: {e}", d.name));
        env = env.insert(&d.name, v.clone());
        out.push((d.name.clone(), v));
    }
    out
}

#[test]
fn elaborated_refiners_recheck() {
    for prog in PROGRAMS {
        let out = elaborate_program(&erase_program(&refiner(prog))).unwrap_or_else(|e| panic!("{prog}: {e}"));
        let mut ctx = Context::new();
        for d in &out {
            assert_eq!(check_explicit(&ctx, &d.term).unwrap(), d.ty, "{prog}.{}", d.name);
            ctx.push(&d.name, d.ty.clone());
        }
    }
}

/// A refiner and the elaboration of its erasure compute the same thing.
#[test]
fn refiners_agree_with_elaboration() {
    for prog in PROGRAMS {
        let r = check_program(&refiner(prog)).unwrap();
        let e = elaborate_program(&erase_program(&refiner(prog))).unwrap();
        assert_eq!(r.iter().map(|d| &d.ty).collect::<Vec<_>>(), e.iter().map(|d| &d.ty).collect::<Vec<_>>());
        for n in 0..=8 {
            for ((d, (_, a)), (_, b)) in r.iter().zip(&values(&r, n)).zip(&values(&e, n)) {
                assert_eq!(observe(a, &d.ty, Fin(n)), observe(b, &d.ty, Fin(n)), "{prog}.{} at {n}", d.name);
            }
        }
    }
}

/// Coercing the minimal elaboration of a refiner's erasure up to the
/// refiner's type gives the refiner's value.
#[test]
fn minimal_elaboration_coerces_to_the_refiner() {
    for prog in PROGRAMS {
        let r = refiner(prog);
        let defs = check_program(&r).unwrap();
        let mut ctx = Context::new();
        let mut coerced = Vec::new();
        for (def, d) in r.defs.iter().zip(&defs) {
            let (minimal, em) = elaborate(&ctx, &body(def).erase()).unwrap();
            let c = coe(&minimal, &d.ty).unwrap_or_else(|| panic!("{prog}.{}: {minimal} vs {}", d.name, d.ty));
            let term = Term::coe_r(em, c);
            assert_eq!(check_explicit(&ctx, &term).unwrap(), d.ty);
            coerced.push(TopDef { name: d.name.clone(), ty: d.ty.clone(), term });
            ctx.push(&d.name, d.ty.clone());
        }
        for n in 0..=8 {
            let (want, got) = (values(&defs, n), values(&coerced, n));
            let mut env = Env::new();
            for ((d, e), ((_, a), (_, b))) in defs.iter().zip(&coerced).zip(want.iter().zip(&got)) {
                assert_eq!(observe(a, &d.ty, Fin(n)), observe(b, &d.ty, Fin(n)), "{prog}.{} at {n}", d.name);
                // Also under the refiner's own environment.
                let c = evaluate(&e.term, &env, Fin(n)).unwrap();
                assert_eq!(observe(a, &d.ty, Fin(n)), observe(&c, &d.ty, Fin(n)), "{prog}.{} at {n}", d.name);
                env = env.insert(&d.name, a.clone());
            }
        }
    }
}
