// SPDX-License-Identifier: Apache-2.0

use proptest::prelude::*;
use solmem::ir::eval::{eval_program, EvalOutcome};
use solmem::ir::gen::{random_env, random_program};
use solmem::ir::{normalize_lhs, to_ssa, vc_gen, IrStmt, SmtProgram};

fn has_composite_lhs(p: &SmtProgram) -> bool {
    fn go(ss: &[IrStmt]) -> bool {
        ss.iter().any(|s| match s {
            IrStmt::Assign(l, _) => !matches!(l, solmem::ir::IrExpr::Ident(_)),
            IrStmt::Ite(_, t, e) => go(t) || go(e),
            _ => false,
        })
    }
    go(&p.stmts)
}

/// Normalization and SSA conversion agree with the original program on the
/// outcome and on every declared variable's final value.
fn check_equivalence(seed: u64) {
    let p = random_program(seed, 14);
    let env = random_env(seed);
    let orig = eval_program(&p, &env).unwrap();
    let n = normalize_lhs(&p).unwrap();
    n.check().unwrap();
    assert!(!has_composite_lhs(&n));
    let norm = eval_program(&n, &env).unwrap();
    assert_eq!(orig, norm, "normalize changed the outcome, seed {}", seed);
    let (s, finals) = to_ssa(&n).unwrap();
    s.check().unwrap();
    let ssa = eval_program(&s, &env).unwrap();
    match (&orig, &ssa) {
        (EvalOutcome::Finished(a), EvalOutcome::Finished(b)) => {
            for x in p.decls.keys() {
                assert_eq!(a[x], b[&finals[x]], "seed {} variable {}", seed, x);
            }
        }
        (a, b) => assert_eq!(a, b, "seed {}", seed),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]
    #[test]
    fn normalize_and_ssa_preserve_eval(seed in any::<u64>()) {
        check_equivalence(seed);
    }
}

#[test]
fn ssa_has_single_assignments() {
    for seed in 0..40 {
        let (s, _) = to_ssa(&normalize_lhs(&random_program(seed, 14)).unwrap()).unwrap();
        let mut seen = std::collections::HashSet::new();
        for st in &s.stmts {
            match st {
                IrStmt::Assign(solmem::ir::IrExpr::Ident(x), _) => assert!(seen.insert(x.clone()), "{} twice", x),
                IrStmt::Ite(..) => panic!("ite left in SSA"),
                _ => {}
            }
        }
    }
}

#[test]
fn vc_per_assert() {
    for seed in 0..20 {
        let p = random_program(seed, 14);
        let (s, _) = to_ssa(&normalize_lhs(&p).unwrap()).unwrap();
        let ids = s.assert_ids();
        for (k, id) in ids.iter().enumerate() {
            let f = vc_gen(&s, k).unwrap();
            assert_eq!(f.assert_id, *id);
        }
        assert!(vc_gen(&s, ids.len()).is_err());
    }
}
