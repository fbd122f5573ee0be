// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::time::Duration;

use solmem::frontend::{self, SolType};
use solmem::harness::{verify_source, AssertVerdict, VerifyOptions};
use solmem::ir::IrExpr;
use solmem::translate::{translate_contract, PathStep, StorageLayout, TranslateOptions};

fn fixture(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)).unwrap()
}

fn opts() -> VerifyOptions {
    VerifyOptions::new(None, Duration::from_secs(10))
}

/// Index/value pairs of a chain of writes over a constant array.
fn ordinals(e: &IrExpr) -> Vec<i64> {
    let mut cells = vec![];
    let mut cur = e;
    while let IrExpr::Write(a, i, v) = cur {
        match (&**i, &**v) {
            (IrExpr::Int(i), IrExpr::Int(v)) => cells.push((*i, *v)),
            other => panic!("non-literal cell {:?}", other),
        }
        cur = a;
    }
    assert!(matches!(cur, IrExpr::ConstArray(..)), "{}", e);
    cells.sort();
    cells.iter().enumerate().for_each(|(k, (i, _))| assert_eq!(k as i64, *i));
    cells.into_iter().map(|(_, v)| v).collect()
}

fn name(s: &str) -> PathStep {
    PathStep::Name(s.into())
}

fn idx(i: i64) -> PathStep {
    PathStep::Index(IrExpr::Int(i))
}

#[test]
fn pack_goldens() {
    let c = frontend::load(&fixture("pack_tree.sol")).unwrap();
    let layout = StorageLayout::new(&c);
    let tree = layout.tree(&c, &SolType::Struct("T".into()));
    assert_eq!(ordinals(&tree.pack(&[name("t1")]).unwrap()), vec![0]);
    assert_eq!(ordinals(&tree.pack(&[name("s1"), name("t")]).unwrap()), vec![1, 0]);
    let deep = [name("ss"), idx(8), name("ts"), idx(5)];
    assert_eq!(ordinals(&tree.pack(&deep).unwrap()), vec![2, 8, 1, 5]);
}

#[test]
fn unpack_golden() {
    let c = frontend::load(&fixture("pack_tree.sol")).unwrap();
    let layout = StorageLayout::new(&c);
    let tree = layout.tree(&c, &SolType::Struct("T".into()));
    let u = tree.unpack(&solmem::ir::ident("ptr")).unwrap();
    assert_eq!(
        u.to_string(),
        "ite(ptr[0] = 0, t1, ite(ptr[0] = 1, ite(ptr[1] = 0, s1.t, s1.ts.arr[ptr[2]]), \
         ite(ptr[2] = 0, ss.arr[ptr[1]].t, ss.arr[ptr[1]].ts.arr[ptr[3]])))"
    );
}

#[test]
fn single_leaf_unpack_is_bare() {
    let c = frontend::load("contract C { struct S { int x; } S s; int y; }").unwrap();
    let layout = StorageLayout::new(&c);
    let tree = layout.tree(&c, &SolType::Struct("S".into()));
    assert_eq!(tree.leaf_count(), 1);
    assert_eq!(tree.unpack(&solmem::ir::ident("p")).unwrap().to_string(), "s");
}

#[test]
fn pointer_without_storage_entities_uses_default_context() {
    let src = "contract C { struct S { int x; } \
               function f(S storage p) internal { p.x = 1; assert(p.x == 1); } }";
    let c = frontend::load(src).unwrap();
    let layout = StorageLayout::new(&c);
    assert_eq!(layout.contexts().len(), 1);
    let r = verify_source(src, &opts()).unwrap();
    assert_eq!(r.exit_code(), 0, "{}", r.render());
}

fn verdicts(src: &str) -> Vec<AssertVerdict> {
    let r = verify_source(src, &opts()).unwrap();
    r.asserts().map(|a| a.verdict.clone()).collect()
}

fn holds(v: &AssertVerdict) -> bool {
    *v == AssertVerdict::Verified
}

fn fails(v: &AssertVerdict) -> bool {
    matches!(v, AssertVerdict::Counterexample { .. })
}

#[test]
fn tuple_assignment_order() {
    let vs = verdicts(&fixture("tuple_swap.sol"));
    assert_eq!(vs.len(), 2);
    assert!(vs.iter().all(holds), "{:?}", vs);
    let negated = fixture("tuple_swap.sol").replace("assert(s1", "assert(!(s1").replace(");\n    }", "));\n    }");
    let vs = verdicts(&negated);
    assert!(vs.iter().all(fails), "{:?}", vs);
}

#[test]
fn dangling_pointer_reads_popped_slot() {
    let vs = verdicts(&fixture("dangling_pointer.sol"));
    assert!(vs.iter().all(holds), "{:?}", vs);
    let vs = verdicts(&fixture("dangling_index.sol"));
    assert!(vs.iter().all(fails), "{:?}", vs);
}

#[test]
fn every_fixture_translates() {
    for f in ["pack_tree.sol", "tuple_swap.sol", "dangling_pointer.sol", "dangling_index.sol", "data_storage.sol"] {
        let c = frontend::load(&fixture(f)).unwrap();
        for (name, p) in translate_contract(&c, TranslateOptions::default()) {
            let p = p.unwrap_or_else(|e| panic!("{} {}: {}", f, name, e));
            p.check().unwrap_or_else(|e| panic!("{} {}: {}", f, name, e));
        }
    }
}
