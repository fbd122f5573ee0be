// SPDX-License-Identifier: Apache-2.0

use std::path::Path;

use solmem::frontend::typed::{TExpr, TExprKind, TStmt, VarKind};
use solmem::frontend::{self, parse_source, type_of, FrontendError, LocCategory, SolType};

fn fixture(name: &str) -> String {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name);
    std::fs::read_to_string(p).unwrap()
}

fn all_exprs(c: &frontend::TypedContract) -> Vec<TExpr> {
    let mut out = vec![];
    for f in c.all_functions() {
        for s in &f.body {
            let mut push = |e: &TExpr| e.walk(&mut |x| out.push(x.clone()));
            match s {
                TStmt::Decl { init, .. } => init.iter().for_each(&mut push),
                TStmt::Assign { lhs, rhs, .. } => lhs.iter().chain(rhs).for_each(&mut push),
                TStmt::Push { array, value, .. } => {
                    push(array);
                    push(value)
                }
                TStmt::Pop { array, .. } => push(array),
                TStmt::Delete { target, .. } => push(target),
                TStmt::Assert { cond, .. } => push(cond),
            }
        }
    }
    out
}

fn record() -> SolType {
    SolType::Struct("Record".into())
}

#[test]
fn minimal_contract() {
    let c = frontend::load("contract C { int x; }").unwrap();
    assert_eq!(c.state_vars.len(), 1);
    let v = c.var(c.state_vars[0]);
    assert_eq!((v.name.as_str(), &v.ty, v.cat), ("x", &SolType::Int, LocCategory::Value));
}

#[test]
fn data_storage_shape() {
    let p = parse_source(&fixture("data_storage.sol")).unwrap();
    assert_eq!(p.warnings.len(), 1);
    let c = &p.unit.contract;
    assert_eq!((c.structs.len(), c.state_vars.len(), c.functions.len()), (1, 1, 3));
}

#[test]
fn data_storage_categories() {
    let c = frontend::load(&fixture("data_storage.sol")).unwrap();
    let records = c.var(c.state_vars[0]);
    assert_eq!(records.ty, SolType::mapping(SolType::Address, record()));
    assert_eq!(records.cat, LocCategory::Storage);

    let r = c.vars.iter().find(|v| v.source_name == "r" && v.kind == VarKind::Local).unwrap();
    assert_eq!((r.ty.clone(), r.cat), (record(), LocCategory::StorPtr));
    let ret = c.vars.iter().find(|v| v.source_name == "ret").unwrap();
    assert_eq!((ret.ty.clone(), ret.cat), (SolType::dyn_array(SolType::Int), LocCategory::Memory));

    let exprs = all_exprs(&c);
    let find = |pred: &dyn Fn(&TExpr) -> bool| exprs.iter().find(|e| pred(e)).cloned().unwrap();
    let index = find(&|e| matches!(&e.kind, TExprKind::Index(b, _) if matches!(b.kind, TExprKind::Var(v) if v == c.state_vars[0])));
    assert_eq!(type_of(&index), (record(), LocCategory::Storage));
    let data = find(&|e| matches!(&e.kind, TExprKind::Member(b, m, _) if m == "data" && matches!(b.kind, TExprKind::Index(..))));
    assert_eq!(type_of(&data), (SolType::dyn_array(SolType::Int), LocCategory::Storage));
    let lit = find(&|e| matches!(e.kind, TExprKind::BoolLit(true)));
    assert_eq!(type_of(&lit), (SolType::Bool, LocCategory::Value));
    // member access through a pointer keeps the pointer category at the root
    let r_data = find(&|e| matches!(&e.kind, TExprKind::Member(b, m, _) if m == "data" && b.is_pointer()));
    assert_eq!(r_data.cat, LocCategory::StorPtr);
    assert!(!r_data.is_pointer() && r_data.is_storage_entity());
}

#[test]
fn missing_data_location() {
    let err = frontend::load("contract C { int[] x; function f() public { int[] y; } }").unwrap_err();
    assert!(err.to_string().contains("data location required"), "{}", err);
}

#[test]
fn unsupported_constructs_are_reported() {
    let cases = [
        ("contract C { function f() public { for (;;) {} } }", "loops"),
        ("contract C { int x; function f() public { if (true) { x = 1; } } }", "if statements"),
        ("contract C { int x; function f() public { x = x * 2; } }", "operator"),
        ("contract C { function f() public returns (int r) { return 1; } }", "return"),
        ("contract C { function f(int[] calldata x) external {} }", "calldata"),
        ("contract A {} contract B {}", "multiple contracts"),
        ("contract C is D {}", "inheritance"),
        ("contract C { int x = 1; }", "initializers"),
        ("contract C { function g() public {} function f() public { g(); } }", "function calls"),
        ("contract C { struct S { S[] c; } }", "recursive"),
    ];
    for (src, what) in cases {
        match frontend::load(src) {
            Err(FrontendError::Unsupported { msg, .. }) => assert!(msg.contains(what), "{}: {}", src, msg),
            other => panic!("{}: expected unsupported, got {:?}", src, other.map(|_| ())),
        }
    }
}

#[test]
fn location_errors() {
    let cases = [
        ("contract C { function f() public { mapping(int => int) memory m; } }", "mapping in memory"),
        ("contract C { struct S { mapping(int => int) m; } function f(S memory s) public {} }", "mapping in memory"),
        ("contract C { int[] a; function f() public { int[] storage p; } }", "uninitialized storage pointer"),
        ("contract C { int[] a; function f(int[] memory m) public { int[] storage p = m; } }", "storage pointer"),
        ("contract C { int[] a; function f() public { int[] memory m; m.push(1); } }", "dynamic storage arrays"),
        ("contract C { int[3] a; function f() public { a.push(1); } }", "dynamic storage arrays"),
        ("contract C { mapping(int => int) m; function f() public { delete m; } }", "mapping"),
        ("contract C { mapping(int => int) m; mapping(int => int) n; function f() public { m = n; } }", "mappings"),
        ("contract C { int[] a; function f() public { int[] storage p = a; delete p; } }", "storage pointer"),
        ("contract C { function f() public { y = 1; } }", "undeclared identifier"),
        ("contract C { int x; function f() public { x = true; } }", "not assignable"),
        ("contract C { int[] a; function f() public { a.length = 2; } }", "read-only"),
        ("contract C { int x; function f() public { int memory y; } }", "data location can only"),
    ];
    for (src, what) in cases {
        let err = frontend::load(src).expect_err(src);
        assert!(err.to_string().contains(what), "{}: {}", src, err);
    }
}

#[test]
fn alpha_renaming_is_injective() {
    let src = "contract C {
        int x; int refcnt; int x_1;
        function f(int x) public { int y = x; }
        function g() public { int y = x; int arrHeap_int = 1; }
    }";
    let c = frontend::load(src).unwrap();
    let mut names: Vec<_> = c.vars.iter().map(|v| v.name.clone()).collect();
    let n = names.len();
    names.sort();
    names.dedup();
    assert_eq!(names.len(), n, "{:?}", names);
    assert!(!c.vars.iter().any(|v| v.name == "refcnt" || v.name.starts_with("arrHeap_")));
    // the shadowing parameter is renamed, the state variable keeps its name
    assert_eq!(c.var(c.state_vars[0]).name, "x");
    let param = c.functions[0].params[0];
    assert_ne!(c.var(param).name, "x");
    assert_eq!(c.var(param).source_name, "x");
    // `y = x` in g refers to the state variable
    let TStmt::Decl { init: Some(e), .. } = &c.functions[1].body[0] else { panic!() };
    assert!(matches!(e.kind, TExprKind::Var(v) if v == c.state_vars[0]));
}

#[test]
fn multi_declarations_and_expectations() {
    let c = frontend::load(&fixture("tuple_swap.sol")).unwrap();
    assert_eq!(c.state_vars.len(), 3);
    let c = frontend::load(&fixture("dangling_index.sol")).unwrap();
    assert_eq!(c.asserts.len(), 1);
    assert_eq!(c.asserts[0].expect, frontend::Expectation::Fails);
    let err = frontend::load("contract C { constructor() { //expect: maybe\n assert(true); } }").unwrap_err();
    assert!(matches!(err, FrontendError::Expectation { .. }));
}

#[test]
fn conditional_common_location() {
    let src = "contract C {
        struct S { int x; }
        S s;
        function f(bool c, S memory m) public {
            S storage p = s;
            S memory r = c ? m : p;
            S storage q = c ? s : p;
        }
    }";
    let c = frontend::load(src).unwrap();
    let f = &c.functions[0];
    let TStmt::Decl { init: Some(e1), .. } = &f.body[1] else { panic!() };
    let TStmt::Decl { init: Some(e2), .. } = &f.body[2] else { panic!() };
    assert_eq!(e1.cat, LocCategory::Memory);
    assert_eq!(e2.cat, LocCategory::StorPtr);
    assert!(e2.is_pointer());
}

#[test]
fn every_reference_expression_has_a_location() {
    for name in ["data_storage.sol", "pack_tree.sol", "tuple_swap.sol", "dangling_pointer.sol"] {
        let c = frontend::load(&fixture(name)).unwrap();
        for e in all_exprs(&c) {
            assert_eq!(e.ty.is_value(), e.cat == LocCategory::Value, "{:?}", e);
        }
    }
}
