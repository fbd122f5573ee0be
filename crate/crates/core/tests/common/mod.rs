// SPDX-License-Identifier: Apache-2.0

//! Checks shared by the integration tests and the acceptance runner.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::time::Duration;

use solmem::frontend::{self, LocCategory, SolType};
use solmem::harness::{check_program, AssertVerdict, VerifyOptions};
use solmem::ir::eval::{eval_program, Env, EvalOutcome};
use solmem::ir::{ident, IrExpr, IrStmt};
use solmem::oracle::decode::ir_json;
use solmem::oracle::Machine;
use solmem::translate::{translate_function, StorageLayout, TranslateOptions};

pub fn fixture(name: &str) -> String {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {}", p.display(), e))
}

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn opts() -> VerifyOptions {
    VerifyOptions::new(None, Duration::from_secs(10))
}

// ---- default-value conformance over a type zoo ----

const ZOO_STRUCTS: &str = "
    struct P { int a; bool b; }
    struct Q { P p; int[] xs; P[2] ps; }
    struct M { mapping(int => P) mp; int y; Q q; }
";

fn has_mapping(t: &SolType) -> bool {
    match t {
        SolType::Mapping(..) => true,
        SolType::Struct(n) => n == "M",
        SolType::DynArray(b) | SolType::FixArray(b, _) => has_mapping(b),
        _ => false,
    }
}

/// Every type built from the leaves by at most `depth - 1` applications of
/// `T[]`, `T[2]`, `mapping(int => T)` and `mapping(bool => T)`.
pub fn zoo_types(depth: usize) -> Vec<SolType> {
    let leaves = vec![
        SolType::Int,
        SolType::Bool,
        SolType::Struct("P".into()),
        SolType::Struct("Q".into()),
        SolType::Struct("M".into()),
    ];
    let mut all = leaves.clone();
    let mut layer = leaves;
    for _ in 1..depth {
        let mut next = vec![];
        for t in &layer {
            next.push(SolType::dyn_array(t.clone()));
            next.push(SolType::fix_array(t.clone(), 2));
            next.push(SolType::mapping(SolType::Int, t.clone()));
            next.push(SolType::mapping(SolType::Bool, t.clone()));
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}

/// Compares, for every zoo type, the interpreter's default against the
/// evaluated translation: state variables as storage, return parameters as
/// memory. Returns the number of (type, location) pairs compared.
pub fn check_defaults(depth: usize) -> Result<usize, String> {
    let types = zoo_types(depth);
    let mem: Vec<&SolType> = types.iter().filter(|t| !has_mapping(t)).collect();
    let mut src = format!("contract Zoo {{{}\n", ZOO_STRUCTS);
    for (i, t) in types.iter().enumerate() {
        src.push_str(&format!("    {} v{};\n", t, i));
    }
    let rets: Vec<String> = mem
        .iter()
        .enumerate()
        .map(|(i, t)| format!("{} {}r{}", t, if t.is_value() { "" } else { "memory " }, i))
        .collect();
    src.push_str(&format!("    constructor() {{}}\n    function mem() public returns ({}) {{}}\n}}\n", rets.join(", ")));
    let c = frontend::load(&src).map_err(|e| format!("zoo contract: {}", e))?;
    let layout = StorageLayout::new(&c);
    let topts = TranslateOptions::default();
    let mut compared = 0;

    let mut m = Machine::new(&c);
    m.call("constructor", &[]).map_err(|e| e.to_string())?;
    let want = m.storage_json();
    let p = translate_function(&c, &layout, c.function("constructor").unwrap(), topts).map_err(|e| e.to_string())?;
    let EvalOutcome::Finished(env) = eval_program(&p, &Env::new()).map_err(|e| e.to_string())? else {
        return Err("constructor did not finish".into());
    };
    for (i, t) in types.iter().enumerate() {
        let name = format!("v{}", i);
        let got = ir_json(&c, &env, &env[&name], t, if t.is_value() { LocCategory::Value } else { LocCategory::Storage })?;
        if got != want[&name] {
            return Err(format!("storage `{}`: interpreter {} but translation {}", t, want[&name], got));
        }
        compared += 1;
    }

    let mut m = Machine::new(&c);
    let r = m.call("mem", &[]).map_err(|e| e.to_string())?;
    let f = c.function("mem").unwrap();
    let p = translate_function(&c, &layout, f, topts).map_err(|e| e.to_string())?;
    let EvalOutcome::Finished(env) = eval_program(&p, &Env::new()).map_err(|e| e.to_string())? else {
        return Err("mem() did not finish".into());
    };
    for (((_, v), id), t) in r.returns.iter().zip(&f.returns).zip(&mem) {
        let info = c.var(*id);
        let want = m.value_json(v, t).map_err(|e| e.to_string())?;
        let got = ir_json(&c, &env, &env[&info.name], t, info.cat)?;
        if got != want {
            return Err(format!("memory `{}`: interpreter {} but translation {}", t, want, got));
        }
        compared += 1;
    }
    Ok(compared)
}

// ---- non-aliasing and deep-copy checks ----

const INV_PRELUDE: &str = "
    struct T { int z; int[] zs; }
    struct S { int x; T t; T[] ts; int[2] f; }
    struct W { mapping(int => T) mt; int y; }

    S a;
    S b;
    T t1;
    T[] ta;
    int[] ia;
    int[3] fa;
    mapping(int => S) ms;
    mapping(int => int) mi;
    W w;
";

const STATE: [&str; 9] = ["a", "b", "t1", "ta", "ia", "fa", "ms", "mi", "w"];

pub struct InvCase {
    pub body: &'static str,
    /// State variables the function may modify; every other one must be
    /// left equal to its initial value.
    pub written: &'static [&'static str],
}

/// One storage write per function plus storage-to-memory copies that are
/// then mutated.
pub fn invariant_cases() -> Vec<InvCase> {
    let c = |body, written| InvCase { body, written };
    vec![
        c("function f(int v) public { a.x = v; }", &["a"]),
        c("function f() public { a = b; }", &["a"]),
        c("function f(S memory m) public { a = m; }", &["a"]),
        c("function f() public { t1 = a.t; }", &["t1"]),
        c("function f() public { ta.push(t1); }", &["ta"]),
        c("function f() public { ia.push(3); }", &["ia"]),
        c("function f() public { fa[1] = 4; }", &["fa"]),
        c("function f(int k) public { ms[k] = a; }", &["ms"]),
        c("function f(int k) public { mi[k] = k; }", &["mi"]),
        c("function f() public { delete b; }", &["b"]),
        c("function f(bool c) public { S storage p = c ? a : b; p.x = 1; }", &["a", "b"]),
        c("function f() public { T storage p = ta[0]; p.z = 1; }", &["ta"]),
        c("function f(int k) public { w.mt[k] = t1; }", &["w"]),
        c("function f() public { (a, b) = (b, a); }", &["b"]),
        c("function f() public { ta.pop(); }", &["ta"]),
        c("function f() public { S memory m = a; m.x = 5; m.t.z = 6; m.f[0] = 1; }", &[]),
        c("function f() public { T memory m = a.t; m.z = 1; m.zs = new int[](2); }", &[]),
        c("function f() public { int[3] memory m = fa; m[0] = 9; int[] memory n = ia; n = new int[](1); }", &[]),
        c("function f(int k) public { T memory m = w.mt[k]; m.z = 3; T memory n = ms[k].t; n.z = m.z; }", &[]),
        c("function f() public { S memory m = b; S memory n = m; n.t = T(1, new int[](1)); m.ts = new T[](0); n.x = 2; }", &[]),
    ]
}

/// Proves that every state variable outside `written` keeps its value. As a
/// guard against vacuous success, each written variable must be refutable
/// in the same way.
pub fn check_invariant_case(case: &InvCase, opts: &VerifyOptions) -> Result<(), String> {
    let src = format!("contract Inv {{{}\n    {}\n}}\n", INV_PRELUDE, case.body);
    let c = frontend::load(&src).map_err(|e| format!("{}: {}", case.body, e))?;
    let layout = StorageLayout::new(&c);
    let topts = TranslateOptions { unroll: Some(2) };
    let mut p = translate_function(&c, &layout, c.function("f").unwrap(), topts).map_err(|e| e.to_string())?;
    let mut pre = vec![];
    let mut post = vec![];
    for (k, v) in STATE.iter().enumerate() {
        let ty = p.decls[*v].clone();
        let saved = format!("{}__pre", v);
        p.declare(saved.clone(), ty);
        pre.push(IrStmt::assign(ident(saved.clone()), ident(*v)));
        post.push(IrStmt::Assert(IrExpr::eq(ident(*v), ident(saved)), 1000 + k));
    }
    pre.append(&mut p.stmts);
    pre.extend(post);
    p.stmts = pre;
    let mut o = opts.clone();
    o.translate = topts;
    let verdicts = check_program(&p, &o, "inv").map_err(|e| e.to_string())?;
    for (id, v, _) in verdicts {
        let var = STATE[id - 1000];
        match (case.written.contains(&var), v) {
            (false, AssertVerdict::Verified) | (true, AssertVerdict::Counterexample { .. }) => {}
            (false, v) => return Err(format!("`{}`: `{}` may change ({:?})", case.body, var, v)),
            (true, v) => return Err(format!("`{}`: write to `{}` is not observable ({:?})", case.body, var, v)),
        }
    }
    Ok(())
}

// ---- quantifier-freeness ----

/// Tokens that would introduce quantified formulas.
pub const QUANTIFIER_TOKENS: [&str; 4] = ["forall", "exists", "lambda", "!pattern"];

/// Scans every `.smt2` file below `dir`; returns the number of files
/// scanned and the offending ones.
pub fn scan_quantifiers(dir: &Path) -> (usize, Vec<String>) {
    let mut n = 0;
    let mut bad = vec![];
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).into_iter().flatten().flatten() {
            let p = e.path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|x| x == "smt2") {
                n += 1;
                let text = std::fs::read_to_string(&p).unwrap_or_default();
                if QUANTIFIER_TOKENS.iter().any(|q| text.contains(q)) {
                    bad.push(p.display().to_string());
                }
            }
        }
    }
    (n, bad)
}

// ---- IR transformations ----

/// Normalization and SSA conversion of the random IR program for `seed`
/// agree with the original under evaluation.
pub fn ir_equivalence(seed: u64) -> Result<(), String> {
    use solmem::ir::gen::{random_env, random_program};
    use solmem::ir::{normalize_lhs, to_ssa};
    let p = random_program(seed, 14);
    let env = random_env(seed);
    let s = |e: solmem::ir::IrError| e.to_string();
    let orig = eval_program(&p, &env).map_err(s)?;
    let n = normalize_lhs(&p).map_err(s)?;
    if eval_program(&n, &env).map_err(s)? != orig {
        return Err(format!("seed {}: normalization changed the outcome", seed));
    }
    let (ssa, finals) = to_ssa(&n).map_err(s)?;
    match (&orig, eval_program(&ssa, &env).map_err(s)?) {
        (EvalOutcome::Finished(a), EvalOutcome::Finished(b)) => {
            for x in p.decls.keys() {
                if a[x] != b[&finals[x]] {
                    return Err(format!("seed {}: `{}` differs after SSA", seed, x));
                }
            }
            Ok(())
        }
        (a, b) if *a == b => Ok(()),
        _ => Err(format!("seed {}: SSA changed the outcome", seed)),
    }
}
