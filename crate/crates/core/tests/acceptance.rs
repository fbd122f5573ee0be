// SPDX-License-Identifier: Apache-2.0

//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any
//! criterion fails.

mod common;

use std::time::{Duration, Instant};

use solmem::frontend::{self, SolType};
use solmem::harness::corpus::{run_corpus, CorpusOptions};
use solmem::harness::fuzz::fuzz;
use solmem::harness::{verify_source, AssertVerdict, VerifyReport};
use solmem::ir::{ident, IrExpr};
use solmem::translate::{PathStep, StorageLayout};

const PACK_LIMIT: Duration = Duration::from_secs(1);
const VC_LIMIT: Duration = Duration::from_secs(10);
const TEST_TIMEOUT: Duration = Duration::from_secs(60);
const MAX_UNSUPPORTED: f64 = 0.10;
const FUZZ_SEEDS: u64 = 500;
const FUZZ_SIZE: usize = 20;
const FUZZ_LIMIT: Duration = Duration::from_secs(30 * 60);
const IR_PROGRAMS: u64 = 200;
const ZOO_DEPTH: usize = 3;

type Check = Result<String, String>;

fn ordinals(e: &IrExpr) -> Result<Vec<i64>, String> {
    let mut cells = vec![];
    let mut cur = e;
    while let IrExpr::Write(a, i, v) = cur {
        match (&**i, &**v) {
            (IrExpr::Int(i), IrExpr::Int(v)) => cells.push((*i, *v)),
            _ => return Err(format!("non-literal cell in {}", e)),
        }
        cur = a;
    }
    cells.sort();
    Ok(cells.into_iter().map(|(_, v)| v).collect())
}

fn pack_unpack() -> Check {
    let start = Instant::now();
    let c = frontend::load(&common::fixture("pack_tree.sol")).map_err(|e| e.to_string())?;
    let layout = StorageLayout::new(&c);
    let tree = layout.tree(&c, &SolType::Struct("T".into()));
    let n = |s: &str| PathStep::Name(s.into());
    let i = |k: i64| PathStep::Index(IrExpr::Int(k));
    let cases: [(&str, Vec<PathStep>, Vec<i64>); 3] = [
        ("t1", vec![n("t1")], vec![0]),
        ("s1.t", vec![n("s1"), n("t")], vec![1, 0]),
        ("ss[8].ts[5]", vec![n("ss"), i(8), n("ts"), i(5)], vec![2, 8, 1, 5]),
    ];
    for (label, steps, want) in cases {
        let got = ordinals(&tree.pack(&steps).map_err(|e| e.to_string())?)?;
        if got != want {
            return Err(format!("pack {} = {:?}, want {:?}", label, got, want));
        }
    }
    let u = tree.unpack(&ident("ptr")).map_err(|e| e.to_string())?.to_string();
    let want = "ite(ptr[0] = 0, t1, ite(ptr[0] = 1, ite(ptr[1] = 0, s1.t, s1.ts.arr[ptr[2]]), \
                ite(ptr[2] = 0, ss.arr[ptr[1]].t, ss.arr[ptr[1]].ts.arr[ptr[3]])))";
    if u != want {
        return Err(format!("unpack printed {}", u));
    }
    let took = start.elapsed();
    if took >= PACK_LIMIT {
        return Err(format!("took {:?}", took));
    }
    Ok(format!("3 packs and 1 unpack exact in {:.3}s", took.as_secs_f64()))
}

fn verify(src: &str) -> Result<VerifyReport, String> {
    verify_source(src, &common::opts()).map_err(|e| e.to_string())
}

/// Every assert has the wanted verdict within the per-VC limit.
fn expect_all(r: &VerifyReport, hold: bool, what: &str) -> Result<usize, String> {
    let mut n = 0;
    for a in r.asserts() {
        let ok = match &a.verdict {
            AssertVerdict::Verified => hold,
            AssertVerdict::Counterexample { .. } => !hold,
            _ => false,
        };
        if !ok {
            return Err(format!("{}: assert({}) gave {:?}", what, a.text, a.verdict));
        }
        if Duration::from_secs_f64(a.seconds) >= VC_LIMIT {
            return Err(format!("{}: assert({}) took {:.2}s", what, a.text, a.seconds));
        }
        n += 1;
    }
    Ok(n)
}

fn tuple_order() -> Check {
    let src = common::fixture("tuple_swap.sol");
    let n = expect_all(&verify(&src)?, true, "original")?;
    let negated = src.replace("assert(s1", "assert(!(s1").replace(");\n    }", "));\n    }");
    let m = expect_all(&verify(&negated)?, false, "negated")?;
    if n != 2 || m != 2 {
        return Err(format!("expected 2 + 2 asserts, got {} + {}", n, m));
    }
    Ok("both orders hold, both negations have counterexamples".into())
}

fn dangling() -> Check {
    let a = expect_all(&verify(&common::fixture("dangling_pointer.sol"))?, true, "pointer read")?;
    let b = expect_all(&verify(&common::fixture("dangling_index.sol"))?, false, "index read")?;
    if a != 1 || b != 1 {
        return Err(format!("expected 1 + 1 asserts, got {} + {}", a, b));
    }
    Ok("pointer read verified, index read has a counterexample".into())
}

fn corpus() -> Check {
    let mut o = CorpusOptions::new(common::opts());
    o.verify.solver.timeout = TEST_TIMEOUT;
    o.test_timeout = TEST_TIMEOUT;
    o.jobs = jobs();
    let r = run_corpus(&common::corpus_dir(), &o).map_err(|e| e.to_string())?;
    print!("{}", r.table());
    let t = &r.total;
    if let Some(row) = r.classes.iter().take(5).find(|c| c.tests < 5) {
        return Err(format!("class {} has {} tests", row.class, row.tests));
    }
    let unsupported = t.unsupported as f64 / t.tests.max(1) as f64;
    let summary = format!(
        "{} tests: {} incorrect, {} unsupported ({:.1}%), {} timeouts, {} invalid",
        t.tests,
        t.incorrect,
        t.unsupported,
        unsupported * 100.0,
        t.timeout,
        r.invalid.len()
    );
    if t.incorrect > 0 || t.timeout > 0 || unsupported > MAX_UNSUPPORTED || !r.invalid.is_empty() {
        return Err(summary);
    }
    Ok(summary)
}

fn jobs() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn differential() -> Check {
    let s = fuzz(0..FUZZ_SEEDS, FUZZ_SIZE, &common::opts(), jobs());
    let failing = s.cases.iter().filter(|c| c.failing.is_some()).count();
    let summary = format!(
        "{} programs ({} with a failing assert): {} agree, {} disagree, {} inconclusive in {:.1}s",
        s.cases.len(),
        failing,
        s.agree,
        s.disagree,
        s.inconclusive,
        s.seconds
    );
    if s.agree as u64 != FUZZ_SEEDS || Duration::from_secs_f64(s.seconds) >= FUZZ_LIMIT {
        for c in s.cases.iter().filter(|c| !matches!(c.verdict, solmem::harness::fuzz::FuzzVerdict::Agree)).take(5) {
            eprintln!("  seed {}: {:?}", c.seed, c.verdict);
        }
        return Err(summary);
    }
    Ok(summary)
}

fn invariants() -> Check {
    for seed in 0..IR_PROGRAMS {
        common::ir_equivalence(seed)?;
    }
    let cases = common::invariant_cases();
    for case in &cases {
        common::check_invariant_case(case, &common::opts())?;
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut o = CorpusOptions::new(common::opts());
    o.verify.emit_smt = Some(dir.path().to_path_buf());
    o.jobs = jobs();
    run_corpus(&common::corpus_dir(), &o).map_err(|e| e.to_string())?;
    let (files, bad) = common::scan_quantifiers(dir.path());
    if files == 0 || !bad.is_empty() {
        return Err(format!("{} of {} queries contain quantifiers", bad.len(), files));
    }
    Ok(format!(
        "(a) {} IR programs equivalent, (b) {} contracts proven, (c) {} queries quantifier-free",
        IR_PROGRAMS,
        cases.len(),
        files
    ))
}

fn defaults() -> Check {
    let n = common::check_defaults(ZOO_DEPTH)?;
    Ok(format!("{} (type, location) pairs agree", n))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 7] = [
        ("1 pack/unpack goldens", pack_unpack),
        ("2 tuple assignment order", tuple_order),
        ("3 dangling pointer", dangling),
        ("4 five-class corpus", corpus),
        ("5 differential fuzzing", differential),
        ("6 invariant suites", invariants),
        ("7 default values", defaults),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let r = check();
        let secs = start.elapsed().as_secs_f64();
        match r {
            Ok(msg) => println!("PASS criterion {}: {} [{:.1}s]", name, msg, secs),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {}: {} [{:.1}s]", name, msg, secs);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
