// SPDX-License-Identifier: Apache-2.0

mod common;

use std::time::{Duration, Instant};

use solmem::harness::corpus::{run_corpus, CorpusOptions};
use solmem::harness::{verify_source, AssertVerdict};
use solmem::solver::{self, SolverConfig, SolverVerdict};

#[test]
fn storage_writes_do_not_alias_and_copies_are_deep() {
    let opts = common::opts();
    let cases = common::invariant_cases();
    assert_eq!(cases.len(), 20);
    for case in &cases {
        common::check_invariant_case(case, &opts).unwrap();
    }
}

#[test]
fn default_values_agree_on_type_zoo() {
    let n = common::check_defaults(3).unwrap();
    assert!(n > 100, "only {} types compared", n);
}

#[test]
fn corpus_queries_are_quantifier_free() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = common::opts();
    v.emit_smt = Some(dir.path().to_path_buf());
    let mut o = CorpusOptions::new(v);
    o.jobs = 4;
    run_corpus(&common::corpus_dir(), &o).unwrap();
    let (n, bad) = common::scan_quantifiers(dir.path());
    assert!(n > 50, "only {} queries emitted", n);
    assert!(bad.is_empty(), "{:?}", bad);
}

/// Storage pointers taken from an in-bounds lvalue are written through and
/// read back through the lvalue, and the other way round.
#[test]
fn pointer_round_trip() {
    let lvalues = [
        "t1", "s1.t", "s1.ts[1]", "sa[0].t", "sa[2].ts[1]", "w.mt[3]", "w.s.t", "w.s.ts[0]", "ms[2].t", "tf[1]", "ss[8].ts[5]",
    ];
    let opts = common::opts();
    for e in lvalues {
        let src = format!(
            "contract R {{
                struct T {{ int z; int[] zs; }}
                struct S {{ int x; T t; T[] ts; }}
                struct W {{ mapping(int => T) mt; S s; }}
                T t1; S s1; S[] sa; W w; mapping(int => S) ms; T[2] tf; S[] ss;
                constructor() {{
                    s1.ts.push(t1); s1.ts.push(t1); s1.ts.push(t1);
                    s1.ts.push(t1); s1.ts.push(t1); s1.ts.push(t1);
                    sa.push(s1); sa.push(s1); sa.push(s1);
                    ss.push(s1); ss.push(s1); ss.push(s1); ss.push(s1); ss.push(s1);
                    ss.push(s1); ss.push(s1); ss.push(s1); ss.push(s1);
                    w.s.ts.push(t1);
                    T storage p = {e};
                    p.z = 5;
                    assert({e}.z == 5);
                    {e}.z = 6;
                    assert(p.z == 6);
                }}
            }}"
        );
        let r = verify_source(&src, &opts).unwrap();
        for a in r.asserts() {
            assert_eq!(a.verdict, AssertVerdict::Verified, "{}: {}", e, a.text);
        }
        assert_eq!(r.asserts().count(), 2, "{}", e);
    }
}

fn pigeonhole(n: usize) -> String {
    let mut s = String::new();
    for p in 0..=n {
        for h in 0..n {
            s.push_str(&format!("(declare-const x{}_{} Bool)\n", p, h));
        }
        let any: Vec<String> = (0..n).map(|h| format!("x{}_{}", p, h)).collect();
        s.push_str(&format!("(assert (or {}))\n", any.join(" ")));
    }
    for h in 0..n {
        for p in 0..=n {
            for q in p + 1..=n {
                s.push_str(&format!("(assert (not (and x{}_{} x{}_{})))\n", p, h, q, h));
            }
        }
    }
    s.push_str("(check-sat)\n");
    s
}

#[test]
fn solver_timeout_is_enforced() {
    let cfg = SolverConfig::new(None, Duration::from_millis(300));
    let start = Instant::now();
    let v = solver::check(&cfg, &pigeonhole(14));
    let took = start.elapsed();
    assert_eq!(v, SolverVerdict::Timeout);
    assert!(took < Duration::from_secs(5), "took {:?}", took);
}
