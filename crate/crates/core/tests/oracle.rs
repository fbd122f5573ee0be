// SPDX-License-Identifier: Apache-2.0

mod common;

use serde_json::json;
use solmem::frontend;
use solmem::oracle::gen::GEN_UNROLL;
use solmem::oracle::{exec_function, random_program, Machine, Outcome};
use solmem::translate::{translate_contract, TranslateOptions};

#[test]
fn tuple_assignments_match_reference_values() {
    let c = frontend::load(&common::fixture("tuple_swap.sol")).unwrap();
    let (r, st) = exec_function(&c, "primitiveAssign", &[]).unwrap();
    assert_eq!(r.outcome, Outcome::Finished);
    assert_eq!(st["s1"], json!({"x": 3}));
    assert_eq!(st["s2"], json!({"x": 1}));
    assert_eq!(st["s3"], json!({"x": 2}));
    let (r, st) = exec_function(&c, "storageAssign", &[]).unwrap();
    assert_eq!(r.outcome, Outcome::Finished);
    for v in ["s1", "s2", "s3"] {
        assert_eq!(st[v], json!({"x": 1}), "{}", v);
    }
}

#[test]
fn popped_slot_visible_through_pointer_only() {
    let c = frontend::load(&common::fixture("dangling_pointer.sol")).unwrap();
    let (r, st) = exec_function(&c, "constructor", &[]).unwrap();
    assert_eq!(r.outcome, Outcome::Finished);
    assert_eq!(st["a"], json!({"length": 0, "elems": []}));
    let c = frontend::load(&common::fixture("dangling_index.sol")).unwrap();
    let (r, _) = exec_function(&c, "constructor", &[]).unwrap();
    assert_eq!(r.outcome, Outcome::AssertFailed(0));
}

#[test]
fn defaults_only_contract() {
    let c = frontend::load("contract C { int x; }").unwrap();
    let (_, st) = exec_function(&c, "constructor", &[]).unwrap();
    assert_eq!(st, json!({"x": 0}));
}

#[test]
fn append_then_isset() {
    let c = frontend::load(&common::fixture("data_storage.sol")).unwrap();
    let mut m = Machine::new(&c);
    m.call("append", &[json!(7), json!(11)]).unwrap();
    let r = m.call("isset", &[json!({"$storage": ["records", 7]})]).unwrap();
    assert_eq!(m.value_json(&r.returns[0].1, &frontend::SolType::Bool).unwrap(), json!(true));
    let r = m.call("isset", &[json!({"$storage": ["records", 8]})]).unwrap();
    assert_eq!(m.value_json(&r.returns[0].1, &frontend::SolType::Bool).unwrap(), json!(false));
    let r = m.call("get", &[json!(7)]).unwrap();
    let t = frontend::SolType::dyn_array(frontend::SolType::Int);
    assert_eq!(m.value_json(&r.returns[0].1, &t).unwrap(), json!({"length": 1, "elems": [11]}));
}

#[test]
fn execution_is_deterministic_and_storage_has_no_addresses() {
    for seed in 0..40 {
        let text = random_program(seed, 16);
        let c = frontend::load(&text).unwrap();
        let mut a = Machine::new(&c);
        a.unroll = Some(GEN_UNROLL);
        let mut b = Machine::new(&c);
        b.unroll = Some(GEN_UNROLL);
        let ra = a.call("constructor", &[]).unwrap();
        let rb = b.call("constructor", &[]).unwrap();
        assert_eq!(ra.outcome, rb.outcome, "seed {}", seed);
        assert_eq!(ra.passed, rb.passed, "seed {}", seed);
        let sa = a.storage_json();
        assert_eq!(sa, b.storage_json(), "seed {}", seed);
        let text = sa.to_string();
        assert!(!text.contains("storptr") && !text.contains("error"), "seed {}: {}", seed, text);
    }
}

#[test]
fn generator_snapshot() {
    assert_eq!(random_program(0, 10), common::fixture("generated_seed0_size10.sol"));
    assert_eq!(random_program(5, 12), random_program(5, 12));
}

#[test]
fn generated_programs_are_accepted_and_supported() {
    for seed in 0..1000 {
        let text = random_program(seed, 20);
        let c = frontend::load(&text).unwrap_or_else(|e| panic!("seed {}: {}\n{}", seed, e, text));
        for (f, p) in translate_contract(&c, TranslateOptions { unroll: Some(GEN_UNROLL) }) {
            if let Err(e) = p {
                panic!("seed {} {}: {}\n{}", seed, f, e, text);
            }
        }
    }
}
