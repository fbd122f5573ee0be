// SPDX-License-Identifier: Apache-2.0

//! Differential testing of the verifier against the oracle on generated
//! programs.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::{verify_contract, AssertVerdict, FunctionOutcome, VerifyOptions};
use crate::frontend;
use crate::oracle::gen::GEN_UNROLL;
use crate::oracle::{random_program, Machine, Outcome};
use crate::translate::TranslateOptions;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "lowercase")]
pub enum FuzzVerdict {
    Agree,
    Disagree { detail: String },
    /// The verifier could not decide (timeout, unknown, unsupported).
    Inconclusive { detail: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct FuzzCase {
    pub seed: u64,
    pub asserts: usize,
    /// Assert id the oracle reports as failing, if any.
    pub failing: Option<usize>,
    #[serde(flatten)]
    pub verdict: FuzzVerdict,
    pub seconds: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct FuzzSummary {
    pub cases: Vec<FuzzCase>,
    pub agree: usize,
    pub disagree: usize,
    pub inconclusive: usize,
    pub seconds: f64,
}

/// Oracle and verifier on the program generated from `seed`. An assert the
/// oracle passes must verify, the one it fails must have a counterexample,
/// and asserts after a failure are vacuously verified.
pub fn fuzz_one(seed: u64, size: usize, opts: &VerifyOptions) -> (String, FuzzCase) {
    let start = Instant::now();
    let text = random_program(seed, size);
    let case = |asserts, failing, verdict| FuzzCase { seed, asserts, failing, verdict, seconds: start.elapsed().as_secs_f64() };
    let c = match frontend::load(&text) {
        Ok(c) => c,
        Err(e) => return (text, case(0, None, FuzzVerdict::Disagree { detail: format!("frontend: {}", e) })),
    };
    let mut m = Machine::new(&c);
    m.unroll = Some(GEN_UNROLL);
    let failing = match m.call("constructor", &[]) {
        Ok(r) => match r.outcome {
            Outcome::Finished => None,
            Outcome::AssertFailed(id) => Some(id),
        },
        Err(e) => return (text, case(c.asserts.len(), None, FuzzVerdict::Inconclusive { detail: format!("oracle: {}", e) })),
    };
    let mut o = opts.clone();
    o.translate = TranslateOptions { unroll: Some(GEN_UNROLL) };
    let report = verify_contract(&c, &o);
    let mut problems = vec![];
    let mut inconclusive = vec![];
    for f in &report.functions {
        match &f.outcome {
            FunctionOutcome::Checked { .. } => {}
            FunctionOutcome::Unsupported { message } | FunctionOutcome::Error { message } => {
                inconclusive.push(format!("{}: {}", f.name, message))
            }
        }
    }
    for a in report.asserts() {
        let want_fail = Some(a.id) == failing;
        match (&a.verdict, want_fail) {
            (AssertVerdict::Verified, false) | (AssertVerdict::Counterexample { .. }, true) => {}
            (AssertVerdict::Verified, true) => problems.push(format!("assert #{} (line {}) verified, oracle fails it", a.id, a.line)),
            (AssertVerdict::Counterexample { .. }, false) => {
                problems.push(format!("assert #{} (line {}) has a counterexample, oracle passes it", a.id, a.line))
            }
            (v, _) => inconclusive.push(format!("assert #{}: {:?}", a.id, v)),
        }
    }
    let verdict = if !problems.is_empty() {
        FuzzVerdict::Disagree { detail: problems.join("; ") }
    } else if !inconclusive.is_empty() {
        FuzzVerdict::Inconclusive { detail: inconclusive.join("; ") }
    } else {
        FuzzVerdict::Agree
    };
    (text, case(c.asserts.len(), failing, verdict))
}

/// Runs [`fuzz_one`] over `seeds` on `jobs` worker threads.
pub fn fuzz(seeds: std::ops::Range<u64>, size: usize, opts: &VerifyOptions, jobs: usize) -> FuzzSummary {
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().expect("thread pool");
    let mut cases: Vec<FuzzCase> = pool.install(|| {
        seeds
            .into_par_iter()
            .map(|s| {
                let (text, case) = fuzz_one(s, size, opts);
                if let FuzzVerdict::Disagree { detail } = &case.verdict {
                    log::error!("seed {}: {}\n{}", s, detail, text);
                }
                case
            })
            .collect()
    });
    cases.sort_by_key(|c| c.seed);
    let count = |f: fn(&FuzzVerdict) -> bool| cases.iter().filter(|c| f(&c.verdict)).count();
    FuzzSummary {
        agree: count(|v| matches!(v, FuzzVerdict::Agree)),
        disagree: count(|v| matches!(v, FuzzVerdict::Disagree { .. })),
        inconclusive: count(|v| matches!(v, FuzzVerdict::Inconclusive { .. })),
        cases,
        seconds: start.elapsed().as_secs_f64(),
    }
}
